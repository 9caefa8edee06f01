//! Conjugacy-class catalogues of subgroups, cached per prime.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde_json::json;

use super::{describe, VerificationReport};
use crate::ambient::{gl2_generators, Ambient};
use crate::error::{Error, Result};
use crate::families::{named, FamilyId};
use crate::lattice::{enumerate_subgroups, Budget, Dedup};
use crate::mat2::Mat2;
use crate::residue::Modulus;
use crate::subgrp::{are_conjugate, Fingerprint, Subgroup};

/// One representative per conjugacy class of subgroups of an ambient GL₂.
pub struct ClassCatalogue {
    modulus: Modulus,
    classes: Vec<Subgroup>,
    by_key: HashMap<(usize, Fingerprint), Vec<usize>>,
}

impl ClassCatalogue {
    fn new(modulus: Modulus, classes: Vec<Subgroup>) -> ClassCatalogue {
        let mut by_key: HashMap<(usize, Fingerprint), Vec<usize>> = HashMap::new();
        for (i, h) in classes.iter().enumerate() {
            by_key
                .entry((h.order(), h.fingerprint().clone()))
                .or_default()
                .push(i);
        }
        ClassCatalogue {
            modulus,
            classes,
            by_key,
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn classes(&self) -> &[Subgroup] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// The class of `h`, decided by an explicit conjugator search.
    pub fn index_of(&self, h: &Subgroup) -> Option<usize> {
        self.by_key
            .get(&(h.order(), h.fingerprint().clone()))?
            .iter()
            .copied()
            .find(|&i| are_conjugate(&self.classes[i], h).is_some())
    }

    /// Unordered pairs of distinct classes with equal order and fingerprint,
    /// both satisfying `keep`, sorted.
    pub fn fingerprint_pairs(&self, keep: impl Fn(usize) -> bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for members in self.by_key.values() {
            let kept: Vec<usize> = members.iter().copied().filter(|&i| keep(i)).collect();
            for (x, &i) in kept.iter().enumerate() {
                for &j in &kept[x + 1..] {
                    out.push((i.min(j), i.max(j)));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn gl2(modulus: Modulus) -> Subgroup {
    Subgroup::closure(modulus, &gl2_generators(modulus)).expect("generators are invertible")
}

fn cached(
    cell: &'static OnceLock<ClassCatalogue>,
    build: impl FnOnce() -> Result<ClassCatalogue>,
) -> Result<&'static ClassCatalogue> {
    if let Some(c) = cell.get() {
        return Ok(c);
    }
    let c = build()?;
    Ok(cell.get_or_init(|| c))
}

/// All conjugacy classes of subgroups of GL₂(ℤ/9ℤ).
pub fn class_catalogue(budget: &Budget) -> Result<&'static ClassCatalogue> {
    static CELL: OnceLock<ClassCatalogue> = OnceLock::new();
    cached(&CELL, || {
        let r = Modulus::new(3, 2)?;
        let classes = enumerate_subgroups(&gl2(r), Dedup::Conjugacy, None, budget)?;
        Ok(ClassCatalogue::new(r, classes))
    })
}

/// All conjugacy classes of subgroups of GL₂(ℤ/pℤ) for p ∈ {3, 5, 7}.
///
/// The cyclic-extension enumerator reaches the solvable subgroups. For
/// p ≥ 5 the remaining ones contain SL₂(ℤ/pℤ), so they are the preimages
/// under det of the subgroups of (ℤ/pℤ)^×, and are added directly.
pub fn gl2p_catalogue(p: u32, budget: &Budget) -> Result<&'static ClassCatalogue> {
    static CELLS: [OnceLock<ClassCatalogue>; 3] = [const { OnceLock::new() }; 3];
    let slot = match p {
        3 => 0,
        5 => 1,
        7 => 2,
        _ => {
            return Err(Error::BadParameter(format!(
                "GL2(Z/pZ) catalogue covers p in 3, 5, 7; got {p}"
            )))
        }
    };
    cached(&CELLS[slot], || {
        let f = Modulus::new(p, 1)?;
        let mut classes = enumerate_subgroups(&gl2(f), Dedup::Conjugacy, None, budget)?;
        if p >= 5 {
            let sl2 = named(FamilyId::SL2, f)?;
            let r = gl2_generators(f)[2];
            let n = (p - 1) as i64;
            for e in (1..=n).filter(|e| n % e == 0) {
                let mut gens = sl2.generators().to_vec();
                gens.push(r.pow(e)?);
                classes.push(Subgroup::closure(f, &gens)?);
            }
            classes.sort_by(|a, b| {
                a.order()
                    .cmp(&b.order())
                    .then_with(|| a.codes().cmp(b.codes()))
            });
        }
        Ok(ClassCatalogue::new(f, classes))
    })
}

/// Some `x ∈ GL₂(ℤ/pℤ)` with `x·H·x⁻¹ ≤ target` and, if given, `must ∈ x·H·x⁻¹`.
pub(crate) fn conjugate_into(h: &Subgroup, target: &Subgroup, must: Option<&Mat2>) -> Option<Mat2> {
    let amb = Ambient::get(h.modulus());
    amb.elements().par_iter().find_map_first(|x| {
        let xi = x.inv().ok()?;
        if !h
            .generators()
            .iter()
            .all(|g| target.contains(&x.conj_with(&xi, g)))
        {
            return None;
        }
        match must {
            None => Some(*x),
            Some(m) => h.iter().any(|g| x.conj_with(&xi, &g) == *m).then_some(*x),
        }
    })
}

/// Class pairs found by fingerprint, compared with the class pairs of an
/// explicitly constructed family of pairs.
///
/// Found pairs are confirmed non-conjugate by a conjugator search. The
/// report is refuted if either set has a pair the other lacks.
pub(crate) fn compare_with_stated(
    report: &mut VerificationReport,
    cat: &ClassCatalogue,
    found: &[(usize, usize)],
    stated: &[(Subgroup, Subgroup)],
) {
    let mut stated_classes: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (h1, h2) in stated {
        match (cat.index_of(h1), cat.index_of(h2)) {
            (Some(i), Some(j)) if i != j => {
                stated_classes.insert((i.min(j), i.max(j)));
            }
            (Some(_), Some(_)) => {}
            _ => {
                report.refute(
                    json!({ "stated_pair_missing_from_catalogue": [describe(h1), describe(h2)] }),
                );
                return;
            }
        }
    }
    for &(i, j) in found {
        let (h1, h2) = (&cat.classes()[i], &cat.classes()[j]);
        if let Some(x) = are_conjugate(h1, h2) {
            report.refute(
                json!({ "catalogue_duplicate": [describe(h1), describe(h2)], "conjugator": x }),
            );
        }
    }
    let found: BTreeSet<(usize, usize)> = found.iter().copied().collect();
    report.stat("found_pairs", found.len());
    report.stat("stated_pairs", stated_classes.len());
    let outside: Vec<_> = found.difference(&stated_classes).collect();
    let unmatched: Vec<_> = stated_classes.difference(&found).collect();
    if let Some(&&(i, j)) = outside.first() {
        report.refute(json!({
            "pair_outside_stated_form": [describe(&cat.classes()[i]), describe(&cat.classes()[j])],
            "count": outside.len(),
        }));
    }
    if let Some(&&(i, j)) = unmatched.first() {
        report.refute(json!({
            "stated_pair_not_locally_conjugate": [describe(&cat.classes()[i]), describe(&cat.classes()[j])],
            "count": unmatched.len(),
        }));
    }
}
