//! Subgroups whose image mod p lies in a Cartan subgroup.

use rand::seq::SliceRandom;
use serde_json::json;

use super::catalogue::{class_catalogue, compare_with_stated, conjugate_into};
use super::{describe, Context, VerificationReport};
use crate::error::Result;
use crate::families::{cartan_pair, diagonal_swap, named, FamilyId};
use crate::lattice::{enumerate_subgroups, Dedup};
use crate::residue::Modulus;
use crate::subgrp::{are_conjugate, are_locally_conjugate, Subgroup};

const P5_SAMPLES: usize = 24;

/// Checks the pair built from `d`; returns it when D ≠ D′.
fn check_pair(
    report: &mut VerificationReport,
    d: &Subgroup,
) -> Result<Option<(Subgroup, Subgroup)>> {
    if diagonal_swap(d)? == *d {
        return Ok(None);
    }
    let (h1, h2) = cartan_pair(d)?;
    if !are_locally_conjugate(&h1, &h2) {
        report.refute(json!({ "not_locally_conjugate": describe(d) }));
    } else if let Some(x) = are_conjugate(&h1, &h2) {
        report.refute(json!({ "conjugate_pair": describe(d), "conjugator": x }));
    }
    Ok(Some((h1, h2)))
}

/// The split Cartan pairs over every D ≤ C_s(9), and the sweep over all
/// classes of GL₂(ℤ/9ℤ) with image in C_s(3); at p = 5, sampled D.
pub fn verify_cartan_pairs(ctx: &Context) -> Result<VerificationReport> {
    let p = ctx.p;
    let mut report = VerificationReport::new("cartan-pairs", p);
    let r = Modulus::new(p, 2)?;
    let ds = enumerate_subgroups(&named(FamilyId::Cs, r)?, Dedup::Equality, None, &ctx.budget)?;
    report.stat("diagonal_subgroups", ds.len());
    let chosen: Vec<&Subgroup> = if p == 3 {
        ds.iter().collect()
    } else {
        report.seed = Some(ctx.seed);
        let mut rng = ctx.rng();
        let mut movable: Vec<&Subgroup> = Vec::new();
        let mut fixed: Vec<&Subgroup> = Vec::new();
        for d in &ds {
            if diagonal_swap(d)? == *d {
                fixed.push(d);
            } else {
                movable.push(d);
            }
        }
        let mut pick: Vec<&Subgroup> = movable
            .choose_multiple(&mut rng, P5_SAMPLES)
            .copied()
            .collect();
        pick.extend(fixed.choose_multiple(&mut rng, 4).copied());
        pick
    };
    let mut stated = Vec::new();
    let mut trivial = 0usize;
    for d in &chosen {
        ctx.budget.check(stated.len())?;
        match check_pair(&mut report, d)? {
            Some(pair) => stated.push(pair),
            None => trivial += 1,
        }
    }
    report.stat("checked_d", chosen.len());
    report.stat("swap_invariant_d", trivial);
    report.stat("nontrivial_constructed", stated.len());
    report.pairs.extend(stated.iter().cloned());

    if p == 3 {
        let cat = class_catalogue(&ctx.budget)?;
        let cs3 = named(FamilyId::Cs, r.base())?;
        let in_cs: Vec<bool> = cat
            .classes()
            .iter()
            .map(|h| conjugate_into(&h.image_mod_p().expect("k = 2"), &cs3, None).is_some())
            .collect();
        report.stat(
            "classes_with_split_cartan_image",
            in_cs.iter().filter(|&&b| b).count(),
        );
        let found = cat.fingerprint_pairs(|i| in_cs[i]);
        report.pairs.extend(
            found
                .iter()
                .map(|&(i, j)| (cat.classes()[i].clone(), cat.classes()[j].clone())),
        );
        compare_with_stated(&mut report, cat, &found, &stated);
    } else {
        report.note("the class sweep runs at p = 3 only; p = 5 checks sampled D");
    }
    report.check_necessity();
    Ok(report)
}

/// Every locally conjugate pair with image in C_ns(3), not central, is
/// conjugate.
pub fn verify_cns_rigidity(ctx: &Context) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("cns-rigidity", ctx.p);
    let r = Modulus::new(ctx.p, 2)?;
    let cat = class_catalogue(&ctx.budget)?;
    let cns = named(FamilyId::Cns, r.base())?;
    let z = named(FamilyId::Z, r.base())?;
    let keep: Vec<bool> = cat
        .classes()
        .iter()
        .map(|h| {
            let img = h.image_mod_p().expect("k = 2");
            !img.is_subgroup_of(&z) && conjugate_into(&img, &cns, None).is_some()
        })
        .collect();
    let swept = keep.iter().filter(|&&b| b).count();
    report.stat("classes_swept", swept);
    let preimage = {
        let mut gens = cns
            .generators()
            .iter()
            .map(|g| g.integer_lift().expect("k = 1"))
            .collect::<Vec<_>>();
        gens.extend(named(FamilyId::KerPhi, r)?.generators().iter().copied());
        Subgroup::closure(r, &gens)?
    };
    report.stat("full_preimage_order", preimage.order());
    match cat.index_of(&preimage) {
        Some(i) if keep[i] => {}
        _ => report.refute(json!({ "full_preimage_not_swept": describe(&preimage) })),
    }
    let found = cat.fingerprint_pairs(|i| keep[i]);
    report.stat("nontrivial_pairs", found.len());
    for &(i, j) in &found {
        let (h1, h2) = (&cat.classes()[i], &cat.classes()[j]);
        report.pairs.push((h1.clone(), h2.clone()));
        if are_conjugate(h1, h2).is_none() {
            report.refute(json!({ "nontrivial_pair": [describe(h1), describe(h2)] }));
        }
    }
    report.check_necessity();
    Ok(report)
}
