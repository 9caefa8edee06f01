//! Element-level suites: class invariants against raw conjugation orbits,
//! and the similarity table against raw similarity orbits.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde_json::json;

use super::{Context, VerificationReport};
use crate::ambient::gl2_generators;
use crate::conjcls::{class_invariant, similarity_rep, SimilarityRep};
use crate::error::Result;
use crate::mat2::Mat2;
use crate::residue::Modulus;

/// Orbit labels of `points` under conjugation by the group generated by
/// `gens`. Every point's conjugates must be among `points`.
pub(crate) fn conjugation_orbits(points: &[Mat2], gens: &[Mat2]) -> Vec<u32> {
    let index: HashMap<Mat2, usize> = points.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let pairs: Vec<(Mat2, Mat2)> = gens
        .iter()
        .map(|s| (*s, s.inv().expect("invertible generator")))
        .collect();
    let mut label = vec![u32::MAX; points.len()];
    let mut next = 0u32;
    for start in 0..points.len() {
        if label[start] != u32::MAX {
            continue;
        }
        label[start] = next;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for (s, si) in &pairs {
                let j = index[&s.conj_with(si, &points[i])];
                if label[j] == u32::MAX {
                    label[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    label
}

fn group_elements(modulus: Modulus) -> Vec<Mat2> {
    let span = modulus.m().pow(4);
    (0..span)
        .map(|c| Mat2::decode(modulus, c).expect("code in range"))
        .filter(Mat2::is_invertible)
        .collect()
}

fn check_modulus(report: &mut VerificationReport, modulus: Modulus, double_loop: bool) {
    let elements = group_elements(modulus);
    let orbits = conjugation_orbits(&elements, &gl2_generators(modulus));
    let invariants: Vec<_> = elements.par_iter().map(class_invariant).collect();
    let orbit_count = orbits.iter().copied().max().map_or(0, |m| m + 1);
    let distinct: HashSet<_> = invariants.iter().collect();
    let key = format!("mod_{}", modulus.m());
    report.stat(
        &key,
        json!({ "elements": elements.len(), "orbits": orbit_count, "invariants": distinct.len(), "double_loop": double_loop }),
    );
    let mismatch = if double_loop {
        // Every ordered pair: equal invariants exactly when equal orbits.
        (0..elements.len()).into_par_iter().find_map_first(|i| {
            (0..elements.len())
                .find(|&j| (invariants[i] == invariants[j]) != (orbits[i] == orbits[j]))
                .map(|j| (i, j))
        })
    } else {
        // The invariant is constant on orbits and injective on them.
        let mut first: HashMap<u32, usize> = HashMap::new();
        let mut owner: HashMap<_, usize> = HashMap::new();
        let mut bad = None;
        for i in 0..elements.len() {
            let j = *first.entry(orbits[i]).or_insert(i);
            if invariants[i] != invariants[j] {
                bad = Some((i, j));
                break;
            }
            let k = *owner.entry(invariants[i]).or_insert(i);
            if orbits[k] != orbits[i] {
                bad = Some((i, k));
                break;
            }
        }
        bad
    };
    if let Some((i, j)) = mismatch {
        report.refute(json!({
            "g": elements[i], "h": elements[j],
            "invariant_g": invariants[i], "invariant_h": invariants[j],
            "same_orbit": orbits[i] == orbits[j],
        }));
    }
}

/// Class invariants against raw orbits of the conjugation action.
///
/// GL₂(ℤ/9ℤ) and GL₂(ℤ/pℤ) are checked by a full double loop; for
/// GL₂(ℤ/p²ℤ) with p ≥ 5 the equivalent orbit-wise check is used.
pub fn verify_class_invariants(ctx: &Context) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("class-invariants", ctx.p);
    let f = Modulus::new(ctx.p, 1)?;
    check_modulus(&mut report, f, true);
    ctx.budget.check(0)?;
    check_modulus(&mut report, f.square(), ctx.p == 3);
    Ok(report)
}

/// Table 1 against raw similarity orbits of Mat₂(ℤ/pℤ).
pub fn verify_similarity_reps(ctx: &Context) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("similarity-reps", ctx.p);
    let f = Modulus::new(ctx.p, 1)?;
    let all: Vec<Mat2> = (0..f.m().pow(4))
        .map(|c| Mat2::decode(f, c).expect("code in range"))
        .collect();
    let orbits = conjugation_orbits(&all, &gl2_generators(f));
    let table = SimilarityRep::table(ctx.p);
    let position: HashMap<Mat2, usize> = all.iter().enumerate().map(|(i, a)| (*a, i)).collect();

    // Rows per orbit.
    let mut rows_in_orbit: BTreeMap<u32, Vec<SimilarityRep>> = BTreeMap::new();
    for row in &table {
        rows_in_orbit
            .entry(orbits[position[&row.matrix(ctx.p)]])
            .or_default()
            .push(*row);
    }
    let orbit_count = orbits.iter().copied().max().map_or(0, |m| m + 1);
    report.stat("matrices", all.len());
    report.stat("orbits", orbit_count);
    report.stat("table_rows", table.len());
    for o in 0..orbit_count {
        let rows = rows_in_orbit.get(&o).map(Vec::as_slice).unwrap_or(&[]);
        if rows.len() != 1 {
            let member = all[orbits
                .iter()
                .position(|&x| x == o)
                .expect("orbit is inhabited")];
            report.refute(json!({ "orbit_member": member, "table_rows_in_orbit": rows }));
            return Ok(report);
        }
    }
    // The classifier names the row of each matrix's own orbit.
    let wrong = all.par_iter().enumerate().find_map_first(|(i, a)| {
        let got = similarity_rep(a).ok()?;
        let expected = rows_in_orbit[&orbits[i]][0];
        (got != expected).then_some((*a, got, expected))
    });
    if let Some((a, got, expected)) = wrong {
        report.refute(json!({ "matrix": a, "classified_as": got, "orbit_row": expected }));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbits_of_gl2_mod_3() {
        let f = Modulus::new(3, 1).unwrap();
        let g = group_elements(f);
        let orbits = conjugation_orbits(&g, &gl2_generators(f));
        // GL2(F3) has 8 conjugacy classes.
        assert_eq!(orbits.iter().max().unwrap() + 1, 8);
    }

    #[test]
    fn both_suites_verify_at_three() {
        let ctx = Context::new(3);
        assert!(verify_similarity_reps(&ctx).unwrap().is_verified());
        let r = verify_class_invariants(&ctx).unwrap();
        assert!(r.is_verified(), "{:?}", r.witness);
    }
}
