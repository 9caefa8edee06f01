//! Subgroups of ker φ: enumeration, classification up to conjugacy, and the
//! fingerprint test against raw orbit counts.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde_json::json;

use super::classes::conjugation_orbits;
use super::{describe, Context, VerificationReport};
use crate::ambient::gl2_generators;
use crate::error::Result;
use crate::families::{kernel_catalogue, named, FamilyId, KernelMember};
use crate::lattice::{enumerate_subgroups, Budget, Dedup};
use crate::residue::{smallest_nonsquare, Modulus};
use crate::subgrp::{are_conjugate, are_locally_conjugate, Subgroup};

/// Every subgroup of ker φ ≤ GL₂(ℤ/p²ℤ), sorted by order then elements.
pub fn enumerate_kernel_subgroups(p: u32, budget: &Budget) -> Result<Vec<Subgroup>> {
    let ker = named(FamilyId::KerPhi, Modulus::new(p, 2)?)?;
    enumerate_subgroups(&ker, Dedup::Equality, None, budget)
}

/// Number of k-dimensional subspaces of F_q^n for k = 0..=n.
pub fn gaussian_subspace_count(q: u64, n: u32) -> Vec<u64> {
    (0..=n)
        .map(|k| {
            let mut num = 1u64;
            let mut den = 1u64;
            for i in 0..k {
                num *= q.pow(n - i) - 1;
                den *= q.pow(i + 1) - 1;
            }
            num / den
        })
        .collect()
}

/// Orbit labels of `subs` under conjugation by integer lifts of the
/// generators of GL₂(ℤ/pℤ).
fn subspace_orbits(p: u32, subs: &[Subgroup]) -> Result<Vec<usize>> {
    let f = Modulus::new(p, 1)?;
    let lifts: Vec<_> = gl2_generators(f)
        .iter()
        .map(|g| g.integer_lift().expect("k = 1"))
        .collect();
    let index: HashMap<&[u32], usize> = subs
        .iter()
        .enumerate()
        .map(|(i, h)| (h.codes(), i))
        .collect();
    let mut label = vec![usize::MAX; subs.len()];
    let mut next = 0;
    for start in 0..subs.len() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for s in &lifts {
                let image = subs[i].conjugate(s)?;
                let j = index[image.codes()];
                if label[j] == usize::MAX {
                    label[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    Ok(label)
}

fn norm(member: &KernelMember, p: i64) -> i64 {
    let eps = smallest_nonsquare(p as u32).value() as i64;
    let (a, b) = (member.params.a.unwrap_or(0), member.params.b.unwrap_or(0));
    (a * a - eps * b * b).rem_euclid(p)
}

/// Whether two listed members may lie in one conjugacy class.
fn allowed_merge(x: &KernelMember, y: &KernelMember, p: i64) -> bool {
    match (x.id, y.id) {
        (FamilyId::Ker2(6), FamilyId::Ker2(6)) => norm(x, p) == norm(y, p),
        // ⟨I + diag(1,d)p⟩ contains I + diag(1/d, 1)p, the swap of diag(1, 1/d).
        (FamilyId::Ker01(4), FamilyId::Ker01(4)) => {
            let (d, e) = (x.params.d.unwrap_or(0), y.params.d.unwrap_or(0));
            (d * e).rem_euclid(p) == 1
        }
        _ => false,
    }
}

/// Kernel subgroups against the listed families and the stated local
/// conjugacies.
pub fn verify_kernel_classification(ctx: &Context) -> Result<VerificationReport> {
    let p = ctx.p;
    let pi = p as i64;
    let mut report = VerificationReport::new("kernel-classification", p);
    let subs = enumerate_kernel_subgroups(p, &ctx.budget)?;
    let index: HashMap<&[u32], usize> = subs
        .iter()
        .enumerate()
        .map(|(i, h)| (h.codes(), i))
        .collect();

    let mut by_dim = vec![0u64; 5];
    for h in &subs {
        by_dim[h.vector_dim()? as usize] += 1;
    }
    let expected_dims = gaussian_subspace_count(p as u64, 4);
    report.stat("subspaces", subs.len());
    report.stat("by_dimension", &by_dim);
    if by_dim != expected_dims {
        report.refute(json!({ "by_dimension": by_dim, "gaussian": expected_dims }));
        return Ok(report);
    }

    let orbit = subspace_orbits(p, &subs)?;
    let orbit_count = orbit.iter().max().map_or(0, |m| m + 1);
    report.stat("orbits", orbit_count);
    ctx.budget.check(subs.len())?;

    let members = kernel_catalogue(p)?;
    report.stat("listed_members", members.len());
    let member_orbit: Vec<usize> = members
        .iter()
        .map(|m| orbit[index[m.group.codes()]])
        .collect();

    // Coverage: every orbit is met by the lists.
    let hit: BTreeSet<usize> = member_orbit.iter().copied().collect();
    if let Some(o) = (0..orbit_count).find(|o| !hit.contains(o)) {
        let sub = &subs[orbit.iter().position(|&x| x == o).expect("inhabited orbit")];
        report.refute(json!({ "unlisted_class": describe(sub) }));
    }
    report.stat("listed_orbits", hit.len());

    // Members may share an orbit only through the stated merges.
    let mut merges: Vec<String> = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let same = member_orbit[i] == member_orbit[j];
            let allowed = allowed_merge(&members[i], &members[j], pi);
            if same && !allowed {
                report.refute(json!({
                    "conjugate_but_listed_separately": [members[i].label(), members[j].label()],
                }));
            }
            if same {
                merges.push(format!("{} ~ {}", members[i].label(), members[j].label()));
            }
            if allowed && members[i].id == FamilyId::Ker2(6) && !same {
                report.refute(json!({
                    "stated_conjugate_but_not": [members[i].label(), members[j].label()],
                }));
            }
        }
    }
    report.stat("merges", merges.len());
    let redundant: Vec<&String> = merges.iter().filter(|m| m.starts_with("ker01.4")).collect();
    if !redundant.is_empty() {
        report.note(format!(
            "the cyclic list repeats a class: {} pairs I+diag(1,d)p ~ I+diag(1,1/d)p",
            redundant.len()
        ));
    }

    // The local-conjugacy graph between distinct orbits.
    let mut rep_of: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &o) in orbit.iter().enumerate() {
        rep_of.entry(o).or_insert(i);
    }
    let reps: Vec<usize> = rep_of.values().copied().collect();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (x, &i) in reps.iter().enumerate() {
        for &j in &reps[x + 1..] {
            if are_locally_conjugate(&subs[i], &subs[j]) {
                edges.insert((orbit[i].min(orbit[j]), orbit[i].max(orbit[j])));
            }
        }
    }
    let orbit_of = |id: FamilyId, d: Option<i64>| -> usize {
        let k = members
            .iter()
            .position(|m| m.id == id && m.params.d == d)
            .expect("listed member");
        member_orbit[k]
    };
    let mut expected: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut expected_labels: Vec<String> = Vec::new();
    let mut add = |a: usize, b: usize, label: String| {
        if expected.insert((a.min(b), a.max(b))) {
            expected_labels.push(label);
        }
    };
    add(
        orbit_of(FamilyId::Ker2(2), None),
        orbit_of(FamilyId::Ker2(3), Some(0)),
        "ker2.h2 ~ ker2.h3 d=0".into(),
    );
    let f = Modulus::new(p, 1)?;
    for d in 2..pi - 1 {
        let e = f.residue(d).inv()?.value() as i64;
        if e != d {
            add(
                orbit_of(FamilyId::Ker2(3), Some(d)),
                orbit_of(FamilyId::Ker2(3), Some(e)),
                format!("ker2.h3 d={} ~ ker2.h3 d={}", d.min(e), d.max(e)),
            );
        }
    }
    report.stat("nontrivial_pairs", edges.len());
    report.stat("expected_pairs", &expected_labels);
    if edges != expected {
        let extra: Vec<_> = edges
            .difference(&expected)
            .map(|&(a, b)| (describe(&subs[rep_of[&a]]), describe(&subs[rep_of[&b]])))
            .collect();
        let missing: Vec<_> = expected
            .difference(&edges)
            .map(|&(a, b)| (describe(&subs[rep_of[&a]]), describe(&subs[rep_of[&b]])))
            .collect();
        report.refute(json!({ "unexpected_pairs": extra, "missing_pairs": missing }));
    }
    // Orbits are GL₂ classes; the conjugator search must agree.
    for &(a, b) in &edges {
        let (h1, h2) = (&subs[rep_of[&a]], &subs[rep_of[&b]]);
        if let Some(x) = are_conjugate(h1, h2) {
            report.refute(json!({ "pair": [describe(h1), describe(h2)], "conjugator": x }));
        }
        report.pairs.push((h1.clone(), h2.clone()));
    }
    report.check_necessity();
    Ok(report)
}

/// Fingerprint equality against raw per-orbit intersection counts, over
/// every ordered pair of kernel subgroups.
pub fn verify_gassmann_oracle(ctx: &Context) -> Result<VerificationReport> {
    let p = ctx.p;
    let mut report = VerificationReport::new("gassmann-oracle", p);
    let subs = enumerate_kernel_subgroups(p, &ctx.budget)?;
    let r = Modulus::new(p, 2)?;
    let ker = named(FamilyId::KerPhi, r)?;
    let points: Vec<_> = ker.iter().collect();
    let labels = conjugation_orbits(&points, &gl2_generators(r));
    let orbit_count = labels.iter().copied().max().map_or(0, |m| m + 1) as usize;
    let orbit_of: HashMap<u32, u32> = points
        .iter()
        .zip(&labels)
        .map(|(g, &l)| (g.encode(), l))
        .collect();
    let counts: Vec<Vec<u32>> = subs
        .par_iter()
        .map(|h| {
            let mut c = vec![0u32; orbit_count];
            for &code in h.codes() {
                c[orbit_of[&code] as usize] += 1;
            }
            c
        })
        .collect();
    let n = subs.len();
    let disagreement = (0..n).into_par_iter().find_map_first(|i| {
        (0..n)
            .find(|&j| (counts[i] == counts[j]) != are_locally_conjugate(&subs[i], &subs[j]))
            .map(|j| (i, j))
    });
    let lc_pairs: usize = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).filter(|&j| counts[i] == counts[j]).count())
        .sum();
    report.stat("subgroups", n);
    report.stat("ordered_pairs_compared", n * n);
    report.stat("raw_orbits", orbit_count);
    report.stat("locally_conjugate_unordered_pairs", lc_pairs);
    if let Some((i, j)) = disagreement {
        report.refute(json!({
            "h1": describe(&subs[i]), "h2": describe(&subs[j]),
            "raw_counts_equal": counts[i] == counts[j],
        }));
    }
    Ok(report)
}
