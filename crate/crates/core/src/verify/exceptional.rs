//! Kernel parts of subgroups with A₄ or S₄ projective image.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

use super::catalogue::gl2p_catalogue;
use super::splitting::coprime_lift;
use super::{describe, Context, VerificationReport};
use crate::error::Result;
use crate::families::{named, FamilyId};
use crate::mat2::{Mat2, PPart};
use crate::residue::Modulus;
use crate::subgrp::Subgroup;

/// Sampled lifts per run, split evenly over [`MODES`].
pub const SAMPLES: usize = 48;

/// How generators of the mod-p group are lifted: a complement to ker φ, a
/// complement with I + Ip added, lifts times random kernel elements, and
/// lifts of order prime to p with a trace-0 kernel element added.
const MODES: [&str; 4] = [
    "complement",
    "complement-scalar",
    "random-lift",
    "trace-zero-seed",
];

/// The order of ⟨gens⟩ if it is at most `limit`.
fn closure_order_at_most(r: Modulus, gens: &[Mat2], limit: usize) -> Option<usize> {
    let id = Mat2::identity(r);
    let mut seen: HashSet<u32> = HashSet::from([id.encode()]);
    let mut queue = vec![id];
    let mut next = 0;
    while next < queue.len() {
        let x = queue[next];
        next += 1;
        for g in gens {
            let y = x * *g;
            if seen.insert(y.encode()) {
                if seen.len() > limit {
                    return None;
                }
                queue.push(y);
            }
        }
    }
    Some(seen.len())
}

/// Lifts of `gens` generating a complement to ker φ in φ⁻¹(⟨gens⟩).
///
/// The first lift has order prime to p. Each later generator is lifted by
/// walking its kernel coset, in random order, until the group generated so
/// far is no larger than its image. Every subgroup of order prime to p lies
/// in some complement, so each step succeeds.
fn complement_lifts(gens: &[Mat2], r: Modulus, rng: &mut impl Rng) -> Result<Option<Vec<Mat2>>> {
    let mut ker: Vec<Mat2> = named(FamilyId::KerPhi, r)?.iter().collect();
    ker.shuffle(rng);
    let mut lifts = vec![coprime_lift(&gens[0], r)?];
    for (i, g) in gens.iter().enumerate().skip(1) {
        let target = Subgroup::closure(r.base(), &gens[..=i])?.order();
        let base = g.integer_lift()?;
        let found = ker.iter().map(|kappa| base * *kappa).find(|cand| {
            let mut trial = lifts.clone();
            trial.push(*cand);
            closure_order_at_most(r, &trial, target) == Some(target)
        });
        match found {
            Some(x) => lifts.push(x),
            None => return Ok(None),
        }
    }
    Ok(Some(lifts))
}

/// The order of `g` modulo scalars.
fn projective_order(g: &Mat2) -> u64 {
    let mut x = *g;
    let mut n = 1;
    while !x.is_scalar() {
        x = x * *g;
        n += 1;
    }
    n
}

/// "A4" or "S4" when the image of `g` in PGL₂ is one of those groups.
fn exceptional_type(g: &Subgroup) -> Option<&'static str> {
    let centre = g.iter().filter(Mat2::is_scalar).count();
    match g.order() / centre {
        24 => Some("S4"),
        // The other order-12 subgroup of PGL₂(ℤ/5ℤ) ≅ S₅ has elements of order 6.
        12 if g.iter().all(|x| projective_order(&x) != 6) => Some("A4"),
        _ => None,
    }
}

/// A random nonzero trace-0 p-part, embedded in ker φ.
fn trace_zero_seed(r: Modulus, rng: &mut impl Rng) -> Mat2 {
    let p = r.p() as i64;
    loop {
        let (a, b, c) = (
            rng.gen_range(0..p),
            rng.gen_range(0..p),
            rng.gen_range(0..p),
        );
        if (a, b, c) != (0, 0, 0) {
            return PPart(Mat2::new(r.base(), a, b, c, -a)).embed();
        }
    }
}

pub fn verify_exceptional_kernels(ctx: &Context) -> Result<VerificationReport> {
    let p = ctx.p;
    let mut report = VerificationReport::new("exceptional-kernels", p);
    report.seed = Some(ctx.seed);
    let r = Modulus::new(p, 2)?;
    let bases: Vec<(&Subgroup, &str)> = gl2p_catalogue(p, &ctx.budget)?
        .classes()
        .iter()
        .filter_map(|g| exceptional_type(g).map(|t| (g, t)))
        .collect();
    report.stat("exceptional_classes", bases.len());
    if bases.is_empty() {
        report.skip("no subgroup with A4 or S4 projective image");
        return Ok(report);
    }
    let allowed = [
        ("trivial", Subgroup::trivial(r)),
        (
            "scalar",
            Subgroup::closure(r, &[Mat2::scalar(r, 1 + p as i64)])?,
        ),
        ("t", named(FamilyId::T, r)?),
        ("kerphi", named(FamilyId::KerPhi, r)?),
    ];
    let mut rng = ctx.rng();
    let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
    for i in 0..SAMPLES {
        ctx.budget.check(i)?;
        let &(g, kind) = bases.choose(&mut rng).expect("nonempty");
        let mode = MODES[i % MODES.len()];
        let pi = p as i64;
        let mut gens: Vec<Mat2> = Vec::new();
        match mode {
            "complement" | "complement-scalar" => {
                match complement_lifts(g.generators(), r, &mut rng)? {
                    Some(lifts) => gens = lifts,
                    None => {
                        report.refute(json!({ "no_complement": describe(g) }));
                        continue;
                    }
                }
                if mode == "complement-scalar" {
                    gens.push(Mat2::scalar(r, 1 + pi));
                }
            }
            _ => {
                for x in g.generators() {
                    let lift = coprime_lift(x, r)?;
                    if mode == "random-lift" {
                        let [a, b, c, d] = [(); 4].map(|_| rng.gen_range(0..pi));
                        gens.push(lift * PPart(Mat2::new(r.base(), a, b, c, d)).embed());
                    } else {
                        gens.push(lift);
                    }
                }
                if mode == "trace-zero-seed" {
                    gens.push(trace_zero_seed(r, &mut rng));
                }
            }
        }
        let h = Subgroup::closure(r, &gens)?;
        let k = h.kernel_part()?;
        match allowed.iter().find(|(_, a)| *a == k) {
            Some((name, _)) => {
                let key = format!("{kind}/{mode}/{name}");
                *histogram.entry(key).or_default() += 1;
            }
            None => report.refute(
                json!({ "h": describe(&h), "kernel_part": describe(&k), "projective_image": kind }),
            ),
        }
    }
    report.stat("samples", SAMPLES);
    report.stat("kernel_parts", histogram);
    Ok(report)
}
