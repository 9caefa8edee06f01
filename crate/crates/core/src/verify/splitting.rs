//! Subgroups with image of order prime to p: equal kernel part and equal
//! image force conjugacy.

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

use super::catalogue::gl2p_catalogue;
use super::kernel::enumerate_kernel_subgroups;
use super::{describe, Context, Status, VerificationReport};
use crate::error::Result;
use crate::families::{named, FamilyId};
use crate::mat2::Mat2;
use crate::residue::Modulus;
use crate::subgrp::{are_conjugate, Subgroup};

/// Twisted samples per run.
pub const SAMPLES: usize = 50;

/// Draws per requested sample before the sampler gives up.
const ATTEMPTS_PER_SAMPLE: usize = 200;

/// A lift of `g` mod p to an element of the same order prime to p.
pub(crate) fn coprime_lift(g: &Mat2, r: Modulus) -> Result<Mat2> {
    let n = g.order().expect("invertible") as i64;
    let lift = g.integer_lift()?;
    // e ≡ 1 mod n and e ≡ 0 mod p², so φ(lift^e) = g and the kernel factor dies.
    let m = r.m() as i64;
    let e = (0..n)
        .map(|j| m * j)
        .find(|e| e % n == 1 % n)
        .expect("n is prime to p");
    lift.pow(e)
}

/// Pairs (H, H′) with H ∩ ker φ = H′ ∩ ker φ, φ(H) = φ(H′) of order prime
/// to p, where H′ multiplies the complement generators of H by random
/// kernel elements. Fewer than `n` pairs are returned if draws run out.
pub fn sample_twisted_pairs(ctx: &Context, n: usize) -> Result<Vec<(Subgroup, Subgroup)>> {
    let p = ctx.p;
    let r = Modulus::new(p, 2)?;
    let images: Vec<&Subgroup> = gl2p_catalogue(p, &ctx.budget)?
        .classes()
        .iter()
        .filter(|g| g.order() % p as usize != 0)
        .collect();
    let kernels = enumerate_kernel_subgroups(p, &ctx.budget)?;
    let ker: Vec<Mat2> = named(FamilyId::KerPhi, r)?.iter().collect();
    let mut rng = ctx.rng();
    let mut out = Vec::new();
    let mut attempts = 0usize;
    while out.len() < n && attempts < n * ATTEMPTS_PER_SAMPLE {
        attempts += 1;
        ctx.budget.check(attempts)?;
        let image = images.choose(&mut rng).expect("trivial group has order 1");
        let lifts = image
            .generators()
            .iter()
            .map(|g| coprime_lift(g, r))
            .collect::<Result<Vec<_>>>()?;
        let complement = Subgroup::closure(r, &lifts)?;
        if complement.order() != image.order() {
            continue;
        }
        let normal: Vec<&Subgroup> = kernels
            .iter()
            .filter(|k| lifts.iter().all(|c| k.is_normalized_by(c)))
            .collect();
        let k = *normal.choose(&mut rng).expect("ker phi itself is normal");
        let build = |gens: &[Mat2]| {
            let mut all = gens.to_vec();
            all.extend_from_slice(k.generators());
            Subgroup::closure(r, &all)
        };
        let base = build(&lifts)?;
        let twisted_gens: Vec<Mat2> = lifts
            .iter()
            .map(|c| *c * ker[rng.gen_range(0..ker.len())])
            .collect();
        let twisted = build(&twisted_gens)?;
        if twisted.kernel_part()? != *k || twisted.order() != base.order() {
            continue;
        }
        out.push((base, twisted));
    }
    Ok(out)
}

pub fn verify_schur_zassenhaus(ctx: &Context) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("schur-zassenhaus", ctx.p);
    report.seed = Some(ctx.seed);
    let pairs = sample_twisted_pairs(ctx, SAMPLES)?;
    report.stat("samples", pairs.len());
    report.stat(
        "distinct_pairs",
        pairs.iter().filter(|(a, b)| a != b).count(),
    );
    let mut witnesses = Vec::new();
    for (h1, h2) in &pairs {
        match are_conjugate(h1, h2) {
            // The conjugator is replayed through a separate closure.
            Some(x) if h1.conjugate(&x)? == *h2 => witnesses.push(x),
            Some(x) => {
                report.refute(json!({ "bad_witness": x, "h1": describe(h1), "h2": describe(h2) }))
            }
            None => report.refute(json!({ "not_conjugate": [describe(h1), describe(h2)] })),
        }
    }
    report.stat("witnesses", witnesses.len());
    if pairs.len() < SAMPLES && report.status == Status::Verified {
        report.skip(format!(
            "sampler produced {} of {SAMPLES} pairs",
            pairs.len()
        ));
    }
    report.pairs = pairs;
    report.check_necessity();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coprime_lift_keeps_order() {
        let r = Modulus::new(3, 2).unwrap();
        let g = Mat2::new(r.base(), 0, 1, 2, 0);
        let l = coprime_lift(&g, r).unwrap();
        assert_eq!(l.order(), g.order());
        assert_eq!(l.reduce_mod_p().unwrap(), g);
    }

    #[test]
    fn sampler_meets_its_contract() {
        let ctx = Context::new(3).with_seed(7);
        for (h1, h2) in sample_twisted_pairs(&ctx, 8).unwrap() {
            assert_eq!(h1.kernel_part().unwrap(), h2.kernel_part().unwrap());
            assert_eq!(h1.image_mod_p().unwrap(), h2.image_mod_p().unwrap());
            assert_ne!(h1.image_mod_p().unwrap().order() % 3, 0);
        }
    }
}
