//! Non-conjugate locally conjugate subgroups of GL₂(ℤ/pℤ).

use serde_json::json;

use super::catalogue::{compare_with_stated, gl2p_catalogue};
use super::{describe, Context, VerificationReport};
use crate::error::{Error, Result};
use crate::families::{diagonal_swap, glp_pair, named, FamilyId};
use crate::lattice::{enumerate_subgroups, Dedup};
use crate::residue::Modulus;

/// Every class pair of GL₂(ℤ/pℤ) with equal fingerprints against the pairs
/// `⟨D, t⟩, ⟨D′, t⟩` over all D ≤ C_s(p) with D ≠ D′.
pub fn verify_glp_pairs(ctx: &Context) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("glp-pairs", ctx.p);
    let f = Modulus::new(ctx.p, 1)?;
    let cat = gl2p_catalogue(ctx.p, &ctx.budget)?;
    report.stat("subgroup_classes", cat.len());
    let cs = named(FamilyId::Cs, f)?;
    let ds = enumerate_subgroups(&cs, Dedup::Equality, None, &ctx.budget)?;
    let mut stated = Vec::new();
    let mut swap_invariant = 0usize;
    for d in &ds {
        if diagonal_swap(d)? == *d {
            swap_invariant += 1;
            continue;
        }
        match glp_pair(d) {
            Ok(pair) => stated.push(pair),
            Err(Error::BadParameter(_)) => {
                report.refute(json!({ "pair_not_nontrivial": describe(d) }));
            }
            Err(e) => return Err(e),
        }
    }
    report.stat("diagonal_subgroups", ds.len());
    report.stat("swap_invariant", swap_invariant);
    let found = cat.fingerprint_pairs(|_| true);
    compare_with_stated(&mut report, cat, &found, &stated);
    Ok(report)
}
