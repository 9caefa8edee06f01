//! Which combinations of τ, k and D in the Borel pair forms give pairs that
//! are locally conjugate, and which of those are not conjugate, for p ≥ 5.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use super::{Context, VerificationReport};
use crate::error::Result;
use crate::families::{borel_pair, diagonal_swap, named, FamilyId, KernelKind, TauKind};
use crate::lattice::{enumerate_subgroups, Dedup};
use crate::residue::Modulus;
use crate::subgrp::{are_conjugate, are_locally_conjugate, Subgroup};

const TAUS: [TauKind; 4] = [
    TauKind::Plain,
    TauKind::PlusScalarP,
    TauKind::Lower1,
    TauKind::LowerEps,
];
const KERNELS: [KernelKind; 2] = [KernelKind::Identity, KernelKind::Lower];

#[derive(Default)]
struct Tally {
    tried: usize,
    locally_conjugate: usize,
    nontrivial: usize,
}

pub fn verify_borel_forms(ctx: &Context) -> Result<VerificationReport> {
    let p = ctx.p;
    let mut report = VerificationReport::new("borel-forms", p);
    let r = Modulus::new(p, 2)?;
    let lifted_cs = named(FamilyId::Cs, r)?.c_part()?;
    let mut ds: Vec<Subgroup> = Vec::new();
    for d in enumerate_subgroups(&lifted_cs, Dedup::Equality, None, &ctx.budget)? {
        if diagonal_swap(&d)? != d {
            ds.push(d);
        }
    }
    report.stat("movable_d", ds.len());
    let mut jobs = Vec::new();
    for tau in TAUS {
        let params: Vec<i64> = match tau {
            TauKind::Plain | TauKind::PlusScalarP => vec![0],
            TauKind::Lower1 | TauKind::LowerEps => (0..p as i64).collect(),
        };
        for a in params {
            for k in KERNELS {
                for d in &ds {
                    jobs.push((tau, a, k, d));
                }
            }
        }
    }
    ctx.budget.check(0)?;
    let results: Vec<Result<(TauKind, KernelKind, Subgroup, Subgroup, bool, bool)>> = jobs
        .par_iter()
        .map(|&(tau, a, k, d)| {
            let (h1, h2) = borel_pair(tau, r.base().residue(a), k, d)?;
            let local = are_locally_conjugate(&h1, &h2);
            let conj = local && are_conjugate(&h1, &h2).is_some();
            Ok((tau, k, h1, h2, local, conj))
        })
        .collect();
    let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
    for res in results {
        let (tau, k, h1, h2, local, conj) = res?;
        let key = format!(
            "{}/{}",
            json!(tau).as_str().unwrap_or("?"),
            json!(k).as_str().unwrap_or("?")
        );
        let t = tallies.entry(key).or_default();
        t.tried += 1;
        if local {
            t.locally_conjugate += 1;
            if !conj {
                t.nontrivial += 1;
            }
            report.pairs.push((h1, h2));
        }
    }
    let total: usize = tallies.values().map(|t| t.nontrivial).sum();
    let table: BTreeMap<&String, _> = tallies
        .iter()
        .map(|(key, t)| (key, json!({ "tried": t.tried, "locally_conjugate": t.locally_conjugate, "nontrivial": t.nontrivial })))
        .collect();
    report.stat("pairs_tried", jobs.len());
    report.stat("nontrivial_pairs", total);
    report.stat("by_form", table);
    if total == 0 {
        report.refute(json!({ "reason": "no combination gives a nontrivial pair" }));
    }
    report.check_necessity();
    Ok(report)
}
