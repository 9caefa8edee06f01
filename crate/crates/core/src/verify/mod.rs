//! Exhaustive and sampled re-derivations of the classification claims.
//!
//! Each suite returns a [`VerificationReport`]. Suites never error on a
//! false claim: refutation is a report status with a witness attached.
//! Reports are deterministic for a fixed prime, seed and budget.

mod borel;
mod borel_forms;
mod cartan;
mod catalogue;
mod classes;
mod exceptional;
mod formulas;
mod glp;
mod kernel;
mod necessity;
mod sl2;
mod splitting;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::Budget;
use crate::subgrp::Subgroup;

pub use borel::count_borel_pairs_p3;
pub use borel_forms::verify_borel_forms;
pub use cartan::{verify_cartan_pairs, verify_cns_rigidity};
pub use catalogue::{class_catalogue, gl2p_catalogue, ClassCatalogue};
pub use classes::{verify_class_invariants, verify_similarity_reps};
pub use exceptional::verify_exceptional_kernels;
pub use formulas::verify_formulas;
pub use glp::verify_glp_pairs;
pub use kernel::{
    enumerate_kernel_subgroups, gaussian_subspace_count, verify_gassmann_oracle,
    verify_kernel_classification,
};
pub use necessity::verify_necessity;
pub use sl2::verify_sl2;
pub use splitting::{sample_twisted_pairs, verify_schur_zassenhaus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Refuted,
    Skipped,
}

/// The outcome of one suite.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub p: u32,
    pub status: Status,
    pub stats: BTreeMap<String, Value>,
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Locally conjugate pairs met by the suite, for the necessity check.
    #[serde(skip)]
    pub pairs: Vec<(Subgroup, Subgroup)>,
    /// Wall-clock time; kept out of the JSON so reports are reproducible.
    #[serde(skip)]
    pub runtime_ms: u128,
}

impl VerificationReport {
    pub fn new(claim: &str, p: u32) -> VerificationReport {
        VerificationReport {
            claim: claim.to_string(),
            p,
            status: Status::Verified,
            stats: BTreeMap::new(),
            witness: None,
            seed: None,
            notes: Vec::new(),
            pairs: Vec::new(),
            runtime_ms: 0,
        }
    }

    pub fn stat(&mut self, key: &str, value: impl Serialize) {
        self.stats.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable stat"),
        );
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Marks the report refuted with `witness`, keeping the first witness.
    pub fn refute(&mut self, witness: Value) {
        if self.status != Status::Refuted {
            self.status = Status::Refuted;
            self.witness = Some(witness);
        }
    }

    pub fn skip(&mut self, reason: impl Into<String>) {
        if self.status == Status::Verified {
            self.status = Status::Skipped;
        }
        self.note(reason);
    }

    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }

    pub fn stat_u64(&self, key: &str) -> Option<u64> {
        self.stats.get(key).and_then(Value::as_u64)
    }

    /// Runs the necessity check on the pairs collected so far and folds a
    /// failure into this report.
    pub fn check_necessity(&mut self) {
        let nec = verify_necessity(&self.pairs);
        self.stat(
            "necessity_pairs_checked",
            nec.stat_u64("checked").unwrap_or(0),
        );
        if nec.status == Status::Refuted {
            self.refute(serde_json::json!({ "necessity": nec.witness }));
        }
    }
}

/// Inputs shared by every suite.
#[derive(Clone, Copy, Debug)]
pub struct Context {
    pub p: u32,
    pub seed: u64,
    pub budget: Budget,
}

impl Context {
    pub fn new(p: u32) -> Context {
        Context {
            p,
            seed: 0,
            budget: Budget::unlimited(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Context {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Context {
        self.budget = budget;
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// A registered claim.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Claim {
    pub id: &'static str,
    pub summary: &'static str,
    pub primes: &'static [u32],
    /// Sampled suites can refute but only give evidence for a claim.
    pub sampled: bool,
    pub long_running: bool,
}

const CLAIMS: &[Claim] = &[
    Claim {
        id: "class-invariants",
        summary: "(l, d, tr, det) separates the conjugacy classes of GL2(Z/p^kZ)",
        primes: &[3, 5, 7],
        sampled: false,
        long_running: false,
    },
    Claim {
        id: "similarity-reps",
        summary: "every 2x2 matrix mod p is similar to exactly one table representative",
        primes: &[3, 5, 7],
        sampled: false,
        long_running: false,
    },
    Claim {
        id: "formulas",
        summary: "closed forms for powers of scalar, diagonal and unipotent lifts and for diagonal, antidiagonal and unipotent conjugation",
        primes: &[3, 5, 7],
        sampled: true,
        long_running: false,
    },
    Claim {
        id: "kernel-classification",
        summary: "kernel subgroups fall into the listed conjugacy classes; the only non-conjugate local conjugacies are H2~H3,0 and H3,d~H3,1/d",
        primes: &[3, 5, 7],
        sampled: false,
        long_running: false,
    },
    Claim {
        id: "gassmann-oracle",
        summary: "fingerprint comparison agrees with raw per-orbit intersection counts on all kernel subgroup pairs",
        primes: &[3, 5],
        sampled: false,
        long_running: false,
    },
    Claim {
        id: "glp-pairs",
        summary: "non-conjugate locally conjugate subgroups of GL2(Z/pZ) are exactly <D,t>, <D',t> with D != D'",
        primes: &[3, 5],
        sampled: false,
        long_running: false,
    },
    Claim {
        id: "cartan-pairs",
        summary: "with image in the split Cartan, non-conjugate local conjugacy happens exactly for <D, I+E12p>, <D', I+E12p>",
        primes: &[3, 5],
        sampled: false,
        long_running: false,
    },
    Claim {
        id: "cns-rigidity",
        summary: "with image in the nonsplit Cartan and not central, local conjugacy implies conjugacy",
        primes: &[3],
        sampled: false,
        long_running: false,
    },
    Claim {
        id: "borel-40",
        summary: "count of conjugacy-class pairs of non-conjugate locally conjugate subgroups of GL2(Z/9Z)",
        primes: &[3],
        sampled: false,
        long_running: true,
    },
    Claim {
        id: "borel-forms",
        summary: "which tau, k and D in the Borel pair forms give locally conjugate and nontrivially locally conjugate pairs",
        primes: &[5, 7],
        sampled: false,
        long_running: true,
    },
    Claim {
        id: "sl2",
        summary: "subgroups with image SL2(Z/pZ): the six p = 3 groups are pairwise not locally conjugate; for p = 5 only SL2(Z/25Z) and its full preimage occur",
        primes: &[3, 5],
        sampled: false,
        long_running: false,
    },
    Claim {
        id: "schur-zassenhaus",
        summary: "equal kernel part, equal image of order prime to p implies conjugate",
        primes: &[3],
        sampled: true,
        long_running: false,
    },
    Claim {
        id: "necessity",
        summary: "locally conjugate subgroups have locally conjugate kernel parts and locally conjugate images",
        primes: &[3],
        sampled: false,
        long_running: false,
    },
    Claim {
        id: "exceptional-kernels",
        summary: "with A4 or S4 projective image, the kernel part is trivial, the scalar line, T or ker phi",
        primes: &[5],
        sampled: true,
        long_running: false,
    },
];

/// The claim index.
pub fn claims() -> &'static [Claim] {
    CLAIMS
}

pub fn claim(id: &str) -> Option<&'static Claim> {
    CLAIMS.iter().find(|c| c.id == id)
}

/// Runs claim `id`. Budget exhaustion becomes a skipped report.
pub fn run(id: &str, ctx: &Context) -> Result<VerificationReport> {
    let claim = claim(id).ok_or_else(|| Error::BadParameter(format!("unknown claim {id:?}")))?;
    if !claim.primes.contains(&ctx.p) {
        return Err(Error::BadParameter(format!(
            "claim {id} supports p in {:?}, got {}",
            claim.primes, ctx.p
        )));
    }
    let start = Instant::now();
    let outcome = match id {
        "class-invariants" => verify_class_invariants(ctx),
        "similarity-reps" => verify_similarity_reps(ctx),
        "formulas" => verify_formulas(ctx),
        "kernel-classification" => verify_kernel_classification(ctx),
        "gassmann-oracle" => verify_gassmann_oracle(ctx),
        "glp-pairs" => verify_glp_pairs(ctx),
        "cartan-pairs" => verify_cartan_pairs(ctx),
        "borel-forms" => verify_borel_forms(ctx),
        "cns-rigidity" => verify_cns_rigidity(ctx),
        "borel-40" => count_borel_pairs_p3(ctx),
        "sl2" => verify_sl2(ctx),
        "schur-zassenhaus" => verify_schur_zassenhaus(ctx),
        "necessity" => necessity::verify_necessity_corpus(ctx),
        "exceptional-kernels" => verify_exceptional_kernels(ctx),
        _ => unreachable!("claim table and dispatch agree"),
    };
    let mut report = match outcome {
        Ok(r) => r,
        Err(Error::BudgetExceeded(why)) => {
            let mut r = VerificationReport::new(id, ctx.p);
            r.skip(format!("budget exceeded: {why}"));
            r.stat("budget_exceeded", true);
            r
        }
        Err(e) => return Err(e),
    };
    if claim.sampled {
        report.note("sampled suite: a verified status is evidence, not a proof");
    }
    report.runtime_ms = start.elapsed().as_millis();
    Ok(report)
}

/// `{generators, order}` of a subgroup, for witnesses.
pub(crate) fn describe(h: &Subgroup) -> Value {
    serde_json::json!({
        "order": h.order(),
        "generators": h.generators(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claim_ids_are_unique_and_dispatch() {
        let mut ids: Vec<&str> = claims().iter().map(|c| c.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), claims().len());
        assert!(run("no-such-claim", &Context::new(3)).is_err());
        assert!(run("borel-40", &Context::new(5)).is_err());
    }

    #[test]
    fn refute_keeps_first_witness() {
        let mut r = VerificationReport::new("x", 3);
        r.refute(serde_json::json!(1));
        r.refute(serde_json::json!(2));
        assert_eq!(r.witness, Some(serde_json::json!(1)));
        r.skip("later");
        assert_eq!(r.status, Status::Refuted);
    }
}
