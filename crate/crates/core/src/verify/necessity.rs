//! Local conjugacy passes to kernel parts and to images mod p.

use serde_json::json;

use super::{describe, Context, Status, VerificationReport};
use crate::error::Result;
use crate::subgrp::{are_locally_conjugate, Subgroup};

/// For every locally conjugate pair mod p², the kernel parts are locally
/// conjugate mod p² and the images are locally conjugate mod p.
///
/// Pairs that are not locally conjugate are counted and ignored. With no
/// qualifying pair at all the report is skipped.
pub fn verify_necessity(pairs: &[(Subgroup, Subgroup)]) -> VerificationReport {
    let p = pairs.first().map_or(0, |(h, _)| h.modulus().p());
    let mut report = VerificationReport::new("necessity", p);
    let mut checked = 0usize;
    let mut vacuous = 0usize;
    for (h1, h2) in pairs {
        if h1.modulus().k() != 2 || !are_locally_conjugate(h1, h2) {
            vacuous += 1;
            continue;
        }
        checked += 1;
        let (k1, k2) = (
            h1.kernel_part().expect("k = 2"),
            h2.kernel_part().expect("k = 2"),
        );
        let (i1, i2) = (
            h1.image_mod_p().expect("k = 2"),
            h2.image_mod_p().expect("k = 2"),
        );
        let kernels = are_locally_conjugate(&k1, &k2);
        let images = are_locally_conjugate(&i1, &i2);
        if !(kernels && images) {
            report.refute(json!({
                "h1": describe(h1), "h2": describe(h2),
                "kernel_parts_locally_conjugate": kernels,
                "images_locally_conjugate": images,
            }));
        }
    }
    report.stat("checked", checked);
    report.stat("premise_failed", vacuous);
    if checked == 0 && report.status == Status::Verified {
        report.skip("no locally conjugate pair in the corpus");
    }
    report
}

/// Necessity over the pairs produced by the exhaustive p = 3 suites.
pub fn verify_necessity_corpus(ctx: &Context) -> Result<VerificationReport> {
    let mut corpus: Vec<(Subgroup, Subgroup)> = Vec::new();
    let mut sources = serde_json::Map::new();
    for run in [
        super::verify_kernel_classification,
        super::verify_cartan_pairs,
        super::count_borel_pairs_p3,
        super::verify_schur_zassenhaus,
    ] {
        let r = run(ctx)?;
        sources.insert(r.claim.clone(), json!(r.pairs.len()));
        corpus.extend(r.pairs);
    }
    let mut report = verify_necessity(&corpus);
    report.p = ctx.p;
    report.stat("sources", serde_json::Value::Object(sources));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat2::Mat2;
    use crate::residue::Modulus;

    #[test]
    fn conjugate_pairs_pass_and_mismatches_are_vacuous() {
        let r = Modulus::new(3, 2).unwrap();
        let h = Subgroup::closure(r, &[Mat2::new(r, 1, 1, 0, 1), Mat2::diag(r, 8, 1)]).unwrap();
        let h2 = h.conjugate(&Mat2::new(r, 2, 1, 1, 1)).unwrap();
        assert!(verify_necessity(&[(h.clone(), h2)]).is_verified());
        let rep = verify_necessity(&[(h, Subgroup::trivial(r))]);
        assert_eq!(rep.status, Status::Skipped);
    }
}
