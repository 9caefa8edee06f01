//! Subgroups of GL₂(ℤ/p²ℤ) whose image mod p is SL₂(ℤ/pℤ).

use rand::Rng;
use serde_json::json;

use super::catalogue::class_catalogue;
use super::{describe, Context, VerificationReport};
use crate::error::Result;
use crate::families::{named, sl2_p3_list, FamilyId};
use crate::mat2::Mat2;
use crate::residue::Modulus;
use crate::subgrp::{are_conjugate, are_locally_conjugate, Subgroup};

/// Lifted generator sets tried at p = 5.
const P5_SAMPLES: usize = 12;

/// Positions in the p = 3 list with a closed form for the order.
const P3_KNOWN_ORDERS: [(usize, usize); 2] = [(1, 648), (3, 1944)];

pub fn verify_sl2(ctx: &Context) -> Result<VerificationReport> {
    match ctx.p {
        3 => verify_p3(ctx),
        _ => verify_p5(ctx),
    }
}

fn verify_p3(ctx: &Context) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("sl2", 3);
    let r = Modulus::new(3, 2)?;
    let sl2p = named(FamilyId::SL2, r.base())?;
    let list = sl2_p3_list();
    report.stat(
        "orders",
        list.iter().map(Subgroup::order).collect::<Vec<_>>(),
    );
    for (i, order) in P3_KNOWN_ORDERS {
        if list[i].order() != order {
            report.refute(json!({ "item": i + 1, "order": list[i].order(), "expected": order }));
        }
    }
    if list[1] != named(FamilyId::SL2, r)? {
        report.refute(json!({ "item": 2, "differs_from": "SL2(Z/9Z)" }));
    }
    for (i, h) in list.iter().enumerate() {
        if h.image_mod_p()? != sl2p {
            report.refute(json!({ "item": i + 1, "image_is_not_sl2": describe(h) }));
        }
    }
    let mut pairs = 0usize;
    for i in 0..list.len() {
        for j in i + 1..list.len() {
            pairs += 1;
            let (h1, h2) = (&list[i], &list[j]);
            if are_locally_conjugate(h1, h2) {
                report.refute(json!({ "locally_conjugate": [i + 1, j + 1] }));
            }
            if let Some(x) = are_conjugate(h1, h2) {
                report.refute(json!({ "conjugate": [i + 1, j + 1], "conjugator": x }));
            }
        }
    }
    report.stat("pairs_compared", pairs);

    // Completeness of the list against the class catalogue.
    let cat = class_catalogue(&ctx.budget)?;
    let mut hits = vec![0usize; list.len()];
    let mut classes = 0usize;
    for h in cat.classes() {
        if h.image_mod_p()? != sl2p {
            continue;
        }
        classes += 1;
        let matched: Vec<usize> = (0..list.len())
            .filter(|&i| are_conjugate(h, &list[i]).is_some())
            .collect();
        match matched.as_slice() {
            [i] => hits[*i] += 1,
            _ => report.refute(json!({ "class_with_sl2_image": describe(h), "matches": matched })),
        }
    }
    report.stat("classes_with_sl2_image", classes);
    if let Some(i) = hits.iter().position(|&n| n != 1) {
        report.refute(json!({ "item": i + 1, "catalogue_classes_matched": hits[i] }));
    }
    Ok(report)
}

/// `g` plus a random multiple of p in each entry.
fn random_lift(g: &Mat2, r: Modulus, rng: &mut impl Rng) -> Mat2 {
    let p = r.p() as i64;
    let [a, b, c, d] = g.entries().map(i64::from);
    let mut noise = || p * rng.gen_range(0..p);
    Mat2::new(r, a + noise(), b + noise(), c + noise(), d + noise())
}

fn verify_p5(ctx: &Context) -> Result<VerificationReport> {
    let p = ctx.p;
    let mut report = VerificationReport::new("sl2", p);
    report.seed = Some(ctx.seed);
    let r = Modulus::new(p, 2)?;
    let f = r.base();
    let sl2p = named(FamilyId::SL2, f)?;
    let sl2 = named(FamilyId::SL2, r)?;
    let full = {
        let mut gens = sl2.generators().to_vec();
        gens.push(Mat2::scalar(r, 1 + p as i64));
        Subgroup::closure(r, &gens)?
    };
    report.stat("sl2_order", sl2.order());
    report.stat("full_preimage_order", full.order());
    let sl2_expected = (p * p * p * p * (p * p - 1)) as usize;
    if sl2.order() != sl2_expected || full.order() != sl2_expected * p as usize {
        report.refute(json!({ "sl2_order": sl2.order(), "full_preimage_order": full.order() }));
    }

    let mut rng = ctx.rng();
    let elements: Vec<Mat2> = sl2p.iter().collect();
    let mut outcomes = [0usize; 2];
    let mut tried = 0usize;
    while outcomes.iter().sum::<usize>() < P5_SAMPLES {
        ctx.budget.check(tried)?;
        tried += 1;
        let x = elements[rng.gen_range(0..elements.len())];
        let y = elements[rng.gen_range(0..elements.len())];
        if Subgroup::closure(f, &[x, y])? != sl2p {
            continue;
        }
        let mut gens = vec![random_lift(&x, r, &mut rng), random_lift(&y, r, &mut rng)];
        // A third generator about half the time, to reach non-determinant-one lifts.
        if rng.gen_bool(0.5) {
            let z = elements[rng.gen_range(0..elements.len())];
            gens.push(random_lift(&z, r, &mut rng));
        }
        let h = Subgroup::closure(r, &gens)?;
        if h == sl2 {
            outcomes[0] += 1;
        } else if h == full {
            outcomes[1] += 1;
        } else {
            report.refute(json!({ "closure": describe(&h) }));
            break;
        }
    }
    report.stat("generator_draws", tried);
    report.stat("closed_to_sl2", outcomes[0]);
    report.stat("closed_to_full_preimage", outcomes[1]);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p3_list_is_verified() {
        let r = verify_sl2(&Context::new(3)).unwrap();
        assert!(r.is_verified(), "{:?}", r.witness);
    }
}
