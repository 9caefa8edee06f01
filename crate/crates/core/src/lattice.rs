//! Subgroup enumeration by cyclic extension.
//!
//! Every nontrivial subgroup of a solvable group has a normal subgroup of
//! prime index, so all subgroups of a solvable universe U are reached from
//! the trivial group by repeatedly adjoining an element of the normalizer
//! whose image in the quotient has prime order. Up to conjugacy by the
//! ambient group G it is enough to extend one representative per class,
//! provided U is normal in G.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rayon::prelude::*;

use crate::ambient::{gl2_generators, Ambient};
use crate::error::{Error, Result};
use crate::subgrp::{are_conjugate, Fingerprint, Subgroup};

/// How enumerated subgroups are identified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dedup {
    /// Every subgroup is listed.
    Equality,
    /// One representative per conjugacy class of the ambient GL₂.
    Conjugacy,
}

/// Time and size limits for long searches.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub max_subgroups: Option<usize>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn seconds(secs: f64) -> Budget {
        Budget {
            deadline: Some(Instant::now() + std::time::Duration::from_secs_f64(secs)),
            max_subgroups: None,
        }
    }

    pub fn check(&self, found: usize) -> Result<()> {
        if let Some(d) = self.deadline {
            if Instant::now() > d {
                return Err(Error::BudgetExceeded(format!(
                    "time limit hit after {found} subgroups"
                )));
            }
        }
        if let Some(max) = self.max_subgroups {
            if found > max {
                return Err(Error::BudgetExceeded(format!("more than {max} subgroups")));
            }
        }
        Ok(())
    }
}

/// All subgroups of `universe` (or one per G-class), in increasing order,
/// optionally capped at `max_order`.
///
/// The universe must be solvable. With [`Dedup::Conjugacy`] it must also be
/// normal in GL₂(ℤ/p^kℤ).
pub fn enumerate_subgroups(
    universe: &Subgroup,
    dedup: Dedup,
    max_order: Option<usize>,
    budget: &Budget,
) -> Result<Vec<Subgroup>> {
    let modulus = universe.modulus();
    if dedup == Dedup::Conjugacy {
        for s in gl2_generators(modulus) {
            if !universe.is_normalized_by(&s) {
                return Err(Error::BadParameter(
                    "conjugacy enumeration needs a universe normal in GL2".into(),
                ));
            }
        }
        // Build the class table before fanning out.
        Ambient::get(modulus);
    }
    let cap = max_order.unwrap_or(usize::MAX);
    // Every representative found so far, finished or pending.
    let mut reps: Vec<Subgroup> = vec![Subgroup::trivial(modulus)];
    let mut keys: HashMap<(usize, Fingerprint), Vec<usize>> = HashMap::new();
    let mut seen_sets: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut levels: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    levels.insert(1, vec![0]);
    keys.insert((1, reps[0].fingerprint().clone()), vec![0]);
    seen_sets.insert(reps[0].codes().to_vec(), 0);

    while let Some((_, level)) = levels.pop_first() {
        budget.check(reps.len())?;
        let mut candidates: Vec<Subgroup> = level
            .par_iter()
            .flat_map_iter(|&i| reps[i].prime_extensions(universe))
            .filter(|h| h.order() <= cap)
            .collect();
        candidates.retain(|h| !seen_sets.contains_key(h.codes()));

        // Buckets by order and fingerprint are independent, so they are
        // deduplicated in parallel; within a bucket the order is fixed.
        let mut buckets: BTreeMap<(usize, Fingerprint), Vec<Subgroup>> = BTreeMap::new();
        for h in candidates {
            let key = (h.order(), h.fingerprint().clone());
            buckets.entry(key).or_default().push(h);
        }
        let fresh: Vec<(usize, Fingerprint, Vec<Subgroup>)> = buckets
            .into_par_iter()
            .map(|(key, mut hs)| {
                hs.sort_by(|a, b| a.codes().cmp(b.codes()));
                hs.dedup_by(|a, b| a.codes() == b.codes());
                if dedup == Dedup::Equality {
                    return (key.0, key.1, hs);
                }
                let known: Vec<&Subgroup> = keys
                    .get(&key)
                    .map(|ix| ix.iter().map(|&i| &reps[i]).collect())
                    .unwrap_or_default();
                let mut kept: Vec<Subgroup> = Vec::new();
                for h in hs {
                    let dup = known.iter().any(|k| are_conjugate(k, &h).is_some())
                        || kept.iter().any(|k| are_conjugate(k, &h).is_some());
                    if !dup {
                        kept.push(h);
                    }
                }
                (key.0, key.1, kept)
            })
            .collect();
        for (order, fp, hs) in fresh {
            for h in hs {
                let i = reps.len();
                seen_sets.insert(h.codes().to_vec(), i);
                keys.entry((order, fp.clone())).or_default().push(i);
                levels.entry(order).or_default().push(i);
                reps.push(h);
            }
        }
    }
    let mut out = reps;
    out.sort_by(|a, b| {
        a.order()
            .cmp(&b.order())
            .then_with(|| a.codes().cmp(b.codes()))
    });
    Ok(out)
}
