//! Brute-force oracles for the enumerators, the fingerprint test and the
//! conjugator search.

use std::collections::{BTreeSet, HashMap, HashSet};

use locconj::ambient::{gl2_generators, Ambient};
use locconj::families::{named, FamilyId};
use locconj::lattice::{enumerate_subgroups, Budget, Dedup};
use locconj::verify::{class_catalogue, gl2p_catalogue};
use locconj::{are_conjugate, are_locally_conjugate, Mat2, Modulus, Subgroup};

fn mod9() -> Modulus {
    Modulus::new(3, 2).unwrap()
}

/// Every subgroup of `universe`: the cyclic subgroups closed under joins
/// with cyclic subgroups. Returns sorted element-code lists.
fn raw_subgroups(universe: &Subgroup) -> BTreeSet<Vec<u32>> {
    let r = universe.modulus();
    let mut cyclic: Vec<(Mat2, Subgroup)> = Vec::new();
    let mut seen_cyclic: HashSet<Vec<u32>> = HashSet::new();
    for g in universe.iter() {
        let c = Subgroup::closure(r, &[g]).unwrap();
        if seen_cyclic.insert(c.codes().to_vec()) {
            cyclic.push((g, c));
        }
    }
    let mut found: HashMap<Vec<u32>, Vec<Mat2>> = HashMap::new();
    let mut queue: Vec<Vec<Mat2>> = vec![vec![]];
    found.insert(Subgroup::trivial(r).codes().to_vec(), vec![]);
    while let Some(gens) = queue.pop() {
        let h = Subgroup::closure(r, &gens).unwrap();
        for (g, c) in &cyclic {
            if c.is_subgroup_of(&h) {
                continue;
            }
            let mut next = gens.clone();
            next.push(*g);
            let j = Subgroup::closure(r, &next).unwrap();
            if !found.contains_key(j.codes()) {
                found.insert(j.codes().to_vec(), next.clone());
                queue.push(next);
            }
        }
    }
    found.into_keys().collect()
}

/// Number of GL₂-classes among the subgroups, by orbits under conjugation
/// by the ambient generators.
fn class_count(subs: &BTreeSet<Vec<u32>>, modulus: Modulus) -> usize {
    let gens = gl2_generators(modulus);
    let list: Vec<&Vec<u32>> = subs.iter().collect();
    let index: HashMap<&Vec<u32>, usize> = list.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut label = vec![usize::MAX; list.len()];
    let mut classes = 0;
    for start in 0..list.len() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = classes;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for x in &gens {
                let xi = x.inv().unwrap();
                let mut image: Vec<u32> = list[i]
                    .iter()
                    .map(|&c| {
                        x.conj_with(&xi, &Mat2::decode(modulus, c).unwrap())
                            .encode()
                    })
                    .collect();
                image.sort_unstable();
                let j = index[&image];
                if label[j] == usize::MAX {
                    label[j] = classes;
                    stack.push(j);
                }
            }
        }
        classes += 1;
    }
    classes
}

#[test]
fn lattice_matches_raw_joins_in_cartan_preimage() {
    let r = mod9();
    let mut gens: Vec<Mat2> = named(FamilyId::Cs, r.base())
        .unwrap()
        .generators()
        .iter()
        .map(|g| g.integer_lift().unwrap())
        .collect();
    gens.extend(
        named(FamilyId::KerPhi, r)
            .unwrap()
            .generators()
            .iter()
            .copied(),
    );
    let universe = Subgroup::closure(r, &gens).unwrap();
    assert_eq!(universe.order(), 324);
    let raw: BTreeSet<Vec<u32>> = raw_subgroups(&universe)
        .into_iter()
        .filter(|s| s.len() <= 216)
        .collect();
    let lattice: BTreeSet<Vec<u32>> =
        enumerate_subgroups(&universe, Dedup::Equality, Some(216), &Budget::unlimited())
            .unwrap()
            .iter()
            .map(|h| h.codes().to_vec())
            .collect();
    assert_eq!(lattice.len(), raw.len());
    assert_eq!(lattice, raw);
}

#[test]
fn lattice_matches_raw_joins_in_borel_mod_9() {
    let universe = named(FamilyId::B, mod9()).unwrap();
    let raw: BTreeSet<Vec<u32>> = raw_subgroups(&universe)
        .into_iter()
        .filter(|s| s.len() <= 216)
        .collect();
    let lattice: BTreeSet<Vec<u32>> =
        enumerate_subgroups(&universe, Dedup::Equality, Some(216), &Budget::unlimited())
            .unwrap()
            .iter()
            .map(|h| h.codes().to_vec())
            .collect();
    assert_eq!(lattice, raw);
}

#[test]
fn gl2_mod_p_catalogues_match_raw_class_counts() {
    for p in [3, 5] {
        let f = Modulus::new(p, 1).unwrap();
        let gl = Subgroup::closure(f, &gl2_generators(f)).unwrap();
        let raw = raw_subgroups(&gl);
        let cat = gl2p_catalogue(p, &Budget::unlimited()).unwrap();
        assert_eq!(cat.len(), class_count(&raw, f), "p = {p}");
    }
}

#[test]
fn fingerprints_match_raw_orbit_counts_on_the_mod_9_catalogue() {
    let r = mod9();
    let amb = Ambient::get(r);
    // Orbit labels of GL₂(ℤ/9ℤ) acting on itself, by search from each element.
    let gens = gl2_generators(r);
    let mut label: HashMap<u32, usize> = HashMap::new();
    let mut orbits = 0;
    for g in amb.elements() {
        if label.contains_key(&g.encode()) {
            continue;
        }
        let mut stack = vec![*g];
        label.insert(g.encode(), orbits);
        while let Some(y) = stack.pop() {
            for x in &gens {
                let z = x.conj(&y).unwrap();
                if label.insert(z.encode(), orbits).is_none() {
                    stack.push(z);
                }
            }
        }
        orbits += 1;
    }
    let cat = class_catalogue(&Budget::unlimited()).unwrap();
    let vectors: Vec<Vec<u32>> = cat
        .classes()
        .iter()
        .map(|h| {
            let mut v = vec![0u32; orbits];
            for &c in h.codes() {
                v[label[&c]] += 1;
            }
            v
        })
        .collect();
    let n = cat.len();
    let mut raw_pairs = 0;
    for i in 0..n {
        for j in i + 1..n {
            let raw = vectors[i] == vectors[j];
            assert_eq!(
                raw,
                are_locally_conjugate(&cat.classes()[i], &cat.classes()[j]),
                "classes {i}, {j}"
            );
            raw_pairs += raw as usize;
        }
    }
    assert_eq!(raw_pairs, 40);
}

#[test]
fn conjugator_search_matches_a_full_scan() {
    let r = mod9();
    let amb = Ambient::get(r);
    let cat = class_catalogue(&Budget::unlimited()).unwrap();
    let scan = |h1: &Subgroup, h2: &Subgroup| {
        amb.elements()
            .iter()
            .any(|x| h1.conjugate(x).unwrap() == *h2)
    };
    // Locally conjugate class pairs are never conjugate.
    for (i, j) in cat.fingerprint_pairs(|_| true) {
        let (h1, h2) = (&cat.classes()[i], &cat.classes()[j]);
        assert!(are_conjugate(h1, h2).is_none());
        assert!(!scan(h1, h2));
    }
    // A random conjugate of each of a spread of classes is found.
    for (n, h) in cat.classes().iter().enumerate().step_by(11) {
        let x = amb.elements()[(n * 97) % amb.order()];
        let hx = h.conjugate(&x).unwrap();
        let w = are_conjugate(h, &hx).expect("conjugate by construction");
        assert_eq!(h.conjugate(&w).unwrap(), hx);
    }
}

#[test]
fn class_catalogue_orbit_sizes_sum_to_all_subgroups() {
    let r = mod9();
    let amb = Ambient::get(r);
    let cat = class_catalogue(&Budget::unlimited()).unwrap();
    let total: usize = cat
        .classes()
        .iter()
        .map(|h| {
            let normalizer = amb
                .elements()
                .iter()
                .filter(|x| h.is_normalized_by(x))
                .count();
            amb.order() / normalizer
        })
        .sum();
    assert_eq!(cat.len(), 324);
    let gl = Subgroup::closure(r, &gl2_generators(r)).unwrap();
    let every = enumerate_subgroups(&gl, Dedup::Equality, None, &Budget::unlimited()).unwrap();
    assert_eq!(total, every.len());
    assert_eq!(total, 6656);
}
