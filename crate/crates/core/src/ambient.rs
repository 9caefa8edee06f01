//! The ambient group GL₂(ℤ/p^kℤ) as a table.
//!
//! Elements are indexed by position in increasing encoding order. Each
//! element records its class and a transversal element `x` with
//! `x·rep·x⁻¹ = element`. Tables are built once per modulus and leaked.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::conjcls::{class_invariant, ClassInvariant};
use crate::mat2::Mat2;
use crate::residue::Modulus;

const NONE: u32 = u32::MAX;

pub struct ClassInfo {
    pub invariant: ClassInvariant,
    /// Position of the representative (the least element of the class).
    pub rep: u32,
    pub size: u32,
}

pub struct Ambient {
    modulus: Modulus,
    elements: Vec<Mat2>,
    index: Vec<u32>,
    class_of: Vec<u32>,
    transversal: Vec<u32>,
    classes: Vec<ClassInfo>,
    by_invariant: HashMap<ClassInvariant, u32>,
    centralizers: Vec<OnceLock<Vec<u32>>>,
}

/// Generators of GL₂(ℤ/mℤ): the two elementary unipotents and diag(r, 1)
/// for a generator r of (ℤ/mℤ)^×.
pub fn gl2_generators(modulus: Modulus) -> Vec<Mat2> {
    let r = modulus
        .units()
        .find(|u| {
            let mut x = *u;
            let mut n = 1;
            while x.value() != 1 {
                x = x * *u;
                n += 1;
            }
            n == modulus.totient()
        })
        .expect("(Z/p^kZ)^x is cyclic for odd p");
    vec![
        Mat2::new(modulus, 1, 1, 0, 1),
        Mat2::new(modulus, 1, 0, 1, 1),
        Mat2::diag(modulus, r.value() as i64, 1),
    ]
}

impl Ambient {
    /// The shared table for `modulus`, built on first use.
    pub fn get(modulus: Modulus) -> &'static Ambient {
        const SLOTS: usize = 2 * (crate::residue::MAX_PRIME as usize + 1);
        static CACHE: [OnceLock<Ambient>; SLOTS] = [const { OnceLock::new() }; SLOTS];
        let slot = 2 * modulus.p() as usize + modulus.k() as usize - 1;
        CACHE[slot].get_or_init(|| Ambient::build(modulus))
    }

    fn build(modulus: Modulus) -> Ambient {
        let span = modulus.m().pow(4);
        let elements: Vec<Mat2> = (0..span)
            .into_par_iter()
            .map(|c| Mat2::decode_unchecked(modulus, c))
            .filter(|g| g.is_invertible())
            .collect();
        let mut index = vec![NONE; span as usize];
        for (i, g) in elements.iter().enumerate() {
            index[g.encode() as usize] = i as u32;
        }
        let invariants: Vec<ClassInvariant> = elements.par_iter().map(class_invariant).collect();
        let mut ordered: BTreeMap<ClassInvariant, (u32, u32)> = BTreeMap::new();
        for (i, inv) in invariants.iter().enumerate() {
            let slot = ordered.entry(*inv).or_insert((i as u32, 0));
            slot.1 += 1;
        }
        let mut by_invariant = HashMap::new();
        let mut classes = Vec::with_capacity(ordered.len());
        for (id, (inv, (rep, size))) in ordered.into_iter().enumerate() {
            by_invariant.insert(inv, id as u32);
            classes.push(ClassInfo {
                invariant: inv,
                rep,
                size,
            });
        }
        let class_of: Vec<u32> = invariants.iter().map(|inv| by_invariant[inv]).collect();

        let gens: Vec<(Mat2, Mat2)> = gl2_generators(modulus)
            .into_iter()
            .map(|s| (s, s.inv().unwrap()))
            .collect();
        let id_pos = index[Mat2::identity(modulus).encode() as usize];
        let mut transversal = vec![NONE; elements.len()];
        let mut queue = VecDeque::new();
        for cls in &classes {
            transversal[cls.rep as usize] = id_pos;
            queue.push_back(cls.rep);
            let mut reached = 1u32;
            while let Some(e) = queue.pop_front() {
                let ge = elements[e as usize];
                let xe = elements[transversal[e as usize] as usize];
                for (s, si) in &gens {
                    let f = index[s.conj_with(si, &ge).encode() as usize];
                    if transversal[f as usize] == NONE {
                        transversal[f as usize] = index[(*s * xe).encode() as usize];
                        queue.push_back(f);
                        reached += 1;
                    }
                }
            }
            assert_eq!(
                reached, cls.size,
                "class {} is not a single conjugation orbit",
                cls.invariant
            );
        }
        let centralizers = (0..classes.len()).map(|_| OnceLock::new()).collect();
        Ambient {
            modulus,
            elements,
            index,
            class_of,
            transversal,
            classes,
            by_invariant,
            centralizers,
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn element(&self, pos: u32) -> Mat2 {
        self.elements[pos as usize]
    }

    /// Position of an encoded element, or `None` if it is singular.
    pub fn position(&self, code: u32) -> Option<u32> {
        match self.index.get(code as usize) {
            Some(&NONE) | None => None,
            Some(&i) => Some(i),
        }
    }

    pub fn position_of(&self, g: &Mat2) -> u32 {
        self.position(g.encode()).expect("invertible matrix")
    }

    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }

    pub fn class_of(&self, pos: u32) -> u32 {
        self.class_of[pos as usize]
    }

    pub fn class_of_code(&self, code: u32) -> u32 {
        self.class_of(self.position(code).expect("invertible matrix"))
    }

    pub fn class_id(&self, inv: &ClassInvariant) -> Option<u32> {
        self.by_invariant.get(inv).copied()
    }

    /// An element `x` with `x·rep·x⁻¹ = g`, where rep represents g's class.
    pub fn transversal(&self, pos: u32) -> Mat2 {
        self.elements[self.transversal[pos as usize] as usize]
    }

    pub fn centralizer_size(&self, class: u32) -> usize {
        self.order() / self.classes[class as usize].size as usize
    }

    /// Positions of the centralizer of the class representative.
    pub fn centralizer(&self, class: u32) -> &[u32] {
        self.centralizers[class as usize].get_or_init(|| {
            let r = self.elements[self.classes[class as usize].rep as usize];
            self.elements
                .par_iter()
                .enumerate()
                .filter(|(_, x)| **x * r == r * **x)
                .map(|(i, _)| i as u32)
                .collect()
        })
    }
}
