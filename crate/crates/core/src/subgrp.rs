//! Subgroups as closed element sets, their class fingerprints, and
//! conjugacy searches.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::ambient::Ambient;
use crate::conjcls::{class_invariant, ClassInvariant};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::residue::Modulus;

/// Above this ambient order the conjugacy search never scans the whole group.
pub const FULL_SCAN_LIMIT: usize = 1_000_000;

/// Counts of elements per conjugacy class, keyed by class invariant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint {
    counts: BTreeMap<ClassInvariant, u32>,
}

impl Fingerprint {
    pub fn counts(&self) -> &BTreeMap<ClassInvariant, u32> {
        &self.counts
    }

    pub fn total(&self) -> u32 {
        self.counts.values().sum()
    }

    pub fn get(&self, inv: &ClassInvariant) -> u32 {
        self.counts.get(inv).copied().unwrap_or(0)
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            #[serde(flatten)]
            class: &'a ClassInvariant,
            count: u32,
        }
        let mut seq = s.serialize_seq(Some(self.counts.len()))?;
        for (class, &count) in &self.counts {
            seq.serialize_element(&Entry { class, count })?;
        }
        seq.end()
    }
}

/// A subgroup of GL₂(ℤ/p^kℤ): generators plus the sorted encodings of
/// every element.
#[derive(Clone)]
pub struct Subgroup {
    modulus: Modulus,
    generators: Vec<Mat2>,
    elements: Vec<u32>,
    fingerprint: OnceLock<Fingerprint>,
}

enum Seen {
    Bits(Vec<u64>),
    Hash(HashSet<u32>),
}

impl Seen {
    fn new(modulus: Modulus) -> Seen {
        let span = modulus.m().pow(4) as usize;
        if span <= 1 << 22 {
            Seen::Bits(vec![0; span / 64 + 1])
        } else {
            Seen::Hash(HashSet::new())
        }
    }

    /// Marks `code`; true if it was new.
    fn insert(&mut self, code: u32) -> bool {
        match self {
            Seen::Bits(bits) => {
                let (w, b) = (code as usize / 64, code % 64);
                let fresh = bits[w] & (1 << b) == 0;
                bits[w] |= 1 << b;
                fresh
            }
            Seen::Hash(set) => set.insert(code),
        }
    }
}

fn check_modulus(modulus: Modulus, g: &Mat2) -> Result<()> {
    if g.modulus() != modulus {
        return Err(Error::ModulusMismatch {
            left: modulus.to_string(),
            right: g.modulus().to_string(),
        });
    }
    Ok(())
}

fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..n)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

impl Subgroup {
    /// The subgroup generated by `gens`, by breadth-first closure.
    pub fn closure(modulus: Modulus, gens: &[Mat2]) -> Result<Subgroup> {
        for g in gens {
            check_modulus(modulus, g)?;
            if !g.is_invertible() {
                return Err(Error::NotInvertible(g.to_string()));
            }
        }
        let gens: Vec<Mat2> = gens.to_vec();
        let id = Mat2::identity(modulus);
        let mut seen = Seen::new(modulus);
        seen.insert(id.encode());
        let mut found = vec![id];
        let mut next = 0;
        while next < found.len() {
            let x = found[next];
            next += 1;
            for g in &gens {
                let y = x * *g;
                if seen.insert(y.encode()) {
                    found.push(y);
                }
            }
        }
        let mut elements: Vec<u32> = found.iter().map(Mat2::encode).collect();
        elements.sort_unstable();
        Ok(Subgroup::from_parts(modulus, gens, elements))
    }

    pub fn trivial(modulus: Modulus) -> Subgroup {
        Subgroup::from_parts(modulus, Vec::new(), vec![Mat2::identity(modulus).encode()])
    }

    /// Assembles a subgroup whose closedness the caller guarantees.
    pub(crate) fn from_parts(
        modulus: Modulus,
        generators: Vec<Mat2>,
        elements: Vec<u32>,
    ) -> Subgroup {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        Subgroup {
            modulus,
            generators,
            elements,
            fingerprint: OnceLock::new(),
        }
    }

    /// Assembles a subgroup from a closed element set and picks generators
    /// greedily.
    pub(crate) fn from_elements(modulus: Modulus, mut elements: Vec<u32>) -> Subgroup {
        elements.sort_unstable();
        elements.dedup();
        let mut gens = Vec::new();
        let mut span = Subgroup::trivial(modulus);
        for &code in &elements {
            if span.order() == elements.len() {
                break;
            }
            if !span.contains_code(code) {
                gens.push(Mat2::decode_unchecked(modulus, code));
                span = Subgroup::closure(modulus, &gens).expect("elements are invertible");
            }
        }
        debug_assert_eq!(span.elements, elements);
        Subgroup::from_parts(modulus, gens, elements)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    /// Sorted element encodings.
    pub fn codes(&self) -> &[u32] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = Mat2> + '_ {
        self.elements
            .iter()
            .map(|&c| Mat2::decode_unchecked(self.modulus, c))
    }

    pub fn contains_code(&self, code: u32) -> bool {
        self.elements.binary_search(&code).is_ok()
    }

    pub fn contains(&self, g: &Mat2) -> bool {
        g.modulus() == self.modulus && self.contains_code(g.encode())
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.modulus == other.modulus && self.elements.iter().all(|&c| other.contains_code(c))
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// `x·H·x⁻¹`.
    pub fn conjugate(&self, x: &Mat2) -> Result<Subgroup> {
        check_modulus(self.modulus, x)?;
        let xi = x.inv()?;
        let mut elements: Vec<u32> = self.iter().map(|h| x.conj_with(&xi, &h).encode()).collect();
        elements.sort_unstable();
        let gens = self
            .generators
            .iter()
            .map(|g| x.conj_with(&xi, g))
            .collect();
        Ok(Subgroup::from_parts(self.modulus, gens, elements))
    }

    /// Whether `x` normalizes this subgroup.
    pub fn is_normalized_by(&self, x: &Mat2) -> bool {
        let xi = x.inv().expect("invertible conjugator");
        self.generators
            .iter()
            .all(|g| self.contains(&x.conj_with(&xi, g)))
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        self.fingerprint.get_or_init(|| {
            let mut counts = BTreeMap::new();
            for g in self.iter() {
                *counts.entry(class_invariant(&g)).or_insert(0) += 1;
            }
            Fingerprint { counts }
        })
    }

    pub fn in_kernel(&self) -> bool {
        self.iter().all(|g| g.in_kernel())
    }

    /// H ∩ ker φ.
    pub fn kernel_part(&self) -> Result<Subgroup> {
        self.require_k2()?;
        let codes = self
            .iter()
            .filter(Mat2::in_kernel)
            .map(|g| g.encode())
            .collect();
        Ok(Subgroup::from_elements(self.modulus, codes))
    }

    /// φ(H) ≤ GL₂(ℤ/pℤ).
    pub fn image_mod_p(&self) -> Result<Subgroup> {
        self.require_k2()?;
        let base = self.modulus.base();
        let mut codes: Vec<u32> = self
            .iter()
            .map(|g| g.reduce_mod_p().unwrap().encode())
            .collect();
        codes.sort_unstable();
        codes.dedup();
        let gens = self
            .generators
            .iter()
            .map(|g| g.reduce_mod_p().unwrap())
            .collect();
        Ok(Subgroup::from_parts(base, gens, codes))
    }

    /// Kernel elements whose p-parts are diagonal.
    pub fn delta(&self) -> Result<Subgroup> {
        self.kernel_filter(|a| a.is_diagonal())
    }

    /// Kernel elements whose p-parts are antidiagonal.
    pub fn delta_perp(&self) -> Result<Subgroup> {
        self.kernel_filter(|a| a.entries()[0] == 0 && a.entries()[3] == 0)
    }

    /// Elements of H that are diagonal matrices.
    pub fn diag_part(&self) -> Subgroup {
        let codes = self
            .iter()
            .filter(Mat2::is_diagonal)
            .map(|g| g.encode())
            .collect();
        Subgroup::from_elements(self.modulus, codes)
    }

    /// The Teichmüller lift of φ(H) ∩ C_s(p) into C_s(p²).
    pub fn c_part(&self) -> Result<Subgroup> {
        let image = self.image_mod_p()?;
        let mut codes = Vec::new();
        for g in image.iter().filter(Mat2::is_diagonal) {
            let w = g.entry(0).teichmuller_lift()?;
            let z = g.entry(3).teichmuller_lift()?;
            codes.push(Mat2::diag(self.modulus, w.value() as i64, z.value() as i64).encode());
        }
        Ok(Subgroup::from_elements(self.modulus, codes))
    }

    /// log_p |K| for K inside ker φ.
    pub fn vector_dim(&self) -> Result<u32> {
        self.require_k2()?;
        if let Some(g) = self.iter().find(|g| !g.in_kernel()) {
            return Err(Error::NotInKernel(g.to_string()));
        }
        let p = self.modulus.p() as usize;
        let mut n = self.order();
        let mut dim = 0;
        while n > 1 {
            n /= p;
            dim += 1;
        }
        Ok(dim)
    }

    fn require_k2(&self) -> Result<()> {
        if self.modulus.k() != 2 {
            return Err(Error::WrongExponent {
                expected: 2,
                got: self.modulus.k(),
            });
        }
        Ok(())
    }

    fn kernel_filter(&self, keep: impl Fn(&Mat2) -> bool) -> Result<Subgroup> {
        self.require_k2()?;
        let codes = self
            .iter()
            .filter(|g| g.in_kernel() && keep(&g.p_part().unwrap().matrix()))
            .map(|g| g.encode())
            .collect();
        Ok(Subgroup::from_elements(self.modulus, codes))
    }

    /// The JSON export shape.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.modulus.p(),
            "k": self.modulus.k(),
            "order": self.order(),
            "generators": self.generators,
            "fingerprint": self.fingerprint(),
        })
    }

    /// For each `x` normalizing `self` inside `universe`, the subgroups
    /// `⟨self, x⟩` in which `self` has prime index. Each such subgroup is
    /// produced once.
    pub(crate) fn prime_extensions(&self, universe: &Subgroup) -> Vec<Subgroup> {
        let normalizer: Vec<Mat2> = universe
            .iter()
            .filter(|x| !self.contains(x) && self.is_normalized_by(x))
            .collect();
        let mut used: HashSet<u32> = HashSet::new();
        let mut out = Vec::new();
        let inner: Vec<Mat2> = self.iter().collect();
        for x in normalizer {
            if used.contains(&x.encode()) {
                continue;
            }
            let mut y = x;
            let mut j = 1;
            while !self.contains(&y) {
                y = y * x;
                j += 1;
            }
            if !is_prime(j) {
                continue;
            }
            let mut codes = Vec::with_capacity(j * inner.len());
            let mut power = Mat2::identity(self.modulus);
            for _ in 0..j {
                codes.extend(inner.iter().map(|k| (power * *k).encode()));
                power = power * x;
            }
            codes.sort_unstable();
            for &c in &codes {
                used.insert(c);
            }
            let mut gens = self.generators.clone();
            gens.push(x);
            out.push(Subgroup::from_parts(self.modulus, gens, codes));
        }
        out
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.modulus.hash(state);
        self.elements.hash(state);
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {}, gens [", self.order())?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "] mod {})", self.modulus.m())
    }
}

pub fn closure(modulus: Modulus, gens: &[Mat2]) -> Result<Subgroup> {
    Subgroup::closure(modulus, gens)
}

/// Equal per-class counts.
pub fn are_locally_conjugate(h1: &Subgroup, h2: &Subgroup) -> bool {
    h1.modulus == h2.modulus && h1.order() == h2.order() && h1.fingerprint() == h2.fingerprint()
}

fn maps_into(x: &Mat2, xi: &Mat2, h1: &Subgroup, h2: &Subgroup) -> bool {
    h1.generators
        .iter()
        .all(|g| h2.contains_code(x.conj_with(xi, g).encode()))
}

fn confirm(x: Mat2, h1: &Subgroup, h2: &Subgroup) -> Option<Mat2> {
    let xi = x.inv().ok()?;
    if !maps_into(&x, &xi, h1, h2) {
        return None;
    }
    // Element-for-element check before publishing a witness.
    let mut image: Vec<u32> = h1.iter().map(|h| x.conj_with(&xi, &h).encode()).collect();
    image.sort_unstable();
    (image == h2.elements).then_some(x)
}

/// Some `g` with `g·H₁·g⁻¹ = H₂`, or `None`.
///
/// Candidates are pruned by order, fingerprint, and by mapping one
/// generator of H₁ onto the elements of H₂ in its class. Kernel subgroups
/// are conjugated through integer lifts of GL₂(ℤ/pℤ) only.
pub fn are_conjugate(h1: &Subgroup, h2: &Subgroup) -> Option<Mat2> {
    let modulus = h1.modulus;
    if modulus != h2.modulus || h1.order() != h2.order() {
        return None;
    }
    if h1.elements == h2.elements {
        return Some(Mat2::identity(modulus));
    }
    if h1.fingerprint() != h2.fingerprint() {
        return None;
    }
    if modulus.k() == 2 && h1.in_kernel() && h2.in_kernel() {
        let base = Ambient::get(modulus.base());
        return base
            .elements()
            .par_iter()
            .map(|x| x.integer_lift().unwrap())
            .find_map_first(|x| confirm(x, h1, h2));
    }

    let amb = Ambient::get(modulus);
    // A central H₁ is fixed by conjugation and already differs from H₂.
    let (pivot, slice) = h1
        .generators
        .iter()
        .filter(|g| !g.is_scalar())
        .map(|g| {
            let cls = amb.class_of_code(g.encode());
            let slice: Vec<u32> = h2
                .elements
                .iter()
                .map(|&c| amb.position(c).unwrap())
                .filter(|&pos| amb.class_of(pos) == cls)
                .collect();
            (*g, slice)
        })
        .min_by_key(|(g, s)| s.len() * amb.centralizer_size(amb.class_of_code(g.encode())))?;
    let cls = amb.class_of_code(pivot.encode());
    let cost = slice.len() * amb.centralizer_size(cls);
    if cost > amb.order() && amb.order() <= FULL_SCAN_LIMIT {
        return amb
            .elements()
            .par_iter()
            .find_map_first(|x| confirm(*x, h1, h2));
    }
    let t_pivot_inv = amb.transversal(amb.position_of(&pivot)).inv().unwrap();
    let cent = amb.centralizer(cls);
    slice.par_iter().find_map_first(|&pos| {
        let t_h = amb.transversal(pos);
        cent.iter()
            .find_map(|&c| confirm(t_h * amb.element(c) * t_pivot_inv, h1, h2))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat2::PPart;

    fn m(p: u32, k: u32) -> Modulus {
        Modulus::new(p, k).unwrap()
    }

    fn kernel_gens(p: u32) -> Vec<Mat2> {
        let f = m(p, 1);
        [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
            .iter()
            .map(|&(a, b, c, d)| PPart(Mat2::new(f, a, b, c, d)).embed())
            .collect()
    }

    #[test]
    fn closure_orders() {
        let r = m(3, 2);
        assert_eq!(closure(r, &[Mat2::new(r, 1, 1, 0, 1)]).unwrap().order(), 9);
        assert_eq!(closure(r, &[]).unwrap().order(), 1);
        assert_eq!(closure(r, &kernel_gens(3)).unwrap().order(), 81);
        assert!(matches!(
            closure(r, &[Mat2::new(r, 3, 0, 0, 1)]),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn extractors() {
        let r = m(3, 2);
        let ker = closure(r, &kernel_gens(3)).unwrap();
        assert_eq!(ker.kernel_part().unwrap(), ker);
        assert_eq!(ker.vector_dim().unwrap(), 4);
        assert_eq!(ker.delta().unwrap().order(), 9);
        assert_eq!(ker.delta_perp().unwrap().order(), 9);
        let sl2 = closure(r, &[Mat2::new(r, 1, 1, 0, 1), Mat2::new(r, 1, 0, 1, 1)]).unwrap();
        assert_eq!(sl2.order(), 648);
        let t = sl2.kernel_part().unwrap();
        assert_eq!(t.order(), 27);
        assert_eq!(t.vector_dim().unwrap(), 3);
        let u = closure(r, &[Mat2::new(r, 1, 1, 0, 1)]).unwrap();
        assert!(u.c_part().unwrap().is_trivial());
        assert!(matches!(u.vector_dim(), Err(Error::NotInKernel(_))));
        let g = closure(r, &[Mat2::new(r, 4, 1, 0, 7)]).unwrap();
        assert!(g
            .image_mod_p()
            .unwrap()
            .contains(&Mat2::new(m(3, 1), 1, 1, 0, 1)));
    }

    #[test]
    fn center_fingerprint() {
        let r = m(5, 2);
        let z = closure(r, &[Mat2::scalar(r, 2)]).unwrap();
        assert_eq!(z.order(), 20);
        assert_eq!(z.fingerprint().counts().len(), 20);
        assert!(z.fingerprint().counts().values().all(|&c| c == 1));
        let triv = Subgroup::trivial(r);
        let fp = triv.fingerprint();
        assert_eq!(fp.total(), 1);
        assert_eq!(
            fp.get(&ClassInvariant {
                l: 2,
                d: 1,
                beta: None
            }),
            1
        );
    }

    #[test]
    fn conjugate_search_finds_witness() {
        let r = m(3, 2);
        let h = closure(r, &[Mat2::new(r, 1, 1, 0, 1), Mat2::diag(r, 8, 1)]).unwrap();
        let x = Mat2::new(r, 2, 1, 7, 3);
        let h2 = h.conjugate(&x).unwrap();
        let w = are_conjugate(&h, &h2).expect("conjugate");
        assert_eq!(h.conjugate(&w).unwrap(), h2);
        assert!(are_locally_conjugate(&h, &h2));
    }
}
