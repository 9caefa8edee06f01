//! Conjugacy-class invariants for GL₂(ℤ/p^kℤ) and similarity classes of Mat₂(ℤ/pℤ).
//!
//! Write `g = d·I + β·p^l` with `l` maximal. The class of `g` is determined by
//! `l`, the section value `d`, and the trace and determinant of `β` mod p^(k−l).
//! The section is fixed as `K₀ = {0}`, `K₁ = {0, …, p−1}`, `K₂ = ℤ/p²ℤ`.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::residue::{smallest_nonsquare, Modulus};

/// Trace and determinant of β, reduced mod p^(k−l).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BetaInvariant {
    pub tr: u32,
    pub det: u32,
}

/// `(l, d, tr β, det β)`; `beta` is absent exactly when `g` is scalar (l = k).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ClassInvariant {
    pub l: u32,
    pub d: u32,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub beta: Option<BetaInvariant>,
}

impl ClassInvariant {
    fn key(&self) -> (u32, u32, Option<BetaInvariant>) {
        (self.l, self.d, self.beta)
    }

    pub fn is_scalar(&self) -> bool {
        self.beta.is_none()
    }
}

impl Ord for ClassInvariant {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for ClassInvariant {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ClassInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.beta {
            None => write!(f, "(l={}, d={})", self.l, self.d),
            Some(b) => write!(
                f,
                "(l={}, d={}, tr={}, det={})",
                self.l, self.d, b.tr, b.det
            ),
        }
    }
}

pub fn class_invariant(g: &Mat2) -> ClassInvariant {
    let modulus = g.modulus();
    let p = modulus.p();
    let [a, b, c, d] = g.entries();
    if g.is_scalar() {
        return ClassInvariant {
            l: modulus.k(),
            d: a,
            beta: None,
        };
    }
    let scalar_mod_p = b % p == 0 && c % p == 0 && a % p == d % p;
    if modulus.k() == 2 && scalar_mod_p {
        let base = a % p;
        let bt = [(a - base) / p, b / p, c / p, (d - base) / p];
        let tr = (bt[0] + bt[3]) % p;
        let det = (bt[0] * bt[3] + p * p - bt[1] * bt[2] % p) % p;
        return ClassInvariant {
            l: 1,
            d: base,
            beta: Some(BetaInvariant { tr, det }),
        };
    }
    ClassInvariant {
        l: 0,
        d: 0,
        beta: Some(BetaInvariant {
            tr: g.trace().value(),
            det: g.det().value(),
        }),
    }
}

/// A row of the similarity-class table for Mat₂(ℤ/pℤ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SimilarityRep {
    /// `w·I`, 0 ≤ w < p.
    Scalar { w: u32 },
    /// `[[w,1],[0,w]]`, 0 ≤ w < p.
    Jordan { w: u32 },
    /// `diag(w,z)`, 0 ≤ w < z < p.
    SplitDiagonal { w: u32, z: u32 },
    /// `[[w,εy],[y,w]]`, 0 ≤ w < p, 0 < y ≤ (p−1)/2.
    Nonsplit { w: u32, y: u32 },
}

impl SimilarityRep {
    pub fn matrix(&self, p: u32) -> Mat2 {
        let f = Modulus::new(p, 1).expect("odd prime");
        let eps = smallest_nonsquare(p).value() as i64;
        match *self {
            SimilarityRep::Scalar { w } => Mat2::scalar(f, w as i64),
            SimilarityRep::Jordan { w } => Mat2::new(f, w as i64, 1, 0, w as i64),
            SimilarityRep::SplitDiagonal { w, z } => Mat2::diag(f, w as i64, z as i64),
            SimilarityRep::Nonsplit { w, y } => {
                Mat2::new(f, w as i64, eps * y as i64, y as i64, w as i64)
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SimilarityRep::Scalar { .. } => "scalar",
            SimilarityRep::Jordan { .. } => "jordan",
            SimilarityRep::SplitDiagonal { .. } => "split-diagonal",
            SimilarityRep::Nonsplit { .. } => "nonsplit",
        }
    }

    /// Every table row for the prime p, in table order.
    pub fn table(p: u32) -> Vec<SimilarityRep> {
        let mut out = Vec::new();
        out.extend((0..p).map(|w| SimilarityRep::Scalar { w }));
        out.extend((0..p).map(|w| SimilarityRep::Jordan { w }));
        for w in 0..p {
            out.extend((w + 1..p).map(|z| SimilarityRep::SplitDiagonal { w, z }));
        }
        for w in 0..p {
            out.extend((1..=(p - 1) / 2).map(|y| SimilarityRep::Nonsplit { w, y }));
        }
        out
    }
}

pub fn similarity_rep(a: &Mat2) -> Result<SimilarityRep> {
    let f = a.modulus();
    if f.k() != 1 {
        return Err(Error::WrongExponent {
            expected: 1,
            got: f.k(),
        });
    }
    if a.is_scalar() {
        return Ok(SimilarityRep::Scalar { w: a.entries()[0] });
    }
    let t = a.trace();
    let det = a.det();
    let half = f.residue(2).inv()?;
    let disc = t * t - f.residue(4) * det;
    let w = t * half;
    if disc.is_zero() {
        return Ok(SimilarityRep::Jordan { w: w.value() });
    }
    match disc.sqrt()? {
        Some(r) => {
            let x = ((t + r) * half).value();
            let y = ((t - r) * half).value();
            Ok(SimilarityRep::SplitDiagonal {
                w: x.min(y),
                z: x.max(y),
            })
        }
        None => {
            // w² − εy² = det
            let eps = smallest_nonsquare(f.p());
            let y2 = (w * w - det) * eps.inv()?;
            let y = y2
                .sqrt()?
                .expect("(w²−det)/ε is a square for a nonsplit class");
            Ok(SimilarityRep::Nonsplit {
                w: w.value(),
                y: y.value(),
            })
        }
    }
}

/// Two kernel elements are conjugate iff their p-parts are similar.
pub fn kernel_conjugate(k1: &Mat2, k2: &Mat2) -> Result<bool> {
    let a1 = k1.p_part()?.matrix();
    let a2 = k2.p_part()?.matrix();
    Ok(similarity_rep(&a1)? == similarity_rep(&a2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat2::PPart;

    fn m(p: u32, k: u32) -> Modulus {
        Modulus::new(p, k).unwrap()
    }

    #[test]
    fn invariant_examples() {
        let r = m(3, 2);
        assert_eq!(
            class_invariant(&Mat2::scalar(r, 4)),
            ClassInvariant {
                l: 2,
                d: 4,
                beta: None
            }
        );
        assert_eq!(
            class_invariant(&Mat2::new(r, 1, 3, 0, 1)),
            ClassInvariant {
                l: 1,
                d: 1,
                beta: Some(BetaInvariant { tr: 0, det: 0 })
            }
        );
        assert_eq!(
            class_invariant(&Mat2::new(r, 1, 1, 0, 1)),
            ClassInvariant {
                l: 0,
                d: 0,
                beta: Some(BetaInvariant { tr: 2, det: 1 })
            }
        );
        // d is read through the integer section: 7 = 1 + 2·3, β = 2I + E12
        assert_eq!(
            class_invariant(&Mat2::new(r, 7, 3, 0, 7)),
            ClassInvariant {
                l: 1,
                d: 1,
                beta: Some(BetaInvariant { tr: 1, det: 1 })
            }
        );
    }

    #[test]
    fn json_omits_beta_for_scalars() {
        let r = m(3, 2);
        let s = serde_json::to_string(&class_invariant(&Mat2::identity(r))).unwrap();
        assert_eq!(s, r#"{"l":2,"d":1}"#);
        let s = serde_json::to_string(&class_invariant(&Mat2::new(r, 1, 1, 0, 1))).unwrap();
        assert_eq!(s, r#"{"l":0,"d":0,"tr":2,"det":1}"#);
    }

    #[test]
    fn similarity_examples() {
        let f = m(5, 1);
        assert_eq!(
            similarity_rep(&Mat2::scalar(f, 2)).unwrap(),
            SimilarityRep::Scalar { w: 2 }
        );
        assert_eq!(
            similarity_rep(&Mat2::new(f, 0, 0, 1, 0)).unwrap(),
            SimilarityRep::Jordan { w: 0 }
        );
        assert_eq!(
            similarity_rep(&Mat2::diag(f, 1, 4)).unwrap(),
            SimilarityRep::SplitDiagonal { w: 1, z: 4 }
        );
        assert_eq!(
            SimilarityRep::Jordan { w: 0 }.matrix(5),
            Mat2::new(f, 0, 1, 0, 0)
        );
        assert_eq!(SimilarityRep::table(5).len(), 5 + 5 + 10 + 10);
    }

    #[test]
    fn kernel_examples() {
        let f = m(5, 1);
        let e = |a, b, c, d| PPart(Mat2::new(f, a, b, c, d)).embed();
        assert!(kernel_conjugate(&e(0, 1, 0, 0), &e(0, 0, 1, 0)).unwrap());
        assert!(kernel_conjugate(&e(1, 0, 0, 2), &e(2, 0, 0, 1)).unwrap());
        assert!(!kernel_conjugate(&e(0, 0, 0, 0), &e(0, 1, 0, 0)).unwrap());
        let g = Mat2::new(m(5, 2), 2, 0, 0, 1);
        assert!(matches!(
            kernel_conjugate(&g, &g),
            Err(Error::NotInKernel(_))
        ));
    }
}
