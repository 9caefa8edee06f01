//! Residues modulo p^k for an odd prime p and k in {1, 2}.
//!
//! Values are kept canonical in `[0, m)` so that equality of residues is
//! equality of integers, which the element encodings in [`crate::mat2`] rely on.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest prime accepted. Keeps `m^4` inside a `u32` when `k = 2`.
pub const MAX_PRIME: u32 = 13;

/// The ring ℤ/p^kℤ.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus {
    p: u8,
    k: u8,
    m: u8,
}

fn is_prime(n: u32) -> bool {
    n >= 2
        && (2..n)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

impl Modulus {
    pub fn new(p: u32, k: u32) -> Result<Self> {
        if !(3..=MAX_PRIME).contains(&p) || !is_prime(p) || !(1..=2).contains(&k) {
            return Err(Error::BadModulus { p, k });
        }
        Ok(Modulus {
            p: p as u8,
            k: k as u8,
            m: p.pow(k) as u8,
        })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p as u32
    }

    #[inline]
    pub fn k(self) -> u32 {
        self.k as u32
    }

    #[inline]
    pub fn m(self) -> u32 {
        self.m as u32
    }

    /// Euler's totient of m.
    pub fn totient(self) -> u32 {
        self.m() / self.p() * (self.p() - 1)
    }

    /// ℤ/pℤ.
    pub fn base(self) -> Modulus {
        Modulus {
            p: self.p,
            k: 1,
            m: self.p,
        }
    }

    /// ℤ/p²ℤ.
    pub fn square(self) -> Modulus {
        Modulus {
            p: self.p,
            k: 2,
            m: self.p * self.p,
        }
    }

    pub fn residue(self, v: i64) -> Residue {
        Residue {
            value: self.reduce(v),
            modulus: self,
        }
    }

    pub fn zero(self) -> Residue {
        self.residue(0)
    }

    pub fn one(self) -> Residue {
        self.residue(1)
    }

    /// All residues `0..m` in increasing order.
    pub fn elements(self) -> impl Iterator<Item = Residue> {
        (0..self.m()).map(move |value| Residue {
            value,
            modulus: self,
        })
    }

    /// All units in increasing order.
    pub fn units(self) -> impl Iterator<Item = Residue> {
        self.elements().filter(|r| r.is_unit())
    }

    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.m() as i64) as u32
    }

    // Raw helpers on canonical values; used by the matrix layer.

    #[inline]
    pub(crate) fn add_raw(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.m() {
            s - self.m()
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub_raw(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.m() - b
        }
    }

    #[inline]
    pub(crate) fn mul_raw(self, a: u32, b: u32) -> u32 {
        a * b % self.m()
    }

    pub(crate) fn pow_raw(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.m();
        let mut acc = 1 % self.m();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    pub(crate) fn inv_raw(self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.p()) {
            return Err(Error::NotAUnit {
                value: a,
                m: self.m(),
            });
        }
        Ok(self.pow_raw(a, self.totient() as u64 - 1))
    }

    fn check(self, other: Modulus) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "Z/{}Z", self.p)
        } else {
            write!(f, "Z/{}^{}Z", self.p, self.k)
        }
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus({}^{})", self.p, self.k)
    }
}

/// An element of ℤ/p^kℤ.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u32,
    modulus: Modulus,
}

impl Residue {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> Modulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn is_unit(self) -> bool {
        !self.value.is_multiple_of(self.modulus.p())
    }

    pub fn checked_add(self, rhs: Residue) -> Result<Residue> {
        self.modulus.check(rhs.modulus)?;
        Ok(self + rhs)
    }

    pub fn checked_sub(self, rhs: Residue) -> Result<Residue> {
        self.modulus.check(rhs.modulus)?;
        Ok(self - rhs)
    }

    pub fn checked_mul(self, rhs: Residue) -> Result<Residue> {
        self.modulus.check(rhs.modulus)?;
        Ok(self * rhs)
    }

    pub fn pow(self, e: u64) -> Residue {
        Residue {
            value: self.modulus.pow_raw(self.value, e),
            modulus: self.modulus,
        }
    }

    pub fn inv(self) -> Result<Residue> {
        Ok(Residue {
            value: self.modulus.inv_raw(self.value)?,
            modulus: self.modulus,
        })
    }

    /// Reduction ℤ/p^kℤ → ℤ/pℤ.
    pub fn reduce(self) -> Residue {
        self.modulus.base().residue(self.value as i64)
    }

    /// Quadratic residue test by Euler's criterion. Zero counts as a square.
    pub fn is_square(self) -> Result<bool> {
        if self.modulus.k != 1 {
            return Err(Error::WrongExponent {
                expected: 1,
                got: self.modulus.k(),
            });
        }
        let p = self.modulus.p();
        Ok(self.value == 0 || self.modulus.pow_raw(self.value, ((p - 1) / 2) as u64) == 1)
    }

    /// A square root mod p by Tonelli-Shanks, or `None` for a nonsquare.
    ///
    /// Returns the root in `[0, (p-1)/2]`.
    pub fn sqrt(self) -> Result<Option<Residue>> {
        if !self.is_square()? {
            return Ok(None);
        }
        let m = self.modulus;
        let p = m.p();
        if self.value == 0 {
            return Ok(Some(self));
        }
        let (mut q, mut s) = (p - 1, 0u32);
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let z = smallest_nonsquare(p).value;
        let mut c = m.pow_raw(z, q as u64);
        let mut r = m.pow_raw(self.value, q.div_ceil(2) as u64);
        let mut t = m.pow_raw(self.value, q as u64);
        let mut bits = s;
        while t != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt != 1 {
                tt = m.mul_raw(tt, tt);
                i += 1;
            }
            let b = m.pow_raw(c, 1u64 << (bits - i - 1));
            r = m.mul_raw(r, b);
            c = m.mul_raw(b, b);
            t = m.mul_raw(t, c);
            bits = i;
        }
        let r = r.min(p - r);
        Ok(Some(m.residue(r as i64)))
    }

    /// The multiplicative section (ℤ/pℤ)^× → (ℤ/p²ℤ)^×, x ↦ x^p.
    pub fn teichmuller_lift(self) -> Result<Residue> {
        if self.modulus.k != 1 {
            return Err(Error::WrongExponent {
                expected: 1,
                got: self.modulus.k(),
            });
        }
        if !self.is_unit() {
            return Err(Error::NotAUnit {
                value: self.value,
                m: self.modulus.m(),
            });
        }
        let sq = self.modulus.square();
        Ok(Residue {
            value: sq.pow_raw(self.value, self.modulus.p() as u64),
            modulus: sq,
        })
    }

    /// The least nonnegative integer lift into ℤ/p²ℤ.
    pub fn integer_lift(self) -> Residue {
        self.modulus.square().residue(self.value as i64)
    }
}

/// The least positive quadratic nonresidue mod p; the fixed ε.
pub fn smallest_nonsquare(p: u32) -> Residue {
    let m = Modulus::new(p, 1).expect("odd prime");
    m.units()
        .find(|r| !r.is_square().unwrap())
        .expect("an odd prime has nonsquares")
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        Residue {
            value: self.modulus.add_raw(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        Residue {
            value: self.modulus.sub_raw(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        Residue {
            value: self.modulus.mul_raw(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue {
            value: self.modulus.sub_raw(0, self.value),
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus.m())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u32, k: u32) -> Modulus {
        Modulus::new(p, k).unwrap()
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(Modulus::new(2, 1).is_err());
        assert!(Modulus::new(9, 1).is_err());
        assert!(Modulus::new(3, 3).is_err());
        assert!(Modulus::new(17, 1).is_err());
    }

    #[test]
    fn small_arithmetic() {
        let r = m(3, 2);
        assert_eq!((r.residue(7) + r.residue(5)).value(), 3);
        assert_eq!((r.residue(4) * r.residue(7)).value(), 1);
        assert_eq!((-m(5, 1).residue(2)).value(), 3);
        assert_eq!(r.residue(4).inv().unwrap().value(), 7);
        assert_eq!(m(5, 1).residue(2).inv().unwrap().value(), 3);
        assert_eq!(r.residue(3).inv(), Err(Error::NotAUnit { value: 3, m: 9 }));
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = m(3, 2).residue(1);
        let b = m(3, 1).residue(1);
        assert!(matches!(
            a.checked_add(b),
            Err(Error::ModulusMismatch { .. })
        ));
    }

    #[test]
    fn nonsquares() {
        assert!(m(5, 1).residue(4).is_square().unwrap());
        assert_eq!(smallest_nonsquare(3).value(), 2);
        assert_eq!(smallest_nonsquare(5).value(), 2);
        assert_eq!(smallest_nonsquare(7).value(), 3);
        assert_eq!(smallest_nonsquare(13).value(), 2);
    }

    #[test]
    fn sqrt_matches_brute_force() {
        for p in [3, 5, 7, 11, 13] {
            let f = m(p, 1);
            for a in f.elements() {
                let brute = f.elements().find(|x| *x * *x == a);
                match a.sqrt().unwrap() {
                    Some(r) => {
                        assert_eq!(r * r, a);
                        assert!(r.value() <= (p - 1) / 2);
                    }
                    None => assert!(brute.is_none()),
                }
            }
        }
    }

    #[test]
    fn lifts() {
        assert_eq!(m(3, 1).residue(2).teichmuller_lift().unwrap().value(), 8);
        assert_eq!(m(3, 1).residue(1).teichmuller_lift().unwrap().value(), 1);
        assert_eq!(m(5, 1).residue(2).teichmuller_lift().unwrap().value(), 7);
        assert!(m(5, 1).residue(0).teichmuller_lift().is_err());
    }
}
