//! 2×2 matrices over ℤ/p^kℤ.
//!
//! A matrix `[[a,b],[c,d]]` is stored row-major as four canonical residues.
//! Its integer encoding is the base-m number with digits `a, b, c, d`, so a
//! matrix mod p² encodes into `[0, p⁸)`.

use std::fmt;
use std::ops::Mul;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::residue::{Modulus, Residue};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    modulus: Modulus,
    e: [u32; 4],
}

impl Mat2 {
    pub fn new(modulus: Modulus, a: i64, b: i64, c: i64, d: i64) -> Mat2 {
        Mat2 {
            modulus,
            e: [
                modulus.reduce(a),
                modulus.reduce(b),
                modulus.reduce(c),
                modulus.reduce(d),
            ],
        }
    }

    pub fn from_residues(a: Residue, b: Residue, c: Residue, d: Residue) -> Result<Mat2> {
        let m = a.modulus();
        for r in [b, c, d] {
            if r.modulus() != m {
                return Err(Error::ModulusMismatch {
                    left: m.to_string(),
                    right: r.modulus().to_string(),
                });
            }
        }
        Ok(Mat2 {
            modulus: m,
            e: [a.value(), b.value(), c.value(), d.value()],
        })
    }

    pub fn identity(modulus: Modulus) -> Mat2 {
        Mat2::new(modulus, 1, 0, 0, 1)
    }

    pub fn zero(modulus: Modulus) -> Mat2 {
        Mat2::new(modulus, 0, 0, 0, 0)
    }

    pub fn scalar(modulus: Modulus, w: i64) -> Mat2 {
        Mat2::new(modulus, w, 0, 0, w)
    }

    pub fn diag(modulus: Modulus, w: i64, z: i64) -> Mat2 {
        Mat2::new(modulus, w, 0, 0, z)
    }

    pub fn antidiag(modulus: Modulus, x: i64, y: i64) -> Mat2 {
        Mat2::new(modulus, 0, x, y, 0)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Raw entries `[a, b, c, d]`.
    pub fn entries(&self) -> [u32; 4] {
        self.e
    }

    pub fn entry(&self, i: usize) -> Residue {
        self.modulus.residue(self.e[i] as i64)
    }

    pub fn encode(&self) -> u32 {
        let m = self.modulus.m();
        ((self.e[0] * m + self.e[1]) * m + self.e[2]) * m + self.e[3]
    }

    pub fn decode(modulus: Modulus, code: u32) -> Result<Mat2> {
        let m = modulus.m();
        if code >= m.pow(4) {
            return Err(Error::Parse {
                input: code.to_string(),
                reason: format!("encoding must be below {}", m.pow(4)),
            });
        }
        Ok(Mat2::decode_unchecked(modulus, code))
    }

    #[inline]
    pub(crate) fn decode_unchecked(modulus: Modulus, code: u32) -> Mat2 {
        let m = modulus.m();
        Mat2 {
            modulus,
            e: [
                code / (m * m * m),
                code / (m * m) % m,
                code / m % m,
                code % m,
            ],
        }
    }

    pub fn det(&self) -> Residue {
        self.modulus.residue(self.det_raw() as i64)
    }

    #[inline]
    pub(crate) fn det_raw(&self) -> u32 {
        let m = self.modulus;
        m.sub_raw(
            m.mul_raw(self.e[0], self.e[3]),
            m.mul_raw(self.e[1], self.e[2]),
        )
    }

    pub fn trace(&self) -> Residue {
        self.modulus
            .residue(self.modulus.add_raw(self.e[0], self.e[3]) as i64)
    }

    pub fn is_invertible(&self) -> bool {
        !self.det_raw().is_multiple_of(self.modulus.p())
    }

    pub fn is_identity(&self) -> bool {
        self.e == [1, 0, 0, 1]
    }

    pub fn is_scalar(&self) -> bool {
        self.e[1] == 0 && self.e[2] == 0 && self.e[0] == self.e[3]
    }

    pub fn is_diagonal(&self) -> bool {
        self.e[1] == 0 && self.e[2] == 0
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        let m = self.modulus;
        let mut e = [0; 4];
        for (i, x) in e.iter_mut().enumerate() {
            *x = m.add_raw(self.e[i], rhs.e[i]);
        }
        Mat2 { modulus: m, e }
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        self.add(&rhs.scale(-1))
    }

    pub fn scale(&self, s: i64) -> Mat2 {
        let m = self.modulus;
        let s = m.reduce(s);
        Mat2 {
            modulus: m,
            e: self.e.map(|x| m.mul_raw(x, s)),
        }
    }

    pub fn inv(&self) -> Result<Mat2> {
        let m = self.modulus;
        let di = m
            .inv_raw(self.det_raw())
            .map_err(|_| Error::NotInvertible(self.to_string()))?;
        let [a, b, c, d] = self.e;
        Ok(Mat2 {
            modulus: m,
            e: [
                m.mul_raw(d, di),
                m.mul_raw(m.sub_raw(0, b), di),
                m.mul_raw(m.sub_raw(0, c), di),
                m.mul_raw(a, di),
            ],
        })
    }

    /// `self · h · self⁻¹` with the inverse supplied by the caller.
    #[inline]
    pub fn conj_with(&self, inv: &Mat2, h: &Mat2) -> Mat2 {
        *self * *h * *inv
    }

    pub fn conj(&self, h: &Mat2) -> Result<Mat2> {
        Ok(self.conj_with(&self.inv()?, h))
    }

    /// Square-and-multiply; negative exponents invert first.
    pub fn pow(&self, n: i64) -> Result<Mat2> {
        let base = if n < 0 { self.inv()? } else { *self };
        Ok(base.pow_u(n.unsigned_abs()))
    }

    pub fn pow_u(&self, mut n: u64) -> Mat2 {
        let mut acc = Mat2::identity(self.modulus);
        let mut base = *self;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// Multiplicative order; `None` for singular matrices.
    pub fn order(&self) -> Option<u64> {
        if !self.is_invertible() {
            return None;
        }
        let mut x = *self;
        let mut n = 1;
        while !x.is_identity() {
            x = x * *self;
            n += 1;
        }
        Some(n)
    }

    /// φ: entrywise reduction mod p.
    pub fn reduce_mod_p(&self) -> Result<Mat2> {
        if self.modulus.k() != 2 {
            return Err(Error::WrongExponent {
                expected: 2,
                got: self.modulus.k(),
            });
        }
        let base = self.modulus.base();
        let p = base.m();
        Ok(Mat2 {
            modulus: base,
            e: self.e.map(|x| x % p),
        })
    }

    /// Entrywise least nonnegative lift from ℤ/pℤ to ℤ/p²ℤ.
    pub fn integer_lift(&self) -> Result<Mat2> {
        if self.modulus.k() != 1 {
            return Err(Error::WrongExponent {
                expected: 1,
                got: self.modulus.k(),
            });
        }
        Ok(Mat2 {
            modulus: self.modulus.square(),
            e: self.e,
        })
    }

    /// Whether `self ≡ I (mod p)` for a matrix mod p².
    pub fn in_kernel(&self) -> bool {
        let p = self.modulus.p();
        self.modulus.k() == 2
            && self.e[0] % p == 1
            && self.e[1].is_multiple_of(p)
            && self.e[2].is_multiple_of(p)
            && self.e[3] % p == 1
    }

    pub fn p_part(&self) -> Result<PPart> {
        if !self.in_kernel() {
            return Err(Error::NotInKernel(self.to_string()));
        }
        let p = self.modulus.p();
        let base = self.modulus.base();
        let [a, b, c, d] = self.e;
        Ok(PPart(Mat2 {
            modulus: base,
            e: [(a - 1) / p, b / p, c / p, (d - 1) / p],
        }))
    }

    /// Parse a matrix literal.
    ///
    /// Accepted forms: `[[a,b],[c,d]]`, `diag(w,z)`, `antidiag(x,y)`, `I`,
    /// any of those as `I+<form>p` (the kernel element with that p-part), or
    /// the integer encoding. Whitespace is ignored.
    pub fn parse(s: &str, modulus: Modulus) -> Result<Mat2> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if compact.is_empty() {
            return Err(err("empty literal"));
        }
        if let Some(inner) = compact.strip_prefix("I+").and_then(|r| r.strip_suffix('p')) {
            if modulus.k() != 2 {
                return Err(err("I+Ap needs k = 2"));
            }
            let a = parse_plain(inner, modulus.base()).map_err(|r| err(&r))?;
            return Ok(PPart(a).embed());
        }
        parse_plain(&compact, modulus).map_err(|r| err(&r))
    }
}

fn parse_int(tok: &str) -> std::result::Result<i64, String> {
    tok.parse::<i64>()
        .map_err(|_| format!("bad integer token {tok:?}"))
}

fn parse_pair(body: &str) -> std::result::Result<(i64, i64), String> {
    let parts: Vec<&str> = body.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two entries in {body:?}"));
    }
    Ok((parse_int(parts[0])?, parse_int(parts[1])?))
}

fn parse_plain(s: &str, modulus: Modulus) -> std::result::Result<Mat2, String> {
    if s == "I" {
        return Ok(Mat2::identity(modulus));
    }
    if let Some(body) = s.strip_prefix("diag(").and_then(|r| r.strip_suffix(')')) {
        let (w, z) = parse_pair(body)?;
        return Ok(Mat2::diag(modulus, w, z));
    }
    if let Some(body) = s
        .strip_prefix("antidiag(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let (x, y) = parse_pair(body)?;
        return Ok(Mat2::antidiag(modulus, x, y));
    }
    if let Some(body) = s.strip_prefix("[[").and_then(|r| r.strip_suffix("]]")) {
        let rows: Vec<&str> = body.split("],[").collect();
        if rows.len() != 2 {
            return Err("expected two rows".into());
        }
        let (a, b) = parse_pair(rows[0])?;
        let (c, d) = parse_pair(rows[1])?;
        return Ok(Mat2::new(modulus, a, b, c, d));
    }
    if s.bytes().all(|b| b.is_ascii_digit()) {
        let code: u32 = s
            .parse()
            .map_err(|_| format!("encoding {s:?} out of range"))?;
        return Mat2::decode(modulus, code).map_err(|e| e.to_string());
    }
    let bad = s
        .split(|c: char| "[],()".contains(c))
        .find(|t| !t.is_empty() && parse_int(t).is_err())
        .unwrap_or(s);
    Err(format!("unexpected token {bad:?}"))
}

impl Mul for Mat2 {
    type Output = Mat2;
    #[inline]
    fn mul(self, rhs: Mat2) -> Mat2 {
        debug_assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        let m = self.modulus.m();
        let [a, b, c, d] = self.e;
        let [x, y, z, w] = rhs.e;
        Mat2 {
            modulus: self.modulus,
            e: [
                (a * x + b * z) % m,
                (a * y + b * w) % m,
                (c * x + d * z) % m,
                (c * y + d * w) % m,
            ],
        }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} mod {}", self.modulus.m())
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let [a, b, c, d] = self.e;
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&[a, b])?;
        seq.serialize_element(&[c, d])?;
        seq.end()
    }
}

/// The p-part A of a kernel element κ = I + Ap, stored mod p.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PPart(pub Mat2);

impl PPart {
    pub fn new(a: Mat2) -> Result<PPart> {
        if a.modulus().k() != 1 {
            return Err(Error::WrongExponent {
                expected: 1,
                got: a.modulus().k(),
            });
        }
        Ok(PPart(a))
    }

    pub fn matrix(&self) -> Mat2 {
        self.0
    }

    /// I + A·p in GL₂(ℤ/p²ℤ).
    pub fn embed(&self) -> Mat2 {
        let sq = self.0.modulus().square();
        let p = sq.p();
        let [a, b, c, d] = self.0.entries();
        Mat2 {
            modulus: sq,
            e: [1 + a * p, b * p, c * p, 1 + d * p],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u32, k: u32) -> Modulus {
        Modulus::new(p, k).unwrap()
    }

    #[test]
    fn basic_ops() {
        let r = m(3, 2);
        assert_eq!(Mat2::diag(r, 4, 7).det().value(), 1);
        let t = Mat2::new(r, 1, 1, 0, 1);
        assert_eq!(t.inv().unwrap(), Mat2::new(r, 1, -1, 0, 1));
        assert_eq!(t * t.inv().unwrap(), Mat2::identity(r));
        assert!(matches!(
            Mat2::new(r, 3, 0, 0, 1).inv(),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn reduction_and_p_parts() {
        let r = m(3, 2);
        let g = Mat2::new(r, 4, 1, 0, 7);
        assert_eq!(g.reduce_mod_p().unwrap(), Mat2::new(m(3, 1), 1, 1, 0, 1));
        let k = Mat2::new(r, 1, 3, 0, 1);
        assert_eq!(k.p_part().unwrap().matrix(), Mat2::new(m(3, 1), 0, 1, 0, 0));
        assert_eq!(
            Mat2::identity(r).p_part().unwrap().matrix(),
            Mat2::zero(m(3, 1))
        );
        assert!(matches!(g.p_part(), Err(Error::NotInKernel(_))));
        let f = m(3, 1);
        let e12 = PPart(Mat2::new(f, 0, 1, 0, 0)).embed();
        let e21 = PPart(Mat2::new(f, 0, 0, 1, 0)).embed();
        assert_eq!(e12 * e21, PPart(Mat2::new(f, 0, 1, 1, 0)).embed());
    }

    #[test]
    fn encode_round_trip() {
        let r = m(7, 2);
        let g = Mat2::new(r, 48, 3, 0, 17);
        assert_eq!(Mat2::decode(r, g.encode()).unwrap(), g);
        assert!(Mat2::decode(r, 49u32.pow(4)).is_err());
    }

    #[test]
    fn powers() {
        let r = m(5, 2);
        let f = m(5, 1);
        for a in [Mat2::new(f, 1, 2, 3, 4), Mat2::zero(f)] {
            let g = Mat2::scalar(r, 2).add(&PPart(a).embed().sub(&Mat2::identity(r)));
            assert_eq!(g.pow(5).unwrap(), Mat2::scalar(r, 7));
        }
        assert_eq!(
            Mat2::new(r, 1, 1, 0, 1).pow(5).unwrap(),
            Mat2::new(r, 1, 5, 0, 1)
        );
        let t = Mat2::new(r, 1, 1, 0, 1);
        assert_eq!(t.pow(-3).unwrap(), Mat2::new(r, 1, -3, 0, 1));
    }

    #[test]
    fn literals() {
        let r = m(3, 2);
        assert_eq!(
            Mat2::parse("[[1,1],[0,1]]", r).unwrap(),
            Mat2::new(r, 1, 1, 0, 1)
        );
        assert_eq!(
            Mat2::parse(" [[1, -1], [0, 1]] ", r).unwrap(),
            Mat2::new(r, 1, 8, 0, 1)
        );
        assert_eq!(Mat2::parse("I+diag(1,2)p", r).unwrap(), Mat2::diag(r, 4, 7));
        assert_eq!(
            Mat2::parse("I+[[0,1],[0,0]]p", r).unwrap(),
            Mat2::new(r, 1, 3, 0, 1)
        );
        let g = Mat2::new(r, 2, 5, 1, 8);
        assert_eq!(Mat2::parse(&g.encode().to_string(), r).unwrap(), g);
        let e = Mat2::parse("[[1,x],[0,1]]", r).unwrap_err();
        assert!(e.to_string().contains("\"x\""), "{e}");
        assert!(Mat2::parse("[[1,1],[0,1]", r).is_err());
    }

    #[test]
    fn json_shape() {
        let g = Mat2::new(m(3, 2), 1, 2, 3, 4);
        assert_eq!(serde_json::to_string(&g).unwrap(), "[[1,2],[3,4]]");
    }
}
