//! Constructors for the named subgroups and the parameterized kernel
//! families and subgroup pairs.
//!
//! Every group is built from an explicit generator list and closed. Kernel
//! families are given by the p-parts of their generators and embedded as
//! `I + A·p` in GL₂(ℤ/p²ℤ).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::ambient::gl2_generators;
use crate::error::{Error, Result};
use crate::mat2::{Mat2, PPart};
use crate::residue::{smallest_nonsquare, Modulus, Residue};
use crate::subgrp::{are_conjugate, are_locally_conjugate, Subgroup};

/// A family name as used on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyId {
    Z,
    Cs,
    Cns,
    B,
    NCs,
    NCns,
    SL2,
    KerPhi,
    T,
    /// Cyclic kernel subgroups, items 1 to 6.
    Ker01(u8),
    /// Two-dimensional subgroups of T, items 1 to 3.
    T2(u8),
    /// Two-dimensional kernel subgroups outside T, items 1 to 6.
    Ker2(u8),
    /// Three-dimensional kernel subgroups outside T, items 1 to 4.
    Ker3(u8),
    GLpPair,
    CartanPair,
    BorelPair,
    /// The six p = 3 subgroups with image SL₂(ℤ/3ℤ), items 1 to 6.
    SL2p3(u8),
}

impl FamilyId {
    /// Every accepted name, one per line, for help text.
    pub fn all_names() -> Vec<String> {
        let mut out: Vec<String> = ["z", "cs", "cns", "b", "ncs", "ncns", "sl2", "kerphi", "t"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        out.extend((1..=6).map(|i| format!("ker01.{i}")));
        out.extend((1..=3).map(|i| format!("t2.h{i}")));
        out.extend((1..=6).map(|i| format!("ker2.h{i}")));
        out.extend((1..=4).map(|i| format!("ker3.h{i}")));
        out.extend(
            ["glp-pair", "cartan-pair", "borel-pair"]
                .iter()
                .map(|s| s.to_string()),
        );
        out.extend((1..=6).map(|i| format!("sl2p3.{i}")));
        out
    }

    pub fn is_named(&self) -> bool {
        matches!(
            self,
            FamilyId::Z
                | FamilyId::Cs
                | FamilyId::Cns
                | FamilyId::B
                | FamilyId::NCs
                | FamilyId::NCns
                | FamilyId::SL2
                | FamilyId::KerPhi
                | FamilyId::T
        )
    }

    pub fn is_kernel(&self) -> bool {
        matches!(
            self,
            FamilyId::Ker01(_) | FamilyId::T2(_) | FamilyId::Ker2(_) | FamilyId::Ker3(_)
        )
    }

    pub fn is_pair(&self) -> bool {
        matches!(
            self,
            FamilyId::GLpPair | FamilyId::CartanPair | FamilyId::BorelPair
        )
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyId::Z => write!(f, "z"),
            FamilyId::Cs => write!(f, "cs"),
            FamilyId::Cns => write!(f, "cns"),
            FamilyId::B => write!(f, "b"),
            FamilyId::NCs => write!(f, "ncs"),
            FamilyId::NCns => write!(f, "ncns"),
            FamilyId::SL2 => write!(f, "sl2"),
            FamilyId::KerPhi => write!(f, "kerphi"),
            FamilyId::T => write!(f, "t"),
            FamilyId::Ker01(i) => write!(f, "ker01.{i}"),
            FamilyId::T2(i) => write!(f, "t2.h{i}"),
            FamilyId::Ker2(i) => write!(f, "ker2.h{i}"),
            FamilyId::Ker3(i) => write!(f, "ker3.h{i}"),
            FamilyId::GLpPair => write!(f, "glp-pair"),
            FamilyId::CartanPair => write!(f, "cartan-pair"),
            FamilyId::BorelPair => write!(f, "borel-pair"),
            FamilyId::SL2p3(i) => write!(f, "sl2p3.{i}"),
        }
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilyId> {
        let lower = s.trim().to_ascii_lowercase();
        let bad = || Error::BadParameter(format!("unknown family {s:?}"));
        let item = |rest: &str, max: u8| -> Result<u8> {
            match rest.parse::<u8>() {
                Ok(i) if (1..=max).contains(&i) => Ok(i),
                _ => Err(bad()),
            }
        };
        let id = match lower.as_str() {
            "z" => FamilyId::Z,
            "cs" => FamilyId::Cs,
            "cns" => FamilyId::Cns,
            "b" => FamilyId::B,
            "ncs" => FamilyId::NCs,
            "ncns" => FamilyId::NCns,
            "sl2" => FamilyId::SL2,
            "kerphi" => FamilyId::KerPhi,
            "t" => FamilyId::T,
            "glp-pair" => FamilyId::GLpPair,
            "cartan-pair" => FamilyId::CartanPair,
            "borel-pair" => FamilyId::BorelPair,
            other => {
                if let Some(r) = other.strip_prefix("ker01.") {
                    FamilyId::Ker01(item(r, 6)?)
                } else if let Some(r) = other.strip_prefix("t2.h") {
                    FamilyId::T2(item(r, 3)?)
                } else if let Some(r) = other.strip_prefix("ker2.h") {
                    FamilyId::Ker2(item(r, 6)?)
                } else if let Some(r) = other.strip_prefix("ker3.h") {
                    FamilyId::Ker3(item(r, 4)?)
                } else if let Some(r) = other.strip_prefix("sl2p3.") {
                    FamilyId::SL2p3(item(r, 6)?)
                } else {
                    return Err(bad());
                }
            }
        };
        Ok(id)
    }
}

/// Residue parameters of a kernel family. Unused fields are ignored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
}

impl Params {
    pub fn none() -> Params {
        Params::default()
    }

    pub fn with_a(mut self, a: i64) -> Params {
        self.a = Some(a);
        self
    }

    pub fn with_b(mut self, b: i64) -> Params {
        self.b = Some(b);
        self
    }

    pub fn with_c(mut self, c: i64) -> Params {
        self.c = Some(c);
        self
    }

    pub fn with_d(mut self, d: i64) -> Params {
        self.d = Some(d);
        self
    }

    fn need(value: Option<i64>, name: &str, id: FamilyId) -> Result<i64> {
        value.ok_or_else(|| Error::BadParameter(format!("{id} needs parameter {name}")))
    }
}

fn primitive_root(modulus: Modulus) -> Residue {
    let g = gl2_generators(modulus)[2];
    g.entry(0)
}

/// Closes `candidates` greedily: each candidate not yet in the group is
/// added as a generator. The result is deterministic in the input order.
fn greedy_closure(
    modulus: Modulus,
    candidates: impl IntoIterator<Item = Mat2>,
) -> Result<Subgroup> {
    let mut gens: Vec<Mat2> = Vec::new();
    let mut h = Subgroup::trivial(modulus);
    for g in candidates {
        if !h.contains(&g) {
            gens.push(g);
            h = Subgroup::closure(modulus, &gens)?;
        }
    }
    Ok(h)
}

fn cns_elements(modulus: Modulus) -> impl Iterator<Item = Mat2> {
    let eps = smallest_nonsquare(modulus.p()).value() as i64;
    let m = modulus.m() as i64;
    (0..m)
        .flat_map(move |w| (0..m).map(move |y| Mat2::new(modulus, w, eps * y, y, w)))
        .filter(|g| g.is_invertible())
}

fn require_k2(modulus: Modulus) -> Result<()> {
    if modulus.k() != 2 {
        return Err(Error::WrongExponent {
            expected: 2,
            got: modulus.k(),
        });
    }
    Ok(())
}

/// One of the named subgroups of GL₂(ℤ/p^kℤ).
pub fn named(id: FamilyId, modulus: Modulus) -> Result<Subgroup> {
    let r = primitive_root(modulus).value() as i64;
    let one = |a, b, c, d| Mat2::new(modulus, a, b, c, d);
    let cs_gens = vec![Mat2::diag(modulus, r, 1), Mat2::diag(modulus, 1, r)];
    match id {
        FamilyId::Z => Subgroup::closure(modulus, &[Mat2::scalar(modulus, r)]),
        FamilyId::Cs => Subgroup::closure(modulus, &cs_gens),
        FamilyId::Cns => greedy_closure(modulus, cns_elements(modulus)),
        FamilyId::B => {
            let mut gens = cs_gens;
            gens.push(one(1, 1, 0, 1));
            Subgroup::closure(modulus, &gens)
        }
        FamilyId::NCs => {
            let mut gens = cs_gens;
            gens.push(Mat2::antidiag(modulus, 1, 1));
            Subgroup::closure(modulus, &gens)
        }
        FamilyId::NCns => {
            let base = named(FamilyId::Cns, modulus)?;
            let mut gens = base.generators().to_vec();
            gens.push(Mat2::diag(modulus, 1, -1));
            Subgroup::closure(modulus, &gens)
        }
        FamilyId::SL2 => Subgroup::closure(modulus, &[one(1, 1, 0, 1), one(1, 0, 1, 1)]),
        FamilyId::KerPhi => {
            require_k2(modulus)?;
            kernel_span(
                modulus.p(),
                &[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
            )
        }
        FamilyId::T => {
            require_k2(modulus)?;
            kernel_span(modulus.p(), &[[1, 0, 0, -1], [0, 1, 0, 0], [0, 0, 1, 0]])
        }
        other => Err(Error::BadParameter(format!(
            "{other} is not a named subgroup"
        ))),
    }
}

/// The closed form for |named(id, p^k)|.
pub fn named_order(id: FamilyId, modulus: Modulus) -> Option<usize> {
    let p = modulus.p() as usize;
    let m = modulus.m() as usize;
    let phi = modulus.totient() as usize;
    let lift = m / p;
    let cns = (p * p - 1) * lift * lift;
    let sl2 = p * (p * p - 1) * lift.pow(3);
    Some(match id {
        FamilyId::Z => phi,
        FamilyId::Cs => phi * phi,
        FamilyId::Cns => cns,
        FamilyId::B => m * phi * phi,
        FamilyId::NCs => 2 * phi * phi,
        FamilyId::NCns => 2 * cns,
        FamilyId::SL2 => sl2,
        FamilyId::KerPhi if modulus.k() == 2 => p.pow(4),
        FamilyId::T if modulus.k() == 2 => p.pow(3),
        _ => return None,
    })
}

/// The subgroup of ker φ ≤ GL₂(ℤ/p²ℤ) generated by `I + A·p` for the given
/// p-parts `A`, each written row-major with entries reduced mod p.
pub fn kernel_span(p: u32, parts: &[[i64; 4]]) -> Result<Subgroup> {
    let f = Modulus::new(p, 1)?;
    let gens: Vec<Mat2> = parts
        .iter()
        .map(|&[a, b, c, d]| PPart(Mat2::new(f, a, b, c, d)).embed())
        .collect();
    Subgroup::closure(f.square(), &gens)
}

/// The p-part generators of a kernel family member.
pub fn kernel_parts(id: FamilyId, params: &Params, p: u32) -> Result<Vec<[i64; 4]>> {
    Modulus::new(p, 1)?;
    let pi = p as i64;
    let eps = smallest_nonsquare(p).value() as i64;
    let half = (pi - 1) / 2;
    let residue = |v: i64| v.rem_euclid(pi);
    let range = |name: &str, v: i64, lo: i64, hi: i64| -> Result<i64> {
        if v < lo || v > hi {
            return Err(Error::BadParameter(format!(
                "{id}: {name} = {v} is outside {lo}..={hi}"
            )));
        }
        Ok(v)
    };
    const H: [i64; 4] = [1, 0, 0, -1];
    const E12: [i64; 4] = [0, 1, 0, 0];
    let parts = match id {
        FamilyId::Ker01(1) => vec![],
        FamilyId::Ker01(2) => vec![E12],
        FamilyId::Ker01(3) => vec![[1, 1, 0, 1]],
        FamilyId::Ker01(4) => {
            let d = residue(Params::need(params.d, "d", id)?);
            vec![[1, 0, 0, d]]
        }
        FamilyId::Ker01(5) => vec![[0, eps, 1, 0]],
        FamilyId::Ker01(6) => {
            let c = range("c", Params::need(params.c, "c", id)?, 1, half)?;
            vec![[1, eps * c, c, 1]]
        }
        FamilyId::T2(1) => vec![H, E12],
        FamilyId::T2(2) => vec![H, [0, 1, 1, 0]],
        FamilyId::T2(3) => vec![H, [0, eps, 1, 0]],
        FamilyId::Ker2(1) => vec![E12, [0, 0, 1, 1]],
        FamilyId::Ker2(2) => vec![E12, [0, 0, 0, 1]],
        FamilyId::Ker2(3) => {
            let d = residue(Params::need(params.d, "d", id)?);
            if d == pi - 1 {
                return Err(Error::BadParameter(format!("{id}: d must not be -1")));
            }
            vec![E12, [1, 0, 0, d]]
        }
        FamilyId::Ker2(4) => {
            let c = residue(Params::need(params.c, "c", id)?);
            vec![H, [0, 1, c, 1]]
        }
        FamilyId::Ker2(5) => vec![H, [0, 0, 0, 1]],
        FamilyId::Ker2(6) => {
            let a = residue(Params::need(params.a, "a", id)?);
            let b = residue(Params::need(params.b, "b", id)?);
            vec![[0, eps, 1, 0], [1 + a, -eps * b, b, 1 - a]]
        }
        FamilyId::Ker3(1) => vec![H, E12, [0, 0, 1, 1]],
        FamilyId::Ker3(2) => vec![H, E12, [0, 0, 0, 1]],
        FamilyId::Ker3(3) => {
            let c = range("c", Params::need(params.c, "c", id)?, 0, half)?;
            vec![H, [0, 1, 1, 0], [0, 0, c, 1]]
        }
        FamilyId::Ker3(4) => {
            let c = range("c", Params::need(params.c, "c", id)?, 0, half)?;
            vec![H, [0, eps, 1, 0], [0, 0, c, 1]]
        }
        other => {
            return Err(Error::BadParameter(format!(
                "{other} is not a kernel family"
            )))
        }
    };
    Ok(parts.into_iter().map(|a| a.map(residue)).collect())
}

/// A member of one of the kernel families.
pub fn kernel_family(id: FamilyId, params: &Params, p: u32) -> Result<Subgroup> {
    kernel_span(p, &kernel_parts(id, params, p)?)
}

/// Parses `name` or `name:a=..,c=..` into a family id and parameters.
pub fn parse_family_ref(s: &str) -> Result<(FamilyId, Params)> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let id: FamilyId = name.parse()?;
    let mut params = Params::none();
    for kv in rest.split(',').filter(|t| !t.is_empty()) {
        let (key, value) = kv.split_once('=').ok_or_else(|| Error::Parse {
            input: s.to_string(),
            reason: format!("expected key=value, got {kv:?}"),
        })?;
        let v: i64 = value.parse().map_err(|_| Error::Parse {
            input: s.to_string(),
            reason: format!("bad integer token {value:?}"),
        })?;
        match key {
            "a" => params.a = Some(v),
            "b" => params.b = Some(v),
            "c" => params.c = Some(v),
            "d" => params.d = Some(v),
            _ => {
                return Err(Error::Parse {
                    input: s.to_string(),
                    reason: format!("unknown parameter {key:?}"),
                })
            }
        }
    }
    Ok((id, params))
}

/// A subgroup from a literal: generator literals separated by `;`, or a
/// family reference such as `b`, `ker2.h3:d=0` or `sl2p3.4`.
pub fn parse_subgroup(s: &str, modulus: Modulus) -> Result<Subgroup> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let starts_like_matrix = compact.starts_with('[')
        || compact.starts_with("diag(")
        || compact.starts_with("antidiag(")
        || compact.starts_with('I')
        || compact.starts_with(|c: char| c.is_ascii_digit());
    if !starts_like_matrix {
        let (id, params) = parse_family_ref(&compact)?;
        return match id {
            FamilyId::SL2p3(i) => {
                if modulus != Modulus::new(3, 2)? {
                    return Err(Error::BadParameter(format!(
                        "{id} lives mod 9, got mod {}",
                        modulus.m()
                    )));
                }
                Ok(sl2_p3_list().swap_remove(i as usize - 1))
            }
            _ if id.is_kernel() => {
                require_k2(modulus)?;
                kernel_family(id, &params, modulus.p())
            }
            _ if id.is_pair() => Err(Error::BadParameter(format!(
                "{id} names a pair, not a subgroup"
            ))),
            _ => named(id, modulus),
        };
    }
    let gens = compact
        .split(';')
        .filter(|t| !t.is_empty())
        .map(|t| Mat2::parse(t, modulus))
        .collect::<Result<Vec<_>>>()?;
    Subgroup::closure(modulus, &gens)
}

/// One labelled member of a kernel family, with its parameters.
#[derive(Clone, Debug)]
pub struct KernelMember {
    pub id: FamilyId,
    pub params: Params,
    pub group: Subgroup,
}

impl KernelMember {
    pub fn label(&self) -> String {
        let mut s = self.id.to_string();
        for (name, v) in [
            ("a", self.params.a),
            ("b", self.params.b),
            ("c", self.params.c),
            ("d", self.params.d),
        ] {
            if let Some(v) = v {
                s.push_str(&format!(" {name}={v}"));
            }
        }
        s
    }
}

/// Every listed kernel subgroup at the prime p, over the full parameter
/// ranges, together with T and ker φ themselves.
pub fn kernel_catalogue(p: u32) -> Result<Vec<KernelMember>> {
    let pi = p as i64;
    let half = (pi - 1) / 2;
    let mut entries: Vec<(FamilyId, Params)> = Vec::new();
    let plain = |id| (id, Params::none());
    entries.extend([1, 2, 3, 5].iter().map(|&i| plain(FamilyId::Ker01(i))));
    entries.extend((0..pi).map(|d| (FamilyId::Ker01(4), Params::none().with_d(d))));
    entries.extend((1..=half).map(|c| (FamilyId::Ker01(6), Params::none().with_c(c))));
    entries.extend((1..=3).map(|i| plain(FamilyId::T2(i))));
    entries.extend([1, 2, 5].iter().map(|&i| plain(FamilyId::Ker2(i))));
    entries.extend((0..pi - 1).map(|d| (FamilyId::Ker2(3), Params::none().with_d(d))));
    entries.extend((0..pi).map(|c| (FamilyId::Ker2(4), Params::none().with_c(c))));
    for a in 0..pi {
        entries.extend((0..pi).map(|b| (FamilyId::Ker2(6), Params::none().with_a(a).with_b(b))));
    }
    entries.extend([1, 2].iter().map(|&i| plain(FamilyId::Ker3(i))));
    for i in [3, 4] {
        entries.extend((0..=half).map(|c| (FamilyId::Ker3(i), Params::none().with_c(c))));
    }
    let square = Modulus::new(p, 2)?;
    let mut out = Vec::with_capacity(entries.len() + 2);
    for (id, params) in entries {
        out.push(KernelMember {
            id,
            params,
            group: kernel_family(id, &params, p)?,
        });
    }
    out.push(KernelMember {
        id: FamilyId::T,
        params: Params::none(),
        group: named(FamilyId::T, square)?,
    });
    out.push(KernelMember {
        id: FamilyId::KerPhi,
        params: Params::none(),
        group: named(FamilyId::KerPhi, square)?,
    });
    Ok(out)
}

/// Conjugation by the antidiagonal involution, for a group of diagonal matrices.
pub fn diagonal_swap(d: &Subgroup) -> Result<Subgroup> {
    if let Some(g) = d.iter().find(|g| !g.is_diagonal()) {
        return Err(Error::BadParameter(format!("{g} is not diagonal")));
    }
    d.conjugate(&Mat2::antidiag(d.modulus(), 1, 1))
}

fn swapped_pair(d: &Subgroup, extra: &[Mat2]) -> Result<(Subgroup, Subgroup)> {
    let d2 = diagonal_swap(d)?;
    if &d2 == d {
        return Err(Error::DegeneratePair);
    }
    let build = |base: &Subgroup| {
        let mut gens = base.generators().to_vec();
        gens.extend_from_slice(extra);
        Subgroup::closure(base.modulus(), &gens)
    };
    Ok((build(d)?, build(&d2)?))
}

/// `⟨D, t⟩` and `⟨D′, t⟩` in GL₂(ℤ/pℤ) with t = [[1,1],[0,1]] and D′ the
/// diagonal swap of D.
///
/// The pair is checked to be locally conjugate and not conjugate; failing
/// that check is reported as `BadParameter`.
pub fn glp_pair(d: &Subgroup) -> Result<(Subgroup, Subgroup)> {
    let f = d.modulus();
    if f.k() != 1 {
        return Err(Error::WrongExponent {
            expected: 1,
            got: f.k(),
        });
    }
    let (h1, h2) = swapped_pair(d, &[Mat2::new(f, 1, 1, 0, 1)])?;
    if !are_locally_conjugate(&h1, &h2) || are_conjugate(&h1, &h2).is_some() {
        return Err(Error::BadParameter(format!(
            "the pair built from {d:?} is not nontrivially locally conjugate"
        )));
    }
    Ok((h1, h2))
}

/// `⟨D, I + E₁₂p⟩` and `⟨D′, I + E₁₂p⟩` in GL₂(ℤ/p²ℤ).
pub fn cartan_pair(d: &Subgroup) -> Result<(Subgroup, Subgroup)> {
    let r = d.modulus();
    require_k2(r)?;
    let u = PPart(Mat2::new(r.base(), 0, 1, 0, 0)).embed();
    swapped_pair(d, &[u])
}

/// The four shapes of τ with φ(τ) = [[1,1],[0,1]].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauKind {
    /// `[[1,1],[0,1]]`.
    Plain,
    /// `[[1,1],[0,1]] + I·p`.
    PlusScalarP,
    /// `[[1,1],[0,1]] + [[a,0],[1,a]]·p`.
    Lower1,
    /// `[[1,1],[0,1]] + [[a,0],[ε,a]]·p`.
    LowerEps,
}

impl FromStr for TauKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<TauKind> {
        match s {
            "plain" => Ok(TauKind::Plain),
            "plus-scalar-p" => Ok(TauKind::PlusScalarP),
            "lower-1" => Ok(TauKind::Lower1),
            "lower-eps" => Ok(TauKind::LowerEps),
            _ => Err(Error::BadParameter(format!(
                "unknown tau kind {s:?}; expected plain, plus-scalar-p, lower-1 or lower-eps"
            ))),
        }
    }
}

/// The kernel generator k of a Borel pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// k = I.
    Identity,
    /// k = I + E₂₁p.
    Lower,
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<KernelKind> {
        match s {
            "identity" | "i" => Ok(KernelKind::Identity),
            "lower" | "e21" => Ok(KernelKind::Lower),
            _ => Err(Error::BadParameter(format!(
                "unknown kernel kind {s:?}; expected identity or lower"
            ))),
        }
    }
}

/// The element τ of the given shape mod p².
pub fn borel_tau(kind: TauKind, a: i64, modulus: Modulus) -> Result<Mat2> {
    require_k2(modulus)?;
    let p = modulus.p() as i64;
    let eps = smallest_nonsquare(modulus.p()).value() as i64;
    let lift =
        |x: i64, y: i64, z: i64, w: i64| Mat2::new(modulus, 1 + x * p, 1 + y * p, z * p, 1 + w * p);
    Ok(match kind {
        TauKind::Plain => lift(0, 0, 0, 0),
        TauKind::PlusScalarP => lift(1, 0, 0, 1),
        TauKind::Lower1 => lift(a, 0, 1, a),
        TauKind::LowerEps => lift(a, 0, eps, a),
    })
}

/// `⟨τ, k, D⟩` and `⟨τ, k, D′⟩` for p ≥ 5.
pub fn borel_pair(
    tau: TauKind,
    a: Residue,
    k: KernelKind,
    d: &Subgroup,
) -> Result<(Subgroup, Subgroup)> {
    let r = d.modulus();
    require_k2(r)?;
    if r.p() == 3 {
        return Err(Error::BadParameter(
            "borel_pair covers p >= 5; p = 3 pairs come from the exhaustive search".into(),
        ));
    }
    let t = borel_tau(tau, a.value() as i64, r)?;
    let mut extra = vec![t];
    if k == KernelKind::Lower {
        extra.push(PPart(Mat2::new(r.base(), 0, 0, 1, 0)).embed());
    }
    swapped_pair(d, &extra)
}

/// The printed generators of the six p = 3 subgroups with image SL₂(ℤ/3ℤ).
pub const SL2_P3_GENERATORS: [[[i64; 4]; 2]; 6] = [
    [[7, 6, 4, 4], [7, 4, 6, 4]],
    [[1, 1, 0, 1], [1, 0, 7, 1]],
    [[4, 1, 0, 1], [7, 0, 4, 1]],
    [[1, 1, 0, 1], [4, 0, 1, 1]],
    [[7, 6, 1, 7], [7, 4, 6, 4]],
    [[1, 6, 7, 7], [4, 7, 6, 4]],
];

/// The six subgroups of GL₂(ℤ/9ℤ), in list order.
pub fn sl2_p3_list() -> Vec<Subgroup> {
    let r = Modulus::new(3, 2).expect("valid modulus");
    SL2_P3_GENERATORS
        .iter()
        .map(|gens| {
            let gens: Vec<Mat2> = gens
                .iter()
                .map(|&[a, b, c, d]| Mat2::new(r, a, b, c, d))
                .collect();
            Subgroup::closure(r, &gens).expect("printed generators are invertible")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u32, k: u32) -> Modulus {
        Modulus::new(p, k).unwrap()
    }

    #[test]
    fn named_orders_match_closed_forms() {
        for p in [3, 5] {
            for k in [1, 2] {
                for id in [
                    FamilyId::Z,
                    FamilyId::Cs,
                    FamilyId::Cns,
                    FamilyId::B,
                    FamilyId::NCs,
                    FamilyId::NCns,
                    FamilyId::SL2,
                ] {
                    let g = named(id, m(p, k)).unwrap();
                    assert_eq!(
                        Some(g.order()),
                        named_order(id, m(p, k)),
                        "{id} mod {p}^{k}"
                    );
                }
            }
        }
        assert_eq!(named(FamilyId::Cs, m(3, 2)).unwrap().order(), 36);
        assert_eq!(named(FamilyId::B, m(3, 1)).unwrap().order(), 12);
        assert!(named(FamilyId::T, m(3, 1)).is_err());
        assert!(matches!(
            named(FamilyId::CartanPair, m(3, 2)),
            Err(Error::BadParameter(_))
        ));
    }

    #[test]
    fn names_round_trip() {
        for name in FamilyId::all_names() {
            let id: FamilyId = name.parse().unwrap();
            assert_eq!(id.to_string(), name);
        }
        assert!("ker2.h7".parse::<FamilyId>().is_err());
        assert!("nope".parse::<FamilyId>().is_err());
    }

    #[test]
    fn kernel_examples() {
        let h2 = kernel_family(FamilyId::T2(2), &Params::none(), 3).unwrap();
        assert_eq!(h2.order(), 9);
        let r = m(5, 2);
        let h4 = kernel_family(FamilyId::Ker3(4), &Params::none().with_c(0), 5).unwrap();
        assert!(h4.contains(&Mat2::new(r, 1, 10, 5, 1)));
        let bad = kernel_family(FamilyId::Ker2(3), &Params::none().with_d(-1), 5);
        assert!(matches!(bad, Err(Error::BadParameter(_))));
        let bad = kernel_family(FamilyId::Ker3(3), &Params::none().with_c(3), 5);
        assert!(matches!(bad, Err(Error::BadParameter(_))));
        let missing = kernel_family(FamilyId::Ker01(4), &Params::none(), 5);
        assert!(matches!(missing, Err(Error::BadParameter(_))));
    }

    #[test]
    fn catalogue_sizes() {
        // 4 + p + (p-1)/2 cyclic, 3 in T, 3 + (p-1) + p + p² outside T,
        // 2 + 2·(p+1)/2 in dimension 3, then T and ker φ.
        for p in [3u32, 5] {
            let half = (p - 1) / 2;
            let expected = 4 + p + half + 3 + 3 + (p - 1) + p + p * p + 2 + 2 * (half + 1) + 2;
            assert_eq!(kernel_catalogue(p).unwrap().len(), expected as usize);
        }
    }

    #[test]
    fn swap_and_pairs() {
        let f = m(5, 1);
        let d = Subgroup::closure(f, &[Mat2::diag(f, 1, 2)]).unwrap();
        let s = diagonal_swap(&d).unwrap();
        assert!(s.contains(&Mat2::diag(f, 2, 1)));
        assert_eq!(diagonal_swap(&s).unwrap(), d);
        let (h1, h2) = glp_pair(&d).unwrap();
        assert_eq!((h1.order(), h2.order()), (20, 20));
        let z = Subgroup::closure(f, &[Mat2::diag(f, 2, 2)]).unwrap();
        assert_eq!(glp_pair(&z).unwrap_err(), Error::DegeneratePair);
        let f7 = m(7, 1);
        let d7 = Subgroup::closure(f7, &[Mat2::diag(f7, 1, 3)]).unwrap();
        assert!(glp_pair(&d7).is_ok());
        let r = m(5, 2);
        let scalar = Subgroup::closure(r, &[PPart(Mat2::diag(f, 1, 1)).embed()]).unwrap();
        assert_eq!(cartan_pair(&scalar).unwrap_err(), Error::DegeneratePair);
        assert!(diagonal_swap(&named(FamilyId::B, f).unwrap()).is_err());
    }

    #[test]
    fn borel_pair_constraints() {
        let r = m(5, 2);
        let d = Subgroup::closure(r, &[PPart(Mat2::diag(r.base(), 1, 2)).embed()]).unwrap();
        let a = r.base().residue(0);
        let (h1, h2) = borel_pair(TauKind::Plain, a, KernelKind::Identity, &d).unwrap();
        assert_eq!(h1.order(), h2.order());
        assert!(borel_pair(TauKind::Lower1, a, KernelKind::Identity, &d).is_ok());
        let z = Subgroup::closure(r, &[Mat2::scalar(r, 2)]).unwrap();
        assert_eq!(
            borel_pair(TauKind::Plain, a, KernelKind::Lower, &z).unwrap_err(),
            Error::DegeneratePair
        );
        let r3 = m(3, 2);
        let d3 = Subgroup::closure(r3, &[Mat2::diag(r3, 2, 1)]).unwrap();
        assert!(matches!(
            borel_pair(
                TauKind::Plain,
                r3.base().residue(0),
                KernelKind::Identity,
                &d3
            ),
            Err(Error::BadParameter(_))
        ));
    }

    #[test]
    fn sl2_list_orders() {
        let list = sl2_p3_list();
        assert_eq!(list[1].order(), 648);
        assert_eq!(list[3].order(), 1944);
        let sl2_3 = named(FamilyId::SL2, m(3, 1)).unwrap();
        for h in &list {
            assert_eq!(h.image_mod_p().unwrap(), sl2_3);
        }
    }
}
