//! Closed forms for powers and conjugates of 2×2 matrices mod p², checked
//! against iterated multiplication.
//!
//! The unit entries w, z of the scalar and diagonal power formulas are read
//! in ℤ/p²ℤ through the Teichmüller lift, the multiplicative section on
//! which those formulas hold. The integer lift is tried as well and its
//! failures are counted in the report.

use rand::Rng;
use serde_json::{json, Value};

use super::{Context, VerificationReport};
use crate::error::Result;
use crate::mat2::Mat2;
use crate::residue::Modulus;

const SAMPLES: usize = 1000;
/// Coefficient spaces up to this size are also swept exhaustively.
const EXHAUSTIVE_LIMIT: usize = 300_000;

struct Ring {
    p: i64,
    f: Modulus,
    r: Modulus,
}

impl Ring {
    fn new(p: u32) -> Result<Ring> {
        let f = Modulus::new(p, 1)?;
        Ok(Ring {
            p: p as i64,
            f,
            r: f.square(),
        })
    }

    fn inv_p(&self, w: i64) -> i64 {
        self.f.residue(w).inv().expect("unit").value() as i64
    }

    fn teich(&self, w: i64) -> i64 {
        self.f.residue(w).teichmuller_lift().expect("unit").value() as i64
    }

    fn pow_p(&self, w: i64, n: u64) -> i64 {
        self.f.residue(w).pow(n).value() as i64
    }

    /// `x + y·p` for y given mod p.
    fn plus_p(&self, x: Mat2, y: [i64; 4]) -> Mat2 {
        let p = self.p;
        x.add(&Mat2::new(self.r, y[0] * p, y[1] * p, y[2] * p, y[3] * p))
    }
}

fn mismatch(identity: &str, input: Value, got: Mat2, expected: Mat2) -> Option<Value> {
    (got != expected)
        .then(|| json!({ "identity": identity, "input": input, "got": got, "expected": expected }))
}

fn first<T>(
    cases: impl Iterator<Item = T>,
    check: impl Fn(T) -> Option<Value>,
) -> (usize, Option<Value>) {
    let mut n = 0;
    for c in cases {
        n += 1;
        if let Some(w) = check(c) {
            return (n, Some(w));
        }
    }
    (n, None)
}

/// `(wI + Ap)^n` for w read through `lift`.
fn scalar_power(ring: &Ring, w: i64, a: [i64; 4], lift: impl Fn(i64) -> i64) -> Option<Value> {
    let p = ring.p;
    let big_w = lift(w);
    let g = ring.plus_p(Mat2::scalar(ring.r, big_w), a);
    let input = json!({ "w": w, "A": a });
    let winv = ring.inv_p(w);
    let drop: [i64; 4] = a.map(|x| -winv * x);
    let id = Mat2::identity(ring.r);
    let checks = [
        (p - 1, ring.plus_p(id, drop)),
        (p, Mat2::scalar(ring.r, big_w)),
        (p * p - 1, ring.plus_p(id, drop)),
        (p * p, Mat2::scalar(ring.r, big_w)),
    ];
    for (n, expected) in checks {
        if let Some(v) = mismatch(
            "scalar-power",
            json!({ "n": n, "at": input }),
            g.pow_u(n as u64),
            expected,
        ) {
            return Some(v);
        }
    }
    // (wI + Ap)^n = w^n I + n w^(n-1) A p, against a running product.
    let mut running = id;
    for n in 0..p * p {
        let coeff = if n == 0 {
            0
        } else {
            n * ring.pow_p(w, (n - 1) as u64)
        };
        let expected = ring.plus_p(
            Mat2::scalar(ring.r, big_w).pow_u(n as u64),
            a.map(|x| coeff * x),
        );
        if let Some(v) = mismatch(
            "scalar-power-general",
            json!({ "n": n, "at": input }),
            running,
            expected,
        ) {
            return Some(v);
        }
        running = running * g;
    }
    None
}

fn diag_power(ring: &Ring, w: i64, z: i64, a: [i64; 4]) -> Option<Value> {
    let p = ring.p;
    let (bw, bz) = (ring.teich(w), ring.teich(z));
    let d = Mat2::diag(ring.r, bw, bz);
    let g = ring.plus_p(d, a);
    let input = json!({ "w": w, "z": z, "A": a });
    let id = Mat2::identity(ring.r);
    let low = ring.plus_p(id, [-a[0] * ring.inv_p(w), 0, 0, -a[3] * ring.inv_p(z)]);
    let high = ring.plus_p(d, [0, a[1], a[2], 0]);
    for (n, expected) in [(p - 1, low), (p, high), (p * p - 1, low), (p * p, high)] {
        if let Some(v) = mismatch(
            "diag-power",
            json!({ "n": n, "at": input }),
            g.pow_u(n as u64),
            expected,
        ) {
            return Some(v);
        }
    }
    let mut running = id;
    for n in 0..p * p {
        let (dn, s) = if n == 0 {
            (0, 0)
        } else {
            let s: i64 = (0..n)
                .map(|k| ring.pow_p(w, k as u64) * ring.pow_p(z, (n - 1 - k) as u64))
                .sum();
            (n, s)
        };
        let part = [
            dn * a[0]
                * if n == 0 {
                    0
                } else {
                    ring.pow_p(w, (n - 1) as u64)
                },
            a[1] * s,
            a[2] * s,
            dn * a[3]
                * if n == 0 {
                    0
                } else {
                    ring.pow_p(z, (n - 1) as u64)
                },
        ];
        let expected = ring.plus_p(d.pow_u(n as u64), part);
        if let Some(v) = mismatch(
            "diag-power-general",
            json!({ "n": n, "at": input }),
            running,
            expected,
        ) {
            return Some(v);
        }
        running = running * g;
    }
    None
}

fn unipotent_power(ring: &Ring, a: [i64; 4]) -> Option<Value> {
    let p = ring.p;
    let t = Mat2::new(ring.r, 1, 1, 0, 1);
    let g = ring.plus_p(t, a);
    let [a0, b0, c0, d0] = a;
    for n in -p * p..=p * p {
        let tri = (n - 1) * n / 2;
        let squares = (n - 1) * n * (2 * n - 1) / 6;
        let part = [
            a0 * n + c0 * tri,
            (a0 + d0 + c0 * (n - 1)) * tri - c0 * squares + b0 * n,
            c0 * n,
            d0 * n + c0 * tri,
        ];
        let expected = ring.plus_p(Mat2::new(ring.r, 1, n, 0, 1), part);
        let got = g.pow(n).expect("unipotent lift is invertible");
        if let Some(v) = mismatch("unipotent-power", json!({ "n": n, "A": a }), got, expected) {
            return Some(v);
        }
    }
    None
}

fn diag_conj(modulus: Modulus, w: i64, z: i64, m: [i64; 4]) -> Option<Value> {
    let inv = |x: i64| modulus.residue(x).inv().expect("unit").value() as i64;
    let d = Mat2::diag(modulus, w, z);
    let a = Mat2::new(modulus, m[0], m[1], m[2], m[3]);
    let got = d.conj(&a).expect("invertible");
    let expected = Mat2::new(modulus, m[0], m[1] * w * inv(z), m[2] * z * inv(w), m[3]);
    mismatch(
        "diag-conj",
        json!({ "w": w, "z": z, "M": a, "m": modulus.m() }),
        got,
        expected,
    )
}

fn skew_conj(modulus: Modulus, x: i64, y: i64, m: [i64; 4]) -> Option<Value> {
    let inv = |v: i64| modulus.residue(v).inv().expect("unit").value() as i64;
    let s = Mat2::antidiag(modulus, x, y);
    let a = Mat2::new(modulus, m[0], m[1], m[2], m[3]);
    let got = s.conj(&a).expect("invertible");
    let expected = Mat2::new(modulus, m[3], m[2] * x * inv(y), m[1] * y * inv(x), m[0]);
    mismatch(
        "antidiag-conj",
        json!({ "x": x, "y": y, "M": a, "m": modulus.m() }),
        got,
        expected,
    )
}

fn unipotent_conj(modulus: Modulus, m: [i64; 4]) -> Option<Value> {
    let t = Mat2::new(modulus, 1, 1, 0, 1);
    let a = Mat2::new(modulus, m[0], m[1], m[2], m[3]);
    let [a0, b0, c0, d0] = m;
    let expected = Mat2::new(modulus, a0 + c0, -a0 + b0 - c0 + d0, c0, -c0 + d0);
    mismatch(
        "unipotent-conj",
        json!({ "M": a, "m": modulus.m() }),
        t.conj(&a).expect("invertible"),
        expected,
    )
}

fn quads(q: i64) -> impl Iterator<Item = [i64; 4]> + Clone {
    (0..q.pow(4)).map(move |i| [i % q, i / q % q, i / (q * q) % q, i / (q * q * q)])
}

/// Power and conjugation closed forms at the prime `ctx.p`.
pub fn verify_formulas(ctx: &Context) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("formulas", ctx.p);
    report.seed = Some(ctx.seed);
    let ring = Ring::new(ctx.p)?;
    let p = ring.p;
    let mut rng = ctx.rng();
    let unit_p = |rng: &mut rand_chacha::ChaCha8Rng| rng.gen_range(1..p);
    let quad_p = |rng: &mut rand_chacha::ChaCha8Rng| [0; 4].map(|_| rng.gen_range(0..p));
    let quad_m = |rng: &mut rand_chacha::ChaCha8Rng| [0; 4].map(|_| rng.gen_range(0..p * p));
    let unit_m = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let v = rng.gen_range(1..p * p);
        if v % p != 0 {
            break v;
        }
    };
    let exhaustive_p = (p - 1).pow(2) as usize * p.pow(4) as usize <= EXHAUSTIVE_LIMIT;
    let mut totals = serde_json::Map::new();
    let mut record =
        |report: &mut VerificationReport, name: &str, (n, w): (usize, Option<Value>)| {
            totals.insert(name.to_string(), json!(n));
            if let Some(w) = w {
                report.refute(w);
            }
        };

    // Power formulas: random coefficients, then the full space when small.
    let scalar_samples: Vec<(i64, [i64; 4])> = (0..SAMPLES)
        .map(|_| (unit_p(&mut rng), quad_p(&mut rng)))
        .collect();
    record(
        &mut report,
        "scalar-power",
        first(scalar_samples.iter(), |&(w, a)| {
            scalar_power(&ring, w, a, |w| ring.teich(w))
        }),
    );
    let diag_samples: Vec<(i64, i64, [i64; 4])> = (0..SAMPLES)
        .map(|_| loop {
            let (w, z) = (unit_p(&mut rng), unit_p(&mut rng));
            if w != z {
                break (w, z, quad_p(&mut rng));
            }
        })
        .collect();
    record(
        &mut report,
        "diag-power",
        first(diag_samples.iter(), |&(w, z, a)| diag_power(&ring, w, z, a)),
    );
    let t_samples: Vec<[i64; 4]> = (0..SAMPLES).map(|_| quad_p(&mut rng)).collect();
    record(
        &mut report,
        "unipotent-power",
        first(t_samples.iter(), |&a| unipotent_power(&ring, a)),
    );
    if exhaustive_p {
        let units: Vec<i64> = (1..p).collect();
        let all_scalar = units.iter().flat_map(|&w| quads(p).map(move |a| (w, a)));
        record(
            &mut report,
            "scalar-power-exhaustive",
            first(all_scalar, |(w, a)| {
                scalar_power(&ring, w, a, |w| ring.teich(w))
            }),
        );
        let all_diag = units
            .iter()
            .flat_map(|&w| units.iter().filter(move |&&z| z != w).map(move |&z| (w, z)))
            .flat_map(|(w, z)| quads(p).map(move |a| (w, z, a)));
        record(
            &mut report,
            "diag-power-exhaustive",
            first(all_diag, |(w, z, a)| diag_power(&ring, w, z, a)),
        );
        record(
            &mut report,
            "unipotent-power-exhaustive",
            first(quads(p), |a| unipotent_power(&ring, a)),
        );
    }

    // Conjugation formulas hold over any ring; check mod p and mod p².
    for modulus in [ring.f, ring.r] {
        let q = modulus.m() as i64;
        let tag = format!("mod-{q}");
        let samples: Vec<(i64, i64, [i64; 4])> = (0..SAMPLES)
            .map(|_| {
                if q == p {
                    (unit_p(&mut rng), unit_p(&mut rng), quad_p(&mut rng))
                } else {
                    (unit_m(&mut rng), unit_m(&mut rng), quad_m(&mut rng))
                }
            })
            .collect();
        record(
            &mut report,
            &format!("diag-conj-{tag}"),
            first(samples.iter(), |&(w, z, m)| diag_conj(modulus, w, z, m)),
        );
        record(
            &mut report,
            &format!("antidiag-conj-{tag}"),
            first(samples.iter(), |&(x, y, m)| skew_conj(modulus, x, y, m)),
        );
        record(
            &mut report,
            &format!("swap-conj-{tag}"),
            first(samples.iter(), |&(_, _, m)| skew_conj(modulus, 1, 1, m)),
        );
        record(
            &mut report,
            &format!("unipotent-conj-{tag}"),
            first(samples.iter(), |&(_, _, m)| unipotent_conj(modulus, m)),
        );
        if (q.pow(4) as usize) <= EXHAUSTIVE_LIMIT / 4 {
            record(
                &mut report,
                &format!("unipotent-conj-{tag}-exhaustive"),
                first(quads(q), |m| unipotent_conj(modulus, m)),
            );
        }
    }

    // The same scalar identities through the integer lift, for contrast.
    let integer_failures = scalar_samples
        .iter()
        .filter(|&&(w, a)| scalar_power(&ring, w, a, |w| w).is_some())
        .count();
    report.stat("cases", Value::Object(totals));
    report.stat("integer_lift_scalar_failures", integer_failures);
    report.stat("samples_per_identity", SAMPLES);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teichmuller_is_needed_for_scalar_powers() {
        let ring = Ring::new(3).unwrap();
        // 2^3 = 8 ≠ 2 mod 9, so the integer lift breaks (wI)^p = wI.
        assert!(scalar_power(&ring, 2, [0, 0, 0, 0], |w| w).is_some());
        assert!(scalar_power(&ring, 2, [1, 2, 0, 1], |w| ring.teich(w)).is_none());
    }

    #[test]
    fn unipotent_power_closed_form() {
        let ring = Ring::new(5).unwrap();
        assert!(unipotent_power(&ring, [1, 2, 3, 4]).is_none());
        assert!(unipotent_power(&ring, [0, 0, 1, 0]).is_none());
    }
}
