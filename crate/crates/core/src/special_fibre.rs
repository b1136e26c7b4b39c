//! Frobenius identities over finite fields: `G_m`, and short Weierstrass
//! elliptic curves with naive point counting.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::finite_field::{poly_powmod, FpPoly, ResidueField};
use crate::galois_poly::{cyclotomic_factor_free, IntPolynomial};

/// Largest field handled by the exhaustive checks.
pub const MAX_FIELD_SIZE: u64 = 10_000;

/// `F_Q = F_p[y]/(g)` with log/exp tables. Elements are coded by the
/// integer whose base-`p` digits are their `y`-coefficients.
#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    degree: u32,
    modulus: FpPoly,
    size: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.degree, self.modulus)
    }
}

impl FiniteField {
    pub fn new(p: u64, degree: u32) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if degree == 0 {
            return Err(Error::Parse("field degree must be positive".into()));
        }
        let size = (p as u128).pow(degree);
        if size > MAX_FIELD_SIZE as u128 {
            return Err(Error::FieldTooLarge(size.min(u64::MAX as u128) as u64));
        }
        let size = size as u32;
        let rf = ResidueField::new(p, degree as u64)?;
        let mut generator = None;
        for code in 2..size.max(3) {
            let a = rf.from_int(&BigUint::from(code));
            if rf.has_order(&a, size as u64 - 1) {
                generator = Some(a);
                break;
            }
        }
        let g = generator.unwrap_or_else(|| vec![1]);
        let mut exp = Vec::with_capacity(size as usize - 1);
        let mut log = vec![0u32; size as usize];
        let mut cur: FpPoly = vec![1];
        for i in 0..size - 1 {
            let code = rf.to_int(&cur).iter_u32_digits().next().unwrap_or(0);
            exp.push(code);
            log[code as usize] = i;
            cur = rf.mul(&cur, &g);
        }
        Ok(FiniteField {
            p: p as u32,
            degree,
            modulus: rf.modulus,
            size,
            exp,
            log,
        })
    }

    /// `F_q` for a prime power `q`.
    pub fn of_order(q: u64) -> Result<Self> {
        let (p, f) = arith::prime_power(q).ok_or(Error::NotPrime(q))?;
        Self::new(p, f)
    }

    /// Parses `"p=5,f=2"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let kv = parse_pairs(spec)?;
        let p = lookup(&kv, "p")?;
        let f = kv.iter().find(|(k, _)| k == "f").map_or(Ok(1), |(_, v)| {
            u32::try_from(*v).map_err(|_| Error::Parse("f out of range".into()))
        })?;
        Self::new(p as u64, f)
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> u64 {
        self.size as u64
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        (0..self.degree)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    fn from_digits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.degree == 1 {
            return (a + b) % self.p;
        }
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.from_digits(&s)
    }

    pub fn neg(&self, a: u32) -> u32 {
        let d: Vec<u32> = self.digits(a).iter().map(|&u| (self.p - u) % self.p).collect();
        self.from_digits(&d)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.size - 1;
        self.exp[((self.log[a as usize] as u64 + self.log[b as usize] as u64) % n as u64) as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| {
            let n = self.size - 1;
            self.exp[((n - self.log[a as usize]) % n) as usize]
        })
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.size - 1) as u64;
        self.exp[((self.log[a as usize] as u64 % n) * (e % n) % n) as usize]
    }

    /// The element for an integer in the prime field.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn is_square(&self, a: u32) -> bool {
        a == 0 || self.p == 2 || self.log[a as usize] % 2 == 0
    }

    pub fn sqrt(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return Some(0);
        }
        if self.p == 2 {
            return Some(self.pow(a, self.size as u64 / 2));
        }
        let l = self.log[a as usize];
        (l % 2 == 0).then(|| self.exp[(l / 2) as usize])
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.size
    }

    /// The `p`-power Frobenius as a matrix over `F_p`, column `i` holding
    /// the digits of `y^{ip}`; computed by polynomial powering, independent
    /// of the log tables.
    pub fn frobenius_matrix(&self) -> Vec<Vec<u32>> {
        let p = self.p as u64;
        let e = BigUint::from(p);
        (0..self.degree as usize)
            .map(|i| {
                let mut yi = vec![0u64; i + 1];
                yi[i] = 1;
                let img = poly_powmod(&yi, &e, &self.modulus, p);
                (0..self.degree as usize)
                    .map(|j| img.get(j).copied().unwrap_or(0) as u32)
                    .collect()
            })
            .collect()
    }

    /// Applies a matrix from [`FiniteField::frobenius_matrix`] `times` times.
    pub fn apply_linear(&self, columns: &[Vec<u32>], a: u32, times: u32) -> u32 {
        let mut d = self.digits(a);
        for _ in 0..times {
            let mut out = vec![0u64; self.degree as usize];
            for (i, &c) in d.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (j, &m) in columns[i].iter().enumerate() {
                    out[j] = (out[j] + c as u64 * m as u64) % self.p as u64;
                }
            }
            d = out.into_iter().map(|x| x as u32).collect();
        }
        self.from_digits(&d)
    }

    /// Embedding of `self` into `big` (`F_q ⊂ F_{q^r}`): the images of all
    /// codes, sending `y` to the smallest root of `self`'s modulus.
    pub fn embedding_into(&self, big: &FiniteField) -> Result<Vec<u32>> {
        if big.p != self.p || big.degree % self.degree != 0 {
            return Err(Error::Invariant(format!("{self:?} does not embed in {big:?}")));
        }
        let root = big
            .elements()
            .find(|&b| {
                self.modulus
                    .iter()
                    .rev()
                    .fold(0, |acc, &c| big.add(big.mul(acc, b), c as u32))
                    == 0
            })
            .ok_or_else(|| Error::Invariant("modulus has no root".into()))?;
        Ok(self
            .elements()
            .map(|a| {
                self.digits(a)
                    .iter()
                    .rev()
                    .fold(0, |acc, &c| big.add(big.mul(acc, root), c))
            })
            .collect())
    }
}

fn parse_pairs(spec: &str) -> Result<Vec<(String, i64)>> {
    spec.split(',')
        .map(|part| {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            let v = v
                .trim()
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("{k}: {e}")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn lookup(kv: &[(String, i64)], key: &str) -> Result<i64> {
    kv.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::Parse(format!("missing {key}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct GmFrobeniusReport {
    pub q: u64,
    pub r: u32,
    pub units: u64,
    pub failures: u64,
}

/// `Frob(x) = [q]x` on `F_{q^r}^*`: the `q`-power Frobenius applied as a
/// linear map against `x^q` from the multiplicative tables.
pub fn gm_frobenius_identity(q: u64, r: u32) -> Result<GmFrobeniusReport> {
    if r == 0 {
        return Err(Error::Parse("r must be positive".into()));
    }
    let (p, f) = arith::prime_power(q).ok_or(Error::NotPrime(q))?;
    let big = FiniteField::new(p, f * r)?;
    let frob = big.frobenius_matrix();
    let mut failures = 0;
    for x in 1..big.size {
        let by_matrix = big.apply_linear(&frob, x, f);
        let by_power = big.pow(x, q);
        let inv = big.inv(by_power).unwrap();
        if by_matrix != by_power || big.mul(by_matrix, inv) != 1 {
            failures += 1;
        }
    }
    Ok(GmFrobeniusReport {
        q,
        r,
        units: big.size() - 1,
        failures,
    })
}

/// `y^2 = x^3 + a4·x + a6` over `F_q`, `p > 3`.
#[derive(Clone, Debug)]
pub struct EllipticCurveFq {
    pub field: FiniteField,
    pub a4: u32,
    pub a6: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EcPoint {
    Infinity,
    Affine(u32, u32),
}

/// The curve's equation over an extension, with the group law there.
#[derive(Clone, Debug)]
pub struct CurveOverExtension {
    pub field: FiniteField,
    pub a4: u32,
    pub a6: u32,
    /// `q`, the size of the field of definition.
    pub q: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointCount {
    pub count: u64,
    pub trace: i64,
    pub weil: IntPolynomial,
}

impl PointCount {
    pub fn hasse_holds(&self, q: u64) -> bool {
        (self.trace as i128).pow(2) <= 4 * q as i128
    }
}

impl EllipticCurveFq {
    pub fn new(field: FiniteField, a4: u32, a6: u32) -> Result<Self> {
        if field.p <= 3 {
            return Err(Error::Parse("short Weierstrass form needs p > 3".into()));
        }
        if a4 >= field.size || a6 >= field.size {
            return Err(Error::Parse("coefficient outside the field".into()));
        }
        let e = EllipticCurveFq { field, a4, a6 };
        if e.discriminant_part() == 0 {
            return Err(Error::SingularCurve);
        }
        Ok(e)
    }

    /// Parses `"a4=1,a6=0"` over the given field (codes as integers).
    pub fn parse(curve: &str, field: FiniteField) -> Result<Self> {
        let kv = parse_pairs(curve)?;
        let code = |k: &str| -> Result<u32> {
            let v = lookup(&kv, k)?;
            if field.degree == 1 {
                Ok(field.from_int(v))
            } else {
                u32::try_from(v).map_err(|_| Error::Parse(format!("{k} must be a field code")))
            }
        };
        let (a4, a6) = (code("a4")?, code("a6")?);
        Self::new(field, a4, a6)
    }

    /// `4a4^3 + 27a6^2`.
    fn discriminant_part(&self) -> u32 {
        let k = &self.field;
        let a4c = k.mul(k.mul(self.a4, self.a4), self.a4);
        let a6s = k.mul(self.a6, self.a6);
        k.add(k.mul(k.from_int(4), a4c), k.mul(k.from_int(27), a6s))
    }

    pub fn q(&self) -> u64 {
        self.field.size()
    }

    /// The same equation over `F_{q^r}`.
    pub fn over_extension(&self, r: u32) -> Result<CurveOverExtension> {
        let big = FiniteField::new(self.field.p as u64, self.field.degree * r)?;
        let emb = self.field.embedding_into(&big)?;
        Ok(CurveOverExtension {
            a4: emb[self.a4 as usize],
            a6: emb[self.a6 as usize],
            field: big,
            q: self.q(),
        })
    }

    /// Naive count of `E(F_q)` with its trace and `F_0 = T^2 − aT + q`.
    pub fn point_count(&self) -> PointCount {
        let count = self.count_over(&self.field, self.a4, self.a6);
        let q = self.q();
        let trace = q as i64 + 1 - count as i64;
        PointCount {
            count,
            trace,
            weil: IntPolynomial::new(vec![BigInt::from(q), BigInt::from(-trace), BigInt::from(1)]),
        }
    }

    fn count_over(&self, k: &FiniteField, a4: u32, a6: u32) -> u64 {
        1 + k
            .elements()
            .map(|x| {
                let rhs = rhs(k, a4, a6, x);
                if rhs == 0 {
                    1
                } else if k.is_square(rhs) {
                    2
                } else {
                    0
                }
            })
            .sum::<u64>()
    }

    /// `#E(F_{q^r}) = q^r + 1 − s_r` with `s_r = a·s_{r−1} − q·s_{r−2}`.
    pub fn count_from_weil(&self, r: u32) -> i128 {
        let (a, q) = (self.point_count().trace as i128, self.q() as i128);
        let (mut prev, mut cur) = (2i128, a);
        for _ in 1..r {
            let next = a * cur - q * prev;
            prev = cur;
            cur = next;
        }
        q.pow(r) + 1 - cur
    }
}

fn rhs(k: &FiniteField, a4: u32, a6: u32, x: u32) -> u32 {
    let x3 = k.mul(k.mul(x, x), x);
    k.add(k.add(x3, k.mul(a4, x)), a6)
}

impl CurveOverExtension {
    pub fn contains(&self, p: &EcPoint) -> bool {
        match *p {
            EcPoint::Infinity => true,
            EcPoint::Affine(x, y) => {
                let k = &self.field;
                x < k.size && y < k.size && k.mul(y, y) == rhs(k, self.a4, self.a6, x)
            }
        }
    }

    pub fn points(&self) -> Vec<EcPoint> {
        let k = &self.field;
        let mut out = vec![EcPoint::Infinity];
        for x in k.elements() {
            if let Some(y) = k.sqrt(rhs(k, self.a4, self.a6, x)) {
                out.push(EcPoint::Affine(x, y));
                if y != 0 {
                    out.push(EcPoint::Affine(x, k.neg(y)));
                }
            }
        }
        out
    }

    pub fn neg(&self, p: EcPoint) -> EcPoint {
        match p {
            EcPoint::Infinity => p,
            EcPoint::Affine(x, y) => EcPoint::Affine(x, self.field.neg(y)),
        }
    }

    pub fn add(&self, p: EcPoint, q: EcPoint) -> EcPoint {
        let k = &self.field;
        let (x1, y1, x2, y2) = match (p, q) {
            (EcPoint::Infinity, _) => return q,
            (_, EcPoint::Infinity) => return p,
            (EcPoint::Affine(a, b), EcPoint::Affine(c, d)) => (a, b, c, d),
        };
        let lambda = if x1 == x2 {
            if k.add(y1, y2) == 0 {
                return EcPoint::Infinity;
            }
            let num = k.add(k.mul(k.from_int(3), k.mul(x1, x1)), self.a4);
            k.mul(num, k.inv(k.add(y1, y1)).unwrap())
        } else {
            k.mul(k.sub(y2, y1), k.inv(k.sub(x2, x1)).unwrap())
        };
        let x3 = k.sub(k.sub(k.mul(lambda, lambda), x1), x2);
        let y3 = k.sub(k.mul(lambda, k.sub(x1, x3)), y1);
        EcPoint::Affine(x3, y3)
    }

    pub fn scalar(&self, n: i64, p: EcPoint) -> EcPoint {
        let mut base = if n < 0 { self.neg(p) } else { p };
        let mut e = n.unsigned_abs();
        let mut acc = EcPoint::Infinity;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            e >>= 1;
        }
        acc
    }

    /// `(x, y) ↦ (x^q, y^q)`.
    pub fn frobenius(&self, p: EcPoint) -> EcPoint {
        match p {
            EcPoint::Infinity => p,
            EcPoint::Affine(x, y) => EcPoint::Affine(self.field.pow(x, self.q), self.field.pow(y, self.q)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnihilationReport {
    pub q: u64,
    pub r: u32,
    pub trace: i64,
    pub points: u64,
    pub predicted_points: i128,
    pub failures: u64,
}

impl AnnihilationReport {
    pub fn holds(&self) -> bool {
        self.failures == 0 && self.points as i128 == self.predicted_points
    }
}

/// `Frob^2(P) − [a]Frob(P) + [q]P = O` for every `P ∈ E(F_{q^r})`.
pub fn ec_frobenius_annihilate(e: &EllipticCurveFq, r: u32) -> Result<AnnihilationReport> {
    let ext = e.over_extension(r)?;
    let a = e.point_count().trace;
    let q = e.q() as i64;
    let pts = ext.points();
    let failures = pts
        .iter()
        .filter(|&&p| {
            let f1 = ext.frobenius(p);
            let f2 = ext.frobenius(f1);
            let s = ext.add(ext.add(f2, ext.scalar(-a, f1)), ext.scalar(q, p));
            s != EcPoint::Infinity
        })
        .count() as u64;
    Ok(AnnihilationReport {
        q: e.q(),
        r,
        trace: a,
        points: pts.len() as u64,
        predicted_points: e.count_from_weil(r),
        failures,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HasseSurvey {
    pub q: u64,
    pub curves: u64,
    pub violations: u64,
    /// Curves whose `F_0` has a cyclotomic factor or `F_0(1) ≠ #E`.
    pub weil_failures: u64,
}

/// Every smooth short Weierstrass curve over `F_q`.
pub fn hasse_survey(q: u64) -> Result<HasseSurvey> {
    let k = FiniteField::of_order(q)?;
    let mut curves = 0;
    let mut violations = 0;
    let mut weil_failures = 0;
    for a4 in k.elements() {
        for a6 in k.elements() {
            let Ok(e) = EllipticCurveFq::new(k.clone(), a4, a6) else {
                continue;
            };
            curves += 1;
            let c = e.point_count();
            if !c.hasse_holds(q) {
                violations += 1;
            }
            if c.weil.eval(&BigInt::from(1)) != BigInt::from(c.count) || !cyclotomic_factor_free(&c.weil) {
                weil_failures += 1;
            }
        }
    }
    Ok(HasseSurvey {
        q,
        curves,
        violations,
        weil_failures,
    })
}

/// Prime powers `q` and exponents `r` with `q^r ≤ bound`.
pub fn field_pairs(bound: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for q in 2..=bound {
        if arith::prime_power(q).is_none() {
            continue;
        }
        let mut r = 1;
        let mut qr = q;
        while qr <= bound {
            out.push((q, r));
            r += 1;
            qr = match qr.checked_mul(q) {
                Some(v) => v,
                None => break,
            };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn curve(a4: i64, a6: i64, q: u64) -> EllipticCurveFq {
        let k = FiniteField::of_order(q).unwrap();
        let (a4, a6) = (k.from_int(a4), k.from_int(a6));
        EllipticCurveFq::new(k, a4, a6).unwrap()
    }

    #[test]
    fn field_tables() {
        let k = FiniteField::new(5, 2).unwrap();
        for a in 1..25 {
            assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
            assert_eq!(k.pow(a, 24), 1);
        }
        assert_eq!(k.modulus(), &[2, 0, 1]);
        assert!(FiniteField::new(101, 2).is_err());
        assert_eq!(FiniteField::parse("p=7,f=2").unwrap().size(), 49);
    }

    #[test]
    fn gm_identity_examples() {
        for (q, r, units) in [(5, 1, 4), (5, 2, 24), (9, 1, 8)] {
            let rep = gm_frobenius_identity(q, r).unwrap();
            assert_eq!((rep.units, rep.failures), (units, 0));
        }
    }

    #[test]
    fn point_count_examples() {
        let e = curve(1, 0, 5);
        let c = e.point_count();
        assert_eq!((c.count, c.trace), (4, 2));
        assert_eq!(c.weil.to_string(), IntPolynomial::from_i64(&[5, -2, 1]).to_string());
        let c = curve(0, 1, 5).point_count();
        assert_eq!((c.count, c.trace), (6, 0));
        assert!(EllipticCurveFq::parse("a4=0,a6=0", FiniteField::of_order(5).unwrap()).is_err());
        assert!(EllipticCurveFq::parse("a4=1,a6=0", FiniteField::of_order(5).unwrap()).is_ok());
    }

    #[test]
    fn annihilation_examples() {
        for (a4, a6, r) in [(1, 0, 1), (1, 0, 2), (1, 0, 3), (0, 1, 2)] {
            let rep = ec_frobenius_annihilate(&curve(a4, a6, 5), r).unwrap();
            assert!(rep.holds(), "{rep:?}");
        }
        let rep = ec_frobenius_annihilate(&curve(1, 0, 5), 3).unwrap();
        assert_eq!(rep.points as i128, rep.predicted_points);
    }

    #[test]
    fn counts_over_extensions_follow_newton_sums() {
        for (a4, a6) in [(1, 0), (2, 3), (0, 1)] {
            let e = curve(a4, a6, 7);
            for r in 1..=3 {
                assert_eq!(e.over_extension(r).unwrap().points().len() as i128, e.count_from_weil(r));
            }
        }
    }

    #[test]
    fn group_law_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ext = curve(2, 3, 7).over_extension(2).unwrap();
        let pts = ext.points();
        for _ in 0..200 {
            let [a, b, c] = [0; 3].map(|_| pts[rng.gen_range(0..pts.len())]);
            assert_eq!(ext.add(ext.add(a, b), c), ext.add(a, ext.add(b, c)));
            assert_eq!(ext.add(a, b), ext.add(b, a));
            assert_eq!(ext.add(a, ext.neg(a)), EcPoint::Infinity);
            assert!(ext.contains(&ext.add(a, b)));
        }
        let n = pts.len() as i64;
        assert!(pts.iter().all(|&p| ext.scalar(n, p) == EcPoint::Infinity));
    }

    #[test]
    fn hasse_small_fields() {
        for q in [5, 7] {
            let s = hasse_survey(q).unwrap();
            assert!(s.curves > 0);
            assert_eq!((s.violations, s.weil_failures), (0, 0));
        }
    }

    #[test]
    fn pairs_enumerate() {
        let pairs = field_pairs(30);
        assert!(pairs.contains(&(5, 2)) && pairs.contains(&(3, 3)) && pairs.contains(&(2, 4)));
        assert!(!pairs.contains(&(6, 1)) && !pairs.contains(&(5, 3)));
    }
}
