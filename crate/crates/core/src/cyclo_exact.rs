//! Roots of unity as elements of `Q/Z`, exact cyclotomic integers, and the
//! cyclotomic Galois action split into its Frobenius and ramified parts.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::galois_poly::IntPolynomial;

/// `c/m ∈ Q/Z`, standing for `ζ_m^c`. Always reduced with `0 ≤ c < m`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycSymbol {
    num: u64,
    den: u64,
}

impl CycSymbol {
    pub const ZERO: CycSymbol = CycSymbol { num: 0, den: 1 };

    /// Reduces `num/den` modulo 1. Panics on `den == 0`.
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let c = num.rem_euclid(den as i64) as u64;
        let g = c.gcd(&den);
        CycSymbol {
            num: c / g,
            den: den / g,
        }
    }

    pub fn from_u64(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        Self::new((num % den) as i64, den)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Order of `ζ^s` in the group of roots of unity.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `k·s`
    pub fn times(&self, k: i64) -> Self {
        let k = k.rem_euclid(self.den as i64) as u128;
        Self::from_u64((k * self.num as u128 % self.den as u128) as u64, self.den)
    }

    /// Numerator after rewriting over `level`; requires `den | level`.
    pub fn exponent_at(&self, level: u64) -> Result<u64> {
        if level % self.den != 0 {
            return Err(Error::LevelMismatch {
                den: self.den,
                level,
            });
        }
        Ok(self.num * (level / self.den))
    }
}

impl Add for CycSymbol {
    type Output = CycSymbol;
    fn add(self, rhs: CycSymbol) -> CycSymbol {
        let l = self.den.lcm(&rhs.den);
        let a = self.num * (l / self.den) + rhs.num * (l / rhs.den);
        CycSymbol::from_u64(a % l, l)
    }
}

impl Neg for CycSymbol {
    type Output = CycSymbol;
    fn neg(self) -> CycSymbol {
        CycSymbol::from_u64((self.den - self.num) % self.den, self.den)
    }
}

impl Sub for CycSymbol {
    type Output = CycSymbol;
    fn sub(self, rhs: CycSymbol) -> CycSymbol {
        self + (-rhs)
    }
}

impl fmt::Display for CycSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for CycSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for CycSymbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad root-of-unity symbol {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: u64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(CycSymbol::new(n, d))
            }
            None => {
                let n: i64 = s.parse().map_err(|_| bad())?;
                Ok(CycSymbol::new(n, 1))
            }
        }
    }
}

impl Serialize for CycSymbol {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CycSymbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A torsion point of `G_m^n`, one symbol per coordinate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPoint {
    coords: Vec<CycSymbol>,
}

impl TorusPoint {
    pub fn new(coords: Vec<CycSymbol>) -> Self {
        assert!(!coords.is_empty(), "torus points need at least one coordinate");
        TorusPoint { coords }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![CycSymbol::ZERO; n])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[CycSymbol] {
        &self.coords
    }

    pub fn order(&self) -> u64 {
        self.coords.iter().fold(1, |acc, s| acc.lcm(&s.den))
    }

    pub fn times(&self, k: i64) -> Self {
        Self::new(self.coords.iter().map(|s| s.times(k)).collect())
    }

    /// `⟨λ, P⟩ ∈ Q/Z`, i.e. the exponent of the monomial `x^λ` at `P`.
    pub fn pair(&self, exps: &[i64]) -> CycSymbol {
        assert_eq!(exps.len(), self.dim(), "exponent vector length");
        self.coords
            .iter()
            .zip(exps)
            .fold(CycSymbol::ZERO, |acc, (s, &e)| acc + s.times(e))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<CycSymbol>>>()?;
        if coords.is_empty() {
            return Err(Error::Parse("empty point".into()));
        }
        Ok(Self::new(coords))
    }
}

impl Add for &TorusPoint {
    type Output = TorusPoint;
    fn add(self, rhs: &TorusPoint) -> TorusPoint {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        TorusPoint::new(
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| *a + *b)
                .collect(),
        )
    }
}

impl Sub for &TorusPoint {
    type Output = TorusPoint;
    fn sub(self, rhs: &TorusPoint) -> TorusPoint {
        self + &(-rhs)
    }
}

impl Neg for &TorusPoint {
    type Output = TorusPoint;
    fn neg(self) -> TorusPoint {
        TorusPoint::new(self.coords.iter().map(|a| -*a).collect())
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for TorusPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TorusPoint::parse(s)
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TorusPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `Φ_m` together with `T^c mod Φ_m` for `0 ≤ c < m`.
#[derive(Debug)]
pub struct CycLevel {
    pub m: u64,
    pub phi: IntPolynomial,
    powers: Vec<Vec<BigInt>>,
}

impl CycLevel {
    fn build(m: u64) -> Self {
        let phi = cyclotomic_polynomial(m);
        let d = phi.degree().unwrap();
        let mut powers = Vec::with_capacity(m as usize);
        let mut cur = vec![BigInt::zero(); d];
        if d > 0 {
            cur[0] = BigInt::one();
        }
        for _ in 0..m {
            powers.push(cur.clone());
            // multiply by T, then subtract lead·Φ_m
            let top = cur.pop().unwrap_or_default();
            cur.insert(0, BigInt::zero());
            if !top.is_zero() {
                for (i, c) in phi.coeffs()[..d].iter().enumerate() {
                    cur[i] -= &top * c;
                }
            }
        }
        CycLevel { m, phi, powers }
    }

    pub fn degree(&self) -> usize {
        self.powers.first().map_or(0, Vec::len)
    }

    /// `T^c mod Φ_m` for any `c ≥ 0`.
    pub fn power(&self, c: u64) -> &[BigInt] {
        &self.powers[(c % self.m) as usize]
    }
}

/// Shared, lazily built table for level `m`.
pub fn cyc_level(m: u64) -> Arc<CycLevel> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CycLevel>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(l) = cache.lock().unwrap().get(&m) {
        return l.clone();
    }
    let built = Arc::new(CycLevel::build(m));
    cache.lock().unwrap().entry(m).or_insert(built).clone()
}

/// `Φ_m`, by dividing `T^m − 1` by `Φ_d` for the proper divisors `d`.
pub fn cyclotomic_polynomial(m: u64) -> IntPolynomial {
    assert!(m > 0, "cyclotomic polynomial of level 0");
    let mut acc = IntPolynomial::t_pow_minus_one(m as usize);
    for d in arith::divisors(m) {
        if d < m {
            let (q, r) = acc
                .div_rem(&cyclotomic_polynomial(d))
                .expect("cyclotomic polynomials are monic");
            debug_assert!(r.is_zero());
            acc = q;
        }
    }
    acc
}

/// Element of `Z[ζ_m]` in the power basis `1, ζ, …, ζ^{φ(m)−1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    level: u64,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(level: u64) -> Self {
        let d = cyc_level(level).degree();
        CycInt {
            level,
            coeffs: vec![BigInt::zero(); d],
        }
    }

    pub fn one(level: u64) -> Self {
        Self::from_integer(BigInt::one(), level)
    }

    pub fn from_integer(n: BigInt, level: u64) -> Self {
        let mut z = Self::zero(level);
        z.coeffs[0] = n;
        z
    }

    /// Reduces an arbitrary coefficient list in `ζ_m` modulo `Φ_m`.
    pub fn from_power_coeffs(level: u64, coeffs: &[BigInt]) -> Self {
        let table = cyc_level(level);
        let mut out = vec![BigInt::zero(); table.degree()];
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, t) in out.iter_mut().zip(table.power(i as u64)) {
                if !t.is_zero() {
                    *o += c * t;
                }
            }
        }
        CycInt { level, coeffs: out }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Rewrites in `Z[ζ_level]`; requires `self.level | level`.
    pub fn lift(&self, level: u64) -> Result<CycInt> {
        if level % self.level != 0 {
            return Err(Error::LevelMismatch {
                den: self.level,
                level,
            });
        }
        if level == self.level {
            return Ok(self.clone());
        }
        let step = level / self.level;
        let table = cyc_level(level);
        let mut out = vec![BigInt::zero(); table.degree()];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, t) in out.iter_mut().zip(table.power(i as u64 * step)) {
                if !t.is_zero() {
                    *o += c * t;
                }
            }
        }
        Ok(CycInt { level, coeffs: out })
    }

    fn common(&self, other: &CycInt) -> (CycInt, CycInt) {
        let l = self.level.lcm(&other.level);
        (self.lift(l).unwrap(), other.lift(l).unwrap())
    }

    /// Adds `scale · ζ^s` in place; requires `den(s) | level`.
    pub fn add_root(&mut self, s: CycSymbol, scale: &BigInt) -> Result<()> {
        let c = s.exponent_at(self.level)?;
        let table = cyc_level(self.level);
        for (o, t) in self.coeffs.iter_mut().zip(table.power(c)) {
            if !t.is_zero() {
                *o += scale * t;
            }
        }
        Ok(())
    }

    pub fn scale(&self, k: &BigInt) -> CycInt {
        CycInt {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }
}

/// Image of `ζ^s` in `Z[ζ_level]`.
pub fn cyc_embed(s: CycSymbol, level: u64) -> Result<CycInt> {
    let mut z = CycInt::zero(level);
    z.add_root(s, &BigInt::one())?;
    Ok(z)
}

pub fn cyc_is_zero(z: &CycInt) -> bool {
    z.is_zero()
}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        let (a, b) = self.common(rhs);
        CycInt {
            level: a.level,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self + &(-rhs)
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        let (a, b) = self.common(rhs);
        let n = a.coeffs.len();
        let mut prod = vec![BigInt::zero(); (2 * n).saturating_sub(1)];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        CycInt::from_power_coeffs(a.level, &prod)
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycInt[{}](", self.level)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Element of `Gal(Q(ζ_m)/Q)` for `m = p^k·m'`, written as the pair
/// (power of Frobenius on the tame part, unit acting on the `p`-part).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaloisElement {
    pub p: u64,
    pub m_prime: u64,
    pub k: u32,
    /// Multiplicative order of `p` modulo `m'`.
    pub f: u64,
    pub frob_exp: u64,
    pub ram_exp: u64,
}

impl GaloisElement {
    pub fn new(p: u64, level: u64, frob_exp: u64, ram_exp: u64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let (k, m_prime) = arith::split_prime(level, p);
        let f = arith::multiplicative_order(p % m_prime, m_prime).unwrap_or(1);
        let pk = p.pow(k);
        let ram_exp = ram_exp % pk;
        if ram_exp.gcd(&pk) != 1 {
            return Err(Error::NotAUnit);
        }
        Ok(GaloisElement {
            p,
            m_prime,
            k,
            f,
            frob_exp: frob_exp % f,
            ram_exp,
        })
    }

    pub fn identity(p: u64, level: u64) -> Result<Self> {
        Self::new(p, level, 0, 1)
    }

    /// The chosen Frobenius lift: `j = 1`, `b = 1`.
    pub fn tau(p: u64, level: u64) -> Result<Self> {
        Self::new(p, level, 1, 1)
    }

    pub fn level(&self) -> u64 {
        self.p.pow(self.k) * self.m_prime
    }

    pub fn compose(&self, other: &GaloisElement) -> Result<GaloisElement> {
        if self.level() != other.level() || self.p != other.p {
            return Err(Error::LevelMismatch {
                den: other.level(),
                level: self.level(),
            });
        }
        let pk = self.p.pow(self.k);
        Ok(GaloisElement {
            frob_exp: (self.frob_exp + other.frob_exp) % self.f,
            ram_exp: (self.ram_exp as u128 * other.ram_exp as u128 % pk as u128) as u64,
            ..*self
        })
    }

    /// The unit `u mod m` with `u ≡ p^j (mod m')`, `u ≡ b (mod p^k)`.
    pub fn unit(&self) -> u64 {
        let pk = self.p.pow(self.k);
        let tame = arith::mod_pow(self.p, self.frob_exp, self.m_prime);
        crt_pair(self.ram_exp % pk, pk, tame, self.m_prime)
    }

    pub fn act_symbol(&self, s: CycSymbol) -> Result<CycSymbol> {
        let level = self.level();
        let c = s.exponent_at(level)?;
        let u = self.unit();
        Ok(CycSymbol::from_u64(
            (c as u128 * u as u128 % level as u128) as u64,
            level,
        ))
    }
}

/// `x mod a·b` with `x ≡ r (mod a)`, `x ≡ s (mod b)`, `gcd(a, b) = 1`.
fn crt_pair(r: u64, a: u64, s: u64, b: u64) -> u64 {
    let m = a as u128 * b as u128;
    if a == 1 {
        return s % b;
    }
    if b == 1 {
        return r % a;
    }
    let inv = arith::mod_inverse(a % b, b).expect("coprime moduli") as u128;
    // x = r + a·((s − r)·a^{-1} mod b)
    let diff = (s as i128 - r as i128).rem_euclid(b as i128) as u128;
    let t = diff * inv % b as u128;
    ((r as u128 + a as u128 * t) % m) as u64
}

pub fn galois_act(g: &GaloisElement, p: &TorusPoint) -> Result<TorusPoint> {
    Ok(TorusPoint::new(
        p.coords()
            .iter()
            .map(|&s| g.act_symbol(s))
            .collect::<Result<_>>()?,
    ))
}

/// Splits one coordinate into its `p`-primary and prime-to-`p` parts.
pub fn symbol_split(s: CycSymbol, p: u64) -> (CycSymbol, CycSymbol) {
    let (k, m_prime) = arith::split_prime(s.den(), p);
    let pk = p.pow(k);
    let c = s.num();
    let x = if pk == 1 {
        0
    } else {
        (c % pk) as u128 * arith::mod_inverse(m_prime % pk, pk).unwrap() as u128 % pk as u128
    };
    let y = if m_prime == 1 {
        0
    } else {
        (c % m_prime) as u128 * arith::mod_inverse(pk % m_prime, m_prime).unwrap() as u128
            % m_prime as u128
    };
    (
        CycSymbol::from_u64(x as u64, pk),
        CycSymbol::from_u64(y as u64, m_prime),
    )
}

/// `P = x + y` with `x` of `p`-power order and `y` of order prime to `p`.
pub fn torsion_split(point: &TorusPoint, p: u64) -> (TorusPoint, TorusPoint) {
    let (xs, ys): (Vec<_>, Vec<_>) = point.coords().iter().map(|&s| symbol_split(s, p)).unzip();
    (TorusPoint::new(xs), TorusPoint::new(ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym(s: &str) -> CycSymbol {
        s.parse().unwrap()
    }

    #[test]
    fn symbols_reduce() {
        assert_eq!(sym("7/6"), sym("1/6"));
        assert_eq!(sym("3/6"), sym("1/2"));
        assert_eq!(sym("-1/3"), sym("2/3"));
        assert_eq!(sym("0/5"), CycSymbol::ZERO);
        assert_eq!(sym("5/12").to_string(), "5/12");
        assert_eq!(sym("1/4") + sym("3/4"), CycSymbol::ZERO);
        assert!("1/0".parse::<CycSymbol>().is_err());
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), IntPolynomial::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(6), IntPolynomial::from_i64(&[1, -1, 1]));
        assert_eq!(
            cyclotomic_polynomial(12),
            IntPolynomial::from_i64(&[1, 0, -1, 0, 1])
        );
        assert_eq!(cyclotomic_polynomial(105).coeffs()[7], BigInt::from(-2));
    }

    #[test]
    fn embeddings_at_level_six() {
        assert_eq!(cyc_embed(CycSymbol::ZERO, 6).unwrap(), CycInt::one(6));
        let z = cyc_embed(sym("1/6"), 6).unwrap();
        assert_eq!(z.coeffs(), &[BigInt::zero(), BigInt::one()]);
        let minus_one = cyc_embed(sym("1/2"), 6).unwrap();
        assert_eq!(minus_one, CycInt::from_integer(BigInt::from(-1), 6));
        assert!(cyc_embed(sym("1/4"), 6).is_err());
    }

    #[test]
    fn zero_tests() {
        let mut z = CycInt::from_integer(BigInt::from(-1), 6);
        z.add_root(sym("1/6"), &BigInt::one()).unwrap();
        z.add_root(sym("5/6"), &BigInt::one()).unwrap();
        assert!(cyc_is_zero(&z));
        let w = &cyc_embed(sym("1/5"), 5).unwrap() - &CycInt::one(5);
        assert!(!cyc_is_zero(&w));
        assert!(cyc_is_zero(&CycInt::zero(9)));
    }

    #[test]
    fn mixed_levels_lift_to_lcm() {
        let a = cyc_embed(sym("1/4"), 4).unwrap();
        let b = cyc_embed(sym("1/6"), 6).unwrap();
        let prod = &a * &b;
        assert_eq!(prod.level(), 12);
        assert_eq!(prod, cyc_embed(sym("5/12"), 12).unwrap());
    }

    #[test]
    fn galois_examples() {
        let pt = TorusPoint::parse("1/6").unwrap();
        let tau7 = GaloisElement::tau(7, 6).unwrap();
        assert_eq!(galois_act(&tau7, &pt).unwrap(), pt);
        let tau5 = GaloisElement::tau(5, 6).unwrap();
        assert_eq!(galois_act(&tau5, &pt).unwrap().to_string(), "5/6");
        let g = GaloisElement::new(3, 9, 0, 2).unwrap();
        let q = TorusPoint::parse("1/9").unwrap();
        assert_eq!(galois_act(&g, &q).unwrap().to_string(), "2/9");
        assert!(galois_act(&tau5, &TorusPoint::parse("1/4").unwrap()).is_err());
    }

    #[test]
    fn split_examples() {
        let (x, y) = torsion_split(&TorusPoint::parse("5/12").unwrap(), 2);
        assert_eq!((x.to_string(), y.to_string()), ("3/4".into(), "2/3".into()));
        let (x, y) = torsion_split(&TorusPoint::parse("1/5").unwrap(), 2);
        assert_eq!((x.to_string(), y.to_string()), ("0/1".into(), "1/5".into()));
        let (x, y) = torsion_split(&TorusPoint::parse("1/8").unwrap(), 2);
        assert_eq!((x.to_string(), y.to_string()), ("1/8".into(), "0/1".into()));
    }

    fn symbol_at(level: u64) -> impl Strategy<Value = CycSymbol> {
        (0..level).prop_map(move |c| CycSymbol::from_u64(c, level))
    }

    proptest! {
        #[test]
        fn embedding_is_multiplicative(level in 1u64..40, a in 0u64..1000, b in 0u64..1000) {
            let s = CycSymbol::from_u64(a % level, level);
            let t = CycSymbol::from_u64(b % level, level);
            let lhs = cyc_embed(s + t, level).unwrap();
            let rhs = &cyc_embed(s, level).unwrap() * &cyc_embed(t, level).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn galois_is_an_action(
            p in prop::sample::select(vec![2u64, 3, 5, 7]),
            m_prime in prop::sample::select(vec![1u64, 4, 5, 6, 7, 9, 11, 13]),
            k in 0u32..3, j1 in 0u64..12, j2 in 0u64..12, b1 in 1u64..50, b2 in 1u64..50,
            c in 0u64..10_000,
        ) {
            prop_assume!(m_prime % p != 0);
            let level = p.pow(k) * m_prime;
            let g = GaloisElement::new(p, level, j1, b1);
            let h = GaloisElement::new(p, level, j2, b2);
            prop_assume!(g.is_ok() && h.is_ok());
            let (g, h) = (g.unwrap(), h.unwrap());
            let pt = TorusPoint::new(vec![CycSymbol::from_u64(c % level, level)]);
            let gh = g.compose(&h).unwrap();
            prop_assert_eq!(
                galois_act(&gh, &pt).unwrap(),
                galois_act(&g, &galois_act(&h, &pt).unwrap()).unwrap()
            );
        }

        #[test]
        fn split_is_unique(s in (1u64..200).prop_flat_map(symbol_at), p in prop::sample::select(vec![2u64, 3, 5])) {
            let pt = TorusPoint::new(vec![s]);
            let (x, y) = torsion_split(&pt, p);
            prop_assert_eq!(&(&x + &y), &pt);
            let (k, rest) = arith::split_prime(x.order(), p);
            prop_assert_eq!(rest, 1);
            prop_assert_eq!(p.pow(k), x.order());
            prop_assert!(y.order() % p != 0);
            let (x2, y2) = torsion_split(&x, p);
            prop_assert_eq!(x2, x);
            prop_assert_eq!(y2, TorusPoint::identity(1));
        }

        #[test]
        fn frobenius_fixes_tame_point_iff_p_is_one_mod_order(
            p in prop::sample::select(vec![2u64, 3, 5, 7, 11]),
            s in (1u64..60).prop_flat_map(symbol_at),
        ) {
            prop_assume!(s.den() % p != 0);
            let tau = GaloisElement::tau(p, s.den()).unwrap();
            let pt = TorusPoint::new(vec![s]);
            let fixed = galois_act(&tau, &pt).unwrap() == pt;
            prop_assert_eq!(fixed, p % s.den() == 1 % s.den());
        }
    }
}
