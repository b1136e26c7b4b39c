//! Finite-precision arithmetic in `K = Q_p(ζ_{m'}, ζ_{p^k})`.
//!
//! Elements live in `((Z/p^N)[y]/(g(y)))[x]/(E(x))` where `g` lifts the
//! residue-field modulus and `E(x) = Φ_{p^k}(x + 1)` is Eisenstein, so `x`
//! is a uniformizer and `x + 1 = ζ_{p^k}`. Coordinates are stored x-major:
//! index `j·f + i` holds the coefficient of `y^i x^j`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith;
use crate::cyclo_exact::{symbol_split, CycInt, CycSymbol};
use crate::error::{Error, Result};
use crate::finite_field::{FpPoly, ResidueField};
use crate::galois_poly::IntPolynomial;

/// Default absolute precision, in p-adic digits.
pub const DEFAULT_PRECISION: u32 = 40;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TowerSpec {
    pub p: u64,
    pub m_prime: u64,
    pub k: u32,
    /// Residue degree: the order of `p` modulo `m'`.
    pub f: u64,
    /// Ramification index `φ(p^k)`.
    pub e: u64,
    /// Absolute precision `N`: coordinates are known modulo `p^N`.
    pub precision: u32,
    pub unramified_poly: Vec<u64>,
    pub eisenstein_poly: IntPolynomial,
}

impl TowerSpec {
    pub fn level(&self) -> u64 {
        self.p.pow(self.k) * self.m_prime
    }

    pub fn p_power(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn residue_size(&self) -> BigUint {
        BigUint::from(self.p).pow(self.f as u32)
    }

    /// Whether every root of unity of order dividing `m` lives here.
    pub fn contains_level(&self, m: u64) -> bool {
        self.level() % m == 0
    }
}

pub fn tower_make(p: u64, m_prime: u64, k: u32, precision: u32) -> Result<TowerSpec> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m_prime == 0 || m_prime % p == 0 {
        return Err(Error::PrimeDividesTameLevel { p, m: m_prime });
    }
    if precision == 0 {
        return Err(Error::Parse("precision must be at least 1".into()));
    }
    let f = arith::multiplicative_order(p % m_prime, m_prime).unwrap_or(1);
    let e = if k == 0 { 1 } else { arith::euler_phi(p.pow(k)) };
    let eisenstein_poly = if k == 0 {
        IntPolynomial::t()
    } else {
        shift_by_one(&crate::cyclo_exact::cyclotomic_polynomial(p.pow(k)))
    };
    Ok(TowerSpec {
        p,
        m_prime,
        k,
        f,
        e,
        precision,
        unramified_poly: crate::finite_field::smallest_irreducible(p, f),
        eisenstein_poly,
    })
}

/// `F(x + 1)` by Horner's rule.
fn shift_by_one(f: &IntPolynomial) -> IntPolynomial {
    let x_plus_1 = IntPolynomial::from_i64(&[1, 1]);
    f.coeffs()
        .iter()
        .rev()
        .fold(IntPolynomial::zero(), |acc, c| {
            &(&acc * &x_plus_1) + &IntPolynomial::constant(c.clone())
        })
}

/// Runtime data for one tower: moduli and cached roots of unity.
pub struct Tower {
    spec: TowerSpec,
    modulus: BigInt,
    residue: ResidueField,
    g: Vec<BigInt>,
    eis: Vec<BigInt>,
    generator: FpPoly,
    zeta_powers: Vec<Vec<BigInt>>,
    unipotent_powers: Vec<Vec<BigInt>>,
    frobenius_of_y: OnceLock<Vec<BigInt>>,
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tower").field("spec", &self.spec).finish()
    }
}

impl Tower {
    pub fn new(spec: TowerSpec) -> Result<Arc<Tower>> {
        let p = spec.p;
        let modulus = BigInt::from(p).pow(spec.precision);
        let residue = ResidueField {
            p,
            f: spec.f,
            modulus: spec.unramified_poly.clone(),
        };
        let generator = residue.smallest_of_order(spec.m_prime)?;
        let mut tower = Tower {
            g: spec.unramified_poly.iter().map(|&c| BigInt::from(c)).collect(),
            eis: spec.eisenstein_poly.coeffs().to_vec(),
            spec,
            modulus,
            residue,
            generator,
            zeta_powers: Vec::new(),
            unipotent_powers: Vec::new(),
            frobenius_of_y: OnceLock::new(),
        };
        let zeta = tower.lift_root_of_unity(&tower.generator.clone(), tower.spec.m_prime);
        let mut cur = tower.r_one();
        for _ in 0..tower.spec.m_prime {
            tower.zeta_powers.push(cur.clone());
            cur = tower.r_mul(&cur, &zeta);
        }
        debug_assert_eq!(cur, tower.r_one());
        let e = tower.spec.e as usize;
        let mut u = vec![BigInt::zero(); e];
        u[0] = BigInt::one();
        for _ in 0..tower.spec.p_power() {
            tower.unipotent_powers.push(u.clone());
            u = tower.times_one_plus_x(&u);
        }
        Ok(Arc::new(tower))
    }

    pub fn spec(&self) -> &TowerSpec {
        &self.spec
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.residue
    }

    /// Residue of the chosen primitive `m'`-th root of unity.
    pub fn residue_generator(&self) -> &FpPoly {
        &self.generator
    }

    fn dim(&self) -> usize {
        (self.spec.f * self.spec.e) as usize
    }

    fn reduce(&self, a: &BigInt) -> BigInt {
        a.mod_floor(&self.modulus)
    }

    fn r_one(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.spec.f as usize];
        v[0] = BigInt::one();
        v
    }

    fn r_from_residue(&self, a: &[u64]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.spec.f as usize];
        for (o, &c) in v.iter_mut().zip(a) {
            *o = BigInt::from(c);
        }
        v
    }

    fn r_residue(&self, a: &[BigInt]) -> FpPoly {
        let p = BigInt::from(self.spec.p);
        let mut v: FpPoly = a.iter().map(|c| c.mod_floor(&p).to_u64().unwrap()).collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    /// Product in `(Z/p^N)[y]/(g)`.
    fn r_mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let f = self.spec.f as usize;
        if f == 1 {
            return vec![self.reduce(&(&a[0] * &b[0]))];
        }
        let mut prod = vec![BigInt::zero(); 2 * f - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        for t in (f..prod.len()).rev() {
            let top = std::mem::take(&mut prod[t]);
            if top.is_zero() {
                continue;
            }
            let top = self.reduce(&top);
            for (i, gc) in self.g[..f].iter().enumerate() {
                if !gc.is_zero() {
                    prod[t - f + i] -= &top * gc;
                }
            }
        }
        prod.truncate(f);
        prod.iter().map(|c| self.reduce(c)).collect()
    }

    fn r_pow(&self, a: &[BigInt], e: &BigUint) -> Vec<BigInt> {
        let mut acc = self.r_one();
        for i in (0..e.bits()).rev() {
            acc = self.r_mul(&acc, &acc);
            if e.bit(i) {
                acc = self.r_mul(&acc, a);
            }
        }
        acc
    }

    fn r_sub(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| self.reduce(&(x - y))).collect()
    }

    fn r_scale(&self, a: &[BigInt], c: &BigInt) -> Vec<BigInt> {
        a.iter().map(|x| self.reduce(&(x * c))).collect()
    }

    /// Inverse of a unit of `(Z/p^N)[y]/(g)`: invert the residue, then
    /// Newton's iteration `w ↦ w(2 − uw)`.
    fn r_inverse(&self, u: &[BigInt]) -> Result<Vec<BigInt>> {
        let ubar = self.r_residue(u);
        if ubar.is_empty() {
            return Err(Error::NotAUnit);
        }
        let q_minus_2 = self.residue.order() - 2u32;
        let mut w = self.r_from_residue(&self.residue.pow(&ubar, &q_minus_2));
        let two = {
            let mut t = self.r_one();
            t[0] = BigInt::from(2);
            t
        };
        for _ in 0..=2 * self.spec.precision + 2 {
            let next = self.r_mul(&w, &self.r_sub(&two, &self.r_mul(u, &w)));
            if next == w {
                return Ok(w);
            }
            w = next;
        }
        Err(Error::Invariant("inverse iteration did not converge".into()))
    }

    /// Hensel lift of a residue root of `Y^m − 1` (`p ∤ m`), by Newton's
    /// iteration `Y ↦ Y − Y(Y^m − 1)/m`.
    fn lift_root_of_unity(&self, residue: &[u64], m: u64) -> Vec<BigInt> {
        let mut y = self.r_from_residue(residue);
        if m == 1 {
            return self.r_one();
        }
        let inv_m = BigInt::from(m)
            .modinv(&self.modulus)
            .expect("m is prime to p");
        let mb = BigUint::from(m);
        let one = self.r_one();
        loop {
            let defect = self.r_sub(&self.r_pow(&y, &mb), &one);
            if defect.iter().all(Zero::is_zero) {
                return y;
            }
            let step = self.r_scale(&self.r_mul(&y, &defect), &inv_m);
            y = self.r_sub(&y, &step);
        }
    }

    /// `(1 + x)·a` reduced by the Eisenstein polynomial.
    fn times_one_plus_x(&self, a: &[BigInt]) -> Vec<BigInt> {
        let e = a.len();
        let mut out = vec![BigInt::zero(); e + 1];
        for (j, c) in a.iter().enumerate() {
            out[j] += c;
            out[j + 1] += c;
        }
        let top = out.pop().unwrap();
        if !top.is_zero() {
            for (j, ec) in self.eis[..e].iter().enumerate() {
                out[j] -= &top * ec;
            }
        }
        out.iter().map(|c| self.reduce(c)).collect()
    }

    /// `ζ_{m'}^u · ζ_{p^k}^v` as an outer product, no reduction needed.
    pub fn embed_exponents(self: &Arc<Self>, u: u64, v: u64) -> TowerElement {
        let zeta = &self.zeta_powers[(u % self.spec.m_prime) as usize];
        let unip = &self.unipotent_powers[(v % self.spec.p_power()) as usize];
        let f = self.spec.f as usize;
        let mut coords = vec![BigInt::zero(); self.dim()];
        for (j, a) in unip.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (i, b) in zeta.iter().enumerate() {
                if !b.is_zero() {
                    coords[j * f + i] = self.reduce(&(a * b));
                }
            }
        }
        TowerElement {
            tower: self.clone(),
            coords,
        }
    }

    /// `(u, v)` with `ζ^s = ζ_{m'}^u ζ_{p^k}^v`.
    pub fn split_exponents(&self, s: CycSymbol) -> Result<(u64, u64)> {
        if !self.spec.contains_level(s.den()) {
            return Err(Error::LevelMismatch {
                den: s.den(),
                level: self.spec.level(),
            });
        }
        let (wild, tame) = symbol_split(s, self.spec.p);
        Ok((
            tame.exponent_at(self.spec.m_prime)?,
            wild.exponent_at(self.spec.p_power())?,
        ))
    }

    /// `y ↦ φ(y)`: the root of `g` congruent to `y^p`.
    fn frobenius_image_of_y(&self) -> &Vec<BigInt> {
        self.frobenius_of_y.get_or_init(|| {
            let f = self.spec.f as usize;
            let mut y = vec![BigInt::zero(); f];
            if f == 1 {
                // g = y, so y = 0 and φ(y) = 0
                return y;
            }
            y[1] = BigInt::one();
            let mut cur = self.r_pow(&y, &BigUint::from(self.spec.p));
            let g_deriv: Vec<BigInt> = (1..=f)
                .map(|i| &self.g[i] * BigInt::from(i as u64))
                .collect();
            let eval = |coeffs: &[BigInt], at: &[BigInt]| -> Vec<BigInt> {
                let mut acc = vec![BigInt::zero(); f];
                for c in coeffs.iter().rev() {
                    acc = self.r_mul(&acc, at);
                    acc[0] = self.reduce(&(&acc[0] + c));
                }
                acc
            };
            loop {
                let val = eval(&self.g, &cur);
                if val.iter().all(Zero::is_zero) {
                    return cur;
                }
                let d = self
                    .r_inverse(&eval(&g_deriv, &cur))
                    .expect("g is separable mod p");
                cur = self.r_sub(&cur, &self.r_mul(&val, &d));
            }
        })
    }
}

/// Shared tower for `(p, m', k, N)`, built on first use.
pub fn tower(p: u64, m_prime: u64, k: u32, precision: u32) -> Result<Arc<Tower>> {
    type Key = (u64, u64, u32, u32);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Tower>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (p, m_prime, k, precision);
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let built = Tower::new(tower_make(p, m_prime, k, precision)?)?;
    Ok(cache.lock().unwrap().entry(key).or_insert(built).clone())
}

/// Smallest tower containing the `m`-th roots of unity.
pub fn tower_for_level(p: u64, m: u64, precision: u32) -> Result<Arc<Tower>> {
    let (k, m_prime) = arith::split_prime(m, p);
    tower(p, m_prime, k, precision)
}

/// `v_p`-normalized valuation known to the working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValuationResult {
    Finite(Ratio<u64>),
    BelowPrecision,
}

impl ValuationResult {
    pub fn finite(num: u64, den: u64) -> Self {
        ValuationResult::Finite(Ratio::new(num, den))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ValuationResult::Finite(_))
    }
}

impl PartialOrd for ValuationResult {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ValuationResult {
    fn cmp(&self, other: &Self) -> Ordering {
        use ValuationResult::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), BelowPrecision) => Ordering::Less,
            (BelowPrecision, Finite(_)) => Ordering::Greater,
            (BelowPrecision, BelowPrecision) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ValuationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationResult::Finite(r) => write!(f, "{r}"),
            ValuationResult::BelowPrecision => write!(f, "below precision"),
        }
    }
}

impl Serialize for ValuationResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn p_adic_order(c: &BigInt, p: &BigInt, cap: u32) -> u32 {
    if c.is_zero() {
        return cap;
    }
    let mut v = 0;
    let mut cur = c.clone();
    loop {
        let (q, r) = cur.div_rem(p);
        if !r.is_zero() || v >= cap {
            return v;
        }
        cur = q;
        v += 1;
    }
}

#[derive(Clone)]
pub struct TowerElement {
    tower: Arc<Tower>,
    coords: Vec<BigInt>,
}

impl TowerElement {
    pub fn zero(tower: &Arc<Tower>) -> Self {
        TowerElement {
            tower: tower.clone(),
            coords: vec![BigInt::zero(); tower.dim()],
        }
    }

    pub fn one(tower: &Arc<Tower>) -> Self {
        Self::from_integer(tower, &BigInt::one())
    }

    pub fn from_integer(tower: &Arc<Tower>, n: &BigInt) -> Self {
        let mut z = Self::zero(tower);
        z.coords[0] = tower.reduce(n);
        z
    }

    /// The uniformizer `x = ζ_{p^k} − 1` (zero when `k = 0`).
    pub fn uniformizer(tower: &Arc<Tower>) -> Self {
        let mut z = Self::zero(tower);
        if tower.spec.e > 1 {
            z.coords[tower.spec.f as usize] = BigInt::one();
        } else if tower.spec.k == 1 {
            // p = 2, k = 1: E(x) = x + 2, so x = −2
            z.coords[0] = tower.reduce(&BigInt::from(-2));
        }
        z
    }

    /// Coordinates in the basis `y^i x^j`, index `j·f + i`.
    pub fn from_coords(tower: &Arc<Tower>, coords: Vec<BigInt>) -> Result<Self> {
        if coords.len() != tower.dim() {
            return Err(Error::Dimension(format!(
                "expected {} coordinates, got {}",
                tower.dim(),
                coords.len()
            )));
        }
        Ok(TowerElement {
            coords: coords.iter().map(|c| tower.reduce(c)).collect(),
            tower: tower.clone(),
        })
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_indistinguishable_from_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn same_tower(&self, other: &TowerElement) {
        assert!(
            Arc::ptr_eq(&self.tower, &other.tower) || self.tower.spec == other.tower.spec,
            "elements of different towers"
        );
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        TowerElement {
            tower: self.tower.clone(),
            coords: self.coords.iter().map(|x| self.tower.reduce(&(x * c))).collect(),
        }
    }

    /// `self += c · other`, used to accumulate generator evaluations.
    pub fn add_scaled(&mut self, other: &TowerElement, c: &BigInt) {
        self.same_tower(other);
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            if !b.is_zero() {
                *a = self.tower.reduce(&(&*a + b * c));
            }
        }
    }

    pub fn pow(&self, e: &BigUint) -> Self {
        let mut acc = TowerElement::one(&self.tower);
        for i in (0..e.bits()).rev() {
            acc = &acc * &acc;
            if e.bit(i) {
                acc = &acc * self;
            }
        }
        acc
    }

    pub fn valuation(&self) -> ValuationResult {
        let t = &self.tower;
        let f = t.spec.f as usize;
        let e = t.spec.e;
        let p = BigInt::from(t.spec.p);
        let cap = t.spec.precision;
        let mut best: Option<u64> = None;
        for (j, block) in self.coords.chunks(f).enumerate() {
            let v = block.iter().map(|c| p_adic_order(c, &p, cap)).min().unwrap();
            if v < cap {
                let scaled = e * v as u64 + j as u64;
                best = Some(best.map_or(scaled, |b| b.min(scaled)));
            }
        }
        match best {
            Some(s) => ValuationResult::Finite(Ratio::new(s, e)),
            None => ValuationResult::BelowPrecision,
        }
    }
}

impl PartialEq for TowerElement {
    fn eq(&self, other: &Self) -> bool {
        self.tower.spec == other.tower.spec && self.coords == other.coords
    }
}

impl Eq for TowerElement {}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TowerElement(p={}, m'={}, k={}; {:?})",
            self.tower.spec.p, self.tower.spec.m_prime, self.tower.spec.k, self.coords
        )
    }
}

impl Add for &TowerElement {
    type Output = TowerElement;
    fn add(self, rhs: &TowerElement) -> TowerElement {
        self.same_tower(rhs);
        TowerElement {
            tower: self.tower.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| self.tower.reduce(&(a + b)))
                .collect(),
        }
    }
}

impl Sub for &TowerElement {
    type Output = TowerElement;
    fn sub(self, rhs: &TowerElement) -> TowerElement {
        self.same_tower(rhs);
        TowerElement {
            tower: self.tower.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| self.tower.reduce(&(a - b)))
                .collect(),
        }
    }
}

impl Neg for &TowerElement {
    type Output = TowerElement;
    fn neg(self) -> TowerElement {
        TowerElement {
            tower: self.tower.clone(),
            coords: self.coords.iter().map(|a| self.tower.reduce(&-a)).collect(),
        }
    }
}

impl Mul for &TowerElement {
    type Output = TowerElement;
    fn mul(self, rhs: &TowerElement) -> TowerElement {
        self.same_tower(rhs);
        let t = &self.tower;
        let f = t.spec.f as usize;
        let e = t.spec.e as usize;
        let a: Vec<&[BigInt]> = self.coords.chunks(f).collect();
        let b: Vec<&[BigInt]> = rhs.coords.chunks(f).collect();
        let mut blocks = vec![vec![BigInt::zero(); f]; 2 * e - 1];
        for (j1, x) in a.iter().enumerate() {
            if x.iter().all(Zero::is_zero) {
                continue;
            }
            for (j2, y) in b.iter().enumerate() {
                if y.iter().all(Zero::is_zero) {
                    continue;
                }
                let prod = t.r_mul(x, y);
                for (o, c) in blocks[j1 + j2].iter_mut().zip(prod) {
                    *o += c;
                }
            }
        }
        for top in (e..blocks.len()).rev() {
            let lead: Vec<BigInt> = blocks[top].iter().map(|c| t.reduce(c)).collect();
            if lead.iter().all(Zero::is_zero) {
                continue;
            }
            for (j, ec) in t.eis[..e].iter().enumerate() {
                if ec.is_zero() {
                    continue;
                }
                for (o, c) in blocks[top - e + j].iter_mut().zip(&lead) {
                    *o -= c * ec;
                }
            }
        }
        blocks.truncate(e);
        TowerElement {
            tower: t.clone(),
            coords: blocks.into_iter().flatten().map(|c| t.reduce(&c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for TowerElement {
            type Output = TowerElement;
            fn $method(self, rhs: TowerElement) -> TowerElement {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

pub fn valuation(z: &TowerElement) -> ValuationResult {
    z.valuation()
}

/// Teichmüller lift of a nonzero residue, by iterating `z ↦ z^q` from any
/// lift until it stops moving.
pub fn teichmuller(tower: &Arc<Tower>, residue: &[u64]) -> Result<TowerElement> {
    let reduced = crate::finite_field::poly_rem(residue, &tower.residue.modulus, tower.spec.p);
    if reduced.is_empty() {
        return Err(Error::NotAUnit);
    }
    let q = tower.residue.order();
    let mut z = TowerElement::zero(tower);
    for (i, c) in tower.r_from_residue(&reduced).into_iter().enumerate() {
        z.coords[i] = c;
    }
    for _ in 0..=tower.spec.precision {
        let next = z.pow(&q);
        if next == z {
            return Ok(z);
        }
        z = next;
    }
    Err(Error::Invariant("Teichmüller iteration did not stabilize".into()))
}

/// Teichmüller lift of the residue whose base-`p` digits are those of `a`.
pub fn teichmuller_int(tower: &Arc<Tower>, a: u64) -> Result<TowerElement> {
    teichmuller(tower, &tower.residue.from_int(&BigUint::from(a)))
}

/// `ζ^s` under the fixed embedding: the tame part goes to a power of the
/// Teichmüller lift of the residue generator, the wild part to `(1 + x)^c`.
pub fn embed_root(tower: &Arc<Tower>, s: CycSymbol) -> Result<TowerElement> {
    let (u, v) = tower.split_exponents(s)?;
    Ok(tower.embed_exponents(u, v))
}

/// Image of an exact cyclotomic integer.
pub fn embed_cyc(tower: &Arc<Tower>, z: &CycInt) -> Result<TowerElement> {
    let mut acc = TowerElement::zero(tower);
    for (i, c) in z.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let root = embed_root(tower, CycSymbol::from_u64(i as u64, z.level()))?;
        acc.add_scaled(&root, c);
    }
    Ok(acc)
}

/// Coordinates modulo `𝔪^{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedElement {
    pub level: u64,
    pub coords: Vec<BigInt>,
}

/// Image in `O_K / 𝔪^{n+1}`. The coefficient of `y^i x^j` is kept modulo
/// `p^{⌈(n+1−j)/e⌉}`.
pub fn reduce_level(z: &TowerElement, n: u64) -> Result<ReducedElement> {
    let spec = &z.tower.spec;
    let e = spec.e;
    let precision = spec.precision as u64 * e;
    if n + 1 > precision {
        return Err(Error::LevelExceedsPrecision {
            level: n,
            precision,
        });
    }
    let f = spec.f as usize;
    let p = BigInt::from(spec.p);
    let coords = z
        .coords
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let j = (idx / f) as u64;
            let t = (n + 1).saturating_sub(j).div_ceil(e);
            c.mod_floor(&p.pow(t as u32))
        })
        .collect();
    Ok(ReducedElement { level: n, coords })
}

/// Arithmetic Frobenius on an unramified tower.
pub fn frobenius_apply(z: &TowerElement) -> Result<TowerElement> {
    let t = &z.tower;
    if t.spec.k != 0 {
        return Err(Error::RamifiedTower(t.spec.k));
    }
    let phi_y = t.frobenius_image_of_y();
    let mut acc = vec![BigInt::zero(); t.spec.f as usize];
    for c in z.coords.iter().rev() {
        acc = t.r_mul(&acc, phi_y);
        acc[0] = t.reduce(&(&acc[0] + c));
    }
    Ok(TowerElement {
        tower: t.clone(),
        coords: acc,
    })
}

/// One row of the powers-of-two table: `2^{(p−1)p^{n−1}} − 1`
/// computed with integers and inside `Q_p` at precision `N`.
#[derive(Clone, Debug, Serialize)]
pub struct PowerOfTwoRow {
    pub p: u64,
    pub n: u32,
    pub exponent: u64,
    pub integer_valuation: u32,
    pub tower_valuation: ValuationResult,
    /// Base-`p` digits of the integer modulo `p^N`, least significant first.
    pub integer_digits: Vec<u32>,
    pub tower_digits: Vec<u32>,
}

impl PowerOfTwoRow {
    pub fn digits_agree(&self) -> bool {
        self.integer_digits == self.tower_digits
    }

    pub fn valuations_agree(&self) -> bool {
        self.tower_valuation == ValuationResult::finite(self.integer_valuation as u64, 1)
    }

    pub fn bound_holds(&self) -> bool {
        self.integer_valuation >= self.n
    }
}

fn digits_mod(x: &BigInt, p: u64, precision: u32) -> Vec<u32> {
    let (_, mag) = x.mod_floor(&BigInt::from(p).pow(precision)).into_parts();
    let mut d = mag.to_radix_le(p as u32);
    d.resize(precision as usize, 0);
    d.into_iter().map(u32::from).collect()
}

pub fn power_of_two_row(p: u64, n: u32, precision: u32) -> Result<PowerOfTwoRow> {
    if p == 2 || !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::Parse("n must be at least 1".into()));
    }
    let exponent = (p - 1) * p.pow(n - 1);
    let exact: BigInt = BigInt::from(2).pow(exponent as u32) - 1;
    let pb = BigInt::from(p);
    let mut integer_valuation = 0;
    let mut cur = exact.clone();
    while cur.is_multiple_of(&pb) {
        cur /= &pb;
        integer_valuation += 1;
    }
    let t = tower(p, 1, 0, precision)?;
    let two = TowerElement::from_integer(&t, &BigInt::from(2));
    let z = &two.pow(&BigUint::from(exponent)) - &TowerElement::one(&t);
    Ok(PowerOfTwoRow {
        p,
        n,
        exponent,
        integer_valuation,
        tower_valuation: z.valuation(),
        integer_digits: digits_mod(&exact, p, precision),
        tower_digits: digits_mod(&z.coords[0], p, precision),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(t: &Arc<Tower>, n: i64) -> TowerElement {
        TowerElement::from_integer(t, &BigInt::from(n))
    }

    fn sym(s: &str) -> CycSymbol {
        s.parse().unwrap()
    }

    #[test]
    fn tower_shapes() {
        let s = tower_make(5, 1, 1, 20).unwrap();
        assert_eq!((s.e, s.f), (4, 1));
        assert_eq!(s.eisenstein_poly, IntPolynomial::from_i64(&[5, 10, 10, 5, 1]));
        assert_eq!(tower_make(7, 6, 0, 20).unwrap().f, 1);
        assert_eq!(tower_make(5, 6, 0, 20).unwrap().f, 2);
        assert!(matches!(
            tower_make(5, 10, 0, 20),
            Err(Error::PrimeDividesTameLevel { .. })
        ));
        let s = tower_make(3, 1, 2, 10).unwrap();
        assert_eq!(s.e, 6);
        assert!(s.eisenstein_poly.coeffs()[..6].iter().all(|c| c % 3 == BigInt::zero()));
        assert_eq!(s.eisenstein_poly.coeffs()[0], BigInt::from(3));
    }

    #[test]
    fn valuation_examples() {
        let t = tower(5, 1, 1, 20).unwrap();
        let z = &embed_root(&t, sym("1/5")).unwrap() - &TowerElement::one(&t);
        assert_eq!(z.valuation(), ValuationResult::finite(1, 4));
        assert_eq!(int(&t, 5).valuation(), ValuationResult::finite(1, 1));
        assert_eq!(TowerElement::zero(&t).valuation(), ValuationResult::BelowPrecision);

        let t7 = tower(7, 6, 0, 20).unwrap();
        let z = &(&teichmuller_int(&t7, 2).unwrap() + &teichmuller_int(&t7, 6).unwrap())
            - &TowerElement::one(&t7);
        assert_eq!(z.valuation(), ValuationResult::finite(1, 1));
    }

    #[test]
    fn teichmuller_examples() {
        let t7 = tower(7, 6, 0, 2).unwrap();
        assert_eq!(teichmuller_int(&t7, 2).unwrap().coords(), &[BigInt::from(30)]);
        assert_eq!(teichmuller_int(&t7, 6).unwrap().coords(), &[BigInt::from(48)]);
        let t5 = tower(5, 4, 0, 2).unwrap();
        let w2 = teichmuller_int(&t5, 2).unwrap();
        assert_eq!(w2.coords(), &[BigInt::from(7)]);
        assert_eq!(&w2 * &w2, teichmuller_int(&t5, 4).unwrap());
        assert!(matches!(teichmuller_int(&t5, 5), Err(Error::NotAUnit)));
    }

    #[test]
    fn embedding_matches_teichmuller_generator() {
        for &(p, m) in &[(7u64, 6u64), (5, 6), (3, 8), (2, 7), (5, 13), (3, 10)] {
            let t = tower(p, m, 0, 12).unwrap();
            let gen = t.residue_generator().clone();
            let z = embed_root(&t, CycSymbol::from_u64(1, m)).unwrap();
            assert_eq!(z, teichmuller(&t, &gen).unwrap(), "p={p} m={m}");
        }
    }

    #[test]
    fn sixth_root_at_seven() {
        let t = tower(7, 6, 0, 30).unwrap();
        let z = embed_root(&t, sym("1/6")).unwrap();
        assert_eq!(z, teichmuller_int(&t, 3).unwrap());
        let rel = &(&(&z * &z) - &z) + &TowerElement::one(&t);
        assert!(rel.is_indistinguishable_from_zero());
        let t5 = tower(5, 1, 1, 10).unwrap();
        let z = embed_root(&t5, sym("1/5")).unwrap();
        assert_eq!(z, &TowerElement::one(&t5) + &TowerElement::uniformizer(&t5));
        assert_eq!(embed_root(&t5, CycSymbol::ZERO).unwrap(), TowerElement::one(&t5));
        assert!(embed_root(&t5, sym("1/3")).is_err());
    }

    #[test]
    fn reductions() {
        let t5 = tower(5, 1, 1, 10).unwrap();
        let z = embed_root(&t5, sym("1/5")).unwrap();
        assert_eq!(reduce_level(&z, 0).unwrap(), reduce_level(&TowerElement::one(&t5), 0).unwrap());
        assert_ne!(reduce_level(&z, 1).unwrap(), reduce_level(&TowerElement::one(&t5), 1).unwrap());
        let t7 = tower(7, 6, 0, 10).unwrap();
        let w = teichmuller_int(&t7, 2).unwrap();
        assert_eq!(reduce_level(&w, 0).unwrap().coords, vec![BigInt::from(2)]);
        assert_eq!(reduce_level(&int(&t7, 49), 1).unwrap().coords, vec![BigInt::zero()]);
        assert!(reduce_level(&w, 10).is_err());
    }

    #[test]
    fn frobenius_on_unramified() {
        let t7 = tower(7, 6, 0, 20).unwrap();
        let w = teichmuller_int(&t7, 2).unwrap();
        assert_eq!(frobenius_apply(&w).unwrap(), w);
        assert_eq!(frobenius_apply(&TowerElement::one(&t7)).unwrap(), TowerElement::one(&t7));
        let t = tower(5, 6, 0, 15).unwrap();
        for c in 0..6 {
            let z = embed_root(&t, CycSymbol::from_u64(c, 6)).unwrap();
            let img = frobenius_apply(&z).unwrap();
            assert_eq!(img, z.pow(&BigUint::from(5u32)));
        }
        let t5 = tower(5, 1, 1, 10).unwrap();
        assert!(matches!(
            frobenius_apply(&TowerElement::one(&t5)),
            Err(Error::RamifiedTower(1))
        ));
    }

    #[test]
    fn frobenius_is_a_ring_map() {
        let t = tower(3, 13, 0, 8).unwrap();
        assert_eq!(t.spec().f, 3);
        let a = &embed_root(&t, CycSymbol::from_u64(1, 13)).unwrap() + &int(&t, 7);
        let b = &embed_root(&t, CycSymbol::from_u64(5, 13)).unwrap() - &int(&t, 2);
        let fa = frobenius_apply(&a).unwrap();
        let fb = frobenius_apply(&b).unwrap();
        assert_eq!(frobenius_apply(&(&a * &b)).unwrap(), &fa * &fb);
        assert_eq!(frobenius_apply(&(&a + &b)).unwrap(), &fa + &fb);
    }

    #[test]
    fn power_of_two_rows() {
        for p in [3u64, 5] {
            for n in 1..=6 {
                let row = power_of_two_row(p, n, 12).unwrap();
                assert!(row.bound_holds(), "p={p} n={n}");
                assert!(row.digits_agree());
                assert!(row.valuations_agree());
            }
        }
        assert_eq!(power_of_two_row(3, 2, 6).unwrap().integer_valuation, 2);
    }

    #[test]
    fn nonzero_cyclotomic_integers_have_finite_valuation() {
        use crate::cyclo_exact::cyc_embed;
        let t = tower(7, 6, 0, 40).unwrap();
        let z = &(&cyc_embed(sym("1/3"), 6).unwrap() + &cyc_embed(sym("1/2"), 6).unwrap())
            - &CycInt::one(6);
        assert!(!z.is_zero());
        assert_eq!(embed_cyc(&t, &z).unwrap().valuation(), ValuationResult::finite(1, 1));
    }

    fn towers() -> impl Strategy<Value = Arc<Tower>> {
        prop::sample::select(vec![(3u64, 1u64, 2u32), (5, 1, 1), (7, 6, 0), (5, 6, 0), (3, 4, 1), (2, 3, 2)])
            .prop_map(|(p, m, k)| tower(p, m, k, 12).unwrap())
    }

    fn element(t: Arc<Tower>) -> impl Strategy<Value = TowerElement> {
        let lvl = t.spec().level();
        prop::collection::vec((0..lvl, -3i64..4), 1..4).prop_map(move |terms| {
            let mut z = TowerElement::zero(&t);
            for (c, s) in terms {
                z.add_scaled(&embed_root(&t, CycSymbol::from_u64(c, lvl)).unwrap(), &BigInt::from(s));
            }
            z
        })
    }

    proptest! {
        #[test]
        fn ultrametric_and_multiplicative(
            (x, y) in towers().prop_flat_map(|t| (element(t.clone()), element(t)))
        ) {
            let (vx, vy) = (x.valuation(), y.valuation());
            let vs = (&x + &y).valuation();
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
            if let (ValuationResult::Finite(a), ValuationResult::Finite(b)) = (vx, vy) {
                if a + b < Ratio::from_integer(6) {
                    prop_assert_eq!((&x * &y).valuation(), ValuationResult::Finite(a + b));
                }
            }
        }

        #[test]
        fn embedding_is_multiplicative(t in towers(), a in 0u64..1000, b in 0u64..1000) {
            let l = t.spec().level();
            let s = CycSymbol::from_u64(a % l, l);
            let u = CycSymbol::from_u64(b % l, l);
            prop_assert_eq!(
                embed_root(&t, s + u).unwrap(),
                &embed_root(&t, s).unwrap() * &embed_root(&t, u).unwrap()
            );
        }

        #[test]
        fn teichmuller_lifts(p in prop::sample::select(vec![3u64, 5, 7]), a in 1u64..100) {
            if a % p == 0 { return Ok(()); }
            let t = tower(p, 1, 0, 10).unwrap();
            let w = teichmuller_int(&t, a).unwrap();
            prop_assert!((&w.pow(&BigUint::from(p - 1)) - &TowerElement::one(&t)).is_indistinguishable_from_zero());
            prop_assert_eq!(reduce_level(&w, 0).unwrap().coords, vec![BigInt::from(a % p)]);
            let b = (a % p) % (p - 1) + 1;
            if b != a % p {
                let d = &w - &teichmuller_int(&t, b).unwrap();
                prop_assert_eq!(d.valuation(), ValuationResult::finite(0, 1));
            }
        }

        #[test]
        fn level_reduction_detects_congruence(
            (x, y) in towers().prop_flat_map(|t| (element(t.clone()), element(t))),
            n in 0u64..8,
        ) {
            let e = x.tower().spec().e;
            let close = match (&x - &y).valuation() {
                ValuationResult::BelowPrecision => true,
                ValuationResult::Finite(r) => r > Ratio::new(n, e),
            };
            prop_assert_eq!(close, reduce_level(&x, n).unwrap() == reduce_level(&y, n).unwrap());
        }
    }
}
