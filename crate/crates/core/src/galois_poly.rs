//! Exact arithmetic in `Z[T]` and integer certificates for ideal membership.
//!
//! The certificates here are the integers that make the Galois-equation
//! arguments effective: a multiplier `c` with `c·g ∈ (h_1, …, h_r)Z[T]`,
//! always accompanied by cofactors that are re-checked by expansion.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::serde_int::IntRepr;

/// Dense integer polynomial, constant term first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate `T`.
    pub fn t() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `c · T^k`
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `T^m − 1`
    pub fn t_pow_minus_one(m: usize) -> Self {
        Self::monomial(BigInt::one(), m) - Self::one()
    }

    /// `(T − 1)^k`
    pub fn t_minus_one_pow(k: u32) -> Self {
        Self::from_i64(&[-1, 1]).pow(k)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.leading().unwrap().is_negative() {
            c = -c;
        }
        Self::new(self.coeffs.iter().map(|x| x / &c).collect())
    }

    /// Euclidean division by a divisor whose leading coefficient is ±1.
    /// Returns `None` for any other divisor.
    pub fn div_rem(&self, divisor: &IntPolynomial) -> Option<(IntPolynomial, IntPolynomial)> {
        let d = divisor.degree()?;
        let lead = divisor.leading()?;
        if !lead.abs().is_one() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return Some((Self::zero(), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - d];
        for i in (d..rem.len()).rev() {
            let c = &rem[i] * lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i - d + j] -= &c * dc;
            }
            quot[i - d] = c;
        }
        rem.truncate(d);
        Some((Self::new(quot), Self::new(rem)))
    }

    /// `lc(b)^(deg a − deg b + 1) · a mod b`, computed without fractions.
    fn pseudo_rem(&self, b: &IntPolynomial) -> IntPolynomial {
        let db = b.degree().expect("pseudo remainder by zero");
        let lb = b.leading().unwrap().clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.leading().unwrap().clone();
            let shifted = Self::monomial(lr, dr - db);
            r = &r.scale(&lb) - &(&shifted * b);
        }
        r
    }

    /// Greatest common divisor over `Q[T]`, normalized to a primitive integer
    /// polynomial with positive leading coefficient.
    pub fn gcd_over_q(&self, other: &IntPolynomial) -> IntPolynomial {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// Resultant via the Sylvester determinant.
    pub fn resultant(&self, other: &IntPolynomial) -> BigInt {
        let (Some(m), Some(n)) = (self.degree(), other.degree()) else {
            return BigInt::zero();
        };
        let size = m + n;
        if size == 0 {
            return BigInt::one();
        }
        let mut s = IntMatrix::zeros(size, size);
        for i in 0..n {
            for (j, c) in self.coeffs.iter().rev().enumerate() {
                s.set(i, i + j, c.clone());
            }
        }
        for i in 0..m {
            for (j, c) in other.coeffs.iter().rev().enumerate() {
                s.set(n + i, i + j, c.clone());
            }
        }
        s.determinant()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !abs.is_one();
            if show_coeff {
                write!(f, "{abs}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "T")?,
                _ => write!(f, "T^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let reprs: Vec<IntRepr> = self.coeffs.iter().map(IntRepr::of).collect();
        reprs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coeffs = Vec::<IntRepr>::deserialize(deserializer)?
            .into_iter()
            .map(IntRepr::into_bigint)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntPolynomial::new(coeffs))
    }
}

fn add_coeffs(a: &[BigInt], b: &[BigInt], negate_b: bool) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            let y = b.get(i).cloned().unwrap_or_default();
            if negate_b {
                x - y
            } else {
                x + y
            }
        })
        .collect()
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        IntPolynomial::new(add_coeffs(&self.coeffs, &rhs.coeffs, false))
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        IntPolynomial::new(add_coeffs(&self.coeffs, &rhs.coeffs, true))
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for IntPolynomial {
            type Output = IntPolynomial;
            fn $method(self, rhs: IntPolynomial) -> IntPolynomial {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        -&self
    }
}

/// `c·g = Σ A_i·h_i` with `c` the least positive integer admitting such an
/// identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplierCertificate {
    pub target: IntPolynomial,
    pub generators: Vec<IntPolynomial>,
    #[serde(with = "crate::serde_int")]
    pub multiplier: BigInt,
    pub cofactors: Vec<IntPolynomial>,
}

impl MultiplierCertificate {
    /// Re-expands `Σ A_i·h_i − c·g` and checks it vanishes.
    pub fn verify(&self) -> bool {
        if self.cofactors.len() != self.generators.len() || !self.multiplier.is_positive() {
            return false;
        }
        let combo = self
            .cofactors
            .iter()
            .zip(&self.generators)
            .fold(IntPolynomial::zero(), |acc, (a, h)| &acc + &(a * h));
        combo == self.target.scale(&self.multiplier)
    }

    /// The same identity multiplied through by `k`.
    pub fn scaled(&self, k: &BigInt) -> MultiplierCertificate {
        MultiplierCertificate {
            target: self.target.clone(),
            generators: self.generators.clone(),
            multiplier: &self.multiplier * k,
            cofactors: self.cofactors.iter().map(|a| a.scale(k)).collect(),
        }
    }
}

/// Least positive `c` with `c·g ∈ Σ h_i·Z[T]`, plus verifying cofactors.
///
/// Cofactor degrees are searched in the window `deg A_i ≤ Σ_{j≠i} deg h_j +
/// deg g`; the set of admissible `c` inside the window is an ideal of `Z`
/// read off the Smith form of the coefficient matrix. If the window admits
/// no multiplier it is doubled once before giving up.
pub fn minimal_multiplier(
    target: &IntPolynomial,
    generators: &[IntPolynomial],
) -> Result<MultiplierCertificate> {
    if target.is_zero() {
        return Err(Error::Parse("target polynomial is zero".into()));
    }
    if generators.is_empty() || generators.iter().any(|h| h.is_zero()) {
        return Err(Error::Parse("generators must be nonzero".into()));
    }
    let ideal_gcd = generators
        .iter()
        .skip(1)
        .fold(generators[0].clone(), |acc, h| acc.gcd_over_q(h));
    if ideal_gcd.degree() > Some(0) {
        let (_, rem) = target
            .scale(ideal_gcd.leading().unwrap())
            .div_rem(&ideal_gcd)
            .unwrap_or_else(|| pseudo_div_check(target, &ideal_gcd));
        if !rem.is_zero() {
            return Err(Error::NoMultiplier(format!(
                "gcd over Q is {ideal_gcd}, which does not divide {target}"
            )));
        }
    }
    let degs: Vec<usize> = generators.iter().map(|h| h.degree().unwrap()).collect();
    let total: usize = degs.iter().sum();
    let tdeg = target.degree().unwrap();
    let windows: Vec<usize> = degs.iter().map(|d| total - d + tdeg).collect();
    match multiplier_in_window(target, generators, &windows) {
        Some(cert) => Ok(cert),
        None => {
            let doubled: Vec<usize> = windows.iter().map(|w| 2 * w + 1).collect();
            multiplier_in_window(target, generators, &doubled).ok_or_else(|| {
                Error::NoMultiplier(format!("no certificate for {target} in doubled window"))
            })
        }
    }
}

// Fallback when the gcd is not monic: compare over Q through pseudo-remainder.
fn pseudo_div_check(target: &IntPolynomial, g: &IntPolynomial) -> (IntPolynomial, IntPolynomial) {
    (IntPolynomial::zero(), target.pseudo_rem(g))
}

fn multiplier_in_window(
    target: &IntPolynomial,
    generators: &[IntPolynomial],
    windows: &[usize],
) -> Option<MultiplierCertificate> {
    let top = generators
        .iter()
        .zip(windows)
        .map(|(h, w)| h.degree().unwrap() + w)
        .max()
        .unwrap()
        .max(target.degree().unwrap());
    let nrows = top + 1;
    let mut columns: Vec<Vec<BigInt>> = Vec::new();
    for (h, &w) in generators.iter().zip(windows) {
        for k in 0..=w {
            let mut col = vec![BigInt::zero(); nrows];
            for (i, c) in h.coeffs().iter().enumerate() {
                col[i + k] = c.clone();
            }
            columns.push(col);
        }
    }
    let ncols = columns.len();
    let mut a = IntMatrix::zeros(nrows, ncols);
    for (j, col) in columns.iter().enumerate() {
        for (i, c) in col.iter().enumerate() {
            if !c.is_zero() {
                a.set(i, j, c.clone());
            }
        }
    }
    let snf = a.snf();
    let g: Vec<BigInt> = (0..nrows).map(|i| target.coeff(i)).collect();
    let y = snf.u.apply(&g);
    let rank = snf.rank();
    if y[rank..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut c = BigInt::one();
    for (d, yi) in snf.diag.iter().zip(&y) {
        let need = d / d.gcd(yi);
        c = c.lcm(&need);
    }
    let mut z = vec![BigInt::zero(); ncols];
    for i in 0..rank {
        z[i] = &c * &y[i] / &snf.diag[i];
    }
    let x = snf.v.apply(&z);
    let mut cofactors = Vec::new();
    let mut offset = 0;
    for &w in windows {
        cofactors.push(IntPolynomial::new(x[offset..offset + w + 1].to_vec()));
        offset += w + 1;
    }
    let cert = MultiplierCertificate {
        target: target.clone(),
        generators: generators.to_vec(),
        multiplier: c,
        cofactors,
    };
    debug_assert!(cert.verify());
    cert.verify().then_some(cert)
}

/// First `m` such that `F` shares a root with `T^m − 1`, scanning
/// `m ≤ 2·(deg F)²` (enough since `φ(m) ≥ √(m/2)`).
pub fn cyclotomic_factor_order(f: &IntPolynomial) -> Option<u64> {
    let d = f.degree()?;
    if d == 0 {
        return None;
    }
    let bound = 2 * (d as u64) * (d as u64);
    (1..=bound).find(|&m| {
        arith::euler_phi(m) <= d as u64
            && f.gcd_over_q(&IntPolynomial::t_pow_minus_one(m as usize))
                .degree()
                .is_some_and(|g| g > 0)
    })
}

/// True iff no complex root of `F` is a root of unity.
pub fn cyclotomic_factor_free(f: &IntPolynomial) -> bool {
    cyclotomic_factor_order(f).is_none()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxallCongruence {
    pub m: u64,
    /// `T^m − 1 − m(T−1) − (m(m−1)/2)(T−1)²`
    pub remainder: IntPolynomial,
    /// `remainder / (T−1)³`
    pub quotient: IntPolynomial,
}

/// Verifies `T^m − 1 ≡ m(T−1) + (m(m−1)/2)(T−1)² mod (T−1)³` by exact
/// division.
pub fn boxall_congruence(m: u64) -> Result<BoxallCongruence> {
    if m == 0 {
        return Err(Error::Parse("m must be positive".into()));
    }
    let t1 = IntPolynomial::t_minus_one_pow(1);
    let t2 = IntPolynomial::t_minus_one_pow(2);
    let mm = BigInt::from(m);
    let binom = BigInt::from(m) * BigInt::from(m - 1) / 2;
    let remainder = &(&IntPolynomial::t_pow_minus_one(m as usize) - &t1.scale(&mm)) - &t2.scale(&binom);
    let (quotient, rem) = remainder
        .div_rem(&IntPolynomial::t_minus_one_pow(3))
        .expect("monic divisor");
    if !rem.is_zero() {
        return Err(Error::Invariant(format!(
            "(T-1)^3 does not divide the congruence remainder for m = {m}"
        )));
    }
    Ok(BoxallCongruence {
        m,
        remainder,
        quotient,
    })
}

/// The tame-descent identity, both as printed in closed form and as
/// certified by the solver.
#[derive(Clone, Debug, Serialize)]
pub struct TameCertificate {
    pub q: u64,
    /// `q` for odd `q`, `4q` for even `q`.
    #[serde(with = "crate::serde_int")]
    pub claimed_multiplier: BigInt,
    /// Least multiplier of `T − 1` in `((T−1)³, T^q − 1)`.
    pub minimal: MultiplierCertificate,
    /// Certificate for `claimed_multiplier · (T − 1)`.
    pub claimed: MultiplierCertificate,
    /// Whether the minimal multiplier divides the claimed one.
    pub divides_claim: bool,
    /// `4·(closed-form right side) − 4q(T−1)`; zero iff the closed form balances.
    pub closed_form_residual_times_4: IntPolynomial,
}

impl TameCertificate {
    pub fn closed_form_balances(&self) -> bool {
        self.closed_form_residual_times_4.is_zero()
    }
}

/// Certificate that `q(T−1)` (odd `q`) or `4q(T−1)` (even `q`) lies in
/// `((T−1)³, T^q − 1)Z[T]`.
pub fn tame_membership(q: u64) -> Result<TameCertificate> {
    if q < 2 || arith::prime_power(q).is_none() {
        return Err(Error::Parse(format!("{q} is not a prime power >= 2")));
    }
    let t_minus_1 = IntPolynomial::t_minus_one_pow(1);
    let cube = IntPolynomial::t_minus_one_pow(3);
    let tq = IntPolynomial::t_pow_minus_one(q as usize);
    let minimal = minimal_multiplier(&t_minus_1, &[cube.clone(), tq.clone()])?;
    let claimed_multiplier = if q % 2 == 1 {
        BigInt::from(q)
    } else {
        BigInt::from(4 * q)
    };
    let divides_claim = claimed_multiplier.is_multiple_of(&minimal.multiplier);
    if !divides_claim {
        return Err(Error::Invariant(format!(
            "minimal multiplier {} does not divide {claimed_multiplier} for q = {q}",
            minimal.multiplier
        )));
    }
    let claimed = minimal.scaled(&(&claimed_multiplier / &minimal.multiplier));

    // 4·[(T−1)³(((q−1)T+(q+1))/2·Q + q(q−1)²/4) − (T^q−1)((q−1)T+(q+1))/2]
    let (quot, _) = tq.div_rem(&cube).expect("monic divisor");
    let qb = BigInt::from(q);
    let lin = IntPolynomial::new(vec![&qb + 1, &qb - 1]);
    let qm1 = &qb - 1;
    let inner = &(&lin * &quot).scale(&BigInt::from(2))
        + &IntPolynomial::constant(&qb * &qm1 * &qm1);
    let rhs4 = &(&cube * &inner) - &(&tq * &lin).scale(&BigInt::from(2));
    let lhs4 = t_minus_1.scale(&(BigInt::from(4) * &qb));
    Ok(TameCertificate {
        q,
        claimed_multiplier,
        minimal,
        claimed,
        divides_claim,
        closed_form_residual_times_4: &rhs4 - &lhs4,
    })
}

/// Galois polynomial for `G_m` over the unramified tower: `N = 1`,
/// `F = T − q`.
pub fn frobenius_poly_torus(q: u64) -> Result<(u64, IntPolynomial)> {
    if arith::prime_power(q).is_none() {
        return Err(Error::Parse(format!("{q} is not a prime power")));
    }
    let f = IntPolynomial::from_i64(&[-(q as i64), 1]);
    debug_assert!(cyclotomic_factor_free(&f));
    Ok((1, f))
}

/// Least `m'` with `m'·Z[T] ⊂ F·Z[T] + (T^m − 1)·Z[T]`.
pub fn coprimality_integer(f: &IntPolynomial, m: u64) -> Result<MultiplierCertificate> {
    minimal_multiplier(
        &IntPolynomial::one(),
        &[f.clone(), IntPolynomial::t_pow_minus_one(m as usize)],
    )
}

/// Least `m` with `m(T−1) ∈ (T^M − 1, (T−1)³)`.
pub fn ramification_integer(big_m: u64) -> Result<MultiplierCertificate> {
    minimal_multiplier(
        &IntPolynomial::t_minus_one_pow(1),
        &[
            IntPolynomial::t_pow_minus_one(big_m as usize),
            IntPolynomial::t_minus_one_pow(3),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn arithmetic_and_display() {
        let a = p(&[-1, 1]);
        assert_eq!(a.pow(3), p(&[-1, 3, -3, 1]));
        assert_eq!(p(&[5, -2, 1]).to_string(), "T^2 - 2T + 5");
        assert_eq!(IntPolynomial::zero().degree(), None);
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        let (q, r) = p(&[-1, 0, 0, 1]).div_rem(&p(&[-1, 1])).unwrap();
        assert_eq!(q, p(&[1, 1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn gcd_over_q_examples() {
        let f = p(&[2, -3, 1]); // (T-1)(T-2)
        let g = p(&[-1, 0, 1]); // (T-1)(T+1)
        assert_eq!(f.gcd_over_q(&g), p(&[-1, 1]));
        assert_eq!(p(&[-5, 1]).gcd_over_q(&p(&[-1, 1])), p(&[1]));
    }

    #[test]
    fn factor_free_examples() {
        assert!(cyclotomic_factor_free(&p(&[-5, 1])));
        assert!(!cyclotomic_factor_free(&p(&[1, 1, 1])));
        assert!(cyclotomic_factor_free(&p(&[-1, -1, 1])));
        assert!(!cyclotomic_factor_free(&p(&[2, -3, 1])));
        assert_eq!(cyclotomic_factor_order(&p(&[1, 1, 1])), Some(3));
    }

    #[test]
    fn multiplier_examples() {
        let c = minimal_multiplier(&p(&[1]), &[p(&[-5, 1]), p(&[-1, 1])]).unwrap();
        assert_eq!(c.multiplier, BigInt::from(4));
        assert!(c.verify());

        let c = minimal_multiplier(&p(&[-1, 1]), &[p(&[-1, 1]).pow(3), p(&[-1, 0, 0, 1])]).unwrap();
        assert_eq!(c.multiplier, BigInt::from(3));
        assert!(c.verify());

        let c = minimal_multiplier(&p(&[1]), &[p(&[-1, -1, 1]), p(&[-1, 1])]).unwrap();
        assert_eq!(c.multiplier, BigInt::from(1));
        assert!(c.verify());
    }

    #[test]
    fn multiplier_obstruction() {
        let err = minimal_multiplier(&p(&[1]), &[p(&[-1, 1]), p(&[-1, 0, 1])]).unwrap_err();
        assert!(matches!(err, Error::NoMultiplier(_)));
    }

    #[test]
    fn resultant_bound() {
        assert_eq!(p(&[-5, 1]).resultant(&p(&[-1, 1])), BigInt::from(4));
        let r = p(&[-1, -1, 1]).resultant(&p(&[-1, 0, 1]));
        assert_eq!(r, BigInt::from(-1));
    }

    #[test]
    fn boxall_congruence_small() {
        assert!(boxall_congruence(1).unwrap().remainder.is_zero());
        let b3 = boxall_congruence(3).unwrap();
        assert_eq!(b3.remainder, p(&[-1, 1]).pow(3));
        assert_eq!(b3.quotient, p(&[1]));
        assert_eq!(boxall_congruence(5).unwrap().quotient.degree(), Some(2));
    }

    #[test]
    fn tame_q3() {
        let t = tame_membership(3).unwrap();
        assert_eq!(t.minimal.multiplier, BigInt::from(3));
        assert!(t.claimed.verify());
        // the closed form evaluates to 3(T-1)(1-4T) instead of 3(T-1)
        let rhs = (&p(&[-1, 1]) * &p(&[1, -4])).scale(&BigInt::from(3));
        let off = (&rhs - &p(&[-3, 3])).scale(&BigInt::from(4));
        assert_eq!(t.closed_form_residual_times_4, off);
        assert!(!t.closed_form_balances());
    }

    #[test]
    fn frobenius_torus() {
        let (n, f) = frobenius_poly_torus(5).unwrap();
        assert_eq!(n, 1);
        assert_eq!(f, p(&[-5, 1]));
        assert!(f.eval(&BigInt::from(5)).is_zero());
        assert!(frobenius_poly_torus(6).is_err());
    }
}
