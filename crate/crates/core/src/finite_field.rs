//! Polynomials over `F_p` and the residue fields `F_q = F_p[y]/(g)` used both
//! by the unramified tower and by the special-fibre checks.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{Error, Result};

/// Polynomial over `F_p`, constant term first, no trailing zeros.
pub type FpPoly = Vec<u64>;

fn trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn poly_sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

pub fn poly_mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    trim(out)
}

/// `(quotient, remainder)` for a nonzero divisor.
pub fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let db = b.len() - 1;
    let inv = arith::mod_inverse(b[db], p).expect("leading coefficient is a unit");
    let mut r = trim(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = (r[dr] as u128 * inv as u128 % p as u128) as u64;
        q[dr - db] = c;
        for (j, &bj) in b.iter().enumerate() {
            let sub = (c as u128 * bj as u128 % p as u128) as u64;
            r[dr - db + j] = (r[dr - db + j] + p - sub) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn poly_rem(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    poly_divmod(a, b, p).1
}

pub fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = arith::mod_inverse(lead, p).unwrap();
        for c in &mut a {
            *c = (*c as u128 * inv as u128 % p as u128) as u64;
        }
    }
    a
}

pub fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> FpPoly {
    poly_rem(&poly_mul(a, b, p), m, p)
}

pub fn poly_powmod(a: &[u64], e: &BigUint, m: &[u64], p: u64) -> FpPoly {
    let mut acc: FpPoly = poly_rem(&[1], m, p);
    for i in (0..e.bits()).rev() {
        acc = poly_mulmod(&acc, &acc, m, p);
        if e.bit(i) {
            acc = poly_mulmod(&acc, a, m, p);
        }
    }
    acc
}

/// Irreducibility of a monic `g` of degree `f` over `F_p`: `g` has no factor
/// of degree `i ≤ f/2`, i.e. `gcd(g, y^{p^i} − y) = 1`.
pub fn is_irreducible(g: &[u64], p: u64) -> bool {
    let g = trim(g.to_vec());
    let f = g.len().saturating_sub(1);
    if f == 0 {
        return false;
    }
    if f == 1 {
        return true;
    }
    let y: FpPoly = vec![0, 1];
    let pb = BigUint::from(p);
    let mut frob = y.clone();
    for _ in 1..=f / 2 {
        frob = poly_powmod(&frob, &pb, &g, p);
        let diff = poly_sub(&frob, &y, p);
        if poly_gcd(&g, &diff, p).len() > 1 {
            return false;
        }
    }
    true
}

/// The monic irreducible `y^f + c_{f−1}y^{f−1} + … + c_0` minimizing the
/// tuple `(c_{f−1}, …, c_0)` lexicographically.
pub fn smallest_irreducible(p: u64, f: u64) -> FpPoly {
    assert!(f >= 1, "degree must be positive");
    let mut digits = vec![0u64; f as usize];
    loop {
        let mut g = digits.clone();
        g.push(1);
        if is_irreducible(&g, p) {
            return g;
        }
        // increment, least significant digit = c_0
        let mut i = 0;
        loop {
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
            assert!(i < digits.len(), "no irreducible polynomial found");
        }
    }
}

/// `F_q` as `F_p[y]/(g)` with elements stored as coefficient vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueField {
    pub p: u64,
    pub f: u64,
    pub modulus: FpPoly,
}

impl ResidueField {
    pub fn new(p: u64, f: u64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(ResidueField {
            p,
            f,
            modulus: smallest_irreducible(p, f),
        })
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.f as u32)
    }

    /// Element whose base-`p` digits of `a` are its `y`-coefficients.
    pub fn from_int(&self, a: &BigUint) -> FpPoly {
        // to_radix_le rejects radix 2 on some paths, so divide by hand.
        let mut digits = Vec::new();
        let mut rest = a.clone();
        while !rest.is_zero() {
            let (q, r) = rest.div_rem(&BigUint::from(self.p));
            digits.push(r.iter_u64_digits().next().unwrap_or(0));
            rest = q;
        }
        poly_rem(
            &trim(digits),
            &self.modulus,
            self.p,
        )
    }

    /// Inverse of [`ResidueField::from_int`] on reduced elements.
    pub fn to_int(&self, a: &[u64]) -> BigUint {
        a.iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * self.p + d)
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> FpPoly {
        poly_mulmod(a, b, &self.modulus, self.p)
    }

    pub fn pow(&self, a: &[u64], e: &BigUint) -> FpPoly {
        poly_powmod(a, e, &self.modulus, self.p)
    }

    pub fn is_one(&self, a: &[u64]) -> bool {
        a == [1]
    }

    /// Whether `a` has multiplicative order exactly `m`.
    pub fn has_order(&self, a: &[u64], m: u64) -> bool {
        if a.is_empty() || !self.is_one(&self.pow(a, &BigUint::from(m))) {
            return false;
        }
        arith::factorize(m)
            .into_iter()
            .all(|(l, _)| !self.is_one(&self.pow(a, &BigUint::from(m / l))))
    }

    /// The element of exact order `m` (with `m | q − 1`) whose integer
    /// encoding is smallest.
    pub fn smallest_of_order(&self, m: u64) -> Result<FpPoly> {
        let q1 = self.order() - BigUint::one();
        if !(&q1 % m).is_zero() {
            return Err(Error::Invariant(format!(
                "{m} does not divide q - 1 = {q1}"
            )));
        }
        let cofactor = &q1 / m;
        let mut a = BigUint::one();
        let zeta = loop {
            a += 1u32;
            let z = self.pow(&self.from_int(&a), &cofactor);
            if self.has_order(&z, m) {
                break z;
            }
        };
        let mut best: Option<(BigUint, FpPoly)> = None;
        let mut cur: FpPoly = vec![1];
        for c in 1..=m {
            cur = self.mul(&cur, &zeta);
            if c.gcd(&m) == 1 {
                let enc = self.to_int(&cur);
                if best.as_ref().is_none_or(|(b, _)| enc < *b) {
                    best = Some((enc, cur.clone()));
                }
            }
        }
        Ok(best.map(|(_, z)| z).unwrap_or_else(|| vec![1]))
    }
}
