//! Independent evaluators used by the acceptance criteria.
//!
//! The tower evaluator below repeats the tower construction with machine
//! integers at a fixed small precision: Teichmüller lifts by `q`-power
//! iteration instead of Newton steps, powers by repeated multiplication, its
//! own CRT split of exponents and its own expansion of `Φ_{p^k}(x + 1)`. It
//! shares only the residue-field conventions (modulus and generator choice),
//! which are part of the definition of the fixed embedding.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;
use num_rational::Ratio;

use crate::arith;
use crate::cyclo_exact::TorusPoint;
use crate::finite_field::{smallest_irreducible, ResidueField};
use crate::torus_geom::Subvariety;

pub const ORACLE_PRECISION: u32 = 10;

type Unr = Vec<u128>;
type Elem = Vec<Unr>;

pub struct OracleTower {
    p: u128,
    modulus: u128,
    f: usize,
    e: usize,
    m_prime: u64,
    pk: u64,
    /// `g`, monic, constant term first.
    g: Vec<u128>,
    /// `Φ_{p^k}(x + 1)`, monic, constant term first.
    eis: Vec<u128>,
    roots: Vec<Elem>,
}

fn binomial_row(n: usize, modulus: u128) -> Vec<u128> {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = (row[i - 1] + row[i]) % modulus;
        }
        row = next;
    }
    row
}

impl OracleTower {
    pub fn new(p: u64, level: u64) -> OracleTower {
        let (k, m_prime) = arith::split_prime(level, p);
        let pk = p.pow(k);
        let modulus = (p as u128).pow(ORACLE_PRECISION);
        let f = arith::multiplicative_order(p % m_prime, m_prime).unwrap_or(1) as usize;
        let e = if k == 0 { 1 } else { ((p - 1) * p.pow(k - 1)) as usize };
        let g: Vec<u128> = smallest_irreducible(p, f as u64).into_iter().map(u128::from).collect();
        // Φ_{p^k}(z) = Σ_{i<p} z^{i p^{k−1}}, then z = x + 1
        let eis = if k == 0 {
            vec![0, 1]
        } else {
            let step = p.pow(k - 1) as usize;
            let mut acc = vec![0u128; e + 1];
            for i in 0..p as usize {
                for (j, b) in binomial_row(i * step, modulus).into_iter().enumerate() {
                    acc[j] = (acc[j] + b) % modulus;
                }
            }
            acc
        };
        let mut t = OracleTower {
            p: p as u128,
            modulus,
            f,
            e,
            m_prime,
            pk,
            g,
            eis,
            roots: Vec::new(),
        };
        t.roots = t.build_roots(level);
        t
    }

    fn unr_mul(&self, a: &[u128], b: &[u128]) -> Unr {
        let mut out = vec![0u128; 2 * self.f - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y % self.modulus) % self.modulus;
            }
        }
        for d in (self.f..out.len()).rev() {
            let c = out[d];
            if c == 0 {
                continue;
            }
            for (i, &gi) in self.g[..self.f].iter().enumerate() {
                let idx = d - self.f + i;
                out[idx] = (out[idx] + self.modulus - c * gi % self.modulus) % self.modulus;
            }
            out[d] = 0;
        }
        out.truncate(self.f);
        out
    }

    fn unr_add(&self, a: &[u128], b: &[u128]) -> Unr {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.modulus).collect()
    }

    fn zero(&self) -> Elem {
        vec![vec![0; self.f]; self.e]
    }

    fn one(&self) -> Elem {
        let mut z = self.zero();
        z[0][0] = 1;
        z
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = vec![vec![0u128; self.f]; 2 * self.e - 1];
        for (i, x) in a.iter().enumerate() {
            if x.iter().all(|&c| c == 0) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.unr_add(&out[i + j], &self.unr_mul(x, y));
            }
        }
        for d in (self.e..out.len()).rev() {
            let c = std::mem::replace(&mut out[d], vec![0; self.f]);
            for (i, &ei) in self.eis[..self.e].iter().enumerate() {
                let idx = d - self.e + i;
                let sub: Unr = c.iter().map(|&v| (self.modulus - v * ei % self.modulus) % self.modulus).collect();
                out[idx] = self.unr_add(&out[idx], &sub);
            }
        }
        out.truncate(self.e);
        out
    }

    fn pow(&self, a: &Elem, e: &BigUint) -> Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// `ζ_level^c` for every `c`, with `c/level = u/m' + v/p^k`.
    fn build_roots(&self, level: u64) -> Vec<Elem> {
        let q = BigUint::from(self.p as u64).pow(self.f as u32);
        // Teichmüller lift of the residue generator: t ↦ t^q, N + 1 times
        let rf = ResidueField::new(self.p as u64, self.f as u64).expect("prime");
        let residue = rf.smallest_of_order(self.m_prime).expect("order divides q − 1");
        let mut t = self.zero();
        for (i, &c) in residue.iter().enumerate() {
            t[0][i] = c as u128;
        }
        for _ in 0..ORACLE_PRECISION + 1 {
            t = self.pow(&t, &q);
        }
        let mut tame = vec![self.one()];
        for _ in 1..self.m_prime {
            tame.push(self.mul(tame.last().unwrap(), &t));
        }
        let mut wild = vec![self.one()];
        if self.pk > 1 {
            // ζ_{p^k} = 1 + x; for p = 2, k = 1 the ring is Z_2 and ζ = −1
            let z = if self.e == 1 {
                let mut m = self.zero();
                m[0][0] = self.modulus - 1;
                m
            } else {
                let mut m = self.one();
                m[1][0] = 1;
                m
            };
            for _ in 1..self.pk {
                wild.push(self.mul(wild.last().unwrap(), &z));
            }
        }
        (0..level)
            .map(|c| {
                // u ≡ c·(p^k)^{-1} (mod m'), v ≡ c·m'^{-1} (mod p^k)
                let u = if self.m_prime == 1 {
                    0
                } else {
                    c % self.m_prime * arith::mod_inverse(self.pk % self.m_prime, self.m_prime).unwrap() % self.m_prime
                };
                let v = if self.pk == 1 {
                    0
                } else {
                    c % self.pk * arith::mod_inverse(self.m_prime % self.pk, self.pk).unwrap() % self.pk
                };
                self.mul(&tame[u as usize], &wild[v as usize])
            })
            .collect()
    }

    /// `v_p` of an element, `None` when it vanishes to the working precision.
    fn valuation(&self, a: &Elem) -> Option<Ratio<u64>> {
        let mut best: Option<u64> = None;
        for (j, coeffs) in a.iter().enumerate() {
            for &c in coeffs {
                if c == 0 {
                    continue;
                }
                let mut v = 0u64;
                let mut x = c;
                while x % self.p == 0 {
                    x /= self.p;
                    v += 1;
                }
                let w = v * self.e as u64 + j as u64;
                best = Some(best.map_or(w, |b| b.min(w)));
            }
        }
        best.map(|w| Ratio::new(w, self.e as u64))
    }
}

/// What the oracle sees at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleDistance {
    /// Every generator vanishes to the oracle precision.
    Vanishes,
    Valuation(Ratio<u64>),
}

/// Evaluates the generators of `x` at many points, one tower per level.
pub struct TowerOracle {
    p: u64,
    towers: HashMap<u64, OracleTower>,
}

impl TowerOracle {
    pub fn new(p: u64) -> Self {
        TowerOracle {
            p,
            towers: HashMap::new(),
        }
    }

    pub fn distance(&mut self, point: &TorusPoint, x: &Subvariety) -> OracleDistance {
        let level = x.level_at(point);
        let p = self.p;
        let tower = self.towers.entry(level).or_insert_with(|| OracleTower::new(p, level));
        let mut best: Option<Ratio<u64>> = None;
        for g in &x.generators {
            let mut acc = tower.zero();
            for t in g {
                let s = t.coeff.root + point.pair(&t.exps);
                let c = s.num() * (level / s.den());
                let scale = t
                    .coeff
                    .scale
                    .mod_floor(&BigInt::from(tower.modulus))
                    .to_u128()
                    .expect("reduced scale fits");
                let root = &tower.roots[c as usize];
                for (j, coeffs) in root.iter().enumerate() {
                    for (i, &v) in coeffs.iter().enumerate() {
                        acc[j][i] = (acc[j][i] + v * scale % tower.modulus) % tower.modulus;
                    }
                }
            }
            if let Some(v) = tower.valuation(&acc) {
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        best.map_or(OracleDistance::Vanishes, OracleDistance::Valuation)
    }
}

/// `v_p(Φ_{p^k}(1)) / φ(p^k)`: the valuation of `ζ_{p^k} − 1`, read off the
/// norm `Φ_{p^k}(1) = p` of a uniformizer of a totally ramified extension.
pub fn wild_root_valuation(p: u64, k: u32) -> Ratio<u64> {
    let phi_at_one: u64 = p; // Σ_{i<p} 1^{i p^{k−1}}
    let mut v = 0;
    let mut x = phi_at_one;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Ratio::new(v, arith::euler_phi(p.pow(k)))
}

/// The largest valuation of a nonzero difference of torsion points of order
/// at most `bound`: prime-to-`p` parts differ by a unit, so only `p`-power
/// differences `ζ_{p^k} − 1` with `p^k ≤ bound` count.
pub fn mattuck_expected(p: u64, bound: u64) -> Option<Ratio<u64>> {
    let mut best = None;
    let mut k = 1;
    while p.pow(k) <= bound {
        let v = wild_root_valuation(p, k);
        best = Some(best.map_or(v, |b: Ratio<u64>| b.max(v)));
        k += 1;
    }
    best
}
