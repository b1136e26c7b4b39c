//! Finite abelian `p`-groups with an action by automorphisms, and the
//! construction of `σ` with `(σ − 1)Q ∈ A[p] ∖ {0}`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Largest group the enumerations will build.
pub const MAX_GROUP_ORDER: usize = 100_000;

/// `A = ⊕ Z/p^{n_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteModule {
    pub p: u64,
    pub exponents: Vec<u32>,
}

pub type Element = Vec<u64>;

impl FiniteModule {
    pub fn new(p: u64, exponents: Vec<u32>) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if exponents.is_empty() || exponents.contains(&0) {
            return Err(Error::Parse("cyclic factors must be nontrivial".into()));
        }
        if exponents.iter().any(|&n| p.checked_pow(n).is_none_or(|m| m > u32::MAX as u64)) {
            return Err(Error::Overflow("cyclic factor order".into()));
        }
        Ok(FiniteModule { p, exponents })
    }

    /// Parses `"3^2,9"`: each factor is `p^a` or a prime power.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut p = None;
        let mut exps = Vec::new();
        for part in spec.split(',') {
            let part = part.trim();
            let (base, e) = match part.split_once('^') {
                Some((b, e)) => (
                    b.trim().parse::<u64>().map_err(|e| Error::Parse(format!("{part}: {e}")))?,
                    e.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{part}: {e}")))?,
                ),
                None => {
                    let q = part.parse::<u64>().map_err(|e| Error::Parse(format!("{part}: {e}")))?;
                    arith::prime_power(q).ok_or_else(|| Error::Parse(format!("{q} is not a prime power")))?
                }
            };
            if *p.get_or_insert(base) != base {
                return Err(Error::Parse("all factors must be powers of one prime".into()));
            }
            exps.push(e);
        }
        Self::new(p.ok_or_else(|| Error::Parse("empty module".into()))?, exps)
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn modulus(&self, i: usize) -> u64 {
        self.p.pow(self.exponents[i])
    }

    pub fn order(&self) -> u128 {
        (0..self.rank()).map(|i| self.modulus(i) as u128).product()
    }

    pub fn zero(&self) -> Element {
        vec![0; self.rank()]
    }

    pub fn reduce(&self, x: &[i64]) -> Element {
        x.iter()
            .enumerate()
            .map(|(i, &v)| v.rem_euclid(self.modulus(i) as i64) as u64)
            .collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Element {
        (0..self.rank()).map(|i| (a[i] + b[i]) % self.modulus(i)).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Element {
        (0..self.rank())
            .map(|i| (a[i] + self.modulus(i) - b[i]) % self.modulus(i))
            .collect()
    }

    pub fn scale(&self, k: u64, a: &[u64]) -> Element {
        (0..self.rank())
            .map(|i| (k as u128 * a[i] as u128 % self.modulus(i) as u128) as u64)
            .collect()
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// Generators of `A[p^k]`: `p^{max(n_i − k, 0)}·e_i`.
    pub fn torsion_basis(&self, k: u32) -> Vec<Element> {
        (0..self.rank())
            .map(|i| {
                let mut e = self.zero();
                e[i] = self.p.pow(self.exponents[i].saturating_sub(k)) % self.modulus(i);
                e
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order()).map(move |mut idx| {
            (0..self.rank())
                .map(|i| {
                    let m = self.modulus(i) as u128;
                    let v = (idx % m) as u64;
                    idx /= m;
                    v
                })
                .collect()
        })
    }
}

/// An endomorphism `(σx)_i = Σ_j M_ij x_j`, row `i` reduced mod `p^{n_i}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModuleMap {
    pub rows: Vec<Vec<u64>>,
}

impl fmt::Debug for ModuleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows)
    }
}

impl ModuleMap {
    pub fn identity(a: &FiniteModule) -> Self {
        let g = a.rank();
        ModuleMap {
            rows: (0..g)
                .map(|i| (0..g).map(|j| u64::from(i == j) % a.modulus(i)).collect())
                .collect(),
        }
    }

    /// Checks well-definedness and bijectivity.
    pub fn new(a: &FiniteModule, m: &[Vec<i64>]) -> Result<Self> {
        let g = a.rank();
        if m.len() != g || m.iter().any(|r| r.len() != g) {
            return Err(Error::InvalidAction(format!("expected a {g}x{g} matrix")));
        }
        let rows: Vec<Vec<u64>> = m.iter().enumerate().map(|(i, r)| {
            r.iter().map(|&v| v.rem_euclid(a.modulus(i) as i64) as u64).collect()
        }).collect();
        for i in 0..g {
            for j in 0..g {
                let (ni, nj) = (a.exponents[i], a.exponents[j]);
                if ni > nj && rows[i][j] % a.p.pow(ni - nj) != 0 {
                    return Err(Error::InvalidAction(format!(
                        "entry ({i},{j}) must be divisible by {}",
                        a.p.pow(ni - nj)
                    )));
                }
            }
        }
        let map = ModuleMap { rows };
        // an endomorphism of a finite p-group is bijective iff injective on A[p]
        let socle = a.torsion_basis(1);
        let dim = socle.len();
        let injective = (1..a.p.pow(dim as u32)).all(|mut idx| {
            let mut x = a.zero();
            for b in &socle {
                x = a.add(&x, &a.scale(idx % a.p, b));
                idx /= a.p;
            }
            !a.is_zero(&map.apply(a, &x))
        });
        if !injective {
            return Err(Error::InvalidAction("matrix is not invertible on A".into()));
        }
        Ok(map)
    }

    pub fn apply(&self, a: &FiniteModule, x: &[u64]) -> Element {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let m = a.modulus(i) as u128;
                (r.iter().zip(x).map(|(&c, &v)| c as u128 * v as u128 % m).sum::<u128>() % m) as u64
            })
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, a: &FiniteModule, other: &ModuleMap) -> ModuleMap {
        let g = a.rank();
        ModuleMap {
            rows: (0..g)
                .map(|i| {
                    let m = a.modulus(i) as u128;
                    (0..g)
                        .map(|j| {
                            ((0..g).map(|k| self.rows[i][k] as u128 * other.rows[k][j] as u128 % m).sum::<u128>() % m)
                                as u64
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn pow(&self, a: &FiniteModule, mut e: u64) -> ModuleMap {
        let mut acc = ModuleMap::identity(a);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(a, &base);
            }
            base = base.compose(a, &base);
            e >>= 1;
        }
        acc
    }

    pub fn fixes(&self, a: &FiniteModule, x: &[u64]) -> bool {
        self.apply(a, x) == x
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaloisAction {
    pub module: FiniteModule,
    pub generators: Vec<ModuleMap>,
}

impl GaloisAction {
    pub fn new(module: FiniteModule, generators: &[Vec<Vec<i64>>]) -> Result<Self> {
        let generators = generators
            .iter()
            .map(|m| ModuleMap::new(&module, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(GaloisAction { module, generators })
    }

    /// Parses a JSON list of matrices.
    pub fn from_json(module: FiniteModule, s: &str) -> Result<Self> {
        let mats: Vec<Vec<Vec<i64>>> =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("action JSON: {e}")))?;
        Self::new(module, &mats)
    }

    /// Group elements in breadth-first order from the identity, each with
    /// the first generator word reaching it.
    pub fn enumerate(&self) -> Result<Vec<(Vec<usize>, ModuleMap)>> {
        let a = &self.module;
        let id = ModuleMap::identity(a);
        let mut seen = HashSet::from([id.clone()]);
        let mut out = vec![(Vec::new(), id.clone())];
        let mut queue = VecDeque::from([(Vec::new(), id)]);
        while let Some((word, m)) = queue.pop_front() {
            for (gi, g) in self.generators.iter().enumerate() {
                let next = g.compose(a, &m);
                if seen.insert(next.clone()) {
                    if seen.len() > MAX_GROUP_ORDER {
                        return Err(Error::GroupTooLarge(MAX_GROUP_ORDER));
                    }
                    let mut w = word.clone();
                    w.push(gi);
                    out.push((w.clone(), next.clone()));
                    queue.push_back((w, next));
                }
            }
        }
        Ok(out)
    }

    pub fn fixes(&self, x: &[u64]) -> bool {
        self.generators.iter().all(|g| g.fixes(&self.module, x))
    }
}

/// Index of the first generator not fixing `A[p]` (or `A[4]` when `p = 2`).
pub fn hypothesis_violation(action: &GaloisAction) -> Option<usize> {
    let a = &action.module;
    let k = if a.p == 2 { 2 } else { 1 };
    let basis = a.torsion_basis(k);
    action
        .generators
        .iter()
        .position(|g| !basis.iter().all(|b| g.fixes(a, b)))
}

pub fn check_hypotheses(action: &GaloisAction) -> bool {
    hypothesis_violation(action).is_none()
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxallWitness {
    /// Least `n` with `[p^n]Q` fixed.
    pub n: u32,
    pub sigma1_word: Vec<usize>,
    pub sigma1: ModuleMap,
    /// `σ = σ_1^{p^{n−1}}`.
    pub exponent: u64,
    pub sigma: ModuleMap,
    pub x: Element,
    /// `x_i = (σ_i − 1)[p^{n−i}]Q` for `i = 1..n`.
    pub steps: Vec<Element>,
    /// Indices `i` with `x_{i+1} ≠ x_i`; empty when the induction holds.
    pub claim_violations: Vec<u32>,
}

impl BoxallWitness {
    /// `(σ − 1)Q = x`, `[p]x = 0`, `x ≠ 0`.
    pub fn validates(&self, a: &FiniteModule, q: &[u64]) -> bool {
        let moved = a.sub(&self.sigma.apply(a, q), q);
        moved == self.x && a.is_zero(&a.scale(a.p, &self.x)) && !a.is_zero(&self.x)
    }
}

pub fn boxall_construct(action: &GaloisAction, q: &[u64]) -> Result<BoxallWitness> {
    let a = &action.module;
    if q.len() != a.rank() {
        return Err(Error::Dimension("Q has the wrong rank".into()));
    }
    let q = a.reduce(&q.iter().map(|&v| v as i64).collect::<Vec<_>>());
    if let Some(i) = hypothesis_violation(action) {
        return Err(Error::HypothesesViolated(i));
    }
    if action.fixes(&q) {
        return Err(Error::PointFixed);
    }
    let p = a.p;
    let mut n = 1;
    while !action.fixes(&a.scale(p.pow(n), &q)) {
        n += 1;
    }
    let q_at = |i: u32| a.scale(p.pow(n - i), &q);
    let q1 = q_at(1);
    let (word, sigma1) = action
        .enumerate()?
        .into_iter()
        .find(|(_, m)| !m.fixes(a, &q1))
        .ok_or(Error::PointFixed)?;
    let mut steps = Vec::with_capacity(n as usize);
    let mut sigma_i = sigma1.clone();
    for i in 1..=n {
        if i > 1 {
            sigma_i = sigma_i.pow(a, p);
        }
        let qi = q_at(i);
        steps.push(a.sub(&sigma_i.apply(a, &qi), &qi));
    }
    let claim_violations = (1..n).filter(|&i| steps[i as usize] != steps[i as usize - 1]).collect();
    Ok(BoxallWitness {
        n,
        sigma1_word: word,
        sigma1,
        exponent: p.pow(n - 1),
        x: steps[n as usize - 1].clone(),
        sigma: sigma_i,
        steps,
        claim_violations,
    })
}

/// Every group element `σ` with `(σ − 1)Q ∈ A[p] ∖ {0}`, with its `x`.
pub fn boxall_oracle(action: &GaloisAction, q: &[u64]) -> Result<Vec<(ModuleMap, Element)>> {
    let a = &action.module;
    if a.order() > MAX_GROUP_ORDER as u128 * 100 {
        return Err(Error::GroupTooLarge(MAX_GROUP_ORDER));
    }
    Ok(action
        .enumerate()?
        .into_iter()
        .filter_map(|(_, m)| {
            let x = a.sub(&m.apply(a, q), q);
            (!a.is_zero(&x) && a.is_zero(&a.scale(a.p, &x))).then_some((m, x))
        })
        .collect())
}

/// A random instance `σ = I + p·N` (`I + 4N` for `p = 2`) on a random
/// module, together with a point `Q` it moves.
pub fn random_instance<R: Rng>(rng: &mut R) -> (GaloisAction, Element) {
    loop {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let rank = rng.gen_range(1..=3);
        let max_e = if p == 5 { 2 } else { 4 };
        let exps: Vec<u32> = (0..rank).map(|_| rng.gen_range(1..=max_e)).collect();
        let module = FiniteModule::new(p, exps.clone()).unwrap();
        if module.order() > 20_000 {
            continue;
        }
        let lift = if p == 2 { 4 } else { p as i64 };
        let m: Vec<Vec<i64>> = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| {
                        let div = if exps[i] > exps[j] { p.pow(exps[i] - exps[j]) as i64 } else { 1 };
                        let entry = div * rng.gen_range(0..p as i64 * 2) * lift;
                        entry + i64::from(i == j)
                    })
                    .collect()
            })
            .collect();
        let Ok(action) = GaloisAction::new(module.clone(), &[m]) else {
            continue;
        };
        let q: Element = (0..rank).map(|i| rng.gen_range(0..module.modulus(i))).collect();
        if !action.fixes(&q) {
            return (action, q);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cyclic(spec: &str, k: i64) -> GaloisAction {
        GaloisAction::new(FiniteModule::parse(spec).unwrap(), &[vec![vec![k]]]).unwrap()
    }

    #[test]
    fn parsing() {
        assert_eq!(FiniteModule::parse("3^2,9").unwrap().exponents, vec![2, 2]);
        assert_eq!(FiniteModule::parse("27").unwrap().exponents, vec![3]);
        assert!(FiniteModule::parse("3,4").is_err());
        assert!(FiniteModule::parse("6").is_err());
        let a = FiniteModule::parse("3,9").unwrap();
        assert!(GaloisAction::new(a.clone(), &[vec![vec![1, 0], vec![1, 1]]]).is_err());
        assert!(GaloisAction::new(a, &[vec![vec![1, 0], vec![3, 1]]]).is_ok());
    }

    #[test]
    fn hypothesis_examples() {
        assert!(check_hypotheses(&cyclic("9", 4)));
        assert!(!check_hypotheses(&cyclic("9", 2)));
        assert!(check_hypotheses(&cyclic("8", 5)));
        assert!(!check_hypotheses(&cyclic("8", 3)));
    }

    #[test]
    fn worked_instances() {
        let w = boxall_construct(&cyclic("9", 4), &[1]).unwrap();
        assert_eq!((w.n, w.sigma.rows[0][0], w.x.clone()), (1, 4, vec![3]));
        let w = boxall_construct(&cyclic("27", 4), &[1]).unwrap();
        assert_eq!((w.n, w.exponent, w.sigma.rows[0][0], w.x.clone()), (2, 3, 10, vec![9]));
        assert!(w.claim_violations.is_empty());
        let trivial = GaloisAction::new(FiniteModule::parse("3,3").unwrap(), &[vec![vec![1, 0], vec![0, 1]]]).unwrap();
        assert_eq!(boxall_construct(&trivial, &[1, 2]).unwrap_err(), Error::PointFixed);
    }

    #[test]
    fn oracle_examples() {
        let sols = boxall_oracle(&cyclic("9", 4), &[1]).unwrap();
        let xs: Vec<(u64, Element)> = sols.iter().map(|(m, x)| (m.rows[0][0], x.clone())).collect();
        assert!(xs.contains(&(4, vec![3])) && xs.contains(&(7, vec![6])));
        assert!(boxall_oracle(&cyclic("3", 1), &[1]).unwrap().is_empty());
        let trivial = cyclic("9", 1);
        assert!(FiniteModule::parse("9").unwrap().elements().all(|q| boxall_oracle(&trivial, &q).unwrap().is_empty()));
    }

    #[test]
    fn randomized_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..60 {
            let (action, q) = random_instance(&mut rng);
            assert!(check_hypotheses(&action));
            let w = boxall_construct(&action, &q).unwrap();
            assert!(w.validates(&action.module, &q), "{action:?} {q:?}");
            assert!(w.claim_violations.is_empty(), "{action:?} {q:?}");
            let sols = boxall_oracle(&action, &q).unwrap();
            assert!(sols.iter().any(|(m, x)| *m == w.sigma && *x == w.x));
        }
    }
}
