//! Closed subschemes of `G_m^n` given by Laurent generators, and p-adic
//! distances from torsion points to them.
//!
//! A distance is reported through the valuation `r` of the largest generator
//! value, so `d = p^{−r}`. Membership is always decided in `Z[ζ]`; the tower
//! is only consulted for points that are provably off the subscheme.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::cyclo_exact::{torsion_split, CycInt, CycSymbol, GaloisElement, TorusPoint};
use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::local_field::{self, embed_root, Tower, TowerElement, ValuationResult};
use crate::serde_int::IntRepr;

/// `scale · ζ^root`. In JSON a bare integer stands for `root = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CoefficientRepr")]
pub struct Coefficient {
    #[serde(default = "zero_symbol", skip_serializing_if = "CycSymbol::is_zero")]
    pub root: CycSymbol,
    #[serde(with = "crate::serde_int")]
    pub scale: BigInt,
}

fn zero_symbol() -> CycSymbol {
    CycSymbol::ZERO
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoefficientRepr {
    Integer(IntRepr),
    Full {
        #[serde(default = "zero_symbol")]
        root: CycSymbol,
        scale: IntRepr,
    },
}

impl TryFrom<CoefficientRepr> for Coefficient {
    type Error = serde::de::value::Error;

    fn try_from(r: CoefficientRepr) -> std::result::Result<Self, Self::Error> {
        Ok(match r {
            CoefficientRepr::Integer(k) => Coefficient {
                root: CycSymbol::ZERO,
                scale: k.into_bigint()?,
            },
            CoefficientRepr::Full { root, scale } => Coefficient {
                root,
                scale: scale.into_bigint()?,
            },
        })
    }
}

impl Coefficient {
    pub fn integer(k: i64) -> Self {
        Coefficient {
            root: CycSymbol::ZERO,
            scale: BigInt::from(k),
        }
    }

    pub fn root(root: CycSymbol, scale: i64) -> Self {
        Coefficient {
            root,
            scale: BigInt::from(scale),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub exps: Vec<i64>,
    pub coeff: Coefficient,
}

impl Term {
    pub fn new(exps: Vec<i64>, coeff: Coefficient) -> Self {
        Term { exps, coeff }
    }

    /// Exponent of the root of unity this term contributes at `P`.
    fn symbol_at(&self, point: &TorusPoint) -> CycSymbol {
        self.coeff.root + point.pair(&self.exps)
    }
}

pub type LaurentPoly = Vec<Term>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subvariety {
    pub n: usize,
    pub generators: Vec<LaurentPoly>,
}

impl Subvariety {
    pub fn new(n: usize, generators: Vec<LaurentPoly>) -> Result<Self> {
        let x = Subvariety { n, generators };
        x.validate()?;
        Ok(x)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Parse("ambient dimension must be positive".into()));
        }
        if self.generators.is_empty() {
            return Err(Error::Parse("at least one generator is required".into()));
        }
        for g in &self.generators {
            for t in g {
                if t.exps.len() != self.n {
                    return Err(Error::Dimension(format!(
                        "term has {} exponents in G_m^{}",
                        t.exps.len(),
                        self.n
                    )));
                }
            }
        }
        Ok(())
    }

    /// Generators with integer coefficients, each given as
    /// `(exponents, coefficient)` pairs.
    pub fn from_integer_terms(n: usize, generators: &[Vec<(Vec<i64>, i64)>]) -> Result<Self> {
        Self::new(
            n,
            generators
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|(e, c)| Term::new(e.clone(), Coefficient::integer(*c)))
                        .collect()
                })
                .collect(),
        )
    }

    /// `x_1 + x_2 − 1` in `G_m^2`.
    pub fn unit_line() -> Self {
        Self::from_integer_terms(2, &[vec![(vec![1, 0], 1), (vec![0, 1], 1), (vec![0, 0], -1)]])
            .unwrap()
    }

    /// The point `Q` as the subscheme `x_i − ζ^{Q_i}`.
    pub fn point(q: &TorusPoint) -> Self {
        let n = q.dim();
        let generators = q
            .coords()
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let mut e = vec![0; n];
                e[i] = 1;
                vec![
                    Term::new(e, Coefficient::integer(1)),
                    Term::new(vec![0; n], Coefficient::root(s, -1)),
                ]
            })
            .collect();
        Subvariety { n, generators }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let x: Subvariety =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("subvariety JSON: {e}")))?;
        x.validate()?;
        Ok(x)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("subvariety serializes")
    }

    /// Lcm of the coefficient root orders.
    pub fn coefficient_level(&self) -> u64 {
        self.generators
            .iter()
            .flatten()
            .fold(1, |acc, t| acc.lcm(&t.coeff.root.den()))
    }

    pub fn has_rational_coefficients(&self) -> bool {
        self.coefficient_level() == 1
    }

    /// Level of the cyclotomic field holding every generator value at `P`.
    pub fn level_at(&self, point: &TorusPoint) -> u64 {
        point.order().lcm(&self.coefficient_level())
    }

    /// Ideal sum: the generator lists concatenated.
    pub fn intersect(&self, other: &Subvariety) -> Result<Subvariety> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("G_m^{} vs G_m^{}", self.n, other.n)));
        }
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        Ok(Subvariety { n: self.n, generators })
    }

    /// `B^*Y` for the monomial map `x ↦ (x^{B_1}, …, x^{B_b})` given by the
    /// rows of the `b × a` matrix `B`; a term `x^λ` becomes `x^{λB}`.
    pub fn pullback(&self, b: &IntMatrix) -> Result<Subvariety> {
        if b.rows() != self.n {
            return Err(Error::Dimension(format!(
                "map has target rank {}, subvariety lives in G_m^{}",
                b.rows(),
                self.n
            )));
        }
        let generators = self
            .generators
            .iter()
            .map(|g| {
                g.iter()
                    .map(|t| {
                        let lam: Vec<BigInt> = t.exps.iter().map(|&e| BigInt::from(e)).collect();
                        let exps = b
                            .left_apply(&lam)
                            .into_iter()
                            .map(|x| x.to_i64().ok_or_else(|| Error::Overflow("exponent".into())))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(Term::new(exps, t.coeff.clone()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Subvariety {
            n: b.cols(),
            generators,
        })
    }

    /// `X^{+Q} = X + Q`: each term `c·x^λ` becomes `c·ζ^{−⟨λ,Q⟩}·x^λ`.
    pub fn translate(&self, q: &TorusPoint) -> Result<Subvariety> {
        if q.dim() != self.n {
            return Err(Error::Dimension("translation point".into()));
        }
        let generators = self
            .generators
            .iter()
            .map(|g| {
                g.iter()
                    .map(|t| {
                        Term::new(
                            t.exps.clone(),
                            Coefficient {
                                root: t.coeff.root - q.pair(&t.exps),
                                scale: t.coeff.scale.clone(),
                            },
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(Subvariety {
            n: self.n,
            generators,
        })
    }

    /// Generators `Σ_j A_ij g_j`, an integral refinement of `self`.
    pub fn combine(&self, cofactors: &[Vec<LaurentPoly>]) -> Result<Subvariety> {
        let mut generators = Vec::new();
        for row in cofactors {
            if row.len() != self.generators.len() {
                return Err(Error::Dimension("cofactor row length".into()));
            }
            let mut acc = Vec::new();
            for (a, g) in row.iter().zip(&self.generators) {
                acc.extend(laurent_mul(a, g));
            }
            generators.push(acc);
        }
        Subvariety::new(self.n, generators)
    }

    /// Each generator evaluated exactly in `Z[ζ_L]`, `L = level_at(P)`.
    pub fn evaluate_exact(&self, point: &TorusPoint) -> Vec<CycInt> {
        let level = self.level_at(point);
        self.generators
            .iter()
            .map(|g| {
                let mut z = CycInt::zero(level);
                for t in g {
                    z.add_root(t.symbol_at(point), &t.coeff.scale)
                        .expect("symbol level divides evaluation level");
                }
                z
            })
            .collect()
    }

    /// Each generator evaluated in `tower`, under the embedding twisted by
    /// the unit `twist` (1 for the fixed embedding).
    pub fn evaluate_in(
        &self,
        point: &TorusPoint,
        tower: &Arc<Tower>,
        twist: u64,
    ) -> Result<Vec<TowerElement>> {
        self.generators
            .iter()
            .map(|g| {
                let mut z = TowerElement::zero(tower);
                for t in g {
                    let root = embed_root(tower, t.symbol_at(point).times(twist as i64))?;
                    z.add_scaled(&root, &t.coeff.scale);
                }
                Ok(z)
            })
            .collect()
    }
}

fn laurent_mul(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for s in a {
        for t in b {
            out.push(Term::new(
                s.exps.iter().zip(&t.exps).map(|(x, y)| x + y).collect(),
                Coefficient {
                    root: s.coeff.root + t.coeff.root,
                    scale: &s.coeff.scale * &t.coeff.scale,
                },
            ));
        }
    }
    out
}

/// `B(P)` for the monomial map with rows `B_i`: `(B·P)_i = Σ_j B_ij P_j`.
pub fn monomial_apply(b: &IntMatrix, point: &TorusPoint) -> Result<TorusPoint> {
    if b.cols() != point.dim() {
        return Err(Error::Dimension("monomial map source rank".into()));
    }
    let coords = (0..b.rows())
        .map(|i| {
            let row = b
                .row(i)
                .iter()
                .map(|x| x.to_i64().ok_or_else(|| Error::Overflow("matrix entry".into())))
                .collect::<Result<Vec<_>>>()?;
            Ok(point.pair(&row))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TorusPoint::new(coords))
}

/// Distance to a subscheme, with `Member` only for exact vanishing.
///
/// Ordered by distance: `Member` is closest, then `BelowPrecision`, then
/// `Valuation(r)` with larger `r` closer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DistanceValue {
    Member,
    BelowPrecision,
    Valuation(Ratio<u64>),
}

impl DistanceValue {
    pub fn valuation(num: u64, den: u64) -> Self {
        DistanceValue::Valuation(Ratio::new(num, den))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            DistanceValue::Member => "member",
            DistanceValue::BelowPrecision => "below_precision",
            DistanceValue::Valuation(_) => "val",
        }
    }

    pub fn is_member(&self) -> bool {
        matches!(self, DistanceValue::Member)
    }

    pub fn ratio(&self) -> Option<Ratio<u64>> {
        match self {
            DistanceValue::Valuation(r) => Some(*r),
            _ => None,
        }
    }
}

impl Ord for DistanceValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use DistanceValue::*;
        let rank = |d: &DistanceValue| match d {
            Member => 0,
            BelowPrecision => 1,
            Valuation(_) => 2,
        };
        match (self, other) {
            (Valuation(a), Valuation(b)) => b.cmp(a),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl PartialOrd for DistanceValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DistanceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceValue::Member => write!(f, "member"),
            DistanceValue::BelowPrecision => write!(f, "below precision"),
            DistanceValue::Valuation(r) => write!(f, "v = {r}"),
        }
    }
}

impl Serialize for DistanceValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("DistanceValue", 3)?;
        st.serialize_field("kind", self.kind())?;
        let (n, d) = self.ratio().map_or((None, None), |r| (Some(*r.numer()), Some(*r.denom())));
        st.serialize_field("val_num", &n)?;
        st.serialize_field("val_den", &d)?;
        st.end()
    }
}

fn combine_valuations(exact_zero: &[bool], vals: impl Iterator<Item = ValuationResult>) -> DistanceValue {
    if exact_zero.iter().all(|&z| z) {
        return DistanceValue::Member;
    }
    let mut best = ValuationResult::BelowPrecision;
    for (v, &zero) in vals.zip(exact_zero) {
        if !zero && v < best {
            best = v;
        }
    }
    match best {
        ValuationResult::Finite(r) => DistanceValue::Valuation(r),
        ValuationResult::BelowPrecision => DistanceValue::BelowPrecision,
    }
}

fn check_tower(point: &TorusPoint, x: &Subvariety, tower: &Tower) -> Result<()> {
    if point.dim() != x.n {
        return Err(Error::Dimension(format!("point in G_m^{}, X in G_m^{}", point.dim(), x.n)));
    }
    let level = x.level_at(point);
    if !tower.spec().contains_level(level) {
        return Err(Error::LevelMismatch {
            den: level,
            level: tower.spec().level(),
        });
    }
    Ok(())
}

/// `d(P, X)` in the supplied tower under its fixed embedding.
pub fn distance(point: &TorusPoint, x: &Subvariety, tower: &Arc<Tower>) -> Result<DistanceValue> {
    distance_twisted(point, x, tower, 1)
}

/// As [`distance`], with every root of unity raised to the unit `twist`
/// first (another embedding of the cyclotomic field).
pub fn distance_twisted(
    point: &TorusPoint,
    x: &Subvariety,
    tower: &Arc<Tower>,
    twist: u64,
) -> Result<DistanceValue> {
    check_tower(point, x, tower)?;
    let exact: Vec<bool> = x.evaluate_exact(point).iter().map(CycInt::is_zero).collect();
    if exact.iter().all(|&z| z) {
        return Ok(DistanceValue::Member);
    }
    let values = x.evaluate_in(point, tower, twist)?;
    Ok(combine_valuations(&exact, values.iter().map(TowerElement::valuation)))
}

/// `d(P, X)` in the smallest tower containing the values at `P`.
pub fn distance_auto(point: &TorusPoint, x: &Subvariety, p: u64, precision: u32) -> Result<DistanceValue> {
    let tower = local_field::tower_for_level(p, x.level_at(point), precision)?;
    distance(point, x, &tower)
}

/// Units `u` mod the tower level representing the embeddings of the
/// cyclotomic field modulo the decomposition group at `p`.
pub fn embedding_twists(tower: &Tower) -> Vec<u64> {
    let spec = tower.spec();
    let (m, pk) = (spec.m_prime, spec.p_power());
    let mut seen = vec![false; m as usize];
    let mut out = Vec::new();
    for c in 1..=m {
        let c = c % m;
        if c.gcd(&m) != 1 || seen[c as usize] {
            continue;
        }
        let mut x = c;
        loop {
            seen[x as usize] = true;
            x = (x as u128 * spec.p as u128 % m as u128) as u64;
            if x == c {
                break;
            }
        }
        // u ≡ c mod m', u ≡ 1 mod p^k
        let u = (0..pk)
            .map(|t| c + t * m)
            .find(|u| u % pk == 1 % pk)
            .unwrap_or(c);
        out.push(u.max(1));
    }
    out
}

/// Worst case (closest) distance over all embeddings.
pub fn distance_all_embeddings(
    point: &TorusPoint,
    x: &Subvariety,
    p: u64,
    precision: u32,
) -> Result<DistanceValue> {
    let tower = local_field::tower_for_level(p, x.level_at(point), precision)?;
    let mut best: Option<DistanceValue> = None;
    for u in embedding_twists(&tower) {
        let d = distance_twisted(point, x, &tower, u)?;
        best = Some(best.map_or(d, |b| b.min(d)));
    }
    Ok(best.expect("at least one embedding"))
}

/// Both sides of one of the distance laws.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub lhs: DistanceValue,
    pub rhs: DistanceValue,
}

impl LawCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn common_tower(p: u64, precision: u32, levels: &[u64]) -> Result<Arc<Tower>> {
    let level = levels.iter().fold(1, |acc, l| acc.lcm(l));
    local_field::tower_for_level(p, level, precision)
}

/// `d(P, X ∩ Y)` against `max(d(P, X), d(P, Y))`.
pub fn distance_intersection_law(
    point: &TorusPoint,
    x: &Subvariety,
    y: &Subvariety,
    p: u64,
    precision: u32,
) -> Result<LawCheck> {
    let xy = x.intersect(y)?;
    let tower = common_tower(p, precision, &[xy.level_at(point)])?;
    let lhs = distance(point, &xy, &tower)?;
    let rhs = distance(point, x, &tower)?.max(distance(point, y, &tower)?);
    Ok(LawCheck { lhs, rhs })
}

/// `d(P, B^*Y)` against `d(B(P), Y)`.
pub fn pullback_distance(
    b: &IntMatrix,
    y: &Subvariety,
    point: &TorusPoint,
    p: u64,
    precision: u32,
) -> Result<LawCheck> {
    let pulled = y.pullback(b)?;
    let image = monomial_apply(b, point)?;
    let tower = common_tower(p, precision, &[pulled.level_at(point), y.level_at(&image)])?;
    Ok(LawCheck {
        lhs: distance(point, &pulled, &tower)?,
        rhs: distance(&image, y, &tower)?,
    })
}

/// `d(σ(P), X)` against `d(P, X)` for `X` with rational coefficients and
/// `σ` in the local Galois group at `p`.
pub fn galois_distance_invariance(
    sigma: &GaloisElement,
    point: &TorusPoint,
    x: &Subvariety,
    precision: u32,
) -> Result<LawCheck> {
    if !x.has_rational_coefficients() {
        return Err(Error::Parse("Galois invariance needs rational coefficients".into()));
    }
    let moved = crate::cyclo_exact::galois_act(sigma, point)?;
    let tower = common_tower(sigma.p, precision, &[sigma.level(), point.order()])?;
    Ok(LawCheck {
        lhs: distance(&moved, x, &tower)?,
        rhs: distance(point, x, &tower)?,
    })
}

/// `d(P − Q, X)` against `d(P, X^{+Q})`.
pub fn translation_law(
    point: &TorusPoint,
    q: &TorusPoint,
    x: &Subvariety,
    p: u64,
    precision: u32,
) -> Result<LawCheck> {
    let shifted = x.translate(q)?;
    let diff = point - q;
    let tower = common_tower(p, precision, &[x.level_at(&diff), shifted.level_at(point)])?;
    Ok(LawCheck {
        lhs: distance(&diff, x, &tower)?,
        rhs: distance(point, &shifted, &tower)?,
    })
}

/// For `G2 = A·G1` with integral cofactors, `d_{G2}(P) ≤ d_{G1}(P)`.
pub fn refinement_monotone(
    point: &TorusPoint,
    g1: &Subvariety,
    cofactors: &[Vec<LaurentPoly>],
    p: u64,
    precision: u32,
) -> Result<(DistanceValue, DistanceValue)> {
    let g2 = g1.combine(cofactors)?;
    let tower = common_tower(p, precision, &[g1.level_at(point), g2.level_at(point)])?;
    Ok((distance(point, g1, &tower)?, distance(point, &g2, &tower)?))
}

/// Minimal nonzero pairwise distance among torsion points of bounded order.
#[derive(Clone, Debug, Serialize)]
pub struct MattuckReport {
    pub p: u64,
    pub n: usize,
    pub bound: u64,
    pub points: usize,
    /// Classes of points sharing the prime-to-`p` part.
    pub classes: usize,
    /// The smallest distance between distinct points.
    pub min_distance: DistanceValue,
    pub witness: (TorusPoint, TorusPoint),
    /// Pairs with `P − Q` in the reduction kernel (valuation > 0).
    pub kernel_pairs: u64,
    /// Pairs whose difference has a nontrivial prime-to-`p` part.
    pub unit_pairs: u64,
    /// Cross-class pairs re-evaluated in a tower as a spot check.
    pub spot_checked: usize,
    /// `P − Q` lies in the kernel iff it has `p`-power order, for every pair.
    pub kernel_consistent: bool,
}

/// Valuation of `ζ^s − 1` for `s` of `p`-power order, from the tower.
fn wild_difference_valuation(
    s: CycSymbol,
    p: u64,
    precision: u32,
    cache: &mut HashMap<CycSymbol, ValuationResult>,
) -> Result<ValuationResult> {
    if let Some(v) = cache.get(&s) {
        return Ok(*v);
    }
    let tower = local_field::tower_for_level(p, s.den(), precision)?;
    let v = (&embed_root(&tower, s)? - &TowerElement::one(&tower)).valuation();
    cache.insert(s, v);
    Ok(v)
}

/// Scans all pairs of distinct torsion points of order `≤ bound` in
/// `G_m^n`. Pairs whose difference has a nontrivial prime-to-`p` part are
/// at distance 1 (some coordinate is `ζ − 1` with `ζ` of order not a power
/// of `p`, a unit); the remaining pairs are evaluated in the towers
/// `Q_p(ζ_{p^k})`.
pub fn mattuck_gap(p: u64, n: usize, bound: u64, precision: u32) -> Result<MattuckReport> {
    if bound < 2 {
        return Err(Error::Parse("order bound must be at least 2".into()));
    }
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let points = crate::scan::enum_torsion(n, bound, crate::scan::TorsionFilter::All, p);
    let mut classes: BTreeMap<TorusPoint, Vec<usize>> = BTreeMap::new();
    for (i, pt) in points.iter().enumerate() {
        classes.entry(torsion_split(pt, p).1).or_default().push(i);
    }
    let mut cache = HashMap::new();
    let mut best: Option<(DistanceValue, (usize, usize))> = None;
    let mut kernel_pairs = 0u64;
    let mut consistent = true;
    let consider = |best: &mut Option<(DistanceValue, (usize, usize))>, d: DistanceValue, pair: (usize, usize)| {
        let better = match best {
            None => true,
            Some((bd, bp)) => d < *bd || (d == *bd && pair < *bp),
        };
        if better {
            *best = Some((d, pair));
        }
    };
    for members in classes.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                let diff = &points[j] - &points[i];
                let mut v = ValuationResult::BelowPrecision;
                for &s in diff.coords() {
                    if !s.is_zero() {
                        v = v.min(wild_difference_valuation(s, p, precision, &mut cache)?);
                    }
                }
                let d = match v {
                    ValuationResult::Finite(r) => DistanceValue::Valuation(r),
                    ValuationResult::BelowPrecision => DistanceValue::BelowPrecision,
                };
                // Same prime-to-p part, so the difference is p-primary.
                if d == DistanceValue::valuation(0, 1) {
                    consistent = false;
                } else {
                    kernel_pairs += 1;
                }
                consider(&mut best, d, (i.min(j), i.max(j)));
            }
        }
    }
    let total = points.len() as u64 * (points.len() as u64 - 1) / 2;
    let unit_pairs = total - kernel_pairs;
    if unit_pairs > 0 {
        // The first cross-class pair in enumeration order: index 0 with the
        // first point outside its class.
        let first_class = classes.values().next().unwrap();
        if let Some(j) = (0..points.len()).find(|j| !first_class.contains(j)) {
            consider(&mut best, DistanceValue::valuation(0, 1), (0, j));
        }
    }
    // Spot-check the unit certificate on cross-class pairs in a tower.
    let mut spot_checked = 0;
    let class_list: Vec<&Vec<usize>> = classes.values().collect();
    'outer: for (ci, a) in class_list.iter().enumerate() {
        for b in &class_list[ci + 1..] {
            let (i, j) = (a[0], b[0]);
            let x = Subvariety::point(&points[i]);
            let d = distance_auto(&points[j], &x, p, precision.min(8))?;
            if d != DistanceValue::valuation(0, 1) {
                consistent = false;
            }
            spot_checked += 1;
            if spot_checked >= 64 {
                break 'outer;
            }
        }
    }
    let (min_distance, (i, j)) = best.ok_or_else(|| Error::Invariant("fewer than two points".into()))?;
    Ok(MattuckReport {
        p,
        n,
        bound,
        points: points.len(),
        classes: classes.len(),
        min_distance,
        witness: (points[i].clone(), points[j].clone()),
        kernel_pairs,
        unit_pairs,
        spot_checked,
        kernel_consistent: consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(s: &str) -> TorusPoint {
        s.parse().unwrap()
    }

    fn x_minus_one(n: usize, i: usize) -> Subvariety {
        let mut e = vec![0; n];
        e[i] = 1;
        Subvariety::from_integer_terms(n, &[vec![(e, 1), (vec![0; n], -1)]]).unwrap()
    }

    #[test]
    fn distance_examples() {
        let line = Subvariety::unit_line();
        assert_eq!(distance_auto(&pt("1/6,5/6"), &line, 7, 20).unwrap(), DistanceValue::Member);
        assert_eq!(
            distance_auto(&pt("1/3,1/2"), &line, 7, 20).unwrap(),
            DistanceValue::valuation(1, 1)
        );
        assert_eq!(
            distance_auto(&pt("1/5,4/5"), &line, 5, 20).unwrap(),
            DistanceValue::valuation(0, 1)
        );
    }

    #[test]
    fn third_root_value_is_28_mod_49() {
        let t = local_field::tower(7, 6, 0, 2).unwrap();
        let v = Subvariety::unit_line().evaluate_in(&pt("1/3,1/2"), &t, 1).unwrap();
        assert_eq!(v[0].coords(), &[BigInt::from(28)]);
    }

    #[test]
    fn ordering_by_distance() {
        let far = DistanceValue::valuation(0, 1);
        let near = DistanceValue::valuation(1, 4);
        assert!(near < far);
        assert!(DistanceValue::BelowPrecision < near);
        assert!(DistanceValue::Member < DistanceValue::BelowPrecision);
        assert_eq!(far.max(DistanceValue::Member), far);
    }

    #[test]
    fn intersection_examples() {
        let c = distance_intersection_law(&pt("1/5,0"), &x_minus_one(2, 0), &x_minus_one(2, 1), 5, 20)
            .unwrap();
        assert!(c.holds());
        assert_eq!(c.lhs, DistanceValue::valuation(1, 4));
        let line = Subvariety::unit_line();
        let c = distance_intersection_law(&pt("1/6,5/6"), &line, &line, 7, 20).unwrap();
        assert_eq!((c.lhs, c.holds()), (DistanceValue::Member, true));
    }

    #[test]
    fn pullback_examples() {
        let c = pullback_distance(&IntMatrix::from_i64(&[vec![2]], 1), &x_minus_one(1, 0), &pt("1/4"), 5, 20)
            .unwrap();
        assert!(c.holds());
        assert_eq!(c.lhs, DistanceValue::valuation(0, 1));
        let b = IntMatrix::from_i64(&[vec![0, 1], vec![1, 1]], 2);
        let c = pullback_distance(&b, &x_minus_one(2, 0), &pt("1/6,1/6"), 7, 20).unwrap();
        assert!(c.holds());
    }

    #[test]
    fn galois_examples() {
        let line = Subvariety::unit_line();
        let tau = GaloisElement::tau(7, 6).unwrap();
        let c = galois_distance_invariance(&tau, &pt("1/3,1/2"), &line, 20).unwrap();
        assert!(c.holds());
        assert_eq!(c.lhs, DistanceValue::valuation(1, 1));
        let g = GaloisElement::new(5, 30, 1, 3).unwrap();
        assert!(galois_distance_invariance(&g, &pt("1/6,1/10"), &line, 12).unwrap().holds());
    }

    #[test]
    fn translation_example() {
        let c = translation_law(&pt("1/5,1/3"), &pt("1/6,1/2"), &Subvariety::unit_line(), 5, 12).unwrap();
        assert!(c.holds());
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"n":2,"generators":[[{"exps":[1,0],"coeff":{"scale":1}},{"exps":[0,1],"coeff":{"root":"1/3","scale":2}}]]}"#;
        let x = Subvariety::from_json(s).unwrap();
        assert_eq!(x.generators[0][1].coeff.root, "1/3".parse().unwrap());
        assert_eq!(Subvariety::from_json(&x.to_json()).unwrap(), x);
        assert!(Subvariety::from_json(r#"{"n":2,"generators":[]}"#).is_err());
        let bare = r#"{"n":2,"generators":[[{"exps":[1,0],"coeff":1},{"exps":[0,1],"coeff":1},{"exps":[0,0],"coeff":-1}]]}"#;
        assert_eq!(Subvariety::from_json(bare).unwrap(), Subvariety::unit_line());
        assert!(Subvariety::from_json(r#"{"n":2,"generators":[[{"exps":[1],"coeff":{"scale":1}}]]}"#).is_err());
    }

    #[test]
    fn mattuck_examples() {
        let r = mattuck_gap(5, 1, 100, 20).unwrap();
        assert_eq!(r.min_distance, DistanceValue::valuation(1, 4));
        assert_eq!((r.witness.0.to_string(), r.witness.1.to_string()), ("0/1".into(), "1/5".into()));
        assert!(r.kernel_consistent);
        let r = mattuck_gap(7, 1, 6, 20).unwrap();
        assert_eq!(r.min_distance, DistanceValue::valuation(0, 1));
        assert_eq!(r.kernel_pairs, 0);
        let r = mattuck_gap(3, 1, 3, 20).unwrap();
        assert_eq!(r.min_distance, DistanceValue::valuation(1, 2));
        assert_eq!(r.witness.1.to_string(), "1/3");
    }

    #[test]
    fn reduction_kernel_on_tori() {
        // ζ reduces to 1 at level 0 iff its order is a power of p.
        for p in [3u64, 5] {
            for m in 1..=30u64 {
                let t = local_field::tower_for_level(p, m, 6).unwrap();
                let z = embed_root(&t, CycSymbol::from_u64(1, m)).unwrap();
                let one = TowerElement::one(&t);
                let in_kernel = local_field::reduce_level(&z, 0).unwrap()
                    == local_field::reduce_level(&one, 0).unwrap();
                let (_, rest) = arith::split_prime(m, p);
                assert_eq!(in_kernel, rest == 1, "p={p} m={m}");
            }
        }
    }

    #[test]
    fn refinement_is_monotone() {
        let line = Subvariety::unit_line();
        let g1 = line.intersect(&x_minus_one(2, 0)).unwrap();
        let a = vec![
            vec![
                vec![Term::new(vec![1, 0], Coefficient::integer(3))],
                vec![Term::new(vec![0, 2], Coefficient::root("1/4".parse().unwrap(), 1))],
            ],
            vec![vec![], vec![Term::new(vec![0, 0], Coefficient::integer(7))]],
        ];
        for s in ["1/3,1/2", "1/7,1/6", "0,1/5", "1/6,5/6"] {
            let (d1, d2) = refinement_monotone(&pt(s), &g1, &a, 7, 12).unwrap();
            assert!(d2 <= d1, "{s}: {d1} vs {d2}");
        }
    }

    fn small_point(n: usize) -> impl Strategy<Value = TorusPoint> {
        prop::collection::vec((0u64..12, prop::sample::select(vec![1u64, 2, 3, 4, 5, 6, 7, 9, 10, 12])), n)
            .prop_map(|v| TorusPoint::new(v.into_iter().map(|(c, d)| CycSymbol::from_u64(c % d, d)).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn member_iff_exact_zero(p0 in small_point(2), p in prop::sample::select(vec![3u64, 5, 7])) {
            let line = Subvariety::unit_line();
            let d = distance_auto(&p0, &line, p, 10).unwrap();
            let exact = line.evaluate_exact(&p0)[0].is_zero();
            prop_assert_eq!(d.is_member(), exact);
        }

        #[test]
        fn translation_holds(a in small_point(2), b in small_point(2), p in prop::sample::select(vec![2u64, 3, 5])) {
            prop_assert!(translation_law(&a, &b, &Subvariety::unit_line(), p, 10).unwrap().holds());
        }
    }
}
