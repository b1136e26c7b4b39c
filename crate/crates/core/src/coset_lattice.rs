//! Torsion cosets `a·T_L` of subgroup schemes of `G_m^n`, finite unions of
//! them, and the companion-matrix core construction.
//!
//! `T_L = {x : x^λ = 1 for λ ∈ L}` for a lattice `L ⊆ Z^n`. Torsion points
//! are written additively in `(Q/Z)^n`, so `a·T_L` is the set of `x` with
//! `⟨λ, x⟩ = ⟨λ, a⟩` for every `λ ∈ L`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclo_exact::{CycSymbol, TorusPoint};
use crate::error::{Error, Result};
use crate::galois_poly::IntPolynomial;
use crate::intmat::{IntMatrix, Snf};
use crate::serde_int::IntRepr;
use crate::torus_geom::monomial_apply;

const MAX_COMPONENTS: u64 = 1 << 20;
const CHAIN_LIMIT: usize = 1000;

/// `⟨λ, x⟩ ∈ Q/Z` for an integer row `λ`.
fn pair_row(x: &[CycSymbol], row: &[BigInt]) -> CycSymbol {
    x.iter().zip(row).fold(CycSymbol::ZERO, |acc, (s, l)| {
        let m = s.den();
        let l = l.mod_floor(&BigInt::from(m)).to_u64().expect("reduced below m");
        acc + CycSymbol::from_u64((s.num() as u128 * l as u128 % m as u128) as u64, m)
    })
}

fn values(h: &IntMatrix, x: &[CycSymbol]) -> Vec<CycSymbol> {
    h.row_vecs().iter().map(|r| pair_row(x, r)).collect()
}

/// `(w + k)/d` with `w ∈ Q/Z`, one of the `d` solutions of `d·y = w`.
fn divide(w: CycSymbol, d: u64, k: u64) -> Result<CycSymbol> {
    let den = w
        .den()
        .checked_mul(d)
        .ok_or_else(|| Error::Overflow("root of unity order".into()))?;
    Ok(CycSymbol::from_u64(w.num() + k * w.den(), den))
}

/// A consistent system `H·x ≡ v` in `(Q/Z)^n`, diagonalized as
/// `D·(V^{-1}x) ≡ U·v`.
struct Congruence {
    n: usize,
    snf: Snf,
    rhs: Vec<CycSymbol>,
}

impl Congruence {
    fn solve(h: &IntMatrix, v: &[CycSymbol]) -> Option<Congruence> {
        let snf = h.snf();
        let rhs: Vec<CycSymbol> = snf.u.row_vecs().iter().map(|r| pair_row(v, r)).collect();
        if rhs[snf.rank()..].iter().any(|s| !s.is_zero()) {
            return None;
        }
        Some(Congruence {
            n: h.cols(),
            snf,
            rhs,
        })
    }

    fn divisors(&self) -> Result<Vec<u64>> {
        self.snf
            .diag
            .iter()
            .map(|d| d.to_u64().ok_or_else(|| Error::Overflow("invariant factor".into())))
            .collect()
    }

    /// The solution with `V^{-1}x` having `i`-th entry `(w_i + k_i)/d_i`
    /// and zeros past the rank.
    fn point(&self, ks: &[u64]) -> Result<TorusPoint> {
        let mut y = vec![CycSymbol::ZERO; self.n];
        for (i, d) in self.divisors()?.into_iter().enumerate() {
            y[i] = divide(self.rhs[i], d, ks.get(i).copied().unwrap_or(0))?;
        }
        let x = self.snf.v.row_vecs().iter().map(|r| pair_row(&y, r)).collect();
        Ok(TorusPoint::new(x))
    }

    fn saturation(&self) -> IntMatrix {
        let r = self.snf.rank();
        IntMatrix::from_rows(self.snf.v_inv.row_vecs()[..r].to_vec(), self.n)
    }
}

/// The lattice `L ∩ M`.
pub fn lattice_meet(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.cols();
    if a.rows() == 0 || b.rows() == 0 {
        return IntMatrix::zeros(0, n);
    }
    let neg_b = IntMatrix::from_rows(
        b.row_vecs().iter().map(|r| r.iter().map(|x| -x).collect()).collect(),
        n,
    );
    let kernel = a.vstack(&neg_b).left_kernel();
    let rows = kernel
        .row_vecs()
        .iter()
        .map(|k| a.left_apply(&k[..a.rows()]))
        .collect();
    IntMatrix::from_rows(rows, n).row_lattice_basis()
}

/// Whether the row lattice of `sub` lies in that of `sup` (both in HNF).
fn lattice_contains(sup: &IntMatrix, sub: &IntMatrix) -> bool {
    sub.rows() == 0 || sup.vstack(sub).row_lattice_basis() == *sup
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TorsionCoset {
    n: usize,
    lattice: IntMatrix,
    shift: TorusPoint,
}

impl TorsionCoset {
    /// `shift·T_L` with `L` spanned by the rows of `lattice`.
    pub fn new(lattice: &IntMatrix, shift: &TorusPoint) -> Result<Self> {
        if lattice.cols() != shift.dim() {
            return Err(Error::Dimension(format!(
                "lattice in Z^{}, shift in G_m^{}",
                lattice.cols(),
                shift.dim()
            )));
        }
        let h = lattice.row_lattice_basis();
        let v = values(&h, shift.coords());
        let canonical = Congruence::solve(&h, &v)
            .expect("independent rows are always solvable")
            .point(&[])?;
        Ok(TorsionCoset {
            n: shift.dim(),
            lattice: h,
            shift: canonical,
        })
    }

    /// `{x : H·x ≡ v}`, or `None` when the congruences are inconsistent.
    pub fn from_congruences(h: &IntMatrix, v: &[CycSymbol]) -> Result<Option<Self>> {
        match Congruence::solve(h, v) {
            None => Ok(None),
            Some(c) => Ok(Some(Self::new(h, &c.point(&[])?)?)),
        }
    }

    pub fn point(p: &TorusPoint) -> Self {
        Self::new(&IntMatrix::identity(p.dim()), p).unwrap()
    }

    /// The whole torus `G_m^n`.
    pub fn ambient(n: usize) -> Self {
        Self::new(&IntMatrix::zeros(0, n), &TorusPoint::identity(n)).unwrap()
    }

    /// `μ_m ⊂ G_m`.
    pub fn roots_of_unity(m: i64) -> Self {
        Self::new(&IntMatrix::from_i64(&[vec![m]], 1), &TorusPoint::identity(1)).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lattice(&self) -> &IntMatrix {
        &self.lattice
    }

    pub fn shift(&self) -> &TorusPoint {
        &self.shift
    }

    pub fn dimension(&self) -> usize {
        self.n - self.lattice.rows()
    }

    fn values(&self) -> Vec<CycSymbol> {
        values(&self.lattice, self.shift.coords())
    }

    pub fn contains(&self, p: &TorusPoint) -> bool {
        p.dim() == self.n && values(&self.lattice, p.coords()) == self.values()
    }

    /// Irreducible iff `L` is saturated.
    pub fn is_irreducible(&self) -> bool {
        self.lattice.snf().diag.iter().all(One::is_one)
    }

    pub fn is_subset(&self, other: &TorsionCoset) -> bool {
        self.n == other.n
            && lattice_contains(&self.lattice, &other.lattice)
            && other.contains(&self.shift)
    }

    /// The translates of `T_{L_sat}` making up this coset.
    pub fn components(&self) -> Result<Vec<TorsionCoset>> {
        let c = Congruence::solve(&self.lattice, &self.values()).expect("coset is consistent");
        let ds = c.divisors()?;
        let count = ds.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d).filter(|&x| x <= MAX_COMPONENTS));
        let count = count.ok_or(Error::GroupTooLarge(MAX_COMPONENTS as usize))?;
        let sat = c.saturation();
        let mut ks = vec![0u64; ds.len()];
        let mut out = Vec::with_capacity(count as usize);
        for _ in 0..count {
            out.push(TorsionCoset::new(&sat, &c.point(&ks)?)?);
            for (k, &d) in ks.iter_mut().zip(&ds) {
                *k += 1;
                if *k < d {
                    break;
                }
                *k = 0;
            }
        }
        Ok(out)
    }

    pub fn intersect(&self, other: &TorsionCoset) -> Result<Option<TorsionCoset>> {
        if self.n != other.n {
            return Err(Error::Dimension("cosets in different tori".into()));
        }
        let mut v = self.values();
        v.extend(other.values());
        Self::from_congruences(&self.lattice.vstack(&other.lattice), &v)
    }

    /// `A + B = (a + b)·T_{L ∩ M}`.
    pub fn sum(&self, other: &TorsionCoset) -> Result<TorsionCoset> {
        if self.n != other.n {
            return Err(Error::Dimension("cosets in different tori".into()));
        }
        Self::new(&lattice_meet(&self.lattice, &other.lattice), &(&self.shift + &other.shift))
    }

    pub fn negate(&self) -> TorsionCoset {
        Self::new(&self.lattice, &-&self.shift).unwrap()
    }

    /// Image under the monomial map with matrix `b` (`t × n`): the coset
    /// `B(a)·T_{L'}` with `L' = {μ : μB ∈ L}`.
    pub fn image(&self, b: &IntMatrix) -> Result<TorsionCoset> {
        if b.cols() != self.n {
            return Err(Error::Dimension("monomial map source rank".into()));
        }
        let t = b.rows();
        let neg_h = IntMatrix::from_rows(
            self.lattice.row_vecs().iter().map(|r| r.iter().map(|x| -x).collect()).collect(),
            self.n,
        );
        let kernel = b.vstack(&neg_h).left_kernel();
        let rows = kernel.row_vecs().iter().map(|k| k[..t].to_vec()).collect();
        Self::new(&IntMatrix::from_rows(rows, t), &monomial_apply(b, &self.shift)?)
    }

    /// `{x : B(x) ∈ self}` for `b` of shape `n × s`; `None` when empty.
    pub fn preimage(&self, b: &IntMatrix) -> Result<Option<TorsionCoset>> {
        if b.rows() != self.n {
            return Err(Error::Dimension("monomial map target rank".into()));
        }
        if b.rows() == b.cols() && b.determinant().is_zero() {
            return Err(Error::Singular);
        }
        Self::from_congruences(&self.lattice.mul(b), &self.values())
    }

    /// All points, for a coset of dimension zero.
    pub fn points(&self) -> Result<Vec<TorusPoint>> {
        if self.dimension() != 0 {
            return Err(Error::Dimension("coset has infinitely many points".into()));
        }
        Ok(self.components()?.into_iter().map(|c| c.shift).collect())
    }
}

impl Ord for TorsionCoset {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.lattice.rows(), self.lattice.row_vecs(), &self.shift).cmp(&(
            other.n,
            other.lattice.rows(),
            other.lattice.row_vecs(),
            &other.shift,
        ))
    }
}

impl PartialOrd for TorsionCoset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for TorsionCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})·T{:?}", self.shift, self.lattice)
    }
}

#[derive(Serialize, Deserialize)]
struct CosetRepr {
    n: usize,
    lattice: Vec<Vec<IntRepr>>,
    shift: Vec<CycSymbol>,
}

impl Serialize for TorsionCoset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CosetRepr {
            n: self.n,
            lattice: self
                .lattice
                .row_vecs()
                .iter()
                .map(|r| r.iter().map(IntRepr::of).collect())
                .collect(),
            shift: self.shift.coords().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorsionCoset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = CosetRepr::deserialize(d)?;
        if r.n == 0 || r.shift.len() != r.n || r.lattice.iter().any(|row| row.len() != r.n) {
            return Err(D::Error::custom("coset dimensions disagree"));
        }
        let rows = r
            .lattice
            .into_iter()
            .map(|row| row.into_iter().map(IntRepr::into_bigint).collect())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        TorsionCoset::new(&IntMatrix::from_rows(rows, r.n), &TorusPoint::new(r.shift))
            .map_err(D::Error::custom)
    }
}

/// A finite union of torsion cosets, kept as its sorted irreducible
/// components with none contained in another.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TorsionSubscheme {
    n: usize,
    components: Vec<TorsionCoset>,
}

impl TorsionSubscheme {
    pub fn new(n: usize, cosets: Vec<TorsionCoset>) -> Result<Self> {
        let mut comps = BTreeSet::new();
        for c in cosets {
            if c.n != n {
                return Err(Error::Dimension(format!("coset in G_m^{}, expected {n}", c.n)));
            }
            comps.extend(c.components()?);
        }
        let all: Vec<TorsionCoset> = comps.into_iter().collect();
        let components = all
            .iter()
            .enumerate()
            .filter(|(i, c)| {
                !all.iter()
                    .enumerate()
                    .any(|(j, d)| j != *i && d.dimension() > c.dimension() && c.is_subset(d))
            })
            .map(|(_, c)| c.clone())
            .collect();
        Ok(TorsionSubscheme { n, components })
    }

    pub fn empty(n: usize) -> Self {
        TorsionSubscheme {
            n,
            components: Vec::new(),
        }
    }

    pub fn from_points(n: usize, points: &[TorusPoint]) -> Result<Self> {
        Self::new(n, points.iter().map(TorsionCoset::point).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[TorsionCoset] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, p: &TorusPoint) -> bool {
        self.components.iter().any(|c| c.contains(p))
    }

    pub fn is_subset(&self, other: &TorsionSubscheme) -> bool {
        self.n == other.n
            && self
                .components
                .iter()
                .all(|c| other.components.iter().any(|d| c.is_subset(d)))
    }

    pub fn union(&self, other: &TorsionSubscheme) -> Result<Self> {
        let mut all = self.components.clone();
        all.extend(other.components.iter().cloned());
        Self::new(self.n, all)
    }

    pub fn intersect(&self, other: &TorsionSubscheme) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension("subschemes in different tori".into()));
        }
        let mut out = Vec::new();
        for a in &self.components {
            for b in &other.components {
                out.extend(a.intersect(b)?);
            }
        }
        Self::new(self.n, out)
    }

    pub fn image(&self, b: &IntMatrix) -> Result<Self> {
        let cosets = self
            .components
            .iter()
            .map(|c| c.image(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(b.rows(), cosets)
    }

    pub fn preimage(&self, b: &IntMatrix) -> Result<Self> {
        let mut out = Vec::new();
        for c in &self.components {
            out.extend(c.preimage(b)?);
        }
        Self::new(b.cols(), out)
    }

    /// `X^d ⊂ G_m^{nd}`, block `i` holding the `i`-th factor.
    pub fn power(&self, d: usize) -> Result<Self> {
        let mut acc: Vec<(Vec<Vec<BigInt>>, Vec<CycSymbol>)> = vec![(Vec::new(), Vec::new())];
        let width = self.n * d;
        for block in 0..d {
            let mut next = Vec::new();
            for (rows, shift) in &acc {
                for c in &self.components {
                    let mut rows = rows.clone();
                    for r in c.lattice.row_vecs() {
                        let mut full = vec![BigInt::zero(); width];
                        full[block * self.n..(block + 1) * self.n].clone_from_slice(r);
                        rows.push(full);
                    }
                    let mut shift = shift.clone();
                    shift.extend_from_slice(c.shift.coords());
                    next.push((rows, shift));
                }
            }
            acc = next;
        }
        let cosets = acc
            .into_iter()
            .map(|(rows, shift)| TorsionCoset::new(&IntMatrix::from_rows(rows, width), &TorusPoint::new(shift)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(width, cosets)
    }

    /// Points of order dividing `m`, for brute-force comparisons.
    pub fn points_of_order_dividing(&self, m: u64) -> Vec<TorusPoint> {
        torsion_of_exponent(self.n, m)
            .filter(|p| self.contains(p))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.components).expect("cosets serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cosets: Vec<TorsionCoset> =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("subscheme JSON: {e}")))?;
        let n = cosets
            .first()
            .map(TorsionCoset::n)
            .ok_or_else(|| Error::Parse("empty subscheme has no ambient dimension".into()))?;
        Self::new(n, cosets)
    }

    /// The translations `t` with `Z + t = Z`.
    pub fn stabilizer(&self) -> Result<TorsionSubscheme> {
        let mut acc = TorsionSubscheme::new(self.n, vec![TorsionCoset::ambient(self.n)])?;
        for c in &self.components {
            // t must carry c onto a component with the same lattice
            let candidates = self
                .components
                .iter()
                .filter(|d| d.lattice == c.lattice)
                .map(|d| TorsionCoset::new(&c.lattice, &(&d.shift - &c.shift)))
                .collect::<Result<Vec<_>>>()?;
            acc = acc.intersect(&TorsionSubscheme::new(self.n, candidates)?)?;
        }
        if !acc.is_group()? {
            return Err(Error::Invariant("stabilizer is not a group".into()));
        }
        Ok(acc)
    }

    /// Contains the identity and is closed under sums and negation.
    pub fn is_group(&self) -> Result<bool> {
        if !self.contains(&TorusPoint::identity(self.n)) {
            return Ok(false);
        }
        for a in &self.components {
            if !self.components.iter().any(|d| a.negate().is_subset(d)) {
                return Ok(false);
            }
            for b in &self.components {
                let s = a.sum(b)?;
                if !self.components.iter().any(|d| s.is_subset(d)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `N·Z`, the image under `[N]`.
    pub fn multiple_image(&self, n_mult: i64) -> Result<Self> {
        if n_mult < 1 {
            return Err(Error::Parse("multiplier must be positive".into()));
        }
        let mut b = IntMatrix::identity(self.n);
        for i in 0..self.n {
            b.set(i, i, BigInt::from(n_mult));
        }
        self.image(&b)
    }
}

impl fmt::Debug for TorsionSubscheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.components).finish()
    }
}

/// All points of `(1/m·Z/Z)^n`, lexicographically.
pub fn torsion_of_exponent(n: usize, m: u64) -> impl Iterator<Item = TorusPoint> {
    let total = (m as u128).pow(n as u32);
    (0..total).map(move |mut idx| {
        let mut coords = vec![CycSymbol::ZERO; n];
        for c in coords.iter_mut().rev() {
            *c = CycSymbol::from_u64((idx % m as u128) as u64, m);
            idx /= m as u128;
        }
        TorusPoint::new(coords)
    })
}

/// Rows of the HNF basis of `L`; the monomial map they define has kernel
/// exactly `T_L`.
pub fn quotient_map(lattice: &IntMatrix) -> IntMatrix {
    lattice.row_lattice_basis()
}

/// A monic `F` of degree `d`, its companion matrix `M` and the action
/// `M ⊗ I_n` on `G_m^{nd}`.
#[derive(Clone, Debug)]
pub struct CompanionData {
    pub f: IntPolynomial,
    pub matrix: IntMatrix,
    pub n: usize,
    pub action: IntMatrix,
}

impl CompanionData {
    pub fn new(f: &IntPolynomial, n: usize) -> Result<Self> {
        let d = match f.degree() {
            Some(d) if d >= 1 && f.is_monic() => d,
            _ => return Err(Error::Parse(format!("{f} is not monic of positive degree"))),
        };
        let mut m = IntMatrix::zeros(d, d);
        for i in 0..d - 1 {
            m.set(i, i + 1, BigInt::one());
        }
        for j in 0..d {
            m.set(d - 1, j, -f.coeff(j));
        }
        let mut action = IntMatrix::zeros(n * d, n * d);
        for a in 0..d {
            for b in 0..d {
                for i in 0..n {
                    action.set(a * n + i, b * n + i, m.get(a, b).clone());
                }
            }
        }
        Ok(CompanionData {
            f: f.clone(),
            matrix: m,
            n,
            action,
        })
    }

    pub fn degree(&self) -> usize {
        self.matrix.rows()
    }

    /// `(x, u·x, …, u^{d−1}·x)` for a point `x` of `G_m^n`.
    pub fn orbit_vector(&self, x: &TorusPoint, u: i64) -> TorusPoint {
        let mut coords = Vec::with_capacity(self.n * self.degree());
        let mut cur = x.clone();
        for _ in 0..self.degree() {
            coords.extend_from_slice(cur.coords());
            cur = cur.times(u);
        }
        TorusPoint::new(coords)
    }
}

#[derive(Clone, Debug)]
pub struct CoreReport {
    pub core: TorsionSubscheme,
    /// Rounds of `Y ∩ B^{-1}(·)` before the descending chain stopped.
    pub preimage_steps: usize,
    /// Images needed before `B(Z) = Z`.
    pub image_steps: usize,
}

/// `Z = ⋂_l B^l(Y_∞)` with `Y_∞ = ⋂_r B^{−r}(Y)`.
pub fn core(y: &TorsionSubscheme, b: &IntMatrix) -> Result<CoreReport> {
    if b.rows() != y.n() || b.cols() != y.n() {
        return Err(Error::Dimension("core needs a square map on the ambient torus".into()));
    }
    let mut w = y.clone();
    let mut preimage_steps = 0;
    loop {
        let next = y.intersect(&w.preimage(b)?)?;
        preimage_steps += 1;
        if next == w {
            break;
        }
        if preimage_steps >= CHAIN_LIMIT {
            return Err(Error::ChainDidNotStabilize(CHAIN_LIMIT));
        }
        w = next;
    }
    let mut image_steps = 0;
    loop {
        let next = w.image(b)?;
        if next == w {
            break;
        }
        image_steps += 1;
        if image_steps >= CHAIN_LIMIT {
            return Err(Error::ChainDidNotStabilize(CHAIN_LIMIT));
        }
        w = next;
    }
    if !w.is_subset(y) {
        return Err(Error::Invariant("core escaped its input".into()));
    }
    Ok(CoreReport {
        core: w,
        preimage_steps,
        image_steps,
    })
}

/// `Z_{X,F} ⊂ G_m^{nd}`.
pub fn torsion_core(x: &TorsionSubscheme, f: &IntPolynomial) -> Result<CoreReport> {
    if x.is_empty() {
        return Err(Error::Parse("X must be nonempty".into()));
    }
    let data = CompanionData::new(f, x.n())?;
    core(&x.power(data.degree())?, &data.action)
}

/// Points of `Z_{X,F}` of order dividing `m`, found by walking the cycles of
/// `M` on the `m`-torsion and keeping those that never leave `X^d`. Needs
/// `gcd(m, F(0)) = 1` so that `M` permutes the `m`-torsion.
pub fn core_points_bruteforce(x: &TorsionSubscheme, f: &IntPolynomial, m: u64) -> Result<BTreeSet<TorusPoint>> {
    let data = CompanionData::new(f, x.n())?;
    let det = data.matrix.determinant();
    if det.gcd(&BigInt::from(m)) != BigInt::one() {
        return Err(Error::Singular);
    }
    let d = data.degree();
    let n = x.n();
    let in_power = |p: &TorusPoint| {
        (0..d).all(|b| x.contains(&TorusPoint::new(p.coords()[b * n..(b + 1) * n].to_vec())))
    };
    let mut out = BTreeSet::new();
    for start in torsion_of_exponent(n * d, m) {
        let mut cur = start.clone();
        let mut stays = true;
        loop {
            if !in_power(&cur) {
                stays = false;
                break;
            }
            cur = monomial_apply(&data.action, &cur)?;
            if cur == start {
                break;
            }
        }
        if stays {
            out.insert(start);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo_exact::{galois_act, GaloisElement};
    use proptest::prelude::*;

    fn pt(s: &str) -> TorusPoint {
        s.parse().unwrap()
    }

    fn sub(cosets: Vec<TorsionCoset>) -> TorsionSubscheme {
        let n = cosets[0].n();
        TorsionSubscheme::new(n, cosets).unwrap()
    }

    fn mu(m: i64) -> TorsionSubscheme {
        sub(vec![TorsionCoset::roots_of_unity(m)])
    }

    fn mat(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows, rows[0].len())
    }

    #[test]
    fn canonical_shift() {
        let a = TorsionCoset::new(&mat(&[vec![2, 0]]), &pt("1/4,1/3")).unwrap();
        let b = TorsionCoset::new(&mat(&[vec![-2, 0]]), &pt("3/4,0")).unwrap();
        assert_eq!(a, b);
        assert!(a.contains(&pt("1/4,2/5")));
        assert!(!a.contains(&pt("1/2,0")));
        assert_eq!(a.components().unwrap().len(), 2);
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(mu(3).intersect(&mu(6)).unwrap(), mu(3));
        let shifted = TorsionCoset::new(&mat(&[vec![2]]), &pt("1/3")).unwrap();
        assert!(TorsionCoset::roots_of_unity(2).intersect(&shifted).unwrap().is_none());
        let t = sub(vec![TorsionCoset::new(&mat(&[vec![1, 2]]), &pt("0,1/5")).unwrap()]);
        assert_eq!(t.intersect(&t).unwrap(), t);
    }

    #[test]
    fn image_and_preimage_examples() {
        let one = sub(vec![TorsionCoset::point(&pt("0"))]);
        let pre = one.preimage(&mat(&[vec![2]])).unwrap();
        assert_eq!(pre, TorsionSubscheme::from_points(1, &[pt("0"), pt("1/2")]).unwrap());
        let mu3sq = mu(3).power(2).unwrap();
        assert_eq!(mu3sq.preimage(&mat(&[vec![0, 1], vec![1, 1]])).unwrap(), mu3sq);
        assert_eq!(mu(3).image(&mat(&[vec![3]])).unwrap(), one);
        assert!(one.preimage(&mat(&[vec![0]])).is_err());
    }

    #[test]
    fn stabilizer_examples() {
        let c = sub(vec![TorsionCoset::new(&mat(&[vec![1, -1]]), &pt("1/3,0")).unwrap()]);
        assert_eq!(c.stabilizer().unwrap(), sub(vec![TorsionCoset::new(&mat(&[vec![1, -1]]), &pt("0,0")).unwrap()]));
        let pair = TorsionSubscheme::from_points(1, &[pt("0"), pt("1/2")]).unwrap();
        assert_eq!(pair.stabilizer().unwrap(), mu(2));
        let pair = TorsionSubscheme::from_points(1, &[pt("0"), pt("1/3")]).unwrap();
        assert_eq!(pair.stabilizer().unwrap(), TorsionSubscheme::from_points(1, &[pt("0")]).unwrap());
    }

    #[test]
    fn multiple_image_examples() {
        assert_eq!(mu(3).multiple_image(3).unwrap(), mu(1));
        let p = TorsionSubscheme::from_points(1, &[pt("1/3")]).unwrap();
        assert_eq!(p.multiple_image(2).unwrap(), TorsionSubscheme::from_points(1, &[pt("2/3")]).unwrap());
        assert_eq!(mu(6).multiple_image(2).unwrap(), mu(3));
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(quotient_map(&mat(&[vec![3]])), mat(&[vec![3]]));
        assert_eq!(quotient_map(&mat(&[vec![-1, 1]])), mat(&[vec![1, -1]]));
        assert_eq!(quotient_map(&mat(&[vec![0, 1], vec![1, 0]])), IntMatrix::identity(2));
        // the kernel of the quotient map is T_L
        let q = quotient_map(&mat(&[vec![1, -1]]));
        let kernel = sub(vec![TorsionCoset::point(&pt("0"))]).preimage(&q).unwrap();
        assert_eq!(kernel, sub(vec![TorsionCoset::new(&mat(&[vec![1, -1]]), &pt("0,0")).unwrap()]));
    }

    #[test]
    fn core_examples() {
        let f = IntPolynomial::from_i64(&[-3, 1]);
        let origin = TorsionSubscheme::from_points(1, &[pt("0")]).unwrap();
        assert_eq!(torsion_core(&origin, &f).unwrap().core, origin);

        let fib = IntPolynomial::from_i64(&[-1, -1, 1]);
        let r = torsion_core(&mu(3), &fib).unwrap();
        assert_eq!(r.core, mu(3).power(2).unwrap());
        let brute = core_points_bruteforce(&mu(3), &fib, 3).unwrap();
        assert_eq!(brute.len(), 9);
        assert_eq!(brute, r.core.points_of_order_dividing(3).into_iter().collect());

        let half = TorsionSubscheme::from_points(1, &[pt("1/2")]).unwrap();
        assert_eq!(torsion_core(&half, &f).unwrap().core, half);
        assert_eq!(core_points_bruteforce(&half, &f, 2).unwrap().len(), 1);
    }

    #[test]
    fn companion_matches_galois_action() {
        // F(T) = (T − u)(T − w) kills x under σ acting as u.
        let g = GaloisElement::new(5, 21, 1, 1).unwrap();
        let u = g.unit() as i64;
        let f = IntPolynomial::from_i64(&[u * 4, -(u + 4), 1]);
        let data = CompanionData::new(&f, 2).unwrap();
        let x = pt("2/21,5/7");
        let xs = data.orbit_vector(&x, u);
        assert_eq!(monomial_apply(&data.action, &xs).unwrap(), galois_act(&g, &xs).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let z = TorsionSubscheme::from_json(r#"[{"n":2,"lattice":[[3,0]],"shift":["1/3","0"]},{"n":2,"lattice":[[1,1],[0,2]],"shift":["1/2","0"]}]"#).unwrap();
        assert_eq!(TorsionSubscheme::from_json(&z.to_json()).unwrap(), z);
        assert!(TorsionSubscheme::from_json(r#"[{"n":2,"lattice":[[3]],"shift":["0","0"]}]"#).is_err());
    }

    fn coset_strategy(n: usize) -> impl Strategy<Value = TorsionCoset> {
        (
            prop::collection::vec(prop::collection::vec(-3i64..4, n), 0..=n),
            prop::collection::vec((0u64..6, 1u64..7), n),
        )
            .prop_map(move |(rows, shift)| {
                let rows = if rows.is_empty() { IntMatrix::zeros(0, n) } else { IntMatrix::from_i64(&rows, n) };
                let shift = TorusPoint::new(shift.into_iter().map(|(c, d)| CycSymbol::from_u64(c % d, d)).collect());
                TorsionCoset::new(&rows, &shift).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn intersection_is_pointwise(a in coset_strategy(2), b in coset_strategy(2)) {
            let i = a.intersect(&b).unwrap();
            for p in torsion_of_exponent(2, 12) {
                let both = a.contains(&p) && b.contains(&p);
                prop_assert_eq!(i.as_ref().is_some_and(|c| c.contains(&p)), both);
            }
        }

        #[test]
        fn image_preimage_adjunction(a in coset_strategy(2), rows in prop::collection::vec(prop::collection::vec(-2i64..3, 2), 2)) {
            let b = IntMatrix::from_i64(&rows, 2);
            prop_assume!(!b.determinant().is_zero());
            let c = sub(vec![a.clone()]);
            let back = c.image(&b).unwrap().preimage(&b).unwrap();
            prop_assert!(c.is_subset(&back));
            for p in torsion_of_exponent(2, 6) {
                if a.contains(&p) {
                    prop_assert!(c.image(&b).unwrap().contains(&monomial_apply(&b, &p).unwrap()));
                }
            }
        }

        #[test]
        fn stabilizer_is_group(a in coset_strategy(1), b in coset_strategy(1)) {
            let z = sub(vec![a, b]);
            let s = z.stabilizer().unwrap();
            prop_assert!(s.is_group().unwrap());
            for t in torsion_of_exponent(1, 12) {
                let moved = z.components().iter().map(|c| TorsionCoset::new(c.lattice(), &(c.shift() + &t)).unwrap()).collect();
                let stable = TorsionSubscheme::new(1, moved).unwrap() == z;
                prop_assert_eq!(s.contains(&t), stable);
            }
        }
    }
}
