//! Torsion enumeration and gap scans over a subvariety.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::str::FromStr;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::cyclo_exact::{CycSymbol, TorusPoint};
use crate::error::{Error, Result};
use crate::local_field::{self, power_of_two_row, PowerOfTwoRow, DEFAULT_PRECISION};
use crate::torus_geom::{distance_all_embeddings, distance_auto, DistanceValue, Subvariety};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorsionFilter {
    #[default]
    All,
    /// Order prime to `p`.
    Unramified,
    /// Order a power of `p`.
    PPrimary,
    /// Order divisible by `p` and by some other prime.
    Mixed,
}

impl TorsionFilter {
    pub fn admits(self, order: u64, p: u64) -> bool {
        let (k, m_prime) = arith::split_prime(order, p);
        match self {
            TorsionFilter::All => true,
            TorsionFilter::Unramified => k == 0,
            TorsionFilter::PPrimary => m_prime == 1,
            TorsionFilter::Mixed => k > 0 && m_prime > 1,
        }
    }
}

impl FromStr for TorsionFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(TorsionFilter::All),
            "unramified" => Ok(TorsionFilter::Unramified),
            "p-primary" => Ok(TorsionFilter::PPrimary),
            "mixed" => Ok(TorsionFilter::Mixed),
            _ => Err(Error::Parse(format!("unknown torsion filter {s:?}"))),
        }
    }
}

/// Torsion points of `G_m^n` of order at most `bound`, by increasing order
/// and then lexicographically in the numerators.
#[derive(Clone, Debug)]
pub struct TorsionIter {
    n: usize,
    bound: u64,
    filter: TorsionFilter,
    p: u64,
    order: u64,
    nums: Vec<u64>,
    fresh: bool,
}

impl TorsionIter {
    fn advance_order(&mut self) -> bool {
        loop {
            self.order += 1;
            if self.order > self.bound {
                return false;
            }
            if self.filter.admits(self.order, self.p) {
                self.nums = vec![0; self.n];
                self.fresh = true;
                return true;
            }
        }
    }

    fn step(&mut self) -> bool {
        if self.fresh {
            self.fresh = false;
            return true;
        }
        for i in (0..self.n).rev() {
            self.nums[i] += 1;
            if self.nums[i] < self.order {
                return true;
            }
            self.nums[i] = 0;
        }
        false
    }
}

impl Iterator for TorsionIter {
    type Item = TorusPoint;

    fn next(&mut self) -> Option<TorusPoint> {
        if self.n == 0 {
            return None;
        }
        loop {
            if self.order == 0 || !self.step() {
                if !self.advance_order() {
                    return None;
                }
                continue;
            }
            let m = self.order;
            if self.nums.iter().fold(m, |g, &c| g.gcd(&c)) == 1 {
                return Some(TorusPoint::new(
                    self.nums.iter().map(|&c| CycSymbol::from_u64(c, m)).collect(),
                ));
            }
        }
    }
}

/// Lazily enumerates the torsion points of order `≤ bound` admitted by
/// `filter` relative to `p`.
pub fn torsion_points(n: usize, bound: u64, filter: TorsionFilter, p: u64) -> TorsionIter {
    TorsionIter {
        n,
        bound,
        filter,
        p,
        order: 0,
        nums: Vec::new(),
        fresh: false,
    }
}

pub fn enum_torsion(n: usize, bound: u64, filter: TorsionFilter, p: u64) -> Vec<TorusPoint> {
    torsion_points(n, bound, filter, p).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanOptions {
    pub p: u64,
    pub bound: u64,
    pub precision: u32,
    pub filter: TorsionFilter,
    /// Cap on `k` for orders `p^k·m'`.
    pub max_p_level: Option<u32>,
    /// Cap on `m'` for orders `p^k·m'`.
    pub max_tame_order: Option<u64>,
    pub all_embeddings: bool,
}

impl ScanOptions {
    pub fn new(p: u64, bound: u64) -> Self {
        ScanOptions {
            p,
            bound,
            precision: DEFAULT_PRECISION,
            filter: TorsionFilter::All,
            max_p_level: None,
            max_tame_order: None,
            all_embeddings: false,
        }
    }

    fn admits_order(&self, order: u64) -> bool {
        let (k, m_prime) = arith::split_prime(order, self.p);
        self.max_p_level.is_none_or(|cap| k <= cap)
            && self.max_tame_order.is_none_or(|cap| m_prime <= cap)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub order: u64,
    pub point: TorusPoint,
    pub distance: DistanceValue,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TowerSummary {
    pub level: u64,
    pub m_prime: u64,
    pub k: u32,
    pub f: u64,
    pub e: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub prime: u64,
    pub precision: u32,
    pub order_bound: u64,
    pub all_embeddings: bool,
    /// Towers that held the scanned values, one per distinct point level.
    pub towers: Vec<TowerSummary>,
    pub points: usize,
    pub member_count: usize,
    pub members: Vec<TorusPoint>,
    pub min_non_member: Option<DistanceValue>,
    pub witness: Option<TorusPoint>,
    pub below_precision: Vec<TorusPoint>,
    /// Order → distance label → count.
    pub histogram: BTreeMap<u64, BTreeMap<String, usize>>,
    pub half_bound_min: Option<DistanceValue>,
    /// Whether the scan at half the bound has the same minimum.
    pub stable: bool,
    #[serde(skip)]
    pub rows: Vec<ScanRow>,
}

fn closest_non_member<'a>(rows: impl Iterator<Item = &'a ScanRow>) -> Option<(DistanceValue, TorusPoint)> {
    let mut best: Option<(DistanceValue, &TorusPoint)> = None;
    for row in rows {
        if row.distance.is_member() || row.distance == DistanceValue::BelowPrecision {
            continue;
        }
        if best.as_ref().is_none_or(|(d, _)| row.distance < *d) {
            best = Some((row.distance, &row.point));
        }
    }
    best.map(|(d, p)| (d, p.clone()))
}

fn histogram_label(d: &DistanceValue) -> String {
    match d.ratio() {
        Some(r) => r.to_string(),
        None => d.kind().to_string(),
    }
}

/// Distances from every admitted torsion point of order `≤ B` to `x`.
pub fn scan_gap(x: &Subvariety, opts: &ScanOptions) -> Result<ScanReport> {
    if !arith::is_prime(opts.p) {
        return Err(Error::NotPrime(opts.p));
    }
    if opts.bound == 0 {
        return Err(Error::Parse("order bound must be positive".into()));
    }
    let points: Vec<TorusPoint> = torsion_points(x.n, opts.bound, opts.filter, opts.p)
        .filter(|pt| opts.admits_order(pt.order()))
        .collect();
    let rows = points
        .into_par_iter()
        .map(|point| {
            let distance = if opts.all_embeddings {
                distance_all_embeddings(&point, x, opts.p, opts.precision)?
            } else {
                distance_auto(&point, x, opts.p, opts.precision)?
            };
            Ok(ScanRow {
                order: point.order(),
                point,
                distance,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut towers = BTreeSet::new();
    let mut histogram: BTreeMap<u64, BTreeMap<String, usize>> = BTreeMap::new();
    for row in &rows {
        let t = local_field::tower_for_level(opts.p, x.level_at(&row.point), opts.precision)?;
        let s = t.spec();
        towers.insert(TowerSummary {
            level: s.level(),
            m_prime: s.m_prime,
            k: s.k,
            f: s.f,
            e: s.e,
        });
        *histogram
            .entry(row.order)
            .or_default()
            .entry(histogram_label(&row.distance))
            .or_default() += 1;
    }
    let members: Vec<TorusPoint> = rows
        .iter()
        .filter(|r| r.distance.is_member())
        .map(|r| r.point.clone())
        .collect();
    let below_precision = rows
        .iter()
        .filter(|r| r.distance == DistanceValue::BelowPrecision)
        .map(|r| r.point.clone())
        .collect();
    let min = closest_non_member(rows.iter());
    let half = closest_non_member(rows.iter().filter(|r| r.order <= opts.bound / 2)).map(|(d, _)| d);
    let (min_non_member, witness) = match min {
        Some((d, w)) => (Some(d), Some(w)),
        None => (None, None),
    };
    Ok(ScanReport {
        prime: opts.p,
        precision: opts.precision,
        order_bound: opts.bound,
        all_embeddings: opts.all_embeddings,
        towers: towers.into_iter().collect(),
        points: rows.len(),
        member_count: members.len(),
        members,
        stable: half == min_non_member,
        min_non_member,
        witness,
        below_precision,
        histogram,
        half_bound_min: half,
        rows,
    })
}

impl ScanReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Parse(format!("csv: {e}"));
        w.write_record(["order", "point", "distance_kind", "val_num", "val_den"])
            .map_err(io)?;
        for row in &self.rows {
            let (num, den) = row
                .distance
                .ratio()
                .map_or((String::new(), String::new()), |r| {
                    (r.numer().to_string(), r.denom().to_string())
                });
            w.write_record([
                row.order.to_string(),
                row.point.to_string(),
                row.distance.kind().to_string(),
                num,
                den,
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Parse(format!("csv: {e}")))?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `v_p(2^{(p−1)p^{n−1}} − 1)` for `n = 1..=n_max`, by integers and in `Q_p`.
pub fn demo_habegger(p: u64, n_max: u32) -> Result<Vec<PowerOfTwoRow>> {
    if n_max == 0 || n_max > 8 {
        return Err(Error::Parse("n_max must lie in 1..=8".into()));
    }
    (1..=n_max)
        .map(|n| power_of_two_row(p, n, n_max + 8))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(v: &[TorusPoint]) -> Vec<String> {
        v.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(render(&enum_torsion(1, 3, TorsionFilter::All, 2)), ["0/1", "1/2", "1/3", "2/3"]);
        assert_eq!(
            render(&enum_torsion(1, 4, TorsionFilter::PPrimary, 2)),
            ["0/1", "1/2", "1/4", "3/4"]
        );
        assert_eq!(enum_torsion(2, 2, TorsionFilter::All, 3).len(), 4);
    }

    #[test]
    fn enumeration_counts_match_jordan_totient() {
        // Points of exact order m in G_m^2 number J_2(m) = m^2 ∏(1 − 1/l^2).
        let pts = enum_torsion(2, 30, TorsionFilter::All, 5);
        for m in 1..=30u64 {
            let j2 = arith::factorize(m)
                .iter()
                .fold(m * m, |acc, &(l, _)| acc / (l * l) * (l * l - 1));
            assert_eq!(pts.iter().filter(|p| p.order() == m).count() as u64, j2);
        }
        let distinct: BTreeSet<_> = pts.iter().collect();
        assert_eq!(distinct.len(), pts.len());
    }

    #[test]
    fn filters_partition() {
        let p = 3;
        let count = |f| enum_torsion(1, 40, f, p).len();
        let tame = count(TorsionFilter::Unramified);
        let wild = count(TorsionFilter::PPrimary);
        let mixed = count(TorsionFilter::Mixed);
        // The identity is both unramified and p-primary.
        assert_eq!(tame + wild + mixed - 1, count(TorsionFilter::All));
    }

    #[test]
    fn unit_line_small_scan() {
        let mut opts = ScanOptions::new(7, 12);
        opts.precision = 12;
        let r = scan_gap(&Subvariety::unit_line(), &opts).unwrap();
        assert_eq!(render(&r.members), ["1/6,5/6", "5/6,1/6"]);
        assert_eq!(r.rows.len(), r.points);
        assert_eq!(r.histogram.values().flat_map(|h| h.values()).sum::<usize>(), r.points);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), r.points + 1);
    }

    #[test]
    fn x_minus_one_gap_at_five() {
        let x = Subvariety::from_integer_terms(1, &[vec![(vec![1], 1), (vec![0], -1)]]).unwrap();
        let mut opts = ScanOptions::new(5, 100);
        opts.precision = 12;
        let r = scan_gap(&x, &opts).unwrap();
        assert_eq!(r.min_non_member, Some(DistanceValue::valuation(1, 4)));
        assert_eq!(r.witness.unwrap().to_string(), "1/5");
        assert_eq!(r.member_count, 1);
        assert!(r.stable);
    }

    #[test]
    fn empty_generators_rejected() {
        assert!(Subvariety::from_json(r#"{"n":2,"generators":[]}"#).is_err());
    }

    #[test]
    fn habegger_examples() {
        let rows = demo_habegger(3, 2).unwrap();
        assert_eq!(rows[0].integer_valuation, 1);
        assert_eq!(rows[1].integer_valuation, 2);
        assert_eq!(demo_habegger(5, 1).unwrap()[0].integer_valuation, 1);
        assert!(rows.iter().all(|r| r.digits_agree() && r.bound_holds()));
        assert!(demo_habegger(2, 3).is_err());
        assert!(demo_habegger(3, 9).is_err());
    }

    #[test]
    fn scan_is_deterministic_across_pools() {
        let mut opts = ScanOptions::new(5, 10);
        opts.precision = 10;
        let x = Subvariety::unit_line();
        let a = scan_gap(&x, &opts).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| scan_gap(&x, &opts).unwrap());
        assert_eq!(a.min_non_member, b.min_non_member);
        assert_eq!(a.witness, b.witness);
        assert_eq!(a.to_json(), b.to_json());
    }
}
