//! The acceptance suite: one check per criterion, each reported with a
//! verdict, a one-line detail and its wall time.

pub mod oracle;

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith;
use crate::boxall::{self, FiniteModule, GaloisAction};
use crate::coset_lattice::{core, core_points_bruteforce, torsion_core, CompanionData, TorsionCoset, TorsionSubscheme};
use crate::cyclo_exact::{cyc_is_zero, cyclotomic_polynomial, CycSymbol, GaloisElement, TorusPoint};
use crate::error::{Error, Result};
use crate::galois_poly::{
    boxall_congruence, cyclotomic_factor_free, minimal_multiplier, tame_membership, IntPolynomial,
};
use crate::intmat::IntMatrix;
use crate::scan::{demo_habegger, scan_gap, ScanOptions};
use crate::special_fibre::{
    ec_frobenius_annihilate, field_pairs, gm_frobenius_identity, hasse_survey, EllipticCurveFq, FiniteField,
    MAX_FIELD_SIZE,
};
use crate::torus_geom::{
    distance_intersection_law, galois_distance_invariance, mattuck_gap, pullback_distance, translation_law,
    DistanceValue, Subvariety,
};
use oracle::{mattuck_expected, OracleDistance, TowerOracle, ORACLE_PRECISION};

pub const CRITERIA: [&str; 8] = [
    "mattuck gap",
    "gap scan on x + y = 1",
    "powers of 2 near 1",
    "distance calculus",
    "torsion core engine",
    "polynomial certificates",
    "special fibre",
    "boxall construction",
];

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Reduced sizes for a fast smoke run.
    pub quick: bool,
    /// JSON of the subvariety scanned by the gap criterion; `x + y − 1`
    /// when absent.
    pub variety_fixture: Option<String>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            quick: false,
            variety_fixture: None,
            seed: 0x7e57,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} [{}] {}: {} ({} ms)",
            self.id, self.name, self.detail, self.elapsed_ms
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub quick: bool,
    pub passed: bool,
    pub failed: Vec<usize>,
    pub elapsed_ms: u128,
    pub criteria: Vec<CriterionResult>,
}

impl VerifySummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Invariant(msg()))
    }
}

fn within(start: Instant, budget: Duration, what: &str) -> Result<()> {
    let spent = start.elapsed();
    ensure(spent < budget, || format!("{what} took {spent:?}, budget {budget:?}"))
}

pub fn run_criterion(id: usize, opts: &VerifyOptions) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => mattuck_criterion(opts),
        2 => gap_scan_criterion(opts),
        3 => habegger_criterion(opts),
        4 => calculus_criterion(opts),
        5 => core_criterion(opts),
        6 => certificate_criterion(opts),
        7 => special_fibre_criterion(opts),
        8 => boxall_criterion(opts),
        _ => Err(Error::Parse(format!("no criterion {id}"))),
    };
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(e) => (false, e.to_string()),
    };
    CriterionResult {
        id,
        name: CRITERIA.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
        passed,
        detail,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

pub fn verify_all(opts: &VerifyOptions) -> VerifySummary {
    let start = Instant::now();
    let criteria: Vec<CriterionResult> = (1..=CRITERIA.len()).map(|id| run_criterion(id, opts)).collect();
    let failed: Vec<usize> = criteria.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    VerifySummary {
        quick: opts.quick,
        passed: failed.is_empty(),
        failed,
        elapsed_ms: start.elapsed().as_millis(),
        criteria,
    }
}

fn mattuck_criterion(opts: &VerifyOptions) -> Result<String> {
    let bound = if opts.quick { 30 } else { 100 };
    let mut seen = Vec::new();
    for p in [3u64, 5, 7] {
        let start = Instant::now();
        let r = mattuck_gap(p, 1, bound, 8)?;
        within(start, Duration::from_secs(10), &format!("mattuck p={p}"))?;
        let expected = Ratio::new(1, p - 1);
        ensure(mattuck_expected(p, bound) == Some(expected), || {
            format!("oracle disagrees with 1/(p-1) at p={p}")
        })?;
        ensure(r.min_distance == DistanceValue::Valuation(expected), || {
            format!("p={p}: min distance {:?}, expected 1/{}", r.min_distance, p - 1)
        })?;
        let witness = (TorusPoint::identity(1), TorusPoint::parse(&format!("1/{p}"))?);
        ensure(r.witness == witness, || format!("p={p}: witness {:?}", r.witness))?;
        ensure(r.kernel_consistent, || format!("p={p}: reduction kernel test inconsistent"))?;
        seen.push(format!("p={p}: 1/{} over {} points", p - 1, r.points));
    }
    Ok(seen.join("; "))
}

fn certify_member(x: &Subvariety, point: &TorusPoint) -> bool {
    x.evaluate_exact(point).iter().all(cyc_is_zero)
}

fn gap_scan_criterion(opts: &VerifyOptions) -> Result<String> {
    let x = match &opts.variety_fixture {
        Some(json) => Subvariety::from_json(json).map_err(|e| Error::Parse(format!("variety fixture: {e}")))?,
        None => Subvariety::unit_line(),
    };
    let (bound, half) = if opts.quick { (30, 15) } else { (60, 30) };
    let start = Instant::now();
    let mut scan_opts = ScanOptions::new(7, bound);
    scan_opts.precision = 12;
    scan_opts.max_p_level = Some(2);
    let full = scan_gap(&x, &scan_opts)?;
    scan_opts.bound = half;
    let halved = scan_gap(&x, &scan_opts)?;

    let members: BTreeSet<String> = full.members.iter().map(ToString::to_string).collect();
    let expected: BTreeSet<String> = ["1/6,5/6", "5/6,1/6"].into_iter().map(String::from).collect();
    ensure(members == expected, || format!("members {members:?}"))?;
    ensure(full.members.iter().all(|p| certify_member(&x, p)), || {
        "a member lacks a symbolic certificate".into()
    })?;
    let exact_members = full.rows.iter().filter(|r| certify_member(&x, &r.point)).count();
    ensure(exact_members == full.member_count, || {
        format!("{exact_members} exact zeros against {} reported members", full.member_count)
    })?;
    ensure(full.below_precision.is_empty(), || {
        format!("{} points below precision", full.below_precision.len())
    })?;
    let min = full.min_non_member.ok_or_else(|| Error::Invariant("no non-member scanned".into()))?;
    // A finite valuation is a strictly positive distance.
    ensure(matches!(min, DistanceValue::Valuation(_)), || format!("min non-member distance {min:?}"))?;
    ensure(halved.min_non_member == Some(min), || {
        format!("min at {half} is {:?}, at {bound} is {min:?}", halved.min_non_member)
    })?;

    let mut brute = TowerOracle::new(7);
    let cap = Ratio::from_integer(u64::from(ORACLE_PRECISION) - 1);
    for row in &full.rows {
        let seen = brute.distance(&row.point, &x);
        let agree = match (row.distance, seen) {
            (DistanceValue::Member, OracleDistance::Vanishes) => true,
            (DistanceValue::Valuation(a), OracleDistance::Valuation(b)) => a == b,
            (DistanceValue::Valuation(a), OracleDistance::Vanishes) => a >= cap,
            _ => false,
        };
        ensure(agree, || {
            format!("oracle sees {seen:?} at {}, scan has {:?}", row.point, row.distance)
        })?;
    }
    within(start, Duration::from_secs(60), "gap scan")?;
    let witness = full.witness.map(|w| w.to_string()).unwrap_or_default();
    Ok(format!(
        "{} points, members {{(1/6,5/6), (5/6,1/6)}}, min {} at ({witness}) for bounds {half} and {bound}, oracle agrees",
        full.points,
        min.ratio().map(|r| r.to_string()).unwrap_or_default()
    ))
}

fn habegger_criterion(_opts: &VerifyOptions) -> Result<String> {
    let mut rows = 0;
    for p in [3u64, 5] {
        for row in demo_habegger(p, 6)? {
            let exact = BigInt::from(2).pow(row.exponent as u32) - 1u32;
            let pb = BigInt::from(p);
            let mut v = 0;
            let mut cur = exact;
            while cur.is_multiple_of(&pb) {
                cur /= &pb;
                v += 1;
            }
            ensure(v == row.integer_valuation, || format!("p={p} n={}: valuation {v}", row.n))?;
            ensure(row.bound_holds(), || format!("p={p} n={}: valuation {v} < n", row.n))?;
            ensure(row.digits_agree() && row.valuations_agree(), || {
                format!("p={p} n={}: tower and integer digits differ", row.n)
            })?;
            rows += 1;
        }
    }
    Ok(format!("{rows} rows, v_p >= n and digits agree"))
}

const LAW_ORDERS: [u64; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12];

fn random_point<R: Rng>(rng: &mut R, n: usize) -> TorusPoint {
    let order = LAW_ORDERS[rng.gen_range(0..LAW_ORDERS.len())];
    TorusPoint::new((0..n).map(|_| CycSymbol::from_u64(rng.gen_range(0..order), order)).collect())
}

fn random_poly<R: Rng>(rng: &mut R, n: usize) -> Vec<(Vec<i64>, i64)> {
    let terms = rng.gen_range(2..=3);
    (0..terms)
        .map(|_| {
            let exps = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            let c = [-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
            (exps, c)
        })
        .collect()
}

/// Rational generators; with probability 1/3 one of them vanishes at `at`.
fn random_subvariety<R: Rng>(rng: &mut R, n: usize, at: &TorusPoint) -> Result<Subvariety> {
    let count = rng.gen_range(1..=2);
    let mut gens: Vec<Vec<(Vec<i64>, i64)>> = (0..count).map(|_| random_poly(rng, n)).collect();
    if rng.gen_range(0..3) == 0 {
        let i = rng.gen_range(0..n);
        let mut e = vec![0; n];
        e[i] = at.order() as i64;
        gens[0] = vec![(e, 1), (vec![0; n], -1)];
    }
    Subvariety::from_integer_terms(n, &gens)
}

fn random_galois<R: Rng>(rng: &mut R, p: u64, order: u64) -> Result<GaloisElement> {
    let level = if rng.gen_bool(0.5) { order * p } else { order };
    let (k, _) = arith::split_prime(level, p);
    let pk = p.pow(k);
    let unit = loop {
        let b = rng.gen_range(1..=pk.max(1));
        if b.gcd(&pk) == 1 {
            break b;
        }
    };
    GaloisElement::new(p, level, rng.gen_range(0..12), unit)
}

fn calculus_criterion(opts: &VerifyOptions) -> Result<String> {
    let instances = if opts.quick { 100 } else { 1000 };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = 2;
    let precision = 12;
    let mut members = 0;
    for i in 0..instances {
        let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let point = random_point(&mut rng, n);
        let x = random_subvariety(&mut rng, n, &point)?;
        let y = random_subvariety(&mut rng, n, &point)?;
        let b = IntMatrix::from_i64(
            &(0..n).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect::<Vec<_>>(),
            n,
        );
        let q = random_point(&mut rng, n);
        let sigma = random_galois(&mut rng, p, point.order())?;

        let fail = |law: &str, lhs: &DistanceValue, rhs: &DistanceValue| {
            format!("instance {i} (p={p}, P=({point})): {law} gives {lhs:?} against {rhs:?}")
        };
        let c = distance_intersection_law(&point, &x, &y, p, precision)?;
        ensure(c.holds(), || fail("intersection", &c.lhs, &c.rhs))?;
        if c.lhs.is_member() {
            members += 1;
        }
        let c = pullback_distance(&b, &y, &point, p, precision)?;
        ensure(c.holds(), || fail("pullback", &c.lhs, &c.rhs))?;
        let c = galois_distance_invariance(&sigma, &point, &x, precision)?;
        ensure(c.holds(), || fail("galois", &c.lhs, &c.rhs))?;
        let c = translation_law(&point, &q, &x, p, precision)?;
        ensure(c.holds(), || fail("translation", &c.lhs, &c.rhs))?;
    }
    Ok(format!("{instances} instances, four laws each, {members} with P on X ∩ Y"))
}

fn mu(m: i64) -> Result<TorsionSubscheme> {
    TorsionSubscheme::new(1, vec![TorsionCoset::roots_of_unity(m)])
}

fn random_coset<R: Rng>(rng: &mut R, n: usize) -> Result<TorsionCoset> {
    let rows: Vec<Vec<i64>> = (0..rng.gen_range(0..=n))
        .map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect())
        .collect();
    let lattice = if rows.is_empty() {
        IntMatrix::zeros(0, n)
    } else {
        IntMatrix::from_i64(&rows, n)
    };
    let shift = TorusPoint::new(
        (0..n)
            .map(|_| {
                let d = rng.gen_range(1..=6);
                CycSymbol::from_u64(rng.gen_range(0..d), d)
            })
            .collect(),
    );
    TorsionCoset::new(&lattice, &shift)
}

fn random_monic<R: Rng>(rng: &mut R, max_degree: usize) -> IntPolynomial {
    loop {
        let degree = rng.gen_range(1..=max_degree);
        let mut coeffs: Vec<i64> = (0..degree).map(|_| rng.gen_range(-3..=3)).collect();
        coeffs.push(1);
        if coeffs[0] != 0 {
            return IntPolynomial::from_i64(&coeffs);
        }
    }
}

fn core_criterion(opts: &VerifyOptions) -> Result<String> {
    let fib = IntPolynomial::from_i64(&[-1, -1, 1]);
    let report = torsion_core(&mu(3)?, &fib)?;
    ensure(report.core == mu(3)?.power(2)?, || format!("Fibonacci core {}", report.core.to_json()))?;
    let brute = core_points_bruteforce(&mu(3)?, &fib, 3)?;
    let found: BTreeSet<TorusPoint> = report.core.points_of_order_dividing(3).into_iter().collect();
    ensure(brute.len() == 9 && brute == found, || {
        format!("brute force finds {} points", brute.len())
    })?;

    let instances = if opts.quick { 10 } else { 50 };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xc0de);
    let mut compared = 0;
    for i in 0..instances {
        let n = if rng.gen_bool(0.7) { 1 } else { 2 };
        let f = random_monic(&mut rng, 3 - n);
        let count = rng.gen_range(1..=3);
        let x = TorsionSubscheme::new(n, (0..count).map(|_| random_coset(&mut rng, n)).collect::<Result<_>>()?)?;
        let data = CompanionData::new(&f, n)?;
        let z = torsion_core(&x, &f)?.core;
        let tag = || format!("instance {i} (F = {f:?}, X = {})", x.to_json());
        ensure(z.image(&data.action)? == z, || format!("{}: M(Z) != Z", tag()))?;
        ensure(z.is_subset(&x.power(data.degree())?), || format!("{}: Z not in X^d", tag()))?;
        ensure(core(&z, &data.action)?.core == z, || format!("{}: core not idempotent", tag()))?;
        let f0 = f.coeff(0);
        let dim = n * data.degree();
        for m in 1..=8u64 {
            if !f0.gcd(&BigInt::from(m)).is_one() || m.pow(dim as u32) > 4096 {
                continue;
            }
            let brute = core_points_bruteforce(&x, &f, m)?;
            let found: BTreeSet<TorusPoint> = z.points_of_order_dividing(m).into_iter().collect();
            ensure(brute == found, || {
                format!("{}: {} brute-force points of order | {m}, core has {}", tag(), brute.len(), found.len())
            })?;
            compared += 1;
        }
    }
    Ok(format!(
        "Fibonacci core is mu_3^2 (9 points); {instances} random inputs, {compared} brute-force comparisons"
    ))
}

fn certificate_criterion(_opts: &VerifyOptions) -> Result<String> {
    for m in 1..=12u64 {
        let c = boxall_congruence(m)?;
        let cube = IntPolynomial::t_minus_one_pow(3);
        ensure(&c.quotient * &cube == c.remainder, || format!("m={m}: quotient does not re-expand"))?;
        // T^m − 1 against its truncated expansion at T = 1, evaluated at a few integers.
        for t in -3i64..=3 {
            let tb = BigInt::from(t);
            let s = &tb - 1;
            let lhs = tb.pow(m as u32) - 1;
            let rhs = BigInt::from(m) * &s
                + BigInt::from(m * (m - 1) / 2) * &s * &s
                + c.quotient.eval(&tb) * &s * &s * &s;
            ensure(lhs == rhs, || format!("m={m}: congruence fails at T={t}"))?;
        }
    }

    let t = |c: &[i64]| IntPolynomial::from_i64(c);
    let four = minimal_multiplier(&IntPolynomial::one(), &[t(&[-5, 1]), t(&[-1, 1])])?;
    ensure(four.multiplier == BigInt::from(4) && four.verify(), || {
        format!("multiplier for (T-5, T-1) is {}", four.multiplier)
    })?;
    let three = minimal_multiplier(
        &t(&[-1, 1]),
        &[IntPolynomial::t_minus_one_pow(3), IntPolynomial::t_pow_minus_one(3)],
    )?;
    ensure(three.multiplier == BigInt::from(3) && three.verify(), || {
        format!("multiplier for ((T-1)^3, T^3-1) is {}", three.multiplier)
    })?;

    for q in [3u64, 5, 9, 27, 2, 4] {
        let cert = tame_membership(q)?;
        let claim = if q % 2 == 1 { q } else { 4 * q };
        ensure(
            cert.claimed_multiplier == BigInt::from(claim)
                && cert.claimed.verify()
                && cert.minimal.verify()
                && cert.divides_claim,
            || format!("q={q}: tame certificate does not verify"),
        )?;
    }

    let phi1 = t(&[-1, 1]);
    let cases = [
        (t(&[-5, 1]), true),
        (cyclotomic_polynomial(3), false),
        (t(&[-1, -1, 1]), true),
        (&phi1 * &t(&[-2, 1]), false),
    ];
    for (f, expected) in &cases {
        ensure(cyclotomic_factor_free(f) == *expected, || format!("cyclotomic test wrong on {f:?}"))?;
    }
    Ok("congruence m=1..12, multipliers 4 and 3, tame q in {3,5,9,27,2,4}, 4 cyclotomic tests".into())
}

fn special_fibre_criterion(opts: &VerifyOptions) -> Result<String> {
    let f5 = FiniteField::new(5, 1)?;
    let e = EllipticCurveFq::new(f5, 1, 0)?;
    let count = e.point_count();
    ensure(count.count == 4 && count.trace == 2, || {
        format!("#E = {}, a = {}", count.count, count.trace)
    })?;
    ensure(count.weil == IntPolynomial::from_i64(&[5, -2, 1]), || format!("F_0 = {:?}", count.weil))?;
    for r in 1..=3 {
        let rep = ec_frobenius_annihilate(&e, r)?;
        ensure(rep.holds(), || format!("r={r}: {} points fail", rep.failures))?;
    }
    let mut curves = 0;
    for q in [5u64, 7, 11, 13] {
        let s = hasse_survey(q)?;
        ensure(s.violations == 0 && s.weil_failures == 0, || {
            format!("q={q}: {} Hasse violations, {} Weil failures", s.violations, s.weil_failures)
        })?;
        curves += s.curves;
    }
    let bound = if opts.quick { 1_000 } else { MAX_FIELD_SIZE };
    let mut units = 0;
    let pairs = field_pairs(bound);
    for &(q, r) in &pairs {
        let rep = gm_frobenius_identity(q, r)?;
        ensure(rep.failures == 0, || format!("q={q} r={r}: {} units fail", rep.failures))?;
        units += rep.units;
    }
    Ok(format!(
        "#E(F_5) = 4, a = 2, annihilation r <= 3; {curves} curves satisfy Hasse; G_m identity on {} fields ({units} units)",
        pairs.len()
    ))
}

fn boxall_criterion(opts: &VerifyOptions) -> Result<String> {
    let cyclic = |spec: &str, k: i64| GaloisAction::new(FiniteModule::parse(spec)?, &[vec![vec![k]]]);
    let w = boxall::boxall_construct(&cyclic("9", 4)?, &[1])?;
    ensure(w.sigma.rows[0][0] == 4 && w.x == [3], || {
        format!("Z/9: sigma = x{}, x = {:?}", w.sigma.rows[0][0], w.x)
    })?;
    let w = boxall::boxall_construct(&cyclic("27", 4)?, &[1])?;
    ensure(w.n == 2 && w.sigma.rows[0][0] == 10 && w.x == [9], || {
        format!("Z/27: n = {}, sigma = x{}, x = {:?}", w.n, w.sigma.rows[0][0], w.x)
    })?;

    let instances = if opts.quick { 30 } else { 200 };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xb0c5);
    for i in 0..instances {
        let (action, q) = boxall::random_instance(&mut rng);
        ensure(boxall::check_hypotheses(&action), || format!("instance {i}: hypotheses fail"))?;
        let w = boxall::boxall_construct(&action, &q)?;
        ensure(w.validates(&action.module, &q), || format!("instance {i}: witness does not validate"))?;
        ensure(w.claim_violations.is_empty(), || {
            format!("instance {i}: x_(i+1) != x_i at {:?}", w.claim_violations)
        })?;
        let sols = boxall::boxall_oracle(&action, &q)?;
        ensure(sols.iter().any(|(m, x)| *m == w.sigma && *x == w.x), || {
            format!("instance {i}: witness missing from oracle")
        })?;
    }
    Ok(format!("Z/9 gives (x4, 3), Z/27 gives (x10, 9); {instances} random instances validate"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyOptions {
        VerifyOptions {
            quick: true,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn oracle_matches_tower_on_small_scan() {
        let x = Subvariety::unit_line();
        let mut opts = ScanOptions::new(5, 12);
        opts.precision = 12;
        let r = scan_gap(&x, &opts).unwrap();
        let mut brute = TowerOracle::new(5);
        for row in &r.rows {
            match (row.distance, brute.distance(&row.point, &x)) {
                (DistanceValue::Member, OracleDistance::Vanishes) => {}
                (DistanceValue::Valuation(a), OracleDistance::Valuation(b)) => assert_eq!(a, b, "{}", row.point),
                other => panic!("{}: {other:?}", row.point),
            }
        }
    }

    #[test]
    fn oracle_wild_valuations() {
        for (p, k) in [(2u64, 3u32), (3, 2), (5, 1)] {
            let x = Subvariety::from_integer_terms(1, &[vec![(vec![1], 1), (vec![0], -1)]]).unwrap();
            let pt = TorusPoint::parse(&format!("1/{}", p.pow(k))).unwrap();
            assert_eq!(
                TowerOracle::new(p).distance(&pt, &x),
                OracleDistance::Valuation(oracle::wild_root_valuation(p, k))
            );
        }
    }

    #[test]
    fn corrupted_fixture_names_the_gap_scan() {
        let opts = VerifyOptions {
            variety_fixture: Some("{\"n\": 2, \"generators\": [[{\"exps\": [1]}]]}".into()),
            ..quick()
        };
        let r = run_criterion(2, &opts);
        assert!(!r.passed);
        assert_eq!(r.name, "gap scan on x + y = 1");
        assert!(r.detail.contains("variety fixture"), "{}", r.detail);
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run_criterion(9, &quick()).passed);
    }

    #[test]
    fn quick_certificates_and_boxall() {
        for id in [3, 6, 8] {
            let r = run_criterion(id, &quick());
            assert!(r.passed, "{r}");
        }
    }
}
