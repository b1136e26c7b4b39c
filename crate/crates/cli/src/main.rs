use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use tvlab_core::boxall::{boxall_construct, boxall_oracle, FiniteModule, GaloisAction};
use tvlab_core::coset_lattice::{core_points_bruteforce, torsion_core, TorsionSubscheme};
use tvlab_core::cyclo_exact::TorusPoint;
use tvlab_core::galois_poly::{
    boxall_congruence, cyclotomic_factor_free, minimal_multiplier, tame_membership, IntPolynomial,
};
use tvlab_core::scan::{demo_habegger, scan_gap, ScanOptions};
use tvlab_core::special_fibre::{
    ec_frobenius_annihilate, field_pairs, gm_frobenius_identity, hasse_survey, EllipticCurveFq, FiniteField,
};
use tvlab_core::torus_geom::{distance_all_embeddings, distance_auto, mattuck_gap, Subvariety};
use tvlab_core::verify::{verify_all, VerifyOptions};
use tvlab_core::Error;

#[derive(Parser)]
#[command(name = "tvlab", version, about = "Exact p-adic distances from torsion points to subvarieties of split tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance from every torsion point of bounded order to a subvariety.
    Scan(ScanArgs),
    /// Distance from one torsion point to a subvariety.
    Distance(DistanceArgs),
    /// Smallest distance between distinct torsion points of bounded order.
    Mattuck(MattuckArgs),
    /// Build (σ, x) with (σ − 1)Q = x of order p for a Galois action on a finite p-group.
    Boxall(BoxallArgs),
    /// The largest torsion subscheme Z ⊂ X^d stable under the companion action of F.
    Zcore(ZcoreArgs),
    /// Integer polynomial identities with verifying certificates.
    Polyid(PolyidArgs),
    /// Frobenius identities over finite fields.
    Frobcheck(FrobArgs),
    /// v_p(2^((p−1)p^(n−1)) − 1) by integers and inside Q_p.
    Habegger(HabeggerArgs),
    /// Run the acceptance suite.
    VerifyAll(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct ScanArgs {
    /// Subvariety as JSON: {"n": .., "generators": [[{"exps": [..], "coeff": ..}, ..], ..]}.
    #[arg(long)]
    variety: PathBuf,
    #[arg(long)]
    prime: u64,
    #[arg(long)]
    max_order: u64,
    #[arg(long)]
    max_p_level: Option<u32>,
    #[arg(long)]
    max_tame_order: Option<u64>,
    #[arg(long, default_value_t = 40)]
    precision: u32,
    /// all, unramified, p-primary or mixed.
    #[arg(long, default_value = "all")]
    filter: String,
    /// Minimize over the embeddings of each point's field.
    #[arg(long)]
    all_embeddings: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long)]
    variety: PathBuf,
    /// Coordinates as fractions, e.g. 1/6,5/6.
    #[arg(long)]
    point: String,
    #[arg(long)]
    prime: u64,
    #[arg(long, default_value_t = 40)]
    precision: u32,
    #[arg(long)]
    all_embeddings: bool,
}

#[derive(Args)]
struct MattuckArgs {
    #[arg(long)]
    prime: u64,
    #[arg(long, default_value_t = 100)]
    max_order: u64,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 8)]
    precision: u32,
}

#[derive(Args)]
struct BoxallArgs {
    /// Invariant factors, e.g. 9 or 3^2,27.
    #[arg(long)]
    module: String,
    /// Generator matrices as JSON, e.g. [[[4]]].
    #[arg(long)]
    generators: String,
    /// The point Q, comma separated.
    #[arg(long)]
    point: String,
    /// Also list every solution found by enumerating the group.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct ZcoreArgs {
    /// Torsion subscheme X as a JSON list of cosets.
    #[arg(long)]
    subscheme: PathBuf,
    /// Coefficients of F, constant term first, e.g. -1,-1,1.
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
    /// Compare with a brute-force search on the m-torsion.
    #[arg(long)]
    brute_force: Option<u64>,
}

#[derive(Args)]
struct PolyidArgs {
    #[command(subcommand)]
    identity: PolyIdentity,
}

#[derive(Subcommand)]
enum PolyIdentity {
    /// T^m − 1 ≡ m(T−1) + C(m,2)(T−1)² mod (T−1)³.
    Congruence { m: u64 },
    /// Least c with c·target in the ideal of the generators; polynomials are
    /// coefficient lists, constant term first.
    Multiplier {
        #[arg(allow_hyphen_values = true)]
        target: String,
        #[arg(allow_hyphen_values = true, required = true)]
        generators: Vec<String>,
    },
    /// q(T−1), or 4q(T−1) for even q, in ((T−1)³, T^q − 1).
    Tame { q: u64 },
    /// Whether F has no cyclotomic factor.
    CyclotomicFree {
        #[arg(allow_hyphen_values = true)]
        poly: String,
    },
}

#[derive(Args)]
struct FrobArgs {
    #[command(subcommand)]
    check: FrobCheck,
}

#[derive(Subcommand)]
enum FrobCheck {
    /// F_0(Frob) = 0 on E(F_{q^r}) for r = 1..=degree.
    Curve {
        /// e.g. p=5,f=1
        #[arg(long)]
        field: String,
        /// e.g. a4=1,a6=0
        #[arg(long)]
        curve: String,
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Frob = [q] on every F_{q^r}^* with q^r ≤ max-size.
    Gm {
        #[arg(long, default_value_t = 10_000)]
        max_size: u64,
    },
    /// Hasse bound for every smooth short Weierstrass curve over F_q.
    Hasse {
        #[arg(long)]
        q: u64,
    },
}

#[derive(Args)]
struct HabeggerArgs {
    #[arg(long)]
    prime: u64,
    #[arg(long, default_value_t = 6)]
    n_max: u32,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    quick: bool,
    /// Subvariety scanned by the gap criterion instead of x + y − 1.
    #[arg(long)]
    variety: Option<PathBuf>,
    /// Where to write the JSON summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Outcome {
    emit(out, &serde_json::to_string_pretty(value).expect("serializable"))
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(msg()))
    }
}

fn scan(args: ScanArgs) -> Outcome {
    let x = Subvariety::from_json(&read(&args.variety)?)?;
    let mut opts = ScanOptions::new(args.prime, args.max_order);
    opts.precision = args.precision;
    opts.filter = args.filter.parse()?;
    opts.max_p_level = args.max_p_level;
    opts.max_tame_order = args.max_tame_order;
    opts.all_embeddings = args.all_embeddings;
    let report = scan_gap(&x, &opts)?;
    let out = args.output.out.as_deref();
    match args.output.format {
        Format::Json => emit(out, &report.to_json()),
        Format::Csv => match out {
            Some(path) => Ok(report.write_csv(fs::File::create(path)?)?),
            None => Ok(report.write_csv(io::stdout().lock())?),
        },
    }?;
    eprintln!(
        "{} points, {} members, min non-member {:?} at {}",
        report.points,
        report.member_count,
        report.min_non_member,
        report.witness.as_ref().map(ToString::to_string).unwrap_or_else(|| "-".into())
    );
    Ok(())
}

fn distance(args: DistanceArgs) -> Outcome {
    let x = Subvariety::from_json(&read(&args.variety)?)?;
    let point = TorusPoint::parse(&args.point)?;
    let d = if args.all_embeddings {
        distance_all_embeddings(&point, &x, args.prime, args.precision)?
    } else {
        distance_auto(&point, &x, args.prime, args.precision)?
    };
    emit_json(None, &json!({ "point": point.to_string(), "distance": d }))
}

fn mattuck(args: MattuckArgs) -> Outcome {
    let r = mattuck_gap(args.prime, args.dim, args.max_order, args.precision)?;
    emit_json(None, &r)?;
    check(r.kernel_consistent, || "reduction kernel test inconsistent".into())
}

fn parse_point(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Failure::Usage(format!("bad coordinate {t:?}"))))
        .collect()
}

fn boxall(args: BoxallArgs) -> Outcome {
    let module = FiniteModule::parse(&args.module)?;
    let action = GaloisAction::from_json(module, &args.generators)?;
    let q = parse_point(&args.point)?;
    let w = boxall_construct(&action, &q)?;
    let mut report = json!({ "witness": w });
    if args.oracle {
        let sols = boxall_oracle(&action, &q)?;
        report["oracle"] = json!(sols.iter().map(|(m, x)| json!({ "sigma": m, "x": x })).collect::<Vec<_>>());
    }
    emit_json(None, &report)?;
    check(w.validates(&action.module, &q), || "witness does not satisfy (σ − 1)Q = x".into())?;
    check(w.claim_violations.is_empty(), || {
        format!("x_(i+1) != x_i at steps {:?}", w.claim_violations)
    })
}

fn zcore(args: ZcoreArgs) -> Outcome {
    let x = TorsionSubscheme::from_json(&read(&args.subscheme)?)?;
    let f = IntPolynomial::parse(&args.poly)?;
    let r = torsion_core(&x, &f)?;
    let components: serde_json::Value = serde_json::from_str(&r.core.to_json()).expect("valid JSON");
    let mut report = json!({
        "core": components,
        "preimage_steps": r.preimage_steps,
        "image_steps": r.image_steps,
    });
    let mut mismatch = None;
    if let Some(m) = args.brute_force {
        let brute = core_points_bruteforce(&x, &f, m)?;
        let found: std::collections::BTreeSet<_> = r.core.points_of_order_dividing(m).into_iter().collect();
        report["brute_force"] = json!({ "m": m, "points": brute.len(), "agrees": brute == found });
        if brute != found {
            mismatch = Some(m);
        }
    }
    emit_json(None, &report)?;
    check(mismatch.is_none(), || format!("brute force disagrees on the {}-torsion", mismatch.unwrap()))
}

fn polyid(args: PolyidArgs) -> Outcome {
    match args.identity {
        PolyIdentity::Congruence { m } => emit_json(None, &boxall_congruence(m)?),
        PolyIdentity::Multiplier { target, generators } => {
            let target = IntPolynomial::parse(&target)?;
            let gens = generators
                .iter()
                .map(|g| IntPolynomial::parse(g))
                .collect::<Result<Vec<_>, _>>()?;
            let cert = minimal_multiplier(&target, &gens)?;
            emit_json(None, &cert)?;
            check(cert.verify(), || "cofactors do not re-expand".into())
        }
        PolyIdentity::Tame { q } => {
            let cert = tame_membership(q)?;
            emit_json(None, &cert)?;
            check(cert.claimed.verify(), || "claimed certificate does not verify".into())
        }
        PolyIdentity::CyclotomicFree { poly } => {
            let f = IntPolynomial::parse(&poly)?;
            emit_json(None, &json!({ "poly": f.to_string(), "cyclotomic_free": cyclotomic_factor_free(&f) }))
        }
    }
}

fn frobcheck(args: FrobArgs) -> Outcome {
    match args.check {
        FrobCheck::Curve { field, curve, degree } => {
            let e = EllipticCurveFq::parse(&curve, FiniteField::parse(&field)?)?;
            let reports = (1..=degree)
                .map(|r| ec_frobenius_annihilate(&e, r))
                .collect::<Result<Vec<_>, _>>()?;
            emit_json(None, &json!({ "count": e.point_count(), "extensions": reports }))?;
            check(reports.iter().all(|r| r.holds()), || "F_0(Frob) does not annihilate".into())
        }
        FrobCheck::Gm { max_size } => {
            let reports = field_pairs(max_size)
                .into_iter()
                .map(|(q, r)| gm_frobenius_identity(q, r))
                .collect::<Result<Vec<_>, _>>()?;
            let failures: u64 = reports.iter().map(|r| r.failures).sum();
            emit_json(
                None,
                &json!({
                    "fields": reports.len(),
                    "units": reports.iter().map(|r| r.units).sum::<u64>(),
                    "failures": failures,
                }),
            )?;
            check(failures == 0, || format!("{failures} units violate Frob = [q]"))
        }
        FrobCheck::Hasse { q } => {
            let s = hasse_survey(q)?;
            emit_json(None, &s)?;
            check(s.violations == 0 && s.weil_failures == 0, || "Hasse survey failed".into())
        }
    }
}

fn habegger(args: HabeggerArgs) -> Outcome {
    let rows = demo_habegger(args.prime, args.n_max)?;
    let out = args.output.out.as_deref();
    match args.output.format {
        Format::Json => emit_json(out, &rows)?,
        Format::Csv => {
            let mut text = String::from("p,n,exponent,integer_valuation,tower_valuation,digits_agree\n");
            for r in &rows {
                text += &format!(
                    "{},{},{},{},{},{}\n",
                    r.p,
                    r.n,
                    r.exponent,
                    r.integer_valuation,
                    serde_json::to_string(&r.tower_valuation).expect("serializable").replace(',', ";"),
                    r.digits_agree()
                );
            }
            emit(out, &text)?;
        }
    }
    check(
        rows.iter().all(|r| r.bound_holds() && r.digits_agree() && r.valuations_agree()),
        || "integer and tower computations disagree".into(),
    )
}

fn verify(args: VerifyArgs) -> Outcome {
    let variety_fixture = match &args.variety {
        Some(path) => Some(read(path)?),
        None => None,
    };
    let opts = VerifyOptions {
        quick: args.quick,
        variety_fixture,
        ..VerifyOptions::default()
    };
    let summary = verify_all(&opts);
    for c in &summary.criteria {
        eprintln!("{c}");
    }
    emit(args.out.as_deref(), &summary.to_json())?;
    check(summary.passed, || format!("failed criteria: {:?}", summary.failed))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Scan(a) => scan(a),
        Command::Distance(a) => distance(a),
        Command::Mattuck(a) => mattuck(a),
        Command::Boxall(a) => boxall(a),
        Command::Zcore(a) => zcore(a),
        Command::Polyid(a) => polyid(a),
        Command::Frobcheck(a) => frobcheck(a),
        Command::Habegger(a) => habegger(a),
        Command::VerifyAll(a) => verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("tvlab: check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("tvlab: {msg}");
            ExitCode::from(2)
        }
    }
}
