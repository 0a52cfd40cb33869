//! Command-line surface for the trace-polynomial toolkit.
//!
//! Exit codes form a stable contract: 0 = success / all checks pass,
//! 1 = a verification produced a failure report, 2 = usage error, violated
//! precondition, or arithmetic overflow. Machine-readable output goes to
//! standard out (or `--output`); diagnostics go to standard error.

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gamma2_core::certificate::{
    check_delta_word, full_certificate, CertifyParams, DeltaFailure,
};
use gamma2_core::poly::Monomial;
use gamma2_core::{
    compute_f, compute_f_sigma, constants, goodness, numeric_oracle, oracle_trials,
    verify_comb_good, verify_theorem, GenWord, GoodnessReport, IntMatrix2, MultilinearPoly,
    PolyMatrix2, SignSequence,
};

#[derive(Parser)]
#[command(
    name = "gamma2",
    version,
    about = "Trace polynomials of the level-2 congruence subgroup: computation, sign-coherence verification, and certificate checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the entry polynomials f, h, t, g of F_k and the trace p = f + g
    Compute(ComputeArgs),
    /// Sweep a polynomial (JSON, from file or stdin) over all sign sequences
    Goodness(GoodnessArgs),
    /// Exhaustively verify sign coherence of p_k, or of a combination with --matrix
    Verify(VerifyArgs),
    /// Run the full algebraic certificate and report per-check results
    Certify(CertifyArgs),
    /// Compare polynomial evaluation of p_k against the integer-matrix oracle
    Oracle(OracleArgs),
    /// Time the symbolic computation and the substitution sweep
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write machine output to a file instead of standard out
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ComputeArgs {
    /// Number of variable pairs k (k = 0 gives the identity)
    #[arg(long)]
    k: usize,
    /// Sign string of length 2k over {+, -}; emits the substituted entries
    #[arg(long)]
    sigma: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct GoodnessArgs {
    /// Path to a polynomial in JSON form, or "-" for standard input
    #[arg(long)]
    input: String,
    /// Worker count for the sigma sweep (default: GAMMA2_JOBS or all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Include the full per-sigma table in JSON output (4^k rows)
    #[arg(long)]
    per_sigma: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of variable pairs k (>= 1)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Row-major matrix literal [[a,c],[b,d]]: verify the combination
    /// a*f + b*h + c*t + d*g instead of the plain trace
    #[arg(long)]
    matrix: Option<String>,
    /// Worker count for the sigma sweep (default: GAMMA2_JOBS or all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Include the full per-sigma table in JSON output (4^k rows)
    #[arg(long)]
    per_sigma: bool,
    /// Lift the default cap k <= 6 (the sweep grows as 16^k)
    #[arg(long)]
    unsafe_large: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CertifyArgs {
    /// Word-length bound for the certificate-set truncation
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    depth: u64,
    /// The trace recursion is checked for every level below this bound
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Number of seeded random matrices mixed into the recursion pool
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Seed for the random matrix pool
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker count for the recursion sweep (default: GAMMA2_JOBS or all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Lift the default cap depth <= 10 (the word count grows as 4^depth)
    #[arg(long)]
    unsafe_large: bool,
    /// Run a deliberately failing self-test instead of the real certificate
    #[arg(long, value_enum)]
    negative_control: Option<NegativeControl>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NegativeControl {
    /// Corrupt one constant matrix; the identity suite must fail
    CorruptA6,
    /// Sweep a polynomial with coefficients of both signs; goodness must fail
    MixedPoly,
    /// Feed a non-decreasing matrix through the word checks; they must fail
    NonDecreasing,
}

#[derive(Args)]
struct OracleArgs {
    /// Number of variable pairs k (>= 1)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Number of random exponent vectors (entries in [-5,5] minus 0)
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Seed for the exponent generator
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated exponent vector of length 2k: compare this single point
    #[arg(long)]
    point: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Number of variable pairs k
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Worker count for the timed sweep (default: GAMMA2_JOBS or all cores)
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Goodness(args) => cmd_goodness(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

/// Worker count: flag, then GAMMA2_JOBS, then the default pool (0).
fn resolve_jobs(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("GAMMA2_JOBS").ok().and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

fn emit(out: &OutputArgs, content: String) -> anyhow::Result<()> {
    match &out.output {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON serialization");
    s.push('\n');
    s
}

fn cmd_compute(args: ComputeArgs) -> anyhow::Result<bool> {
    let k = args.k;
    let sigma = match &args.sigma {
        Some(text) => {
            let s: SignSequence = text.parse()?;
            if s.len() != 2 * k {
                bail!("sigma has {} signs, expected {}", s.len(), 2 * k);
            }
            Some(s)
        }
        None => None,
    };
    let matrix: PolyMatrix2 = match &sigma {
        Some(s) => compute_f_sigma(k, s)?,
        None => compute_f(k)?,
    };
    let trace = matrix.trace()?;
    let suffix = if sigma.is_some() { "^\u{3c3}" } else { "" };

    let content = match args.out.format {
        Format::Text => {
            let mut text = String::new();
            for (name, poly) in matrix.entries() {
                writeln!(text, "{name}{suffix} = {poly}").unwrap();
            }
            writeln!(text, "p{suffix} = {trace}").unwrap();
            text
        }
        Format::Json => {
            let value = serde_json::json!({
                "schema": "gamma2.compute/v1",
                "k": k,
                "sigma": sigma.map(|s| s.to_string()),
                "f": matrix.f.to_json_value(),
                "h": matrix.h.to_json_value(),
                "t": matrix.t.to_json_value(),
                "g": matrix.g.to_json_value(),
                "p": trace.to_json_value(),
            });
            json_text(&value)
        }
        Format::Csv => {
            let mut text = String::from("entry,mask,coeff\n");
            for (name, poly) in matrix.entries().into_iter().chain([("p", &trace)]) {
                for (m, c) in poly.terms() {
                    writeln!(text, "{name},{},{}", m.mask(), c).unwrap();
                }
            }
            text
        }
    };
    emit(&args.out, content)?;
    Ok(true)
}

fn goodness_output(
    out: &OutputArgs,
    report: &GoodnessReport,
    per_sigma: bool,
    header: serde_json::Value,
) -> anyhow::Result<()> {
    let content = match out.format {
        Format::Json => {
            let mut value = report.to_json_value(per_sigma);
            if let (Some(obj), Some(extra)) = (value.as_object_mut(), header.as_object()) {
                for (key, val) in extra {
                    obj.insert(key.clone(), val.clone());
                }
            }
            json_text(&value)
        }
        Format::Text => {
            let mut text = String::new();
            writeln!(text, "k = {}", report.k).unwrap();
            writeln!(text, "sigma count = {}", report.per_sigma.len()).unwrap();
            writeln!(text, "all good = {}", report.all_good).unwrap();
            writeln!(text, "sign formula holds = {}", report.sign_formula_holds).unwrap();
            writeln!(text, "zero patterns = {}", report.zero_count).unwrap();
            if let Some(failure) = &report.counterexample {
                writeln!(text, "counterexample = {}", failure.to_json_value()).unwrap();
            }
            text
        }
        Format::Csv => {
            let mut text = String::from("sigma,pattern\n");
            for v in &report.per_sigma {
                writeln!(text, "{},{}", v.sigma, v.pattern.tag()).unwrap();
            }
            text
        }
    };
    emit(out, content)
}

fn cmd_goodness(args: GoodnessArgs) -> anyhow::Result<bool> {
    let raw = if args.input == "-" {
        let mut buffer = String::new();
        std::io::stdin().read_to_string(&mut buffer)?;
        buffer
    } else {
        std::fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input))?
    };
    let poly = MultilinearPoly::parse_json(&raw)?;
    let report = goodness(&poly, resolve_jobs(args.jobs))?;
    goodness_output(
        &args.out,
        &report,
        args.per_sigma,
        serde_json::json!({ "source": args.input }),
    )?;
    Ok(report.all_good)
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<bool> {
    let k = args.k as usize;
    if k > 6 && !args.unsafe_large {
        bail!("k = {k} exceeds the default cap of 6; pass --unsafe-large to run it");
    }
    let jobs = resolve_jobs(args.jobs);
    let (report, header) = match &args.matrix {
        Some(literal) => {
            let m: IntMatrix2 = literal.parse()?;
            let report = verify_comb_good(k, &m, jobs)?;
            (report, serde_json::json!({ "matrix": m.to_string() }))
        }
        None => (verify_theorem(k, jobs)?, serde_json::json!({})),
    };
    goodness_output(&args.out, &report, args.per_sigma, header)?;
    Ok(report.all_good && report.sign_formula_holds)
}

fn cmd_certify(args: CertifyArgs) -> anyhow::Result<bool> {
    if let Some(control) = args.negative_control {
        return run_negative_control(control, &args);
    }
    let depth = args.depth as usize;
    if depth > 10 && !args.unsafe_large {
        bail!("depth = {depth} exceeds the default cap of 10; pass --unsafe-large to run it");
    }
    let params = CertifyParams {
        delta_depth: depth,
        recursion_k_max: args.k as usize,
        random_samples: args.samples,
        seed: args.seed,
        jobs: resolve_jobs(args.jobs),
    };
    let report = full_certificate(&constants(), &params)?;
    let content = match args.out.format {
        Format::Json => json_text(&report.to_json_value()),
        Format::Csv => report.to_csv(),
        Format::Text => {
            let mut text = String::new();
            writeln!(text, "identities: {}", verdict(report.identities_ok)).unwrap();
            writeln!(text, "cone decompositions: {}", verdict(report.cone_ok)).unwrap();
            writeln!(
                text,
                "recursion: {} (tested {}, base case {})",
                verdict(report.recursion_ok),
                report.recursion_tested,
                verdict(report.base_case_ok)
            )
            .unwrap();
            writeln!(
                text,
                "base equivalence: {} (checked {}, skipped {})",
                verdict(report.base_equivalence_ok),
                report.base_equivalence_checked,
                report.base_equivalence_skipped
            )
            .unwrap();
            writeln!(
                text,
                "delta: {} (depth {}, {} words)",
                verdict(report.delta_ok),
                report.delta_depth,
                report.delta.words_checked
            )
            .unwrap();
            writeln!(text, "all: {}", verdict(report.all_ok())).unwrap();
            for failure in &report.failures {
                writeln!(text, "failure: {}", failure.to_json_value()).unwrap();
            }
            text
        }
    };
    emit(&args.out, content)?;
    Ok(report.all_ok())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

/// Deliberate failure paths, used to exercise the reporting and the exit-code
/// contract end to end.
fn run_negative_control(control: NegativeControl, args: &CertifyArgs) -> anyhow::Result<bool> {
    match control {
        NegativeControl::CorruptA6 => {
            let mut consts = constants();
            consts.a6 = IntMatrix2::new(5, -2, -2, 2);
            let params = CertifyParams {
                delta_depth: (args.depth as usize).min(3),
                recursion_k_max: 1,
                random_samples: 2,
                seed: args.seed,
                jobs: resolve_jobs(args.jobs),
            };
            let report = full_certificate(&consts, &params)?;
            emit(&args.out, json_text(&report.to_json_value()))?;
            Ok(report.all_ok())
        }
        NegativeControl::MixedPoly => {
            let poly = MultilinearPoly::from_terms(
                1,
                [(Monomial::from_mask(0b01), 1), (Monomial::from_mask(0b10), -1)],
            )
            .map_err(|e| anyhow!(e))?;
            let report = goodness(&poly, 1)?;
            goodness_output(
                &args.out,
                &report,
                false,
                serde_json::json!({ "fixture": poly.to_string() }),
            )?;
            Ok(report.all_good)
        }
        NegativeControl::NonDecreasing => {
            let word: GenWord = "4".parse()?;
            let fixture = IntMatrix2::identity();
            let (failures, _) = check_delta_word(&word, &fixture)?;
            let value = serde_json::json!({
                "schema": "gamma2.delta-word-check/v1",
                "word": word.to_string(),
                "matrix": fixture.to_string(),
                "ok": failures.is_empty(),
                "failures": failures
                    .iter()
                    .map(|f: &DeltaFailure| serde_json::json!({
                        "word": f.word.to_string(),
                        "matrix": f.matrix.to_string(),
                        "violation": f.violation.tag(),
                    }))
                    .collect::<Vec<_>>(),
            });
            emit(&args.out, json_text(&value))?;
            Ok(failures.is_empty())
        }
    }
}

fn cmd_oracle(args: OracleArgs) -> anyhow::Result<bool> {
    let k = args.k as usize;
    if let Some(point_text) = &args.point {
        let exponents: Vec<i128> = point_text
            .split(',')
            .map(|part| part.trim().parse::<i128>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("parsing point {point_text:?}"))?;
        let oracle = numeric_oracle(k, &exponents)?;
        let evaluated = compute_f(k)?.trace()?.evaluate(&exponents)?;
        let agree = oracle == evaluated;
        let content = match args.out.format {
            Format::Json => json_text(&serde_json::json!({
                "schema": "gamma2.oracle-report/v1",
                "k": k,
                "point": exponents.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "oracle": oracle.to_string(),
                "evaluated": evaluated.to_string(),
                "agree": agree,
            })),
            _ => format!("oracle = {oracle}\nevaluated = {evaluated}\nagree = {agree}\n"),
        };
        emit(&args.out, content)?;
        return Ok(agree);
    }
    let report = oracle_trials(k, args.trials, args.seed)?;
    let content = match args.out.format {
        Format::Json => json_text(&report.to_json_value()),
        _ => format!(
            "{}/{} agree (k = {}, seed = {})\n",
            report.trials - report.mismatches.len() as u64,
            report.trials,
            report.k,
            report.seed
        ),
    };
    emit(&args.out, content)?;
    Ok(report.all_agree())
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<bool> {
    let k = args.k as usize;
    let jobs = resolve_jobs(args.jobs);

    let start = Instant::now();
    let matrix = compute_f(k)?;
    let compute_ms = start.elapsed().as_secs_f64() * 1e3;
    let trace = matrix.trace()?;

    let start = Instant::now();
    let report = goodness(&trace, jobs)?;
    let sweep_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut counts = Vec::with_capacity(k);
    for level in 1..=k {
        let fm = compute_f(level)?;
        counts.push(serde_json::json!({
            "k": level,
            "f": fm.f.num_terms(),
            "h": fm.h.num_terms(),
            "t": fm.t.num_terms(),
            "g": fm.g.num_terms(),
            "p": fm.trace()?.num_terms(),
        }));
    }

    let content = match args.out.format {
        Format::Json => json_text(&serde_json::json!({
            "schema": "gamma2.bench-report/v1",
            "k": k,
            "jobs": jobs,
            "compute_ms": compute_ms,
            "sweep_ms": sweep_ms,
            "sigma_count": report.per_sigma.len(),
            "term_counts": counts,
        })),
        Format::Csv => {
            let mut text = String::from("k,f_terms,h_terms,t_terms,g_terms,p_terms\n");
            for row in &counts {
                writeln!(
                    text,
                    "{},{},{},{},{},{}",
                    row["k"], row["f"], row["h"], row["t"], row["g"], row["p"]
                )
                .unwrap();
            }
            text
        }
        Format::Text => {
            let mut text = String::new();
            writeln!(text, "k = {k}, jobs = {jobs}").unwrap();
            writeln!(text, "compute F_k: {compute_ms:.3} ms").unwrap();
            writeln!(
                text,
                "sweep {} substitutions: {sweep_ms:.3} ms",
                report.per_sigma.len()
            )
            .unwrap();
            for row in &counts {
                writeln!(
                    text,
                    "k={} terms: f={} h={} t={} g={} p={}",
                    row["k"], row["f"], row["h"], row["t"], row["g"], row["p"]
                )
                .unwrap();
            }
            text
        }
    };
    emit(&args.out, content)?;
    Ok(true)
}
