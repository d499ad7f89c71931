//! Command-line driver: per-fiber reports, surveys, omega statistics and the
//! gap-principle simulator.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperpencil::arith::{factorize, parse_rational, BigInt, BigRational, Compact, Factorization};
use hyperpencil::gap::{total_bound, vojta_mumford_chain, GapError, GapParams};
use hyperpencil::io::{write_points_csv, Config, IoError, LatticeInstance};
use hyperpencil::pencil::{delta, fiber_params, integral_disc, PencilError};
use hyperpencil::points::{enumerate_points, SearchConfig};
use hyperpencil::rank::RankError;
use hyperpencil::survey::{
    cmd_density, cmd_fiber, cmd_low_omega, omega_stats, survey, write_survey_csv, FiberError, FiberOptions, OmegaError,
};
use hyperpencil::PencilSpec;
use serde_json::{json, Value};
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const PRESET: &str = "paper-example";

mod exit {
    pub const FLAGS_FAILED: u8 = 1;
    pub const DEGENERATE: u8 = 2;
    pub const INCOMPLETE_FACTORIZATION: u8 = 3;
    pub const MEMORY: u8 = 4;
    pub const MALFORMED_LATTICE: u8 = 5;
    pub const INCONSISTENT_STABILIZER: u8 = 6;
    pub const USAGE: u8 = 64;
    pub const DATA: u8 = 65;
    pub const NO_INPUT: u8 = 66;
    pub const IO: u8 = 74;
}

#[derive(Parser)]
#[command(name = "hyperpencil", version, about = "Rank bounds, point counts and gap-principle simulation for y^2 = (x - s) Q(x)")]
struct Cli {
    /// Pencil config file, or the preset name `paper-example`.
    #[arg(long, global = true, default_value = PRESET)]
    pencil: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Height bound on x = u/w: max{|u|, w} <= H.
    #[arg(long)]
    height: Option<u64>,
    /// Skip the residue filter and test every candidate exactly.
    #[arg(long)]
    no_sieve: bool,
}

#[derive(Args, Clone)]
struct BoundArgs {
    /// The constant c in H*^(c / log log H*).
    #[arg(long, default_value = "1")]
    c: String,
    /// [k:Q] for the rank bound.
    #[arg(long, default_value_t = 1)]
    deg_k: u32,
    /// Extra primes needed to make the ring of P'-integers a PID.
    #[arg(long, default_value_t = 0)]
    pid_correction: u64,
}

#[derive(Args, Clone)]
struct GapArgs {
    /// Base constant c >= 1.
    #[arg(long)]
    c: Option<String>,
    /// Degree of the curve in its embedding.
    #[arg(long)]
    deg_c: Option<u32>,
    /// Height scale >= 1.
    #[arg(long)]
    kappa: Option<String>,
    /// Small-ball constant >= 1.
    #[arg(long)]
    c3: Option<String>,
    /// Per-ball multiplicity >= 1.
    #[arg(long)]
    c2_ball: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant of Q, and of the fiber at s when given.
    Disc {
        #[arg(long)]
        s: Option<String>,
    },
    /// Rank bound and point count for one fiber.
    Fiber {
        /// Parameter s as "a" or "a/b".
        #[arg(long)]
        s: String,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        bound: BoundArgs,
        /// Also write the points found as CSV.
        #[arg(long)]
        points_csv: Option<PathBuf>,
    },
    /// Reports for every integer s in a range.
    Survey {
        #[arg(long, default_value_t = 1)]
        s_from: i64,
        #[arg(long)]
        s_to: i64,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        bound: BoundArgs,
    },
    /// Distribution of omega(n) for n <= s_to, and of omega of the pencil product.
    OmegaStats {
        #[arg(long)]
        s_to: u64,
        #[arg(long, default_value_t = 512)]
        memory_budget_mb: usize,
    },
    /// Integers s <= s_to whose pencil product has at most t prime factors.
    LowOmega {
        #[arg(long)]
        s_to: u64,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 512)]
        memory_budget_mb: usize,
    },
    /// Fraction of fibers with at most (log s)^A points of height <= H.
    Density {
        #[arg(long, default_value_t = 1)]
        s_from: i64,
        #[arg(long)]
        s_to: i64,
        /// The exponent A >= 1.
        #[arg(long = "a", default_value = "10")]
        exponent: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Run the large-point counting chain on a lattice instance file.
    GapSim {
        #[arg(long)]
        lattice: PathBuf,
        #[command(flatten)]
        params: GapArgs,
    },
}

struct Failure {
    code: u8,
    message: String,
    /// Partial data still worth emitting.
    payload: Option<Value>,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into(), payload: None }
    }
}

type CmdResult = Result<Output, Failure>;

enum Output {
    Json(Value),
    Text(Vec<u8>),
    /// Data plus a non-zero exit code.
    JsonWithCode(Value, u8),
}

fn int(n: &BigInt) -> Value {
    Value::Number(n.to_string().parse().expect("integers are valid JSON numbers"))
}

fn factor_json(f: &Factorization) -> Value {
    Value::Array(f.factors().iter().map(|(p, e)| json!([int(p), e])).collect())
}

fn rational_arg(name: &str, text: &str) -> Result<BigRational, Failure> {
    parse_rational(text).map_err(|e| Failure::new(exit::USAGE, format!("--{name}: {e}")))
}

fn float_arg(name: &str, text: &str) -> Result<f64, Failure> {
    let r = rational_arg(name, text)?;
    let f = num_traits::ToPrimitive::to_f64(&r).filter(|f| f.is_finite());
    f.ok_or_else(|| Failure::new(exit::USAGE, format!("--{name}: {text:?} is out of range")))
}

fn load_config(pencil: &str) -> Result<Config, Failure> {
    if pencil == PRESET {
        return Ok(Config::for_pencil(&PencilSpec::sextic_example()));
    }
    let text = fs::read_to_string(pencil).map_err(|e| Failure::new(exit::NO_INPUT, format!("{pencil}: {e}")))?;
    Config::parse(&text).map_err(|e| Failure::new(exit::DATA, format!("{pencil}: {e}")))
}

fn load_pencil(cfg: &Config) -> Result<PencilSpec, Failure> {
    cfg.pencil().map_err(|e| Failure::new(exit::DATA, format!("invalid pencil: {e}")))
}

fn search_config(cfg: &Config, args: &SearchArgs) -> SearchConfig {
    let mut sc = cfg.search.clone().unwrap_or_default();
    if let Some(h) = args.height {
        sc.height_bound = h;
    }
    if args.no_sieve {
        sc.use_sieve = false;
    }
    sc
}

fn fiber_options(args: &BoundArgs) -> Result<FiberOptions, Failure> {
    if args.deg_k == 0 {
        return Err(Failure::new(exit::USAGE, "--deg-k must be at least 1"));
    }
    Ok(FiberOptions { c: float_arg("c", &args.c)?, deg_k: args.deg_k, pid_correction: args.pid_correction })
}

fn omega_failure(e: OmegaError) -> Failure {
    let code = match e {
        OmegaError::MemoryBudget { .. } => exit::MEMORY,
        OmegaError::RangeTooSmall { .. } => exit::USAGE,
        OmegaError::Fiber { .. } => exit::INCOMPLETE_FACTORIZATION,
    };
    Failure::new(code, e.to_string())
}

fn fiber_failure(e: FiberError, s: &BigRational) -> Failure {
    match &e {
        _ if e.is_degenerate() => Failure::new(exit::DEGENERATE, e.to_string()),
        FiberError::Rank(RankError::IncompleteFactorization { partial, source }) => Failure {
            code: exit::INCOMPLETE_FACTORIZATION,
            message: e.to_string(),
            payload: Some(json!({
                "s": hyperpencil::arith::format_rational(s),
                "complete": false,
                "bad_primes_found": partial.iter().map(int).collect::<Vec<_>>(),
                "error": source.to_string(),
            })),
        },
        FiberError::Pencil(PencilError::BadDenominator(_)) => Failure::new(exit::USAGE, e.to_string()),
        _ => Failure::new(exit::DATA, e.to_string()),
    }
}

fn cmd_disc(cli: &Cli, s: Option<&str>) -> CmdResult {
    let cfg = load_config(&cli.pencil)?;
    let spec = load_pencil(&cfg)?;
    let disc = spec.disc_q();
    let factor = |n: &BigInt| -> Result<Factorization, Failure> {
        factorize(n).map_err(|e| Failure::new(exit::INCOMPLETE_FACTORIZATION, e.to_string()))
    };
    let num_f = factor(&num_traits::Signed::abs(disc.numer()))?;
    let den_f = factor(disc.denom())?;
    let sign = if num_traits::Signed::is_negative(disc.numer()) { -1 } else { 1 };
    let mut out = json!({
        "Q": spec.q_poly().to_string(),
        "degree": spec.degree(),
        "genus": spec.genus(),
        "disc_Q": Compact(disc).to_string(),
        "disc_Q_sign": sign,
        "disc_Q_factorization": num_f.to_string(),
        "disc_Q_factors": factor_json(&num_f),
    });
    if !disc.is_integer() {
        out["disc_Q_denominator_factors"] = factor_json(&den_f);
    }
    if let Some(s) = s {
        let s = rational_arg("s", s)?;
        let fp = fiber_params(&spec, s.numer(), s.denom()).map_err(|e| fiber_failure(e.into(), &s))?;
        let d = delta(&spec, &fp);
        let id = integral_disc(&spec, &fp).map_err(|e| Failure::new(exit::DATA, e.to_string()))?;
        let f = hyperpencil::pencil::integral_disc_factorization(&spec, &fp)
            .map_err(|e| Failure::new(exit::INCOMPLETE_FACTORIZATION, e.to_string()))?;
        out["s"] = json!(Compact(&fp.s()).to_string());
        out["delta"] = json!(Compact(&d).to_string());
        out["integral_disc"] = int(&id);
        out["integral_disc_factorization"] = json!(f.to_string());
        out["omega_integral_disc"] = json!(f.omega());
    }
    Ok(Output::Json(out))
}

fn cmd_fiber_cli(cli: &Cli, s: &str, search: &SearchArgs, bound: &BoundArgs, points_csv: Option<&PathBuf>) -> CmdResult {
    let cfg = load_config(&cli.pencil)?;
    let spec = load_pencil(&cfg)?;
    let s = rational_arg("s", s)?;
    let sc = search_config(&cfg, search);
    let opts = fiber_options(bound)?;
    let started = Instant::now();
    let report = cmd_fiber(&spec, s.numer(), s.denom(), &sc, &opts).map_err(|e| fiber_failure(e, &s))?;
    log::info!("fiber s = {} done in {:.3} s", Compact(&s), started.elapsed().as_secs_f64());
    if let Some(path) = points_csv {
        let fp = fiber_params(&spec, s.numer(), s.denom()).map_err(|e| fiber_failure(e.into(), &s))?;
        let records = enumerate_points(&spec, &fp, &sc);
        let file = fs::File::create(path).map_err(|e| Failure::new(exit::IO, format!("{}: {e}", path.display())))?;
        write_points_csv(file, &records, sc.count_negatives).map_err(|e| Failure::new(exit::IO, e.to_string()))?;
    }
    match cli.format {
        Format::Json => Ok(Output::Json(serde_json::to_value(&report).expect("report serializes"))),
        Format::Csv => {
            let mut buf = Vec::new();
            write_survey_csv(&mut buf, std::slice::from_ref(&report), None).map_err(|e| Failure::new(exit::IO, e.to_string()))?;
            Ok(Output::Text(buf))
        }
    }
}

fn cmd_survey_cli(cli: &Cli, s_from: i64, s_to: i64, search: &SearchArgs, bound: &BoundArgs) -> CmdResult {
    let cfg = load_config(&cli.pencil)?;
    let spec = load_pencil(&cfg)?;
    let sc = search_config(&cfg, search);
    let opts = fiber_options(bound)?;
    let started = Instant::now();
    let rep = survey(&spec, s_from, s_to, &sc, &opts, cli.jobs);
    log::info!(
        "survey of {} fibers done in {:.3} s ({} skipped, {} failed)",
        rep.reports.len(),
        started.elapsed().as_secs_f64(),
        rep.skipped.len(),
        rep.failed.len()
    );
    match cli.format {
        Format::Json => Ok(Output::Json(serde_json::to_value(&rep).expect("survey serializes"))),
        Format::Csv => {
            let mut buf = Vec::new();
            write_survey_csv(&mut buf, &rep.reports, Some(&rep.summary)).map_err(|e| Failure::new(exit::IO, e.to_string()))?;
            Ok(Output::Text(buf))
        }
    }
}

fn budget_bytes(mb: usize) -> usize {
    mb.saturating_mul(1 << 20)
}

fn cmd_omega_cli(cli: &Cli, s_to: u64, budget_mb: usize) -> CmdResult {
    let cfg = load_config(&cli.pencil)?;
    let spec = load_pencil(&cfg)?;
    let stats = omega_stats(Some(&spec), s_to, budget_bytes(budget_mb)).map_err(omega_failure)?;
    match cli.format {
        Format::Json => Ok(Output::Json(serde_json::to_value(&stats).expect("stats serialize"))),
        Format::Csv => {
            let mut buf = b"omega,integers,pencil\n".to_vec();
            let pencil = stats.pencil.as_ref().map(|p| &p.histogram[..]).unwrap_or(&[]);
            let rows = stats.integers.histogram.len().max(pencil.len());
            for k in 0..rows {
                let a = stats.integers.histogram.get(k).copied().unwrap_or(0);
                let b = pencil.get(k).copied().unwrap_or(0);
                writeln!(buf, "{k},{a},{b}").expect("write to memory");
            }
            Ok(Output::Text(buf))
        }
    }
}

fn cmd_low_omega_cli(cli: &Cli, s_to: u64, t: usize, budget_mb: usize) -> CmdResult {
    let cfg = load_config(&cli.pencil)?;
    let spec = load_pencil(&cfg)?;
    let rep = cmd_low_omega(&spec, s_to, t, budget_bytes(budget_mb)).map_err(omega_failure)?;
    match cli.format {
        Format::Json => Ok(Output::Json(serde_json::to_value(&rep).expect("report serializes"))),
        Format::Csv => {
            let mut buf = b"s\n".to_vec();
            for s in &rep.hits {
                writeln!(buf, "{s}").expect("write to memory");
            }
            Ok(Output::Text(buf))
        }
    }
}

fn cmd_density_cli(cli: &Cli, s_from: i64, s_to: i64, exponent: &str, search: &SearchArgs) -> CmdResult {
    let cfg = load_config(&cli.pencil)?;
    let spec = load_pencil(&cfg)?;
    let a = float_arg("a", exponent)?;
    if a < 1.0 {
        return Err(Failure::new(exit::USAGE, "--a must be at least 1"));
    }
    let sc = search_config(&cfg, search);
    let rep = cmd_density(&spec, s_from, s_to, a, &sc, cli.jobs);
    match cli.format {
        Format::Json => Ok(Output::Json(serde_json::to_value(&rep).expect("report serializes"))),
        Format::Csv => {
            let mut buf = b"s_from,s_to,A,H,samples,skipped,passing,density,zero_sample,truncated_counts\n".to_vec();
            writeln!(
                buf,
                "{},{},{},{},{},{},{},{},{},{}",
                rep.s_from,
                rep.s_to,
                rep.exponent,
                rep.height_bound,
                rep.samples,
                rep.skipped,
                rep.passing,
                rep.density,
                rep.zero_sample,
                rep.truncated_counts
            )
            .expect("write to memory");
            Ok(Output::Text(buf))
        }
    }
}

fn gap_params(file: Option<&GapParams>, args: &GapArgs) -> Result<GapParams, Failure> {
    let mut p = file.cloned().unwrap_or_default();
    if let Some(c) = &args.c {
        p.c = rational_arg("c", c)?;
    }
    if let Some(d) = args.deg_c {
        p.deg_c = d;
    }
    if let Some(k) = &args.kappa {
        p.kappa = rational_arg("kappa", k)?;
    }
    if let Some(c3) = &args.c3 {
        p.c3 = rational_arg("c3", c3)?;
    }
    if let Some(cb) = &args.c2_ball {
        p.c2_ball = rational_arg("c2-ball", cb)?;
    }
    p.validate().map_err(|e| Failure::new(exit::USAGE, e.to_string()))?;
    Ok(p)
}

fn cmd_gap_sim(lattice: &PathBuf, args: &GapArgs) -> CmdResult {
    let text = fs::read_to_string(lattice)
        .map_err(|e| Failure::new(exit::MALFORMED_LATTICE, format!("{}: {e}", lattice.display())))?;
    let inst = LatticeInstance::parse(&text).map_err(|e| {
        let code = match e {
            IoError::Gap(GapError::InvalidParams(_)) => exit::USAGE,
            _ => exit::MALFORMED_LATTICE,
        };
        Failure::new(code, format!("{}: {e}", lattice.display()))
    })?;
    let params = gap_params(inst.gap_params.as_ref(), args)?;
    let trace = vojta_mumford_chain(&inst.lattice, &inst.vectors, inst.stab_classes.as_deref(), &params).map_err(|e| {
        let code = match e {
            GapError::InconsistentStabilizer(_) => exit::INCONSISTENT_STABILIZER,
            GapError::InvalidParams(_) => exit::USAGE,
            _ => exit::MALFORMED_LATTICE,
        };
        Failure::new(code, e.to_string())
    })?;
    let mut value = serde_json::to_value(&trace).expect("trace serializes");
    let total = total_bound(&params, inst.lattice.rho());
    value["total_bound"] = json!({
        "rational_part": Compact(&total.a).to_string(),
        "sqrt_coefficient": Compact(&total.b).to_string(),
        "radicand": Compact(&total.m).to_string(),
        "approx": total.to_f64(),
    });
    if trace.all_satisfied {
        Ok(Output::Json(value))
    } else {
        log::warn!("chain hypotheses or bound not satisfied on this instance");
        Ok(Output::JsonWithCode(value, exit::FLAGS_FAILED))
    }
}

fn run(cli: &Cli) -> CmdResult {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(Failure::new(exit::USAGE, "--jobs must be at least 1"));
        }
    }
    match &cli.command {
        Command::Disc { s } => cmd_disc(cli, s.as_deref()),
        Command::Fiber { s, search, bound, points_csv } => cmd_fiber_cli(cli, s, search, bound, points_csv.as_ref()),
        Command::Survey { s_from, s_to, search, bound } => cmd_survey_cli(cli, *s_from, *s_to, search, bound),
        Command::OmegaStats { s_to, memory_budget_mb } => cmd_omega_cli(cli, *s_to, *memory_budget_mb),
        Command::LowOmega { s_to, t, memory_budget_mb } => cmd_low_omega_cli(cli, *s_to, *t, *memory_budget_mb),
        Command::Density { s_from, s_to, exponent, search } => cmd_density_cli(cli, *s_from, *s_to, exponent, search),
        Command::GapSim { lattice, params } => cmd_gap_sim(lattice, params),
    }
}

fn emit(cli: &Cli, bytes: &[u8]) -> Result<(), Failure> {
    let result = match &cli.out {
        Some(path) => fs::write(path, bytes),
        None => std::io::stdout().lock().write_all(bytes),
    };
    result.map_err(|e| Failure::new(exit::IO, format!("cannot write output: {e}")))
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(v).expect("JSON value serializes");
    text.push('\n');
    text.into_bytes()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    let (bytes, code) = match run(&cli) {
        Ok(Output::Json(v)) => (json_bytes(&v), 0),
        Ok(Output::Text(b)) => (b, 0),
        Ok(Output::JsonWithCode(v, c)) => (json_bytes(&v), c),
        Err(f) => {
            eprintln!("error: {}", f.message);
            (f.payload.as_ref().map(json_bytes).unwrap_or_default(), f.code)
        }
    };
    if !bytes.is_empty() {
        if let Err(f) = emit(&cli, &bytes) {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    }
    ExitCode::from(code)
}
