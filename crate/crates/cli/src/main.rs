use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lbclust::audit;
use lbclust::gen::{gen_hardness_gadget, gen_random, GenSpec, Geometry};
use lbclust::harness::{run_bench, to_csv, BenchConfig, Problem};
use lbclust::io::{instance_to_json, parse_instance, parse_solution, solution_to_json};
use lbclust::kbs::CombineRule;
use lbclust::par::Parallelism;
use lbclust::rational::{self, Rational};
use lbclust::sum_radii::SolveOptions;
use lbclust::{validate_solution, Error, Instance};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(name = "lbclust", version, about = "Lower-bounded clustering: sum of radii and k-supplier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance.
    Solve(SolveArgs),
    /// Check a solution against an instance.
    Verify(VerifyArgs),
    /// Solve a tiny instance exactly by enumeration.
    Oracle(OracleArgs),
    /// Generate an instance.
    Gen(GenArgs),
    /// Compare a solver with the exact oracle over a range of seeds.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Lbksr,
    Lbksro,
    Lbksup,
    Lbksupo,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Lbksr => Problem::Lbksr,
            ProblemArg::Lbksro => Problem::Lbksro,
            ProblemArg::Lbksup => Problem::Lbksup,
            ProblemArg::Lbksupo => Problem::Lbksupo,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CombineArg {
    Basic,
    Improved,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeometryArg {
    Line,
    Plane,
    RandomMetric,
}

impl From<GeometryArg> for Geometry {
    fn from(g: GeometryArg) -> Self {
        match g {
            GeometryArg::Line => Geometry::Line,
            GeometryArg::Plane => Geometry::Plane,
            GeometryArg::RandomMetric => Geometry::RandomMetric,
        }
    }
}

#[derive(Args)]
struct SolverFlags {
    /// Accuracy parameter, as "p/q" or a decimal.
    #[arg(long, default_value = "1", value_parser = parse_positive)]
    epsilon: Rational,
    /// Worker threads for the guess and threshold loops; 1 runs sequentially.
    #[arg(long)]
    parallel: Option<usize>,
    /// Replace the binary-search step; bounds that rely on it are no longer checked.
    #[arg(long, value_parser = parse_positive)]
    delta_z_override: Option<Rational>,
    #[arg(long, value_enum, default_value = "improved")]
    combine: CombineArg,
}

impl SolverFlags {
    fn options(&self) -> SolveOptions {
        if self.delta_z_override.is_some() {
            log::warn!("--delta-z-override set: continuity-based checks may fail");
        }
        SolveOptions {
            epsilon: self.epsilon.clone(),
            combine: match self.combine {
                CombineArg::Basic => CombineRule::Basic,
                CombineArg::Improved => CombineRule::Improved,
            },
            delta_override: self.delta_z_override.clone(),
            parallelism: match self.parallel {
                None => Parallelism::Auto,
                Some(1) => Parallelism::Sequential,
                Some(n) => Parallelism::Threads(n),
            },
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long)]
    input: PathBuf,
    /// Defaults to standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Log search progress and print check counters to standard error.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "line")]
    geometry: GeometryArg,
    #[arg(long, default_value_t = 4)]
    max_facilities: usize,
    #[arg(long, default_value_t = 7)]
    max_clients: usize,
    #[arg(long, default_value_t = 3)]
    max_lower: u64,
    #[arg(long, default_value_t = 3)]
    max_k: usize,
    #[arg(long, default_value_t = 0)]
    max_m: usize,
    /// Emit the set-cover gadget instead, e.g. "0,1;1,2;2" (sets separated by ';').
    #[arg(long)]
    set_cover: Option<String>,
    /// Universe size for --set-cover.
    #[arg(long, default_value_t = 0)]
    universe: usize,
    /// Budget for --set-cover.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long, default_value_t = 0)]
    seed_from: u64,
    #[arg(long, default_value_t = 50)]
    seeds: u64,
    /// Leave the runtime column empty so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

fn parse_positive(s: &str) -> Result<Rational, String> {
    let q = rational::parse(s).map_err(|e| e.to_string())?;
    if q > rational::zero() {
        Ok(q)
    } else {
        Err("must be positive".into())
    }
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Infeasible(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible | Error::LpInfeasible | Error::UncoverableClient(_) => Failure::Infeasible(e.to_string()),
            Error::InvalidInstance(_) | Error::Parse(_) | Error::Json(_) | Error::UnknownId(_) | Error::UnknownFacility(_) | Error::GuardExceeded(_) => {
                Failure::Invalid(e.to_string())
            }
            _ => Failure::Other(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => fs::write(p, text).map_err(|e| Failure::Other(format!("{}: {e}", p.display()))),
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let inst = parse_instance(&read(path)?)?;
    let issues = inst.validate();
    for issue in &issues {
        eprintln!("{issue}");
    }
    if !inst.is_valid() {
        return Err(Failure::Invalid("instance failed validation".into()));
    }
    Ok(inst)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn solve(args: &SolveArgs) -> Result<(), Failure> {
    let inst = load_instance(&args.input)?;
    let problem = Problem::from(args.problem);
    let sol = problem.solve(&inst, &args.solver.options())?;
    if args.trace {
        let snap = audit::snapshot();
        for (check, passed) in &snap.passed {
            eprintln!("check {:<20} passed {passed} failed {}", check.name(), snap.failed(*check));
        }
    }
    eprintln!("cost {}", rational::format(&sol.cost));
    write(args.output.as_deref(), &pretty(&solution_to_json(&inst, &sol)))
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let inst = load_instance(&args.input)?;
    let sol = parse_solution(&inst, &read(&args.solution)?)?;
    let report = validate_solution(&inst, &sol);
    println!("cost {}", rational::format(&report.cost));
    for v in &report.violations {
        println!("violation: {v}");
    }
    if report.is_valid() {
        Ok(())
    } else {
        Err(Failure::Other(format!("{} violations", report.violations.len())))
    }
}

fn oracle(args: &OracleArgs) -> Result<(), Failure> {
    let inst = load_instance(&args.input)?;
    let sol = Problem::from(args.problem).oracle(&inst)?;
    eprintln!("cost {}", rational::format(&sol.cost));
    write(args.output.as_deref(), &pretty(&solution_to_json(&inst, &sol)))
}

fn parse_sets(s: &str) -> Result<Vec<Vec<usize>>, Failure> {
    s.split(';')
        .map(|set| {
            set.split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse().map_err(|_| Failure::Invalid(format!("bad element `{x}`"))))
                .collect()
        })
        .collect()
}

fn gen(args: &GenArgs) -> Result<(), Failure> {
    let inst = match &args.set_cover {
        Some(s) => {
            let sets = parse_sets(s)?;
            if let Some(bad) = sets.iter().flatten().find(|&&p| p >= args.universe) {
                return Err(Failure::Invalid(format!("element {bad} is outside the universe")));
            }
            gen_hardness_gadget(args.universe, &sets, args.k)
        }
        None => {
            let spec = GenSpec {
                max_facilities: args.max_facilities,
                max_clients: args.max_clients,
                max_lower: args.max_lower,
                max_k: args.max_k,
                max_m: args.max_m,
                geometry: args.geometry.into(),
            };
            gen_random(args.seed, &spec)
        }
    };
    write(args.output.as_deref(), &pretty(&instance_to_json(&inst)))
}

fn bench(args: &BenchArgs) -> Result<(), Failure> {
    let mut cfg = BenchConfig::new(args.problem.into(), args.seed_from..args.seed_from + args.seeds);
    cfg.options = args.solver.options();
    let rows = run_bench(&cfg)?;
    let over = rows.iter().filter(|r| !r.within_bound()).count();
    eprintln!("{} instances, {over} above the proven factor", rows.len());
    write(args.output.as_deref(), &to_csv(&rows, !args.no_timing))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let trace = matches!(&cli.command, Command::Solve(a) if a.trace);
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if trace { "debug" } else { "warn" })).init();
    let result = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Oracle(a) => oracle(a),
        Command::Gen(a) => gen(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("invalid input: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
