use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use apfree_core::lattice::geometric_grid;
use apfree_core::numeric::{default_g, DEFAULT_EPSILON};
use apfree_core::{
    annulus_bound, behrend_bound, build_histogram, construct_annulus, construct_behrend,
    default_params, dhat_bound_check, discrepancy_scan, exact_nu, exact_nu_bb, midpoint_free,
    ApFreeSet, ConstructionParams, Error, Method, ShellSelection,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

const EXIT_ERROR: u8 = 1;
const EXIT_EMPTY: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_DISAGREE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "apfree",
    version,
    about = "Construct and check progression-free sets"
)]
struct Cli {
    /// Worker threads for enumeration (0 = all cores).
    #[arg(long, global = true, env = "APFREE_THREADS", default_value_t = 0)]
    threads: usize,

    /// Largest number of lattice points a single enumeration may visit.
    #[arg(long, global = true, default_value_t = apfree_core::DEFAULT_BUDGET)]
    budget: u64,

    /// Omit run metadata (timestamps) so outputs are byte-identical.
    #[arg(long, global = true)]
    reproducible: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a progression-free set and write it as apfree-set/1 JSON or CSV.
    Construct(ConstructArgs),
    /// Check that a set file has no three-term progression.
    Verify {
        /// Path to an apfree-set/1 JSON file.
        path: PathBuf,
    },
    /// Tabulate construction sizes over a grid of (k, y).
    Sweep(SweepArgs),
    /// Largest progression-free subset of {1..n}, by two independent solvers.
    Nu {
        #[arg(long)]
        n: u32,
    },
    /// Exact lattice counts against volumes for capped balls.
    Discrepancy(DiscrepancyArgs),
    /// Count witness vectors and compare with the exponential bound.
    WitnessCount {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        g: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Dump the squared-norm census of the cube as CSV.
    Histogram {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        y: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Behrend,
    #[value(name = "elkin", alias = "annulus")]
    Annulus,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Behrend => Method::Behrend,
            MethodArg::Annulus => Method::Annulus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Overrides {
    /// Chebyshev multiplier (sphere construction).
    #[arg(long)]
    a: Option<f64>,
    /// Annulus parameter; re-derives g as max(1, floor(epsilon k)).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Annulus width, overriding the derived value.
    #[arg(long)]
    g: Option<u32>,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Target bound; k and y are derived from it.
    #[arg(long, conflicts_with_all = ["k", "y"], required_unless_present_all = ["k", "y"])]
    n: Option<String>,
    #[arg(long, requires = "y")]
    k: Option<u32>,
    #[arg(long, requires = "k")]
    y: Option<u32>,
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Skip the midpoint check of the finished set.
    #[arg(long)]
    no_verify: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Inclusive range such as `2..4`.
    #[arg(long, value_parser = parse_range)]
    k_range: (u32, u32),
    #[arg(long, value_parser = parse_range)]
    y_range: (u32, u32),
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiscrepancyArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    t_max: u64,
    /// Coordinates with 1-based index >= m are constrained nonnegative.
    #[arg(long)]
    m: u32,
    #[arg(long, default_value_t = 1)]
    t_min: u64,
    /// Grid size (geometric, both ends included).
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LOW..HIGH, got `{s}`"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: u32 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: u32 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

/// A failure together with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => EXIT_PARSE,
            Error::EmptyResult => EXIT_EMPTY,
            _ => EXIT_ERROR,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_ERROR,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn write_output(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

fn timestamp(reproducible: bool) -> Option<u64> {
    if reproducible {
        None
    } else {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs())
    }
}

fn apply_overrides(
    mut p: ConstructionParams,
    o: &Overrides,
) -> apfree_core::Result<ConstructionParams> {
    if let Some(a) = o.a {
        p = p.with_a(a)?;
    }
    if let Some(eps) = o.epsilon {
        p = p.with_epsilon(eps)?;
    }
    if let Some(g) = o.g {
        p = p.with_g(g)?;
    }
    Ok(p)
}

fn summary(
    method: Method,
    set: &ApFreeSet,
    p: &ConstructionParams,
    shell: &ShellSelection,
) -> String {
    format!(
        "method={method} n={} k={} y={} shell=[{},{}] size={} density={:.6e}",
        set.n,
        p.k,
        p.y,
        shell.t_low,
        shell.t_high,
        set.len(),
        set.density()
    )
}

fn cmd_construct(args: &ConstructArgs, budget: u64, reproducible: bool) -> CmdResult {
    let method: Method = args.method.into();
    let base = match (&args.n, args.k, args.y) {
        (Some(n), _, _) => {
            let n: BigUint = n.parse().map_err(|_| Failure {
                code: EXIT_ERROR,
                message: format!("--n `{n}` is not a positive integer"),
            })?;
            default_params(&n, method)?
        }
        (None, Some(k), Some(y)) => ConstructionParams::from_dims(k, y)?,
        _ => unreachable!("clap enforces n or (k, y)"),
    };
    let params = apply_overrides(base, &args.overrides)?;

    let (set, shell, empty) = match method {
        Method::Behrend => {
            let a = construct_behrend(&params, budget)?;
            (a.set, a.shell, false)
        }
        _ => {
            let a = construct_annulus(&params, budget)?;
            eprintln!(
                "annulus_points={} witnesses={} removed={} survivor_fraction={:.6}",
                a.annulus_points,
                a.witness_count,
                a.removed,
                a.survivor_fraction()
            );
            let empty = a.is_empty_result();
            (a.set, a.shell, empty)
        }
    };
    println!("{}", summary(method, &set, &params, &shell));

    if !args.no_verify {
        let report = midpoint_free(&set);
        if let Some((i, j, l)) = report.witness {
            return Err(Failure {
                code: EXIT_ERROR,
                message: format!("construction produced a progression: witness {i} = ({j}+{l})/2"),
            });
        }
    }

    if let Some(out) = &args.out {
        match args.format {
            Format::Json => fs::write(out, set.to_json(timestamp(reproducible)))?,
            Format::Csv => {
                let mut buf = Vec::new();
                set.write_csv(&mut buf)?;
                fs::write(out, buf)?;
            }
        }
    }
    if empty {
        eprintln!("{}", Error::EmptyResult);
        return Ok(EXIT_EMPTY);
    }
    Ok(0)
}

fn cmd_verify(path: &Path) -> CmdResult {
    let text = fs::read_to_string(path)?;
    let set = ApFreeSet::from_json(&text)?;
    let report = midpoint_free(&set);
    match report.witness {
        None => {
            println!(
                "ok size={} pairs_checked={}",
                set.len(),
                report.pairs_checked
            );
            Ok(0)
        }
        Some((i, j, l)) => {
            println!("witness {i} = ({j}+{l})/2");
            Ok(EXIT_ERROR)
        }
    }
}

fn cmd_sweep(args: &SweepArgs, budget: u64) -> CmdResult {
    let method: Method = args.method.into();
    let mut csv = String::from(
        "k,y,n,shell_lo,shell_hi,size,density,behrend_bound,elkin_bound,survivor_fraction\n",
    );
    for k in args.k_range.0..=args.k_range.1 {
        for y in args.y_range.0..=args.y_range.1 {
            let params = apply_overrides(ConstructionParams::from_dims(k, y)?, &args.overrides)?;
            let outcome = match method {
                Method::Behrend => construct_behrend(&params, budget).map(|a| {
                    let fraction = if a.shell.population == 0 {
                        0.0
                    } else {
                        a.set.len() as f64 / a.shell.population as f64
                    };
                    (a.set, a.shell, fraction)
                }),
                _ => construct_annulus(&params, budget).map(|a| {
                    let fraction = a.survivor_fraction();
                    (a.set, a.shell, fraction)
                }),
            };
            let (set, shell, fraction) = match outcome {
                Ok(x) => x,
                Err(e @ (Error::BudgetExceeded { .. } | Error::EmptyWindow { .. })) => {
                    eprintln!("skipping k={k} y={y}: {e}");
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            csv.push_str(&format!(
                "{k},{y},{},{},{},{},{},{},{},{}\n",
                params.n,
                shell.t_low,
                shell.t_high,
                set.len(),
                set.density(),
                behrend_bound(&params.n),
                annulus_bound(&params.n),
                fraction
            ));
        }
    }
    write_output(args.out.as_deref(), csv.as_bytes())?;
    Ok(0)
}

fn cmd_nu(n: u32) -> CmdResult {
    let (value, witness) = exact_nu(n)?;
    let other = exact_nu_bb(n)?;
    let agree = value == other;
    println!("nu={value} oracle_agree={agree}");
    let listed: Vec<String> = witness.elements().iter().map(|x| x.to_string()).collect();
    println!("witness={}", listed.join(","));
    if !agree {
        eprintln!("bitmask search gives {value}, branch and bound gives {other}");
        return Ok(EXIT_DISAGREE);
    }
    Ok(0)
}

fn cmd_discrepancy(args: &DiscrepancyArgs, budget: u64) -> CmdResult {
    let grid = geometric_grid(args.t_min.max(1), args.t_max, args.points);
    let records = discrepancy_scan(args.k, &grid, args.m, budget)?;
    let mut csv = String::from("k,t,m,count_exact,volume,reference_volume,ratio\n");
    for r in records {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k, r.t, r.m, r.count_exact, r.volume, r.reference_volume, r.ratio
        ));
    }
    write_output(args.out.as_deref(), csv.as_bytes())?;
    Ok(0)
}

fn cmd_witness_count(k: u32, g: Option<u32>, epsilon: f64, budget: u64) -> CmdResult {
    let g = g.unwrap_or_else(|| default_g(k, epsilon));
    let check = dhat_bound_check(k, g, epsilon, budget)?;
    println!(
        "dhat={} bound={} epsilon={} ok={}",
        check.enumerated, check.bound, check.epsilon_used, check.ok
    );
    Ok(if check.ok { 0 } else { EXIT_ERROR })
}

fn cmd_histogram(k: u32, y: u32, out: Option<&Path>, budget: u64) -> CmdResult {
    let hist = build_histogram(k, y, budget)?;
    let mut buf = Vec::new();
    hist.write_csv(&mut buf)?;
    write_output(out, &buf)?;
    Ok(0)
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Construct(args) => cmd_construct(args, cli.budget, cli.reproducible),
        Command::Verify { path } => cmd_verify(path),
        Command::Sweep(args) => cmd_sweep(args, cli.budget),
        Command::Nu { n } => cmd_nu(*n),
        Command::Discrepancy(args) => cmd_discrepancy(args, cli.budget),
        Command::WitnessCount { k, g, epsilon } => cmd_witness_count(*k, *g, *epsilon, cli.budget),
        Command::Histogram { k, y, out } => cmd_histogram(*k, *y, out.as_deref(), cli.budget),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.budget == 0 {
        eprintln!("error: --budget must be positive");
        return ExitCode::from(EXIT_ERROR);
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
