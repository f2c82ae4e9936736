mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use partlab::exact::{self, Comparability, ENUMERATION_CAP, PAIR_CAP};
use partlab::gaussian;
use partlab::sampling::{self, SampleMethod, SamplerConfig, DEFAULT_MAX_REJECTIONS};
use partlab::selfcheck;
use partlab::surrogate::{self, EventKind};

use config::Params;
use output::{json_document, Cell, Format, Manifest, Table};

#[derive(Parser, Debug)]
#[command(name = "partlab", version, about = "Experiments on graphical partitions and dominance order")]
struct Cli {
    /// key=value file supplying defaults for any flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Result format
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,
    /// Write results here instead of stdout
    #[arg(long, short = 'o', global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact p(n) or r(n) by exhaustive enumeration
    Exact(ExactArgs),
    /// Draw uniform random partitions
    Sample(SampleArgs),
    /// Monte Carlo estimate of p(n)
    EstimateP(EstimateArgs),
    /// Monte Carlo estimate of r(n)
    EstimateR(EstimateArgs),
    /// Surrogate event probabilities
    Surrogate(SurrogateArgs),
    /// Gaussian process Z_n = sum of B_k/k
    Gp {
        #[command(subcommand)]
        command: GpCommand,
    },
    /// Decay exponents
    Exponents {
        #[command(subcommand)]
        command: ExponentsCommand,
    },
    /// Run the acceptance checks
    Selfcheck(SelfcheckArgs),
}

#[derive(Args, Debug)]
struct ExactArgs {
    /// Graphical probability p(n)
    #[arg(long, conflicts_with = "r")]
    p: bool,
    /// Comparable-pair probability r(n)
    #[arg(long)]
    r: bool,
    #[arg(long)]
    n: Option<u64>,
    /// Count pairs comparable in either direction
    #[arg(long)]
    two_sided: bool,
    /// Enumeration cap
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    n: Option<u64>,
    /// exact | fristedt | fristedt-split
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    max_rejections: Option<u64>,
    /// Write the sampled partitions here, one per line
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long)]
    n: Option<u64>,
    /// exact | fristedt | fristedt-split
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    max_rejections: Option<u64>,
}

#[derive(Args, Debug)]
struct SurrogateArgs {
    /// eg | dominance | log | headline | e1 | e2 | e4
    #[arg(long)]
    event: Option<String>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Level of the log event
    #[arg(long, allow_hyphen_values = true)]
    threshold: Option<f64>,
    /// Scale of the headline threshold
    #[arg(long)]
    multiplier: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum GpCommand {
    /// Closed-form Cov(Z_m, Z_n)
    Cov {
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
    },
    /// P(max_{k<=N} Z_k <= N^alpha)
    Persist {
        #[arg(long = "N")]
        big_n: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
enum ExponentsCommand {
    /// Solve for rho*, beta, delta, gamma and the decay exponent
    Solve {
        /// Skip the rho* solve and use this beta
        #[arg(long)]
        beta_override: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct SelfcheckArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated criterion ids
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<u8>>,
}

struct Run {
    command: &'static str,
    seed: Option<u64>,
    table: Table,
    provenance: Vec<&'static str>,
    /// Overall verdict; false makes the process exit 1.
    ok: bool,
}

impl Run {
    fn new(command: &'static str, seed: Option<u64>, table: Table, provenance: &[&'static str]) -> Self {
        Run {
            command,
            seed,
            table,
            provenance: provenance.to_vec(),
            ok: true,
        }
    }
}

fn method(p: &mut Params, flag: Option<String>) -> Result<SampleMethod> {
    let text = p.or("method", flag, "exact".to_string())?;
    Ok(text.parse::<SampleMethod>()?)
}

fn sampler_config(
    p: &mut Params,
    n: Option<u64>,
    m: Option<String>,
    max_rejections: Option<u64>,
) -> Result<SamplerConfig> {
    let n = p.require("n", n)?;
    let mut cfg = SamplerConfig::new(n, method(p, m)?);
    cfg.max_rejections = p.or("max-rejections", max_rejections, DEFAULT_MAX_REJECTIONS)?;
    Ok(cfg)
}

fn run_exact(p: &mut Params, a: ExactArgs) -> Result<Run> {
    let want_p = p.switch("p", a.p)?;
    let want_r = p.switch("r", a.r)?;
    let n = p.require("n", a.n)?;
    match (want_p, want_r) {
        (true, false) => {
            let cap = p.or("cap", a.cap, ENUMERATION_CAP)?;
            let c = exact::exact_p_with_cap(n, cap)?;
            let mut t = Table::new(&["n", "pi_n", "graphical_count", "p_exact"]);
            t.push(vec![Cell::int(c.n), Cell::int(&c.total), Cell::int(&c.graphical), Cell::text(&c.p)]);
            Ok(Run::new("exact", None, t, &["exact::exact_p"]))
        }
        (false, true) => {
            let cap = p.or("cap", a.cap, PAIR_CAP)?;
            let mode = if p.switch("two-sided", a.two_sided)? {
                Comparability::TwoSided
            } else {
                Comparability::OneSided
            };
            let c = exact::exact_r_with(n, cap, mode)?;
            let mut t = Table::new(&["n", "comparable_pairs", "r_exact"]);
            t.push(vec![Cell::int(c.n), Cell::int(&c.comparable_pairs), Cell::text(&c.r)]);
            Ok(Run::new("exact", None, t, &["exact::exact_r"]))
        }
        _ => bail!("invalid parameter: exact needs exactly one of --p or --r"),
    }
}

fn run_sample(p: &mut Params, a: SampleArgs) -> Result<Run> {
    let cfg = sampler_config(p, a.n, a.method, a.max_rejections)?;
    let trials = p.require("trials", a.trials)?;
    let seed = p.require("seed", a.seed)?;
    let dump = p.get("dump", a.dump.map(|d| d.display().to_string()))?;
    if trials == 0 {
        bail!("invalid parameter trials: must be at least 1");
    }
    let draws = sampling::sample_many(&cfg, trials, seed)?;
    let mut t = Table::new(&["trial", "n", "largest", "length", "graphical"]);
    for (i, lambda) in draws.iter().enumerate() {
        t.push(vec![
            Cell::int(i),
            Cell::int(lambda.weight()),
            Cell::int(lambda.largest()),
            Cell::int(lambda.len()),
            Cell::Bool(partlab::partition::is_graphical_eg(lambda)),
        ]);
    }
    if let Some(path) = dump {
        let mut text = String::new();
        for lambda in &draws {
            text.push_str(&lambda.to_string());
            text.push('\n');
        }
        std::fs::write(&path, text).with_context(|| format!("cannot write {path}"))?;
    }
    Ok(Run::new("sample", Some(seed), t, &["sampling::sample_many", "partition::is_graphical_eg"]))
}

fn estimate_table(e: &sampling::ProbabilityEstimate) -> Table {
    let (lo, hi) = e.interval(partlab::stats::Z95);
    let mut t = Table::new(&["statistic", "n", "method", "trials", "hits", "estimate", "ci_lo", "ci_hi", "seed"]);
    t.push(vec![
        Cell::text(&e.statistic),
        Cell::int(e.n),
        Cell::text(e.method),
        Cell::int(e.trials),
        Cell::int(e.hits),
        Cell::Float(e.estimate()),
        Cell::Float(lo),
        Cell::Float(hi),
        Cell::int(e.seed),
    ]);
    t
}

fn run_estimate(p: &mut Params, a: EstimateArgs, r: bool) -> Result<Run> {
    let cfg = sampler_config(p, a.n, a.method, a.max_rejections)?;
    let trials = p.require("trials", a.trials)?;
    let seed = p.require("seed", a.seed)?;
    if r {
        let e = sampling::estimate_r(&cfg, trials, seed)?;
        Ok(Run::new("estimate-r", Some(seed), estimate_table(&e), &["sampling::estimate_r"]))
    } else {
        let e = sampling::estimate_p(&cfg, trials, seed)?;
        Ok(Run::new("estimate-p", Some(seed), estimate_table(&e), &["sampling::estimate_p"]))
    }
}

fn run_surrogate(p: &mut Params, a: SurrogateArgs) -> Result<Run> {
    let event = p.require("event", a.event)?;
    let n = p.require("n", a.n)?;
    let gamma = p.require("gamma", a.gamma)?;
    let delta = p.or("delta", a.delta, selfcheck::DELTA)?;
    let kind = match event.as_str() {
        "eg" => EventKind::Eg,
        "dominance" => EventKind::Dominance,
        "log" => EventKind::Log {
            threshold: p.or("threshold", a.threshold, 0.0)?,
        },
        "headline" => EventKind::Headline {
            multiplier: p.or("multiplier", a.multiplier, 1.0)?,
        },
        "e1" => EventKind::E1,
        "e2" => EventKind::E2,
        "e4" => EventKind::E4,
        other => bail!("invalid parameter event: unknown event {other:?}; expected eg|dominance|log|headline|e1|e2|e4"),
    };
    let trials = p.require("trials", a.trials)?;
    let seed = p.require("seed", a.seed)?;
    let e = surrogate::estimate_event(kind, n, gamma, delta, trials, seed)?;
    let (lo, hi) = e.ci();
    let mut t = Table::new(&["event", "n", "gamma", "delta", "trials", "hits", "estimate", "ci_lo", "ci_hi", "seed"]);
    t.push(vec![
        Cell::text(&e.event),
        Cell::int(e.n),
        Cell::Float(e.gamma),
        Cell::Float(e.delta),
        Cell::int(e.trials),
        Cell::int(e.hits),
        Cell::Float(e.estimate()),
        Cell::Float(lo),
        Cell::Float(hi),
        Cell::int(e.seed),
    ]);
    Ok(Run::new("surrogate", Some(seed), t, &["surrogate::estimate_event"]))
}

fn run_gp(p: &mut Params, c: GpCommand) -> Result<Run> {
    match c {
        GpCommand::Cov { m, n } => {
            let m = p.require("m", m)?;
            let n = p.require("n", n)?;
            let cov = gaussian::gp_cov(m, n)?;
            let mut t = Table::new(&["m", "n", "cov"]);
            t.push(vec![Cell::int(m), Cell::int(n), Cell::Float(cov)]);
            Ok(Run::new("gp cov", None, t, &["gaussian::gp_cov"]))
        }
        GpCommand::Persist {
            big_n,
            alpha,
            trials,
            seed,
        } => {
            let big_n = p.require("N", big_n)?;
            let alpha = p.require("alpha", alpha)?;
            let trials = p.require("trials", trials)?;
            let seed = p.require("seed", seed)?;
            let e = gaussian::persistence_prob(big_n, alpha, trials, seed)?;
            let (lo, hi) = e.ci();
            let mut t = Table::new(&["event", "N", "alpha", "trials", "hits", "estimate", "ci_lo", "ci_hi", "seed"]);
            t.push(vec![
                Cell::text("persist"),
                Cell::int(e.n_max),
                Cell::Float(e.alpha),
                Cell::int(e.trials),
                Cell::int(e.hits),
                Cell::Float(e.estimate()),
                Cell::Float(lo),
                Cell::Float(hi),
                Cell::int(e.seed),
            ]);
            Ok(Run::new("gp persist", Some(seed), t, &["gaussian::persistence_prob"]))
        }
    }
}

fn run_exponents(p: &mut Params, c: ExponentsCommand) -> Result<Run> {
    let ExponentsCommand::Solve {
        beta_override,
        tolerance,
    } = c;
    let sol = match p.get("beta-override", beta_override)? {
        Some(beta) => gaussian::optimize_exponents(beta)?,
        None => gaussian::solve_exponents(p.or("tolerance", tolerance, 1e-12)?)?,
    };
    let mut t = Table::new(&["rho_star", "beta", "delta", "gamma", "exponent", "exponent_12dp"]);
    t.push(vec![
        sol.rho_star.map_or(Cell::Null, Cell::Float),
        Cell::Float(sol.beta),
        Cell::Float(sol.delta),
        Cell::Float(sol.gamma),
        Cell::Float(sol.exponent),
        // the precision at which the exponent is usually quoted
        Cell::text(format!("{:.12}", sol.exponent)),
    ]);
    let prov: &[&'static str] = if sol.rho_star.is_some() {
        &["gaussian::solve_exponents"]
    } else {
        &["gaussian::optimize_exponents"]
    };
    Ok(Run::new("exponents solve", None, t, prov))
}

fn run_selfcheck(p: &mut Params, a: SelfcheckArgs) -> Result<Run> {
    let seed = p.or("seed", a.seed, selfcheck::DEFAULT_SEED)?;
    let only = p
        .get("only", a.only.map(|ids| ids.iter().map(u8::to_string).collect::<Vec<_>>().join(",")))?
        .map(|text| {
            text.split(',')
                .map(|s| s.trim().parse::<u8>().map_err(|e| anyhow!("invalid parameter only: {s:?}: {e}")))
                .collect::<Result<Vec<u8>>>()
        })
        .transpose()?;
    if let Some(ids) = &only {
        if let Some(bad) = ids.iter().find(|&&id| !(1..=14).contains(&id)) {
            bail!("invalid parameter only: no criterion {bad}");
        }
    }
    let wanted = |id: u8| only.as_ref().is_none_or(|ids| ids.contains(&id));
    let mut reports = Vec::new();
    for id in (1..=13).filter(|&id| wanted(id)) {
        let r = selfcheck::run_criterion(id, seed).expect("known id");
        eprintln!("{}", r.line());
        reports.push(r);
    }
    if wanted(14) {
        let first: Vec<_> = if reports.iter().any(|r| selfcheck::RANDOMIZED.contains(&r.id)) {
            reports.clone()
        } else {
            selfcheck::RANDOMIZED
                .iter()
                .filter_map(|&id| selfcheck::run_criterion(id, seed))
                .collect()
        };
        let r = selfcheck::determinism(&first);
        eprintln!("{}", r.line());
        reports.push(r);
    }
    let mut t = Table::new(&["id", "name", "status", "seed", "elapsed_secs", "limit_secs", "detail"]);
    for r in &reports {
        t.push(vec![
            Cell::int(r.id),
            Cell::text(&r.name),
            Cell::text(if r.passed { "pass" } else { "fail" }),
            r.seed.map_or(Cell::Null, Cell::int),
            Cell::Float(r.elapsed_secs),
            r.limit_secs.map_or(Cell::Null, Cell::Float),
            Cell::text(&r.detail),
        ]);
    }
    let mut run = Run::new("selfcheck", Some(seed), t, &["selfcheck::run_criterion", "selfcheck::determinism"]);
    run.ok = reports.iter().all(|r| r.passed);
    Ok(run)
}

fn configure_threads() -> Result<()> {
    let Ok(text) = std::env::var("PARTLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| anyhow!("invalid parameter PARTLAB_THREADS: {text:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("cannot configure worker pool")
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<bool> {
    let start = Instant::now();
    configure_threads()?;
    let mut params = Params::load(cli.config.as_deref())?;
    let format = params.or("output", cli.output, Format::Csv)?;
    let out = params.get("out", cli.out.map(|p| p.display().to_string()))?.map(PathBuf::from);

    let run = match cli.command {
        Command::Exact(a) => run_exact(&mut params, a)?,
        Command::Sample(a) => run_sample(&mut params, a)?,
        Command::EstimateP(a) => run_estimate(&mut params, a, false)?,
        Command::EstimateR(a) => run_estimate(&mut params, a, true)?,
        Command::Surrogate(a) => run_surrogate(&mut params, a)?,
        Command::Gp { command } => run_gp(&mut params, command)?,
        Command::Exponents { command } => run_exponents(&mut params, command)?,
        Command::Selfcheck(a) => run_selfcheck(&mut params, a)?,
    };

    let manifest = Manifest {
        tool: "partlab",
        version: env!("CARGO_PKG_VERSION"),
        command: run.command.to_string(),
        config: params.resolved().clone(),
        seed: run.seed,
        threads: rayon::current_num_threads(),
        duration_secs: start.elapsed().as_secs_f64(),
        provenance: run.provenance.clone(),
    };
    match format {
        Format::Json => write_out(out.as_deref(), &json_document(&manifest, &run.table))?,
        Format::Csv => {
            write_out(out.as_deref(), &run.table.to_csv())?;
            let mut text = serde_json::to_string_pretty(&manifest)?;
            text.push('\n');
            match &out {
                Some(path) => {
                    let mut side = path.clone().into_os_string();
                    side.push(".manifest.json");
                    write_out(Some(Path::new(&side)), &text)?;
                }
                None => eprint!("{text}"),
            }
        }
    }
    Ok(run.ok)
}

fn error_code(e: &anyhow::Error) -> &'static str {
    match e.downcast_ref::<partlab::Error>() {
        Some(inner) => inner.code(),
        None if e.to_string().starts_with("invalid parameter") => "invalid-parameter",
        None if e.to_string().starts_with("missing parameter") => "missing-parameter",
        None => "runtime",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                e.exit();
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: usage: {first}");
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let message = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {}: {message}", error_code(&e));
            ExitCode::from(2)
        }
    }
}
