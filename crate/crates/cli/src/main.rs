use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use front_descent::driver::SigmaSchedule;
use front_descent::harness::{
    cmd_profiles, cmd_run, cmd_trace_table, ExperimentConfig, ImportedFront, Instance, RunStatus,
    VariantSpec,
};
use front_descent::metrics::ProfileMetric;
use front_descent::suite::suite_entries;

/// Front Descent experiment runner.
#[derive(Parser)]
#[command(name = "fdesc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver on one instance or on a configured grid.
    Run(RunArgs),
    /// Build performance profiles from result directories.
    Profiles(ProfileArgs),
    /// Print selected rows of a trace file.
    TraceTable(TraceArgs),
    /// List the benchmark problems.
    ListProblems,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// sd, newton or bb; repeat for several.
    #[arg(long)]
    variant: Vec<String>,
    /// Constant stationarity threshold.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    eps_hv: Option<f64>,
    /// Seconds per run.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    start_points: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// External front as SOLVER:PROBLEM:N:PATH; repeatable.
    #[arg(long)]
    import: Vec<ImportedFront>,
}

#[derive(Args)]
struct ProfileArgs {
    /// Result directories written by `run`.
    #[arg(required = true)]
    results: Vec<PathBuf>,
    /// purity or hypervolume.
    #[arg(long, default_value = "purity")]
    metric: ProfileMetric,
    /// External front as SOLVER:PROBLEM:N:PATH; repeatable.
    #[arg(long)]
    import: Vec<ImportedFront>,
    #[arg(long, default_value = "profiles")]
    out: PathBuf,
}

#[derive(Args)]
struct TraceArgs {
    trace: PathBuf,
    /// Iterations to show, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1,10,20,30,40,50,60,70,80,90,100"
    )]
    rows: Vec<usize>,
}

fn experiment(args: RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_toml_file(path)?,
        None => ExperimentConfig::default(),
    };
    match (args.problem, args.n) {
        (Some(problem), Some(n)) => cfg.instances = vec![Instance::new(problem, n)],
        (Some(_), None) => bail!("--problem needs --n"),
        (None, Some(n)) => cfg.instances.iter_mut().for_each(|i| i.n = n),
        (None, None) => {}
    }
    if !args.variant.is_empty() {
        cfg.variants = args.variant.into_iter().map(VariantSpec::Name).collect();
    }
    if let Some(sigma) = args.sigma {
        cfg.fd.sigma = SigmaSchedule::Constant { sigma };
    }
    if let Some(eps) = args.eps_hv {
        cfg.fd.eps_hv = eps;
    }
    if let Some(t) = args.time_limit {
        cfg.time_limit = Some(t);
    }
    if let Some(k) = args.max_iterations {
        cfg.fd.max_iterations = k;
    }
    if let Some(c) = args.start_points {
        cfg.start_points = Some(c);
    }
    if let Some(j) = args.jobs {
        cfg.jobs = j;
    }
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    cfg.imports.extend(args.import);
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let mut out = io::stdout().lock();
    match execute(Cli::parse(), &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = experiment(args)?;
            let manifest = cmd_run(&cfg)?;
            for r in &manifest.runs {
                match r.status {
                    RunStatus::Ok => writeln!(
                        out,
                        "{}_n{} {}: ok ({:.3} s)",
                        r.problem, r.n, r.solver, r.wall_time
                    )?,
                    RunStatus::Failed => writeln!(
                        out,
                        "{}_n{} {}: failed: {}",
                        r.problem,
                        r.n,
                        r.solver,
                        r.error.as_deref().unwrap_or("unknown error")
                    )?,
                }
            }
            writeln!(out, "results in {}", cfg.output_dir.display())?;
        }
        Command::Profiles(args) => {
            let report = cmd_profiles(&args.results, &args.import, args.metric, &args.out)?;
            for (solver, points) in &report.profile.profiles {
                let at_one = points
                    .iter()
                    .take_while(|p| p[0] <= 1.0)
                    .last()
                    .map_or(0.0, |p| p[1]);
                writeln!(
                    out,
                    "{solver}: rho(1) = {at_one:.3}, {} breakpoints",
                    points.len()
                )?;
            }
            writeln!(
                out,
                "{} shared instances; profiles in {}",
                report.profile.instances.len(),
                args.out.display()
            )?;
        }
        Command::TraceTable(args) => {
            let table = cmd_trace_table(&args.trace, &args.rows)
                .with_context(|| format!("reading {}", args.trace.display()))?;
            write!(out, "{table}")?;
        }
        Command::ListProblems => {
            writeln!(
                out,
                "{:<10} {:>2}  {:<7} admissible n",
                "name", "m", "convex"
            )?;
            for e in suite_entries() {
                let ns: Vec<String> = e.admissible_n.iter().map(|n| n.to_string()).collect();
                writeln!(
                    out,
                    "{:<10} {:>2}  {:<7} {}",
                    e.name,
                    e.m,
                    e.convex,
                    ns.join(",")
                )?;
            }
        }
    }
    Ok(())
}
