//! Experiment runner: grids of runs, persisted artifacts and profiles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::driver::{run, FdConfig, RunResult, Variant};
use crate::error::{FdError, Result};
use crate::hypervolume::{
    dominated_volume, hypervolume, reference_point_cross_solver, CROSS_SOLVER_OFFSET,
};
use crate::io::{
    read_front_images, read_json, read_trace_csv, write_atomic, write_front_csv, write_json,
    write_trace_csv, ProfileFile, RunMetrics,
};
use crate::metrics::{
    build_reference_front, delta_spread, gamma_spread, performance_profiles, profile_preprocess,
    purity, Images, ProfileInput, ProfileMetric, ReferenceExtremes,
};
use crate::suite::{initial_points, make_problem};

pub const MANIFEST_FILE: &str = "manifest.json";

/// A `(problem, n)` pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Instance {
    pub problem: String,
    pub n: usize,
}

impl Instance {
    pub fn new(problem: impl Into<String>, n: usize) -> Self {
        Self {
            problem: problem.into(),
            n,
        }
    }

    pub fn label(&self) -> String {
        format!("{}_n{}", self.problem, self.n)
    }
}

/// A variant given either by name (`"bb"`) or in full (`{ kind = "bb", a_min = 1e-3 }`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VariantSpec {
    Name(String),
    Full(Variant),
}

impl VariantSpec {
    pub fn resolve(&self) -> Result<Variant> {
        match self {
            VariantSpec::Name(s) => s.parse(),
            VariantSpec::Full(v) => Ok(*v),
        }
    }
}

/// A front produced elsewhere, joined into profile comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportedFront {
    pub solver: String,
    pub problem: String,
    pub n: usize,
    pub path: PathBuf,
}

impl std::str::FromStr for ImportedFront {
    type Err = FdError;

    /// `SOLVER:PROBLEM:N:PATH`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.splitn(4, ':').collect();
        let bad = || FdError::Config(format!("import `{s}` is not SOLVER:PROBLEM:N:PATH"));
        if parts.len() != 4 || parts.iter().any(|p| p.is_empty()) {
            return Err(bad());
        }
        Ok(Self {
            solver: parts[0].to_string(),
            problem: parts[1].to_string(),
            n: parts[2].parse().map_err(|_| bad())?,
            path: PathBuf::from(parts[3]),
        })
    }
}

/// Declarative experiment description, usually read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: Vec<Instance>,
    /// Empty means `fd.variant` alone.
    pub variants: Vec<VariantSpec>,
    pub fd: FdConfig,
    pub output_dir: PathBuf,
    /// Seconds per run; overrides `fd.wall_clock_limit`.
    pub time_limit: Option<f64>,
    /// Starting points per run; defaults to `n`.
    pub start_points: Option<usize>,
    /// Worker threads for independent runs.
    pub jobs: usize,
    pub imports: Vec<ImportedFront>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            instances: Vec::new(),
            variants: Vec::new(),
            fd: FdConfig::default(),
            output_dir: PathBuf::from("fd-results"),
            time_limit: None,
            start_points: None,
            jobs: 1,
            imports: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| FdError::Config(e.to_string()))
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| FdError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn resolved_variants(&self) -> Result<Vec<Variant>> {
        if self.variants.is_empty() {
            return Ok(vec![self.fd.variant]);
        }
        let mut out: Vec<Variant> = Vec::new();
        for spec in &self.variants {
            let v = spec.resolve()?;
            if out.contains(&v) {
                log::warn!("variant {} listed twice; running it once", v.label());
            } else {
                out.push(v);
            }
        }
        Ok(out)
    }

    /// Instances in first-seen order with duplicates dropped.
    pub fn unique_instances(&self) -> Vec<Instance> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for inst in &self.instances {
            let key = Instance::new(inst.problem.to_ascii_uppercase(), inst.n);
            if seen.insert(key) {
                out.push(inst.clone());
            } else {
                log::warn!("duplicate instance {} ignored", inst.label());
            }
        }
        out
    }

    /// Solver configuration for one variant.
    pub fn run_config(&self, variant: Variant) -> FdConfig {
        FdConfig {
            variant,
            wall_clock_limit: self.time_limit.or(self.fd.wall_clock_limit),
            ..self.fd.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances.is_empty() {
            return Err(FdError::Config("no instances to run".into()));
        }
        for inst in &self.instances {
            make_problem(&inst.problem, inst.n).map_err(|e| FdError::Config(e.to_string()))?;
        }
        if self.start_points == Some(0) {
            return Err(FdError::Config("start_points must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(FdError::Config("jobs must be positive".into()));
        }
        for v in self.resolved_variants()? {
            self.run_config(v).validate()?;
        }
        Ok(())
    }
}

/// Solver label used in directory names and profiles.
pub fn variant_label(variants: &[Variant], v: &Variant) -> String {
    let same: Vec<&Variant> = variants.iter().filter(|w| w.label() == v.label()).collect();
    if same.len() <= 1 {
        return v.label().to_string();
    }
    match v {
        Variant::Sd => "sd".to_string(),
        Variant::Newton { kappa } => format!("newton-k{kappa:e}"),
        Variant::Bb { a_min, a_max } => format!("bb-{a_min:e}-{a_max:e}"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

/// One line of the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRun {
    pub problem: String,
    pub n: usize,
    pub solver: String,
    pub status: RunStatus,
    pub error: Option<String>,
    pub config: FdConfig,
    pub start_points: usize,
    /// Paths relative to the manifest's directory.
    pub front: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub metrics: Option<PathBuf>,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub runs: Vec<ManifestRun>,
    pub imports: Vec<ImportedFront>,
}

fn ensure_writable(dir: &Path) -> Result<()> {
    let unwritable = |e: std::io::Error| {
        FdError::Config(format!(
            "output directory {} is not writable: {e}",
            dir.display()
        ))
    };
    fs::create_dir_all(dir).map_err(unwritable)?;
    let probe = dir.join(".fd-write-probe");
    fs::write(&probe, b"").map_err(unwritable)?;
    fs::remove_file(&probe).map_err(unwritable)?;
    Ok(())
}

/// Metrics of a run's front measured against itself: spreads use the run's
/// own extremes and the hypervolume uses the run's reference point.
pub fn run_metrics(result: &RunResult) -> Result<RunMetrics> {
    let images: Images = result
        .front
        .iter()
        .map(|e| e.fx.iter().copied().collect())
        .collect();
    let extremes = ReferenceExtremes::from_front(&images)?;
    Ok(RunMetrics {
        purity: None,
        gamma_spread: gamma_spread(&images, &extremes)?,
        delta_spread: delta_spread(&images, &extremes)?,
        hypervolume: dominated_volume(&images, &result.reference_point)?,
        evals: result.counters,
        wall_time: result.wall_time_seconds,
        stop_reason: result.stop_reason,
        iterations: result.trace.len() - 1,
        front_size: result.front.len(),
    })
}

struct Job {
    instance: Instance,
    variant: Variant,
    solver: String,
}

fn execute_job(config: &ExperimentConfig, job: &Job) -> ManifestRun {
    let rel = PathBuf::from(job.instance.label()).join(&job.solver);
    let fd = config.run_config(job.variant);
    let count = config.start_points.unwrap_or(job.instance.n);
    let mut entry = ManifestRun {
        problem: job.instance.problem.clone(),
        n: job.instance.n,
        solver: job.solver.clone(),
        status: RunStatus::Failed,
        error: None,
        config: fd.clone(),
        start_points: count,
        front: None,
        trace: None,
        metrics: None,
        wall_time: 0.0,
    };
    let outcome = (|| -> Result<RunResult> {
        let problem = make_problem(&job.instance.problem, job.instance.n)?;
        let x0 = initial_points(problem.as_ref(), count)?;
        let result = run(problem.as_ref(), x0, &fd)?;
        let dir = config.output_dir.join(&rel);
        fs::create_dir_all(&dir)?;
        write_front_csv(&dir.join("front.csv"), &result.front)?;
        write_trace_csv(&dir.join("trace.csv"), &result.trace)?;
        write_json(&dir.join("metrics.json"), &run_metrics(&result)?)?;
        Ok(result)
    })();
    match outcome {
        Ok(result) => {
            log::info!(
                "{} {}: {} points, {} iterations, {}",
                job.instance.label(),
                job.solver,
                result.front.len(),
                result.trace.len() - 1,
                result.stop_reason
            );
            entry.status = RunStatus::Ok;
            entry.wall_time = result.wall_time_seconds;
            entry.front = Some(rel.join("front.csv"));
            entry.trace = Some(rel.join("trace.csv"));
            entry.metrics = Some(rel.join("metrics.json"));
        }
        Err(e) => {
            log::error!("{} {} failed: {e}", job.instance.label(), job.solver);
            entry.error = Some(e.to_string());
        }
    }
    entry
}

/// Runs every instance with every variant and writes
/// `<out>/<PROBLEM>_n<n>/<solver>/{front.csv,trace.csv,metrics.json}` plus a
/// manifest. Failed runs are recorded in the manifest; only configuration
/// problems return an error.
pub fn cmd_run(config: &ExperimentConfig) -> Result<Manifest> {
    config.validate()?;
    ensure_writable(&config.output_dir)?;
    let variants = config.resolved_variants()?;
    let jobs: Vec<Job> = config
        .unique_instances()
        .into_iter()
        .flat_map(|instance| {
            variants.iter().map(move |v| Job {
                instance: instance.clone(),
                variant: *v,
                solver: String::new(),
            })
        })
        .map(|mut job| {
            job.solver = variant_label(&variants, &job.variant);
            job
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| FdError::Config(format!("cannot start worker threads: {e}")))?;
    let runs: Vec<ManifestRun> = pool.install(|| {
        jobs.par_iter()
            .map(|job| execute_job(config, job))
            .collect()
    });
    let manifest = Manifest {
        schema: "fd-schema v1".into(),
        runs,
        imports: config.imports.clone(),
    };
    write_json(&config.output_dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

/// Per-instance, per-solver quality numbers behind a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetrics {
    pub instance: String,
    pub solver: String,
    pub purity: Option<f64>,
    pub gamma_spread: Option<f64>,
    pub delta_spread: Option<f64>,
    pub hypervolume: Option<f64>,
}

/// Output of [`cmd_profiles`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileReport {
    pub profile: ProfileFile,
    pub metrics: Vec<InstanceMetrics>,
}

/// Builds performance profiles from result directories and imported fronts.
///
/// Solvers are compared on the instances every solver has; a failed run
/// counts as a failure on that instance. Writes `profile_<metric>.json`,
/// `profile_<metric>.csv` and `instance_metrics.csv` into `out`.
pub fn cmd_profiles(
    result_dirs: &[PathBuf],
    imports: &[ImportedFront],
    metric: ProfileMetric,
    out: &Path,
) -> Result<ProfileReport> {
    // solver -> instance -> images (None for a failed run)
    let mut table: BTreeMap<String, BTreeMap<Instance, Option<Images>>> = BTreeMap::new();
    let mut all_imports: Vec<ImportedFront> = imports.to_vec();
    for dir in result_dirs {
        let manifest: Manifest = read_json(&dir.join(MANIFEST_FILE)).map_err(|e| {
            FdError::Config(format!("no readable manifest in {}: {e}", dir.display()))
        })?;
        for r in &manifest.runs {
            let images = match (&r.status, &r.front) {
                (RunStatus::Ok, Some(front)) => Some(read_front_images(&dir.join(front))?),
                _ => None,
            };
            let slot = table.entry(r.solver.clone()).or_default();
            let key = Instance::new(r.problem.to_ascii_uppercase(), r.n);
            if slot.insert(key, images).is_some() {
                return Err(FdError::Config(format!(
                    "solver {} appears twice for {}_n{}; rename one of the runs",
                    r.solver, r.problem, r.n
                )));
            }
        }
        all_imports.extend(manifest.imports.iter().map(|i| ImportedFront {
            path: dir.join(&i.path),
            ..i.clone()
        }));
    }
    for imp in &all_imports {
        let images = read_front_images(&imp.path)?;
        table.entry(imp.solver.clone()).or_default().insert(
            Instance::new(imp.problem.to_ascii_uppercase(), imp.n),
            Some(images),
        );
    }
    if table.len() < 2 {
        return Err(FdError::Config(format!(
            "profiles need at least two solvers, found {}",
            table.len()
        )));
    }
    let solvers: Vec<String> = table.keys().cloned().collect();
    let shared: Vec<Instance> = table
        .values()
        .map(|m| m.keys().cloned().collect::<BTreeSet<_>>())
        .reduce(|a, b| a.intersection(&b).cloned().collect())
        .unwrap_or_default()
        .into_iter()
        .collect();
    if shared.is_empty() {
        return Err(FdError::Config("the solvers share no instance".into()));
    }

    let mut costs: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(shared.len()); solvers.len()];
    let mut rows = Vec::new();
    for inst in &shared {
        let fronts: Vec<Option<&Images>> =
            solvers.iter().map(|s| table[s][inst].as_ref()).collect();
        let present: Vec<Images> = fronts.iter().flatten().map(|f| (*f).clone()).collect();
        if present.is_empty() {
            for c in costs.iter_mut() {
                c.push(None);
            }
            continue;
        }
        let reference = build_reference_front(&present)?;
        let extremes = ReferenceExtremes::from_front(&reference)?;
        let all: Images = present.iter().flatten().cloned().collect();
        let zeta = reference_point_cross_solver(&all, CROSS_SOLVER_OFFSET)?;
        let v_ref = hypervolume(&reference, &zeta)?;
        for (s, front) in fronts.iter().enumerate() {
            let m = match front {
                Some(f) if !f.is_empty() => InstanceMetrics {
                    instance: inst.label(),
                    solver: solvers[s].clone(),
                    purity: Some(purity(f, &reference)),
                    gamma_spread: Some(gamma_spread(f, &extremes)?),
                    delta_spread: Some(delta_spread(f, &extremes)?),
                    hypervolume: Some(hypervolume(f, &zeta)?),
                },
                _ => InstanceMetrics {
                    instance: inst.label(),
                    solver: solvers[s].clone(),
                    purity: None,
                    gamma_spread: None,
                    delta_spread: None,
                    hypervolume: None,
                },
            };
            let raw = match metric {
                ProfileMetric::Purity => m.purity,
                ProfileMetric::Hypervolume => m.hypervolume,
            };
            costs[s].push(raw.and_then(|v| profile_preprocess(metric, &[v], v_ref)[0]));
            rows.push(m);
        }
    }
    let curves = performance_profiles(&ProfileInput { solvers, costs })?;
    let profile = ProfileFile::new(
        metric,
        shared.iter().map(Instance::label).collect(),
        &curves,
    );

    ensure_writable(out)?;
    let name = match metric {
        ProfileMetric::Purity => "purity",
        ProfileMetric::Hypervolume => "hypervolume",
    };
    write_json(&out.join(format!("profile_{name}.json")), &profile)?;
    write_atomic(&out.join(format!("profile_{name}.csv")), &profile.to_csv()?)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r)?;
    }
    let body = w.into_inner().map_err(|e| FdError::Io(e.into_error()))?;
    write_atomic(&out.join("instance_metrics.csv"), &body)?;
    Ok(ProfileReport {
        profile,
        metrics: rows,
    })
}

/// Formats selected trace rows as
/// `k | |X^k| (% stat.) | n_r (last) | n_e (% stat.) | |X^{k+1}|`.
/// Requested iterations past the end of the trace are listed in a note.
pub fn cmd_trace_table(trace_path: &Path, rows: &[usize]) -> Result<String> {
    let trace = read_trace_csv(trace_path)?;
    Ok(format_trace_table(&trace, rows))
}

pub fn format_trace_table(trace: &[crate::driver::IterationRecord], rows: &[usize]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6} | {:>16} | {:>10} | {:>14} | {:>9}",
        "k", "|X^k| (% stat.)", "n_r (last)", "n_e (% stat.)", "|X^{k+1}|"
    );
    let _ = writeln!(out, "{}", "-".repeat(67));
    let mut missing = Vec::new();
    for &k in rows {
        match trace.iter().find(|r| r.k == k) {
            Some(r) => {
                let _ = writeln!(
                    out,
                    "{:>6} | {:>16} | {:>10} | {:>14} | {:>9}",
                    r.k,
                    format!(
                        "{} ({:.0})",
                        r.front_size_in,
                        r.pct_sigma_stationary_in.floor()
                    ),
                    format!(
                        "{} ({})",
                        r.n_refinements, r.iterations_since_last_refinement
                    ),
                    format!(
                        "{} ({:.0})",
                        r.n_explorations,
                        r.pct_exploration_sigma_stationary.floor()
                    ),
                    r.front_size_out
                );
            }
            None => missing.push(k),
        }
    }
    if !missing.is_empty() {
        let last = trace.last().map_or(0, |r| r.k);
        let list: Vec<String> = missing.iter().map(|k| k.to_string()).collect();
        let what = if list.len() == 1 {
            "iteration {} is"
        } else {
            "iterations {} are"
        };
        let what = what.replace("{}", &list.join(", "));
        let _ = writeln!(
            out,
            "note: {what} past the end of the trace (last k = {last})"
        );
    }
    out
}
