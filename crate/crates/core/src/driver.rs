//! The Front Descent outer loop.
//!
//! Each iteration processes a snapshot of the current set: the least
//! stationary point first, then the rest in insertion order. A point still in
//! the working set is refined along a common descent direction when its
//! stationarity measure is below `−σ_k`, and the result seeds exploration
//! steps along partial steepest descent directions for every proper subset of
//! the objectives.

use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::direction::{
    bb_direction, common_steepest, newton_direction, partial_steepest, sdr_check,
    update_bb_scalars, DirectionKind, DirectionResult, DEFAULT_A_MAX, DEFAULT_A_MIN, DEFAULT_KAPPA,
};
use crate::dominance::{dominates, weakly_dominates, FrontEntry, FrontSet, Insertion, Provenance};
use crate::error::{contract, FdError, Result};
use crate::hypervolume::{dominated_volume, reference_point_with_margin};
use crate::linesearch::{armijo_front, exploration_ls, LineSearchParams};
use crate::problem::{EvalCounters, Evaluator, Problem};

/// Refinement direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variant {
    Sd,
    Newton {
        #[serde(default = "default_kappa")]
        kappa: f64,
    },
    Bb {
        #[serde(default = "default_a_min")]
        a_min: f64,
        #[serde(default = "default_a_max")]
        a_max: f64,
    },
}

fn default_kappa() -> f64 {
    DEFAULT_KAPPA
}
fn default_a_min() -> f64 {
    DEFAULT_A_MIN
}
fn default_a_max() -> f64 {
    DEFAULT_A_MAX
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Sd => "sd",
            Variant::Newton { .. } => "newton",
            Variant::Bb { .. } => "bb",
        }
    }
}

impl FromStr for Variant {
    type Err = FdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sd" => Ok(Variant::Sd),
            "newton" | "n" => Ok(Variant::Newton {
                kappa: DEFAULT_KAPPA,
            }),
            "bb" => Ok(Variant::Bb {
                a_min: DEFAULT_A_MIN,
                a_max: DEFAULT_A_MAX,
            }),
            other => Err(FdError::Config(format!(
                "unknown variant `{other}` (expected sd, newton or bb)"
            ))),
        }
    }
}

/// Stationarity threshold per iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SigmaSchedule {
    Constant {
        sigma: f64,
    },
    /// `σ_k = sigma0 / (k + 1)` with `k` counted from zero.
    Decreasing {
        sigma0: f64,
    },
}

impl SigmaSchedule {
    pub fn at(&self, k: usize) -> f64 {
        match *self {
            SigmaSchedule::Constant { sigma } => sigma,
            SigmaSchedule::Decreasing { sigma0 } => sigma0 / (k as f64 + 1.0),
        }
    }
}

/// How near-duplicate images are kept out of the front.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrowdingMode {
    Off,
    /// Exploration candidates within the gap of an existing image are
    /// discarded unless they dominate something.
    Candidate,
    /// The front is pruned with [`FrontSet::crowding_prune`] after every
    /// iteration. Pruning can lower the hypervolume.
    Prune,
}

/// Algorithm parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FdConfig {
    pub alpha0: f64,
    pub delta: f64,
    pub gamma: f64,
    pub max_backtracks: usize,
    pub gamma1: f64,
    pub gamma2: f64,
    pub sigma: SigmaSchedule,
    pub variant: Variant,
    /// Relative hypervolume gain below which the run stops; 0 disables.
    pub eps_hv: f64,
    pub max_iterations: usize,
    /// Seconds; checked between iterations.
    pub wall_clock_limit: Option<f64>,
    pub crowding: CrowdingMode,
    /// Gap as a fraction of each objective's current image range.
    pub crowding_gap: f64,
    pub exploration_theta_tol: f64,
    /// Margin of the run's hypervolume reference point, as a fraction of the
    /// initial image range.
    pub reference_margin: f64,
    /// Verify stability, sufficient decrease and monotone hypervolume while
    /// running. Costs a quadratic scan per iteration.
    pub check_invariants: bool,
    /// Keep a log of every refinement step.
    pub record_refinements: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        let ls = LineSearchParams::default();
        Self {
            alpha0: ls.alpha0,
            delta: ls.delta,
            gamma: ls.gamma,
            max_backtracks: ls.max_backtracks,
            gamma1: 1e-2,
            gamma2: 1e2,
            sigma: SigmaSchedule::Constant { sigma: 1e-7 },
            variant: Variant::Sd,
            eps_hv: 5e-4,
            max_iterations: 1000,
            wall_clock_limit: None,
            crowding: CrowdingMode::Candidate,
            crowding_gap: 1e-4,
            exploration_theta_tol: 1e-10,
            reference_margin: 0.1,
            check_invariants: false,
            record_refinements: false,
        }
    }
}

impl FdConfig {
    pub fn line_search(&self) -> LineSearchParams {
        LineSearchParams {
            alpha0: self.alpha0,
            delta: self.delta,
            gamma: self.gamma,
            max_backtracks: self.max_backtracks,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.line_search().validate()?;
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(FdError::Config(format!(
                    "{name} must be positive and finite"
                )))
            }
        };
        positive(self.gamma1, "gamma1")?;
        positive(self.gamma2, "gamma2")?;
        positive(self.exploration_theta_tol, "exploration_theta_tol")?;
        match self.sigma {
            SigmaSchedule::Constant { sigma: s } | SigmaSchedule::Decreasing { sigma0: s }
                if !(s >= 0.0) =>
            {
                return Err(FdError::Config("sigma must be nonnegative".into()))
            }
            _ => {}
        }
        match self.variant {
            Variant::Sd => {}
            Variant::Newton { kappa } => positive(kappa, "kappa")?,
            Variant::Bb { a_min, a_max } => {
                positive(a_min, "a_min")?;
                if !(a_max >= a_min && a_max.is_finite()) {
                    return Err(FdError::Config("need a_min <= a_max".into()));
                }
            }
        }
        if !(self.eps_hv >= 0.0) {
            return Err(FdError::Config("eps_hv must be nonnegative".into()));
        }
        if !(self.crowding_gap >= 0.0) {
            return Err(FdError::Config("crowding_gap must be nonnegative".into()));
        }
        if !(self.reference_margin >= 0.0) {
            return Err(FdError::Config(
                "reference_margin must be nonnegative".into(),
            ));
        }
        if let Some(t) = self.wall_clock_limit {
            if !(t >= 0.0) {
                return Err(FdError::Config(
                    "wall_clock_limit must be nonnegative".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One row of the run trace. Row 0 describes the starting set; row `k ≥ 1`
/// describes iteration `k`, whose input is `X^{k−1}` and output `X^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub front_size_in: usize,
    pub pct_sigma_stationary_in: f64,
    pub n_refinements: usize,
    pub iterations_since_last_refinement: usize,
    pub n_explorations: usize,
    pub pct_exploration_sigma_stationary: f64,
    pub front_size_out: usize,
    /// `Θ` of the input set.
    pub theta_value: f64,
    /// Hypervolume of the output set.
    pub hypervolume_value: f64,
    /// Seconds since the run started. Kept out of files for determinism.
    #[serde(skip)]
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    HvImprovement,
    ThetaThreshold,
    IterationCap,
    TimeCap,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::HvImprovement => "hv_improvement",
            StopReason::ThetaThreshold => "theta_threshold",
            StopReason::IterationCap => "iteration_cap",
            StopReason::TimeCap => "time_cap",
        })
    }
}

/// A refinement that moved a point.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementEvent {
    pub iteration: usize,
    pub theta: f64,
    pub v_norm: f64,
    /// Direction actually used after the safeguard.
    pub kind: DirectionKind,
    pub alpha: f64,
    pub backtracks: usize,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub front: FrontSet,
    pub trace: Vec<IterationRecord>,
    pub counters: EvalCounters,
    pub stop_reason: StopReason,
    pub reference_point: Vec<f64>,
    pub wall_time_seconds: f64,
    pub refinements: Vec<RefinementEvent>,
    /// Number of invariant assertions evaluated.
    pub invariant_checks: u64,
}

/// Least value of the cached stationarity measure over the set.
pub fn theta_of_front(front: &FrontSet) -> Result<f64> {
    if front.is_empty() {
        return Err(contract("theta of an empty set"));
    }
    front
        .iter()
        .map(|e| {
            e.cached_theta
                .ok_or_else(|| contract("theta is not cached for every entry"))
        })
        .try_fold(f64::INFINITY, |acc, t| Ok(acc.min(t?)))
}

/// Entry ids in processing order: the first entry with the least cached
/// stationarity measure, then all others in insertion order.
pub fn select_processing_order(front: &FrontSet) -> Result<Vec<u64>> {
    let first = front
        .iter()
        .map(|e| {
            Ok((
                e.cached_theta
                    .ok_or_else(|| contract("theta is not cached for every entry"))?,
                e.id,
            ))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(None, |best: Option<(f64, u64)>, (t, id)| match best {
            Some((bt, _)) if bt <= t => best,
            _ => Some((t, id)),
        })
        .ok_or_else(|| contract("processing order of an empty set"))?
        .1;
    Ok(std::iter::once(first)
        .chain(front.iter().map(|e| e.id).filter(|&id| id != first))
        .collect())
}

/// Stopping test after `trace` (row 0 plus completed iterations).
pub fn should_stop(
    trace: &[IterationRecord],
    config: &FdConfig,
    elapsed_seconds: f64,
) -> Option<StopReason> {
    let completed = trace.len().saturating_sub(1);
    if completed >= config.max_iterations {
        return Some(StopReason::IterationCap);
    }
    if config
        .wall_clock_limit
        .is_some_and(|t| elapsed_seconds >= t)
    {
        return Some(StopReason::TimeCap);
    }
    if completed == 0 {
        return None;
    }
    let (prev, last) = (&trace[trace.len() - 2], &trace[trace.len() - 1]);
    if config.eps_hv > 0.0 && prev.hypervolume_value > 0.0 {
        let gain = (last.hypervolume_value - prev.hypervolume_value) / prev.hypervolume_value;
        if gain < config.eps_hv {
            return Some(StopReason::HvImprovement);
        }
    }
    let sigma = config.sigma.at(last.k - 1);
    if last.theta_value >= -sigma && last.n_explorations == 0 {
        return Some(StopReason::ThetaThreshold);
    }
    None
}

/// Worst-case bound on the number of iterations with `Θ ≤ −ε`:
/// `(V* − V0) / (2γ·min{1,Γ1}·min{α0, Δ_low}·ε)^m` with
/// `Δ_low = Γ1(1 − γ)/(Γ2² L_max)`.
pub fn compute_iteration_bound(
    v_star: f64,
    v0: f64,
    config: &FdConfig,
    eps: f64,
    l_max: f64,
    m: usize,
) -> f64 {
    let denom = 2.0
        * config.gamma
        * config.gamma1.min(1.0)
        * config.alpha0.min(delta_low(config, l_max))
        * eps;
    (v_star - v0) / denom.powi(m as i32)
}

/// `Δ_low = Γ1(1 − γ)/(Γ2² L_max)`.
pub fn delta_low(config: &FdConfig, l_max: f64) -> f64 {
    config.gamma1 * (1.0 - config.gamma) / (config.gamma2 * config.gamma2 * l_max)
}

/// All proper nonempty subsets of `0..m`, by size then lexicographically.
pub fn proper_subsets(m: usize) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << m) - 1)
        .map(|mask| (0..m).filter(|j| mask & (1 << j) != 0).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
}

/// Runs Front Descent from `x0` until a stopping rule fires.
pub fn run(problem: &dyn Problem, x0: FrontSet, config: &FdConfig) -> Result<RunResult> {
    config.validate()?;
    if x0.is_empty() {
        return Err(contract("starting set is empty"));
    }
    if !x0.is_stable() {
        return Err(contract("starting set is not mutually nondominated"));
    }
    let mut runner = Runner::new(problem, x0, config)?;
    runner.execute()
}

struct Runner<'p, 'c> {
    ev: Evaluator<'p>,
    config: &'c FdConfig,
    ls: LineSearchParams,
    front: FrontSet,
    zeta: Vec<f64>,
    subsets: Vec<Vec<usize>>,
    trace: Vec<IterationRecord>,
    refinements: Vec<RefinementEvent>,
    checks: u64,
    last_refinement: usize,
    start: Instant,
}

#[derive(Default)]
struct IterationStats {
    refinements: usize,
    explorations: usize,
    explorations_stationary: usize,
}

impl<'p, 'c> Runner<'p, 'c> {
    fn new(problem: &'p dyn Problem, x0: FrontSet, config: &'c FdConfig) -> Result<Self> {
        let zeta = reference_point_with_margin(&x0.images(), config.reference_margin)?;
        Ok(Self {
            ev: Evaluator::new(problem),
            config,
            ls: config.line_search(),
            front: x0,
            zeta,
            subsets: proper_subsets(problem.m()),
            trace: Vec::new(),
            refinements: Vec::new(),
            checks: 0,
            last_refinement: 0,
            start: Instant::now(),
        })
    }

    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn hypervolume(&self) -> Result<f64> {
        dominated_volume(&self.front.images(), &self.zeta)
    }

    fn invariant(&mut self, ok: bool, what: impl FnOnce() -> String) -> Result<()> {
        self.checks += 1;
        if ok {
            Ok(())
        } else {
            Err(FdError::Invariant(what()))
        }
    }

    /// Makes sure `id` has its Jacobian and stationarity measure cached.
    fn ensure_theta(&mut self, id: u64) -> Result<f64> {
        let entry = self
            .front
            .get(id)
            .ok_or_else(|| contract(format!("entry {id} is not in the set")))?;
        if let Some(t) = entry.cached_theta {
            if entry.cache.jacobian.is_some() {
                return Ok(t);
            }
        }
        let x = entry.x.clone();
        let jac = self.ev.jacobian(&x)?;
        let v = common_steepest(&jac)?;
        let entry = self.front.get_mut(id).expect("entry checked above");
        entry.cached_theta = Some(v.theta);
        entry.cached_v_norm = Some(v.d.norm());
        entry.cache.jacobian = Some(jac);
        Ok(v.theta)
    }

    fn stationary_pct(&self, ids: &[u64], sigma: f64) -> f64 {
        if ids.is_empty() {
            return 100.0;
        }
        let count = ids
            .iter()
            .filter_map(|id| self.front.get(*id).and_then(|e| e.cached_theta))
            .filter(|&t| t >= -sigma)
            .count();
        100.0 * count as f64 / ids.len() as f64
    }

    fn execute(&mut self) -> Result<RunResult> {
        let ids: Vec<u64> = self.front.iter().map(|e| e.id).collect();
        for &id in &ids {
            self.ensure_theta(id)?;
        }
        let sigma0 = self.config.sigma.at(0);
        self.trace.push(IterationRecord {
            k: 0,
            front_size_in: self.front.len(),
            pct_sigma_stationary_in: self.stationary_pct(&ids, sigma0),
            n_refinements: 0,
            iterations_since_last_refinement: 0,
            n_explorations: 0,
            pct_exploration_sigma_stationary: 100.0,
            front_size_out: self.front.len(),
            theta_value: theta_of_front(&self.front)?,
            hypervolume_value: self.hypervolume()?,
            elapsed_seconds: self.elapsed(),
        });

        let stop_reason = loop {
            if let Some(reason) = should_stop(&self.trace, self.config, self.elapsed()) {
                break reason;
            }
            let k = self.trace.len();
            self.iteration(k).map_err(|e| FdError::AtIteration {
                iteration: k,
                source: Box::new(e),
            })?;
        };

        Ok(RunResult {
            front: std::mem::take(&mut self.front),
            trace: std::mem::take(&mut self.trace),
            counters: self.ev.counters(),
            stop_reason,
            reference_point: self.zeta.clone(),
            wall_time_seconds: self.elapsed(),
            refinements: std::mem::take(&mut self.refinements),
            invariant_checks: self.checks,
        })
    }

    fn iteration(&mut self, k: usize) -> Result<()> {
        let sigma = self.config.sigma.at(k - 1);
        let snapshot: Vec<u64> = self.front.iter().map(|e| e.id).collect();
        for &id in &snapshot {
            self.ensure_theta(id)?;
        }
        let theta_in = theta_of_front(&self.front)?;
        let pct_in = self.stationary_pct(&snapshot, sigma);
        let size_in = snapshot.len();
        let hv_in = self.trace.last().map_or(0.0, |r| r.hypervolume_value);

        let gap = self.crowding_gap();
        let mut stats = IterationStats::default();
        for id in select_processing_order(&self.front)? {
            if !self.front.contains(id) {
                continue;
            }
            let z_id = self.refinement_step(id, sigma, k, &mut stats)?;
            self.exploration_phase(z_id, sigma, &gap, &mut stats)?;
        }

        if self.config.crowding == CrowdingMode::Prune {
            self.front = self.front.crowding_prune(&gap);
        }
        if stats.refinements > 0 {
            self.last_refinement = k;
        }
        let hv_out = self.hypervolume()?;
        if self.config.check_invariants {
            let stable = self.front.is_stable();
            self.invariant(stable, || format!("set is not stable after iteration {k}"))?;
            if self.config.crowding != CrowdingMode::Prune {
                self.invariant(hv_out >= hv_in, || {
                    format!("hypervolume decreased from {hv_in} to {hv_out}")
                })?;
            }
        }
        self.trace.push(IterationRecord {
            k,
            front_size_in: size_in,
            pct_sigma_stationary_in: pct_in,
            n_refinements: stats.refinements,
            iterations_since_last_refinement: k - self.last_refinement,
            n_explorations: stats.explorations,
            pct_exploration_sigma_stationary: if stats.explorations == 0 {
                100.0
            } else {
                100.0 * stats.explorations_stationary as f64 / stats.explorations as f64
            },
            front_size_out: self.front.len(),
            theta_value: theta_in,
            hypervolume_value: hv_out,
            elapsed_seconds: self.elapsed(),
        });
        log::debug!(
            "iteration {k}: |X| {size_in} -> {}, n_r {}, n_e {}, theta {theta_in:e}, hv {hv_out:e}",
            self.front.len(),
            stats.refinements,
            stats.explorations
        );
        Ok(())
    }

    /// Refines entry `id` when it is not `σ`-stationary. Returns the id of the
    /// point exploration should start from.
    fn refinement_step(
        &mut self,
        id: u64,
        sigma: f64,
        k: usize,
        stats: &mut IterationStats,
    ) -> Result<u64> {
        let theta = self.ensure_theta(id)?;
        if !(theta < -sigma) {
            return Ok(id);
        }
        let entry = self
            .front
            .get(id)
            .expect("caller checked membership")
            .clone();
        let jac = entry
            .cache
            .jacobian
            .clone()
            .expect("ensure_theta caches the Jacobian");
        let v = common_steepest(&jac)?;
        let v_norm = v.d.norm();

        let candidate = match self.config.variant {
            Variant::Sd => None,
            Variant::Newton { kappa } => {
                let hessians = self.ev.hessians(&entry.x)?;
                match newton_direction(&jac, &hessians, kappa) {
                    Ok(vn) => Some(vn),
                    // numerically singular metric: use v(x) as for a failed safeguard
                    Err(
                        e @ (FdError::NotPositiveDefinite | FdError::DualNonConvergence { .. }),
                    ) => {
                        log::debug!("newton direction unavailable at entry {id}: {e}");
                        None
                    }
                    Err(e) => return Err(e),
                }
            }
            Variant::Bb { a_min, a_max } => {
                let a = match &entry.cache.parent {
                    Some((xp, jp)) => {
                        let s = &entry.x - xp;
                        let y: Vec<DVector<f64>> = (0..jac.nrows())
                            .map(|j| (jac.row(j) - jp.row(j)).transpose())
                            .collect();
                        update_bb_scalars(&s, &y, a_min, a_max)
                    }
                    None => vec![1.0; jac.nrows()],
                };
                Some(bb_direction(&jac, &a, a_min, a_max)?)
            }
        };
        let dir: DirectionResult = match candidate {
            Some(vd)
                if sdr_check(
                    vd.d_value,
                    vd.d.norm(),
                    v_norm,
                    self.config.gamma1,
                    self.config.gamma2,
                ) =>
            {
                vd
            }
            _ => v,
        };

        let step = armijo_front(
            &mut self.ev,
            &entry.x,
            &entry.fx,
            &dir.d,
            dir.d_value,
            &self.ls,
        )?;
        if self.config.check_invariants {
            let bound = self.ls.gamma * step.alpha * dir.d_value;
            let armijo = step
                .fz
                .iter()
                .zip(entry.fx.iter())
                .all(|(z, x)| *z <= x + bound);
            self.invariant(armijo, || {
                format!("accepted step violates sufficient decrease at {}", entry.id)
            })?;
            let chain = self.config.gamma1.min(1.0) * self.ls.gamma * step.alpha * v_norm * v_norm;
            let decrease = step
                .fz
                .iter()
                .zip(entry.fx.iter())
                .all(|(z, x)| *z <= x - chain + 1e-12 * x.abs().max(1.0));
            self.invariant(decrease, || {
                format!("step from {} misses the guaranteed decrease", entry.id)
            })?;
        }
        if self.config.record_refinements {
            self.refinements.push(RefinementEvent {
                iteration: k,
                theta,
                v_norm,
                kind: dir.kind.clone(),
                alpha: step.alpha,
                backtracks: step.backtracks,
            });
        }
        stats.refinements += 1;

        let mut z = FrontEntry::new(step.z, step.fz, Provenance::Refinement);
        z.cache.parent = Some((entry.x.clone(), jac));
        match self.insert(z)? {
            Some(z_id) => Ok(z_id),
            // cannot happen for a stable set: z dominates x_c strictly
            None => Err(FdError::Invariant(format!(
                "refined point from {id} was rejected"
            ))),
        }
    }

    fn insert(&mut self, z: FrontEntry) -> Result<Option<u64>> {
        let fz = z.fx.clone();
        match self.front.insert_filter(z) {
            Insertion::Inserted { id, .. } => {
                if self.config.check_invariants {
                    let ok = self.front.iter().filter(|e| e.id != id).all(|e| {
                        !dominates(e.fx.as_slice(), fz.as_slice())
                            && !dominates(fz.as_slice(), e.fx.as_slice())
                    });
                    self.invariant(ok, || format!("insertion of {id} broke stability"))?;
                }
                Ok(Some(id))
            }
            Insertion::Rejected => Ok(None),
        }
    }

    fn crowding_gap(&self) -> Vec<f64> {
        self.front
            .image_range()
            .iter()
            .map(|r| self.config.crowding_gap * r.max(0.0))
            .collect()
    }

    /// Candidate-mode filter: near an existing image and dominating none.
    fn crowded(&self, fc: &DVector<f64>, gap: &[f64]) -> bool {
        if gap.iter().all(|&g| g <= 0.0) {
            return false;
        }
        self.front.has_near(fc.as_slice(), gap) && !self.front.dominates_any(fc.as_slice())
    }

    fn exploration_phase(
        &mut self,
        z_id: u64,
        sigma: f64,
        gap: &[f64],
        stats: &mut IterationStats,
    ) -> Result<()> {
        self.ensure_theta(z_id)?;
        let subsets = self.subsets.clone();
        for subset in &subsets {
            let Some(z) = self.front.get(z_id) else { break };
            let (zx, jac) = (
                z.x.clone(),
                z.cache
                    .jacobian
                    .clone()
                    .expect("ensure_theta caches the Jacobian"),
            );
            let dir = partial_steepest(&jac, subset)?;
            if !(dir.theta < -self.config.exploration_theta_tol) {
                continue;
            }
            let Some(step) = exploration_ls(&mut self.ev, &zx, &dir.d, &self.front, &self.ls)?
            else {
                continue;
            };
            if self.config.check_invariants {
                let ok = !self
                    .front
                    .iter()
                    .any(|y| weakly_dominates(y.fx.as_slice(), step.fz.as_slice()));
                self.invariant(ok, || "exploration candidate is dominated".to_string())?;
            }
            if self.config.crowding == CrowdingMode::Candidate && self.crowded(&step.fz, gap) {
                continue;
            }
            let entry = FrontEntry::new(step.z, step.fz, Provenance::Exploration(subset.clone()));
            if let Some(new_id) = self.insert(entry)? {
                stats.explorations += 1;
                if self.ensure_theta(new_id)? >= -sigma {
                    stats.explorations_stationary += 1;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::{initial_points, make_problem};

    fn entry_with_theta(t: f64, f: [f64; 2]) -> FrontEntry {
        let mut e = FrontEntry::new(
            DVector::zeros(1),
            DVector::from_row_slice(&f),
            Provenance::Initial,
        );
        e.cached_theta = Some(t);
        e
    }

    #[test]
    fn processing_order_rules() {
        let front = FrontSet::from_entries([
            entry_with_theta(-1.0, [0.0, 3.0]),
            entry_with_theta(-3.0, [1.0, 2.0]),
            entry_with_theta(-2.0, [2.0, 1.0]),
        ]);
        assert_eq!(select_processing_order(&front).unwrap(), vec![1, 0, 2]);
        assert_eq!(theta_of_front(&front).unwrap(), -3.0);

        let ties = FrontSet::from_entries([
            entry_with_theta(-1.0, [0.0, 3.0]),
            entry_with_theta(-1.0, [1.0, 2.0]),
        ]);
        assert_eq!(select_processing_order(&ties).unwrap(), vec![0, 1]);

        let single = FrontSet::from_entries([entry_with_theta(-0.7, [0.0, 0.0])]);
        assert_eq!(select_processing_order(&single).unwrap(), vec![0]);
        assert_eq!(theta_of_front(&single).unwrap(), -0.7);
    }

    #[test]
    fn subsets_enumeration() {
        assert_eq!(proper_subsets(2), vec![vec![0], vec![1]]);
        let three = proper_subsets(3);
        assert_eq!(
            three,
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2]
            ]
        );
    }

    fn record(k: usize, hv: f64, theta: f64, n_e: usize) -> IterationRecord {
        IterationRecord {
            k,
            front_size_in: 1,
            pct_sigma_stationary_in: 0.0,
            n_refinements: 0,
            iterations_since_last_refinement: 0,
            n_explorations: n_e,
            pct_exploration_sigma_stationary: 100.0,
            front_size_out: 1,
            theta_value: theta,
            hypervolume_value: hv,
            elapsed_seconds: 0.0,
        }
    }

    #[test]
    fn stopping_rules() {
        let config = FdConfig::default();
        let trace = vec![record(0, 1.0, -1.0, 0), record(1, 1.0004, -1.0, 3)];
        assert_eq!(
            should_stop(&trace, &config, 0.0),
            Some(StopReason::HvImprovement)
        );

        let no_hv = FdConfig {
            eps_hv: 0.0,
            ..FdConfig::default()
        };
        assert_eq!(should_stop(&trace, &no_hv, 0.0), None);

        let timed = FdConfig {
            wall_clock_limit: Some(1.0),
            ..FdConfig::default()
        };
        assert_eq!(
            should_stop(&trace[..1], &timed, 2.0),
            Some(StopReason::TimeCap)
        );

        let capped = FdConfig {
            max_iterations: 1,
            wall_clock_limit: Some(1.0),
            ..FdConfig::default()
        };
        assert_eq!(
            should_stop(&trace, &capped, 2.0),
            Some(StopReason::IterationCap)
        );

        let stationary = vec![record(0, 1.0, -1.0, 0), record(1, 2.0, -1e-9, 0)];
        assert_eq!(
            should_stop(&stationary, &no_hv, 0.0),
            Some(StopReason::ThetaThreshold)
        );
        let exploring = vec![record(0, 1.0, -1.0, 0), record(1, 2.0, -1e-9, 2)];
        assert_eq!(should_stop(&exploring, &no_hv, 0.0), None);
    }

    #[test]
    fn iteration_bound_arithmetic() {
        let config = FdConfig::default();
        assert!((delta_low(&config, 1.0) - 9.999e-7).abs() < 1e-15);
        assert_eq!(
            compute_iteration_bound(3.0, 3.0, &config, 1e-2, 1.0, 2),
            0.0
        );
        let b2 = compute_iteration_bound(4.0, 3.0, &config, 1e-2, 1.0, 2);
        let b4 = compute_iteration_bound(4.0, 3.0, &config, 1e-2, 1.0, 4);
        let base = 2.0 * 1e-4 * 1e-2 * delta_low(&config, 1.0) * 1e-2;
        assert!((b2 * base.powi(2) - 1.0).abs() < 1e-9);
        assert!((b4 * base.powi(4) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_iterations_returns_the_start() {
        let p = make_problem("JOS_1", 5).unwrap();
        let x0 = initial_points(p.as_ref(), 5).unwrap();
        let config = FdConfig {
            max_iterations: 0,
            ..FdConfig::default()
        };
        let r = run(p.as_ref(), x0.clone(), &config).unwrap();
        assert_eq!(r.stop_reason, StopReason::IterationCap);
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.front.images(), x0.images());
    }

    #[test]
    fn stationary_start_still_explores() {
        // x = 0 minimizes f1, so no refinement happens, but f2 can still decrease
        let p = make_problem("JOS_1", 4).unwrap();
        let x0 = FrontSet::from_entries([FrontEntry::new(
            DVector::zeros(4),
            p.objectives(&DVector::zeros(4)),
            Provenance::Initial,
        )]);
        let config = FdConfig {
            max_iterations: 1,
            check_invariants: true,
            ..FdConfig::default()
        };
        let r = run(p.as_ref(), x0, &config).unwrap();
        assert_eq!(r.trace[1].n_refinements, 0);
        assert!(r.trace[1].n_explorations >= 1);
        assert!((r.trace[1].theta_value - 0.0).abs() < 1e-12);
        assert!(r.front.len() >= 2);
    }

    #[test]
    fn gate_is_strict() {
        // θ(x) = −σ exactly must not refine
        let p = make_problem("JOS_1", 2).unwrap();
        let x = DVector::from_vec(vec![3.0, 3.0]);
        let v = common_steepest(&p.jacobian(&x)).unwrap();
        let x0 = FrontSet::from_entries([FrontEntry::new(
            x.clone(),
            p.objectives(&x),
            Provenance::Initial,
        )]);
        let config = FdConfig {
            sigma: SigmaSchedule::Constant { sigma: -v.theta },
            max_iterations: 1,
            ..FdConfig::default()
        };
        let r = run(p.as_ref(), x0, &config).unwrap();
        assert_eq!(r.trace[1].n_refinements, 0);
    }

    #[test]
    fn runs_are_deterministic_and_monotone() {
        let p = make_problem("JOS_1", 5).unwrap();
        let config = FdConfig {
            max_iterations: 15,
            check_invariants: true,
            ..FdConfig::default()
        };
        let a = run(p.as_ref(), initial_points(p.as_ref(), 5).unwrap(), &config).unwrap();
        let b = run(p.as_ref(), initial_points(p.as_ref(), 5).unwrap(), &config).unwrap();
        assert_eq!(a.front.images(), b.front.images());
        let strip = |t: &[IterationRecord]| -> Vec<IterationRecord> {
            t.iter()
                .map(|r| IterationRecord {
                    elapsed_seconds: 0.0,
                    ..r.clone()
                })
                .collect()
        };
        assert_eq!(strip(&a.trace), strip(&b.trace));
        for w in a.trace.windows(2) {
            assert!(w[1].hypervolume_value >= w[0].hypervolume_value);
        }
        assert!(a.invariant_checks > 0);
    }

    #[test]
    fn every_variant_runs() {
        for variant in ["sd", "newton", "bb"] {
            for (name, n) in [("MAN_1", 5), ("MOP_7", 2), ("CEC09_8", 5)] {
                let p = make_problem(name, n).unwrap();
                let config = FdConfig {
                    variant: variant.parse().unwrap(),
                    max_iterations: 5,
                    check_invariants: true,
                    ..FdConfig::default()
                };
                let r = run(p.as_ref(), initial_points(p.as_ref(), n).unwrap(), &config)
                    .unwrap_or_else(|e| panic!("{variant} on {name}: {e}"));
                assert!(r.front.is_stable());
            }
        }
    }

    #[test]
    fn config_validation_and_parsing() {
        assert!(FdConfig::default().validate().is_ok());
        assert!(FdConfig {
            gamma1: 0.0,
            ..FdConfig::default()
        }
        .validate()
        .is_err());
        assert!(FdConfig {
            delta: 1.5,
            ..FdConfig::default()
        }
        .validate()
        .is_err());
        assert!(FdConfig {
            variant: Variant::Bb {
                a_min: 2.0,
                a_max: 1.0
            },
            ..FdConfig::default()
        }
        .validate()
        .is_err());
        assert_eq!(
            "bb".parse::<Variant>().unwrap(),
            Variant::Bb {
                a_min: 1e-3,
                a_max: 1e3
            }
        );
        assert!("lmqn".parse::<Variant>().is_err());
        assert_eq!(SigmaSchedule::Decreasing { sigma0: 1.0 }.at(3), 0.25);
    }
}
