//! Front quality metrics and performance profiles.

use serde::{Deserialize, Serialize};

use crate::dominance::dominates;
use crate::error::{contract, FdError, Result};

/// Image vectors as plain rows.
pub type Images = Vec<Vec<f64>>;

/// Added to hypervolume gaps so the best solver never has a zero value.
pub const HV_PROFILE_ETA: f64 = 1e-7;

/// Nondominated subset of the union of `fronts`, first occurrences kept,
/// exact duplicates collapsed.
pub fn build_reference_front(fronts: &[Images]) -> Result<Images> {
    if fronts.is_empty() {
        return Err(contract("reference front needs at least one input front"));
    }
    let mut union: Images = Vec::new();
    for img in fronts.iter().flatten() {
        if !union.contains(img) {
            union.push(img.clone());
        }
    }
    if let Some(m) = union.first().map(Vec::len) {
        if let Some(bad) = union.iter().find(|i| i.len() != m) {
            return Err(FdError::Dimension {
                expected: m,
                got: bad.len(),
            });
        }
    }
    Ok(union
        .iter()
        .filter(|a| !union.iter().any(|b| dominates(b, a)))
        .cloned()
        .collect())
}

/// Fraction of `front` whose images appear in `reference`. An empty front
/// scores 0.
pub fn purity(front: &[Vec<f64>], reference: &[Vec<f64>]) -> f64 {
    if front.is_empty() {
        return 0.0;
    }
    let hits = front.iter().filter(|f| reference.contains(f)).count();
    hits as f64 / front.len() as f64
}

/// Per-objective extremes of a reference front, used by the spread metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceExtremes {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// For each objective, the reference image attaining its minimum.
    pub minimizers: Images,
}

impl ReferenceExtremes {
    pub fn from_front(reference: &[Vec<f64>]) -> Result<Self> {
        let first = reference
            .first()
            .ok_or_else(|| contract("reference front is empty"))?;
        let m = first.len();
        let mut lower = first.clone();
        let mut upper = first.clone();
        let mut minimizers = vec![first.clone(); m];
        for img in reference {
            if img.len() != m {
                return Err(FdError::Dimension {
                    expected: m,
                    got: img.len(),
                });
            }
            for j in 0..m {
                upper[j] = upper[j].max(img[j]);
                let better = img[j] < lower[j]
                    || (img[j] == lower[j]
                        && img.partial_cmp(&minimizers[j]) == Some(std::cmp::Ordering::Less));
                if better {
                    lower[j] = img[j];
                    minimizers[j] = img.clone();
                }
            }
        }
        Ok(Self {
            lower,
            upper,
            minimizers,
        })
    }
}

fn sorted_objective(front: &[Vec<f64>], j: usize) -> Vec<f64> {
    let mut v: Vec<f64> = front.iter().map(|f| f[j]).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn check_front(front: &[Vec<f64>], extremes: &ReferenceExtremes) -> Result<usize> {
    let m = extremes.lower.len();
    if !(m == 2 || m == 3) {
        return Err(contract(format!(
            "spread metrics support 2 or 3 objectives, got {m}"
        )));
    }
    if front.is_empty() {
        return Err(contract("spread metrics need a nonempty front"));
    }
    if let Some(bad) = front.iter().find(|f| f.len() != m) {
        return Err(FdError::Dimension {
            expected: m,
            got: bad.len(),
        });
    }
    Ok(m)
}

/// Γ-spread: the largest gap between consecutive sorted values of any
/// objective, with the reference extremes appended at both ends.
pub fn gamma_spread(front: &[Vec<f64>], extremes: &ReferenceExtremes) -> Result<f64> {
    let m = check_front(front, extremes)?;
    let mut gamma = 0.0_f64;
    for j in 0..m {
        let mut values = vec![extremes.lower[j]];
        values.extend(sorted_objective(front, j));
        values.push(extremes.upper[j]);
        values.sort_by(f64::total_cmp);
        for w in values.windows(2) {
            gamma = gamma.max(w[1] - w[0]);
        }
    }
    Ok(gamma)
}

fn delta_formula(d0: f64, dn: f64, gaps: &[f64]) -> f64 {
    let mean = if gaps.is_empty() {
        0.0
    } else {
        gaps.iter().sum::<f64>() / gaps.len() as f64
    };
    let deviation: f64 = gaps.iter().map(|d| (d - mean).abs()).sum();
    let denom = d0 + dn + gaps.len() as f64 * mean;
    if denom == 0.0 {
        0.0
    } else {
        (d0 + dn + deviation) / denom
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Δ-spread. For two objectives the gaps are Euclidean distances between
/// neighbours in `f_1` order and the end gaps are distances to the
/// reference minimizers of `f_1` and `f_2`. For three objectives the
/// one-dimensional formula is applied per objective and averaged.
pub fn delta_spread(front: &[Vec<f64>], extremes: &ReferenceExtremes) -> Result<f64> {
    let m = check_front(front, extremes)?;
    if front.len() < 2 {
        return Ok(1.0);
    }
    if m == 2 {
        let mut pts: Vec<&Vec<f64>> = front.iter().collect();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(b[1].total_cmp(&a[1])));
        let gaps: Vec<f64> = pts.windows(2).map(|w| euclid(w[0], w[1])).collect();
        let d0 = euclid(pts[0], &extremes.minimizers[0]);
        let dn = euclid(pts[pts.len() - 1], &extremes.minimizers[1]);
        return Ok(delta_formula(d0, dn, &gaps));
    }
    let mut total = 0.0;
    for j in 0..m {
        let v = sorted_objective(front, j);
        let gaps: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
        let d0 = (v[0] - extremes.lower[j]).abs();
        let dn = (extremes.upper[j] - v[v.len() - 1]).abs();
        total += delta_formula(d0, dn, &gaps);
    }
    Ok(total / m as f64)
}

/// Metrics that can be turned into "lower is better" profile inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMetric {
    Purity,
    Hypervolume,
}

impl std::str::FromStr for ProfileMetric {
    type Err = FdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "purity" => Ok(Self::Purity),
            "hypervolume" => Ok(Self::Hypervolume),
            other => Err(FdError::Config(format!("unknown profile metric `{other}`"))),
        }
    }
}

/// Maps raw metric values to profile costs; `None` marks a failure.
///
/// Purity becomes `1/p` (zero purity fails). Hypervolume becomes
/// `V_ref − V + η` with `η = 1e-7`.
pub fn profile_preprocess(
    metric: ProfileMetric,
    values: &[f64],
    reference_value: f64,
) -> Vec<Option<f64>> {
    values
        .iter()
        .map(|&v| match metric {
            ProfileMetric::Purity if v > 0.0 && v.is_finite() => Some(1.0 / v),
            ProfileMetric::Purity => None,
            ProfileMetric::Hypervolume if v.is_finite() => {
                Some(reference_value - v + HV_PROFILE_ETA)
            }
            ProfileMetric::Hypervolume => None,
        })
        .collect()
}

/// Costs indexed as `costs[solver][instance]`; `None` is a failure.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileInput {
    pub solvers: Vec<String>,
    pub costs: Vec<Vec<Option<f64>>>,
}

/// Step curve `ρ_s(τ)` given by its breakpoints `(τ, ρ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub solver: String,
    pub breakpoints: Vec<[f64; 2]>,
}

/// Performance profiles. Instances on which every solver failed are dropped
/// with a warning.
pub fn performance_profiles(input: &ProfileInput) -> Result<Vec<ProfileCurve>> {
    let s_count = input.solvers.len();
    if s_count == 0 || input.costs.len() != s_count {
        return Err(contract("profile input needs one cost row per solver"));
    }
    let n_inst = input.costs[0].len();
    if input.costs.iter().any(|row| row.len() != n_inst) {
        return Err(contract("every solver needs a cost for every instance"));
    }
    let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); s_count];
    let mut kept = 0usize;
    for i in 0..n_inst {
        let best = input
            .costs
            .iter()
            .filter_map(|row| row[i])
            .fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            log::warn!("instance {i} dropped from profiles: every solver failed");
            continue;
        }
        if !(best > 0.0) {
            return Err(contract(format!(
                "profile costs must be positive, instance {i} has {best}"
            )));
        }
        kept += 1;
        for (s, row) in input.costs.iter().enumerate() {
            ratios[s].push(row[i].map_or(f64::INFINITY, |c| c / best));
        }
    }
    Ok(input
        .solvers
        .iter()
        .zip(ratios)
        .map(|(name, mut r)| {
            r.sort_by(f64::total_cmp);
            let mut breakpoints: Vec<[f64; 2]> = Vec::new();
            for (idx, &tau) in r.iter().enumerate() {
                if !tau.is_finite() {
                    break;
                }
                let rho = (idx + 1) as f64 / kept as f64;
                match breakpoints.last_mut() {
                    Some(last) if last[0] == tau => last[1] = rho,
                    _ => breakpoints.push([tau, rho]),
                }
            }
            if breakpoints.first().is_none_or(|b| b[0] > 1.0) {
                breakpoints.insert(0, [1.0, 0.0]);
            }
            ProfileCurve {
                solver: name.clone(),
                breakpoints,
            }
        })
        .collect())
}

/// Evaluates a curve at `tau`.
pub fn profile_value(curve: &ProfileCurve, tau: f64) -> f64 {
    curve
        .breakpoints
        .iter()
        .take_while(|b| b[0] <= tau)
        .last()
        .map_or(0.0, |b| b[1])
}

/// Quality metrics for one front against a reference front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontMetrics {
    pub purity: f64,
    pub gamma_spread: f64,
    pub delta_spread: f64,
    pub hypervolume: f64,
}
