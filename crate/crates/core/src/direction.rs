//! Descent directions: common and partial steepest descent, Newton-type and
//! Barzilai-Borwein, plus the steepest-descent-related safeguard.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{contract, FdError, Result};
use crate::problem::Jacobian;
use crate::simplex::{solve_dual_simplex, Metric};

pub use crate::simplex::SimplexWeights;

/// Default eigenvalue floor for the Hessian shift.
pub const DEFAULT_KAPPA: f64 = 1e-2;
pub const DEFAULT_A_MIN: f64 = 1e-3;
pub const DEFAULT_A_MAX: f64 = 1e3;

/// Which subproblem produced a direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirectionKind {
    CommonSd,
    /// Objectives in the subset, 0-based.
    PartialSd(Vec<usize>),
    Newton,
    Bb,
}

/// A direction together with its subproblem value and dual weights.
#[derive(Debug, Clone)]
pub struct DirectionResult {
    pub d: DVector<f64>,
    /// Optimal value of the subproblem, never positive.
    pub theta: f64,
    /// `max_j ∇f_j(x)ᵀd` over the objectives the direction was built from.
    pub d_value: f64,
    pub weights: SimplexWeights,
    pub kind: DirectionKind,
}

/// Per-objective shifts `η_h` that make every `H_h + η_h I` positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralShift {
    pub eta: Vec<f64>,
    pub kappa: f64,
}

fn max_directional(j: &Jacobian, d: &DVector<f64>) -> f64 {
    if d.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    (j * d).max()
}

fn rows(j: &Jacobian, subset: &[usize]) -> DMatrix<f64> {
    j.select_rows(subset)
}

fn steepest(j: &Jacobian, kind: DirectionKind) -> Result<DirectionResult> {
    let sol = solve_dual_simplex(j, Metric::Identity)?;
    let d_value = max_directional(j, &sol.d);
    Ok(DirectionResult {
        theta: sol.theta,
        d_value,
        d: sol.d,
        weights: sol.weights,
        kind,
    })
}

/// Steepest common descent direction `v(x)` and `θ(x)` from the Jacobian.
pub fn common_steepest(j: &Jacobian) -> Result<DirectionResult> {
    steepest(j, DirectionKind::CommonSd)
}

/// Steepest partial descent direction `v^I(x)` for a proper nonempty subset.
pub fn partial_steepest(j: &Jacobian, subset: &[usize]) -> Result<DirectionResult> {
    let m = j.nrows();
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() || sorted.len() >= m || sorted.len() != subset.len() {
        return Err(contract(format!(
            "{subset:?} is not a proper nonempty subset of 0..{m}"
        )));
    }
    if sorted.iter().any(|&i| i >= m) {
        return Err(contract(format!(
            "objective index out of range in {subset:?}"
        )));
    }
    steepest(&rows(j, &sorted), DirectionKind::PartialSd(sorted))
}

/// Shift rule: `η = −λ_min + κ` when `λ_min ≤ 0`, otherwise `0`.
pub fn spectral_shift(hessians: &[DMatrix<f64>], kappa: f64) -> Result<SpectralShift> {
    if !(kappa > 0.0) {
        return Err(contract("kappa must be positive"));
    }
    let mut eta = Vec::with_capacity(hessians.len());
    for (h_idx, h) in hessians.iter().enumerate() {
        check_symmetric(h, h_idx)?;
        let lmin = h.clone().symmetric_eigenvalues().min();
        eta.push(if lmin <= 0.0 { -lmin + kappa } else { 0.0 });
    }
    Ok(SpectralShift { eta, kappa })
}

fn check_symmetric(h: &DMatrix<f64>, objective: usize) -> Result<()> {
    if !h.is_square() {
        return Err(FdError::NonSymmetricHessian { objective });
    }
    let scale = h.amax().max(1.0);
    if (h - h.transpose()).amax() > 1e-10 * scale {
        return Err(FdError::NonSymmetricHessian { objective });
    }
    Ok(())
}

/// Applies a shift, returning `B_h = H_h + η_h I`.
pub fn shifted_metrics(hessians: &[DMatrix<f64>], shift: &SpectralShift) -> Vec<DMatrix<f64>> {
    hessians
        .iter()
        .zip(&shift.eta)
        .map(|(h, &eta)| {
            let mut b = h.clone();
            if eta != 0.0 {
                for i in 0..b.nrows() {
                    b[(i, i)] += eta;
                }
            }
            b
        })
        .collect()
}

/// Newton-type direction `v_N(x)` with shifted Hessians.
pub fn newton_direction(
    j: &Jacobian,
    hessians: &[DMatrix<f64>],
    kappa: f64,
) -> Result<DirectionResult> {
    if hessians.len() != j.nrows() {
        return Err(FdError::Dimension {
            expected: j.nrows(),
            got: hessians.len(),
        });
    }
    if let Some(h) = hessians.iter().find(|h| h.nrows() != j.ncols()) {
        return Err(FdError::Dimension {
            expected: j.ncols(),
            got: h.nrows(),
        });
    }
    let shift = spectral_shift(hessians, kappa)?;
    let metrics = shifted_metrics(hessians, &shift);
    newton_with_metrics(j, &metrics)
}

/// Newton-type direction for already positive definite metrics `B_j`.
pub fn newton_with_metrics(j: &Jacobian, metrics: &[DMatrix<f64>]) -> Result<DirectionResult> {
    let sol = solve_dual_simplex(j, Metric::PerObjective(metrics))?;
    let d_value = max_directional(j, &sol.d);
    Ok(DirectionResult {
        theta: sol.theta,
        d_value,
        d: sol.d,
        weights: sol.weights,
        kind: DirectionKind::Newton,
    })
}

/// Barzilai-Borwein direction `v_a(x)`: steepest descent on gradients
/// rescaled by `1/a_j`, with `a` clamped to `[a_min, a_max]`.
pub fn bb_direction(j: &Jacobian, a: &[f64], a_min: f64, a_max: f64) -> Result<DirectionResult> {
    if !(a_min > 0.0 && a_min <= a_max) {
        return Err(contract("need 0 < a_min <= a_max"));
    }
    if a.len() != j.nrows() {
        return Err(FdError::Dimension {
            expected: j.nrows(),
            got: a.len(),
        });
    }
    let mut scaled = j.clone();
    for (r, &aj) in a.iter().enumerate() {
        let aj = aj.clamp(a_min, a_max);
        if !(aj > 0.0) {
            return Err(contract("BB scalars must be positive"));
        }
        scaled.row_mut(r).unscale_mut(aj);
    }
    let sol = solve_dual_simplex(&scaled, Metric::Identity)?;
    let d_value = max_directional(j, &sol.d);
    Ok(DirectionResult {
        theta: sol.theta,
        d_value,
        d: sol.d,
        weights: sol.weights,
        kind: DirectionKind::Bb,
    })
}

/// First Barzilai-Borwein rule `a_j = sᵀy_j / sᵀs`, clamped, with `a_j = 1`
/// whenever the curvature `sᵀy_j` is not positive.
pub fn update_bb_scalars(s: &DVector<f64>, y: &[DVector<f64>], a_min: f64, a_max: f64) -> Vec<f64> {
    let ss = s.norm_squared();
    y.iter()
        .map(|yj| {
            let sy = s.dot(yj);
            if ss > 0.0 && sy > 0.0 {
                (sy / ss).clamp(a_min, a_max)
            } else {
                1.0
            }
        })
        .collect()
}

/// Relative slack on both bounds; equality cases such as `v_D = v / a_min`
/// otherwise fail by an ulp.
pub const SDR_RELATIVE_SLACK: f64 = 1e-12;

/// `𝒟(x, v_D) ≤ −Γ1‖v‖²` and `‖v_D‖ ≤ Γ2‖v‖`, up to [`SDR_RELATIVE_SLACK`].
pub fn sdr_check(d_value: f64, norm_vd: f64, norm_v: f64, gamma1: f64, gamma2: f64) -> bool {
    let decrease = gamma1 * norm_v * norm_v;
    d_value <= -decrease * (1.0 - SDR_RELATIVE_SLACK)
        && norm_vd <= gamma2 * norm_v * (1.0 + SDR_RELATIVE_SLACK)
}
