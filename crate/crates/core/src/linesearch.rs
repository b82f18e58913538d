//! Backtracking line searches for refinement and exploration steps.

use serde::{Deserialize, Serialize};

use crate::dominance::FrontSet;
use crate::error::{contract, FdError, Result};
use crate::problem::{DecisionVector, Evaluator, ObjectiveVector};

/// Step sizes tried are `α0·δ^h` for `h = 0..=max_backtracks`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LineSearchParams {
    pub alpha0: f64,
    pub delta: f64,
    pub gamma: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self {
            alpha0: 1.0,
            delta: 0.5,
            gamma: 1e-4,
            max_backtracks: 60,
        }
    }
}

impl LineSearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0) {
            return Err(FdError::Config("alpha0 must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(FdError::Config("delta must lie in (0, 1)".into()));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(FdError::Config("gamma must lie in (0, 1)".into()));
        }
        if self.max_backtracks < 1 {
            return Err(FdError::Config("max_backtracks must be at least 1".into()));
        }
        Ok(())
    }

    fn steps(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..=self.max_backtracks).map(|h| (h, self.alpha0 * self.delta.powi(h as i32)))
    }
}

/// An accepted step `z = x + α d` with its image.
#[derive(Debug, Clone)]
pub struct Step {
    pub alpha: f64,
    pub z: DecisionVector,
    pub fz: ObjectiveVector,
    /// Number of rejected trials before acceptance.
    pub backtracks: usize,
}

/// Evaluates a trial point; a non-finite image counts as a rejected trial.
fn trial(
    ev: &mut Evaluator<'_>,
    x: &DecisionVector,
    d: &DecisionVector,
    alpha: f64,
) -> Result<Option<(DecisionVector, ObjectiveVector)>> {
    let z = x + d * alpha;
    match ev.evaluate(&z) {
        Ok(fz) => Ok(Some((z, fz))),
        Err(FdError::Evaluation { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Armijo-type search: the largest `α0·δ^h` with
/// `F(x + αd) ≤ F(x) + γ α 𝒟(x, d)` in every component.
pub fn armijo_front(
    ev: &mut Evaluator<'_>,
    x: &DecisionVector,
    fx: &ObjectiveVector,
    d: &DecisionVector,
    d_value: f64,
    params: &LineSearchParams,
) -> Result<Step> {
    if !(d_value < 0.0) {
        return Err(contract(format!(
            "armijo search needs a descent direction, got D = {d_value}"
        )));
    }
    for (h, alpha) in params.steps() {
        let Some((z, fz)) = trial(ev, x, d, alpha)? else {
            continue;
        };
        let bound = params.gamma * alpha * d_value;
        if fz.iter().zip(fx.iter()).all(|(fz, fx)| *fz <= fx + bound) {
            return Ok(Step {
                alpha,
                z,
                fz,
                backtracks: h,
            });
        }
    }
    Err(FdError::LineSearch {
        backtracks: params.max_backtracks,
    })
}

/// Front-relative search: the largest `α0·δ^h` whose candidate is strictly
/// better than every front member in at least one objective. Returns `None`
/// when the backtracking budget runs out.
pub fn exploration_ls(
    ev: &mut Evaluator<'_>,
    z: &DecisionVector,
    dir: &DecisionVector,
    front: &FrontSet,
    params: &LineSearchParams,
) -> Result<Option<Step>> {
    for (h, alpha) in params.steps() {
        let Some((c, fc)) = trial(ev, z, dir, alpha)? else {
            continue;
        };
        if !front.weakly_dominated(fc.as_slice()) {
            return Ok(Some(Step {
                alpha,
                z: c,
                fz: fc,
                backtracks: h,
            }));
        }
    }
    Ok(None)
}
