//! Problem abstraction and evaluation bookkeeping.
//!
//! A [`Problem`] exposes raw evaluators for `F`, its Jacobian and (optionally)
//! the objective Hessians. All solver code goes through an [`Evaluator`],
//! which validates dimensions, rejects non-finite output and counts calls.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{FdError, Result};

/// A point in decision space, `x ∈ ℝⁿ`.
pub type DecisionVector = DVector<f64>;
/// An image `F(x) ∈ ℝᵐ`.
pub type ObjectiveVector = DVector<f64>;
/// Jacobian of `F`, one row per objective (`m × n`).
pub type Jacobian = DMatrix<f64>;

/// Step used for finite-difference Hessians when a problem has no analytic ones.
pub const FD_HESSIAN_STEP: f64 = 1e-5;

/// A smooth, unconstrained vector objective `F: ℝⁿ → ℝᵐ`.
///
/// The sampling box returned by [`Problem::lower_bounds`] and
/// [`Problem::upper_bounds`] is only used to build starting points; the
/// optimization itself never projects onto it.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;
    fn n(&self) -> usize;
    fn m(&self) -> usize;
    fn lower_bounds(&self) -> DecisionVector;
    fn upper_bounds(&self) -> DecisionVector;

    /// Raw objective values. May return non-finite values outside the domain.
    fn objectives(&self, x: &DecisionVector) -> ObjectiveVector;

    /// Raw Jacobian, row `j` is `∇f_j(x)ᵀ`.
    fn jacobian(&self, x: &DecisionVector) -> Jacobian;

    /// Analytic Hessians, one `n × n` matrix per objective, when available.
    fn hessians(&self, _x: &DecisionVector) -> Option<Vec<DMatrix<f64>>> {
        None
    }
}

type ObjFn = dyn Fn(&DecisionVector) -> ObjectiveVector + Send + Sync;
type JacFn = dyn Fn(&DecisionVector) -> Jacobian + Send + Sync;
type HessFn = dyn Fn(&DecisionVector) -> Vec<DMatrix<f64>> + Send + Sync;

/// A problem assembled from closures. Handy for tests and ad hoc models.
pub struct FnProblem {
    name: String,
    n: usize,
    m: usize,
    lower: DecisionVector,
    upper: DecisionVector,
    objectives: Box<ObjFn>,
    jacobian: Box<JacFn>,
    hessians: Option<Box<HessFn>>,
}

impl FnProblem {
    pub fn new<F, J>(
        name: impl Into<String>,
        m: usize,
        lower: DecisionVector,
        upper: DecisionVector,
        objectives: F,
        jacobian: J,
    ) -> Result<Self>
    where
        F: Fn(&DecisionVector) -> ObjectiveVector + Send + Sync + 'static,
        J: Fn(&DecisionVector) -> Jacobian + Send + Sync + 'static,
    {
        let n = lower.len();
        if n == 0 || m == 0 {
            return Err(FdError::Contract("problem needs n >= 1 and m >= 1".into()));
        }
        if upper.len() != n {
            return Err(FdError::Dimension {
                expected: n,
                got: upper.len(),
            });
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| !(l < u)) {
            return Err(FdError::Contract("sampling box needs lower < upper".into()));
        }
        Ok(Self {
            name: name.into(),
            n,
            m,
            lower,
            upper,
            objectives: Box::new(objectives),
            jacobian: Box::new(jacobian),
            hessians: None,
        })
    }

    pub fn with_hessians<H>(mut self, hessians: H) -> Self
    where
        H: Fn(&DecisionVector) -> Vec<DMatrix<f64>> + Send + Sync + 'static,
    {
        self.hessians = Some(Box::new(hessians));
        self
    }
}

impl Problem for FnProblem {
    fn name(&self) -> &str {
        &self.name
    }
    fn n(&self) -> usize {
        self.n
    }
    fn m(&self) -> usize {
        self.m
    }
    fn lower_bounds(&self) -> DecisionVector {
        self.lower.clone()
    }
    fn upper_bounds(&self) -> DecisionVector {
        self.upper.clone()
    }
    fn objectives(&self, x: &DecisionVector) -> ObjectiveVector {
        (self.objectives)(x)
    }
    fn jacobian(&self, x: &DecisionVector) -> Jacobian {
        (self.jacobian)(x)
    }
    fn hessians(&self, x: &DecisionVector) -> Option<Vec<DMatrix<f64>>> {
        self.hessians.as_ref().map(|h| h(x))
    }
}

/// Per-run evaluation counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounters {
    pub objective_evals: u64,
    pub jacobian_evals: u64,
    pub hessian_evals: u64,
}

/// Checked, counted access to a [`Problem`].
pub struct Evaluator<'p> {
    problem: &'p dyn Problem,
    counters: EvalCounters,
}

impl<'p> Evaluator<'p> {
    pub fn new(problem: &'p dyn Problem) -> Self {
        Self {
            problem,
            counters: EvalCounters::default(),
        }
    }

    pub fn problem(&self) -> &'p dyn Problem {
        self.problem
    }

    pub fn counters(&self) -> EvalCounters {
        self.counters
    }

    fn check_input(&self, x: &DecisionVector) -> Result<()> {
        if x.len() != self.problem.n() {
            return Err(FdError::Dimension {
                expected: self.problem.n(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `F(x)`; fails on a non-finite component.
    pub fn evaluate(&mut self, x: &DecisionVector) -> Result<ObjectiveVector> {
        self.check_input(x)?;
        self.counters.objective_evals += 1;
        let fx = self.problem.objectives(x);
        if fx.len() != self.problem.m() {
            return Err(FdError::Dimension {
                expected: self.problem.m(),
                got: fx.len(),
            });
        }
        if let Some(index) = fx.iter().position(|v| !v.is_finite()) {
            return Err(FdError::Evaluation { index });
        }
        Ok(fx)
    }

    /// `J_F(x)`; fails on a non-finite entry.
    pub fn jacobian(&mut self, x: &DecisionVector) -> Result<Jacobian> {
        self.check_input(x)?;
        self.counters.jacobian_evals += 1;
        let jac = self.problem.jacobian(x);
        check_jacobian(&jac, self.problem.m(), self.problem.n())?;
        Ok(jac)
    }

    /// Objective Hessians, analytic when the problem provides them and
    /// otherwise central differences of the Jacobian with step
    /// [`FD_HESSIAN_STEP`], symmetrized.
    pub fn hessians(&mut self, x: &DecisionVector) -> Result<Vec<DMatrix<f64>>> {
        self.check_input(x)?;
        self.counters.hessian_evals += 1;
        if let Some(hs) = self.problem.hessians(x) {
            if hs.len() != self.problem.m() {
                return Err(FdError::Dimension {
                    expected: self.problem.m(),
                    got: hs.len(),
                });
            }
            return Ok(hs);
        }
        let (m, n) = (self.problem.m(), self.problem.n());
        let h = FD_HESSIAN_STEP;
        let mut hs = vec![DMatrix::zeros(n, n); m];
        let mut xp = x.clone();
        for i in 0..n {
            xp[i] = x[i] + h;
            let jp = self.jacobian(&xp)?;
            xp[i] = x[i] - h;
            let jm = self.jacobian(&xp)?;
            xp[i] = x[i];
            for (j, hj) in hs.iter_mut().enumerate() {
                for k in 0..n {
                    hj[(k, i)] = (jp[(j, k)] - jm[(j, k)]) / (2.0 * h);
                }
            }
        }
        for hj in &mut hs {
            let sym = (&*hj + hj.transpose()) * 0.5;
            *hj = sym;
        }
        Ok(hs)
    }
}

fn check_jacobian(jac: &Jacobian, m: usize, n: usize) -> Result<()> {
    if jac.nrows() != m {
        return Err(FdError::Dimension {
            expected: m,
            got: jac.nrows(),
        });
    }
    if jac.ncols() != n {
        return Err(FdError::Dimension {
            expected: n,
            got: jac.ncols(),
        });
    }
    for row in 0..m {
        for col in 0..n {
            if !jac[(row, col)].is_finite() {
                return Err(FdError::JacobianEvaluation { row, col });
            }
        }
    }
    Ok(())
}

/// Largest relative deviation between the analytic Jacobian and central
/// differences with step `h`.
///
/// Deviations in row `j` are scaled by `max(1, ‖∇f_j‖∞)` taken over both the
/// analytic and the numeric row, so roundoff in large objectives does not
/// swamp their small partials.
pub fn gradient_check(problem: &dyn Problem, x: &DecisionVector, h: f64) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let jac = problem.jacobian(x);
    let mut numeric = DMatrix::zeros(problem.m(), problem.n());
    let mut xp = x.clone();
    for i in 0..problem.n() {
        xp[i] = x[i] + h;
        let fp = problem.objectives(&xp);
        xp[i] = x[i] - h;
        let fm = problem.objectives(&xp);
        xp[i] = x[i];
        for j in 0..problem.m() {
            numeric[(j, i)] = (fp[j] - fm[j]) / (2.0 * h);
        }
    }
    let mut worst = 0.0_f64;
    for j in 0..problem.m() {
        let scale = jac.row(j).amax().max(numeric.row(j).amax()).max(1.0);
        let err = (jac.row(j) - numeric.row(j)).amax() / scale;
        // NaN counts as a failure, not as zero
        worst = if err.is_nan() {
            f64::INFINITY
        } else {
            worst.max(err)
        };
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn jos1(n: usize) -> FnProblem {
        let nf = n as f64;
        FnProblem::new(
            "jos1",
            2,
            DVector::from_element(n, -100.0),
            DVector::from_element(n, 100.0),
            move |x| {
                let f1 = x.iter().map(|v| v * v).sum::<f64>() / nf;
                let f2 = x.iter().map(|v| (v - 2.0).powi(2)).sum::<f64>() / nf;
                dvector![f1, f2]
            },
            move |x| {
                let mut j = DMatrix::zeros(2, x.len());
                for i in 0..x.len() {
                    j[(0, i)] = 2.0 * x[i] / nf;
                    j[(1, i)] = 2.0 * (x[i] - 2.0) / nf;
                }
                j
            },
        )
        .unwrap()
    }

    #[test]
    fn evaluates_and_counts() {
        let p = jos1(2);
        let mut ev = Evaluator::new(&p);
        assert_eq!(
            ev.evaluate(&dvector![0.0, 0.0]).unwrap(),
            dvector![0.0, 4.0]
        );
        assert_eq!(
            ev.evaluate(&dvector![2.0, 2.0]).unwrap(),
            dvector![4.0, 0.0]
        );
        assert_eq!(ev.counters().objective_evals, 2);
        let j = ev.jacobian(&dvector![1.0, 1.0]).unwrap();
        assert_eq!(j.row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 1.0]);
        assert_eq!(
            j.row(1).iter().copied().collect::<Vec<_>>(),
            vec![-1.0, -1.0]
        );
        let j0 = ev.jacobian(&dvector![0.0, 0.0]).unwrap();
        assert_eq!(
            j0.row(0).iter().copied().collect::<Vec<_>>(),
            vec![0.0, 0.0]
        );
        assert_eq!(
            j0.row(1).iter().copied().collect::<Vec<_>>(),
            vec![-2.0, -2.0]
        );
        assert_eq!(ev.counters().jacobian_evals, 2);
    }

    #[test]
    fn nan_input_is_an_evaluation_failure() {
        let p = jos1(2);
        let mut ev = Evaluator::new(&p);
        let err = ev.evaluate(&dvector![f64::NAN, 0.0]).unwrap_err();
        assert!(matches!(err, FdError::Evaluation { index: 0 }));
        assert!(matches!(
            ev.jacobian(&dvector![0.0, f64::NAN]).unwrap_err(),
            FdError::JacobianEvaluation { .. }
        ));
    }

    #[test]
    fn wrong_length_is_rejected() {
        let p = jos1(2);
        let mut ev = Evaluator::new(&p);
        assert!(matches!(
            ev.evaluate(&dvector![1.0]).unwrap_err(),
            FdError::Dimension {
                expected: 2,
                got: 1
            }
        ));
    }

    #[test]
    fn gradient_check_quadratic_and_linear() {
        let p = jos1(4);
        let x = dvector![0.3, -7.0, 12.5, 99.0];
        assert!(gradient_check(&p, &x, 1e-6) <= 1e-6);

        let lin = FnProblem::new(
            "lin",
            1,
            DVector::from_element(3, -1.0),
            DVector::from_element(3, 1.0),
            |x| dvector![2.0 * x[0] - 3.0 * x[1] + 0.5 * x[2]],
            |_| DMatrix::from_row_slice(1, 3, &[2.0, -3.0, 0.5]),
        )
        .unwrap();
        assert!(gradient_check(&lin, &dvector![0.1, 0.2, 0.3], 1e-6) <= 1e-10);
    }

    #[test]
    fn corrupted_jacobian_is_caught() {
        // one entry doubled: |2c - c| / max(|2c|, |c|, 1) = 0.5 for |c| >= 1
        let bad = FnProblem::new(
            "bad",
            1,
            DVector::from_element(2, -1.0),
            DVector::from_element(2, 1.0),
            |x| dvector![3.0 * x[0] + x[1]],
            |_| DMatrix::from_row_slice(1, 2, &[6.0, 1.0]),
        )
        .unwrap();
        assert!(gradient_check(&bad, &dvector![0.2, 0.4], 1e-6) >= 0.5);
    }

    #[test]
    fn fd_hessian_matches_quadratic() {
        let p = jos1(3);
        let mut ev = Evaluator::new(&p);
        let hs = ev.hessians(&dvector![1.0, -2.0, 0.5]).unwrap();
        for h in hs {
            let expected = DMatrix::identity(3, 3) * (2.0 / 3.0);
            assert!((h - expected).abs().max() < 1e-8);
        }
        assert_eq!(ev.counters().hessian_evals, 1);
        assert_eq!(ev.counters().jacobian_evals, 6);
    }

    #[test]
    fn evaluation_is_pure() {
        let p = jos1(3);
        let x = dvector![0.123, 4.56, -7.89];
        let a = p.objectives(&x);
        let b = p.objectives(&x);
        assert_eq!(a.as_slice(), b.as_slice());
        assert_eq!(p.jacobian(&x).as_slice(), p.jacobian(&x).as_slice());
    }
}
