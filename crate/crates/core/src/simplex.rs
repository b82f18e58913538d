//! Dual solver on the unit simplex.
//!
//! Every direction subproblem in this crate has the primal form
//!
//! ```text
//! min_d  max_{j ∈ I}  g_jᵀd + ½ dᵀB_j d
//! ```
//!
//! whose dual is `min_{λ ∈ Δ} ψ(λ) = ½ g(λ)ᵀ B(λ)⁻¹ g(λ)` with
//! `g(λ) = Σ λ_j g_j` and `B(λ) = Σ λ_j B_j`. The primal solution is recovered
//! as `d = −B(λ)⁻¹ g(λ)`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{contract, FdError, Result};

/// Absolute KKT tolerance, relative to `max(1, ‖∇ψ‖∞)`.
pub const KKT_TOL: f64 = 1e-10;
/// A capped solve is still accepted below this residual.
pub const KKT_ACCEPT: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 100_000;
/// Iterations without progress in `ψ` after which an acceptable iterate is returned.
const STALL_WINDOW: usize = 200;
/// Directions at or below this norm are snapped to zero.
pub const ZERO_DIRECTION: f64 = 1e-12;

/// Per-objective quadratic model used in the primal.
#[derive(Debug, Clone, Copy)]
pub enum Metric<'a> {
    /// `B_j = I` for all `j`.
    Identity,
    /// One symmetric positive definite matrix per active objective.
    PerObjective(&'a [DMatrix<f64>]),
}

/// Convex weights `λ` over the active objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexWeights {
    pub lambda: DVector<f64>,
}

/// Optimal dual weights together with the recovered primal direction.
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub weights: SimplexWeights,
    pub d: DVector<f64>,
    /// Primal optimum `max_j g_jᵀd + ½ dᵀB_j d`.
    pub theta: f64,
    /// Scaled projected-gradient residual at the returned weights.
    pub residual: f64,
    pub iterations: usize,
}

/// Solves the dual for the gradients stored as the rows of `g` (`k × n`).
pub fn solve_dual_simplex(g: &DMatrix<f64>, metric: Metric<'_>) -> Result<DualSolution> {
    let k = g.nrows();
    if k == 0 {
        return Err(contract("dual solve needs at least one active objective"));
    }
    if let Metric::PerObjective(bs) = metric {
        if bs.len() != k {
            return Err(FdError::Dimension {
                expected: k,
                got: bs.len(),
            });
        }
    }
    let oracle = Oracle::new(g, metric)?;
    let (lambda, iterations) = match (k, metric) {
        (1, _) => (DVector::from_element(1, 1.0), 0),
        (2, Metric::Identity) => (closed_form_pair(g), 0),
        (2, Metric::PerObjective(_)) => bisect_pair(&oracle)?,
        (_, Metric::Identity) => projected_gradient_identity(&oracle)?,
        (_, Metric::PerObjective(_)) => projected_gradient_metric(&oracle)?,
    };
    let eval = oracle.eval(&lambda)?;
    let residual = kkt_residual(&lambda, &eval.grad);
    if residual > KKT_ACCEPT {
        return Err(FdError::DualNonConvergence { residual });
    }
    let (d, theta) = if eval.d.norm() <= ZERO_DIRECTION {
        (DVector::zeros(g.ncols()), 0.0)
    } else {
        let theta = oracle.primal_values(&eval.d).max();
        (eval.d, theta)
    };
    Ok(DualSolution {
        weights: SimplexWeights { lambda },
        d,
        theta,
        residual,
        iterations,
    })
}

/// Euclidean projection onto the unit simplex (sort-based).
pub fn project_simplex(v: &DVector<f64>) -> DVector<f64> {
    let mut u: Vec<f64> = v.iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            tau = t;
        }
    }
    v.map(|vi| (vi - tau).max(0.0))
}

/// `‖λ − P(λ − ∇ψ)‖∞ / max(1, ‖∇ψ‖∞)`, zero exactly at a KKT point.
pub fn kkt_residual(lambda: &DVector<f64>, grad: &DVector<f64>) -> f64 {
    let step = project_simplex(&(lambda - grad));
    (lambda - step).amax() / grad.amax().max(1.0)
}

struct Eval {
    psi: f64,
    grad: DVector<f64>,
    d: DVector<f64>,
}

struct Oracle<'a> {
    g: &'a DMatrix<f64>,
    metric: Metric<'a>,
    gram: Option<DMatrix<f64>>,
}

impl<'a> Oracle<'a> {
    fn new(g: &'a DMatrix<f64>, metric: Metric<'a>) -> Result<Self> {
        let gram = match metric {
            Metric::Identity => Some(g * g.transpose()),
            Metric::PerObjective(_) => None,
        };
        Ok(Self { g, metric, gram })
    }

    fn combined_gradient(&self, lambda: &DVector<f64>) -> DVector<f64> {
        self.g.tr_mul(lambda)
    }

    fn eval(&self, lambda: &DVector<f64>) -> Result<Eval> {
        let gl = self.combined_gradient(lambda);
        match self.metric {
            Metric::Identity => {
                let gram = self
                    .gram
                    .as_ref()
                    .expect("identity metric has a Gram matrix");
                let grad = gram * lambda;
                Ok(Eval {
                    psi: 0.5 * lambda.dot(&grad),
                    grad,
                    d: -gl,
                })
            }
            Metric::PerObjective(bs) => {
                let n = self.g.ncols();
                let mut b = DMatrix::zeros(n, n);
                for (lj, bj) in lambda.iter().zip(bs) {
                    if *lj != 0.0 {
                        b += bj * *lj;
                    }
                }
                let chol: Cholesky<f64, Dyn> =
                    Cholesky::new(b).ok_or(FdError::NotPositiveDefinite)?;
                let d = -chol.solve(&gl);
                let psi = -0.5 * gl.dot(&d);
                let grad = -self.primal_values(&d);
                Ok(Eval { psi, grad, d })
            }
        }
    }

    /// `q_j(d) = g_jᵀd + ½ dᵀB_j d` for each active objective.
    fn primal_values(&self, d: &DVector<f64>) -> DVector<f64> {
        let lin = self.g * d;
        match self.metric {
            Metric::Identity => lin.add_scalar(0.5 * d.norm_squared()),
            Metric::PerObjective(bs) => DVector::from_iterator(
                lin.len(),
                lin.iter().zip(bs).map(|(l, b)| l + 0.5 * d.dot(&(b * d))),
            ),
        }
    }
}

/// Minimum-norm point of the segment `[g_1, g_2]`.
fn closed_form_pair(g: &DMatrix<f64>) -> DVector<f64> {
    let g1 = g.row(0);
    let g2 = g.row(1);
    let diff = g1 - g2;
    let denom = diff.norm_squared();
    if denom == 0.0 {
        return DVector::from_vec(vec![0.5, 0.5]);
    }
    // compute the smaller weight directly; 1 − λ loses its digits otherwise
    let l1 = ((g2 - g1).dot(&g2) / denom).clamp(0.0, 1.0);
    let l2 = ((g1 - g2).dot(&g1) / denom).clamp(0.0, 1.0);
    if l1 <= l2 {
        DVector::from_vec(vec![l1, 1.0 - l1])
    } else {
        DVector::from_vec(vec![1.0 - l2, l2])
    }
}

/// Bisection on the derivative of `t ↦ ψ(t, 1 − t)`, which is monotone by convexity.
fn bisect_pair(oracle: &Oracle<'_>) -> Result<(DVector<f64>, usize)> {
    let at = |t: f64| DVector::from_vec(vec![t, 1.0 - t]);
    let slope = |t: f64| -> Result<f64> {
        let e = oracle.eval(&at(t))?;
        Ok(e.grad[0] - e.grad[1])
    };
    if slope(0.0)? >= 0.0 {
        return Ok((at(0.0), 1));
    }
    if slope(1.0)? <= 0.0 {
        return Ok((at(1.0), 2));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut iterations = 2;
    while hi - lo > 1e-16 && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let s = slope(mid)?;
        if s == 0.0 {
            return Ok((at(mid), iterations));
        }
        if s < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((at(0.5 * (lo + hi)), iterations))
}

fn uniform(k: usize) -> DVector<f64> {
    DVector::from_element(k, 1.0 / k as f64)
}

fn converged(lambda: &DVector<f64>, grad: &DVector<f64>) -> bool {
    kkt_residual(lambda, grad) <= KKT_TOL
}

/// Projected gradient with step `1/L` on the quadratic `½ λᵀQλ`, polished
/// periodically by exact solves on the faces of the current support.
fn projected_gradient_identity(oracle: &Oracle<'_>) -> Result<(DVector<f64>, usize)> {
    let q = oracle
        .gram
        .as_ref()
        .expect("identity metric has a Gram matrix");
    let k = q.nrows();
    let lipschitz = q
        .clone()
        .symmetric_eigenvalues()
        .amax()
        .max(f64::MIN_POSITIVE);
    let psi = |l: &DVector<f64>| 0.5 * l.dot(&(q * l));
    let polish = |l: DVector<f64>| match best_face(q, &l) {
        Some(face) if psi(&face) <= psi(&l) => face,
        _ => l,
    };
    let mut lambda = uniform(k);
    for it in 0..MAX_ITERATIONS {
        let grad = q * &lambda;
        if converged(&lambda, &grad) {
            let polished = polish(lambda.clone());
            return Ok((
                if converged(&polished, &(q * &polished)) {
                    polished
                } else {
                    lambda
                },
                it,
            ));
        }
        lambda = project_simplex(&(&lambda - grad / lipschitz));
        if it % 16 == 15 {
            lambda = polish(lambda);
        }
    }
    Ok((lambda, MAX_ITERATIONS))
}

/// Best feasible face minimizer among the faces spanned by subsets of the
/// support of `lambda` (all of them when the support is small).
fn best_face(q: &DMatrix<f64>, lambda: &DVector<f64>) -> Option<DVector<f64>> {
    let support: Vec<usize> = (0..lambda.len()).filter(|&i| lambda[i] > 0.0).collect();
    if support.is_empty() {
        return None;
    }
    let faces: Vec<Vec<usize>> = if support.len() <= 6 {
        (1u32..(1 << support.len()))
            .map(|mask| {
                support
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask & (1 << b) != 0)
                    .map(|(_, &i)| i)
                    .collect()
            })
            .collect()
    } else {
        vec![support]
    };
    faces
        .iter()
        .filter_map(|face| face_solution(q, face, lambda.len()))
        .map(|l| (0.5 * l.dot(&(q * &l)), l))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, l)| l)
}

/// Minimizer of `½ λᵀQλ` over the affine hull of `face`, when it is nonnegative.
fn face_solution(q: &DMatrix<f64>, face: &[usize], k: usize) -> Option<DVector<f64>> {
    let s = face.len();
    // bordered KKT system [Q_SS  -1; 1ᵀ 0] [λ; μ] = [0; 1]
    let mut a = DMatrix::zeros(s + 1, s + 1);
    for (r, &i) in face.iter().enumerate() {
        for (c, &j) in face.iter().enumerate() {
            a[(r, c)] = q[(i, j)];
        }
        a[(r, s)] = -1.0;
        a[(s, r)] = 1.0;
    }
    let mut rhs = DVector::zeros(s + 1);
    rhs[s] = 1.0;
    let sol = a
        .clone()
        .lu()
        .solve(&rhs)
        .or_else(|| a.svd(true, true).solve(&rhs, 1e-14).ok())?;
    let mut out = DVector::zeros(k);
    for (r, &i) in face.iter().enumerate() {
        if !(sol[r] >= 0.0) {
            return None;
        }
        out[i] = sol[r];
    }
    let total = out.sum();
    if !(total > 0.0) {
        return None;
    }
    Some(out / total)
}

/// Projected gradient with backtracking for a general convex `ψ`.
fn projected_gradient_metric(oracle: &Oracle<'_>) -> Result<(DVector<f64>, usize)> {
    let k = oracle.g.nrows();
    let mut lambda = uniform(k);
    let mut current = oracle.eval(&lambda)?;
    let mut step = 1.0 / current.grad.amax().max(1.0);
    let (mut best_psi, mut since_best) = (current.psi, 0usize);
    for it in 0..MAX_ITERATIONS {
        if converged(&lambda, &current.grad) {
            return Ok((lambda, it));
        }
        // ψ stops decreasing once its changes are below rounding
        if current.psi < best_psi - 1e-14 * best_psi.abs() {
            (best_psi, since_best) = (current.psi, 0);
        } else {
            since_best += 1;
            if since_best >= STALL_WINDOW && kkt_residual(&lambda, &current.grad) <= KKT_ACCEPT {
                return Ok((lambda, it));
            }
        }
        step *= 2.0;
        loop {
            let trial = project_simplex(&(&lambda - &current.grad * step));
            let delta = &trial - &lambda;
            let next = oracle.eval(&trial)?;
            let model =
                current.psi + current.grad.dot(&delta) + delta.norm_squared() / (2.0 * step);
            if next.psi <= model + 1e-15 * current.psi.abs() || step < 1e-300 {
                lambda = trial;
                current = next;
                break;
            }
            step *= 0.5;
        }
    }
    Ok((lambda, MAX_ITERATIONS))
}
