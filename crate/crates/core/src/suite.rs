//! Benchmark problems and deterministic starting points.
//!
//! The exact formulas implemented here are listed in the guide's "Problems"
//! chapter. Every problem ships an analytic Jacobian; `JOS_1`, `MAN_1`,
//! `SLC_2` and `MOP_2` also ship analytic Hessians.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dominance::{FrontEntry, FrontSet, Provenance};
use crate::error::{contract, FdError, Result};
use crate::problem::{DecisionVector, Evaluator, Jacobian, ObjectiveVector, Problem};

const GRID: [usize; 19] = [
    2, 3, 4, 5, 6, 8, 10, 12, 15, 17, 20, 25, 30, 35, 40, 45, 50, 100, 200,
];

/// Registry record for one benchmark.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteEntry {
    pub name: &'static str,
    pub m: usize,
    pub admissible_n: Vec<usize>,
    pub convex: bool,
}

fn grid_from(start: usize) -> Vec<usize> {
    GRID.iter().copied().filter(|&n| n >= start).collect()
}

/// All benchmarks in registry order.
pub fn suite_entries() -> Vec<SuiteEntry> {
    let e = |name, m, admissible_n, convex| SuiteEntry {
        name,
        m,
        admissible_n,
        convex,
    };
    vec![
        e("JOS_1", 2, grid_from(2), true),
        e("MAN_1", 2, grid_from(2), true),
        e("SLC_2", 2, grid_from(2), true),
        e("MOP_7", 3, vec![2], true),
        e("MMR_5", 2, grid_from(2), false),
        e("MOP_2", 2, grid_from(2), false),
        e("MOP_3", 2, vec![2], false),
        e("CEC09_1", 2, grid_from(4), false),
        e("CEC09_2", 2, grid_from(4), false),
        e("CEC09_3", 2, grid_from(4), false),
        e("CEC09_7", 2, grid_from(4), false),
        e("CEC09_8", 3, grid_from(5), false),
        e("CEC09_10", 3, grid_from(5), false),
    ]
}

/// Looks up a registry entry, ignoring ASCII case.
pub fn suite_entry(name: &str) -> Result<SuiteEntry> {
    suite_entries()
        .into_iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| FdError::UnknownProblem(name.to_string()))
}

/// Instantiates a benchmark at dimension `n`.
pub fn make_problem(name: &str, n: usize) -> Result<Box<dyn Problem>> {
    let entry = suite_entry(name)?;
    if !entry.admissible_n.contains(&n) {
        return Err(FdError::Inadmissible {
            name: entry.name.to_string(),
            n,
        });
    }
    Ok(match entry.name {
        "JOS_1" => Box::new(Jos1 { n }),
        "MAN_1" => Box::new(Man1 { n }),
        "SLC_2" => Box::new(Slc2 { n }),
        "MOP_2" => Box::new(Mop2 { n }),
        "MOP_3" => Box::new(Mop3),
        "MOP_7" => Box::new(Mop7),
        "MMR_5" => Box::new(Mmr5 { n }),
        "CEC09_1" => Box::new(Cec09::new(Uf::One, n)),
        "CEC09_2" => Box::new(Cec09::new(Uf::Two, n)),
        "CEC09_3" => Box::new(Cec09::new(Uf::Three, n)),
        "CEC09_7" => Box::new(Cec09::new(Uf::Seven, n)),
        "CEC09_8" => Box::new(Cec09::new(Uf::Eight, n)),
        "CEC09_10" => Box::new(Cec09::new(Uf::Ten, n)),
        other => unreachable!("registry entry {other} has no constructor"),
    })
}

/// `count` points on the diagonal of the sampling box:
/// `lb + t_i (ub − lb)` with `t_i = i/(count − 1)`, or the midpoint when
/// `count = 1`.
pub fn diagonal_points(problem: &dyn Problem, count: usize) -> Vec<DecisionVector> {
    let (lb, ub) = (problem.lower_bounds(), problem.upper_bounds());
    (0..count)
        .map(|i| {
            let t = if count == 1 {
                0.5
            } else {
                i as f64 / (count - 1) as f64
            };
            &lb + (&ub - &lb) * t
        })
        .collect()
}

/// Starting set: diagonal samples with a finite image and Jacobian, pushed
/// through the nondominance filter in order.
pub fn initial_points(problem: &dyn Problem, count: usize) -> Result<FrontSet> {
    if count == 0 {
        return Err(contract("need at least one starting point"));
    }
    let mut ev = Evaluator::new(problem);
    let mut front = FrontSet::new();
    for x in diagonal_points(problem, count) {
        let fx = match ev.evaluate(&x) {
            Ok(fx) => fx,
            Err(FdError::Evaluation { .. }) => continue,
            Err(e) => return Err(e),
        };
        match ev.jacobian(&x) {
            Ok(_) => {}
            Err(FdError::JacobianEvaluation { .. }) => continue,
            Err(e) => return Err(e),
        }
        front.insert_filter(FrontEntry::new(x, fx, Provenance::Initial));
    }
    if front.is_empty() {
        return Err(contract(format!(
            "no diagonal sample of {} is evaluable",
            problem.name()
        )));
    }
    Ok(front)
}

fn boxed(n: usize, lo: f64, hi: f64) -> (DecisionVector, DecisionVector) {
    (DVector::from_element(n, lo), DVector::from_element(n, hi))
}

macro_rules! problem_header {
    ($name:literal, $m:expr) => {
        fn name(&self) -> &str {
            $name
        }
        fn m(&self) -> usize {
            $m
        }
    };
}

/// `f1 = ‖x‖²/n`, `f2 = ‖x − 2‖²/n` on `[−100, 100]ⁿ`.
pub struct Jos1 {
    pub n: usize,
}

impl Problem for Jos1 {
    problem_header!("JOS_1", 2);
    fn n(&self) -> usize {
        self.n
    }
    fn lower_bounds(&self) -> DecisionVector {
        boxed(self.n, -100.0, 100.0).0
    }
    fn upper_bounds(&self) -> DecisionVector {
        boxed(self.n, -100.0, 100.0).1
    }
    fn objectives(&self, x: &DecisionVector) -> ObjectiveVector {
        let n = self.n as f64;
        let f1 = x.iter().map(|v| v * v).sum::<f64>() / n;
        let f2 = x.iter().map(|v| (v - 2.0) * (v - 2.0)).sum::<f64>() / n;
        DVector::from_vec(vec![f1, f2])
    }
    fn jacobian(&self, x: &DecisionVector) -> Jacobian {
        let n = self.n as f64;
        DMatrix::from_fn(2, self.n, |j, i| {
            if j == 0 {
                2.0 * x[i] / n
            } else {
                2.0 * (x[i] - 2.0) / n
            }
        })
    }
    fn hessians(&self, _x: &DecisionVector) -> Option<Vec<DMatrix<f64>>> {
        let h = DMatrix::identity(self.n, self.n) * (2.0 / self.n as f64);
        Some(vec![h.clone(), h])
    }
}

/// `f1 = Σ i (x_i − i)⁴ / n²`, `f2 = exp(Σ x_i / n) + ‖x‖²` on `[−10, 10]ⁿ`.
pub struct Man1 {
    pub n: usize,
}

impl Problem for Man1 {
    problem_header!("MAN_1", 2);
    fn n(&self) -> usize {
        self.n
    }
    fn lower_bounds(&self) -> DecisionVector {
        boxed(self.n, -10.0, 10.0).0
    }
    fn upper_bounds(&self) -> DecisionVector {
        boxed(self.n, -10.0, 10.0).1
    }
    fn objectives(&self, x: &DecisionVector) -> ObjectiveVector {
        let n2 = (self.n * self.n) as f64;
        let f1 = x
            .iter()
            .enumerate()
            .map(|(i, v)| (i + 1) as f64 * (v - (i + 1) as f64).powi(4))
            .sum::<f64>()
            / n2;
        let f2 = (x.sum() / self.n as f64).exp() + x.norm_squared();
        DVector::from_vec(vec![f1, f2])
    }
    fn jacobian(&self, x: &DecisionVector) -> Jacobian {
        let n = self.n as f64;
        let e = (x.sum() / n).exp();
        DMatrix::from_fn(2, self.n, |j, i| {
            let c = (i + 1) as f64;
            if j == 0 {
                4.0 * c * (x[i] - c).powi(3) / (n * n)
            } else {
                e / n + 2.0 * x[i]
            }
        })
    }
    fn hessians(&self, x: &DecisionVector) -> Option<Vec<DMatrix<f64>>> {
        let n = self.n as f64;
        let h1 = DMatrix::from_diagonal(&DVector::from_fn(self.n, |i, _| {
            let c = (i + 1) as f64;
            12.0 * c * (x[i] - c).powi(2) / (n * n)
        }));
        let e = (x.sum() / n).exp();
        let h2 = DMatrix::from_element(self.n, self.n, e / (n * n))
            + DMatrix::identity(self.n, self.n) * 2.0;
        Some(vec![h1, h2])
    }
}

/// `f1 = (x_1 − 1)⁴ + Σ_{i≥2} (x_i − 1)²`, `f2 = Σ (x_i + 1)²` on `[−5, 5]ⁿ`.
pub struct Slc2 {
    pub n: usize,
}

impl Problem for Slc2 {
    problem_header!("SLC_2", 2);
    fn n(&self) -> usize {
        self.n
    }
    fn lower_bounds(&self) -> DecisionVector {
        boxed(self.n, -5.0, 5.0).0
    }
    fn upper_bounds(&self) -> DecisionVector {
        boxed(self.n, -5.0, 5.0).1
    }
    fn objectives(&self, x: &DecisionVector) -> ObjectiveVector {
        let f1 = (x[0] - 1.0).powi(4) + x.iter().skip(1).map(|v| (v - 1.0).powi(2)).sum::<f64>();
        let f2 = x.iter().map(|v| (v + 1.0).powi(2)).sum::<f64>();
        DVector::from_vec(vec![f1, f2])
    }
    fn jacobian(&self, x: &DecisionVector) -> Jacobian {
        DMatrix::from_fn(2, self.n, |j, i| match (j, i) {
            (0, 0) => 4.0 * (x[0] - 1.0).powi(3),
            (0, _) => 2.0 * (x[i] - 1.0),
            _ => 2.0 * (x[i] + 1.0),
        })
    }
    fn hessians(&self, x: &DecisionVector) -> Option<Vec<DMatrix<f64>>> {
        let mut h1 = DMatrix::identity(self.n, self.n) * 2.0;
        h1[(0, 0)] = 12.0 * (x[0] - 1.0).powi(2);
        Some(vec![h1, DMatrix::identity(self.n, self.n) * 2.0])
    }
}

/// Fonseca-Fleming: `f_{1,2} = 1 − exp(−Σ (x_i ∓ 1/√n)²)` on `[−4, 4]ⁿ`.
pub struct Mop2 {
    pub n: usize,
}

impl Mop2 {
    fn shift(&self, k: usize) -> f64 {
        let c = 1.0 / (self.n as f64).sqrt();
        if k == 0 {
            c
        } else {
            -c
        }
    }
}

impl Problem for Mop2 {
    problem_header!("MOP_2", 2);
    fn n(&self) -> usize {
        self.n
    }
    fn lower_bounds(&self) -> DecisionVector {
        boxed(self.n, -4.0, 4.0).0
    }
    fn upper_bounds(&self) -> DecisionVector {
        boxed(self.n, -4.0, 4.0).1
    }
    fn objectives(&self, x: &DecisionVector) -> ObjectiveVector {
        DVector::from_fn(2, |k, _| {
            let c = self.shift(k);
            1.0 - (-x.iter().map(|v| (v - c).powi(2)).sum::<f64>()).exp()
        })
    }
    fn jacobian(&self, x: &DecisionVector) -> Jacobian {
        let mut jac = DMatrix::zeros(2, self.n);
        for k in 0..2 {
            let c = self.shift(k);
            let e = (-x.iter().map(|v| (v - c).powi(2)).sum::<f64>()).exp();
            for i in 0..self.n {
                jac[(k, i)] = 2.0 * (x[i] - c) * e;
            }
        }
        jac
    }
    fn hessians(&self, x: &DecisionVector) -> Option<Vec<DMatrix<f64>>> {
        Some(
            (0..2)
                .map(|k| {
                    let r = x.add_scalar(-self.shift(k));
                    let e = (-r.norm_squared()).exp();
                    (DMatrix::identity(self.n, self.n) - &r * r.transpose() * 2.0) * (2.0 * e)
                })
                .collect(),
        )
    }
}

/// Poloni's problem on `[−π, π]²`.
pub struct Mop3;

impl Mop3 {
    const A1: f64 = 0.5 * 0.841_470_984_807_896_5 - 2.0 * 0.540_302_305_868_139_8
        + 0.909_297_426_825_681_7
        - 1.5 * -0.416_146_836_547_142_4;
    const A2: f64 = 1.5 * 0.841_470_984_807_896_5 - 0.540_302_305_868_139_8
        + 2.0 * 0.909_297_426_825_681_7
        - 0.5 * -0.416_146_836_547_142_4;

    fn b(x: &DecisionVector) -> (f64, f64, [f64; 2], [f64; 2]) {
        let (s1, c1, s2, c2) = (x[0].sin(), x[0].cos(), x[1].sin(), x[1].cos());
        let b1 = 0.5 * s1 - 2.0 * c1 + s2 - 1.5 * c2;
        let b2 = 1.5 * s1 - c1 + 2.0 * s2 - 0.5 * c2;
        let db1 = [0.5 * c1 + 2.0 * s1, c2 + 1.5 * s2];
        let db2 = [1.5 * c1 + s1, 2.0 * c2 + 0.5 * s2];
        (b1, b2, db1, db2)
    }
}

impl Problem for Mop3 {
    problem_header!("MOP_3", 2);
    fn n(&self) -> usize {
        2
    }
    fn lower_bounds(&self) -> DecisionVector {
        boxed(2, -PI, PI).0
    }
    fn upper_bounds(&self) -> DecisionVector {
        boxed(2, -PI, PI).1
    }
    fn objectives(&self, x: &DecisionVector) -> ObjectiveVector {
        let (b1, b2, _, _) = Self::b(x);
        let f1 = 1.0 + (Self::A1 - b1).powi(2) + (Self::A2 - b2).powi(2);
        let f2 = (x[0] + 3.0).powi(2) + (x[1] + 1.0).powi(2);
        DVector::from_vec(vec![f1, f2])
    }
    fn jacobian(&self, x: &DecisionVector) -> Jacobian {
        let (b1, b2, db1, db2) = Self::b(x);
        let (r1, r2) = (Self::A1 - b1, Self::A2 - b2);
        DMatrix::from_row_slice(
            2,
            2,
            &[
                -2.0 * r1 * db1[0] - 2.0 * r2 * db2[0],
                -2.0 * r1 * db1[1] - 2.0 * r2 * db2[1],
                2.0 * (x[0] + 3.0),
                2.0 * (x[1] + 1.0),
            ],
        )
    }
}

/// Viennet's three-objective quadratic problem on `[−400, 400]²`.
pub struct Mop7;

impl Problem for Mop7 {
    problem_header!("MOP_7", 3);
    fn n(&self) -> usize {
        2
    }
    fn lower_bounds(&self) -> DecisionVector {
        boxed(2, -400.0, 400.0).0
    }
    fn upper_bounds(&self) -> DecisionVector {
        boxed(2, -400.0, 400.0).1
    }
    fn objectives(&self, x: &DecisionVector) -> ObjectiveVector {
        let (a, b) = (x[0], x[1]);
        DVector::from_vec(vec![
            (a - 2.0).powi(2) / 2.0 + (b + 1.0).powi(2) / 13.0 + 3.0,
            (a + b - 3.0).powi(2) / 36.0 + (-a + b + 2.0).powi(2) / 8.0 - 17.0,
            (a + 2.0 * b - 1.0).powi(2) / 175.0 + (2.0 * b - a).powi(2) / 17.0 - 13.0,
        ])
    }
    fn jacobian(&self, x: &DecisionVector) -> Jacobian {
        let (a, b) = (x[0], x[1]);
        let (p, q) = ((a + b - 3.0) / 18.0, (-a + b + 2.0) / 4.0);
        let (r, s) = (
            2.0 * (a + 2.0 * b - 1.0) / 175.0,
            2.0 * (2.0 * b - a) / 17.0,
        );
        DMatrix::from_row_slice(
            3,
            2,
            &[
                a - 2.0,
                2.0 * (b + 1.0) / 13.0,
                p - q,
                p + q,
                r - s,
                2.0 * r + 2.0 * s,
            ],
        )
    }
}

/// `f_k = (g_k(x)/n)^{1/4}` with the Rastrigin-type
/// `g_k = Σ (y_i² − 10 cos(2π y_i) + 10)`, `y = x` for `k = 1` and
/// `y = x − 1.5` for `k = 2`, on `[−5, 5]ⁿ`.
pub struct Mmr5 {
    pub n: usize,
}

impl Mmr5 {
    const SHIFT: [f64; 2] = [0.0, 1.5];

    fn g(&self, x: &DecisionVector, k: usize) -> f64 {
        x.iter()
            .map(|v| {
                let y = v - Self::SHIFT[k];
                y * y - 10.0 * (2.0 * PI * y).cos() + 10.0
            })
            .sum()
    }
}

impl Problem for Mmr5 {
    problem_header!("MMR_5", 2);
    fn n(&self) -> usize {
        self.n
    }
    fn lower_bounds(&self) -> DecisionVector {
        boxed(self.n, -5.0, 5.0).0
    }
    fn upper_bounds(&self) -> DecisionVector {
        boxed(self.n, -5.0, 5.0).1
    }
    fn objectives(&self, x: &DecisionVector) -> ObjectiveVector {
        let n = self.n as f64;
        DVector::from_fn(2, |k, _| (self.g(x, k).max(0.0) / n).powf(0.25))
    }
    fn jacobian(&self, x: &DecisionVector) -> Jacobian {
        let n = self.n as f64;
        let mut jac = DMatrix::zeros(2, self.n);
        for k in 0..2 {
            let g = self.g(x, k);
            if g <= 0.0 {
                continue;
            }
            let outer = 0.25 * (g / n).powf(-0.75) / n;
            for i in 0..self.n {
                let y = x[i] - Self::SHIFT[k];
                jac[(k, i)] = outer * (2.0 * y + 20.0 * PI * (2.0 * PI * y).sin());
            }
        }
        jac
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Uf {
    One,
    Two,
    Three,
    Seven,
    Eight,
    Ten,
}

/// Unconstrained CEC 2009 problems UF1, UF2, UF3, UF7, UF8 and UF10.
pub struct Cec09 {
    kind: Uf,
    n: usize,
    /// Index groups (0-based coordinates) driving each objective.
    groups: Vec<Vec<usize>>,
}

impl Cec09 {
    fn new(kind: Uf, n: usize) -> Self {
        let groups = if matches!(kind, Uf::Eight | Uf::Ten) {
            (0..3)
                .map(|k| {
                    (3..=n)
                        .filter(|j| (j + 2 - k) % 3 == 0)
                        .map(|j| j - 1)
                        .collect()
                })
                .collect()
        } else {
            vec![
                (2..=n).filter(|j| j % 2 == 1).map(|j| j - 1).collect(),
                (2..=n).filter(|j| j % 2 == 0).map(|j| j - 1).collect(),
            ]
        };
        Self { kind, n, groups }
    }

    fn m_(&self) -> usize {
        self.groups.len()
    }

    /// `y_j = x_j − h_j(x_1, x_2)` and the partials of `h_j` in `x_1`, `x_2`.
    fn shift(&self, x: &DecisionVector, i: usize) -> (f64, f64, f64) {
        let j = (i + 1) as f64;
        let n = self.n as f64;
        let x1 = x[0];
        match self.kind {
            Uf::One | Uf::Seven => {
                let arg = 6.0 * PI * x1 + j * PI / n;
                (arg.sin(), 6.0 * PI * arg.cos(), 0.0)
            }
            Uf::Two => {
                let t4 = 24.0 * PI * x1 + 4.0 * j * PI / n;
                let a = 0.3 * x1 * x1 * t4.cos() + 0.6 * x1;
                let da = 0.6 * x1 * t4.cos() - 0.3 * x1 * x1 * 24.0 * PI * t4.sin() + 0.6;
                let t6 = 6.0 * PI * x1 + j * PI / n;
                if (i + 1) % 2 == 1 {
                    (a * t6.cos(), da * t6.cos() - a * 6.0 * PI * t6.sin(), 0.0)
                } else {
                    (a * t6.sin(), da * t6.sin() + a * 6.0 * PI * t6.cos(), 0.0)
                }
            }
            Uf::Three => {
                let p = 0.5 * (1.0 + 3.0 * (j - 2.0) / (n - 2.0));
                (x1.powf(p), p * x1.powf(p - 1.0), 0.0)
            }
            Uf::Eight | Uf::Ten => {
                let arg = 2.0 * PI * x1 + j * PI / n;
                let x2 = x[1];
                (
                    2.0 * x2 * arg.sin(),
                    2.0 * x2 * 2.0 * PI * arg.cos(),
                    2.0 * arg.sin(),
                )
            }
        }
    }

    /// Base shape term of objective `k` and its partials in `x_1`, `x_2`.
    fn base(&self, x: &DecisionVector, k: usize) -> (f64, f64, f64) {
        let x1 = x[0];
        match self.kind {
            Uf::One | Uf::Two | Uf::Three => {
                if k == 0 {
                    (x1, 1.0, 0.0)
                } else {
                    (1.0 - x1.sqrt(), -0.5 / x1.sqrt(), 0.0)
                }
            }
            Uf::Seven => {
                let r = x1.powf(0.2);
                let dr = 0.2 * x1.powf(-0.8);
                if k == 0 {
                    (r, dr, 0.0)
                } else {
                    (1.0 - r, -dr, 0.0)
                }
            }
            Uf::Eight | Uf::Ten => {
                let h = 0.5 * PI;
                let (c1, s1, c2, s2) = (
                    (h * x1).cos(),
                    (h * x1).sin(),
                    (h * x[1]).cos(),
                    (h * x[1]).sin(),
                );
                match k {
                    0 => (c1 * c2, -h * s1 * c2, -h * c1 * s2),
                    1 => (c1 * s2, -h * s1 * s2, h * c1 * c2),
                    _ => (s1, h * c1, 0.0),
                }
            }
        }
    }

    /// Group penalty of objective `k` and its partials in each `y_j` of the group.
    fn penalty(&self, ys: &[f64], idx: &[usize]) -> (f64, Vec<f64>) {
        let scale = 2.0 / ys.len() as f64;
        match self.kind {
            Uf::One | Uf::Two | Uf::Seven | Uf::Eight => (
                scale * ys.iter().map(|y| y * y).sum::<f64>(),
                ys.iter().map(|y| scale * 2.0 * y).collect(),
            ),
            Uf::Ten => (
                scale
                    * ys.iter()
                        .map(|y| 4.0 * y * y - (8.0 * PI * y).cos() + 1.0)
                        .sum::<f64>(),
                ys.iter()
                    .map(|y| scale * (8.0 * y + 8.0 * PI * (8.0 * PI * y).sin()))
                    .collect(),
            ),
            Uf::Three => {
                let w: Vec<f64> = idx
                    .iter()
                    .map(|&i| 20.0 * PI / ((i + 1) as f64).sqrt())
                    .collect();
                let cs: Vec<f64> = ys.iter().zip(&w).map(|(y, w)| (w * y).cos()).collect();
                let prod: f64 = cs.iter().product();
                let value =
                    scale * (4.0 * ys.iter().map(|y| y * y).sum::<f64>() - 2.0 * prod + 2.0);
                // products over all other cosines via prefix and suffix sweeps
                let len = cs.len();
                let mut prefix = vec![1.0; len + 1];
                for t in 0..len {
                    prefix[t + 1] = prefix[t] * cs[t];
                }
                let mut suffix = vec![1.0; len + 1];
                for t in (0..len).rev() {
                    suffix[t] = suffix[t + 1] * cs[t];
                }
                let grad = (0..len)
                    .map(|t| {
                        scale
                            * (8.0 * ys[t]
                                + 2.0 * w[t] * (w[t] * ys[t]).sin() * prefix[t] * suffix[t + 1])
                    })
                    .collect();
                (value, grad)
            }
        }
    }

    fn bounds(&self) -> (DecisionVector, DecisionVector) {
        let n = self.n;
        match self.kind {
            Uf::Three => boxed(n, 0.0, 1.0),
            Uf::One | Uf::Two | Uf::Seven => {
                let (mut lo, hi) = boxed(n, -1.0, 1.0);
                lo[0] = 0.0;
                (lo, hi)
            }
            Uf::Eight | Uf::Ten => {
                let (mut lo, mut hi) = boxed(n, -2.0, 2.0);
                for i in 0..2 {
                    lo[i] = 0.0;
                    hi[i] = 1.0;
                }
                (lo, hi)
            }
        }
    }
}

impl Problem for Cec09 {
    fn name(&self) -> &str {
        match self.kind {
            Uf::One => "CEC09_1",
            Uf::Two => "CEC09_2",
            Uf::Three => "CEC09_3",
            Uf::Seven => "CEC09_7",
            Uf::Eight => "CEC09_8",
            Uf::Ten => "CEC09_10",
        }
    }
    fn n(&self) -> usize {
        self.n
    }
    fn m(&self) -> usize {
        self.m_()
    }
    fn lower_bounds(&self) -> DecisionVector {
        self.bounds().0
    }
    fn upper_bounds(&self) -> DecisionVector {
        self.bounds().1
    }
    fn objectives(&self, x: &DecisionVector) -> ObjectiveVector {
        DVector::from_fn(self.m_(), |k, _| {
            let idx = &self.groups[k];
            let ys: Vec<f64> = idx.iter().map(|&i| x[i] - self.shift(x, i).0).collect();
            self.base(x, k).0 + self.penalty(&ys, idx).0
        })
    }
    fn jacobian(&self, x: &DecisionVector) -> Jacobian {
        let mut jac = DMatrix::zeros(self.m_(), self.n);
        for k in 0..self.m_() {
            let idx = &self.groups[k];
            let shifts: Vec<(f64, f64, f64)> = idx.iter().map(|&i| self.shift(x, i)).collect();
            let ys: Vec<f64> = idx.iter().zip(&shifts).map(|(&i, s)| x[i] - s.0).collect();
            let (_, dy) = self.penalty(&ys, idx);
            let (_, db1, db2) = self.base(x, k);
            jac[(k, 0)] += db1;
            jac[(k, 1)] += db2;
            for ((&i, s), g) in idx.iter().zip(&shifts).zip(&dy) {
                jac[(k, i)] += g;
                jac[(k, 0)] -= g * s.1;
                jac[(k, 1)] -= g * s.2;
            }
        }
        jac
    }
}
