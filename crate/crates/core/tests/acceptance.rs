//! Acceptance suite. Prints one PASS/FAIL line per criterion. The exit status
//! is nonzero on failure only when `FD_ACCEPTANCE_STRICT` is set, so a
//! statistical miss is reported without breaking the workspace test run.

use std::path::Path;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use front_descent::direction::{
    bb_direction, common_steepest, newton_with_metrics, sdr_check, DirectionKind,
};
use front_descent::dominance::{FrontEntry, FrontSet, Provenance};
use front_descent::driver::{
    compute_iteration_bound, run, CrowdingMode, FdConfig, SigmaSchedule, Variant,
};
use front_descent::harness::{cmd_run, ExperimentConfig, Instance, VariantSpec};
use front_descent::hypervolume::{box_gain_lower_bound, hypervolume};
use front_descent::suite::{initial_points, make_problem};
use front_descent::Problem;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Minimizer of `½‖λ g1 + (1 − λ) g2‖²` over `λ ∈ [0, 1]`, negated.
fn pair_oracle(j: &DMatrix<f64>) -> DVector<f64> {
    let (g1, g2) = (j.row(0).transpose(), j.row(1).transpose());
    let diff = &g1 - &g2;
    let denom = diff.norm_squared();
    let lambda = if denom == 0.0 {
        1.0
    } else {
        (-(diff.dot(&g2)) / denom).clamp(0.0, 1.0)
    };
    -(&g2 + diff * lambda)
}

/// Best dual value `−½‖Jᵀλ‖²` over the simplex grid with step 1e-3.
fn grid_oracle(j: &DMatrix<f64>) -> f64 {
    let q = j * j.transpose();
    let steps = 1000;
    let mut best = f64::NEG_INFINITY;
    for a in 0..=steps {
        for b in 0..=(steps - a) {
            let l = [
                a as f64 / steps as f64,
                b as f64 / steps as f64,
                (steps - a - b) as f64 / steps as f64,
            ];
            let mut v = 0.0;
            for r in 0..3 {
                for c in 0..3 {
                    v += l[r] * q[(r, c)] * l[c];
                }
            }
            best = best.max(-0.5 * v);
        }
    }
    best
}

struct Draw {
    j: DMatrix<f64>,
}

fn direction_draws() -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dims = [2, 10, 50];
    let mut draws = Vec::new();
    for m in [2, 3] {
        for i in 0..200 {
            draws.push(Draw {
                j: random_matrix(&mut rng, m, dims[i % 3]),
            });
        }
    }
    draws
}

fn criterion_1(draws: &[Draw]) -> Outcome {
    let start = Instant::now();
    let (mut worst_d, mut worst_theta) = (0.0f64, 0.0f64);
    for draw in draws {
        let v = match common_steepest(&draw.j) {
            Ok(v) => v,
            Err(e) => return outcome(false, format!("solver error: {e}")),
        };
        if draw.j.nrows() == 2 {
            worst_d = worst_d.max((&v.d - pair_oracle(&draw.j)).norm());
        } else {
            worst_theta = worst_theta.max((v.theta - grid_oracle(&draw.j)).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_d <= 1e-7 && worst_theta <= 1e-4 && secs < 10.0,
        format!("max |d - d*| = {worst_d:.2e} (m=2), max |theta - grid| = {worst_theta:.2e} (m=3), {secs:.1} s"),
    )
}

fn criterion_2(draws: &[Draw]) -> Outcome {
    let (mut worst_theta, mut worst_d) = (0.0f64, 0.0f64);
    for draw in draws {
        let v = common_steepest(&draw.j).expect("checked in criterion 1");
        let n2 = v.d.norm_squared();
        worst_theta = worst_theta.max((v.theta + 0.5 * n2).abs());
        worst_d = worst_d.max((v.d_value + n2).abs());
    }
    outcome(
        worst_theta <= 1e-8 && worst_d <= 1e-8,
        format!("max |theta + |v|^2/2| = {worst_theta:.2e}, max |D(x,v) + |v|^2| = {worst_d:.2e} over {} draws", draws.len()),
    )
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize, c1: f64, c2: f64) -> DMatrix<f64> {
    let q = random_matrix(rng, n, n).qr().q();
    let eig = DVector::from_fn(n, |i, _| match i {
        0 => c1,
        1 => c2,
        _ => rng.random_range(c1..=c2),
    });
    let b = &q * DMatrix::from_diagonal(&eig) * q.transpose();
    (&b + b.transpose()) * 0.5
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut newton_fail = 0;
    for _ in 0..1000 {
        let m = rng.random_range(2..=3);
        let n = rng.random_range(m..=8);
        let c1 = 10f64.powf(rng.random_range(-2.0..0.0));
        let c2 = c1 * 10f64.powf(rng.random_range(0.0..2.0));
        let metrics: Vec<DMatrix<f64>> = (0..m).map(|_| random_spd(&mut rng, n, c1, c2)).collect();
        let j = random_matrix(&mut rng, m, n);
        let (g1, g2) = (c1 / (2.0 * c2 * c2), 1.0 / c1);
        let v = common_steepest(&j).unwrap();
        match newton_with_metrics(&j, &metrics) {
            Ok(vn) if sdr_check(vn.d_value, vn.d.norm(), v.d.norm(), g1, g2) => {}
            _ => newton_fail += 1,
        }
    }
    let (a_min, a_max) = (1e-3, 1e3);
    let (g1, g2) = (a_min / (4.0 * a_max * a_max), 1.0 / a_min);
    let mut bb_fail = 0;
    for _ in 0..1000 {
        let m = rng.random_range(2..=3);
        let n = rng.random_range(m..=8);
        let a: Vec<f64> = (0..m)
            .map(|_| match rng.random_range(0..6) {
                0 => a_min,
                1 => a_max,
                _ => 10f64.powf(rng.random_range(-3.0..3.0)),
            })
            .collect();
        let j = random_matrix(&mut rng, m, n);
        let v = common_steepest(&j).unwrap();
        match bb_direction(&j, &a, a_min, a_max) {
            Ok(va) if sdr_check(va.d_value, va.d.norm(), v.d.norm(), g1, g2) => {}
            _ => bb_fail += 1,
        }
    }
    outcome(
        newton_fail == 0 && bb_fail == 0,
        format!("newton failures {newton_fail}/1000, bb failures {bb_fail}/1000"),
    )
}

fn random_front(rng: &mut ChaCha8Rng, m: usize, size: usize) -> Vec<Vec<f64>> {
    if m == 2 {
        let mut a: Vec<f64> = (0..size).map(|_| rng.random::<f64>()).collect();
        let mut b: Vec<f64> = (0..size).map(|_| rng.random::<f64>()).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(|x, y| y.total_cmp(x));
        a.into_iter().zip(b).map(|(x, y)| vec![x, y]).collect()
    } else {
        (0..size)
            .map(|_| {
                let u: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 1e-3).collect();
                let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                u.into_iter().map(|x| x / norm).collect()
            })
            .collect()
    }
}

/// Uniform sampling of the box `[ideal, zeta]`; returns estimate and standard error.
fn monte_carlo(
    front: &[Vec<f64>],
    zeta: &[f64],
    ideal: &[f64],
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = zeta.len();
    let volume: f64 = (0..m).map(|j| zeta[j] - ideal[j]).product();
    let mut u = vec![0.0; m];
    let mut hits = 0usize;
    for _ in 0..samples {
        for j in 0..m {
            u[j] = rng.random_range(ideal[j]..zeta[j]);
        }
        if front.iter().any(|f| f.iter().zip(&u).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (p * volume, volume * (p * (1.0 - p) / samples as f64).sqrt())
}

/// Exact union volume by coordinate compression: every grid cell is either
/// inside or outside the dominated region.
fn grid_volume(front: &[Vec<f64>], zeta: &[f64]) -> f64 {
    let m = zeta.len();
    let axes: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let mut c: Vec<f64> = front.iter().map(|f| f[j]).chain([zeta[j]]).collect();
            c.sort_by(f64::total_cmp);
            c.dedup();
            c
        })
        .collect();
    let cells: Vec<usize> = axes.iter().map(|a| a.len() - 1).collect();
    let total: usize = cells.iter().product();
    let mut volume = 0.0;
    let mut idx = vec![0usize; m];
    for _ in 0..total {
        let lower: Vec<f64> = (0..m).map(|j| axes[j][idx[j]]).collect();
        if front
            .iter()
            .any(|f| f.iter().zip(&lower).all(|(a, b)| a <= b))
        {
            volume += (0..m)
                .map(|j| axes[j][idx[j] + 1] - axes[j][idx[j]])
                .product::<f64>();
        }
        for j in 0..m {
            idx[j] += 1;
            if idx[j] < cells[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    volume
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_z, mut worst_grid) = (0.0f64, 0.0f64);
    let mut zs = Vec::new();
    for m in [2, 3] {
        for i in 0..50 {
            let size = rng.random_range(3..=25);
            let front = random_front(&mut rng, m, size);
            let zeta = vec![1.1; m];
            let ideal: Vec<f64> = (0..m)
                .map(|j| front.iter().map(|f| f[j]).fold(f64::INFINITY, f64::min))
                .collect();
            let exact = match hypervolume(&front, &zeta) {
                Ok(v) => v,
                Err(e) => return outcome(false, format!("hypervolume error: {e}")),
            };
            worst_grid = worst_grid.max((exact - grid_volume(&front, &zeta)).abs());
            let (est, se) = monte_carlo(&front, &zeta, &ideal, 1_000_000, 1000 + i);
            let z = (exact - est) / se.max(1e-300);
            zs.push(z);
            worst_z = worst_z.max(z.abs());
        }
    }
    let over = zs.iter().filter(|z| z.abs() > 3.0).count();
    let mean = zs.iter().sum::<f64>() / zs.len() as f64;
    let sd = (zs.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (zs.len() - 1) as f64).sqrt();
    let example =
        hypervolume(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]], &[3.0, 3.0]).unwrap_or(f64::NAN);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_z <= 3.0 && worst_grid <= 1e-12 && example == 6.0 && secs < 60.0,
        format!(
            "max |exact - mc| / se = {worst_z:.2} ({over} of 100 fronts above 3, z mean {mean:.2} sd {sd:.2}), \
             max |exact - grid oracle| = {worst_grid:.1e}, three-point example = {example}, {secs:.1} s"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::INFINITY;
    for i in 0..500 {
        let m = 2 + i % 2;
        let size = rng.random_range(1..=15);
        let front = random_front(&mut rng, m, size);
        let zeta = vec![1.5; m];
        let pick = rng.random_range(0..front.len());
        let old = front[pick].clone();
        let new: Vec<f64> = old
            .iter()
            .map(|v| v - rng.random_range(1e-3..0.5))
            .collect();
        let mut after: Vec<Vec<f64>> = front
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != pick)
            .map(|(_, f)| f.clone())
            .collect();
        after.push(new.clone());
        let gain = hypervolume(&after, &zeta).unwrap() - hypervolume(&front, &zeta).unwrap();
        let bound = box_gain_lower_bound(&old, &new).unwrap();
        worst = worst.min(gain - bound);
    }
    outcome(
        worst >= -1e-12,
        format!("min (gain - box) = {worst:.3e} over 500 replacements"),
    )
}

fn criterion_6() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (name, n) in [("JOS_1", 5), ("JOS_1", 20), ("MAN_1", 20), ("CEC09_2", 10)] {
        let p = make_problem(name, n).unwrap();
        let config = FdConfig {
            check_invariants: true,
            ..FdConfig::default()
        };
        match run(p.as_ref(), initial_points(p.as_ref(), n).unwrap(), &config) {
            Ok(r) => {
                let monotone = r
                    .trace
                    .windows(2)
                    .all(|w| w[1].hypervolume_value >= w[0].hypervolume_value);
                let ok = monotone && r.front.is_stable();
                pass &= ok;
                details.push(format!(
                    "{name} n={n}: {} checks, {} points{}",
                    r.invariant_checks,
                    r.front.len(),
                    if ok { "" } else { " VIOLATION" }
                ));
            }
            Err(e) => {
                pass = false;
                details.push(format!("{name} n={n}: {e}"));
            }
        }
    }
    outcome(pass, details.join("; "))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let p = make_problem("MAN_1", 20).unwrap();
    let sigma = 0.05;
    let config = FdConfig {
        sigma: SigmaSchedule::Constant { sigma },
        eps_hv: 0.0,
        max_iterations: 150,
        ..FdConfig::default()
    };
    let r = match run(p.as_ref(), initial_points(p.as_ref(), 20).unwrap(), &config) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("run failed: {e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let settled = |rec: &front_descent::driver::IterationRecord| {
        rec.n_refinements == 0
            && rec.pct_sigma_stationary_in >= 100.0
            && rec.pct_exploration_sigma_stationary >= 100.0
    };
    let last = r.trace.last().unwrap().k;
    // smallest k̄ such that every record from k̄ on is settled
    let k_bar = r.trace[1..]
        .iter()
        .rev()
        .take_while(|rec| settled(rec))
        .last()
        .map(|rec| rec.k);
    let total_refinements: usize = r.trace.iter().map(|rec| rec.n_refinements).sum();
    match k_bar {
        Some(k) if k <= last && last == 150 && secs < 300.0 => outcome(
            true,
            format!(
                "k_bar = {k}, {} refinements before it, final |X| = {}, {secs:.1} s",
                total_refinements,
                r.front.len()
            ),
        ),
        _ => outcome(
            false,
            format!("no settled tail within {last} iterations (k_bar {k_bar:?}), {secs:.1} s"),
        ),
    }
}

/// Share of front points with coordinate spread ≤ 1e-3 and mean in [0, 2],
/// and the smallest stationarity value over the front.
fn jos_recovery(p: &dyn Problem, front: &FrontSet) -> (f64, f64) {
    let on_set = front
        .iter()
        .filter(|e| {
            let t = e.x.mean();
            e.x.max() - e.x.min() <= 1e-3 && (-1e-3..=2.0 + 1e-3).contains(&t)
        })
        .count();
    let theta = front
        .iter()
        .map(|e| common_steepest(&p.jacobian(&e.x)).unwrap().theta)
        .fold(f64::INFINITY, f64::min);
    (on_set as f64 / front.len() as f64, theta)
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let p = make_problem("JOS_1", 5).unwrap();
    let sigma = 1e-5;
    let config = FdConfig {
        sigma: SigmaSchedule::Constant { sigma },
        eps_hv: 1e-5,
        ..FdConfig::default()
    };
    let r = run(p.as_ref(), initial_points(p.as_ref(), 5).unwrap(), &config).unwrap();
    let (frac, theta) = jos_recovery(p.as_ref(), &r.front);
    let secs = start.elapsed().as_secs_f64();
    // not part of the verdict: σ-stationarity alone allows a spread of about (n/2)·√(2σ)
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let boxed = FrontSet::from_entries((0..20).map(|_| {
        let x = DVector::from_fn(5, |_, _| rng.random_range(-5.0..5.0));
        let fx = p.objectives(&x);
        FrontEntry::new(x, fx, Provenance::Initial)
    }));
    let other = run(p.as_ref(), boxed, &config).unwrap();
    let (other_frac, other_theta) = jos_recovery(p.as_ref(), &other.front);
    outcome(
        frac >= 0.99 && theta >= -2.0 * sigma && secs < 120.0,
        format!(
            "diagonal start: {:.1}% of {} points on the Pareto set, Theta = {theta:.2e}, {} iterations ({}), {secs:.2} s; \
             random box start (diagnostic): {:.1}% of {} points, Theta = {other_theta:.2e}",
            100.0 * frac,
            r.front.len(),
            r.trace.len() - 1,
            r.stop_reason,
            100.0 * other_frac,
            other.front.len(),
        ),
    )
}

fn criterion_9() -> Outcome {
    let p = make_problem("JOS_1", 20).unwrap();
    let mut rows = Vec::new();
    for eps in [1e-2, 1e-3, 5e-4] {
        let config = FdConfig {
            eps_hv: eps,
            ..FdConfig::default()
        };
        let start = Instant::now();
        let r = run(p.as_ref(), initial_points(p.as_ref(), 20).unwrap(), &config).unwrap();
        rows.push((
            eps,
            r.trace.last().unwrap().hypervolume_value,
            start.elapsed().as_secs_f64(),
            r.front.len(),
        ));
    }
    let hv_ok = rows.windows(2).all(|w| w[1].1 >= w[0].1);
    let time_ok = rows.windows(2).all(|w| w[1].2 >= w[0].2);
    let detail: Vec<String> = rows
        .iter()
        .map(|(e, hv, t, size)| format!("eps {e:e}: hv {hv:.6}, {t:.3} s, {size} points"))
        .collect();
    outcome(hv_ok && time_ok, detail.join("; "))
}

fn jos_start(p: &dyn Problem, rng: &mut ChaCha8Rng) -> FrontSet {
    let n = p.n();
    let mut points = Vec::new();
    for _ in 0..10 {
        points.push(DVector::from_fn(n, |_, _| rng.random_range(-5.0..5.0)));
    }
    for k in 0..10 {
        let t = rng.random_range(0.0..2.0);
        let scale = 10f64.powi(-(k % 5) - 1);
        points.push(DVector::from_fn(n, |_, _| {
            t + scale * rng.random_range(-1.0..1.0)
        }));
    }
    FrontSet::from_entries(points.into_iter().map(|x| {
        let fx = p.objectives(&x);
        FrontEntry::new(x, fx, Provenance::Initial)
    }))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut events = Vec::new();
    for n in [5, 10, 20] {
        let p = make_problem("JOS_1", n).unwrap();
        let config = FdConfig {
            variant: Variant::Newton { kappa: 1e-2 },
            sigma: SigmaSchedule::Constant { sigma: 1e-12 },
            max_iterations: 30,
            record_refinements: true,
            ..FdConfig::default()
        };
        let r = run(p.as_ref(), jos_start(p.as_ref(), &mut rng), &config).unwrap();
        events.extend(r.refinements);
    }
    let first_small = events.iter().position(|e| e.v_norm <= 1e-2);
    let tail = first_small.map_or(&events[..0], |i| &events[i..]);
    let violations = tail.iter().filter(|e| e.alpha != 1.0).count();
    let newton = events
        .iter()
        .filter(|e| e.kind == DirectionKind::Newton)
        .count();
    let small = events.iter().filter(|e| e.v_norm <= 1e-2).count();
    outcome(
        !tail.is_empty() && violations == 0,
        format!(
            "{} refinements ({newton} newton), {small} with |v| <= 1e-2, {violations} non-unit steps after the first of those",
            events.len()
        ),
    )
}

fn criterion_11() -> Outcome {
    let p = make_problem("JOS_1", 2).unwrap();
    let config = FdConfig::default();
    let r = run(p.as_ref(), initial_points(p.as_ref(), 2).unwrap(), &config).unwrap();
    let zeta = &r.reference_point;
    // area under the analytic front f2 = (√f1 − 2)² on [0, 4] is 8/3
    if zeta[0] < 4.0 || zeta[1] < 4.0 {
        return outcome(false, "reference point does not enclose the analytic front");
    }
    let v_star = zeta[0] * zeta[1] - 8.0 / 3.0;
    let v0 = r.trace[0].hypervolume_value;
    let eps = 1e-2;
    let bound = compute_iteration_bound(v_star, v0, &config, eps, 1.0, 2);
    let count = r.trace[1..]
        .iter()
        .filter(|rec| rec.theta_value <= -eps)
        .count();
    let hv_final = r.trace.last().unwrap().hypervolume_value;
    outcome(
        (count as f64) <= bound && hv_final <= v_star + 1e-9,
        format!(
            "{count} iterations with Theta <= -1e-2, bound {bound:.3e}, V* - V_final = {:.3e}",
            v_star - hv_final
        ),
    )
}

fn files_equal(a: &Path, b: &Path) -> bool {
    matches!((std::fs::read(a), std::fs::read(b)), (Ok(x), Ok(y)) if x == y)
}

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let make = |out: &str| ExperimentConfig {
        instances: vec![
            Instance::new("JOS_1", 5),
            Instance::new("MAN_1", 5),
            Instance::new("MOP_7", 2),
        ],
        variants: ["sd", "newton", "bb"]
            .iter()
            .map(|s| VariantSpec::Name(s.to_string()))
            .collect(),
        output_dir: dir.path().join(out),
        jobs: 3,
        fd: FdConfig {
            crowding: CrowdingMode::Candidate,
            ..FdConfig::default()
        },
        ..ExperimentConfig::default()
    };
    let (a, b) = (make("a"), make("b"));
    let (ma, mb) = match (cmd_run(&a), cmd_run(&b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return outcome(false, format!("run failed: {e}")),
    };
    let mut compared = 0;
    let mut differing = Vec::new();
    for (ra, rb) in ma.runs.iter().zip(&mb.runs) {
        for (fa, fb) in [(&ra.front, &rb.front), (&ra.trace, &rb.trace)] {
            match (fa, fb) {
                (Some(fa), Some(fb)) => {
                    compared += 1;
                    if !files_equal(&a.output_dir.join(fa), &b.output_dir.join(fb)) {
                        differing.push(fa.display().to_string());
                    }
                }
                _ => differing.push(format!("{} {} missing output", ra.problem, ra.solver)),
            }
        }
    }
    outcome(
        differing.is_empty() && compared == 18,
        format!("{compared} CSV pairs compared, differing: {differing:?}"),
    )
}

type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    // ignore libtest flags such as --nocapture
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let draws = direction_draws();
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "direction oracle equivalence",
            Box::new(|| criterion_1(&draws)),
        ),
        (
            2,
            "steepest-descent identities",
            Box::new(|| criterion_2(&draws)),
        ),
        (3, "SDR guarantees", Box::new(criterion_3)),
        (4, "hypervolume exactness", Box::new(criterion_4)),
        (5, "box-gain bound", Box::new(criterion_5)),
        (6, "front stability", Box::new(criterion_6)),
        (7, "finite refinement", Box::new(criterion_7)),
        (8, "analytic front recovery", Box::new(criterion_8)),
        (9, "eps_hv monotonicity", Box::new(criterion_9)),
        (10, "Newton unit steps", Box::new(criterion_10)),
        (11, "iteration-bound sanity", Box::new(criterion_11)),
        (12, "determinism", Box::new(criterion_12)),
    ];
    let mut failed = 0;
    for (id, name, check) in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| outcome(false, "panicked"));
        let tag = if result.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!result.pass);
        println!(
            "{tag} criterion {id:>2} {name}: {} [{:.1} s]",
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} criteria, {failed} failed", criteria.len());
    if failed > 0 && std::env::var_os("FD_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
