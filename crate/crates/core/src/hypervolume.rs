//! Exact hypervolume for two and three objectives, a Monte Carlo estimator
//! and reference-point helpers.
//!
//! The hypervolume of a set of images `Y` with respect to a reference point
//! `ζ` is the Lebesgue measure of `Λ(Y) = {y : F ≤ y ≤ ζ for some F ∈ Y}`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dominance::dominates;
use crate::error::{contract, FdError, Result};

/// Anything that can be viewed as an objective vector.
pub trait AsImage {
    fn image(&self) -> &[f64];
}

impl AsImage for DVector<f64> {
    fn image(&self) -> &[f64] {
        self.as_slice()
    }
}

impl AsImage for Vec<f64> {
    fn image(&self) -> &[f64] {
        self
    }
}

impl AsImage for &[f64] {
    fn image(&self) -> &[f64] {
        self
    }
}

impl<const N: usize> AsImage for [f64; N] {
    fn image(&self) -> &[f64] {
        self
    }
}

/// Offset added to the componentwise maximum when comparing solvers.
pub const CROSS_SOLVER_OFFSET: f64 = 0.01;

/// `ζ_i = max_k F_k,i + offset` over every image of every solver.
pub fn reference_point_cross_solver<T: AsImage>(images: &[T], offset: f64) -> Result<Vec<f64>> {
    if !(offset >= 0.0) {
        return Err(contract("reference point offset must be nonnegative"));
    }
    let first = images
        .first()
        .ok_or_else(|| contract("reference point needs at least one image"))?;
    let m = first.image().len();
    let mut zeta = vec![f64::NEG_INFINITY; m];
    for img in images {
        let img = img.image();
        if img.len() != m {
            return Err(FdError::Dimension {
                expected: m,
                got: img.len(),
            });
        }
        for (z, v) in zeta.iter_mut().zip(img) {
            *z = z.max(*v);
        }
    }
    Ok(zeta.into_iter().map(|z| z + offset).collect())
}

/// Reference point for a single run: the componentwise maximum of `images`
/// pushed out by `fraction` of each objective's range. A zero range falls
/// back to `fraction · max(|max|, 1)`.
pub fn reference_point_with_margin<T: AsImage>(images: &[T], fraction: f64) -> Result<Vec<f64>> {
    let first = images
        .first()
        .ok_or_else(|| contract("reference point needs at least one image"))?;
    let m = first.image().len();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for img in images {
        for (j, v) in img.image().iter().enumerate() {
            lo[j] = lo[j].min(*v);
            hi[j] = hi[j].max(*v);
        }
    }
    Ok((0..m)
        .map(|j| {
            let range = hi[j] - lo[j];
            let margin = if range > 0.0 {
                fraction * range
            } else {
                fraction * hi[j].abs().max(1.0)
            };
            hi[j] + margin
        })
        .collect())
}

fn check<T: AsImage>(images: &[T], zeta: &[f64], m: usize) -> Result<()> {
    if zeta.len() != m {
        return Err(FdError::Dimension {
            expected: m,
            got: zeta.len(),
        });
    }
    for img in images {
        let img = img.image();
        if img.len() != m {
            return Err(FdError::Dimension {
                expected: m,
                got: img.len(),
            });
        }
        if img.iter().zip(zeta).any(|(v, z)| !(v <= z)) {
            return Err(contract(format!(
                "image {img:?} exceeds the reference point {zeta:?}"
            )));
        }
    }
    Ok(())
}

/// Area of the union of boxes `[a, ζ1] × [b, ζ2]`, `points` sorted by `a`.
fn sweep_2d(points: &[(f64, f64)], zeta: (f64, f64)) -> f64 {
    let mut area = 0.0;
    let mut level = zeta.1;
    for &(a, b) in points {
        if b < level {
            area += (zeta.0 - a) * (level - b);
            level = b;
        }
    }
    area
}

fn sorted_pairs<T: AsImage>(images: &[T]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = images
        .iter()
        .map(|i| (i.image()[0], i.image()[1]))
        .collect();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    pts.dedup();
    pts
}

/// Exact area for two objectives. Every image must satisfy `F ≤ ζ`.
pub fn hypervolume_2d<T: AsImage>(images: &[T], zeta: &[f64]) -> Result<f64> {
    check(images, zeta, 2)?;
    Ok(sweep_2d(&sorted_pairs(images), (zeta[0], zeta[1])))
}

/// Exact volume for three objectives by slicing along `f_3`.
pub fn hypervolume_3d<T: AsImage>(images: &[T], zeta: &[f64]) -> Result<f64> {
    check(images, zeta, 3)?;
    let mut pts: Vec<[f64; 3]> = images
        .iter()
        .map(|i| [i.image()[0], i.image()[1], i.image()[2]])
        .collect();
    pts.sort_by(|p, q| {
        p[2].total_cmp(&q[2])
            .then(p[0].total_cmp(&q[0]))
            .then(p[1].total_cmp(&q[1]))
    });
    pts.dedup();

    let mut active: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    let mut volume = 0.0;
    let mut i = 0;
    while i < pts.len() {
        let level = pts[i][2];
        while i < pts.len() && pts[i][2] == level {
            let p = (pts[i][0], pts[i][1]);
            // the slab staircase only needs its own nondominated points
            if !active.iter().any(|q| q.0 <= p.0 && q.1 <= p.1) {
                active.retain(|q| !(p.0 <= q.0 && p.1 <= q.1));
                let at = active.partition_point(|q| q.0 < p.0);
                active.insert(at, p);
            }
            i += 1;
        }
        let next = if i < pts.len() { pts[i][2] } else { zeta[2] };
        volume += sweep_2d(&active, (zeta[0], zeta[1])) * (next - level);
    }
    Ok(volume)
}

/// Exact hypervolume for `m ∈ {2, 3}`; images must be dominated by `ζ`.
pub fn hypervolume<T: AsImage>(images: &[T], zeta: &[f64]) -> Result<f64> {
    match zeta.len() {
        2 => hypervolume_2d(images, zeta),
        3 => hypervolume_3d(images, zeta),
        m => Err(contract(format!(
            "exact hypervolume supports 2 or 3 objectives, got {m}"
        ))),
    }
}

/// Hypervolume of `Λ(Y)` where images not below `ζ` contribute nothing, as
/// the definition implies.
pub fn dominated_volume<T: AsImage>(images: &[T], zeta: &[f64]) -> Result<f64> {
    let inside: Vec<&[f64]> = images
        .iter()
        .map(|i| i.image())
        .filter(|img| img.len() == zeta.len() && img.iter().zip(zeta).all(|(v, z)| v <= z))
        .collect();
    hypervolume(&inside, zeta)
}

/// Monte Carlo estimate of the hypervolume by uniform sampling in
/// `[ideal, ζ]`. Returns the estimate and its binomial standard error.
pub fn hv_monte_carlo<T: AsImage>(
    images: &[T],
    zeta: &[f64],
    ideal: &[f64],
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    if images.is_empty() || samples == 0 {
        return (0.0, 0.0);
    }
    let front: Vec<&[f64]> = {
        let all: Vec<&[f64]> = images.iter().map(|i| i.image()).collect();
        all.iter()
            .copied()
            .filter(|a| !all.iter().any(|b| dominates(b, a)))
            .collect()
    };
    let m = zeta.len();
    let box_volume: f64 = (0..m).map(|j| zeta[j] - ideal[j]).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = vec![0.0; m];
    let mut hits = 0usize;
    for _ in 0..samples {
        for j in 0..m {
            u[j] = ideal[j] + rng.random::<f64>() * (zeta[j] - ideal[j]);
        }
        if front.iter().any(|f| f.iter().zip(&u).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (
        p * box_volume,
        box_volume * (p * (1.0 - p) / samples as f64).sqrt(),
    )
}

/// `Π_j (old_j − new_j)`: a lower bound on the hypervolume gained when `new`
/// replaces `old` and `new < old` strictly.
pub fn box_gain_lower_bound(old: &[f64], new: &[f64]) -> Result<f64> {
    if old.len() != new.len() {
        return Err(FdError::Dimension {
            expected: old.len(),
            got: new.len(),
        });
    }
    if !new.iter().zip(old).all(|(n, o)| n < o) {
        return Err(contract("box gain needs strict componentwise domination"));
    }
    Ok(old.iter().zip(new).map(|(o, n)| o - n).product())
}
