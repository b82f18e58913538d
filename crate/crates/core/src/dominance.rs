//! Pareto dominance and the mutually nondominated solution set.

use std::fmt;

use crate::error::{FdError, Result};
use crate::problem::{DecisionVector, Jacobian, ObjectiveVector};

/// Outcome of comparing two images `u` and `v` under the componentwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// `u < v` in every component.
    DominatesStrictly,
    /// `u ≤ v` and `u ≠ v`, with at least one tie.
    Dominates,
    Equal,
    Incomparable,
    /// `v` dominates `u` (strictly or not).
    Dominated,
}

/// Classifies `u` against `v`.
pub fn compare(u: &[f64], v: &[f64]) -> Result<Dominance> {
    if u.len() != v.len() {
        return Err(FdError::Dimension {
            expected: u.len(),
            got: v.len(),
        });
    }
    let (mut less, mut greater, mut equal) = (0usize, 0usize, 0usize);
    for (a, b) in u.iter().zip(v) {
        if a < b {
            less += 1;
        } else if a > b {
            greater += 1;
        } else {
            equal += 1;
        }
    }
    Ok(match (less, greater, equal) {
        (_, 0, 0) => Dominance::DominatesStrictly,
        (0, 0, _) => Dominance::Equal,
        (_, 0, _) => Dominance::Dominates,
        (0, _, _) => Dominance::Dominated,
        _ => Dominance::Incomparable,
    })
}

/// `u ⪇ v`: `u ≤ v` componentwise and `u ≠ v`.
#[inline]
pub fn dominates(u: &[f64], v: &[f64]) -> bool {
    let mut strict = false;
    for (a, b) in u.iter().zip(v) {
        if a > b {
            return false;
        }
        strict |= a < b;
    }
    strict
}

/// `u ≤ v` componentwise (dominates or equal).
#[inline]
pub fn weakly_dominates(u: &[f64], v: &[f64]) -> bool {
    u.iter().zip(v).all(|(a, b)| a <= b)
}

/// Where a front member came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Provenance {
    Initial,
    Refinement,
    /// Exploration along the partial direction of the listed objectives (0-based).
    Exploration(Vec<usize>),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Initial => f.write_str("initial"),
            Provenance::Refinement => f.write_str("refinement"),
            Provenance::Exploration(subset) => {
                let parts: Vec<String> = subset.iter().map(|j| (j + 1).to_string()).collect();
                write!(f, "exploration{{{}}}", parts.join(","))
            }
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = FdError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || FdError::Format {
            path: String::new(),
            reason: format!("bad provenance `{s}`"),
        };
        match s {
            "initial" => Ok(Provenance::Initial),
            "refinement" => Ok(Provenance::Refinement),
            _ => {
                let inner = s
                    .strip_prefix("exploration{")
                    .and_then(|r| r.strip_suffix('}'))
                    .ok_or_else(bad)?;
                let subset = inner
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<usize>()
                            .ok()
                            .filter(|&j| j >= 1)
                            .map(|j| j - 1)
                    })
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(bad)?;
                Ok(Provenance::Exploration(subset))
            }
        }
    }
}

/// Solver-side state carried along with an entry. Never serialized.
#[derive(Debug, Clone, Default)]
pub(crate) struct EntryCache {
    pub jacobian: Option<Jacobian>,
    /// Point and Jacobian of the refinement parent, for Barzilai-Borwein scalars.
    pub parent: Option<(DecisionVector, Jacobian)>,
}

/// A member of the solution set.
#[derive(Debug, Clone)]
pub struct FrontEntry {
    /// Insertion index; assigned by [`FrontSet`], strictly increasing.
    pub id: u64,
    pub x: DecisionVector,
    pub fx: ObjectiveVector,
    pub cached_theta: Option<f64>,
    pub cached_v_norm: Option<f64>,
    pub provenance: Provenance,
    pub(crate) cache: EntryCache,
}

impl FrontEntry {
    pub fn new(x: DecisionVector, fx: ObjectiveVector, provenance: Provenance) -> Self {
        Self {
            id: 0,
            x,
            fx,
            cached_theta: None,
            cached_v_norm: None,
            provenance,
            cache: EntryCache::default(),
        }
    }
}

/// Result of [`FrontSet::insert_filter`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insertion {
    /// Appended with the given id after removing `removed` dominated entries.
    Inserted { id: u64, removed: usize },
    /// Dominated by, or equal to, an incumbent; the set is unchanged.
    Rejected,
}

/// Ordered collection of mutually nondominated points.
#[derive(Debug, Clone)]
pub struct FrontSet {
    entries: Vec<FrontEntry>,
    next_id: u64,
    /// Bi-objective images sorted by `f1`; `f2` is then strictly decreasing.
    /// `None` once any image has another length.
    plane: Option<Vec<(f64, f64)>>,
}

impl Default for FrontSet {
    fn default() -> Self {
        Self::new()
    }
}

impl FrontSet {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
            next_id: 0,
            plane: Some(Vec::new()),
        }
    }

    /// Builds a set by inserting `entries` one after another through
    /// [`FrontSet::insert_filter`], so the result is always stable.
    pub fn from_entries(entries: impl IntoIterator<Item = FrontEntry>) -> Self {
        let mut set = Self::new();
        for e in entries {
            set.insert_filter(e);
        }
        set
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FrontEntry] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FrontEntry> {
        self.entries.iter()
    }

    pub fn images(&self) -> Vec<ObjectiveVector> {
        self.entries.iter().map(|e| e.fx.clone()).collect()
    }

    pub fn position(&self, id: u64) -> Option<usize> {
        // ids are increasing along the vector
        self.entries.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.position(id).is_some()
    }

    pub fn get(&self, id: u64) -> Option<&FrontEntry> {
        self.position(id).map(|i| &self.entries[i])
    }

    pub(crate) fn get_mut(&mut self, id: u64) -> Option<&mut FrontEntry> {
        self.position(id).map(move |i| &mut self.entries[i])
    }

    /// Removes every entry whose image is dominated by `z`'s and appends `z`.
    ///
    /// A candidate dominated by, or equal to, an incumbent is rejected and the
    /// set is left untouched, which keeps stability a hard invariant.
    pub fn insert_filter(&mut self, mut z: FrontEntry) -> Insertion {
        if self.weakly_dominated(z.fx.as_slice()) {
            return Insertion::Rejected;
        }
        let before = self.entries.len();
        self.entries
            .retain(|y| !dominates(z.fx.as_slice(), y.fx.as_slice()));
        let removed = before - self.entries.len();
        match (&mut self.plane, z.fx.len()) {
            (Some(plane), 2) => {
                let (z1, z2) = (z.fx[0], z.fx[1]);
                let start = plane.partition_point(|p| p.0 < z1);
                let end = start + plane[start..].iter().take_while(|p| p.1 >= z2).count();
                plane.splice(start..end, [(z1, z2)]);
            }
            (plane, _) => *plane = None,
        }
        z.id = self.next_id;
        self.next_id += 1;
        let id = z.id;
        self.entries.push(z);
        Insertion::Inserted { id, removed }
    }

    /// True iff some member's image is componentwise `≤ f`.
    pub fn weakly_dominated(&self, f: &[f64]) -> bool {
        match &self.plane {
            Some(plane) if f.len() == 2 => {
                let idx = plane.partition_point(|p| p.0 <= f[0]);
                idx > 0 && plane[idx - 1].1 <= f[1]
            }
            _ => self
                .entries
                .iter()
                .any(|y| weakly_dominates(y.fx.as_slice(), f)),
        }
    }

    /// True iff `f` dominates some member's image.
    pub fn dominates_any(&self, f: &[f64]) -> bool {
        match &self.plane {
            Some(plane) if f.len() == 2 => {
                let idx = plane.partition_point(|p| p.0 < f[0]);
                idx < plane.len() && dominates(f, &[plane[idx].0, plane[idx].1])
            }
            _ => self.entries.iter().any(|y| dominates(f, y.fx.as_slice())),
        }
    }

    /// True iff some member's image is within `gap` of `f` in every component.
    pub fn has_near(&self, f: &[f64], gap: &[f64]) -> bool {
        let close = |y: &[f64]| {
            y.iter()
                .zip(f)
                .zip(gap)
                .all(|((a, b), g)| (a - b).abs() <= *g)
        };
        match &self.plane {
            Some(plane) if f.len() == 2 => {
                let start = plane.partition_point(|p| p.0 < f[0] - gap[0]);
                plane[start..]
                    .iter()
                    .take_while(|p| p.0 <= f[0] + gap[0])
                    .any(|p| close(&[p.0, p.1]))
            }
            _ => self.entries.iter().any(|y| close(y.fx.as_slice())),
        }
    }

    /// Per-objective `max − min` over the images; zeros when empty.
    pub fn image_range(&self) -> Vec<f64> {
        let Some(first) = self.entries.first() else {
            return Vec::new();
        };
        let mut lo = first.fx.clone();
        let mut hi = first.fx.clone();
        for e in &self.entries[1..] {
            lo = lo.inf(&e.fx);
            hi = hi.sup(&e.fx);
        }
        (hi - lo).iter().copied().collect()
    }

    /// True iff no image dominates another.
    pub fn is_stable(&self) -> bool {
        is_stable_images(self.entries.iter().map(|e| e.fx.as_slice()))
    }

    /// Drops entries whose image lies within `gap` (componentwise, i.e. the
    /// weighted infinity norm) of an already retained entry.
    ///
    /// Entries attaining the minimum of some objective are retained first and
    /// never removed; the rest are scanned in insertion order.
    pub fn crowding_prune(&self, gap: &[f64]) -> FrontSet {
        if self.entries.len() <= 2 || gap.iter().all(|&g| g <= 0.0) {
            return self.clone();
        }
        let m = gap.len();
        let mut boundary = vec![false; self.entries.len()];
        for j in 0..m {
            let mut best = 0;
            for (i, e) in self.entries.iter().enumerate() {
                if e.fx[j] < self.entries[best].fx[j] {
                    best = i;
                }
            }
            boundary[best] = true;
        }
        let close =
            |a: &FrontEntry, b: &FrontEntry| (0..m).all(|j| (a.fx[j] - b.fx[j]).abs() <= gap[j]);
        let mut kept: Vec<usize> = (0..self.entries.len()).filter(|&i| boundary[i]).collect();
        for (i, e) in self.entries.iter().enumerate() {
            if boundary[i] {
                continue;
            }
            if !kept.iter().any(|&k| close(e, &self.entries[k])) {
                kept.push(i);
            }
        }
        kept.sort_unstable();
        let entries: Vec<FrontEntry> = kept.into_iter().map(|i| self.entries[i].clone()).collect();
        let plane = self.plane.as_ref().map(|_| {
            let mut p: Vec<(f64, f64)> = entries.iter().map(|e| (e.fx[0], e.fx[1])).collect();
            p.sort_by(|a, b| a.0.total_cmp(&b.0));
            p
        });
        FrontSet {
            entries,
            next_id: self.next_id,
            plane,
        }
    }
}

/// Stability of a set of images.
pub fn is_stable_images<'a>(images: impl IntoIterator<Item = &'a [f64]>) -> bool {
    let mut images: Vec<&[f64]> = images.into_iter().collect();
    if images
        .iter()
        .all(|y| y.len() == 2 && y.iter().all(|v| !v.is_nan()))
    {
        // sorted by f1 then f2, a stable set has f2 strictly decreasing
        // between distinct neighbours
        images.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        return images
            .windows(2)
            .all(|w| w[0] == w[1] || (w[0][0] < w[1][0] && w[0][1] > w[1][1]));
    }
    stable_by_scan(&images)
}

fn stable_by_scan(images: &[&[f64]]) -> bool {
    for (i, a) in images.iter().enumerate() {
        for b in &images[i + 1..] {
            if dominates(a, b) || dominates(b, a) {
                return false;
            }
        }
    }
    true
}
