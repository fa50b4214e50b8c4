use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Equally spaced candidate values on `[−C0, C0]`, endpoints included.
///
/// Where an accepted point neighbours a rejected one, the change of verdict
/// is located by `refine_steps` bisections and the set ends at the middle of
/// the last bracket. With no bisection that middle is half a spacing from the
/// accepted point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    bound: f64,
    points: usize,
    refine_steps: u32,
}

impl Grid {
    pub const DEFAULT_POINTS: usize = 401;
    pub const DEFAULT_REFINE_STEPS: u32 = 10;
    /// Beyond this many halvings the bracket is below double precision for
    /// any sensible grid.
    pub const MAX_REFINE_STEPS: u32 = 60;

    pub fn new(bound: f64, points: usize) -> Result<Self> {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::InvalidBound(bound));
        }
        if points < 2 {
            return Err(Error::InvalidGrid(points));
        }
        Ok(Self {
            bound,
            points,
            refine_steps: Self::DEFAULT_REFINE_STEPS,
        })
    }

    /// Same points with a different number of boundary bisections, capped at
    /// [`Self::MAX_REFINE_STEPS`].
    pub fn with_refine_steps(self, steps: u32) -> Self {
        Self {
            refine_steps: steps.min(Self::MAX_REFINE_STEPS),
            ..self
        }
    }

    pub fn refine_steps(&self) -> u32 {
        self.refine_steps
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance between neighbouring points.
    pub fn spacing(&self) -> f64 {
        2.0 * self.bound / (self.points - 1) as f64
    }

    /// The `k`-th point; exactly `−C0` at 0, `C0` at the end, and mirrored
    /// exactly about zero.
    pub fn value(&self, k: usize) -> f64 {
        let last = (self.points - 1) as f64;
        self.bound * ((2.0 * k as f64 - last) / last)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|k| self.value(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Sorted, disjoint closed intervals inside `[−C0, C0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    bound: f64,
    intervals: Vec<Interval>,
}

impl PredictionSet {
    pub fn empty(bound: f64) -> Self {
        Self {
            bound,
            intervals: Vec::new(),
        }
    }

    pub fn full(bound: f64) -> Self {
        Self {
            bound,
            intervals: alloc::vec![Interval {
                lo: -bound,
                hi: bound,
            }],
        }
    }

    /// Each accepted grid point covers half a spacing on either side, clipped
    /// to the bound; runs of accepted points become one interval.
    pub fn from_accepted(grid: &Grid, accepted: &[bool]) -> Self {
        debug_assert_eq!(accepted.len(), grid.len());
        let half = 0.5 * grid.spacing();
        let b = grid.bound();
        let mut intervals = Vec::new();
        let mut k = 0;
        while k < accepted.len() {
            if !accepted[k] {
                k += 1;
                continue;
            }
            let start = k;
            while k + 1 < accepted.len() && accepted[k + 1] {
                k += 1;
            }
            intervals.push(Interval {
                lo: (grid.value(start) - half).max(-b),
                hi: (grid.value(k) + half).min(b),
            });
            k += 1;
        }
        Self {
            bound: b,
            intervals,
        }
    }

    /// Like [`Self::from_accepted`], but each end next to a rejected point is
    /// moved to the middle of the bracket left after `grid.refine_steps()`
    /// bisections with `test`. Ends at `±C0` stay put.
    pub fn from_accepted_refined(
        grid: &Grid,
        accepted: &[bool],
        mut test: impl FnMut(f64) -> Result<bool>,
    ) -> Result<Self> {
        debug_assert_eq!(accepted.len(), grid.len());
        let steps = grid.refine_steps();
        if steps == 0 {
            return Ok(Self::from_accepted(grid, accepted));
        }
        let mut boundary = |mut outside: f64, mut inside: f64| -> Result<f64> {
            for _ in 0..steps {
                let mid = 0.5 * (outside + inside);
                if test(mid)? {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            Ok(0.5 * (outside + inside))
        };
        let last = accepted.len() - 1;
        let mut intervals = Vec::new();
        let mut k = 0;
        while k <= last {
            if !accepted[k] {
                k += 1;
                continue;
            }
            let start = k;
            while k < last && accepted[k + 1] {
                k += 1;
            }
            let lo = if start == 0 {
                grid.value(0)
            } else {
                boundary(grid.value(start - 1), grid.value(start))?
            };
            let hi = if k == last {
                grid.value(last)
            } else {
                boundary(grid.value(k + 1), grid.value(k))?
            };
            intervals.push(Interval { lo, hi });
            k += 1;
        }
        Ok(Self::from_intervals(grid.bound(), intervals))
    }

    /// Builds a set from arbitrary intervals, clipping to the bound and
    /// merging overlaps. Intervals with `lo > hi` are dropped.
    pub fn from_intervals(bound: f64, intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut list: Vec<Interval> = intervals
            .into_iter()
            .map(|iv| Interval {
                lo: iv.lo.max(-bound),
                hi: iv.hi.min(bound),
            })
            .filter(|iv| iv.lo <= iv.hi)
            .collect();
        list.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(list.len());
        for iv in list {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        Self {
            bound,
            intervals: merged,
        }
    }

    pub fn union(&self, other: &PredictionSet) -> PredictionSet {
        Self::from_intervals(
            self.bound.max(other.bound),
            self.intervals.iter().chain(&other.intervals).copied(),
        )
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    /// Lebesgue measure of the union.
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    /// Length of the smallest interval containing the set.
    pub fn hull_length(&self) -> f64 {
        match (self.intervals.first(), self.intervals.last()) {
            (Some(first), Some(last)) => last.hi - first.lo,
            _ => 0.0,
        }
    }

    /// True when the set is exactly `[−C0, C0]`.
    pub fn is_trivial(&self) -> bool {
        matches!(self.intervals.as_slice(), [iv] if iv.lo == -self.bound && iv.hi == self.bound)
    }

    /// True when every point of `other` lies in `self`.
    pub fn is_superset_of(&self, other: &PredictionSet) -> bool {
        other
            .intervals
            .iter()
            .all(|o| self.intervals.iter().any(|s| s.lo <= o.lo && o.hi <= s.hi))
    }
}
