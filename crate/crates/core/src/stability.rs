//! Worst-case sensitivity of the neighbourhood-smoothing scores to the values
//! placed in missing entries.
//!
//! For every column `j`, `τ_j` bounds `|S_j(Ã(Z; z)) − S_j(Ã(Z'; z))|` over any
//! two guesses `Z, Z'` bounded by `C0`:
//!
//! ```text
//! τ_j = min{ 4 L C0³ / h · (m_j + 3 m̄), 2 C0 W }
//!     + 2 K C0 · ((n − 2) · M(n+1, j) + m_{n+1})
//! ```
//!
//! where `L` is the kernel's Lipschitz constant, `K` its supremum, `W` a bound
//! on the total kernel weight `Σ_{j'≠j} K_h(d(j, j'))` of one column, `h` the
//! smallest bandwidth, `m_j` the missing count of row `j` (diagonal excluded),
//! `m̄` the mean count over the first `n` rows and `M(n+1, j)` the mask bit
//! between the new row and column `j`. The target entry is not counted as
//! missing.
//!
//! The second argument of the minimum bounds the part of the change that comes
//! from the weights moving: each of the `n − 1` weights can move by up to `K`
//! against a response gap of at most `2 C0`. So `W` defaults to `(n − 1) K`.
//! Taking `W = K` makes the bound fail on ordinary data.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{missing_counts, ObservedMatrix};
use crate::sum::ceil_count;

/// Constants of the smoothing kernel entering the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConstants {
    /// Lipschitz constant of the unit-bandwidth kernel.
    pub lipschitz: f64,
    /// Supremum of the kernel.
    pub kernel_sup: f64,
    /// Bound on one column's total kernel weight; `None` means `(n − 1) · kernel_sup`.
    pub weight_mass: Option<f64>,
}

impl Default for StabilityConstants {
    /// Values for the triangular kernel.
    fn default() -> Self {
        Self {
            lipschitz: 1.0,
            kernel_sup: 1.0,
            weight_mass: None,
        }
    }
}

/// Per-column slack `τ_0, …, τ_{n−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityBounds(Vec<f64>);

impl StabilityBounds {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `τ_j` for every column, given the smallest bandwidth `h` and bound `c0`.
pub fn tau_bounds(
    obs: &ObservedMatrix,
    h: f64,
    c0: f64,
    consts: StabilityConstants,
) -> Result<StabilityBounds> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidBandwidth(h));
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::InvalidBound(c0));
    }
    obs.require_canonical()?;
    let n = obs.n();
    let counts = missing_counts(obs);
    let last = obs.order() - 1;
    let StabilityConstants {
        lipschitz,
        kernel_sup,
        weight_mass,
    } = consts;
    let mass = weight_mass.unwrap_or(n.saturating_sub(1) as f64 * kernel_sup);
    let cap = 2.0 * c0 * mass;
    let smooth = 4.0 * lipschitz * c0 * c0 * c0 / h;
    let others = n.saturating_sub(2) as f64;
    let values = (0..n)
        .map(|j| {
            let local = (smooth * (counts.per_row[j] as f64 + 3.0 * counts.mean)).min(cap);
            let link = if obs.mask().get(last, j) { others } else { 0.0 };
            local + 2.0 * kernel_sup * c0 * (link + counts.target_row as f64)
        })
        .collect();
    Ok(StabilityBounds(values))
}

/// True when the new row has at least `⌈αn⌉` missing entries.
///
/// The slack then exceeds the score spread at enough columns that the
/// stability-adjusted set covers the whole range in practice.
pub fn is_trivial_forced(obs: &ObservedMatrix, alpha: f64) -> bool {
    missing_counts(obs).target_row >= ceil_count(alpha, obs.n())
}
