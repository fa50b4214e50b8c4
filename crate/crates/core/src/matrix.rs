//! Partially observed symmetric matrices.
//!
//! An [`ObservedMatrix`] of order `n + 1` carries the observed entries, a
//! symmetric missingness mask and the prediction target, canonically the
//! entry `(n + 1, n)` (zero-based `(n, n - 1)`). The target is tracked on its
//! own: its mask bit stays `0` and its value is never stored.
//!
//! Filling the missing slots with guesses yields a [`FilledMatrix`], and
//! [`FilledMatrix::set_target`] places a candidate value at the target.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Square {
    order: usize,
    data: Vec<f64>,
}

impl Square {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                data.push(f(i, j));
            }
        }
        Self { order, data }
    }

    pub fn from_row_major(order: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::ShapeMismatch {
                order,
                expected: order * order,
                got: data.len(),
            });
        }
        Ok(Self { order, data })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.order + j] = value;
    }

    /// Writes `value` at `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, value: f64) {
        self.set(i, j, value);
        self.set(j, i, value);
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.order).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Largest absolute entrywise difference; infinite when the orders differ.
    pub fn max_abs_diff(&self, other: &Square) -> f64 {
        if self.order != other.order {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// The top-left `k x k` block.
    pub fn leading_block(&self, k: usize) -> Square {
        Square::from_fn(k, |i, j| self.get(i, j))
    }

    /// Simultaneous row/column relabelling: `out(p(i), p(j)) = self(i, j)`.
    pub fn reindexed(&self, perm: &Permutation) -> Result<Square> {
        check_perm_len(perm, self.order)?;
        let mut out = Square::zeros(self.order);
        for i in 0..self.order {
            for j in 0..self.order {
                out.set(perm.apply(i), perm.apply(j), self.get(i, j));
            }
        }
        Ok(out)
    }
}

/// A bijection of `0..len`, stored as `forward[old] = new`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
}

impl Permutation {
    pub fn new(forward: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; forward.len()];
        for &p in &forward {
            if p >= forward.len() {
                return Err(Error::InvalidPermutation(format!(
                    "image {p} out of range for length {}",
                    forward.len()
                )));
            }
            if core::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation(format!("image {p} repeated")));
            }
        }
        Ok(Self { forward })
    }

    pub fn identity(len: usize) -> Self {
        Self {
            forward: (0..len).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.forward[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.forward.len()];
        for (old, &new) in self.forward.iter().enumerate() {
            inv[new] = old;
        }
        Self { forward: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Applies `self` first, then `next`.
    pub fn then(&self, next: &Permutation) -> Result<Self> {
        check_perm_len(next, self.len())?;
        Ok(Self {
            forward: self.forward.iter().map(|&p| next.apply(p)).collect(),
        })
    }

    /// Extends a permutation of `0..len` to `0..total`, fixing the new indices.
    pub fn extended(&self, total: usize) -> Self {
        let mut forward = self.forward.clone();
        forward.extend(self.forward.len()..total);
        Self { forward }
    }

    /// Exchanges the destinations `a` and `b`.
    fn swap_images(&mut self, a: usize, b: usize) {
        for p in &mut self.forward {
            if *p == a {
                *p = b;
            } else if *p == b {
                *p = a;
            }
        }
    }
}

fn check_perm_len(perm: &Permutation, len: usize) -> Result<()> {
    if perm.len() != len {
        return Err(Error::InvalidPermutation(format!(
            "length {} does not match {len}",
            perm.len()
        )));
    }
    Ok(())
}

/// Symmetric missingness indicator; `true` marks a missing entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    order: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn empty(order: usize) -> Self {
        Self {
            order,
            bits: vec![false; order * order],
        }
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                bits.push(f(i, j));
            }
        }
        Self { order, bits }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.order + j]
    }

    /// Marks the unordered pair `{i, j}` missing or observed.
    pub fn set_pair(&mut self, i: usize, j: usize, missing: bool) {
        self.bits[i * self.order + j] = missing;
        self.bits[j * self.order + i] = missing;
    }

    /// Off-diagonal missing count of row `i`.
    pub fn row_count(&self, i: usize) -> usize {
        (0..self.order)
            .filter(|&j| j != i && self.get(i, j))
            .count()
    }

    /// Number of missing unordered pairs, diagonal included.
    pub fn pair_count(&self) -> usize {
        (0..self.order)
            .map(|i| (i..self.order).filter(|&j| self.get(i, j)).count())
            .sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.order).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn reindexed(&self, perm: &Permutation) -> Result<Mask> {
        check_perm_len(perm, self.order)?;
        let mut out = Mask::empty(self.order);
        for i in 0..self.order {
            for j in 0..self.order {
                out.bits[perm.apply(i) * self.order + perm.apply(j)] = self.get(i, j);
            }
        }
        Ok(out)
    }
}

/// Canonical target `(n + 1, n)` in zero-based indices for a matrix of the given order.
#[inline]
pub fn canonical_target(order: usize) -> (usize, usize) {
    (order - 1, order - 2)
}

/// Observed entries, mask, entry bound and prediction target.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedMatrix {
    order: usize,
    values: Vec<Option<f64>>,
    mask: Mask,
    bound: f64,
    target: (usize, usize),
}

impl ObservedMatrix {
    /// Builds an observation with the canonical target from a value matrix and mask.
    ///
    /// Values at masked positions and at the target are discarded. A mask bit
    /// set on the target pair is cleared, since the target is tracked apart.
    pub fn new(values: &Square, mask: &Mask, bound: f64) -> Result<Self> {
        let order = values.order();
        if mask.order() != order {
            return Err(Error::OrderMismatch {
                expected: order,
                got: mask.order(),
            });
        }
        if order < 2 {
            return Err(Error::OrderTooSmall(order));
        }
        for i in 0..order {
            for j in 0..i {
                if mask.get(i, j) != mask.get(j, i) {
                    return Err(Error::AsymmetricMask { row: i, col: j });
                }
            }
        }
        let target = canonical_target(order);
        let entries = (0..order * order)
            .map(|k| {
                let (i, j) = (k / order, k % order);
                (!mask.get(i, j) && !is_pair(i, j, target)).then(|| values.get(i, j))
            })
            .collect();
        Self::from_entries(order, entries, bound, target)
    }

    /// Builds an observation from optional entries in row-major order.
    ///
    /// `None` marks a missing entry, except at `target`, whose value is dropped.
    pub fn from_entries(
        order: usize,
        mut entries: Vec<Option<f64>>,
        bound: f64,
        target: (usize, usize),
    ) -> Result<Self> {
        if order < 2 {
            return Err(Error::OrderTooSmall(order));
        }
        if entries.len() != order * order {
            return Err(Error::ShapeMismatch {
                order,
                expected: order * order,
                got: entries.len(),
            });
        }
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::InvalidBound(bound));
        }
        let (t0, t1) = target;
        if t0 >= order || t1 >= order {
            return Err(Error::IndexOutOfRange {
                row: t0,
                col: t1,
                order,
            });
        }
        if t0 == t1 {
            return Err(Error::DiagonalTarget(t0));
        }
        entries[t0 * order + t1] = None;
        entries[t1 * order + t0] = None;

        let mut mask = Mask::empty(order);
        for i in 0..order {
            for j in 0..=i {
                let a = entries[i * order + j];
                let b = entries[j * order + i];
                match (a, b) {
                    (Some(x), Some(y)) => {
                        if !x.is_finite() {
                            return Err(Error::NonFinite { row: i, col: j });
                        }
                        if x != y {
                            return Err(Error::Asymmetric { row: i, col: j });
                        }
                        if x.abs() > bound {
                            return Err(Error::BoundViolation {
                                row: i,
                                col: j,
                                value: x,
                                bound,
                            });
                        }
                    }
                    (None, None) => {
                        if !is_pair(i, j, target) {
                            mask.set_pair(i, j, true);
                        }
                    }
                    _ => return Err(Error::AsymmetricMask { row: i, col: j }),
                }
            }
        }
        Ok(Self {
            order,
            values: entries,
            mask,
            bound,
            target,
        })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of existing rows `n`; the new row is index `n`.
    #[inline]
    pub fn n(&self) -> usize {
        self.order - 1
    }

    #[inline]
    pub fn bound(&self) -> f64 {
        self.bound
    }

    #[inline]
    pub fn target(&self) -> (usize, usize) {
        self.target
    }

    pub fn is_canonical(&self) -> bool {
        self.target == canonical_target(self.order)
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    /// The observed value, or `None` if missing or the target.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.order + j]
    }

    /// True when any entry besides the target is missing.
    pub fn has_missing(&self) -> bool {
        self.mask.bits.iter().any(|&b| b)
    }

    /// Observed values of the upper triangle, diagonal included.
    pub fn observed_upper(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.order).flat_map(move |i| (i..self.order).filter_map(move |j| self.value(i, j)))
    }

    /// Relabels rows and columns by a permutation of all `n + 1` indices.
    pub fn reindex(&self, perm: &Permutation) -> Result<Self> {
        check_perm_len(perm, self.order)?;
        let mut entries = vec![None; self.order * self.order];
        for i in 0..self.order {
            for j in 0..self.order {
                entries[perm.apply(i) * self.order + perm.apply(j)] = self.value(i, j);
            }
        }
        let (t0, t1) = self.target;
        Self::from_entries(
            self.order,
            entries,
            self.bound,
            (perm.apply(t0), perm.apply(t1)),
        )
    }

    pub(crate) fn require_canonical(&self) -> Result<()> {
        if self.is_canonical() {
            Ok(())
        } else {
            Err(Error::NonCanonicalTarget {
                row: self.target.0,
                col: self.target.1,
            })
        }
    }
}

#[inline]
fn is_pair(i: usize, j: usize, target: (usize, usize)) -> bool {
    (i, j) == target || (j, i) == target
}

/// A fully populated symmetric matrix built from observations and guesses.
#[derive(Debug, Clone, PartialEq)]
pub struct FilledMatrix {
    matrix: Square,
    bound: f64,
    target: (usize, usize),
}

impl FilledMatrix {
    #[inline]
    pub fn matrix(&self) -> &Square {
        &self.matrix
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.matrix.order() - 1
    }

    #[inline]
    pub fn bound(&self) -> f64 {
        self.bound
    }

    #[inline]
    pub fn target(&self) -> (usize, usize) {
        self.target
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    /// Current value at the target.
    pub fn target_value(&self) -> f64 {
        self.matrix.get(self.target.0, self.target.1)
    }

    /// Copy with `z` written at both target positions.
    pub fn set_target(&self, z: f64) -> Result<FilledMatrix> {
        let mut out = self.clone();
        out.set_target_in_place(z)?;
        Ok(out)
    }

    pub(crate) fn set_target_in_place(&mut self, z: f64) -> Result<()> {
        if z.is_nan() || z.abs() > self.bound {
            return Err(Error::TargetOutOfRange {
                value: z,
                bound: self.bound,
            });
        }
        let (t0, t1) = self.target;
        self.matrix.set_sym(t0, t1, z);
        Ok(())
    }

    pub fn into_matrix(self) -> Square {
        self.matrix
    }
}

/// `A ∘ (1 − M) + Z ∘ M`, with the target slot also taken from `guess`.
pub fn fill_missing(obs: &ObservedMatrix, guess: &Square) -> Result<FilledMatrix> {
    let order = obs.order();
    if guess.order() != order {
        return Err(Error::OrderMismatch {
            expected: order,
            got: guess.order(),
        });
    }
    let mut matrix = Square::zeros(order);
    for i in 0..order {
        for j in 0..order {
            let v = match obs.value(i, j) {
                Some(v) => v,
                None => {
                    let g = guess.get(i, j);
                    if g != guess.get(j, i) {
                        return Err(Error::AsymmetricGuess { row: i, col: j });
                    }
                    if !g.is_finite() {
                        return Err(Error::NonFinite { row: i, col: j });
                    }
                    g
                }
            };
            matrix.set(i, j, v);
        }
    }
    Ok(FilledMatrix {
        matrix,
        bound: obs.bound(),
        target: obs.target(),
    })
}

/// Per-row missing counts.
#[derive(Debug, Clone, PartialEq)]
pub struct MissingnessSummary {
    /// `m_i` for every row `0..=n`, diagonal excluded.
    pub per_row: Vec<usize>,
    /// Mean of `m_i` over the first `n` rows.
    pub mean: f64,
    /// `m_{n+1}`, the count of the new row.
    pub target_row: usize,
}

impl MissingnessSummary {
    pub fn from_mask(mask: &Mask) -> Self {
        let order = mask.order();
        let per_row: Vec<usize> = (0..order).map(|i| mask.row_count(i)).collect();
        let n = order.saturating_sub(1);
        let mean = if n == 0 {
            0.0
        } else {
            per_row[..n].iter().sum::<usize>() as f64 / n as f64
        };
        let target_row = per_row.last().copied().unwrap_or(0);
        Self {
            per_row,
            mean,
            target_row,
        }
    }
}

pub fn missing_counts(obs: &ObservedMatrix) -> MissingnessSummary {
    MissingnessSummary::from_mask(obs.mask())
}

/// Reorders the first `n` rows and columns by `perm`, keeping the new row fixed.
pub fn permute(obs: &ObservedMatrix, perm: &Permutation) -> Result<ObservedMatrix> {
    check_perm_len(perm, obs.n())?;
    obs.reindex(&perm.extended(obs.order()))
}

/// Moves entry `(i0, j0)` to the canonical target position.
///
/// Returns the relabelled observation and the permutation applied to all
/// `n + 1` indices; reindexing by its inverse restores the original layout.
/// A previously designated target elsewhere becomes an ordinary missing entry.
pub fn relabel_target(
    obs: &ObservedMatrix,
    i0: usize,
    j0: usize,
) -> Result<(ObservedMatrix, Permutation)> {
    let order = obs.order();
    if i0 >= order || j0 >= order {
        return Err(Error::IndexOutOfRange {
            row: i0,
            col: j0,
            order,
        });
    }
    if i0 == j0 {
        return Err(Error::DiagonalTarget(i0));
    }
    let (last, second) = canonical_target(order);
    let mut perm = Permutation::identity(order);
    perm.swap_images(perm.apply(i0), last);
    perm.swap_images(perm.apply(j0), second);

    let mut entries = vec![None; order * order];
    for i in 0..order {
        for j in 0..order {
            entries[perm.apply(i) * order + perm.apply(j)] = obs.value(i, j);
        }
    }
    let relabelled = ObservedMatrix::from_entries(order, entries, obs.bound(), (last, second))?;
    Ok((relabelled, perm))
}
