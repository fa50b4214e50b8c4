//! Neighbourhood-smoothing score.
//!
//! Columns of the `n × n` core are compared through the row-profile distance
//! `d(j, j') = (n(n−2))⁻¹ Σ_{ℓ ∉ {j, j'}} |⟨a_j − a_{j'}, a_ℓ⟩|`, and the score of
//! column `j` is a kernel-weighted sum of absolute response differences,
//! `S_j = Σ_{j' ≠ j} K_{h_j}(d(j, j')) |r_j − r_{j'}|`, where `r` is the new row.
//!
//! Every sum over indices is evaluated in a canonical order so that relabelling
//! the columns permutes the scores bit for bit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{FilledMatrix, Square};
use crate::sum::{canonical_sum, canonical_sum_iter, ceil_count};

/// Bandwidths below this are raised to it, so ties at distance zero still
/// receive full weight.
pub const MIN_BANDWIDTH: f64 = 1e-12;

/// Triangular kernel `max(1 − |u| / h, 0)`.
pub fn triangular_kernel(u: f64, h: f64) -> f64 {
    (1.0 - u.abs() / h).max(0.0)
}

/// `min(1, sqrt(ln n / n))`.
pub fn default_bandwidth_quantile(n: usize) -> f64 {
    let n = n as f64;
    libm::sqrt(libm::log(n) / n).min(1.0)
}

/// All pairwise column distances of a core block.
#[derive(Debug, Clone, PartialEq)]
pub struct Dissimilarities {
    n: usize,
    values: Vec<f64>,
}

impl Dissimilarities {
    pub fn from_core(core: &Square) -> Result<Self> {
        let n = core.order();
        if n < 3 {
            return Err(Error::OrderTooSmall(n));
        }
        let mut scratch = Vec::with_capacity(n);
        let mut gram = vec![0.0; n * n];
        for j in 0..n {
            for l in j..n {
                let g = canonical_sum_iter(
                    &mut scratch,
                    (0..n).map(|r| core.get(r, j) * core.get(r, l)),
                );
                gram[j * n + l] = g;
                gram[l * n + j] = g;
            }
        }
        let norm = (n * (n - 2)) as f64;
        let mut values = vec![0.0; n * n];
        for j in 0..n {
            for jp in (j + 1)..n {
                let s = canonical_sum_iter(
                    &mut scratch,
                    (0..n)
                        .filter(|&l| l != j && l != jp)
                        .map(|l| (gram[j * n + l] - gram[jp * n + l]).abs()),
                );
                values[j * n + jp] = s / norm;
                values[jp * n + j] = s / norm;
            }
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, jp: usize) -> f64 {
        self.values[j * self.n + jp]
    }

    /// The `⌈q(n−1)⌉`-th smallest distance from column `j` to the others,
    /// floored at [`MIN_BANDWIDTH`].
    pub fn bandwidth(&self, j: usize, q: f64) -> Result<f64> {
        check_quantile(q)?;
        if j >= self.n {
            return Err(Error::ColumnOutOfRange {
                index: j,
                n: self.n,
            });
        }
        let mut others: Vec<f64> = (0..self.n)
            .filter(|&k| k != j)
            .map(|k| self.get(j, k))
            .collect();
        others.sort_unstable_by(f64::total_cmp);
        let k = ceil_count(q, others.len()).max(1);
        Ok(others[k - 1].max(MIN_BANDWIDTH))
    }

    pub fn bandwidths(&self, q: f64) -> Result<Vec<f64>> {
        (0..self.n).map(|j| self.bandwidth(j, q)).collect()
    }
}

fn check_quantile(q: f64) -> Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability {
            name: "bandwidth quantile",
            value: q,
        })
    }
}

/// Distance between columns `j` and `jp` of `core`.
pub fn dissimilarity(core: &Square, j: usize, jp: usize) -> Result<f64> {
    let n = core.order();
    for idx in [j, jp] {
        if idx >= n {
            return Err(Error::ColumnOutOfRange { index: idx, n });
        }
    }
    Ok(Dissimilarities::from_core(core)?.get(j, jp))
}

/// `K_h(d(j, jp))` for `j ≠ jp`.
pub fn kernel_weight(core: &Square, j: usize, jp: usize, h: f64) -> Result<f64> {
    if j == jp {
        return Err(Error::SameColumn(j));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidBandwidth(h));
    }
    Ok(triangular_kernel(dissimilarity(core, j, jp)?, h))
}

/// Bandwidth of column `j` at quantile level `q`.
pub fn select_bandwidth(core: &Square, j: usize, q: f64) -> Result<f64> {
    Dissimilarities::from_core(core)?.bandwidth(j, q)
}

/// Kernel weights `w(j, j') = K_{h_j}(d(j, j'))` with the bandwidths that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct NsWeights {
    n: usize,
    weights: Vec<f64>,
    bandwidths: Vec<f64>,
}

impl NsWeights {
    pub fn new(dis: &Dissimilarities, bandwidths: &[f64]) -> Result<Self> {
        let n = dis.n();
        if bandwidths.len() != n {
            return Err(Error::BandwidthLength {
                expected: n,
                got: bandwidths.len(),
            });
        }
        if let Some(&h) = bandwidths.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidBandwidth(h));
        }
        let mut weights = vec![0.0; n * n];
        for j in 0..n {
            for jp in 0..n {
                if jp != j {
                    weights[j * n + jp] = triangular_kernel(dis.get(j, jp), bandwidths[j]);
                }
            }
        }
        Ok(Self {
            n,
            weights,
            bandwidths: bandwidths.to_vec(),
        })
    }

    /// Weights for `core`, with bandwidths from `override_bandwidths` or else
    /// selected at quantile `q` (default [`default_bandwidth_quantile`]).
    pub fn for_core(
        core: &Square,
        q: Option<f64>,
        override_bandwidths: Option<&[f64]>,
    ) -> Result<Self> {
        let dis = Dissimilarities::from_core(core)?;
        match override_bandwidths {
            Some(h) => Self::new(&dis, h),
            None => {
                let q = q.unwrap_or_else(|| default_bandwidth_quantile(dis.n()));
                Self::new(&dis, &dis.bandwidths(q)?)
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, jp: usize) -> f64 {
        self.weights[j * self.n + jp]
    }

    pub fn bandwidths(&self) -> &[f64] {
        &self.bandwidths
    }

    pub fn min_bandwidth(&self) -> f64 {
        self.bandwidths
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `S_j` for the response vector `r`.
    pub fn score(&self, r: &[f64], j: usize, scratch: &mut Vec<f64>) -> f64 {
        canonical_sum_iter(
            scratch,
            (0..self.n)
                .filter(|&k| k != j)
                .map(|k| self.get(j, k) * (r[j] - r[k]).abs()),
        )
    }

    /// Every `S_j` for the response vector `r`.
    pub fn scores(&self, r: &[f64], out: &mut [f64]) {
        let mut scratch = Vec::with_capacity(self.n);
        for (j, o) in out.iter_mut().enumerate().take(self.n) {
            *o = self.score(r, j, &mut scratch);
        }
    }
}

/// Score of column `j` of the new row of `f`, with bandwidths selected from
/// the core of `f` at quantile `q` unless given explicitly.
pub fn score_ns(
    f: &FilledMatrix,
    j: usize,
    q: Option<f64>,
    bandwidths: Option<&[f64]>,
) -> Result<f64> {
    let n = f.n();
    if j >= n {
        return Err(Error::ColumnOutOfRange { index: j, n });
    }
    let weights = NsWeights::for_core(&f.matrix().leading_block(n), q, bandwidths)?;
    let r = f.matrix().row(n)[..n].to_vec();
    Ok(weights.score(&r, j, &mut Vec::new()))
}

/// Scores as the target response varies, with everything that does not
/// involve the target column computed once.
#[derive(Debug, Clone)]
pub struct NsSweep {
    weights: NsWeights,
    responses: Vec<f64>,
    col: usize,
    base: Vec<f64>,
}

impl NsSweep {
    /// `responses` is the new row restricted to the first `n` columns; entry
    /// `col` is the one that varies.
    pub fn new(weights: NsWeights, responses: Vec<f64>, col: usize) -> Result<Self> {
        let n = weights.n();
        if responses.len() != n {
            return Err(Error::ShapeMismatch {
                order: n,
                expected: n,
                got: responses.len(),
            });
        }
        if col >= n {
            return Err(Error::ColumnOutOfRange { index: col, n });
        }
        let mut scratch = Vec::with_capacity(n);
        let base = (0..n)
            .map(|j| {
                if j == col {
                    return 0.0;
                }
                scratch.clear();
                scratch.extend(
                    (0..n)
                        .filter(|&k| k != j && k != col)
                        .map(|k| weights.get(j, k) * (responses[j] - responses[k]).abs()),
                );
                canonical_sum(&mut scratch)
            })
            .collect();
        Ok(Self {
            weights,
            responses,
            col,
            base,
        })
    }

    pub fn weights(&self) -> &NsWeights {
        &self.weights
    }

    /// Writes `S_j` at target response `z` into `out`, in `O(n)`.
    pub fn scores_at(&self, z: f64, out: &mut [f64]) {
        let b = self.col;
        let mut sb = 0.0;
        for (j, (o, &rj)) in out.iter_mut().zip(&self.responses).enumerate() {
            if j == b {
                continue;
            }
            *o = self.base[j] + self.weights.get(j, b) * (rj - z).abs();
            sb += self.weights.get(b, j) * (z - rj).abs();
        }
        out[b] = sb;
    }
}
