//! Singular-value-thresholded reconstruction and the residual score built on it.
//!
//! For a symmetric input the singular values are the absolute eigenvalues and
//! the retained part of `U S Vᵀ` equals `Σ_{|λ_k| > t} λ_k u_k u_kᵀ`, so the
//! dense route runs a symmetric eigendecomposition.
//!
//! [`TargetSweep`] evaluates the same scores along a grid of candidate target
//! values without refactorising the whole matrix each time. With the new row
//! last, deleting it leaves the `n × n` core `G`, which does not involve the
//! target. Given `G = V D Vᵀ`, the full matrix is orthogonally similar to the
//! arrowhead `[[D, ρ], [ρᵀ, α]]` with `ρ = Vᵀ c(z)` affine in the candidate
//! `z`. Its eigenvalues are the roots of the secular equation
//! `λ − α − Σ ρ_k² / (λ − d_k) = 0`, one per gap between consecutive poles,
//! and only the roots beyond the threshold are computed.

use alloc::vec;
use alloc::vec::Vec;

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::matrix::{FilledMatrix, Square};

/// `scale · order^exponent`.
pub fn svd_threshold(order: usize, exponent: f64, scale: f64) -> f64 {
    scale * libm::pow(order as f64, exponent)
}

struct Spectrum {
    /// Ascending eigenvalues.
    values: Vec<f64>,
    /// Eigenvectors stored column after column, matching `values`.
    vectors: Vec<f64>,
}

fn symmetric_spectrum(b: &Square) -> Result<Spectrum> {
    let n = b.order();
    if b.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Decomposition);
    }
    let eig = Mat::<f64>::from_fn(n, n, |i, j| b.get(i, j))
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Decomposition)?;
    let (s, u) = (eig.S(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].total_cmp(&s[j]));
    let values = order.iter().map(|&k| s[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        vectors.extend((0..n).map(|i| u[(i, k)]));
    }
    Ok(Spectrum { values, vectors })
}

/// Reconstruction from the eigenpairs whose eigenvalue exceeds `threshold` in magnitude.
pub fn usvt_estimate(b: &Square, threshold: f64) -> Result<Square> {
    let n = b.order();
    let spec = symmetric_spectrum(b)?;
    let mut out = Square::zeros(n);
    for (k, &lambda) in spec.values.iter().enumerate() {
        if lambda.abs() <= threshold {
            continue;
        }
        let u = &spec.vectors[k * n..(k + 1) * n];
        for i in 0..n {
            let li = lambda * u[i];
            for (j, &uj) in u.iter().enumerate().skip(i) {
                let v = out.get(i, j) + li * uj;
                out.set(i, j, v);
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            out.set(i, j, out.get(j, i));
        }
    }
    Ok(out)
}

/// Residual scores `|F(n+1, j) − Ǎ(n+1, j)|` for every `j` in `0..n`.
pub(crate) fn svd_scores_dense(f: &FilledMatrix, threshold: f64, clip: bool) -> Result<Vec<f64>> {
    let est = usvt_estimate(f.matrix(), threshold)?;
    let row = f.order() - 1;
    let bound = f.bound();
    Ok((0..f.n())
        .map(|j| {
            let e = est.get(row, j);
            let e = if clip { e.clamp(-bound, bound) } else { e };
            (f.get(row, j) - e).abs()
        })
        .collect())
}

/// Residual score of column `j` for a filled matrix.
pub fn score_svd(f: &FilledMatrix, j: usize, threshold: f64, clip: bool) -> Result<f64> {
    if j >= f.n() {
        return Err(Error::ColumnOutOfRange { index: j, n: f.n() });
    }
    Ok(svd_scores_dense(f, threshold, clip)?[j])
}

#[derive(Clone, Copy)]
struct Cluster {
    pole: f64,
    weight: f64,
}

/// Residual scores of the new row while only the target value changes.
pub struct TargetSweep {
    n: usize,
    col: usize,
    threshold: f64,
    clip: Option<f64>,
    poles: Vec<f64>,
    basis: Vec<f64>,
    rho_base: Vec<f64>,
    rho_slope: Vec<f64>,
    corner: f64,
    responses: Vec<f64>,
    full: FilledMatrix,
    fallbacks: usize,
    // scratch
    rho: Vec<f64>,
    member: Vec<usize>,
    clusters: Vec<Cluster>,
    diffs: Vec<f64>,
    prev_diffs: Vec<f64>,
    coeff: Vec<f64>,
    row: Vec<f64>,
    warm: Vec<f64>,
    warm_clusters: usize,
}

const DEFLATED: usize = usize::MAX;

impl TargetSweep {
    /// Factorises the core of `f`. The target must lie in the last row.
    pub fn new(f: &FilledMatrix, threshold: f64, clip: bool) -> Result<Self> {
        let order = f.order();
        let (t0, col) = f.target();
        if order < 2 || t0 != order - 1 {
            return Err(Error::NonCanonicalTarget { row: t0, col });
        }
        let n = order - 1;
        let a = n;
        let spec = symmetric_spectrum(&f.matrix().leading_block(n))?;
        let mut rho_base = vec![0.0; n];
        let mut rho_slope = vec![0.0; n];
        for k in 0..n {
            let v = &spec.vectors[k * n..(k + 1) * n];
            rho_base[k] = (0..n)
                .filter(|&i| i != col)
                .map(|i| v[i] * f.get(i, a))
                .sum();
            rho_slope[k] = v[col];
        }
        Ok(Self {
            n,
            col,
            threshold,
            clip: clip.then_some(f.bound()),
            poles: spec.values,
            basis: spec.vectors,
            rho_base,
            rho_slope,
            corner: f.get(a, a),
            responses: (0..n).map(|j| f.get(a, j)).collect(),
            full: f.clone(),
            fallbacks: 0,
            rho: vec![0.0; n],
            member: vec![DEFLATED; n],
            clusters: Vec::with_capacity(n),
            diffs: Vec::with_capacity(n),
            prev_diffs: Vec::with_capacity(n),
            coeff: vec![0.0; n],
            row: vec![0.0; n],
            warm: vec![f64::NAN; n + 1],
            warm_clusters: 0,
        })
    }

    /// Number of grid points that needed the dense fallback.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks
    }

    /// Writes the scores at candidate `z` into `out` (length `n`).
    pub fn scores_at(&mut self, z: f64, out: &mut [f64]) -> Result<()> {
        self.estimate_row(z)?;
        for (j, o) in out.iter_mut().enumerate().take(self.n) {
            let r = if j == self.col { z } else { self.responses[j] };
            *o = (r - self.row[j]).abs();
        }
        Ok(())
    }

    /// The reconstruction's new-row entries `Ǎ(n+1, 0..n)` at candidate `z`.
    pub fn estimate_row(&mut self, z: f64) -> Result<&[f64]> {
        if !self.arrowhead_row(z) {
            self.fallbacks += 1;
            self.full.set_target_in_place(z)?;
            let est = usvt_estimate(self.full.matrix(), self.threshold)?;
            for j in 0..self.n {
                self.row[j] = est.get(self.n, j);
            }
        }
        if let Some(bound) = self.clip {
            for v in &mut self.row {
                *v = v.clamp(-bound, bound);
            }
        }
        Ok(&self.row)
    }

    /// Fills `self.row` from the arrowhead eigenproblem. Returns false when the
    /// computed eigenvectors cannot be trusted.
    fn arrowhead_row(&mut self, z: f64) -> bool {
        let n = self.n;
        for k in 0..n {
            self.rho[k] = self.rho_base[k] + z * self.rho_slope[k];
        }
        let alpha = self.corner;
        let rho_norm = libm::sqrt(self.rho.iter().map(|r| r * r).sum::<f64>());
        let scale = self.poles[0]
            .abs()
            .max(self.poles[n - 1].abs())
            .max(alpha.abs())
            .max(rho_norm);
        if !scale.is_finite() {
            return false;
        }
        let tol = 64.0 * f64::EPSILON * scale;

        // Tiny couplings leave an eigenvector orthogonal to the new row, and
        // nearly equal poles can be rotated so that all but one coupling
        // vanishes. Neither contributes to the new row of the estimate.
        self.clusters.clear();
        let mut last_pole = f64::NEG_INFINITY;
        for k in 0..n {
            let r = self.rho[k];
            if r.abs() <= tol {
                self.member[k] = DEFLATED;
                continue;
            }
            let p = self.poles[k];
            match self.clusters.last_mut() {
                Some(c) if p - last_pole <= tol => c.weight += r * r,
                _ => self.clusters.push(Cluster {
                    pole: p,
                    weight: r * r,
                }),
            }
            last_pole = p;
            self.member[k] = self.clusters.len() - 1;
        }

        self.coeff.iter_mut().for_each(|c| *c = 0.0);
        self.row.iter_mut().for_each(|r| *r = 0.0);
        let m = self.clusters.len();
        if m == 0 {
            return true;
        }

        if m != self.warm_clusters {
            self.warm.iter_mut().for_each(|w| *w = f64::NAN);
            self.warm_clusters = m;
        }
        let weight_sum: f64 = self.clusters.iter().map(|c| c.weight).sum();
        let spread = libm::sqrt(weight_sum) + 2.0 * tol;
        let lo_end = {
            let mut x = self.clusters[0].pole.min(alpha) - spread;
            while secular(&self.clusters, alpha, x) >= 0.0 {
                x -= spread.max(tol);
            }
            x
        };
        let hi_end = {
            let mut x = self.clusters[m - 1].pole.max(alpha) + spread;
            while secular(&self.clusters, alpha, x) <= 0.0 {
                x += spread.max(tol);
            }
            x
        };

        let t = self.threshold;
        let mut prev: Option<(f64, f64)> = None;
        for gap in 0..=m {
            let lo = if gap == 0 {
                lo_end
            } else {
                self.clusters[gap - 1].pole
            };
            let hi = if gap == m {
                hi_end
            } else {
                self.clusters[gap].pole
            };
            let bracket = if lo >= t || hi <= -t {
                Some((lo, hi))
            } else if hi > t && secular(&self.clusters, alpha, t) < 0.0 {
                Some((t, hi))
            } else if lo < -t && secular(&self.clusters, alpha, -t) > 0.0 {
                Some((lo, -t))
            } else {
                None
            };
            let Some((x_lo, x_hi)) = bracket else {
                self.warm[gap] = f64::NAN;
                prev = None;
                continue;
            };
            // Roots move continuously with z, so the root found at the
            // previous candidate is a good starting point.
            let warm = self.warm[gap];
            let start = (warm > x_lo && warm < x_hi).then_some(warm);
            let origin = if gap == 0 {
                hi
            } else if gap == m {
                lo
            } else if let Some(x) = start {
                if x - lo < hi - x {
                    lo
                } else {
                    hi
                }
            } else if secular(&self.clusters, alpha, 0.5 * (x_lo + x_hi)) > 0.0 {
                lo
            } else {
                hi
            };
            let Some(mu) = solve_secular(
                &self.clusters,
                alpha,
                origin,
                (x_lo - origin, x_hi - origin),
                start.map(|x| x - origin),
            ) else {
                return false;
            };
            let lambda = origin + mu;
            self.warm[gap] = lambda;

            self.diffs.clear();
            let mut norm2 = 1.0;
            for c in &self.clusters {
                let d = mu - (c.pole - origin);
                if d == 0.0 || !d.is_finite() {
                    return false;
                }
                norm2 += c.weight / (d * d);
                self.diffs.push(d);
            }
            if let Some((prev_norm2, _)) = prev {
                let mut dot = 1.0;
                for (c, (d, e)) in self
                    .clusters
                    .iter()
                    .zip(self.diffs.iter().zip(&self.prev_diffs))
                {
                    dot += c.weight / (d * e);
                }
                if dot.abs() > 1e-9 * libm::sqrt(norm2 * prev_norm2) {
                    return false;
                }
            }
            let factor = lambda / norm2;
            for k in 0..n {
                let c = self.member[k];
                if c != DEFLATED {
                    self.coeff[k] += factor * self.rho[k] / self.diffs[c];
                }
            }
            core::mem::swap(&mut self.diffs, &mut self.prev_diffs);
            prev = Some((norm2, lambda));
        }

        for k in 0..n {
            let s = self.coeff[k];
            if s == 0.0 {
                continue;
            }
            let v = &self.basis[k * n..(k + 1) * n];
            for (r, &vi) in self.row.iter_mut().zip(v) {
                *r += s * vi;
            }
        }
        self.row.iter().all(|v| v.is_finite())
    }
}

fn secular(clusters: &[Cluster], alpha: f64, x: f64) -> f64 {
    x - alpha
        - clusters
            .iter()
            .map(|c| c.weight / (x - c.pole))
            .sum::<f64>()
}

/// Root of the secular function in `origin + (mu_lo, mu_hi)`, returned as the
/// offset from `origin` so that distances to the nearby pole keep full
/// relative precision.
fn solve_secular(
    clusters: &[Cluster],
    alpha: f64,
    origin: f64,
    (mut mu_lo, mut mu_hi): (f64, f64),
    start: Option<f64>,
) -> Option<f64> {
    let eval = |mu: f64| {
        let mut f = origin + mu - alpha;
        let mut df = 1.0;
        for c in clusters {
            let inv = 1.0 / (mu - (c.pole - origin));
            let q = c.weight * inv;
            f -= q;
            df += q * inv;
        }
        (f, df)
    };
    let mut mu = start.unwrap_or(0.5 * (mu_lo + mu_hi));
    for _ in 0..200 {
        let (f, df) = eval(mu);
        if f == 0.0 {
            return Some(mu);
        }
        if !f.is_finite() {
            return None;
        }
        if f < 0.0 {
            mu_lo = mu;
        } else {
            mu_hi = mu;
        }
        let newton = mu - f / df;
        let next = if newton > mu_lo && newton < mu_hi {
            newton
        } else {
            0.5 * (mu_lo + mu_hi)
        };
        let tiny = 2.0 * f64::EPSILON * next.abs().max(f64::MIN_POSITIVE);
        if (next - mu).abs() <= tiny || mu_hi - mu_lo <= tiny {
            return Some(next);
        }
        mu = next;
    }
    Some(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{fill_missing, Mask, ObservedMatrix};

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut s = seed;
        move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        }
    }

    fn random_sym(order: usize, seed: u64) -> Square {
        let mut next = lcg(seed);
        let mut m = Square::zeros(order);
        for i in 0..order {
            for j in 0..=i {
                m.set_sym(i, j, next());
            }
        }
        m
    }

    fn filled(m: &Square, bound: f64) -> FilledMatrix {
        let obs = ObservedMatrix::new(m, &Mask::empty(m.order()), bound).unwrap();
        fill_missing(&obs, m).unwrap()
    }

    #[test]
    fn zero_matrix_gives_zero() {
        let z = Square::zeros(5);
        assert_eq!(usvt_estimate(&z, 0.5).unwrap(), z);
    }

    #[test]
    fn rank_one_is_reproduced() {
        let v = [1.0, 2.0, 2.0, 1.0, 1.0, 1.0]; // |v|^2 = 12
        let m = Square::from_fn(6, |i, j| v[i] * v[j]);
        let est = usvt_estimate(&m, 1.0).unwrap();
        assert!(est.max_abs_diff(&m) < 1e-10);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut m = Square::zeros(3);
        m.set(0, 0, f64::NAN);
        assert_eq!(usvt_estimate(&m, 1.0), Err(Error::Decomposition));
    }

    #[test]
    fn zero_threshold_scores_vanish() {
        let m = random_sym(7, 3);
        let f = filled(&m, 1.0);
        for s in svd_scores_dense(&f, 0.0, false).unwrap() {
            assert!(s < 1e-12);
        }
    }

    #[test]
    fn constant_matrix_with_high_threshold() {
        let m = Square::from_fn(6, |_, _| 0.4);
        let f = filled(&m, 1.0);
        for s in svd_scores_dense(&f, 100.0, false).unwrap() {
            assert_eq!(s, 0.4);
        }
    }

    fn sweep_matches_dense(m: &Square, threshold: f64, zs: &[f64], clip: bool) {
        let f = filled(m, 1.0);
        let mut sweep = TargetSweep::new(&f, threshold, clip).unwrap();
        let mut out = vec![0.0; f.n()];
        for &z in zs {
            sweep.scores_at(z, &mut out).unwrap();
            let dense = svd_scores_dense(&f.set_target(z).unwrap(), threshold, clip).unwrap();
            for (a, b) in out.iter().zip(&dense) {
                assert!(
                    (a - b).abs() < 1e-9,
                    "z={z} t={threshold} m={m:?} sweep {a} dense {b}"
                );
            }
        }
    }

    #[test]
    fn sweep_agrees_with_dense_on_random_matrices() {
        let zs = [-1.0, -0.37, 0.0, 0.25, 0.9, 1.0];
        for seed in 0..30 {
            let order = 3 + (seed as usize % 9);
            let m = random_sym(order, seed);
            for t in [0.0, 0.3, 1.0, 2.5] {
                sweep_matches_dense(&m, t, &zs, seed % 2 == 0);
            }
        }
    }

    #[test]
    fn sweep_handles_degenerate_spectra() {
        let zs = [-1.0, -0.5, 0.0, 0.1, 0.7];
        // Repeated zero eigenvalues and vanishing couplings.
        let c = Square::from_fn(7, |_, _| 0.3);
        sweep_matches_dense(&c, 0.5, &zs, false);
        sweep_matches_dense(&c, 0.0, &zs, false);
        let v = [0.5, -0.5, 0.25, 0.0, 1.0, 0.75];
        let r1 = Square::from_fn(6, |i, j| v[i] * v[j]);
        sweep_matches_dense(&r1, 0.1, &zs, false);
        let diag = Square::from_fn(6, |i, j| if i == j { 0.9 } else { 0.0 });
        sweep_matches_dense(&diag, 0.25, &zs, false);
        sweep_matches_dense(&Square::zeros(5), 0.0, &zs, false);
    }
}
