//! Nonconformity scores for the new row of a filled matrix.
//!
//! A score vector has one entry per column `j ∈ 0..n`; entry `n − 1` is the
//! target column. Both scorers treat the columns symmetrically, so permuting
//! the first `n` rows and columns of the input permutes the scores the same way.

pub mod ns;
pub mod usvt;

use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{fill_missing, FilledMatrix, ObservedMatrix, Square};

pub use ns::{NsSweep, NsWeights};
pub use usvt::TargetSweep;

/// Which score function to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScorerKind {
    /// Residual against a singular-value-thresholded reconstruction.
    Svd,
    /// Kernel-weighted response differences between similar columns.
    Ns,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScorerConfig {
    pub kind: ScorerKind,
    /// Threshold is `svd_threshold_scale · (n+1)^svd_threshold_exponent`.
    pub svd_threshold_exponent: f64,
    pub svd_threshold_scale: f64,
    /// Quantile level for bandwidth selection; `None` uses
    /// [`ns::default_bandwidth_quantile`].
    pub ns_bandwidth_quantile: Option<f64>,
    /// Explicit per-column bandwidths, overriding selection.
    pub ns_bandwidths: Option<Vec<f64>>,
    /// Clamp reconstructed entries to the bound before taking residuals.
    pub clip_estimates: bool,
}

impl ScorerConfig {
    pub fn svd() -> Self {
        Self {
            kind: ScorerKind::Svd,
            svd_threshold_exponent: 1.0 / 3.0,
            svd_threshold_scale: 1.0,
            ns_bandwidth_quantile: None,
            ns_bandwidths: None,
            clip_estimates: false,
        }
    }

    pub fn ns() -> Self {
        Self {
            kind: ScorerKind::Ns,
            ..Self::svd()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.svd_threshold_exponent.is_finite() {
            return Err(Error::InvalidConfig(
                "svd_threshold_exponent must be finite".to_string(),
            ));
        }
        if !(self.svd_threshold_scale >= 0.0 && self.svd_threshold_scale.is_finite()) {
            return Err(Error::InvalidConfig(
                "svd_threshold_scale must be finite and non-negative".to_string(),
            ));
        }
        if let Some(q) = self.ns_bandwidth_quantile {
            if !(q > 0.0 && q <= 1.0) {
                return Err(Error::InvalidProbability {
                    name: "ns_bandwidth_quantile",
                    value: q,
                });
            }
        }
        if let Some(h) = &self.ns_bandwidths {
            if let Some(&bad) = h.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
                return Err(Error::InvalidBandwidth(bad));
            }
        }
        Ok(())
    }

    /// Singular-value threshold for a matrix of the given order.
    pub fn svd_threshold(&self, order: usize) -> f64 {
        usvt::svd_threshold(order, self.svd_threshold_exponent, self.svd_threshold_scale)
    }
}

impl Default for ScorerConfig {
    fn default() -> Self {
        Self::svd()
    }
}

/// Scores `S_0, …, S_{n−1}`; the last one belongs to the target column.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Score of the target column.
    pub fn target(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Scores of `obs` filled with `guess`, with `z` placed at the target.
pub fn score_all(
    obs: &ObservedMatrix,
    guess: &Square,
    z: f64,
    config: &ScorerConfig,
) -> Result<ScoreVector> {
    config.validate()?;
    obs.require_canonical()?;
    let filled = fill_missing(obs, guess)?.set_target(z)?;
    score_filled(&filled, config)
}

/// Scores of an already filled matrix whose target sits at `(n+1, n)`.
pub fn score_filled(filled: &FilledMatrix, config: &ScorerConfig) -> Result<ScoreVector> {
    let n = filled.n();
    match config.kind {
        ScorerKind::Svd => Ok(ScoreVector(usvt::svd_scores_dense(
            filled,
            config.svd_threshold(filled.order()),
            config.clip_estimates,
        )?)),
        ScorerKind::Ns => {
            let weights = ns_weights(filled, config)?;
            let mut out = vec![0.0; n];
            weights.scores(&filled.matrix().row(n)[..n], &mut out);
            Ok(ScoreVector(out))
        }
    }
}

pub(crate) fn ns_weights(filled: &FilledMatrix, config: &ScorerConfig) -> Result<NsWeights> {
    NsWeights::for_core(
        &filled.matrix().leading_block(filled.n()),
        config.ns_bandwidth_quantile,
        config.ns_bandwidths.as_deref(),
    )
}

/// Score vectors for many target values with a fixed fill.
///
/// Neither scorer's expensive part depends on the target: the core block is
/// factorised or compared once and each candidate costs `O(n²)` or less.
pub struct GridScorer {
    inner: Inner,
}

enum Inner {
    Svd(Box<TargetSweep>),
    Ns(NsSweep),
}

impl GridScorer {
    pub fn new(filled: &FilledMatrix, config: &ScorerConfig) -> Result<Self> {
        config.validate()?;
        let n = filled.n();
        let (row, col) = filled.target();
        if row != n || col + 1 != n {
            return Err(Error::NonCanonicalTarget { row, col });
        }
        let inner = match config.kind {
            ScorerKind::Svd => Inner::Svd(Box::new(TargetSweep::new(
                filled,
                config.svd_threshold(filled.order()),
                config.clip_estimates,
            )?)),
            ScorerKind::Ns => Inner::Ns(NsSweep::new(
                ns_weights(filled, config)?,
                filled.matrix().row(n)[..n].to_vec(),
                col,
            )?),
        };
        Ok(Self { inner })
    }

    /// Writes the scores at target value `z` into `out` (length `n`).
    pub fn scores_at(&mut self, z: f64, out: &mut [f64]) -> Result<()> {
        match &mut self.inner {
            Inner::Svd(s) => s.scores_at(z, out),
            Inner::Ns(s) => {
                s.scores_at(z, out);
                Ok(())
            }
        }
    }

    /// Kernel weights when the scorer is neighbourhood smoothing.
    pub fn ns_weights(&self) -> Option<&NsWeights> {
        match &self.inner {
            Inner::Ns(s) => Some(s.weights()),
            Inner::Svd(_) => None,
        }
    }
}
