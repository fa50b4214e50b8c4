//! Distribution-free prediction sets for one entry of a partially observed,
//! symmetric, row/column-exchangeable matrix.
//!
//! The crate predicts the entry `(n + 1, n)` of an order-`(n + 1)` matrix with
//! arbitrary missingness elsewhere. Two procedures are provided:
//!
//! - [`conformal::algorithm1`]: a union of one-dimensional full-conformal
//!   sets over several guesses for the missing entries, scored by a
//!   singular-value-thresholded reconstruction.
//! - [`conformal::algorithm2`]: a single guess with a neighbourhood-smoothing
//!   score whose sensitivity to the guess is bounded by [`stability`] and
//!   absorbed into the inclusion rule.
//!
//! [`simgen`] draws synthetic graphon data for coverage experiments.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod conformal;
pub mod error;
pub mod matrix;
pub mod score;
pub mod seed;
pub mod simgen;
pub mod stability;

mod sum;

pub use conformal::{
    accept, algorithm1, algorithm2, conformal_1d, lower_quantile, Grid, GuessStrategy,
    PredictionSet,
};
pub use error::{Error, Result};
pub use matrix::{
    fill_missing, missing_counts, permute, relabel_target, FilledMatrix, Mask, MissingnessSummary,
    ObservedMatrix, Permutation, Square,
};
pub use score::{score_all, ScoreVector, ScorerConfig, ScorerKind};
pub use stability::{is_trivial_forced, tau_bounds, StabilityBounds, StabilityConstants};
