//! Inclusion rule and the two prediction-set constructions.
//!
//! Both constructions scan a grid of candidate values `z` for the target,
//! score the filled matrix with `z` in place and keep `z` when the target's
//! score is no larger than the `⌈(1−α)n⌉`-th smallest of the `n` scores
//! (target included). Ties are accepted. The ends of accepted runs are then
//! narrowed down by bisection between grid points.

mod guess;
mod set;

use alloc::vec;
use alloc::vec::Vec;

pub use guess::{draw_guess, guess_plan, GuessStrategy, DEFAULT_ITER_MAX};
pub use set::{Grid, Interval, PredictionSet};

use crate::error::{Error, Result};
use crate::matrix::{fill_missing, ObservedMatrix, Square};
use crate::score::{GridScorer, ScorerConfig, ScorerKind};
use crate::stability::{tau_bounds, StabilityBounds, StabilityConstants};
use crate::sum::ceil_count;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability {
            name: "alpha",
            value: alpha,
        })
    }
}

/// The `⌈βn⌉`-th smallest score.
pub fn lower_quantile(scores: &[f64], beta: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidProbability {
            name: "quantile level",
            value: beta,
        });
    }
    let k = ceil_count(beta, scores.len()).clamp(1, scores.len());
    let mut sorted = scores.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(sorted[k - 1])
}

/// Whether the last score is within the lower `1−α` quantile of all scores.
pub fn accept(scores: &[f64], alpha: f64) -> Result<bool> {
    check_alpha(alpha)?;
    let b = scores.len().checked_sub(1).ok_or(Error::EmptyScores)?;
    Ok(accept_unchecked(scores, b, alpha))
}

/// Inclusion rule with slack: the target score minus `τ_b` is compared with
/// the quantile of the scores plus their `τ_j`.
pub fn accept_shifted(scores: &[f64], tau: &[f64], alpha: f64) -> Result<bool> {
    check_alpha(alpha)?;
    if tau.len() != scores.len() {
        return Err(Error::ShapeMismatch {
            order: scores.len(),
            expected: scores.len(),
            got: tau.len(),
        });
    }
    let b = scores.len().checked_sub(1).ok_or(Error::EmptyScores)?;
    Ok(accept_shifted_unchecked(scores, tau, b, alpha))
}

// The `k`-th smallest value is at least `t` exactly when fewer than `k`
// values are strictly below `t`.
fn accept_unchecked(scores: &[f64], b: usize, alpha: f64) -> bool {
    let k = ceil_count(1.0 - alpha, scores.len());
    let t = scores[b];
    scores.iter().filter(|&&s| s < t).count() < k
}

fn accept_shifted_unchecked(scores: &[f64], tau: &[f64], b: usize, alpha: f64) -> bool {
    let k = ceil_count(1.0 - alpha, scores.len());
    let t = scores[b] - tau[b];
    scores.iter().zip(tau).filter(|(&s, &u)| s + u < t).count() < k
}

fn check_grid(obs: &ObservedMatrix, grid: &Grid) -> Result<()> {
    if grid.bound() != obs.bound() {
        return Err(Error::InvalidConfig(alloc::format!(
            "grid bound {} differs from the matrix bound {}",
            grid.bound(),
            obs.bound()
        )));
    }
    Ok(())
}

/// Inclusion verdict for one candidate value.
fn accepts_at(
    scorer: &mut GridScorer,
    scores: &mut [f64],
    z: f64,
    alpha: f64,
    tau: Option<&[f64]>,
) -> Result<bool> {
    scorer.scores_at(z, scores)?;
    let b = scores.len() - 1;
    Ok(match tau {
        Some(t) => accept_shifted_unchecked(scores, t, b, alpha),
        None => accept_unchecked(scores, b, alpha),
    })
}

/// Accepted flags along the grid for one fill, or-ed into `accepted`.
fn scan(
    scorer: &mut GridScorer,
    n: usize,
    alpha: f64,
    grid: &Grid,
    tau: Option<&[f64]>,
    accepted: &mut [bool],
) -> Result<()> {
    let mut scores = vec![0.0; n];
    for (k, flag) in accepted.iter_mut().enumerate() {
        *flag |= accepts_at(scorer, &mut scores, grid.value(k), alpha, tau)?;
    }
    Ok(())
}

/// Scans the grid for one fill and refines the ends of the accepted runs.
fn scan_set(
    scorer: &mut GridScorer,
    n: usize,
    alpha: f64,
    grid: &Grid,
    tau: Option<&[f64]>,
) -> Result<PredictionSet> {
    let mut accepted = vec![false; grid.len()];
    scan(scorer, n, alpha, grid, tau, &mut accepted)?;
    let mut scores = vec![0.0; n];
    PredictionSet::from_accepted_refined(grid, &accepted, |z| {
        accepts_at(scorer, &mut scores, z, alpha, tau)
    })
}

/// One-dimensional full-conformal set for the target with the missing
/// entries filled from `guess`, optionally with stability slack `tau`.
pub fn conformal_1d(
    obs: &ObservedMatrix,
    guess: &Square,
    config: &ScorerConfig,
    alpha: f64,
    grid: &Grid,
    tau: Option<&StabilityBounds>,
) -> Result<PredictionSet> {
    check_alpha(alpha)?;
    check_grid(obs, grid)?;
    obs.require_canonical()?;
    let n = obs.n();
    if let Some(t) = tau {
        if t.len() != n {
            return Err(Error::ShapeMismatch {
                order: n,
                expected: n,
                got: t.len(),
            });
        }
    }
    let filled = fill_missing(obs, guess)?;
    let mut scorer = GridScorer::new(&filled, config)?;
    scan_set(&mut scorer, n, alpha, grid, tau.map(|t| t.values()))
}

/// Union of one-dimensional sets over `iter_max` guesses planned by
/// [`guess_plan`] from `strategies` and `seed`.
///
/// When nothing besides the target is missing the guesses are irrelevant and
/// a single pass is made. Without boundary refinement the accepted flags of
/// all passes are merged before building the set; otherwise each pass is
/// refined with its own fill and the sets are united.
pub fn algorithm1(
    obs: &ObservedMatrix,
    config: &ScorerConfig,
    alpha: f64,
    grid: &Grid,
    strategies: &[GuessStrategy],
    iter_max: usize,
    seed: u64,
) -> Result<PredictionSet> {
    check_alpha(alpha)?;
    check_grid(obs, grid)?;
    obs.require_canonical()?;
    let plan = guess_plan(strategies, iter_max, seed)?;
    let passes = if obs.has_missing() { plan.len() } else { 1 };
    let n = obs.n();
    let mut accepted = vec![false; grid.len()];
    let mut set = PredictionSet::empty(grid.bound());
    for &(strategy, guess_seed) in &plan[..passes] {
        let guess = draw_guess(obs, strategy, guess_seed)?;
        let filled = fill_missing(obs, &guess)?;
        let mut scorer = GridScorer::new(&filled, config)?;
        if grid.refine_steps() == 0 {
            scan(&mut scorer, n, alpha, grid, None, &mut accepted)?;
        } else {
            set = set.union(&scan_set(&mut scorer, n, alpha, grid, None)?);
        }
    }
    if grid.refine_steps() == 0 {
        set = PredictionSet::from_accepted(grid, &accepted);
    }
    Ok(set)
}

/// Result of [`algorithm2_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct Algorithm2Output {
    pub set: PredictionSet,
    pub tau: StabilityBounds,
    pub bandwidths: Vec<f64>,
}

/// Stability-adjusted set from a single guess with the smoothing score.
pub fn algorithm2(
    obs: &ObservedMatrix,
    config: &ScorerConfig,
    alpha: f64,
    grid: &Grid,
    guess: &Square,
    consts: StabilityConstants,
) -> Result<PredictionSet> {
    Ok(algorithm2_detailed(obs, config, alpha, grid, guess, consts)?.set)
}

/// [`algorithm2`] together with the slack and bandwidths it used.
pub fn algorithm2_detailed(
    obs: &ObservedMatrix,
    config: &ScorerConfig,
    alpha: f64,
    grid: &Grid,
    guess: &Square,
    consts: StabilityConstants,
) -> Result<Algorithm2Output> {
    if config.kind != ScorerKind::Ns {
        return Err(Error::InvalidConfig(
            "the stability-adjusted set requires the smoothing scorer".into(),
        ));
    }
    check_alpha(alpha)?;
    check_grid(obs, grid)?;
    obs.require_canonical()?;
    let filled = fill_missing(obs, guess)?;
    let mut scorer = GridScorer::new(&filled, config)?;
    let weights = scorer
        .ns_weights()
        .expect("smoothing scorer exposes its weights");
    let bandwidths = weights.bandwidths().to_vec();
    let tau = tau_bounds(obs, weights.min_bandwidth(), obs.bound(), consts)?;
    let set = scan_set(&mut scorer, obs.n(), alpha, grid, Some(tau.values()))?;
    Ok(Algorithm2Output {
        set,
        tau,
        bandwidths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_examples() {
        let s: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(lower_quantile(&s, 0.9).unwrap(), 9.0);
        assert_eq!(lower_quantile(&s, 1.0).unwrap(), 10.0);
        assert_eq!(lower_quantile(&[3.5], 0.2).unwrap(), 3.5);
        assert_eq!(lower_quantile(&[], 0.5), Err(Error::EmptyScores));
        assert!(lower_quantile(&s, 0.0).is_err());
    }

    #[test]
    fn accept_examples() {
        assert!(accept(&[2.0; 7], 0.3).unwrap());
        let mut s: Vec<f64> = (0..20).map(f64::from).collect();
        assert!(!accept(&s, 0.1).unwrap());
        s[19] = 17.0; // rank 18 after the tie with the existing 17
        assert!(accept(&s, 0.1).unwrap());
        assert!(accept(&[], 0.1).is_err());
        assert!(accept(&[1.0], 1.0).is_err());
    }

    #[test]
    fn slack_can_only_help() {
        let s = [0.1, 0.2, 0.3, 5.0];
        assert!(!accept(&s, 0.3).unwrap());
        assert!(accept_shifted(&s, &[0.0, 0.0, 0.0, 4.8], 0.3).unwrap());
        assert!(!accept_shifted(&s, &[0.0; 4], 0.3).unwrap());
        assert!(accept_shifted(&s, &[0.0; 3], 0.3).is_err());
    }
}
