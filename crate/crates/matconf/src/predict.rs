//! Running either method on one observation.

use matconf_core::conformal::{algorithm2_detailed, draw_guess};
use matconf_core::{
    algorithm1, is_trivial_forced, seed, Grid, GuessStrategy, ObservedMatrix, PredictionSet,
    ScorerConfig, StabilityBounds, StabilityConstants,
};

use crate::config::Method;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictOptions {
    pub method: Method,
    pub alpha: f64,
    pub grid_points: usize,
    /// Bisections locating each end of the set between grid points.
    pub refine_steps: u32,
    /// Number of guesses in the multi-guess union; unused by the stability method.
    pub iter_max: usize,
    pub seed: u64,
}

impl Default for PredictOptions {
    fn default() -> Self {
        Self {
            method: Method::Alg1,
            alpha: 0.1,
            grid_points: Grid::DEFAULT_POINTS,
            refine_steps: Grid::DEFAULT_REFINE_STEPS,
            iter_max: matconf_core::conformal::DEFAULT_ITER_MAX,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub set: PredictionSet,
    /// Per-column slack of the stability method.
    pub tau: Option<StabilityBounds>,
    pub bandwidths: Option<Vec<f64>>,
    /// The new row misses at least `⌈αn⌉` entries, so the stability method
    /// cannot do better than the whole range.
    pub trivial_forced: bool,
}

/// Predicts the canonical target of `obs`.
///
/// The stability method uses one empirical guess seeded like the first guess
/// of the multi-guess method.
pub fn predict(obs: &ObservedMatrix, opts: &PredictOptions) -> matconf_core::Result<Prediction> {
    let grid = Grid::new(obs.bound(), opts.grid_points)?.with_refine_steps(opts.refine_steps);
    let trivial_forced = is_trivial_forced(obs, opts.alpha);
    match opts.method {
        Method::Alg1 => {
            let set = algorithm1(
                obs,
                &ScorerConfig::svd(),
                opts.alpha,
                &grid,
                &GuessStrategy::defaults(),
                opts.iter_max,
                opts.seed,
            )?;
            Ok(Prediction {
                set,
                tau: None,
                bandwidths: None,
                trivial_forced,
            })
        }
        Method::Alg2 => {
            let guess = draw_guess(
                obs,
                GuessStrategy::EmpiricalIID,
                seed::derive(opts.seed, &[0]),
            )?;
            let out = algorithm2_detailed(
                obs,
                &ScorerConfig::ns(),
                opts.alpha,
                &grid,
                &guess,
                StabilityConstants::default(),
            )?;
            Ok(Prediction {
                set: out.set,
                tau: Some(out.tau),
                bandwidths: Some(out.bandwidths),
                trivial_forced,
            })
        }
    }
}
