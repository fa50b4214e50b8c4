use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{ObservedMatrix, Square};
use crate::seed;

/// How to fill the missing entries before scoring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuessStrategy {
    /// Independent draws from the observed entries.
    EmpiricalIID,
    /// Every missing entry set to `C0`.
    AllPlusC0,
    /// Every missing entry set to `−C0`.
    AllMinusC0,
    /// Each missing entry `C0` with probability `p`, otherwise `−C0`.
    MixedSigns(f64),
}

impl GuessStrategy {
    /// Whether two draws with different seeds can differ.
    pub fn is_randomized(&self) -> bool {
        matches!(self, Self::EmpiricalIID | Self::MixedSigns(_))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::MixedSigns(p) if !(0.0..=1.0).contains(&p) => Err(Error::InvalidProbability {
                name: "mixed-sign probability",
                value: p,
            }),
            _ => Ok(()),
        }
    }

    /// `[Empirical, +C0, −C0, Mixed(0.5)]`.
    pub fn defaults() -> Vec<GuessStrategy> {
        alloc::vec![
            Self::EmpiricalIID,
            Self::AllPlusC0,
            Self::AllMinusC0,
            Self::MixedSigns(0.5),
        ]
    }
}

/// Default number of guesses in the multi-guess union.
pub const DEFAULT_ITER_MAX: usize = 8;

/// The strategy and seed of each of `iter_max` guesses.
///
/// The strategies are used once in order; later guesses cycle through the
/// randomized ones only, since repeating a deterministic fill adds nothing.
/// Guess `ℓ` gets the seed `derive(seed, [ℓ])`.
pub fn guess_plan(
    strategies: &[GuessStrategy],
    iter_max: usize,
    seed: u64,
) -> Result<Vec<(GuessStrategy, u64)>> {
    if strategies.is_empty() {
        return Err(Error::InvalidConfig(
            "at least one guess strategy is required".into(),
        ));
    }
    if iter_max == 0 {
        return Err(Error::InvalidConfig("iter_max must be at least 1".into()));
    }
    for s in strategies {
        s.validate()?;
    }
    let randomized: Vec<GuessStrategy> = strategies
        .iter()
        .copied()
        .filter(GuessStrategy::is_randomized)
        .collect();
    let recycle = if randomized.is_empty() {
        strategies
    } else {
        &randomized[..]
    };
    Ok((0..iter_max)
        .map(|l| {
            let s = if l < strategies.len() {
                strategies[l]
            } else {
                recycle[(l - strategies.len()) % recycle.len()]
            };
            (s, seed::derive(seed, &[l as u64]))
        })
        .collect())
}

/// A guess matrix: drawn values at missing positions (target excluded), zero elsewhere.
pub fn draw_guess(obs: &ObservedMatrix, strategy: GuessStrategy, seed: u64) -> Result<Square> {
    strategy.validate()?;
    let order = obs.order();
    let c0 = obs.bound();
    let target = obs.target();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<f64> = match strategy {
        GuessStrategy::EmpiricalIID => obs.observed_upper().collect(),
        _ => Vec::new(),
    };
    let mut guess = Square::zeros(order);
    for i in 0..order {
        for j in i..order {
            if obs.value(i, j).is_some() || (j, i) == target || (i, j) == target {
                continue;
            }
            let v = match strategy {
                GuessStrategy::EmpiricalIID if pool.is_empty() => 0.0,
                GuessStrategy::EmpiricalIID => pool[rng.gen_range(0..pool.len())],
                GuessStrategy::AllPlusC0 => c0,
                GuessStrategy::AllMinusC0 => -c0,
                GuessStrategy::MixedSigns(p) => {
                    if rng.gen_bool(p) {
                        c0
                    } else {
                        -c0
                    }
                }
            };
            guess.set_sym(i, j, v);
        }
    }
    Ok(guess)
}
