//! Synthetic graphon data and missingness patterns.
//!
//! An instance has latent positions `ξ_1, …, ξ_n ~ U(0, 1)` plus a fixed
//! `ξ_{n+1}`, and entries `A(i, j) = f(ξ_i, ξ_j) + e(i, j)` with symmetric
//! noise `e ~ U(−h, h)` drawn once per unordered pair (diagonal included).

use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{canonical_target, Mask, ObservedMatrix, Square};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Graphon {
    /// `2.5 (u + v) − 0.75`
    F1,
    /// `2.5 cos(0.1 / ((u − ½)³ + (v − ½)³ + 0.01)) · max(u, v)^{2/3} + 2`
    F2,
    /// `(5/3)(u² + v²) cos(1 / (u⁴ + v⁴)) + 0.75`
    F3,
}

impl Graphon {
    pub const ALL: [Graphon; 3] = [Graphon::F1, Graphon::F2, Graphon::F3];

    /// Entry bound covering the function range plus noise of half-width 0.1.
    pub fn default_bound(self) -> f64 {
        match self {
            Graphon::F1 => 4.4,
            Graphon::F2 => 4.6,
            Graphon::F3 => 4.3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Graphon::F1 => "f1",
            Graphon::F2 => "f2",
            Graphon::F3 => "f3",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "f1" | "F1" => Some(Graphon::F1),
            "f2" | "F2" => Some(Graphon::F2),
            "f3" | "F3" => Some(Graphon::F3),
            _ => None,
        }
    }

    fn id(self) -> u64 {
        match self {
            Graphon::F1 => 1,
            Graphon::F2 => 2,
            Graphon::F3 => 3,
        }
    }
}

pub fn graphon_value(graphon: Graphon, u: f64, v: f64) -> f64 {
    match graphon {
        Graphon::F1 => 2.5 * (u + v) - 0.75,
        Graphon::F2 => {
            let cu = (u - 0.5) * (u - 0.5) * (u - 0.5);
            let cv = (v - 0.5) * (v - 0.5) * (v - 0.5);
            2.5 * libm::cos(0.1 / (cu + cv + 0.01)) * libm::pow(u.max(v), 2.0 / 3.0) + 2.0
        }
        Graphon::F3 => {
            let (u2, v2) = (u * u, v * v);
            (5.0 / 3.0) * (u2 + v2) * libm::cos(1.0 / (u2 * u2 + v2 * v2)) + 0.75
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphonSpec {
    pub graphon: Graphon,
    /// Number of existing rows; the instance has order `n + 1`.
    pub n: usize,
    pub xi_target: f64,
    pub noise_halfwidth: f64,
    pub seed: u64,
    pub bound: f64,
}

impl GraphonSpec {
    pub const DEFAULT_NOISE: f64 = 0.1;

    /// Defaults for noise and bound.
    pub fn new(graphon: Graphon, n: usize, xi_target: f64, seed: u64) -> Self {
        Self {
            graphon,
            n,
            xi_target,
            noise_halfwidth: Self::DEFAULT_NOISE,
            seed,
            bound: graphon.default_bound(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::OrderTooSmall(self.n));
        }
        if !(self.xi_target > 0.0 && self.xi_target < 1.0) {
            return Err(Error::InvalidProbability {
                name: "xi_target",
                value: self.xi_target,
            });
        }
        if !(self.noise_halfwidth >= 0.0 && self.noise_halfwidth.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!(
                "noise half-width must be finite and non-negative, got {}",
                self.noise_halfwidth
            )));
        }
        if !(self.bound > 0.0 && self.bound.is_finite()) {
            return Err(Error::InvalidBound(self.bound));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticInstance {
    /// The complete matrix of order `n + 1`.
    pub complete: Square,
    /// `ξ_1, …, ξ_{n+1}`.
    pub latents: Vec<f64>,
    /// The entry to be predicted, `A(n+1, n)`.
    pub truth: f64,
    pub bound: f64,
}

impl SyntheticInstance {
    /// The observation seen through `mask`, with the canonical target hidden.
    pub fn observe(&self, mask: &Mask) -> Result<ObservedMatrix> {
        ObservedMatrix::new(&self.complete, mask, self.bound)
    }
}

pub fn sample_instance(spec: &GraphonSpec) -> Result<SyntheticInstance> {
    spec.validate()?;
    let n = spec.n;
    let order = n + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut latents = Vec::with_capacity(order);
    while latents.len() < n {
        let u: f64 = rng.gen();
        if u > 0.0 {
            latents.push(u);
        }
    }
    latents.push(spec.xi_target);
    let h = spec.noise_halfwidth;
    let mut complete = Square::zeros(order);
    for i in 0..order {
        for j in i..order {
            let noise = if h > 0.0 { rng.gen_range(-h..h) } else { 0.0 };
            let v = graphon_value(spec.graphon, latents[i], latents[j]) + noise;
            if v.abs() > spec.bound {
                return Err(Error::BoundViolation {
                    row: i,
                    col: j,
                    value: v,
                    bound: spec.bound,
                });
            }
            complete.set_sym(i, j, v);
        }
    }
    let (a, b) = canonical_target(order);
    Ok(SyntheticInstance {
        truth: complete.get(a, b),
        complete,
        latents,
        bound: spec.bound,
    })
}

/// Only the target is unobserved, so nothing is flagged.
pub fn mask_single_target(n: usize) -> Mask {
    Mask::empty(n + 1)
}

/// Off-diagonal pairs `(i, j)`, `i < j`, other than the target, in lexicographic order.
fn eligible_pairs(order: usize) -> Vec<(usize, usize)> {
    let (a, b) = canonical_target(order);
    let mut pairs = Vec::with_capacity(order * (order - 1) / 2);
    for i in 0..order {
        for j in (i + 1)..order {
            if (i, j) != (b, a) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Flags the `m0` eligible pairs with the largest values, ties broken by
/// lexicographic index.
pub fn mask_mnar_largest(complete: &Square, m0: usize) -> Result<Mask> {
    let order = complete.order();
    let mut pairs = eligible_pairs(order);
    if m0 > pairs.len() {
        return Err(Error::TooManyPairs {
            requested: m0,
            available: pairs.len(),
        });
    }
    pairs.sort_by(|&(i, j), &(k, l)| {
        complete
            .get(k, l)
            .total_cmp(&complete.get(i, j))
            .then((i, j).cmp(&(k, l)))
    });
    let mut mask = Mask::empty(order);
    for &(i, j) in &pairs[..m0] {
        mask.set_pair(i, j, true);
    }
    Ok(mask)
}

/// Flags `m0` eligible pairs chosen uniformly without replacement.
pub fn mask_mcar(n: usize, m0: usize, seed: u64) -> Result<Mask> {
    let order = n + 1;
    let pairs = eligible_pairs(order);
    if m0 > pairs.len() {
        return Err(Error::TooManyPairs {
            requested: m0,
            available: pairs.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mask = Mask::empty(order);
    for idx in sample(&mut rng, pairs.len(), m0) {
        let (i, j) = pairs[idx];
        mask.set_pair(i, j, true);
    }
    Ok(mask)
}

/// Seed for one replication of one experimental cell.
pub fn child_seed(
    master: u64,
    graphon: Graphon,
    n: usize,
    xi_target: f64,
    m0: usize,
    rep: usize,
) -> u64 {
    let xi = libm::round(xi_target * 1e6) as u64;
    seed::derive(master, &[graphon.id(), n as u64, xi, m0 as u64, rep as u64])
}
