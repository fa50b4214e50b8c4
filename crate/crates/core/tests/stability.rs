mod common;

use common::*;
use matconf_core::conformal::{algorithm2_detailed, draw_guess};
use matconf_core::score::ns::NsWeights;
use matconf_core::score::score_filled;
use matconf_core::simgen::{mask_mcar, mask_mnar_largest, sample_instance, Graphon, GraphonSpec};
use matconf_core::{
    conformal_1d, fill_missing, is_trivial_forced, tau_bounds, Grid, GuessStrategy, Mask,
    ObservedMatrix, ScorerConfig, Square, StabilityConstants,
};

#[test]
fn slack_for_one_missing_link() {
    let n = 10;
    for j0 in [0, 4, 8] {
        let mut mask = Mask::empty(n + 1);
        mask.set_pair(j0, n, true);
        let obs = ObservedMatrix::new(&Square::zeros(n + 1), &mask, 1.0).unwrap();
        let unit = StabilityConstants {
            weight_mass: Some(1.0),
            ..StabilityConstants::default()
        };
        let tau = tau_bounds(&obs, 0.5, 1.0, unit).unwrap();
        for j in 0..n {
            let expect = if j == j0 { 20.0 } else { 4.0 };
            assert!((tau.get(j) - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn slack_matches_formula_on_random_masks() {
    let mut rng = Lcg::new(17);
    for _ in 0..20 {
        let n = 4 + rng.below(20);
        let mask = random_mask(n + 1, rng.next() * 0.3, &mut rng);
        let obs = ObservedMatrix::new(&Square::zeros(n + 1), &mask, 2.0).unwrap();
        let (h, c0) = (0.05 + rng.next(), 2.0);
        let consts = StabilityConstants {
            lipschitz: 1.5,
            kernel_sup: 0.8,
            weight_mass: None,
        };
        let tau = tau_bounds(&obs, h, c0, consts).unwrap();
        let mask = obs.mask();
        let count = |i: usize| (0..=n).filter(|&k| k != i && mask.get(i, k)).count() as f64;
        let mean = (0..n).map(count).sum::<f64>() / n as f64;
        for j in 0..n {
            let first = (4.0 * 1.5 * c0.powi(3) / h * (count(j) + 3.0 * mean))
                .min(2.0 * c0 * 0.8 * (n - 1) as f64);
            let link = if mask.get(n, j) { (n - 2) as f64 } else { 0.0 };
            let expect = first + 2.0 * 0.8 * c0 * (link + count(n));
            assert!((tau.get(j) - expect).abs() < 1e-9 * expect.max(1.0));
        }
    }
}

/// Draws a complete matrix, a missingness pattern and a guess; checks that
/// every score moves by at most its slack when the guess is replaced by the
/// truth, and that the adjusted set contains the oracle set.
fn bracketing_trial(seed: u64) {
    let mut rng = Lcg::new(seed);
    let graphon = Graphon::ALL[rng.below(3)];
    let n = 10 + rng.below(21);
    let inst =
        sample_instance(&GraphonSpec::new(graphon, n, 0.1 + 0.8 * rng.next(), seed)).unwrap();
    let m0 = rng.below(n);
    let mask = if rng.next() < 0.5 {
        mask_mcar(n, m0, seed).unwrap()
    } else {
        mask_mnar_largest(&inst.complete, m0).unwrap()
    };
    let obs = inst.observe(&mask).unwrap();
    let strategy = [
        GuessStrategy::EmpiricalIID,
        GuessStrategy::AllPlusC0,
        GuessStrategy::AllMinusC0,
        GuessStrategy::MixedSigns(0.5),
    ][rng.below(4)];
    let guess = draw_guess(&obs, strategy, seed).unwrap();
    let grid = Grid::new(obs.bound(), 81).unwrap();
    let alpha = 0.1;
    let out = algorithm2_detailed(
        &obs,
        &ScorerConfig::ns(),
        alpha,
        &grid,
        &guess,
        StabilityConstants::default(),
    )
    .unwrap();
    let fixed = ScorerConfig {
        ns_bandwidths: Some(out.bandwidths.clone()),
        ..ScorerConfig::ns()
    };
    let guessed = fill_missing(&obs, &guess).unwrap();
    let truth = fill_missing(&obs, &inst.complete).unwrap();
    let core = guessed.matrix().leading_block(n);
    let w = NsWeights::for_core(&core, None, None).unwrap();
    assert_eq!(w.bandwidths(), &out.bandwidths[..]);
    for z in grid.values() {
        let a = score_filled(&guessed.set_target(z).unwrap(), &fixed).unwrap();
        let b = score_filled(&truth.set_target(z).unwrap(), &fixed).unwrap();
        for j in 0..n {
            let gap = (a.values()[j] - b.values()[j]).abs();
            assert!(
                gap <= out.tau.get(j) + 1e-9,
                "seed {seed} z {z} j {j}: {gap} > {}",
                out.tau.get(j)
            );
        }
    }
    let oracle = conformal_1d(&obs, &inst.complete, &fixed, alpha, &grid, None).unwrap();
    assert!(out.set.is_superset_of(&oracle), "seed {seed}");
}

#[test]
fn slack_brackets_the_oracle_scores() {
    for seed in 0..40 {
        bracketing_trial(seed);
    }
}

#[test]
fn many_missing_links_force_the_full_range() {
    let mut rng = Lcg::new(23);
    let alpha = 0.1;
    for seed in 0..20 {
        let n = 20 + rng.below(31);
        let inst = sample_instance(&GraphonSpec::new(
            Graphon::ALL[seed % 3],
            n,
            0.5,
            seed as u64,
        ))
        .unwrap();
        let k = (alpha * n as f64).ceil() as usize;
        let mut mask = Mask::empty(n + 1);
        for j in rng.shuffle(n - 1).into_iter().take(k + rng.below(3)) {
            mask.set_pair(j, n, true);
        }
        let obs = inst.observe(&mask).unwrap();
        assert!(is_trivial_forced(&obs, alpha));
        let guess = draw_guess(&obs, GuessStrategy::EmpiricalIID, 1).unwrap();
        let grid = Grid::new(obs.bound(), 101).unwrap();
        let out = algorithm2_detailed(
            &obs,
            &ScorerConfig::ns(),
            alpha,
            &grid,
            &guess,
            StabilityConstants::default(),
        )
        .unwrap();
        assert!(out.set.is_trivial(), "n {n}: {:?}", out.set);
    }
}
