#![allow(clippy::needless_range_loop)]

use matconf_core::simgen::{
    graphon_value, mask_mcar, mask_mnar_largest, mask_single_target, sample_instance, Graphon,
    GraphonSpec,
};
use matconf_core::{fill_missing, missing_counts, Square};
use proptest::prelude::*;

#[test]
fn reference_values() {
    assert_eq!(graphon_value(Graphon::F1, 0.5, 0.5), 1.75);
    let f3 = 5.0 / 6.0 * 8f64.cos() + 0.75;
    assert!((graphon_value(Graphon::F3, 0.5, 0.5) - f3).abs() < 1e-15);
    // At u = v = 0.5 the cubes vanish, so f2 = 2.5 cos(10) 0.5^(2/3) + 2.
    let f2 = 2.5 * 10f64.cos() * 0.5f64.powf(2.0 / 3.0) + 2.0;
    assert!((graphon_value(Graphon::F2, 0.5, 0.5) - f2).abs() < 1e-14);
}

#[test]
fn default_bounds_cover_the_graphons() {
    // Dense grid scan of |f| plus the noise half-width stays inside the bound.
    for g in Graphon::ALL {
        let mut sup = 0f64;
        for a in 1..1000 {
            for b in 1..1000 {
                sup = sup.max(graphon_value(g, a as f64 / 1000.0, b as f64 / 1000.0).abs());
            }
        }
        assert!(
            sup + GraphonSpec::DEFAULT_NOISE <= g.default_bound(),
            "{g:?}: {sup}"
        );
    }
}

#[test]
fn noiseless_instance_is_exact() {
    for g in Graphon::ALL {
        let mut spec = GraphonSpec::new(g, 12, 0.3, 5);
        spec.noise_halfwidth = 0.0;
        let inst = sample_instance(&spec).unwrap();
        assert_eq!(inst.latents.len(), 13);
        assert_eq!(inst.latents[12], 0.3);
        for i in 0..13 {
            for j in 0..13 {
                assert_eq!(
                    inst.complete.get(i, j),
                    graphon_value(g, inst.latents[i], inst.latents[j])
                );
            }
        }
        assert_eq!(inst.truth, inst.complete.get(12, 11));
    }
}

#[test]
fn instances_are_symmetric_bounded_and_reproducible() {
    for g in Graphon::ALL {
        for seed in 0..5 {
            let spec = GraphonSpec::new(g, 30, 0.7, seed);
            let a = sample_instance(&spec).unwrap();
            let b = sample_instance(&spec).unwrap();
            assert_eq!(a, b);
            assert!(a.complete.is_symmetric(0.0));
            assert!(a.complete.as_slice().iter().all(|v| v.abs() <= spec.bound));
            assert!(a.latents.iter().all(|&u| u > 0.0 && u < 1.0));
            let noise = a.complete.get(0, 1) - graphon_value(g, a.latents[0], a.latents[1]);
            assert!(noise.abs() <= 0.1);
        }
        assert_ne!(
            sample_instance(&GraphonSpec::new(g, 30, 0.7, 1))
                .unwrap()
                .complete,
            sample_instance(&GraphonSpec::new(g, 30, 0.7, 2))
                .unwrap()
                .complete
        );
    }
}

#[test]
fn linear_graphon_mean_matches_integral() {
    // Given the latents the entry mean is 5·mean(ξ) − 0.75 up to averaged noise;
    // one instance at n = 200 still has a latent-driven spread of about 0.1, so
    // the unconditional check averages 50 instances.
    let mut total = 0.0;
    for seed in 0..50 {
        let inst = sample_instance(&GraphonSpec::new(Graphon::F1, 200, 0.5, seed)).unwrap();
        let values = inst.complete.as_slice();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let xi_mean = inst.latents.iter().sum::<f64>() / inst.latents.len() as f64;
        assert!((mean - (5.0 * xi_mean - 0.75)).abs() < 0.005, "seed {seed}");
        total += mean;
    }
    assert!((total / 50.0 - 1.75).abs() < 0.05, "mean {}", total / 50.0);
}

#[test]
fn single_target_mask_flags_nothing() {
    let spec = GraphonSpec::new(Graphon::F2, 8, 0.4, 3);
    let inst = sample_instance(&spec).unwrap();
    let mask = mask_single_target(8);
    assert_eq!(mask.pair_count(), 0);
    let obs = inst.observe(&mask).unwrap();
    let counts = missing_counts(&obs);
    assert!(counts.per_row.iter().all(|&m| m == 0));
    let filled = fill_missing(&obs, &Square::zeros(9)).unwrap();
    for i in 0..9 {
        for j in 0..9 {
            if (i, j) != (8, 7) && (i, j) != (7, 8) {
                assert_eq!(filled.get(i, j), inst.complete.get(i, j));
            }
        }
    }
}

/// Upper-triangle pairs other than the target, ordered by value descending then index.
fn sorted_pairs(m: &Square) -> Vec<(usize, usize)> {
    let k = m.order();
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if (i, j) != (k - 2, k - 1) {
                pairs.push((i, j));
            }
        }
    }
    pairs.sort_by(|a, b| {
        m.get(b.0, b.1)
            .partial_cmp(&m.get(a.0, a.1))
            .unwrap()
            .then(a.cmp(b))
    });
    pairs
}

#[test]
fn largest_entries_mask_matches_sort_oracle() {
    let inst = sample_instance(&GraphonSpec::new(Graphon::F3, 9, 0.9, 4)).unwrap();
    let order = sorted_pairs(&inst.complete);
    for m0 in [0, 1, 3, 10, order.len()] {
        let mask = mask_mnar_largest(&inst.complete, m0).unwrap();
        assert!(mask.is_symmetric());
        assert_eq!(mask.pair_count(), m0);
        assert!(!mask.get(9, 8));
        for (rank, &(i, j)) in order.iter().enumerate() {
            assert_eq!(mask.get(i, j), rank < m0, "m0 {m0} pair ({i},{j})");
        }
    }
    assert!(mask_mnar_largest(&inst.complete, order.len() + 1).is_err());
}

#[test]
fn largest_entries_ties_break_lexicographically() {
    let m = Square::from_fn(5, |i, j| if i == j { 0.0 } else { 1.0 });
    let mask = mask_mnar_largest(&m, 2).unwrap();
    assert!(mask.get(0, 1) && mask.get(0, 2));
    assert_eq!(mask.pair_count(), 2);
}

#[test]
fn all_pairs_flags_everything_but_the_target() {
    let inst = sample_instance(&GraphonSpec::new(Graphon::F1, 6, 0.2, 2)).unwrap();
    let total = 7 * 6 / 2 - 1;
    for mask in [
        mask_mnar_largest(&inst.complete, total).unwrap(),
        mask_mcar(6, total, 3).unwrap(),
    ] {
        for i in 0..7 {
            for j in 0..7 {
                let expect = i != j && (i.min(j), i.max(j)) != (5, 6);
                assert_eq!(mask.get(i, j), expect);
            }
        }
    }
}

#[test]
fn random_mask_frequencies_are_uniform() {
    let (n, m0, draws) = (6, 5, 10_000);
    let pairs = 7 * 6 / 2 - 1;
    let mut hits = vec![vec![0u32; 7]; 7];
    for seed in 0..draws {
        let mask = mask_mcar(n, m0, seed).unwrap();
        assert_eq!(mask.pair_count(), m0);
        assert!(mask.is_symmetric() && !mask.get(6, 5));
        for i in 0..7 {
            for j in i + 1..7 {
                hits[i][j] += mask.get(i, j) as u32;
            }
        }
    }
    let p = m0 as f64 / pairs as f64;
    let sd = (draws as f64 * p * (1.0 - p)).sqrt();
    for i in 0..7 {
        for j in i + 1..7 {
            if (i, j) == (5, 6) {
                assert_eq!(hits[i][j], 0);
            } else {
                let dev = (hits[i][j] as f64 - draws as f64 * p).abs();
                assert!(dev <= 3.0 * sd, "pair ({i},{j}): {} hits", hits[i][j]);
            }
        }
    }
}

proptest! {
    #[test]
    fn graphons_are_symmetric(u in 0.001f64..0.999, v in 0.001f64..0.999) {
        for g in Graphon::ALL {
            prop_assert_eq!(graphon_value(g, u, v), graphon_value(g, v, u));
        }
    }

    #[test]
    fn random_masks_are_reproducible(n in 3usize..20, seed in any::<u64>(), frac in 0.0f64..1.0) {
        let m0 = (frac * ((n + 1) * n / 2 - 1) as f64) as usize;
        let a = mask_mcar(n, m0, seed).unwrap();
        prop_assert_eq!(&a, &mask_mcar(n, m0, seed).unwrap());
        prop_assert_eq!(a.pair_count(), m0);
        prop_assert!(!a.get(n, n - 1));
    }
}
