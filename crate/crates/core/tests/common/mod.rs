#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use matconf_core::simgen::{sample_instance, Graphon, GraphonSpec};
use matconf_core::{Mask, ObservedMatrix, Square};

/// Cyclic Jacobi eigenvalue iteration. Returns eigenvalues and eigenvectors
/// (column `k` of the row-major `vectors` belongs to `values[k]`).
pub fn jacobi_eigen(m: &Square) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.order();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// Hard-thresholded spectral reconstruction built on [`jacobi_eigen`].
pub fn oracle_usvt(m: &Square, threshold: f64) -> Square {
    let n = m.order();
    let (vals, vecs) = jacobi_eigen(m);
    Square::from_fn(n, |i, j| {
        (0..n)
            .filter(|&k| vals[k].abs() > threshold)
            .map(|k| vals[k] * vecs[i][k] * vecs[j][k])
            .sum()
    })
}

/// Row-profile distance straight from the definition, as a triple loop.
pub fn oracle_dissimilarity(core: &Square, j: usize, jp: usize) -> f64 {
    let n = core.order();
    let mut total = 0.0;
    for l in 0..n {
        if l == j || l == jp {
            continue;
        }
        let mut inner = 0.0;
        for r in 0..n {
            inner += (core.get(r, j) - core.get(r, jp)) * core.get(r, l);
        }
        total += inner.abs();
    }
    total / (n * (n - 2)) as f64
}

/// Bandwidth by sorting all distances from column `j` and indexing with
/// integer arithmetic for a rational level `num / den`.
pub fn oracle_bandwidth(core: &Square, j: usize, num: usize, den: usize) -> f64 {
    let n = core.order();
    let mut d: Vec<f64> = (0..n)
        .filter(|&k| k != j)
        .map(|k| oracle_dissimilarity(core, j, k))
        .collect();
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = (num * (n - 1)).div_ceil(den);
    d[k.max(1) - 1].max(1e-12)
}

/// Smoothing scores as a double loop over `(j, j')`.
pub fn oracle_ns_scores(filled: &Square, bandwidths: &[f64]) -> Vec<f64> {
    let n = filled.order() - 1;
    let core = filled.leading_block(n);
    (0..n)
        .map(|j| {
            let mut s = 0.0;
            for k in 0..n {
                if k == j {
                    continue;
                }
                let d = oracle_dissimilarity(&core, j, k);
                let w = (1.0 - d / bandwidths[j]).max(0.0);
                s += w * (filled.get(n, j) - filled.get(n, k)).abs();
            }
            s
        })
        .collect()
}

pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03)
    }

    /// Uniform on `[0, 1)`.
    pub fn next(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, k: usize) -> usize {
        ((self.next() * k as f64) as usize).min(k - 1)
    }

    pub fn shuffle(&mut self, k: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            p.swap(i, self.below(i + 1));
        }
        p
    }
}

/// Symmetric matrix with entries uniform on `[−bound, bound]`.
pub fn random_symmetric(order: usize, bound: f64, rng: &mut Lcg) -> Square {
    let mut m = Square::zeros(order);
    for i in 0..order {
        for j in 0..=i {
            m.set_sym(i, j, bound * (2.0 * rng.next() - 1.0));
        }
    }
    m
}

/// Symmetric mask flagging each off-diagonal pair with probability `p`.
pub fn random_mask(order: usize, p: f64, rng: &mut Lcg) -> Mask {
    let mut m = Mask::empty(order);
    for i in 0..order {
        for j in (i + 1)..order {
            if rng.next() < p {
                m.set_pair(i, j, true);
            }
        }
    }
    m
}

/// A graphon sample observed through `mask`.
pub fn graphon_obs(
    graphon: Graphon,
    n: usize,
    seed: u64,
    mask: &Mask,
) -> (ObservedMatrix, Square, f64) {
    let inst = sample_instance(&GraphonSpec::new(graphon, n, 0.5, seed)).unwrap();
    let obs = inst.observe(mask).unwrap();
    (obs, inst.complete, inst.truth)
}
