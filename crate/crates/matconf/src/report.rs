//! The result of `matconf predict`, as text or JSON.

use std::fmt::Write as _;

use matconf_core::{missing_counts, ObservedMatrix, Permutation};
use serde::Serialize;

use crate::config::Method;
use crate::predict::{PredictOptions, Prediction};

pub const INDEX_WARNING: &str =
    "coverage holds only if the predicted entry was chosen without looking at the matrix values";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauEntry {
    /// 1-based column in the input file.
    pub column: usize,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictReport {
    /// 1-based position of the predicted entry in the input file.
    pub row: usize,
    pub col: usize,
    pub method: &'static str,
    pub alpha: f64,
    pub bound: f64,
    pub grid_points: usize,
    pub refine_steps: u32,
    pub iter_max: Option<usize>,
    pub seed: u64,
    pub intervals: Vec<[f64; 2]>,
    pub total_length: f64,
    pub hull_length: f64,
    pub is_trivial: bool,
    /// Missing entries in the predicted entry's row, the entry itself excluded.
    pub row_missing: usize,
    pub trivial_forced: bool,
    pub tau: Option<Vec<TauEntry>>,
    pub warning: &'static str,
}

impl PredictReport {
    /// `perm` maps input indices to the relabelled ones used by `obs`.
    pub fn new(
        row: usize,
        col: usize,
        obs: &ObservedMatrix,
        perm: &Permutation,
        opts: &PredictOptions,
        prediction: &Prediction,
    ) -> Self {
        let set = &prediction.set;
        let back = perm.inverse();
        let tau = prediction.tau.as_ref().map(|t| {
            let mut entries: Vec<TauEntry> = t
                .values()
                .iter()
                .enumerate()
                .map(|(j, &tau)| TauEntry {
                    column: back.apply(j) + 1,
                    tau,
                })
                .collect();
            entries.sort_by_key(|e| e.column);
            entries
        });
        Self {
            row: row + 1,
            col: col + 1,
            method: opts.method.name(),
            alpha: opts.alpha,
            bound: obs.bound(),
            grid_points: opts.grid_points,
            refine_steps: opts.refine_steps,
            iter_max: (opts.method == Method::Alg1).then_some(opts.iter_max),
            seed: opts.seed,
            intervals: set.intervals().iter().map(|iv| [iv.lo, iv.hi]).collect(),
            total_length: set.total_length(),
            hull_length: set.hull_length(),
            is_trivial: set.is_trivial(),
            row_missing: missing_counts(obs).target_row,
            trivial_forced: prediction.trivial_forced,
            tau,
            warning: INDEX_WARNING,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable form; `verbose` adds the slack vector.
    pub fn to_text(&self, verbose: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "entry ({}, {}), method {}, alpha {}, bound {}",
            self.row, self.col, self.method, self.alpha, self.bound
        );
        let set = if self.intervals.is_empty() {
            "empty".to_owned()
        } else {
            self.intervals
                .iter()
                .map(|[lo, hi]| format!("[{lo:.6}, {hi:.6}]"))
                .collect::<Vec<_>>()
                .join(" U ")
        };
        let _ = writeln!(s, "prediction set: {set}");
        let _ = writeln!(
            s,
            "total length {:.6}, hull length {:.6}, trivial {}",
            self.total_length, self.hull_length, self.is_trivial
        );
        let _ = writeln!(
            s,
            "missing entries in row {}: {}",
            self.row, self.row_missing
        );
        if self.trivial_forced && self.method == Method::Alg2.name() {
            let _ = writeln!(
                s,
                "note: the row misses at least ceil(alpha*n) entries, so the stability method returns the whole range"
            );
        }
        if verbose {
            if let Some(tau) = &self.tau {
                let _ = writeln!(s, "slack per column:");
                for e in tau {
                    let _ = writeln!(s, "  {:>5}  {:.6}", e.column, e.tau);
                }
            }
        }
        let _ = writeln!(s, "warning: {}", self.warning);
        s
    }
}
