//! Monte Carlo runs over a grid of experimental cells.

use std::time::Instant;

use matconf_core::seed;
use matconf_core::simgen::{
    child_seed, mask_mcar, mask_mnar_largest, mask_single_target, sample_instance, GraphonSpec,
};
use rayon::prelude::*;

use crate::config::{Cell, ExperimentConfig, Missingness};
use crate::predict::{predict, PredictOptions, Prediction};
use crate::records::Record;

/// A cell is abandoned once this many of its replications fail.
pub const MAX_FAILURES: usize = 3;

#[derive(Debug, thiserror::Error)]
#[error(
    "cell {graphon} n={n} xi={xi_target} m0={m0} aborted after {failures} failed replications; first error: {first_error}"
)]
pub struct CellAborted {
    pub graphon: &'static str,
    pub n: usize,
    pub xi_target: f64,
    pub m0: usize,
    pub failures: usize,
    pub first_error: String,
}

struct Outcome {
    prediction: Prediction,
    truth: f64,
    bound: f64,
    time_ms: f64,
}

fn attempt(cfg: &ExperimentConfig, cell: &Cell, seed: u64) -> matconf_core::Result<Outcome> {
    let inst = sample_instance(&GraphonSpec::new(
        cell.graphon,
        cell.n,
        cell.xi_target,
        seed,
    ))?;
    let mask = match cfg.missingness {
        Missingness::SingleTarget => mask_single_target(cell.n),
        Missingness::MnarLargest => mask_mnar_largest(&inst.complete, cell.m0)?,
        Missingness::Mcar => mask_mcar(cell.n, cell.m0, seed::derive(seed, &[1]))?,
    };
    let obs = inst.observe(&mask)?;
    let opts = PredictOptions {
        method: cfg.method,
        alpha: cfg.alpha,
        grid_points: cfg.grid_points,
        refine_steps: cfg.refine_steps,
        iter_max: cfg.iter_max,
        seed: seed::derive(seed, &[2]),
    };
    let start = Instant::now();
    let prediction = predict(&obs, &opts)?;
    let time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(Outcome {
        prediction,
        truth: inst.truth,
        bound: inst.bound,
        time_ms,
    })
}

/// One replication; failures are recorded rather than returned.
pub fn run_replication(cfg: &ExperimentConfig, cell: &Cell, rep: usize) -> Record {
    let seed = child_seed(
        cfg.master_seed,
        cell.graphon,
        cell.n,
        cell.xi_target,
        cell.m0,
        rep,
    );
    let mut record = Record {
        graphon: cell.graphon,
        n: cell.n,
        xi_target: cell.xi_target,
        m0: cell.m0,
        method: cfg.method,
        rep,
        covered: false,
        total_length: 0.0,
        hull_length: 0.0,
        is_trivial: false,
        time_ms: 0.0,
        seed,
        truth: 0.0,
        bound: cell.graphon.default_bound(),
        intervals: Vec::new(),
        error: None,
    };
    match attempt(cfg, cell, seed) {
        Ok(out) => {
            let set = &out.prediction.set;
            record.covered = set.contains(out.truth);
            record.total_length = set.total_length();
            record.hull_length = set.hull_length();
            record.is_trivial = set.is_trivial();
            record.time_ms = out.time_ms;
            record.truth = out.truth;
            record.bound = out.bound;
            record.intervals = set.intervals().to_vec();
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// All replications of one cell, in replication order.
pub fn run_cell(cfg: &ExperimentConfig, cell: &Cell) -> Result<Vec<Record>, CellAborted> {
    let records: Vec<Record> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| run_replication(cfg, cell, rep))
        .collect();
    check_cell(cell, records)
}

/// Passes the records through unless [`MAX_FAILURES`] or more failed.
pub fn check_cell(cell: &Cell, records: Vec<Record>) -> Result<Vec<Record>, CellAborted> {
    let failed: Vec<&Record> = records.iter().filter(|r| r.failed()).collect();
    if failed.len() >= MAX_FAILURES {
        return Err(CellAborted {
            graphon: cell.graphon.name(),
            n: cell.n,
            xi_target: cell.xi_target,
            m0: cell.m0,
            failures: failed.len(),
            first_error: failed[0].error.clone().unwrap_or_default(),
        });
    }
    Ok(records)
}

/// Every cell in configuration order; `progress` is called after each cell
/// with its index and the cell count.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    mut progress: impl FnMut(usize, usize, &Cell, &[Record]),
) -> Result<Vec<Record>, CellAborted> {
    let cells = cfg.cells();
    let mut all = Vec::with_capacity(cells.len() * cfg.replications);
    for (k, cell) in cells.iter().enumerate() {
        let records = run_cell(cfg, cell)?;
        progress(k, cells.len(), cell, &records);
        all.extend(records);
    }
    Ok(all)
}
