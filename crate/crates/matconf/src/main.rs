use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use matconf::config::{default_summary_path, ExperimentConfig, Method};
use matconf::harness::run_experiment;
use matconf::matrix_csv::read_matrix_path;
use matconf::predict::{predict, PredictOptions};
use matconf::records::{
    read_records_path, summarize, write_records_path, write_summary, write_summary_path,
};
use matconf::report::PredictReport;

#[derive(Parser)]
#[command(
    name = "matconf",
    version,
    about = "Conformal prediction sets for one entry of a partially observed symmetric matrix"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Multi-guess union with the singular-value score.
    Alg1,
    /// Single guess with stability slack and the smoothing score.
    Alg2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Prediction set for one entry of a matrix read from CSV.
    Predict {
        /// Square CSV matrix; empty fields or NA mark missing entries.
        matrix: PathBuf,
        /// Bound C0 on the absolute value of every entry.
        #[arg(long)]
        bound: f64,
        /// 1-based row of the entry to predict [default: last row].
        #[arg(long)]
        row: Option<usize>,
        /// 1-based column of the entry to predict [default: second to last].
        #[arg(long)]
        col: Option<usize>,
        #[arg(long, value_enum, default_value = "alg1")]
        method: MethodArg,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 401)]
        grid_points: usize,
        /// Bisections locating each end of the set between grid points.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(0..=60))]
        refine_steps: u32,
        #[arg(long, default_value_t = 8)]
        iter_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include the per-column slack of the stability method.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Run a simulation described by a TOML file.
    Simulate {
        config: PathBuf,
        /// Records CSV path, overriding the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed, overriding the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Suppress per-cell progress lines.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Per-cell summary of a records CSV.
    Summarize {
        records: PathBuf,
        /// Summary CSV path [default: standard output].
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Predict {
            matrix,
            bound,
            row,
            col,
            method,
            alpha,
            grid_points,
            refine_steps,
            iter_max,
            seed,
            format,
            out,
            verbose,
        } => {
            let data = read_matrix_path(&matrix)
                .with_context(|| format!("reading {}", matrix.display()))?;
            let order = data.order();
            let row = row.unwrap_or(order);
            let col = col.unwrap_or(order.saturating_sub(1));
            if row == 0 || col == 0 || row > order || col > order {
                bail!("entry ({row}, {col}) is outside the {order}x{order} matrix (indices are 1-based)");
            }
            let (obs, perm) = data
                .to_observed(bound, row - 1, col - 1)
                .context("building the observation")?;
            let opts = PredictOptions {
                method: match method {
                    MethodArg::Alg1 => Method::Alg1,
                    MethodArg::Alg2 => Method::Alg2,
                },
                alpha,
                grid_points,
                refine_steps,
                iter_max,
                seed,
            };
            let prediction = predict(&obs, &opts).context("prediction failed")?;
            let report = PredictReport::new(row - 1, col - 1, &obs, &perm, &opts, &prediction);
            let text = match format {
                Format::Text => report.to_text(verbose),
                Format::Json => report.to_json() + "\n",
            };
            match out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
        }
        Command::Simulate {
            config,
            out,
            seed,
            quiet,
        } => {
            let mut cfg = ExperimentConfig::from_path(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            if let Some(path) = out {
                cfg.summary_output = default_summary_path(&path);
                cfg.output = path;
            }
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            let records = run_experiment(&cfg, |k, total, cell, recs| {
                if !quiet {
                    let covered = recs.iter().filter(|r| r.covered).count();
                    eprintln!(
                        "[{}/{}] {} n={} xi={} m0={}: coverage {}/{}",
                        k + 1,
                        total,
                        cell.graphon.name(),
                        cell.n,
                        cell.xi_target,
                        cell.m0,
                        covered,
                        recs.len()
                    );
                }
            })?;
            for path in [&cfg.output, &cfg.summary_output] {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)
                        .with_context(|| format!("creating {}", dir.display()))?;
                }
            }
            write_records_path(&records, &cfg.output)
                .with_context(|| format!("writing {}", cfg.output.display()))?;
            write_summary_path(&summarize(&records)?, &cfg.summary_output)
                .with_context(|| format!("writing {}", cfg.summary_output.display()))?;
            if !quiet {
                eprintln!(
                    "wrote {} records to {} and the summary to {}",
                    records.len(),
                    cfg.output.display(),
                    cfg.summary_output.display()
                );
            }
        }
        Command::Summarize { records, out } => {
            let recs = read_records_path(&records)
                .with_context(|| format!("reading {}", records.display()))?;
            let rows = summarize(&recs)?;
            match out {
                Some(path) => write_summary_path(&rows, &path)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => write_summary(&rows, std::io::stdout().lock())?,
            }
        }
    }
    Ok(())
}
