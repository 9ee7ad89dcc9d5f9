//! Experiment runner: executes every configured (strategy, seed) pair on one
//! shared dataset and writes `curves.csv`, `summary.txt`, and the final
//! models into the output directory.
//!
//! Data flow: generate -> split (seed stream 1 of the data seed) ->
//! optionally standardize on training statistics. Run `i` of each strategy
//! trains with base seed + `i`. Runs execute in parallel, one thread each;
//! results are collected into pre-assigned slots and all files are written
//! by this thread afterward, so output bytes do not depend on scheduling.
//!
//! `summary.txt` sections, in fixed order: `[config]`, `[data]`,
//! `[problem sizes]`, `[runs]`, `[sequential stages]`, `[strategy stats]`,
//! `[comparison]`, `[divergences]`, `[timing]`. All error statistics are
//! final-epoch validation errors and are recomputable from `curves.csv`.

use std::path::{Path, PathBuf};

use layerwise_core::{
    generate, split, standardize_apply, standardize_fit, stream_seed, train_full,
    train_sequential, Architecture, Error as CoreError, Hyperparams, Strategy, TrainReport,
};

use crate::config::{BudgetMode, ExperimentConfig};
use crate::curves::{rows_from_report, write_curves, CurveRow};
use crate::error::{CliError, Result};
use crate::model_text::write_model;
use crate::num_fmt::fmt_f64;

pub const CURVES_FILE: &str = "curves.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

/// How one (strategy, seed) run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Completed(TrainReport),
    Diverged { stage: usize, epoch: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub strategy: Strategy,
    pub seed: u64,
    pub outcome: RunOutcome,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    /// One entry per planned run, in strategy-then-seed order.
    pub entries: Vec<RunEntry>,
    pub train_len: usize,
    pub val_len: usize,
    pub out_dir: PathBuf,
    pub elapsed_seconds: f64,
}

impl ExperimentOutcome {
    pub fn is_clean(&self) -> bool {
        self.entries
            .iter()
            .all(|e| matches!(e.outcome, RunOutcome::Completed(_)))
    }

    pub fn divergence_count(&self) -> usize {
        self.entries.len() - self.completed(None).len()
    }

    /// Completed (seed, report) pairs, optionally filtered to one strategy.
    pub fn completed(&self, strategy: Option<Strategy>) -> Vec<(u64, &TrainReport)> {
        self.entries
            .iter()
            .filter(|e| strategy.is_none_or(|s| e.strategy == s))
            .filter_map(|e| match &e.outcome {
                RunOutcome::Completed(report) => Some((e.seed, report)),
                RunOutcome::Diverged { .. } => None,
            })
            .collect()
    }

    /// Final-epoch validation error per completed seed of one strategy.
    pub fn final_val_errors(&self, strategy: Strategy) -> Vec<(u64, f64)> {
        self.completed(Some(strategy))
            .into_iter()
            .map(|(seed, report)| {
                let last_stage = report.stages.last().expect("reports have stages");
                let last = *last_stage.val_error.last().expect("epochs >= 1");
                (seed, last)
            })
            .collect()
    }

    pub fn curves_path(&self) -> PathBuf {
        self.out_dir.join(CURVES_FILE)
    }

    pub fn summary_path(&self) -> PathBuf {
        self.out_dir.join(SUMMARY_FILE)
    }
}

/// Middle value by sort order; mean of the two middle values for even
/// counts. `values` must be nonempty.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Signed full-vs-sequential comparison of final validation errors; reports
/// magnitude and direction, makes no judgment. Both slices must be nonempty
/// (seed, error) lists.
pub fn comparison_block(full: &[(u64, f64)], sequential: &[(u64, f64)]) -> String {
    let mut out = String::new();
    for (seed, f) in full {
        if let Some((_, s)) = sequential.iter().find(|(s_seed, _)| s_seed == seed) {
            out.push_str(&format!(
                "seed {seed}: full - sequential = {}\n",
                fmt_f64(f - s)
            ));
        }
    }
    let full_median = median(&full.iter().map(|(_, e)| *e).collect::<Vec<_>>());
    let seq_median = median(&sequential.iter().map(|(_, e)| *e).collect::<Vec<_>>());
    let diff = full_median - seq_median;
    out.push_str(&format!("median full = {}\n", fmt_f64(full_median)));
    out.push_str(&format!("median sequential = {}\n", fmt_f64(seq_median)));
    out.push_str(&format!(
        "median difference (full - sequential) = {}\n",
        fmt_f64(diff)
    ));
    let direction = if diff > 0.0 {
        "sequential median is lower"
    } else if diff < 0.0 {
        "full median is lower"
    } else {
        "medians are equal"
    };
    out.push_str(&format!("direction: {direction}\n"));
    out
}

fn problem_sizes(arch: &Architecture, strategy: Strategy) -> Vec<usize> {
    match strategy {
        Strategy::Full => vec![arch.param_count_full()],
        Strategy::Sequential => (1..=arch.depth())
            .map(|k| arch.param_count_stage(k).expect("stage in range"))
            .collect(),
    }
}

fn build_summary(
    cfg: &ExperimentConfig,
    arch: &Architecture,
    outcome: &ExperimentOutcome,
) -> String {
    let mut out = String::from("layerwise experiment summary\n\n");

    out.push_str("[config]\n");
    out.push_str(&cfg.render());
    out.push('\n');

    out.push_str("[data]\n");
    out.push_str(&format!("samples = {}\n", cfg.generator.n));
    out.push_str(&format!("train = {}\n", outcome.train_len));
    out.push_str(&format!("validation = {}\n\n", outcome.val_len));

    out.push_str("[problem sizes]\n");
    for &strategy in &cfg.strategies {
        let sizes: Vec<String> = problem_sizes(arch, strategy)
            .iter()
            .map(|s| s.to_string())
            .collect();
        out.push_str(&format!("{} = {}\n", strategy.name(), sizes.join(",")));
    }
    out.push('\n');

    out.push_str("[runs]\n");
    for entry in &outcome.entries {
        match &entry.outcome {
            RunOutcome::Completed(report) => {
                let last_stage = report.stages.last().expect("reports have stages");
                let last = *last_stage.val_error.last().expect("epochs >= 1");
                out.push_str(&format!(
                    "{} seed {}: final_val_error = {}\n",
                    entry.strategy.name(),
                    entry.seed,
                    fmt_f64(last)
                ));
            }
            RunOutcome::Diverged { stage, epoch } => {
                out.push_str(&format!(
                    "{} seed {}: diverged at stage {stage} epoch {epoch}\n",
                    entry.strategy.name(),
                    entry.seed,
                ));
            }
        }
    }
    out.push('\n');

    out.push_str("[sequential stages]\n");
    let sequential_runs = outcome.completed(Some(Strategy::Sequential));
    if sequential_runs.is_empty() {
        out.push_str("none\n");
    } else {
        let stages = arch.depth();
        for stage in 1..=stages {
            let finals: Vec<f64> = sequential_runs
                .iter()
                .filter_map(|(_, report)| {
                    report
                        .stages
                        .iter()
                        .find(|s| s.stage_index == stage)
                        .and_then(|s| s.val_error.last())
                        .copied()
                })
                .collect();
            if !finals.is_empty() {
                out.push_str(&format!(
                    "stage {stage}: median_final_val_error = {}\n",
                    fmt_f64(median(&finals))
                ));
            }
        }
    }
    out.push('\n');

    out.push_str("[strategy stats]\n");
    for &strategy in &cfg.strategies {
        let errors: Vec<f64> = outcome
            .final_val_errors(strategy)
            .iter()
            .map(|(_, e)| *e)
            .collect();
        if errors.is_empty() {
            out.push_str(&format!("{} = no completed runs\n", strategy.name()));
            continue;
        }
        let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
        let max = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        out.push_str(&format!(
            "{}: median = {} min = {} max = {} (runs = {})\n",
            strategy.name(),
            fmt_f64(median(&errors)),
            fmt_f64(min),
            fmt_f64(max),
            errors.len()
        ));
    }
    out.push('\n');

    out.push_str("[comparison]\n");
    let full_errors = outcome.final_val_errors(Strategy::Full);
    let seq_errors = outcome.final_val_errors(Strategy::Sequential);
    if full_errors.is_empty() || seq_errors.is_empty() {
        out.push_str("omitted: requires completed runs of both full and sequential\n");
    } else {
        out.push_str(&comparison_block(&full_errors, &seq_errors));
    }
    out.push('\n');

    out.push_str("[divergences]\n");
    if outcome.is_clean() {
        out.push_str("none\n");
    } else {
        for entry in &outcome.entries {
            if let RunOutcome::Diverged { stage, epoch } = entry.outcome {
                out.push_str(&format!(
                    "{} seed {}: stage {stage} epoch {epoch}\n",
                    entry.strategy.name(),
                    entry.seed
                ));
            }
        }
    }
    out.push('\n');

    out.push_str("[timing]\n");
    out.push_str(&format!(
        "wall_clock_seconds = {:.3}\n",
        outcome.elapsed_seconds
    ));
    out
}

fn model_file_name(strategy: Strategy, seed: u64) -> String {
    format!("model_{}_seed_{}.txt", strategy.name(), seed)
}

/// Runs every configured (strategy, seed) pair and writes all output files.
///
/// Divergences do not abort the experiment; they are recorded in the summary
/// and reflected in [`ExperimentOutcome::is_clean`]. Any other training
/// error is a bug or misconfiguration and is returned.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let started = std::time::Instant::now();
    let arch = cfg.architecture();

    let full_set = generate(&cfg.generator)?;
    let (mut train, mut val) = split(&full_set, cfg.val_fraction, stream_seed(cfg.generator.seed, 1))?;
    if cfg.standardize {
        let stats = standardize_fit(&train);
        train = standardize_apply(&train, &stats)?;
        val = standardize_apply(&val, &stats)?;
    }

    let mut plan: Vec<(Strategy, Hyperparams)> = Vec::new();
    for &strategy in &cfg.strategies {
        let epochs = match (strategy, cfg.budget) {
            (Strategy::Full, BudgetMode::MatchedTotal) => cfg.hyperparams.epochs * arch.depth(),
            _ => cfg.hyperparams.epochs,
        };
        for i in 0..cfg.seeds {
            let hp = Hyperparams {
                epochs,
                seed: cfg.hyperparams.seed.wrapping_add(i as u64),
                ..cfg.hyperparams.clone()
            };
            plan.push((strategy, hp));
        }
    }

    let results: Vec<std::result::Result<TrainReport, CoreError>> =
        std::thread::scope(|scope| {
            let arch = &arch;
            let train = &train;
            let val = &val;
            let handles: Vec<_> = plan
                .iter()
                .map(|(strategy, hp)| {
                    scope.spawn(move || match strategy {
                        Strategy::Full => train_full(arch, train, val, hp),
                        Strategy::Sequential => train_sequential(arch, train, val, hp),
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("training worker panicked"))
                .collect()
        });

    let mut entries = Vec::with_capacity(plan.len());
    for ((strategy, hp), result) in plan.into_iter().zip(results) {
        let outcome = match result {
            Ok(report) => RunOutcome::Completed(report),
            Err(CoreError::Diverged { stage, epoch }) => RunOutcome::Diverged { stage, epoch },
            Err(other) => return Err(other.into()),
        };
        entries.push(RunEntry {
            strategy,
            seed: hp.seed,
            outcome,
        });
    }

    let outcome = ExperimentOutcome {
        entries,
        train_len: train.len(),
        val_len: val.len(),
        out_dir: cfg.out_dir.clone(),
        elapsed_seconds: started.elapsed().as_secs_f64(),
    };
    write_outputs(cfg, &arch, &outcome)?;
    Ok(outcome)
}

fn write_outputs(
    cfg: &ExperimentConfig,
    arch: &Architecture,
    outcome: &ExperimentOutcome,
) -> Result<()> {
    let dir: &Path = &cfg.out_dir;
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;

    let mut rows: Vec<CurveRow> = Vec::new();
    for entry in &outcome.entries {
        if let RunOutcome::Completed(report) = &entry.outcome {
            rows.extend(rows_from_report(entry.seed, report));
        }
    }
    write_curves(&rows, &outcome.curves_path())?;

    for entry in &outcome.entries {
        if let RunOutcome::Completed(report) = &entry.outcome {
            write_model(
                &report.model,
                &dir.join(model_file_name(entry.strategy, entry.seed)),
            )?;
        }
    }

    let summary = build_summary(cfg, arch, outcome);
    std::fs::write(outcome.summary_path(), summary)
        .map_err(|e| CliError::io(format!("writing {}", outcome.summary_path().display()), e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_handles_odd_even_and_unsorted_inputs() {
        assert_eq!(median(&[3.0]), 3.0);
        assert_eq!(median(&[5.0, 1.0, 3.0]), 3.0);
        assert_eq!(median(&[4.0, 1.0]), 2.5);
        assert_eq!(median(&[2.0, 8.0, 6.0, 4.0]), 5.0);
    }

    #[test]
    fn identical_inputs_compare_as_zero_difference() {
        let runs = vec![(0u64, 0.25), (1u64, 0.5)];
        let block = comparison_block(&runs, &runs);
        assert!(block.contains(&format!("seed 0: full - sequential = {}", fmt_f64(0.0))));
        assert!(block.contains(&format!(
            "median difference (full - sequential) = {}",
            fmt_f64(0.0)
        )));
        assert!(block.contains("medians are equal"));
    }

    #[test]
    fn comparison_reports_direction_and_magnitude() {
        let full = vec![(0u64, 0.2)];
        let seq = vec![(0u64, 0.1)];
        let block = comparison_block(&full, &seq);
        assert!(block.contains(&format!(
            "median difference (full - sequential) = {}",
            fmt_f64(0.2 - 0.1)
        )));
        assert!(block.contains("sequential median is lower"));

        let block = comparison_block(&seq, &full);
        assert!(block.contains("full median is lower"));
    }

    #[test]
    fn problem_sizes_match_architecture_arithmetic() {
        let arch = Architecture::new(
            2,
            vec![3, 3, 3],
            layerwise_core::ActivationKind::Relu,
            layerwise_core::ActivationKind::Identity,
        )
        .unwrap();
        assert_eq!(problem_sizes(&arch, Strategy::Full), vec![37]);
        assert_eq!(problem_sizes(&arch, Strategy::Sequential), vec![13, 16, 16]);
    }
}
