//! Experiment configuration: a flat `section.key = value` text format.
//!
//! Grammar: one `key = value` pair per line; `#` starts a comment anywhere;
//! blank lines are ignored. Every key has a default, so the empty file is the
//! builtin experiment. Unknown keys, malformed values, and violated value
//! constraints are reported with the key name and line number.
//!
//! Keys and defaults:
//!
//! ```text
//! arch.input_dim = 2                  # network input width, >= 1
//! arch.hidden = 16,16,16,16,16        # hidden layer widths, each >= 1
//! arch.hidden_activation = relu       # relu | identity | tanh
//! arch.output_activation = identity   # relu | identity | tanh
//! data.n = 500                        # generated samples, >= 1
//! data.x0_low = 0.5                   # initial-value range, 0 < low <= high
//! data.x0_high = 2
//! data.a_low = -1                     # rate range (the target), low <= high
//! data.a_high = 1
//! data.t1 = 2                         # second measurement time
//! data.seed = 42                      # generator seed
//! data.val_fraction = 0.2             # held-out fraction, in (0, 1)
//! data.standardize = true             # standardize inputs on train stats
//! train.optimizer = adam              # sgd | adam
//! train.learning_rate = 0.001         # >= 0
//! train.batch_size = 32               # >= 1
//! train.epochs = 200                  # per optimization problem, >= 1
//! train.loss = l1                     # l1 | l2
//! train.seed = 0                      # base seed; run i uses seed + i
//! train.adam_beta1 = 0.9              # in (0, 1)
//! train.adam_beta2 = 0.999            # in (0, 1)
//! train.adam_epsilon = 0.00000001     # > 0
//! run.strategies = full,sequential    # subset of {full, sequential}
//! run.seeds = 5                       # runs per strategy, >= 1
//! run.budget = per_stage              # per_stage | matched_total
//! run.out = out                       # output directory
//! ```
//!
//! `run.budget = matched_total` multiplies the full strategy's epochs by the
//! number of hidden layers so both strategies spend the same total epochs;
//! `per_stage` gives every optimization problem the same count.

use std::collections::HashMap;
use std::path::PathBuf;

use layerwise_core::{
    ActivationKind, Architecture, GeneratorConfig, Hyperparams, LossNorm, OptimizerKind, Strategy,
};

use crate::error::{CliError, Result};

/// How training epochs are allotted to the full strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetMode {
    /// Every optimization problem (each stage, and the full run) gets the
    /// configured epoch count.
    PerStage,
    /// The full run gets epochs x stage count, matching the sequential
    /// strategy's total.
    MatchedTotal,
}

impl BudgetMode {
    pub fn name(self) -> &'static str {
        match self {
            BudgetMode::PerStage => "per_stage",
            BudgetMode::MatchedTotal => "matched_total",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "per_stage" => Some(BudgetMode::PerStage),
            "matched_total" => Some(BudgetMode::MatchedTotal),
            _ => None,
        }
    }
}

/// A fully resolved experiment description; every field is validated.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub hidden_activation: ActivationKind,
    pub output_activation: ActivationKind,
    pub generator: GeneratorConfig,
    pub val_fraction: f64,
    pub standardize: bool,
    pub hyperparams: Hyperparams,
    pub strategies: Vec<Strategy>,
    pub seeds: usize,
    pub budget: BudgetMode,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            input_dim: 2,
            hidden: vec![16; 5],
            hidden_activation: ActivationKind::Relu,
            output_activation: ActivationKind::Identity,
            generator: GeneratorConfig::default(),
            val_fraction: 0.2,
            standardize: true,
            hyperparams: Hyperparams::default(),
            strategies: vec![Strategy::Full, Strategy::Sequential],
            seeds: 5,
            budget: BudgetMode::PerStage,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn architecture(&self) -> Architecture {
        Architecture::new(
            self.input_dim,
            self.hidden.clone(),
            self.hidden_activation,
            self.output_activation,
        )
        .expect("config validation guarantees a buildable architecture")
    }

    /// The effective configuration as config-file text, in documented key
    /// order. Parsing the result reproduces `self`.
    pub fn render(&self) -> String {
        let hidden: Vec<String> = self.hidden.iter().map(|w| w.to_string()).collect();
        let strategies: Vec<&str> = self.strategies.iter().map(|s| s.name()).collect();
        let hp = &self.hyperparams;
        format!(
            "arch.input_dim = {}\n\
             arch.hidden = {}\n\
             arch.hidden_activation = {}\n\
             arch.output_activation = {}\n\
             data.n = {}\n\
             data.x0_low = {}\n\
             data.x0_high = {}\n\
             data.a_low = {}\n\
             data.a_high = {}\n\
             data.t1 = {}\n\
             data.seed = {}\n\
             data.val_fraction = {}\n\
             data.standardize = {}\n\
             train.optimizer = {}\n\
             train.learning_rate = {}\n\
             train.batch_size = {}\n\
             train.epochs = {}\n\
             train.loss = {}\n\
             train.seed = {}\n\
             train.adam_beta1 = {}\n\
             train.adam_beta2 = {}\n\
             train.adam_epsilon = {}\n\
             run.strategies = {}\n\
             run.seeds = {}\n\
             run.budget = {}\n\
             run.out = {}\n",
            self.input_dim,
            hidden.join(","),
            self.hidden_activation.name(),
            self.output_activation.name(),
            self.generator.n,
            self.generator.x0_range.0,
            self.generator.x0_range.1,
            self.generator.a_range.0,
            self.generator.a_range.1,
            self.generator.t1,
            self.generator.seed,
            self.val_fraction,
            self.standardize,
            hp.optimizer.name(),
            hp.learning_rate,
            hp.batch_size,
            hp.epochs,
            hp.loss.name(),
            hp.seed,
            hp.adam_beta1,
            hp.adam_beta2,
            hp.adam_epsilon,
            strategies.join(","),
            self.seeds,
            self.budget.name(),
            self.out_dir.display(),
        )
    }
}

fn err_at(line: usize, key: &str, msg: impl Into<String>) -> CliError {
    CliError::ConfigAt {
        line,
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn parse_usize(value: &str, min: usize, key: &str, line: usize) -> Result<usize> {
    let n: usize = value
        .parse()
        .map_err(|_| err_at(line, key, format!("expected an integer, got `{value}`")))?;
    if n < min {
        return Err(err_at(line, key, format!("must be >= {min}, got {n}")));
    }
    Ok(n)
}

fn parse_u64(value: &str, key: &str, line: usize) -> Result<u64> {
    value.parse().map_err(|_| {
        err_at(
            line,
            key,
            format!("expected an unsigned integer, got `{value}`"),
        )
    })
}

fn parse_float(value: &str, key: &str, line: usize) -> Result<f64> {
    let x: f64 = value
        .parse()
        .map_err(|_| err_at(line, key, format!("expected a number, got `{value}`")))?;
    if !x.is_finite() {
        return Err(err_at(line, key, "must be finite"));
    }
    Ok(x)
}

fn parse_bool(value: &str, key: &str, line: usize) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(err_at(
            line,
            key,
            format!("expected `true` or `false`, got `{value}`"),
        )),
    }
}

fn parse_activation(value: &str, key: &str, line: usize) -> Result<ActivationKind> {
    ActivationKind::from_name(value).ok_or_else(|| {
        err_at(
            line,
            key,
            format!("unknown activation `{value}` (expected relu, identity, tanh)"),
        )
    })
}

/// Parses a comma-separated strategy list; shared by the config key and the
/// `--strategies` flag.
pub fn parse_strategies(value: &str) -> std::result::Result<Vec<Strategy>, String> {
    let mut out = Vec::new();
    for part in value.split(',') {
        let name = part.trim();
        let strategy = Strategy::from_name(name).ok_or_else(|| {
            format!("unknown strategy `{name}` (expected full, sequential)")
        })?;
        if out.contains(&strategy) {
            return Err(format!("duplicate strategy `{name}`"));
        }
        out.push(strategy);
    }
    Ok(out)
}

fn apply_key(cfg: &mut ExperimentConfig, key: &str, value: &str, line: usize) -> Result<()> {
    match key {
        "arch.input_dim" => cfg.input_dim = parse_usize(value, 1, key, line)?,
        "arch.hidden" => {
            let mut widths = Vec::new();
            for part in value.split(',') {
                widths.push(parse_usize(part.trim(), 1, key, line)?);
            }
            cfg.hidden = widths;
        }
        "arch.hidden_activation" => cfg.hidden_activation = parse_activation(value, key, line)?,
        "arch.output_activation" => cfg.output_activation = parse_activation(value, key, line)?,
        "data.n" => cfg.generator.n = parse_usize(value, 1, key, line)?,
        "data.x0_low" => cfg.generator.x0_range.0 = parse_float(value, key, line)?,
        "data.x0_high" => cfg.generator.x0_range.1 = parse_float(value, key, line)?,
        "data.a_low" => cfg.generator.a_range.0 = parse_float(value, key, line)?,
        "data.a_high" => cfg.generator.a_range.1 = parse_float(value, key, line)?,
        "data.t1" => cfg.generator.t1 = parse_float(value, key, line)?,
        "data.seed" => cfg.generator.seed = parse_u64(value, key, line)?,
        "data.val_fraction" => {
            let f = parse_float(value, key, line)?;
            if !(f > 0.0 && f < 1.0) {
                return Err(err_at(line, key, format!("must lie in (0, 1), got {f}")));
            }
            cfg.val_fraction = f;
        }
        "data.standardize" => cfg.standardize = parse_bool(value, key, line)?,
        "train.optimizer" => {
            cfg.hyperparams.optimizer = OptimizerKind::from_name(value).ok_or_else(|| {
                err_at(
                    line,
                    key,
                    format!("unknown optimizer `{value}` (expected sgd, adam)"),
                )
            })?
        }
        "train.learning_rate" => {
            let lr = parse_float(value, key, line)?;
            if lr < 0.0 {
                return Err(err_at(line, key, format!("must be >= 0, got {lr}")));
            }
            cfg.hyperparams.learning_rate = lr;
        }
        "train.batch_size" => cfg.hyperparams.batch_size = parse_usize(value, 1, key, line)?,
        "train.epochs" => cfg.hyperparams.epochs = parse_usize(value, 1, key, line)?,
        "train.loss" => {
            cfg.hyperparams.loss = LossNorm::from_name(value).ok_or_else(|| {
                err_at(line, key, format!("unknown loss `{value}` (expected l1, l2)"))
            })?
        }
        "train.seed" => cfg.hyperparams.seed = parse_u64(value, key, line)?,
        "train.adam_beta1" | "train.adam_beta2" => {
            let beta = parse_float(value, key, line)?;
            if !(beta > 0.0 && beta < 1.0) {
                return Err(err_at(line, key, format!("must lie in (0, 1), got {beta}")));
            }
            if key == "train.adam_beta1" {
                cfg.hyperparams.adam_beta1 = beta;
            } else {
                cfg.hyperparams.adam_beta2 = beta;
            }
        }
        "train.adam_epsilon" => {
            let eps = parse_float(value, key, line)?;
            if eps <= 0.0 {
                return Err(err_at(line, key, format!("must be > 0, got {eps}")));
            }
            cfg.hyperparams.adam_epsilon = eps;
        }
        "run.strategies" => {
            cfg.strategies = parse_strategies(value).map_err(|msg| err_at(line, key, msg))?
        }
        "run.seeds" => cfg.seeds = parse_usize(value, 1, key, line)?,
        "run.budget" => {
            cfg.budget = BudgetMode::from_name(value).ok_or_else(|| {
                err_at(
                    line,
                    key,
                    format!("unknown budget mode `{value}` (expected per_stage, matched_total)"),
                )
            })?
        }
        "run.out" => {
            if value.is_empty() {
                return Err(err_at(line, key, "must not be empty"));
            }
            cfg.out_dir = PathBuf::from(value);
        }
        _ => return Err(err_at(line, key, "unknown key")),
    }
    Ok(())
}

/// Cross-key checks that single-key parsing cannot see. `seen` maps keys to
/// the line where the user set them, so errors point at the culprit.
fn validate_cross(cfg: &ExperimentConfig, seen: &HashMap<String, usize>) -> Result<()> {
    let blame = |keys: &[&str], msg: String| -> CliError {
        let hit = keys
            .iter()
            .filter_map(|k| seen.get(*k).map(|line| (*line, *k)))
            .max();
        match hit {
            Some((line, key)) => err_at(line, key, msg),
            None => CliError::ConfigKey {
                key: keys.join("/"),
                msg,
            },
        }
    };
    let (x0_low, x0_high) = cfg.generator.x0_range;
    if !(x0_low > 0.0 && x0_low <= x0_high) {
        return Err(blame(
            &["data.x0_low", "data.x0_high"],
            format!("x0 range must satisfy 0 < low <= high, got [{x0_low}, {x0_high}]"),
        ));
    }
    let (a_low, a_high) = cfg.generator.a_range;
    if a_low > a_high {
        return Err(blame(
            &["data.a_low", "data.a_high"],
            format!("a range must satisfy low <= high, got [{a_low}, {a_high}]"),
        ));
    }
    // Belt and braces: the same invariants the library enforces.
    cfg.generator.validate()?;
    cfg.hyperparams.validate()?;
    Ok(())
}

/// Parses config text against the documented grammar, filling defaults for
/// every unset key.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err_at(line_no, line, "expected `key = value`"));
        };
        let key = key.trim();
        let value = value.trim();
        if let Some(first) = seen.insert(key.to_string(), line_no) {
            return Err(err_at(
                line_no,
                key,
                format!("duplicate key (first set on line {first})"),
            ));
        }
        apply_key(&mut cfg, key, value, line_no)?;
    }
    validate_cross(&cfg, &seen)?;
    Ok(cfg)
}

/// Command-line flag values that take precedence over config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seeds: Option<usize>,
    pub strategies: Option<String>,
}

pub fn apply_overrides(cfg: &mut ExperimentConfig, overrides: &Overrides) -> Result<()> {
    if let Some(out) = &overrides.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seeds) = overrides.seeds {
        if seeds == 0 {
            return Err(CliError::ConfigKey {
                key: "run.seeds".into(),
                msg: "must be >= 1 (from --seeds)".into(),
            });
        }
        cfg.seeds = seeds;
    }
    if let Some(list) = &overrides.strategies {
        cfg.strategies = parse_strategies(list).map_err(|msg| CliError::ConfigKey {
            key: "run.strategies".into(),
            msg: format!("{msg} (from --strategies)"),
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_yields_all_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.hidden, vec![16; 5]);
        assert_eq!(cfg.generator.n, 500);
        assert_eq!(cfg.seeds, 5);
        assert_eq!(cfg.hyperparams.loss, LossNorm::L1);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = parse_config("# a comment\n\n  \ntrain.epochs = 9 # trailing note\n").unwrap();
        assert_eq!(cfg.hyperparams.epochs, 9);
    }

    #[test]
    fn hidden_width_list_parses() {
        let cfg = parse_config("arch.hidden = 16,16,16,16,16\n").unwrap();
        assert_eq!(cfg.hidden, vec![16; 5]);
        let spaced = parse_config("arch.hidden = 3, 3 ,3\n").unwrap();
        assert_eq!(spaced.hidden, vec![3, 3, 3]);
    }

    #[test]
    fn negative_learning_rate_names_key_and_line() {
        let err = parse_config("# intro\ntrain.learning_rate = -1\n").unwrap_err();
        match err {
            CliError::ConfigAt { line, key, .. } => {
                assert_eq!(line, 2);
                assert_eq!(key, "train.learning_rate");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected_with_location() {
        let err = parse_config("train.momentum = 0.9\n").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("train.momentum"), "{text}");
        assert!(text.contains("line 1"), "{text}");
        assert!(text.contains("unknown key"), "{text}");
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = parse_config("run.seeds = 2\nrun.seeds = 3\n").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("duplicate"), "{text}");
        assert!(text.contains("line 2"), "{text}");
    }

    #[test]
    fn missing_equals_sign_is_rejected() {
        let err = parse_config("run.seeds 2\n").unwrap_err();
        assert!(err.to_string().contains("expected `key = value`"));
    }

    #[test]
    fn value_constraint_errors() {
        for bad in [
            "data.val_fraction = 1.0",
            "data.val_fraction = 0",
            "run.seeds = 0",
            "train.batch_size = 0",
            "train.epochs = 0",
            "arch.input_dim = 0",
            "arch.hidden = 4,0,4",
            "train.adam_beta1 = 1",
            "train.adam_epsilon = 0",
            "data.n = 0",
            "data.standardize = yes",
            "train.optimizer = lbfgs",
            "train.loss = huber",
            "run.budget = epochs",
            "arch.hidden_activation = swish",
            "train.learning_rate = nan",
            "run.out =",
        ] {
            assert!(parse_config(bad).is_err(), "`{bad}` should be rejected");
        }
    }

    #[test]
    fn x0_range_violation_blames_the_set_key() {
        let err = parse_config("data.x0_high = 0.1\n").unwrap_err();
        match err {
            CliError::ConfigAt { line, key, .. } => {
                assert_eq!(line, 1);
                assert_eq!(key, "data.x0_high");
            }
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_config("data.a_low = 2\ndata.a_high = -2\n").unwrap_err();
        match err {
            CliError::ConfigAt { line, key, .. } => {
                assert_eq!(line, 2);
                assert_eq!(key, "data.a_high");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn strategies_list_parses_and_validates() {
        let cfg = parse_config("run.strategies = sequential\n").unwrap();
        assert_eq!(cfg.strategies, vec![Strategy::Sequential]);
        assert!(parse_config("run.strategies = full,full\n").is_err());
        assert!(parse_config("run.strategies = fast\n").is_err());
        assert!(parse_config("run.strategies =\n").is_err());
    }

    #[test]
    fn render_round_trips_default_and_modified_configs() {
        let default = ExperimentConfig::default();
        assert_eq!(parse_config(&default.render()).unwrap(), default);

        let modified = parse_config(
            "arch.hidden = 3,5\n\
             arch.hidden_activation = tanh\n\
             data.n = 77\n\
             data.a_low = -0.25\n\
             train.optimizer = sgd\n\
             train.learning_rate = 0.05\n\
             train.loss = l2\n\
             run.budget = matched_total\n\
             run.seeds = 2\n\
             run.out = results/exp1\n",
        )
        .unwrap();
        assert_eq!(parse_config(&modified.render()).unwrap(), modified);
    }

    #[test]
    fn overrides_take_precedence() {
        let mut cfg = parse_config("run.seeds = 2\n").unwrap();
        apply_overrides(
            &mut cfg,
            &Overrides {
                out: Some(PathBuf::from("elsewhere")),
                seeds: Some(7),
                strategies: Some("full".into()),
            },
        )
        .unwrap();
        assert_eq!(cfg.out_dir, PathBuf::from("elsewhere"));
        assert_eq!(cfg.seeds, 7);
        assert_eq!(cfg.strategies, vec![Strategy::Full]);

        let bad = apply_overrides(
            &mut cfg,
            &Overrides {
                seeds: Some(0),
                ..Overrides::default()
            },
        );
        assert!(bad.is_err());
    }

    #[test]
    fn architecture_builds_from_validated_config() {
        let cfg = parse_config("arch.input_dim = 3\narch.hidden = 4,2\n").unwrap();
        let arch = cfg.architecture();
        assert_eq!(arch.input_dim(), 3);
        assert_eq!(arch.hidden_widths(), &[4, 2]);
        assert_eq!(arch.param_count_full(), (3 * 4 + 4) + (4 * 2 + 2) + 3);
    }
}
