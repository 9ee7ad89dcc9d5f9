//! Loss functions, optimizers, and the two training strategies.
//!
//! `train_full` fits every parameter of a network jointly. `train_sequential`
//! fits the same architecture one hidden layer at a time: each stage trains
//! layer `k` plus a fresh temporary scalar head on the cached activations of
//! the frozen layers `1..k`, then freezes layer `k` and maps the cached
//! inputs forward. Temporary heads are kept in the stage reports but only the
//! last stage's head enters the final model.
//!
//! Determinism: all randomness (initialization, shuffling) comes from
//! [`crate::rng`] streams derived from the hyperparameter seed, so repeated
//! runs with the same inputs produce bit-identical reports. Stage `k` of a
//! sequential run draws its initialization from stream `2k` and its shuffles
//! from stream `2k + 1`; a full run uses streams 2 and 3, which makes a
//! one-hidden-layer sequential run coincide with the full run exactly.

mod gradients;
mod optimizer;

pub use gradients::{backprop, finite_diff_grad, Gradients, LayerGradients};
pub use optimizer::{optimizer_step, OptimizerState};

use alloc::vec;
use alloc::vec::Vec;

use crate::data::{map_through, Dataset};
use crate::error::{Error, Result};
use crate::network::{Architecture, LayerParams, Mlp, OutputHead};
use crate::rng::{stream_seed, Xorshift64Star};

/// Norm applied to each scalar residual before averaging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossNorm {
    /// Mean absolute error.
    L1,
    /// Mean squared error.
    L2,
}

impl LossNorm {
    pub fn name(self) -> &'static str {
        match self {
            LossNorm::L1 => "l1",
            LossNorm::L2 => "l2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "l1" => Some(LossNorm::L1),
            "l2" => Some(LossNorm::L2),
            _ => None,
        }
    }
}

/// Update rule used by [`optimizer_step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Adam => "adam",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sgd" => Some(OptimizerKind::Sgd),
            "adam" => Some(OptimizerKind::Adam),
            _ => None,
        }
    }
}

/// Everything a training run needs besides the data and the architecture.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub loss: LossNorm,
    /// Base seed; initialization and shuffling use distinct streams derived
    /// from it.
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            optimizer: OptimizerKind::Adam,
            learning_rate: 1e-3,
            batch_size: 32,
            epochs: 200,
            loss: LossNorm::L1,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
        }
    }
}

impl Hyperparams {
    /// Rejects values no update rule can act on. A zero learning rate is
    /// allowed (it freezes the parameters, which is useful in tests).
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::InvalidArgument(
                "learning_rate must be finite and non-negative",
            ));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch_size must be >= 1"));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be >= 1"));
        }
        if !(self.adam_beta1 > 0.0 && self.adam_beta1 < 1.0) {
            return Err(Error::InvalidArgument("adam_beta1 must be in (0, 1)"));
        }
        if !(self.adam_beta2 > 0.0 && self.adam_beta2 < 1.0) {
            return Err(Error::InvalidArgument("adam_beta2 must be in (0, 1)"));
        }
        if !self.adam_epsilon.is_finite() || self.adam_epsilon <= 0.0 {
            return Err(Error::InvalidArgument("adam_epsilon must be positive"));
        }
        Ok(())
    }
}

/// Which training recipe produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Full,
    Sequential,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Full => "full",
            Strategy::Sequential => "sequential",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "full" => Some(Strategy::Full),
            "sequential" => Some(Strategy::Sequential),
            _ => None,
        }
    }
}

/// Per-epoch curves and the artifacts of one optimization problem.
///
/// Sequential stages carry the trained layer and their temporary head here
/// even when the head does not survive into the final model; `head_discarded`
/// records that fate. Full training optimizes all layers at once, so the
/// per-layer fields stay `None` and the result lives in the report's model.
#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    /// 1-based; full training is a single problem with index 1.
    pub stage_index: usize,
    /// Training loss after each epoch, length = epochs.
    pub train_loss: Vec<f64>,
    /// Validation error after each epoch, same norm as the training loss.
    pub val_error: Vec<f64>,
    pub layer: Option<LayerParams>,
    pub head: Option<OutputHead>,
    pub head_discarded: bool,
}

/// Outcome of one full or sequential training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub strategy: Strategy,
    /// One report per optimization problem: length 1 for full, L for
    /// sequential.
    pub stages: Vec<StageReport>,
    /// The assembled network after training.
    pub model: Mlp,
    /// Unknown count of each optimization problem, aligned with `stages`.
    pub problem_sizes: Vec<usize>,
}

/// Mean residual norm between `predictions` and `targets`.
pub fn loss(predictions: &[f64], targets: &[f64], norm: LossNorm) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::EmptyDataset("loss inputs"));
    }
    if predictions.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            what: "loss targets",
            expected: predictions.len(),
            got: targets.len(),
        });
    }
    let mut sum = 0.0;
    for (z, t) in predictions.iter().zip(targets) {
        let r = z - t;
        sum += match norm {
            LossNorm::L1 => libm::fabs(r),
            LossNorm::L2 => r * r,
        };
    }
    Ok(sum / predictions.len() as f64)
}

/// Mean loss of `net` over a dataset.
pub fn evaluate(net: &Mlp, ds: &Dataset, norm: LossNorm) -> Result<f64> {
    let mut predictions = Vec::with_capacity(ds.len());
    for sample in ds.samples() {
        predictions.push(net.forward(&sample.input)?);
    }
    loss(&predictions, &ds.targets(), norm)
}

fn check_dataset_dims(input_dim: usize, train: &Dataset, val: &Dataset) -> Result<()> {
    if train.input_dim() != input_dim {
        return Err(Error::DimensionMismatch {
            what: "training inputs",
            expected: input_dim,
            got: train.input_dim(),
        });
    }
    if val.input_dim() != input_dim {
        return Err(Error::DimensionMismatch {
            what: "validation inputs",
            expected: input_dim,
            got: val.input_dim(),
        });
    }
    Ok(())
}

/// Shared epoch loop: shuffled mini-batch gradient steps on every parameter
/// of `net`, with per-epoch train/validation curves.
///
/// `stage_index` selects the shuffle stream (`2 * stage_index + 1`) and tags
/// divergence errors. Epoch indices in errors are 1-based.
fn fit(
    net: &mut Mlp,
    train: &Dataset,
    val: &Dataset,
    hp: &Hyperparams,
    stage_index: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    hp.validate()?;
    check_dataset_dims(net.input_dim(), train, val)?;
    let mut shuffle_rng = Xorshift64Star::new(stream_seed(hp.seed, 2 * stage_index as u64 + 1));
    let mut state = OptimizerState::new(hp, net);
    let mut indices: Vec<usize> = (0..train.len()).collect();
    let mut train_curve = Vec::with_capacity(hp.epochs);
    let mut val_curve = Vec::with_capacity(hp.epochs);

    for epoch in 1..=hp.epochs {
        shuffle_rng.shuffle(&mut indices);
        for batch in indices.chunks(hp.batch_size) {
            let inputs: Vec<&[f64]> = batch
                .iter()
                .map(|&i| train.samples()[i].input.as_slice())
                .collect();
            let targets: Vec<f64> = batch.iter().map(|&i| train.samples()[i].target).collect();
            let grads = backprop(net, &inputs, &targets, hp.loss)?;
            optimizer_step(net, &grads, &mut state, hp)?;
        }
        let train_loss = evaluate(net, train, hp.loss)?;
        let val_error = evaluate(net, val, hp.loss)?;
        if !train_loss.is_finite() || !val_error.is_finite() {
            return Err(Error::Diverged {
                stage: stage_index,
                epoch,
            });
        }
        train_curve.push(train_loss);
        val_curve.push(val_error);
    }
    Ok((train_curve, val_curve))
}

/// Trains every parameter of `net` (one stage problem) and reports the
/// curves plus the trained pieces.
///
/// The caller provides the initialized network; this function only consumes
/// randomness for shuffling, from stream `2 * stage_index + 1` of the seed.
pub fn train_stage(
    mut net: Mlp,
    train: &Dataset,
    val: &Dataset,
    hp: &Hyperparams,
    stage_index: usize,
) -> Result<(Mlp, StageReport)> {
    let (train_loss, val_error) = fit(&mut net, train, val, hp, stage_index)?;
    let layer = if net.depth() == 1 {
        Some(net.layers()[0].clone())
    } else {
        None
    };
    let head = Some(net.head().clone());
    Ok((
        net,
        StageReport {
            stage_index,
            train_loss,
            val_error,
            layer,
            head,
            head_discarded: false,
        },
    ))
}

/// Trains all parameters of a fresh network jointly.
///
/// Initialization draws from stream 2 of the seed, shuffling from stream 3.
pub fn train_full(
    arch: &Architecture,
    train: &Dataset,
    val: &Dataset,
    hp: &Hyperparams,
) -> Result<TrainReport> {
    hp.validate()?;
    check_dataset_dims(arch.input_dim(), train, val)?;
    let mut init_rng = Xorshift64Star::new(stream_seed(hp.seed, 2));
    let mut net = Mlp::init(arch, &mut init_rng);
    let (train_loss, val_error) = fit(&mut net, train, val, hp, 1)?;
    Ok(TrainReport {
        strategy: Strategy::Full,
        stages: vec![StageReport {
            stage_index: 1,
            train_loss,
            val_error,
            layer: None,
            head: None,
            head_discarded: false,
        }],
        problem_sizes: vec![arch.param_count_full()],
        model: net,
    })
}

/// Trains the architecture greedily, one hidden layer at a time.
///
/// Stage `k` trains hidden layer `k` plus a fresh temporary head on the
/// cached activations of the frozen layers before it, then freezes the layer
/// and maps the cached datasets forward. Heads from stages `1..L-1` are kept
/// only in the stage reports; the stage-`L` head completes the model.
pub fn train_sequential(
    arch: &Architecture,
    train: &Dataset,
    val: &Dataset,
    hp: &Hyperparams,
) -> Result<TrainReport> {
    hp.validate()?;
    check_dataset_dims(arch.input_dim(), train, val)?;
    let depth = arch.depth();
    let mut frozen: Vec<LayerParams> = Vec::with_capacity(depth);
    let mut stages = Vec::with_capacity(depth);
    let mut problem_sizes = Vec::with_capacity(depth);
    let mut cur_train = train.clone();
    let mut cur_val = val.clone();
    let mut final_head: Option<OutputHead> = None;

    for stage in 1..=depth {
        let stage_arch = arch.stage_architecture(stage)?;
        let mut init_rng = Xorshift64Star::new(stream_seed(hp.seed, 2 * stage as u64));
        let subnet = Mlp::init(&stage_arch, &mut init_rng);
        let (trained, mut report) = train_stage(subnet, &cur_train, &cur_val, hp, stage)?;
        let layer = trained.layers()[0].clone();
        if stage < depth {
            report.head_discarded = true;
            cur_train = map_through(&cur_train, core::slice::from_ref(&layer), arch.hidden_activation())?;
            cur_val = map_through(&cur_val, core::slice::from_ref(&layer), arch.hidden_activation())?;
        } else {
            final_head = Some(trained.head().clone());
        }
        frozen.push(layer);
        problem_sizes.push(arch.param_count_stage(stage)?);
        stages.push(report);
    }

    let model = Mlp::new(
        frozen,
        final_head.expect("depth >= 1 so the last stage ran"),
        arch.hidden_activation(),
    )?;
    Ok(TrainReport {
        strategy: Strategy::Sequential,
        stages,
        model,
        problem_sizes,
    })
}
