//! Synthetic dataset generation, splitting, standardization, and the
//! cached-activation datasets that sequential training feeds forward from
//! stage to stage.
//!
//! The built-in generator produces the parameter-estimation task used by the
//! experiment runner: a sample exposes two measurements of an exponential
//! process, `u = [x0, x0 * e^(t1 * a)]`, and the target is the rate `a`
//! itself.

use alloc::vec::Vec;

use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::network::LayerParams;
use crate::rng::Xorshift64Star;

/// One training example: an input vector and a scalar target.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<f64>,
    pub target: f64,
}

/// Where a dataset's inputs came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// As generated or loaded.
    Raw,
    /// Inputs standardized with training-set statistics.
    Standardized,
    /// Inputs are activations after the first `k` frozen layers.
    Activations(usize),
}

/// An ordered, immutable collection of samples with a common input dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    input_dim: usize,
    provenance: Provenance,
}

impl Dataset {
    /// Builds a dataset from samples; all inputs must share one length and
    /// every value must be finite.
    pub fn new(samples: Vec<Sample>, provenance: Provenance) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::EmptyDataset("dataset must hold at least one sample"));
        };
        let input_dim = first.input.len();
        if input_dim == 0 {
            return Err(Error::InvalidArgument("sample inputs must be non-empty"));
        }
        for sample in &samples {
            if sample.input.len() != input_dim {
                return Err(Error::DimensionMismatch {
                    what: "sample input",
                    expected: input_dim,
                    got: sample.input.len(),
                });
            }
            if !sample.input.iter().all(|v| v.is_finite()) || !sample.target.is_finite() {
                return Err(Error::NonFinite("sample values"));
            }
        }
        Ok(Self {
            samples,
            input_dim,
            provenance,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn targets(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.target).collect()
    }
}

/// Configuration of the synthetic exponential-process generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    /// Range of the initial measurement `x0`; must be positive.
    pub x0_range: (f64, f64),
    /// Range of the rate parameter `a` (the regression target).
    pub a_range: (f64, f64),
    /// Time of the second measurement.
    pub t1: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n: 500,
            x0_range: (0.5, 2.0),
            a_range: (-1.0, 1.0),
            t1: 2.0,
            seed: 42,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("generator n must be >= 1"));
        }
        let (x0_low, x0_high) = self.x0_range;
        if !(x0_low > 0.0 && x0_low <= x0_high && x0_high.is_finite()) {
            return Err(Error::InvalidArgument("x0_range must satisfy 0 < low <= high"));
        }
        let (a_low, a_high) = self.a_range;
        if !(a_low <= a_high && a_low.is_finite() && a_high.is_finite()) {
            return Err(Error::InvalidArgument("a_range must satisfy low <= high"));
        }
        if !self.t1.is_finite() {
            return Err(Error::InvalidArgument("t1 must be finite"));
        }
        Ok(())
    }
}

/// Draws `cfg.n` samples: per sample, `x0` then `a` uniformly from their
/// ranges, input `[x0, x0 * e^(t1 * a)]`, target `a`.
pub fn generate(cfg: &GeneratorConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = Xorshift64Star::new(cfg.seed);
    let mut samples = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let x0 = rng.uniform(cfg.x0_range.0, cfg.x0_range.1);
        let a = rng.uniform(cfg.a_range.0, cfg.a_range.1);
        let second = x0 * libm::exp(cfg.t1 * a);
        samples.push(Sample {
            input: alloc::vec![x0, second],
            target: a,
        });
    }
    Dataset::new(samples, Provenance::Raw)
}

/// Seeded shuffle-then-partition split. Validation receives
/// `floor(n * val_fraction)` samples, training the rest; both parts must be
/// non-empty.
pub fn split(ds: &Dataset, val_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(val_fraction > 0.0 && val_fraction < 1.0) {
        return Err(Error::InvalidArgument("val_fraction must lie in (0, 1)"));
    }
    let n = ds.len();
    let val_n = libm::floor(n as f64 * val_fraction) as usize;
    let train_n = n - val_n;
    if val_n == 0 || train_n == 0 {
        return Err(Error::InvalidArgument("split would leave an empty partition"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    Xorshift64Star::new(seed).shuffle(&mut order);
    let take = |indices: &[usize]| -> Vec<Sample> {
        indices.iter().map(|&i| ds.samples()[i].clone()).collect()
    };
    let train = Dataset::new(take(&order[..train_n]), ds.provenance())?;
    let val = Dataset::new(take(&order[train_n..]), ds.provenance())?;
    Ok((train, val))
}

/// Per-feature location/scale fitted on the training partition.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizeStats {
    mean: Vec<f64>,
    std: Vec<f64>,
    /// Features with (numerically) zero spread are passed through unscaled.
    constant: Vec<bool>,
}

impl StandardizeStats {
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    pub fn is_constant(&self, feature: usize) -> bool {
        self.constant[feature]
    }
}

/// Computes per-feature mean and population standard deviation over the
/// training set only.
pub fn standardize_fit(train: &Dataset) -> StandardizeStats {
    let d = train.input_dim();
    let n = train.len() as f64;
    let mut mean = alloc::vec![0.0; d];
    for sample in train.samples() {
        for (m, x) in mean.iter_mut().zip(&sample.input) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var = alloc::vec![0.0; d];
    for sample in train.samples() {
        for ((v, x), m) in var.iter_mut().zip(&sample.input).zip(&mean) {
            let diff = x - m;
            *v += diff * diff;
        }
    }
    let mut std = Vec::with_capacity(d);
    let mut constant = Vec::with_capacity(d);
    for (v, m) in var.iter().zip(&mean) {
        let s = libm::sqrt(v / n);
        // Spread at rounding-noise level counts as constant.
        let tiny = 1e-12 * if libm::fabs(*m) > 1.0 { libm::fabs(*m) } else { 1.0 };
        constant.push(s <= tiny);
        std.push(s);
    }
    StandardizeStats {
        mean,
        std,
        constant,
    }
}

/// Maps every input feature to `(x - mean) / std`; constant features and all
/// targets pass through unchanged.
pub fn standardize_apply(ds: &Dataset, stats: &StandardizeStats) -> Result<Dataset> {
    if stats.mean.len() != ds.input_dim() {
        return Err(Error::DimensionMismatch {
            what: "standardize stats",
            expected: ds.input_dim(),
            got: stats.mean.len(),
        });
    }
    let samples = ds
        .samples()
        .iter()
        .map(|sample| {
            let input = sample
                .input
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    if stats.constant[j] {
                        x
                    } else {
                        (x - stats.mean[j]) / stats.std[j]
                    }
                })
                .collect();
            Sample {
                input,
                target: sample.target,
            }
        })
        .collect();
    Dataset::new(samples, Provenance::Standardized)
}

/// Replaces each input with the activation vector of the frozen `prefix`,
/// keeping targets. The provenance stage index accumulates across calls, so
/// mapping stage by stage or all at once label the result identically.
pub fn map_through(
    ds: &Dataset,
    prefix: &[LayerParams],
    act: ActivationKind,
) -> Result<Dataset> {
    if prefix.is_empty() {
        return Ok(ds.clone());
    }
    let applied = match ds.provenance() {
        Provenance::Activations(k) => k + prefix.len(),
        _ => prefix.len(),
    };
    let mut samples = Vec::with_capacity(ds.len());
    for sample in ds.samples() {
        let mut current = prefix[0].forward(act, &sample.input)?;
        for layer in &prefix[1..] {
            current = layer.forward(act, &current)?;
        }
        samples.push(Sample {
            input: current,
            target: sample.target,
        });
    }
    Dataset::new(samples, Provenance::Activations(applied))
}
