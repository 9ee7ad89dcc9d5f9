//! Feedforward network representation: dense layers, a scalar output head,
//! forward propagation, and parameter counting.
//!
//! A network maps an input vector through `L >= 1` hidden layers
//! (`a_k = f(W_k a_{k-1} + b_k)`) and a scalar head
//! (`z = g(w . a_L + b)`). All shapes are validated at construction so the
//! forward kernels never see a mismatched chain. Weights are stored row-major
//! with explicit `(out_dim, in_dim)` shape; the accumulation order inside a
//! dot product (bias first, then terms in index order) is fixed, which makes
//! composed forwards bit-reproducible.

use alloc::vec;
use alloc::vec::Vec;

use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::rng::Xorshift64Star;

/// Weights and bias of one dense layer.
///
/// `weights` is row-major with shape `(out_dim, in_dim)`; `bias` has length
/// `out_dim`. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    out_dim: usize,
    in_dim: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl LayerParams {
    pub fn new(out_dim: usize, in_dim: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if out_dim == 0 || in_dim == 0 {
            return Err(Error::InvalidArgument("layer dimensions must be >= 1"));
        }
        if weights.len() != out_dim * in_dim {
            return Err(Error::DimensionMismatch {
                what: "layer weights",
                expected: out_dim * in_dim,
                got: weights.len(),
            });
        }
        if bias.len() != out_dim {
            return Err(Error::DimensionMismatch {
                what: "layer bias",
                expected: out_dim,
                got: bias.len(),
            });
        }
        if !weights.iter().chain(bias.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("layer parameters"));
        }
        Ok(Self {
            out_dim,
            in_dim,
            weights,
            bias,
        })
    }

    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        Self {
            out_dim,
            in_dim,
            weights: vec![0.0; out_dim * in_dim],
            bias: vec![0.0; out_dim],
        }
    }

    /// Glorot-style initialization: weights uniform on
    /// `±sqrt(6 / (in_dim + out_dim))` drawn row-major, biases zero.
    pub fn glorot(out_dim: usize, in_dim: usize, rng: &mut Xorshift64Star) -> Self {
        let limit = libm::sqrt(6.0 / (in_dim + out_dim) as f64);
        let weights = (0..out_dim * in_dim)
            .map(|_| rng.uniform(-limit, limit))
            .collect();
        Self {
            out_dim,
            in_dim,
            weights,
            bias: vec![0.0; out_dim],
        }
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    /// Row-major weights, length `out_dim * in_dim`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub(crate) fn tensors_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.weights, &mut self.bias)
    }

    /// `act(weights . input + bias)`.
    ///
    /// Each output component accumulates its bias first, then the weighted
    /// terms in input order.
    pub fn forward(&self, act: ActivationKind, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.in_dim {
            return Err(Error::DimensionMismatch {
                what: "layer input",
                expected: self.in_dim,
                got: input.len(),
            });
        }
        let mut out = Vec::with_capacity(self.out_dim);
        for row in 0..self.out_dim {
            let weights = &self.weights[row * self.in_dim..(row + 1) * self.in_dim];
            let mut sum = self.bias[row];
            for (w, x) in weights.iter().zip(input) {
                sum += w * x;
            }
            out.push(act.apply(sum));
        }
        Ok(out)
    }
}

/// Scalar output node: a weight vector, a bias, and an output activation.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputHead {
    weights: Vec<f64>,
    bias: f64,
    activation: ActivationKind,
}

impl OutputHead {
    pub fn new(weights: Vec<f64>, bias: f64, activation: ActivationKind) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("head weights must be non-empty"));
        }
        if !weights.iter().all(|v| v.is_finite()) || !bias.is_finite() {
            return Err(Error::NonFinite("head parameters"));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    pub fn zeros(in_dim: usize, activation: ActivationKind) -> Self {
        Self {
            weights: vec![0.0; in_dim],
            bias: 0.0,
            activation,
        }
    }

    /// Glorot-style initialization for the head treated as a 1-output layer.
    pub fn glorot(in_dim: usize, activation: ActivationKind, rng: &mut Xorshift64Star) -> Self {
        let limit = libm::sqrt(6.0 / (in_dim + 1) as f64);
        let weights = (0..in_dim).map(|_| rng.uniform(-limit, limit)).collect();
        Self {
            weights,
            bias: 0.0,
            activation,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    pub fn in_dim(&self) -> usize {
        self.weights.len()
    }

    pub(crate) fn tensors_mut(&mut self) -> (&mut [f64], &mut f64) {
        (&mut self.weights, &mut self.bias)
    }

    /// `activation(weights . input + bias)`.
    pub fn forward(&self, input: &[f64]) -> Result<f64> {
        if input.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                what: "head input",
                expected: self.weights.len(),
                got: input.len(),
            });
        }
        let mut sum = self.bias;
        for (w, x) in self.weights.iter().zip(input) {
            sum += w * x;
        }
        Ok(self.activation.apply(sum))
    }
}

/// Network shape: input dimension, hidden widths, and activation choices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    input_dim: usize,
    hidden_widths: Vec<usize>,
    hidden_activation: ActivationKind,
    output_activation: ActivationKind,
}

impl Architecture {
    pub fn new(
        input_dim: usize,
        hidden_widths: Vec<usize>,
        hidden_activation: ActivationKind,
        output_activation: ActivationKind,
    ) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidArgument("input_dim must be >= 1"));
        }
        if hidden_widths.is_empty() {
            return Err(Error::InvalidArgument("at least one hidden layer is required"));
        }
        if hidden_widths.contains(&0) {
            return Err(Error::InvalidArgument("hidden widths must be >= 1"));
        }
        Ok(Self {
            input_dim,
            hidden_widths,
            hidden_activation,
            output_activation,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_widths(&self) -> &[usize] {
        &self.hidden_widths
    }

    pub fn hidden_activation(&self) -> ActivationKind {
        self.hidden_activation
    }

    pub fn output_activation(&self) -> ActivationKind {
        self.output_activation
    }

    /// Number of hidden layers `L`.
    pub fn depth(&self) -> usize {
        self.hidden_widths.len()
    }

    /// Input dimension seen by hidden layer `stage` (1-based).
    pub fn stage_input_dim(&self, stage: usize) -> Result<usize> {
        self.check_stage(stage)?;
        Ok(if stage == 1 {
            self.input_dim
        } else {
            self.hidden_widths[stage - 2]
        })
    }

    /// The one-hidden-layer shape optimized at `stage` of sequential
    /// training: layer `stage` plus a temporary scalar head.
    pub fn stage_architecture(&self, stage: usize) -> Result<Architecture> {
        self.check_stage(stage)?;
        Architecture::new(
            self.stage_input_dim(stage)?,
            vec![self.hidden_widths[stage - 1]],
            self.hidden_activation,
            self.output_activation,
        )
    }

    /// Total parameter count of the jointly-trained network: for every hidden
    /// layer `in*out + out`, plus `last_width + 1` for the head.
    pub fn param_count_full(&self) -> usize {
        let mut count = 0;
        let mut in_dim = self.input_dim;
        for &width in &self.hidden_widths {
            count += in_dim * width + width;
            in_dim = width;
        }
        count + in_dim + 1
    }

    /// Parameter count of one sequential-stage problem: layer `stage` plus
    /// its temporary head.
    pub fn param_count_stage(&self, stage: usize) -> Result<usize> {
        let in_dim = self.stage_input_dim(stage)?;
        let width = self.hidden_widths[stage - 1];
        Ok(in_dim * width + width + width + 1)
    }

    fn check_stage(&self, stage: usize) -> Result<()> {
        if stage == 0 || stage > self.depth() {
            return Err(Error::StageOutOfRange {
                stage,
                stages: self.depth(),
            });
        }
        Ok(())
    }
}

/// A fully assembled network: hidden layers plus the output head.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<LayerParams>,
    head: OutputHead,
    hidden_activation: ActivationKind,
}

impl Mlp {
    /// Builds a network, rejecting any mismatched dimension chain.
    pub fn new(
        layers: Vec<LayerParams>,
        head: OutputHead,
        hidden_activation: ActivationKind,
    ) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArgument("at least one hidden layer is required"));
        }
        for pair in layers.windows(2) {
            if pair[1].in_dim() != pair[0].out_dim() {
                return Err(Error::DimensionMismatch {
                    what: "layer chain",
                    expected: pair[0].out_dim(),
                    got: pair[1].in_dim(),
                });
            }
        }
        let last = layers.last().expect("non-empty").out_dim();
        if head.in_dim() != last {
            return Err(Error::DimensionMismatch {
                what: "head weights",
                expected: last,
                got: head.in_dim(),
            });
        }
        Ok(Self {
            layers,
            head,
            hidden_activation,
        })
    }

    /// Fresh network with Glorot weights and zero biases, drawn layer by
    /// layer (inputs first) and head last from `rng`.
    pub fn init(arch: &Architecture, rng: &mut Xorshift64Star) -> Self {
        let mut layers = Vec::with_capacity(arch.depth());
        let mut in_dim = arch.input_dim();
        for &width in arch.hidden_widths() {
            layers.push(LayerParams::glorot(width, in_dim, rng));
            in_dim = width;
        }
        let head = OutputHead::glorot(in_dim, arch.output_activation(), rng);
        Self {
            layers,
            head,
            hidden_activation: arch.hidden_activation(),
        }
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    pub fn head(&self) -> &OutputHead {
        &self.head
    }

    pub fn hidden_activation(&self) -> ActivationKind {
        self.hidden_activation
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    /// Number of hidden layers.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Shape of this network.
    pub fn architecture(&self) -> Architecture {
        Architecture {
            input_dim: self.input_dim(),
            hidden_widths: self.layers.iter().map(LayerParams::out_dim).collect(),
            hidden_activation: self.hidden_activation,
            output_activation: self.head.activation(),
        }
    }

    /// Scalar output for one input: the layer chain followed by the head.
    ///
    /// Pure function of `(self, input)`; equals
    /// `head.forward(hidden_activations(input, depth))` bit-for-bit.
    pub fn forward(&self, input: &[f64]) -> Result<f64> {
        let mut current = self.layers[0].forward(self.hidden_activation, input)?;
        for layer in &self.layers[1..] {
            current = layer.forward(self.hidden_activation, &current)?;
        }
        self.head.forward(&current)
    }

    /// Activation vector after the first `depth` hidden layers (1-based).
    pub fn hidden_activations(&self, input: &[f64], depth: usize) -> Result<Vec<f64>> {
        if depth == 0 || depth > self.layers.len() {
            return Err(Error::DepthOutOfRange {
                depth,
                layers: self.layers.len(),
            });
        }
        let mut current = self.layers[0].forward(self.hidden_activation, input)?;
        for layer in &self.layers[1..depth] {
            current = layer.forward(self.hidden_activation, &current)?;
        }
        Ok(current)
    }

    /// Total number of scalar parameters.
    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum::<usize>()
            + self.head.weights.len()
            + 1
    }

    /// Mutable views of every parameter tensor in canonical order:
    /// layer 1 weights, layer 1 bias, ..., head weights, head bias.
    pub(crate) fn param_tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut tensors = Vec::with_capacity(self.layers.len() * 2 + 2);
        for layer in &mut self.layers {
            let (w, b) = layer.tensors_mut();
            tensors.push(w);
            tensors.push(b);
        }
        let (w, b) = self.head.tensors_mut();
        tensors.push(w);
        tensors.push(core::slice::from_mut(b));
        tensors
    }

    /// Reads parameter `index` in the canonical flat order.
    pub(crate) fn param(&self, index: usize) -> f64 {
        let mut i = index;
        for layer in &self.layers {
            if i < layer.weights.len() {
                return layer.weights[i];
            }
            i -= layer.weights.len();
            if i < layer.bias.len() {
                return layer.bias[i];
            }
            i -= layer.bias.len();
        }
        if i < self.head.weights.len() {
            return self.head.weights[i];
        }
        i -= self.head.weights.len();
        debug_assert_eq!(i, 0, "parameter index out of range");
        self.head.bias
    }

    /// Writes parameter `index` in the canonical flat order.
    pub(crate) fn set_param(&mut self, index: usize, value: f64) {
        let mut i = index;
        for layer in &mut self.layers {
            if i < layer.weights.len() {
                layer.weights[i] = value;
                return;
            }
            i -= layer.weights.len();
            if i < layer.bias.len() {
                layer.bias[i] = value;
                return;
            }
            i -= layer.bias.len();
        }
        if i < self.head.weights.len() {
            self.head.weights[i] = value;
            return;
        }
        i -= self.head.weights.len();
        debug_assert_eq!(i, 0, "parameter index out of range");
        self.head.bias = value;
    }
}
