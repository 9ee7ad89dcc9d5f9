//! Batch gradients: reverse-mode accumulation and the central-difference
//! oracle used to verify it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::network::Mlp;

use super::LossNorm;

/// Gradient of one layer's parameters, shaped like the layer itself.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradients {
    /// Row-major, same shape as the layer's weight matrix.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Gradient of every parameter, mirroring the [`Mlp`] layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradients>,
    pub head_weights: Vec<f64>,
    pub head_bias: f64,
}

impl Gradients {
    /// All-zero gradients shaped like `net`.
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            layers: net
                .layers()
                .iter()
                .map(|l| LayerGradients {
                    weights: vec![0.0; l.weights().len()],
                    bias: vec![0.0; l.bias().len()],
                })
                .collect(),
            head_weights: vec![0.0; net.head().weights().len()],
            head_bias: 0.0,
        }
    }

    /// Parameter tensors in the same canonical order the network uses:
    /// layer 1 weights, layer 1 bias, ..., head weights, head bias.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut tensors = Vec::with_capacity(self.layers.len() * 2 + 2);
        for layer in &self.layers {
            tensors.push(layer.weights.as_slice());
            tensors.push(layer.bias.as_slice());
        }
        tensors.push(self.head_weights.as_slice());
        tensors.push(core::slice::from_ref(&self.head_bias));
        tensors
    }

    /// Every gradient value in canonical flat order.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()))
            .chain(self.head_weights.iter())
            .chain(core::iter::once(&self.head_bias))
            .copied()
    }

    fn set_flat(&mut self, index: usize, value: f64) {
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
        if i < self.head_weights.len() {
            self.head_weights[i] = value;
            return;
        }
        i -= self.head_weights.len();
        debug_assert_eq!(i, 0, "gradient index out of range");
        self.head_bias = value;
    }
}

fn check_batch(net: &Mlp, inputs: &[&[f64]], targets: &[f64]) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::EmptyDataset("gradient batch"));
    }
    if inputs.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            what: "batch targets",
            expected: inputs.len(),
            got: targets.len(),
        });
    }
    for input in inputs {
        if input.len() != net.input_dim() {
            return Err(Error::DimensionMismatch {
                what: "batch input",
                expected: net.input_dim(),
                got: input.len(),
            });
        }
    }
    Ok(())
}

/// Derivative of the per-sample loss term with respect to the prediction,
/// already divided by the batch size (the loss is a mean).
fn loss_derivative(residual: f64, norm: LossNorm, batch: f64) -> f64 {
    match norm {
        LossNorm::L1 => {
            // sign(residual), with sign(0) = 0.
            if residual > 0.0 {
                1.0 / batch
            } else if residual < 0.0 {
                -1.0 / batch
            } else {
                0.0
            }
        }
        LossNorm::L2 => 2.0 * residual / batch,
    }
}

/// Exact gradient of the mean batch loss with respect to every parameter,
/// computed by reverse-mode accumulation through the cached forward pass.
pub fn backprop(
    net: &Mlp,
    inputs: &[&[f64]],
    targets: &[f64],
    norm: LossNorm,
) -> Result<Gradients> {
    check_batch(net, inputs, targets)?;
    let mut grads = Gradients::zeros_like(net);
    let act = net.hidden_activation();
    let batch = inputs.len() as f64;
    let depth = net.depth();

    for (input, &target) in inputs.iter().zip(targets) {
        // Forward pass, caching each layer's post-activation output.
        let mut activations: Vec<Vec<f64>> = Vec::with_capacity(depth);
        for (k, layer) in net.layers().iter().enumerate() {
            let layer_input: &[f64] = if k == 0 { input } else { &activations[k - 1] };
            activations.push(layer.forward(act, layer_input)?);
        }
        let last = &activations[depth - 1];
        let prediction = net.head().forward(last)?;

        let residual = prediction - target;
        let d_pred = loss_derivative(residual, norm, batch);
        let d_head_pre = d_pred * net.head().activation().derivative_from_output(prediction);

        grads.head_bias += d_head_pre;
        for (gw, a) in grads.head_weights.iter_mut().zip(last) {
            *gw += d_head_pre * a;
        }

        // d(loss)/d(activation of layer k), seeded from the head.
        let mut delta: Vec<f64> = net
            .head()
            .weights()
            .iter()
            .map(|w| w * d_head_pre)
            .collect();

        for k in (0..depth).rev() {
            let layer = &net.layers()[k];
            let layer_input: &[f64] = if k == 0 { input } else { &activations[k - 1] };
            let output = &activations[k];
            let grad = &mut grads.layers[k];
            let mut next_delta = vec![0.0; layer.in_dim()];
            for row in 0..layer.out_dim() {
                let d_pre = delta[row] * act.derivative_from_output(output[row]);
                grad.bias[row] += d_pre;
                let offset = row * layer.in_dim();
                for col in 0..layer.in_dim() {
                    grad.weights[offset + col] += d_pre * layer_input[col];
                    next_delta[col] += layer.weights()[offset + col] * d_pre;
                }
            }
            delta = next_delta;
        }
    }
    Ok(grads)
}

/// Central-difference gradient `(L(p + eps) - L(p - eps)) / 2 eps` applied to
/// every parameter in turn.
///
/// This is the independent oracle for [`backprop`]: it only evaluates the
/// forward pass and the loss, never the reverse-mode code path.
pub fn finite_diff_grad(
    net: &Mlp,
    inputs: &[&[f64]],
    targets: &[f64],
    norm: LossNorm,
    epsilon: f64,
) -> Result<Gradients> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument("epsilon must be positive and finite"));
    }
    check_batch(net, inputs, targets)?;
    let mut probe = net.clone();
    let mut grads = Gradients::zeros_like(net);
    for i in 0..probe.num_params() {
        let original = probe.param(i);
        probe.set_param(i, original + epsilon);
        let plus = batch_loss(&probe, inputs, targets, norm)?;
        probe.set_param(i, original - epsilon);
        let minus = batch_loss(&probe, inputs, targets, norm)?;
        probe.set_param(i, original);
        grads.set_flat(i, (plus - minus) / (2.0 * epsilon));
    }
    Ok(grads)
}

fn batch_loss(net: &Mlp, inputs: &[&[f64]], targets: &[f64], norm: LossNorm) -> Result<f64> {
    let predictions: Result<Vec<f64>> = inputs.iter().map(|x| net.forward(x)).collect();
    super::loss(&predictions?, targets, norm)
}
