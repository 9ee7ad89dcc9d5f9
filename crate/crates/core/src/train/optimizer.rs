//! Parameter update rules: plain SGD and bias-corrected Adam.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::network::Mlp;

use super::gradients::Gradients;
use super::{Hyperparams, OptimizerKind};

/// Mutable optimizer state carried across steps.
///
/// For Adam this holds the step counter, the running `beta^t` products used
/// for bias correction, and first/second moment estimates shaped like the
/// network's parameter tensors. SGD keeps no state.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    steps: u64,
    beta1_t: f64,
    beta2_t: f64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl OptimizerState {
    /// Fresh state for optimizing `net` under `hp`: zero moments, step 0.
    pub fn new(hp: &Hyperparams, net: &Mlp) -> Self {
        let (m, v) = match hp.optimizer {
            OptimizerKind::Sgd => (Vec::new(), Vec::new()),
            OptimizerKind::Adam => {
                let shapes: Vec<Vec<f64>> = Gradients::zeros_like(net)
                    .tensors()
                    .iter()
                    .map(|t| vec![0.0; t.len()])
                    .collect();
                (shapes.clone(), shapes)
            }
        };
        Self {
            steps: 0,
            beta1_t: 1.0,
            beta2_t: 1.0,
            m,
            v,
        }
    }

    /// Number of steps applied so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }
}

/// Applies one optimizer update to every parameter of `net` in place.
///
/// SGD: `p -= lr * g`. Adam: bias-corrected moment update with the
/// hyperparameters' betas and epsilon. Gradient tensors must mirror the
/// network's parameter layout.
pub fn optimizer_step(
    net: &mut Mlp,
    grads: &Gradients,
    state: &mut OptimizerState,
    hp: &Hyperparams,
) -> Result<()> {
    let grad_tensors = grads.tensors();
    let mut param_tensors = net.param_tensors_mut();
    if param_tensors.len() != grad_tensors.len() {
        return Err(Error::DimensionMismatch {
            what: "gradient tensors",
            expected: param_tensors.len(),
            got: grad_tensors.len(),
        });
    }
    for (p, g) in param_tensors.iter().zip(&grad_tensors) {
        if p.len() != g.len() {
            return Err(Error::DimensionMismatch {
                what: "gradient tensor shape",
                expected: p.len(),
                got: g.len(),
            });
        }
    }

    match hp.optimizer {
        OptimizerKind::Sgd => {
            for (params, grads) in param_tensors.iter_mut().zip(&grad_tensors) {
                for (p, g) in params.iter_mut().zip(*grads) {
                    *p -= hp.learning_rate * g;
                }
            }
        }
        OptimizerKind::Adam => {
            if state.m.len() != grad_tensors.len() {
                return Err(Error::DimensionMismatch {
                    what: "optimizer state tensors",
                    expected: grad_tensors.len(),
                    got: state.m.len(),
                });
            }
            state.steps += 1;
            state.beta1_t *= hp.adam_beta1;
            state.beta2_t *= hp.adam_beta2;
            let m_scale = 1.0 - state.beta1_t;
            let v_scale = 1.0 - state.beta2_t;
            for (((params, grads), m), v) in param_tensors
                .iter_mut()
                .zip(&grad_tensors)
                .zip(&mut state.m)
                .zip(&mut state.v)
            {
                for (((p, &g), m), v) in params.iter_mut().zip(*grads).zip(m).zip(v) {
                    *m = hp.adam_beta1 * *m + (1.0 - hp.adam_beta1) * g;
                    *v = hp.adam_beta2 * *v + (1.0 - hp.adam_beta2) * g * g;
                    let m_hat = *m / m_scale;
                    let v_hat = *v / v_scale;
                    *p -= hp.learning_rate * m_hat / (libm::sqrt(v_hat) + hp.adam_epsilon);
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::ActivationKind::Identity;
    use crate::network::{LayerParams, OutputHead};
    use alloc::vec;

    fn scalar_net(weight: f64) -> Mlp {
        Mlp::new(
            vec![LayerParams::new(1, 1, vec![weight], vec![0.0]).unwrap()],
            OutputHead::new(vec![0.0], 0.0, Identity).unwrap(),
            Identity,
        )
        .unwrap()
    }

    fn grads_with_first_weight(net: &Mlp, g: f64) -> Gradients {
        let mut grads = Gradients::zeros_like(net);
        grads.layers[0].weights[0] = g;
        grads
    }

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        for optimizer in [OptimizerKind::Sgd, OptimizerKind::Adam] {
            let hp = Hyperparams {
                optimizer,
                ..Hyperparams::default()
            };
            let mut net = scalar_net(1.0);
            let before = net.clone();
            let grads = Gradients::zeros_like(&net);
            let mut state = OptimizerState::new(&hp, &net);
            for _ in 0..3 {
                optimizer_step(&mut net, &grads, &mut state, &hp).unwrap();
            }
            assert_eq!(net, before);
        }
    }

    #[test]
    fn sgd_applies_direct_rule() {
        // p = 1, g = 2, lr = 0.1 -> p = 0.8
        let hp = Hyperparams {
            optimizer: OptimizerKind::Sgd,
            learning_rate: 0.1,
            ..Hyperparams::default()
        };
        let mut net = scalar_net(1.0);
        let grads = grads_with_first_weight(&net, 2.0);
        let mut state = OptimizerState::new(&hp, &net);
        optimizer_step(&mut net, &grads, &mut state, &hp).unwrap();
        assert!((net.layers()[0].weights()[0] - 0.8).abs() < 1e-15);
        assert_eq!(state.steps(), 0);
    }

    #[test]
    fn adam_first_step_moves_by_about_learning_rate() {
        // Step 1, g = 1: bias correction cancels the moment decay exactly, so
        // the update is lr * 1 / (1 + eps).
        let hp = Hyperparams::default();
        let mut net = scalar_net(1.0);
        let grads = grads_with_first_weight(&net, 1.0);
        let mut state = OptimizerState::new(&hp, &net);
        optimizer_step(&mut net, &grads, &mut state, &hp).unwrap();
        let delta = 1.0 - net.layers()[0].weights()[0];
        assert!((delta - 0.001).abs() < 1e-10, "delta {delta}");
        assert_eq!(state.steps(), 1);
    }

    #[test]
    fn adam_step_size_is_gradient_scale_invariant_per_direction() {
        // A constant gradient of any magnitude gives m_hat / sqrt(v_hat) = g /
        // |g|, so steps depend only on the sign.
        let hp = Hyperparams::default();
        let mut small = scalar_net(0.0);
        let mut large = scalar_net(0.0);
        let mut state_small = OptimizerState::new(&hp, &small);
        let mut state_large = OptimizerState::new(&hp, &large);
        for _ in 0..5 {
            let gs = grads_with_first_weight(&small, 1e-3);
            let gl = grads_with_first_weight(&large, 1e3);
            optimizer_step(&mut small, &gs, &mut state_small, &hp).unwrap();
            optimizer_step(&mut large, &gl, &mut state_large, &hp).unwrap();
        }
        let ws = small.layers()[0].weights()[0];
        let wl = large.layers()[0].weights()[0];
        assert!((ws - wl).abs() < 1e-6, "{ws} vs {wl}");
        assert!(ws < 0.0);
    }

    #[test]
    fn adam_bias_correction_matches_direct_power_computation() {
        let hp = Hyperparams::default();
        let mut net = scalar_net(0.0);
        let mut state = OptimizerState::new(&hp, &net);
        let mut m = 0.0;
        let mut v = 0.0;
        let mut p = 0.0;
        for t in 1..=4u32 {
            let g = 0.5 * t as f64;
            let grads = grads_with_first_weight(&net, g);
            optimizer_step(&mut net, &grads, &mut state, &hp).unwrap();

            m = hp.adam_beta1 * m + (1.0 - hp.adam_beta1) * g;
            v = hp.adam_beta2 * v + (1.0 - hp.adam_beta2) * g * g;
            let m_hat = m / (1.0 - hp.adam_beta1.powi(t as i32));
            let v_hat = v / (1.0 - hp.adam_beta2.powi(t as i32));
            p -= hp.learning_rate * m_hat / (v_hat.sqrt() + hp.adam_epsilon);

            let got = net.layers()[0].weights()[0];
            assert!((got - p).abs() < 1e-15, "step {t}: {got} vs {p}");
        }
    }

    #[test]
    fn mismatched_gradient_shape_is_rejected() {
        let hp = Hyperparams::default();
        let mut net = scalar_net(1.0);
        let other = Mlp::new(
            vec![LayerParams::zeros(2, 2)],
            OutputHead::zeros(2, Identity),
            Identity,
        )
        .unwrap();
        let grads = Gradients::zeros_like(&other);
        let mut state = OptimizerState::new(&hp, &net);
        assert!(matches!(
            optimizer_step(&mut net, &grads, &mut state, &hp),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
