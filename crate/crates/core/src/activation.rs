//! Element-wise activation functions.

/// Activation applied element-wise after an affine transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationKind {
    /// `max(0, x)`. Derivative at exactly 0 is defined as 0.
    Relu,
    /// `x` unchanged; the default output activation so that signed targets
    /// are representable.
    Identity,
    /// Hyperbolic tangent; smooth everywhere, used for gradient checking.
    Tanh,
}

impl ActivationKind {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            ActivationKind::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            ActivationKind::Identity => x,
            ActivationKind::Tanh => libm::tanh(x),
        }
    }

    /// Derivative expressed through the activation's own output `y = f(x)`.
    ///
    /// All three variants admit this form: relu'(x) = [y > 0],
    /// identity' = 1, tanh'(x) = 1 - y^2. For relu the `y = 0` case covers
    /// both `x < 0` and the `x = 0` convention (derivative 0).
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            ActivationKind::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::Identity => 1.0,
            ActivationKind::Tanh => 1.0 - y * y,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Relu => "relu",
            ActivationKind::Identity => "identity",
            ActivationKind::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "relu" => Some(ActivationKind::Relu),
            "identity" => Some(ActivationKind::Identity),
            "tanh" => Some(ActivationKind::Tanh),
            _ => None,
        }
    }
}
