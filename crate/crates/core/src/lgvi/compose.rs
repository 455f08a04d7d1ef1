use crate::error::{Error, Result};

use super::StepOutput;

/// Substep weights `λ₁..λ_s` of a composition `Φ_{λ_s h} ∘ … ∘ Φ_{λ₁ h}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionScheme {
    weights: Vec<f64>,
}

impl CompositionScheme {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if weights.is_empty() || !weights.iter().all(|w| w.is_finite()) || (sum - 1.0).abs() > 1e-14
        {
            return Err(Error::InvalidConfig(format!(
                "composition weights must sum to 1, got {weights:?}"
            )));
        }
        Ok(CompositionScheme { weights })
    }

    /// The trivial scheme `(1)`.
    pub fn single() -> Self {
        CompositionScheme { weights: vec![1.0] }
    }

    /// Yoshida's symmetric triple jump, order 2 → 4.
    pub fn yoshida4() -> Self {
        let cbrt2 = 2f64.cbrt();
        let outer = 1.0 / (2.0 - cbrt2);
        CompositionScheme {
            weights: vec![outer, -cbrt2 / (2.0 - cbrt2), outer],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Applies `step` once per weight with step size `λᵢ h`.
pub fn compose<S, F>(
    scheme: &CompositionScheme,
    state: &S,
    h: f64,
    mut step: F,
) -> Result<StepOutput<S>>
where
    S: Clone,
    F: FnMut(&S, f64) -> Result<StepOutput<S>>,
{
    let mut iterations = 0;
    let mut current = state.clone();
    for w in &scheme.weights {
        let out = step(&current, w * h)?;
        iterations += out.iterations;
        current = out.state;
    }
    Ok(StepOutput {
        state: current,
        iterations,
    })
}
