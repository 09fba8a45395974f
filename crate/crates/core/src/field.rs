//! Scalar fields with analytic gradients.

use serde::{Deserialize, Serialize};

use crate::poly::FloatPoly;
use crate::scalar::{r, Real};

/// A differentiable scalar field on a box in `R^n`.
pub trait ScalarField<R: Real>: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[R]) -> R;
    fn gradient(&self, x: &[R]) -> Vec<R>;

    fn grad_norm(&self, x: &[R]) -> R {
        self.gradient(x)
            .iter()
            .fold(r::<R>(0.0), |acc, &g| acc + g * g)
            .sqrt()
    }
}

impl<R: Real> ScalarField<R> for FloatPoly<R> {
    fn dim(&self) -> usize {
        self.nvars()
    }

    fn value(&self, x: &[R]) -> R {
        FloatPoly::value(self, x)
    }

    fn gradient(&self, x: &[R]) -> Vec<R> {
        FloatPoly::gradient(self, x)
    }
}

/// Weight families used by the growth module; each satisfies a gradient
/// estimate `|grad z| <= gamma |z| + delta` with the constants below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Zeta {
    /// Constant 1: gamma = 0, delta = 0.
    One,
    /// `exp(x1)`: gamma = 1, delta = 0.
    ExpX1,
    /// `sin(x1)`: gamma = 0, delta = 1.
    SinX1,
}

impl Zeta {
    pub fn gradient_constants(self) -> (f64, f64) {
        match self {
            Zeta::One => (0.0, 0.0),
            Zeta::ExpX1 => (1.0, 0.0),
            Zeta::SinX1 => (0.0, 1.0),
        }
    }
}

/// `Zeta` instantiated in a fixed dimension.
#[derive(Debug, Clone, Copy)]
pub struct ZetaField {
    pub kind: Zeta,
    pub dim: usize,
}

impl<R: Real> ScalarField<R> for ZetaField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[R]) -> R {
        match self.kind {
            Zeta::One => r(1.0),
            Zeta::ExpX1 => x[0].exp(),
            Zeta::SinX1 => x[0].sin(),
        }
    }

    fn gradient(&self, x: &[R]) -> Vec<R> {
        let mut g = vec![r::<R>(0.0); self.dim];
        match self.kind {
            Zeta::One => {}
            Zeta::ExpX1 => g[0] = x[0].exp(),
            Zeta::SinX1 => g[0] = x[0].cos(),
        }
        g
    }
}
