//! Compiled floating-point view of a polynomial for hot evaluation loops.

use super::Polynomial;
use crate::scalar::{r, rat_to_real, Real};

/// Flattened term list with float coefficients, plus compiled first and
/// second partials. Values are exactly the term-sum evaluation of the exact
/// polynomial rounded to the scalar type.
#[derive(Debug, Clone)]
pub struct FloatPoly<R: Real> {
    nvars: usize,
    terms: Vec<(Vec<u32>, R)>,
    grad: Vec<Vec<(Vec<u32>, R)>>,
    hess: Vec<Vec<Vec<(Vec<u32>, R)>>>,
}

fn flatten<R: Real>(p: &Polynomial) -> Vec<(Vec<u32>, R)> {
    p.terms()
        .map(|(e, c)| (e.0.clone(), rat_to_real(c)))
        .collect()
}

fn eval_terms<R: Real>(terms: &[(Vec<u32>, R)], x: &[R]) -> R {
    let mut acc = r::<R>(0.0);
    for (exp, c) in terms {
        let mut t = *c;
        for (xi, &e) in x.iter().zip(exp) {
            if e > 0 {
                t = t * xi.powi(e as i32);
            }
        }
        acc = acc + t;
    }
    acc
}

impl<R: Real> FloatPoly<R> {
    pub fn new(p: &Polynomial) -> Self {
        let grad_polys = p.grad();
        let hess: Vec<Vec<Vec<(Vec<u32>, R)>>> = grad_polys
            .iter()
            .map(|g| g.grad().iter().map(flatten).collect())
            .collect();
        FloatPoly {
            nvars: p.nvars(),
            terms: flatten(p),
            grad: grad_polys.iter().map(flatten).collect(),
            hess,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn value(&self, x: &[R]) -> R {
        debug_assert_eq!(x.len(), self.nvars);
        eval_terms(&self.terms, x)
    }

    pub fn gradient(&self, x: &[R]) -> Vec<R> {
        self.grad.iter().map(|g| eval_terms(g, x)).collect()
    }

    pub fn grad_norm_sq(&self, x: &[R]) -> R {
        self.grad
            .iter()
            .map(|g| eval_terms(g, x))
            .fold(r::<R>(0.0), |acc, v| acc + v * v)
    }

    pub fn hessian(&self, x: &[R]) -> Vec<Vec<R>> {
        self.hess
            .iter()
            .map(|row| row.iter().map(|h| eval_terms(h, x)).collect())
            .collect()
    }
}
