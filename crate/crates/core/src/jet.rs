//! Truncated Taylor series ("jets") for exact higher derivatives of
//! composed one-dimensional profiles.
//!
//! A `Jet` holds coefficients `c[k] = f^(k)(x0) / k!` up to a fixed order.
//! Arithmetic and elementary functions propagate them, so any expression
//! built from jets yields analytic derivatives of the composition.

use crate::scalar::{r, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet<R: Real> {
    c: Vec<R>,
}

impl<R: Real> Jet<R> {
    /// The identity function `t` expanded at `x0`, carrying `order + 1`
    /// coefficients.
    pub fn variable(x0: R, order: usize) -> Self {
        let mut c = vec![r::<R>(0.0); order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = r(1.0);
        }
        Jet { c }
    }

    pub fn constant(v: R, order: usize) -> Self {
        let mut c = vec![r::<R>(0.0); order + 1];
        c[0] = v;
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> R {
        self.c[0]
    }

    /// `k`-th derivative of the represented function at the base point.
    pub fn derivative(&self, k: usize) -> R {
        if k > self.order() {
            return r(0.0);
        }
        let mut fact = r::<R>(1.0);
        for i in 1..=k {
            fact = fact * r(i as f64);
        }
        self.c[k] * fact
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(R, R) -> R) -> Self {
        debug_assert_eq!(self.c.len(), other.c.len());
        Jet {
            c: self
                .c
                .iter()
                .zip(&other.c)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Jet {
            c: self.c.iter().map(|&a| r::<R>(0.0) - a).collect(),
        }
    }

    pub fn scale(&self, s: R) -> Self {
        Jet {
            c: self.c.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn shift(&self, s: R) -> Self {
        let mut out = self.clone();
        out.c[0] = out.c[0] + s;
        out
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.c.len();
        let mut c = vec![r::<R>(0.0); n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] = c[i + j] + self.c[i] * other.c[j];
            }
        }
        Jet { c }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Reciprocal; the leading coefficient must be nonzero.
    pub fn recip(&self) -> Self {
        let n = self.c.len();
        let mut c = vec![r::<R>(0.0); n];
        let a0 = self.c[0];
        c[0] = r::<R>(1.0) / a0;
        for k in 1..n {
            let mut s = r::<R>(0.0);
            for j in 1..=k {
                s = s + self.c[j] * c[k - j];
            }
            c[k] = (r::<R>(0.0) - s) / a0;
        }
        Jet { c }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.recip())
    }

    /// `exp(self)` by the standard recurrence `k y_k = sum_j j u_j y_{k-j}`.
    pub fn exp(&self) -> Self {
        let n = self.c.len();
        let mut c = vec![r::<R>(0.0); n];
        c[0] = self.c[0].exp();
        for k in 1..n {
            let mut s = r::<R>(0.0);
            for j in 1..=k {
                s = s + r::<R>(j as f64) * self.c[j] * c[k - j];
            }
            c[k] = s / r(k as f64);
        }
        Jet { c }
    }

    /// Natural log; the leading coefficient must be positive.
    pub fn ln(&self) -> Self {
        let n = self.c.len();
        let mut c = vec![r::<R>(0.0); n];
        c[0] = self.c[0].ln();
        // ln(u)' = u'/u: solve u * (ln u)' = u' coefficientwise.
        for k in 1..n {
            let mut s = r::<R>(k as f64) * self.c[k];
            for j in 1..k {
                s = s - r::<R>(j as f64) * c[j] * self.c[k - j];
            }
            c[k] = s / (r::<R>(k as f64) * self.c[0]);
        }
        Jet { c }
    }

    /// Real power `self^p` for positive leading coefficient.
    pub fn powf(&self, p: R) -> Self {
        self.ln().scale(p).exp()
    }

    pub fn powi(&self, mut k: u32) -> Self {
        let mut acc = Jet::constant(r(1.0), self.order());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.square();
            k >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn polynomial_derivatives() {
        // f(t) = t^3 - 2t at t = 1.5: f' = 3t^2 - 2, f'' = 6t, f''' = 6.
        let t = Jet::<f64>::variable(1.5, 4);
        let f = t.powi(3).sub(&t.scale(2.0));
        assert!(close(f.value(), 1.5f64.powi(3) - 3.0, 1e-14));
        assert!(close(f.derivative(1), 3.0 * 2.25 - 2.0, 1e-14));
        assert!(close(f.derivative(2), 9.0, 1e-14));
        assert!(close(f.derivative(3), 6.0, 1e-14));
        assert!(close(f.derivative(4), 0.0, 1e-14));
    }

    #[test]
    fn exp_and_ln_derivatives() {
        let t = Jet::<f64>::variable(0.7, 5);
        let f = t.exp();
        for k in 0..=5 {
            assert!(close(f.derivative(k), 0.7f64.exp(), 1e-12));
        }
        let g = t.ln();
        assert!(close(g.derivative(1), 1.0 / 0.7, 1e-12));
        assert!(close(g.derivative(2), -1.0 / 0.49, 1e-12));
    }

    #[test]
    fn reciprocal_of_bump_denominator() {
        // h(t) = 1/(1 - t^2): h'(t) = 2t/(1-t^2)^2.
        let t = Jet::<f64>::variable(0.3, 3);
        let h = Jet::constant(1.0, 3).sub(&t.square()).recip();
        let d = 1.0 - 0.09f64;
        assert!(close(h.value(), 1.0 / d, 1e-14));
        assert!(close(h.derivative(1), 0.6 / (d * d), 1e-13));
    }

    #[test]
    fn powf_matches_closed_form() {
        // f(t) = t^(5/2): f' = 2.5 t^1.5, f'' = 3.75 t^0.5.
        let t = Jet::<f64>::variable(2.0, 2);
        let f = t.powf(2.5);
        assert!(close(f.value(), 2.0f64.powf(2.5), 1e-12));
        assert!(close(f.derivative(1), 2.5 * 2.0f64.powf(1.5), 1e-12));
        assert!(close(f.derivative(2), 3.75 * 2.0f64.sqrt(), 1e-12));
    }
}
