//! Smooth one-dimensional cutoff and bump profiles with analytic
//! derivatives of every order, evaluated through [`Jet`] arithmetic.

use crate::jet::Jet;
use crate::scalar::{r, Real};

/// Region where the exponential transition is indistinguishable from its
/// limit value; derivatives there are below 1e-40.
const EDGE: f64 = 0.01;

/// C-infinity step rising from 0 at `s <= 0` to 1 at `s >= 1`:
/// `B(s) / (B(s) + B(1 - s))` with `B(s) = exp(-1/s)`.
pub fn smoothstep_jet<R: Real>(s: &Jet<R>) -> Jet<R> {
    let v = s.value().to_f64().unwrap_or(0.0);
    if v <= EDGE {
        return Jet::constant(r(0.0), s.order());
    }
    if v >= 1.0 - EDGE {
        return Jet::constant(r(1.0), s.order());
    }
    let b = |u: &Jet<R>| u.recip().neg().exp();
    let bs = b(s);
    let b1s = b(&Jet::constant(r(1.0), s.order()).sub(s));
    bs.div(&bs.add(&b1s))
}

/// Cutoff profile: identically 1 on `(-inf, 1]`, supported in `(-inf, 1+width)`,
/// smoothly decreasing on the transition interval.
#[derive(Debug, Clone, Copy)]
pub struct Cutoff {
    pub width: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff { width: 0.5 }
    }
}

impl Cutoff {
    pub fn new(width: f64) -> Self {
        assert!(width > 0.0, "transition width must be positive");
        Cutoff { width }
    }

    /// Applies the profile to an inner jet, propagating derivatives.
    pub fn apply_jet<R: Real>(&self, u: &Jet<R>) -> Jet<R> {
        let s = u.shift(r(-1.0)).scale(r(1.0 / self.width));
        Jet::constant(r(1.0), u.order()).sub(&smoothstep_jet(&s))
    }

    pub fn value<R: Real>(&self, u: R) -> R {
        self.apply_jet(&Jet::constant(u, 0)).value()
    }

    /// First derivative with respect to the profile argument.
    pub fn d1<R: Real>(&self, u: R) -> R {
        self.apply_jet(&Jet::variable(u, 1)).derivative(1)
    }

    /// Upper end of the support: the profile vanishes for `u >= 1 + width`.
    pub fn support_end(&self) -> f64 {
        1.0 + self.width
    }
}

/// Radial bump `exp(1 - 1/(1 - t^2))` on `|t| < 1`, zero outside; value 1 at
/// the center.
#[derive(Debug, Clone, Copy, Default)]
pub struct RadialBump;

impl RadialBump {
    pub fn apply_jet<R: Real>(&self, t: &Jet<R>) -> Jet<R> {
        let v = t.value().to_f64().unwrap_or(2.0).abs();
        if v >= 1.0 - 1e-8 {
            return Jet::constant(r(0.0), t.order());
        }
        let one = Jet::constant(r(1.0), t.order());
        one.sub(&one.sub(&t.square()).recip()).exp()
    }

    pub fn value<R: Real>(&self, t: R) -> R {
        self.apply_jet(&Jet::constant(t, 0)).value()
    }

    pub fn d1<R: Real>(&self, t: R) -> R {
        self.apply_jet(&Jet::variable(t, 1)).derivative(1)
    }

    /// `b'(t) / t`, finite at the center; used for radial chain rules.
    pub fn d1_over_t<R: Real>(&self, t: R) -> R {
        let v = t.to_f64().unwrap_or(2.0).abs();
        if v >= 1.0 - 1e-8 {
            return r(0.0);
        }
        // b'(t) = b(t) * (-2t) / (1 - t^2)^2.
        let one = r::<R>(1.0);
        let d = one - t * t;
        self.value(t) * r::<R>(-2.0) / (d * d)
    }
}
