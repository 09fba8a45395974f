//! Growth of weighted integrals over the sublevel sets
//! `{eps0 <= P <= eta}` of a homogeneous polynomial: the eta-derivative
//! identity, the differential inequality in `eta`, and the doubling bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ScalarField, Zeta, ZetaField};
use crate::poly::{FloatPoly, Polynomial};
use crate::profile::Cutoff;
use crate::quad::build_grid;
use crate::sampling::halton_point;

/// Geometric ratio of the eta grid; eight steps halve eta, so doubling
/// pairs are exact grid shifts.
pub const ETA_RATIO_LOG2: f64 = 1.0 / 8.0;

#[derive(Debug, Clone, Serialize)]
pub struct GrowthProfile {
    pub poly: Polynomial,
    pub degree: u32,
    pub zeta: Zeta,
    pub gamma: f64,
    pub delta: f64,
    /// Worst violation of the gradient estimate on the sample cloud
    /// (nonpositive means it holds).
    pub gradient_estimate_violation: f64,
    pub eps0: f64,
    pub bounds: Vec<(f64, f64)>,
    pub depth: u32,
    pub eta_grid: Vec<f64>,
    pub i_values: Vec<f64>,
    #[serde(skip)]
    fp: FloatPoly<f64>,
    #[serde(skip)]
    cutoff: Cutoff,
}

/// Max over the cloud of `|grad z| - gamma |z| - delta`; nonpositive means
/// the gradient estimate holds there.
pub fn gradient_estimate_check(
    zeta: &dyn ScalarField<f64>,
    gamma: f64,
    delta: f64,
    cloud: &[Vec<f64>],
) -> f64 {
    cloud
        .iter()
        .map(|x| zeta.grad_norm(x) - gamma * zeta.value(x).abs() - delta)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Builds the localized-integral profile `I(eta) = int phi(P/eta)
/// phi(eps0/P) zeta^2` over the geometric eta grid. `eps0` defaults to
/// `eta_min / 8` so the lower cutoff stays out of the active range.
pub fn build_profile(
    p: &Polynomial,
    zeta: Zeta,
    bounds: &[(f64, f64)],
    depth: u32,
    eta_min: f64,
    eta_max: f64,
    eps0: Option<f64>,
) -> Result<GrowthProfile> {
    if !(eta_min > 0.0 && eta_max > eta_min) {
        return Err(Error::Invalid("need 0 < eta_min < eta_max".into()));
    }
    let degree = p.degree()?;
    let eps0 = eps0.unwrap_or(eta_min / 8.0);
    let field = ZetaField {
        kind: zeta,
        dim: p.nvars(),
    };
    let (gamma, delta) = zeta.gradient_constants();
    let cloud: Vec<Vec<f64>> = (0..256).map(|i| halton_point(i, bounds)).collect();
    let violation = gradient_estimate_check(&field, gamma, delta, &cloud);

    let ratio = 2f64.powf(ETA_RATIO_LOG2);
    let mut eta_grid = Vec::new();
    let mut eta = eta_min;
    while eta <= eta_max * (1.0 + 1e-12) {
        eta_grid.push(eta);
        eta *= ratio;
    }
    let mut profile = GrowthProfile {
        poly: p.clone(),
        degree,
        zeta,
        gamma,
        delta,
        gradient_estimate_violation: violation,
        eps0,
        bounds: bounds.to_vec(),
        depth,
        eta_grid,
        i_values: Vec::new(),
        fp: p.compile(),
        cutoff: Cutoff::new(0.25),
    };
    profile.i_values = profile
        .eta_grid
        .clone()
        .iter()
        .map(|&eta| growth_integral(&profile, eta))
        .collect::<Result<Vec<f64>>>()?;
    Ok(profile)
}

impl GrowthProfile {
    /// Smoothed indicator of `{eps0 <= P <= eta}` at a point.
    fn localizer(&self, pv: f64, eta: f64) -> f64 {
        if pv <= 0.0 {
            return 0.0;
        }
        self.cutoff.value(pv / eta) * self.cutoff.value(self.eps0 / pv)
    }

    fn zeta_field(&self) -> ZetaField {
        ZetaField {
            kind: self.zeta,
            dim: self.poly.nvars(),
        }
    }

    /// Mass of the smoothed upper cutoff: `int_0^inf phi(u) du`, so the
    /// sublevel area of `P = |x|^2` in 2 variables is `pi * kappa * eta`.
    pub fn cutoff_mass(&self) -> f64 {
        let n = 4096;
        let hi = self.cutoff.support_end();
        let h = hi / n as f64;
        (0..n)
            .map(|i| self.cutoff.value((i as f64 + 0.5) * h) * h)
            .sum()
    }

    /// Mass removed by the lower cutoff: `int_0^inf (1 - phi(1/u)) du`,
    /// so the smoothed hole around the variety has area
    /// `pi * kappa_low * eps0` for the same fixture.
    pub fn lower_cutoff_mass(&self) -> f64 {
        let n = 4096;
        let h = 2.0 / n as f64;
        (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) * h;
                (1.0 - self.cutoff.value(1.0 / u)) * h
            })
            .sum()
    }
}

/// `int phi(P/eta) phi(eps0/P) zeta^2` over the box.
pub fn growth_integral(profile: &GrowthProfile, eta: f64) -> Result<f64> {
    let zeta = profile.zeta_field();
    let integrand = |x: &[f64]| {
        let pv = profile.fp.value(x);
        let loc = profile.localizer(pv, eta);
        if loc == 0.0 {
            return 0.0;
        }
        let z = zeta.value(x);
        loc * z * z
    };
    let grid = build_grid(
        &profile.bounds,
        None,
        profile.depth,
        Some((0.02, &integrand)),
    )?;
    grid.integrate(&integrand)
}

#[derive(Debug, Clone, Serialize)]
pub struct EtaDerivativeCheck {
    pub eta: f64,
    /// `eta * dI/deta` by central differences on the grid.
    pub lhs: f64,
    /// `-int (P/|grad P|^2) zeta^2 grad P . grad phi(P/eta)` with the lower
    /// cutoff carried along.
    pub rhs: f64,
    pub relative_gap: f64,
    /// Cells skipped because `|grad P|` vanished on the support.
    pub skipped_cells: usize,
}

/// Checks the differentiation identity at an interior grid index.
pub fn eta_derivative_check(profile: &GrowthProfile, index: usize) -> Result<EtaDerivativeCheck> {
    if index == 0 || index + 1 >= profile.eta_grid.len() {
        return Err(Error::Invalid("index must be interior".into()));
    }
    let eta = profile.eta_grid[index];
    let lhs = eta * (profile.i_values[index + 1] - profile.i_values[index - 1])
        / (profile.eta_grid[index + 1] - profile.eta_grid[index - 1]);

    let zeta = profile.zeta_field();
    let skipped = std::cell::Cell::new(0usize);
    let integrand = |x: &[f64]| {
        let pv = profile.fp.value(x);
        if pv <= 0.0 {
            return 0.0;
        }
        let phi_d = profile.cutoff.d1(pv / eta);
        if phi_d == 0.0 {
            return 0.0;
        }
        let g2 = profile.fp.grad_norm_sq(x);
        if g2 < 1e-30 {
            skipped.set(skipped.get() + 1);
            return 0.0;
        }
        // grad phi(P/eta) = phi' grad P / eta; the dot product with grad P
        // contracts to |grad P|^2.
        let z = zeta.value(x);
        let lower = profile.cutoff.value(profile.eps0 / pv);
        -(pv / g2) * z * z * (g2 * phi_d / eta) * lower
    };
    let grid = build_grid(
        &profile.bounds,
        None,
        profile.depth,
        Some((0.02, &integrand)),
    )?;
    let rhs = grid.integrate(&integrand)?;
    let scale = lhs.abs().max(rhs.abs()).max(1e-300);
    Ok(EtaDerivativeCheck {
        eta,
        lhs,
        rhs,
        relative_gap: (lhs - rhs).abs() / scale,
        skipped_cells: skipped.get(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DifferentialFit {
    /// Smallest constant with `dI/deta <= C (gamma^2 eta^(2/m - 1) I + eta^(1/m))`
    /// at every interior grid point.
    pub constant: f64,
    pub argmax_eta: f64,
}

pub fn fit_differential_inequality(profile: &GrowthProfile) -> Result<DifferentialFit> {
    let n = profile.eta_grid.len();
    if n < 3 {
        return Err(Error::EmptyEtaGrid);
    }
    let m = profile.degree as f64;
    let mut best = (0.0_f64, profile.eta_grid[1]);
    for i in 1..n - 1 {
        let eta = profile.eta_grid[i];
        let didh = (profile.i_values[i + 1] - profile.i_values[i - 1])
            / (profile.eta_grid[i + 1] - profile.eta_grid[i - 1]);
        let rhs_shape = profile.gamma * profile.gamma * eta.powf(2.0 / m - 1.0)
            * profile.i_values[i]
            + eta.powf(1.0 / m);
        let c = didh / rhs_shape;
        if c > best.0 {
            best = (c, eta);
        }
    }
    Ok(DifferentialFit {
        constant: best.0,
        argmax_eta: best.1,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DoublingPair {
    pub eta: f64,
    pub i_eta: f64,
    pub i_half: f64,
    pub ratio: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DoublingReport {
    pub c1: f64,
    pub c2: f64,
    pub fitted: bool,
    pub pairs: Vec<DoublingPair>,
    pub all_ok: bool,
    /// Pairs with `I(eta/2) = 0` but `I(eta) > 0` (bound unverifiable).
    pub unverifiable: usize,
}

/// Checks `I(eta) <= c1 exp(c2 gamma^2 eta^(2/m)) I(eta/2)` on all grid
/// pairs eight steps apart. Without supplied constants, fits the minimal
/// `c1` at `c2 = 0` and, for profiles with `gamma > 0`, the minimal `c2` on
/// top of the supplied baseline `c1`.
pub fn doubling_check(
    profile: &GrowthProfile,
    given: Option<(f64, f64)>,
    baseline_c1: Option<f64>,
) -> Result<DoublingReport> {
    let steps_per_halving = (1.0 / ETA_RATIO_LOG2).round() as usize;
    let n = profile.eta_grid.len();
    if n <= steps_per_halving {
        return Err(Error::EmptyEtaGrid);
    }
    let m = profile.degree as f64;
    let g2 = profile.gamma * profile.gamma;

    let mut unverifiable = 0usize;
    let mut ratios = Vec::new();
    for i in steps_per_halving..n {
        let i_eta = profile.i_values[i];
        let i_half = profile.i_values[i - steps_per_halving];
        if i_half <= 1e-300 {
            if i_eta > 1e-300 {
                unverifiable += 1;
            }
            continue;
        }
        ratios.push((profile.eta_grid[i], i_eta, i_half, i_eta / i_half));
    }
    if ratios.is_empty() {
        return Err(Error::EmptyEtaGrid);
    }

    let (c1, c2, fitted) = match given {
        Some((c1, c2)) => (c1, c2, false),
        None => {
            if g2 == 0.0 {
                let c1 = ratios.iter().map(|r| r.3).fold(0.0, f64::max);
                (c1, 0.0, true)
            } else {
                let c1 = baseline_c1
                    .unwrap_or_else(|| ratios.iter().map(|r| r.3).fold(0.0, f64::max).min(2.5));
                let c2 = ratios
                    .iter()
                    .map(|&(eta, _, _, ratio)| {
                        let need = (ratio / c1).ln() / (g2 * eta.powf(2.0 / m));
                        need.max(0.0)
                    })
                    .fold(0.0, f64::max);
                (c1, c2, true)
            }
        }
    };

    let pairs: Vec<DoublingPair> = ratios
        .into_iter()
        .map(|(eta, i_eta, i_half, ratio)| {
            let bound = c1 * (c2 * g2 * eta.powf(2.0 / m)).exp();
            DoublingPair {
                eta,
                i_eta,
                i_half,
                ratio,
                bound,
                ok: ratio <= bound * (1.0 + 1e-9),
            }
        })
        .collect();
    let all_ok = pairs.iter().all(|p| p.ok);
    Ok(DoublingReport {
        c1,
        c2,
        fitted,
        pairs,
        all_ok,
        unverifiable,
    })
}
