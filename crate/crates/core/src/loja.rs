//! Empirical fits of the Lojasiewicz inequalities: the gradient form
//! `|grad P| >= c |P|^(1-mu)` and the distance form `|P| >= c' d(x,V)^nu`,
//! plus the conic refinement `mu = 1/m` for homogeneous polynomials.
//!
//! Exponents are fitted on a 1/120 grid as extremal feasible values, not by
//! regression: a candidate exponent is accepted only when the binding
//! constant does not degenerate on the samples closest to the variety.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{FloatPoly, Polynomial};

/// Exponent grid resolution.
pub const GRID_STEP: f64 = 1.0 / 120.0;
/// Log-scale slack in the near/far stability comparison; about two grid
/// steps of drift over a ten-decade sample spread.
const STABILITY_SLACK: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    Gradient,
    Distance,
}

#[derive(Debug, Clone, Serialize)]
pub struct LojasiewiczFit {
    pub kind: FitKind,
    pub exponent_hat: f64,
    pub constant_hat: f64,
    pub n_samples: usize,
    /// Distance-oracle failures excluded from the fit.
    pub n_excluded: usize,
    /// Worst violation of the fitted pair over the samples (0 = feasible).
    pub residual: f64,
    pub seed: u64,
}

/// Upper-biased estimate of `min_{v in V(P)} |x - v|` by multi-start
/// Newton projection polished by tangential slides toward `x`.
/// `None` when no variety point with `|P| < tol` was found in the box.
pub fn distance_to_variety(p: &FloatPoly<f64>, x: &[f64], tol: f64) -> Option<f64> {
    let n = x.len();
    let mut best: Option<f64> = None;
    let mut starts: Vec<Vec<f64>> = vec![x.to_vec()];
    for i in 0..12u64 {
        let dir = crate::sampling::halton_direction(i, n);
        let scale = 0.2 + 0.4 * (i as f64 / 12.0);
        starts.push(x.iter().zip(&dir).map(|(a, d)| a + scale * d).collect());
    }
    for start in starts {
        if let Some(v) = project_to_variety(p, start, tol) {
            let mut v = v;
            // Slide along the tangent toward x, re-projecting.
            for _ in 0..60 {
                let g = p.gradient(&v);
                let gn2: f64 = g.iter().map(|a| a * a).sum();
                if gn2 < 1e-30 {
                    break;
                }
                let diff: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a - b).collect();
                let along: f64 = diff.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / gn2;
                let tangent: Vec<f64> = diff
                    .iter()
                    .zip(&g)
                    .map(|(d, gi)| d - along * gi)
                    .collect();
                let tnorm: f64 = tangent.iter().map(|a| a * a).sum::<f64>().sqrt();
                if tnorm < 1e-12 {
                    break;
                }
                let cand: Vec<f64> = v
                    .iter()
                    .zip(&tangent)
                    .map(|(a, t)| a + 0.5 * t)
                    .collect();
                match project_to_variety(p, cand, tol) {
                    Some(w) if dist(&w, x) < dist(&v, x) => v = w,
                    _ => break,
                }
            }
            let d = dist(&v, x);
            if p.value(&v).abs() < tol && best.map_or(true, |b| d < b) {
                best = Some(d);
            }
        }
    }
    best
}

fn project_to_variety(p: &FloatPoly<f64>, mut v: Vec<f64>, tol: f64) -> Option<Vec<f64>> {
    for _ in 0..80 {
        let val = p.value(&v);
        if val.abs() < tol {
            return Some(v);
        }
        let g = p.gradient(&v);
        let gn2: f64 = g.iter().map(|a| a * a).sum();
        if gn2 < 1e-30 || !val.is_finite() {
            return None;
        }
        let step = val / gn2;
        for (vi, gi) in v.iter_mut().zip(&g) {
            *vi -= step * gi;
        }
        if v.iter().any(|a| a.abs() > 1e6) {
            return None;
        }
    }
    None
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Sample cloud: half uniform over the box, a quarter pushed toward the
/// variety by Newton projection, a quarter shrunk toward the box center on
/// a dyadic ladder so the deepest singular scales are populated.
fn draw_samples(
    p: &FloatPoly<f64>,
    bounds: &[(f64, f64)],
    n_samples: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let mut x: Vec<f64> = bounds
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..hi))
            .collect();
        match i % 4 {
            1 | 3 if i % 8 != 7 => {
                // One projection step toward V(P), then a small back-off so
                // |P| stays positive.
                let val = p.value(&x);
                let g = p.gradient(&x);
                let gn2: f64 = g.iter().map(|a| a * a).sum();
                if gn2 > 1e-30 {
                    let step = val / gn2;
                    for (xi, gi) in x.iter_mut().zip(&g) {
                        *xi -= step * gi;
                    }
                }
                let jitter = 10f64.powf(rng.gen_range(-6.0..-1.0));
                for (d, xi) in x.iter_mut().enumerate() {
                    let width = bounds[d].1 - bounds[d].0;
                    *xi += jitter * width * (rng.gen_range(-0.5..0.5));
                }
            }
            2 | 7 => {
                // Dyadic shrink toward the box center.
                let scale = 2f64.powi(-((i % 13) as i32));
                for (d, xi) in x.iter_mut().enumerate() {
                    let mid = (bounds[d].0 + bounds[d].1) / 2.0;
                    *xi = mid + (*xi - mid) * scale;
                }
            }
            _ => {}
        }
        out.push(x);
    }
    out
}

/// Largest grid exponent `mu` for which the extremal constant in
/// `|grad P| >= c |P|^(1-mu)` does not collapse on the near-variety
/// samples.
pub fn fit_gradient_exponent(
    p: &Polynomial,
    bounds: &[(f64, f64)],
    n_samples: usize,
    seed: u64,
) -> Result<LojasiewiczFit> {
    let fp: FloatPoly<f64> = p.compile();
    let samples = draw_samples(&fp, bounds, n_samples, seed);
    // (u, v) = (log |P|, log |grad P|), kept off the variety.
    let mut data: Vec<(f64, f64)> = Vec::new();
    for x in &samples {
        let val = fp.value(x).abs();
        let grad = fp.grad_norm_sq(x).sqrt();
        if val > 1e-280 && grad > 1e-280 && val.is_finite() && grad.is_finite() {
            data.push((val.ln(), grad.ln()));
        }
    }
    if data.is_empty() {
        return Err(Error::DegenerateSamples("no usable samples".into()));
    }
    let spread = data
        .iter()
        .map(|d| d.0)
        .fold(f64::NEG_INFINITY, f64::max)
        - data.iter().map(|d| d.0).fold(f64::INFINITY, f64::min);
    if spread < 1e-9 {
        return Err(Error::DegenerateSamples(
            "all samples have the same |P|".into(),
        ));
    }
    data.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let near_count = (data.len() * 3 / 20).max(8).min(data.len());
    let far_start = (data.len() / 2).max(near_count);

    let mut best_mu = GRID_STEP;
    let mut best_log_c = f64::NEG_INFINITY;
    for k in 1..=120 {
        let mu = k as f64 * GRID_STEP;
        let margin = |d: &(f64, f64)| d.1 - (1.0 - mu) * d.0;
        let m_near = data[..near_count]
            .iter()
            .map(margin)
            .fold(f64::INFINITY, f64::min);
        let m_far = data[far_start..]
            .iter()
            .map(margin)
            .fold(f64::INFINITY, f64::min);
        let stable = m_near >= m_far - STABILITY_SLACK;
        if stable {
            best_mu = mu;
            best_log_c = m_near.min(m_far);
        }
    }
    let constant_hat = best_log_c.exp();
    let residual = data
        .iter()
        .map(|d| (constant_hat * ((1.0 - best_mu) * d.0).exp() - d.1.exp()).max(0.0))
        .fold(0.0, f64::max);
    Ok(LojasiewiczFit {
        kind: FitKind::Gradient,
        exponent_hat: best_mu,
        constant_hat,
        n_samples: data.len(),
        n_excluded: 0,
        residual,
        seed,
    })
}

/// Smallest grid exponent `nu >= 1` for which the extremal constant in
/// `|P| >= c' d(x, V)^nu` does not collapse on the near-variety samples.
pub fn fit_distance_exponent(
    p: &Polynomial,
    bounds: &[(f64, f64)],
    n_samples: usize,
    seed: u64,
) -> Result<LojasiewiczFit> {
    let fp: FloatPoly<f64> = p.compile();
    let samples = draw_samples(&fp, bounds, n_samples, seed);
    let tol = 1e-12 * p.coeff_scale();
    let mut excluded = 0usize;
    // (w, u) = (log d, log |P|).
    let mut data: Vec<(f64, f64)> = Vec::new();
    for x in &samples {
        let val = fp.value(x).abs();
        if val < 1e-280 || !val.is_finite() {
            continue;
        }
        match distance_to_variety(&fp, x, tol) {
            Some(d) if d > 1e-140 => data.push((d.ln(), val.ln())),
            Some(_) => {}
            None => excluded += 1,
        }
    }
    if data.len() < 8 {
        return Err(Error::DegenerateSamples(format!(
            "only {} usable distance samples",
            data.len()
        )));
    }
    data.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let near_count = (data.len() * 3 / 20).max(8).min(data.len());
    let far_start = (data.len() / 2).max(near_count);

    let mut found: Option<(f64, f64)> = None;
    for k in 0..=600 {
        let nu = 1.0 + k as f64 * GRID_STEP;
        let margin = |d: &(f64, f64)| d.1 - nu * d.0;
        let m_near = data[..near_count]
            .iter()
            .map(margin)
            .fold(f64::INFINITY, f64::min);
        let m_far = data[far_start..]
            .iter()
            .map(margin)
            .fold(f64::INFINITY, f64::min);
        if m_near >= m_far - STABILITY_SLACK {
            found = Some((nu, m_near.min(m_far)));
            break;
        }
    }
    let (nu, log_c) = found.ok_or_else(|| {
        Error::DegenerateSamples("no stable distance exponent on the grid".into())
    })?;
    let constant_hat = log_c.exp();
    let residual = data
        .iter()
        .map(|d| (constant_hat * (nu * d.0).exp() - d.1.exp()).max(0.0))
        .fold(0.0, f64::max);
    Ok(LojasiewiczFit {
        kind: FitKind::Distance,
        exponent_hat: nu,
        constant_hat,
        n_samples: data.len(),
        n_excluded: excluded,
        residual,
        seed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConicReport {
    pub degree: u32,
    pub mu_hat: f64,
    pub bound: f64,
    pub passes: bool,
    /// Exponent refitted on the half-size box.
    pub mu_hat_half_box: f64,
    pub scale_drift: f64,
    pub scale_stable: bool,
}

/// Checks the homogeneous refinement `mu <= 1/degree` (within tolerance)
/// and that the fit is stable under shrinking the box by half.
pub fn verify_conic_refinement(
    p: &Polynomial,
    bounds: &[(f64, f64)],
    n_samples: usize,
    seed: u64,
) -> Result<ConicReport> {
    if !p.is_homogeneous() {
        return Err(Error::Invalid(
            "conic refinement applies to homogeneous polynomials".into(),
        ));
    }
    let degree = p.degree()?;
    let fit = fit_gradient_exponent(p, bounds, n_samples, seed)?;
    let half: Vec<(f64, f64)> = bounds
        .iter()
        .map(|&(lo, hi)| (lo / 2.0, hi / 2.0))
        .collect();
    let refit = fit_gradient_exponent(p, &half, n_samples, seed)?;
    let bound = 1.0 / degree as f64 + 0.05;
    let drift = (fit.exponent_hat - refit.exponent_hat).abs();
    Ok(ConicReport {
        degree,
        mu_hat: fit.exponent_hat,
        bound,
        passes: fit.exponent_hat <= bound,
        mu_hat_half_box: refit.exponent_hat,
        scale_drift: drift,
        scale_stable: drift < 0.02 + 1e-12,
    })
}
