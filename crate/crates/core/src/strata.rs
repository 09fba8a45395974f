//! Multiplicity stratification of a real variety, the tube system around it,
//! and the heuristic admissibility check on codimension-2 strata.
//!
//! The stratum of multiplicity `k` is sampled numerically: a witness is a
//! point where the residual `Q_{k-1} = sum_{j<k} P^j` vanishes to tolerance
//! while the next-level polynomial `P^k` stays bounded away from zero
//! (`P^j` is the sum of squared `j`-th partials, `P^0 = P^2`).

use serde::Serialize;

use crate::field::ScalarField;
use crate::poly::{FloatPoly, Polynomial};
use crate::profile::Cutoff;
use crate::sampling::{halton_direction, halton_point, pca_rank, sym_eigen};
use crate::scalar::{r, Real};

/// Residual below which a candidate counts as lying on the stratum.
pub const WITNESS_RESIDUAL_TOL: f64 = 1e-10;
/// Relative threshold on the next-level polynomial separating multiplicity
/// `k` from `k + 1`.
pub const NEXT_LEVEL_RATIO: f64 = 1e-4;
/// Relative singular-value cutoff for PCA rank estimates.
pub const PCA_CUTOFF: f64 = 1e-3;
/// Absolute noise floor for PCA: witnesses carry position noise of the
/// order of the square root of the residual tolerance.
pub const PCA_FLOOR: f64 = 1e-4;

/// Sublevel tube around the variety: `{ |P| < eps }` for plain tubes,
/// `{ Q_k < eps^2 }` for stratum tubes.
#[derive(Debug, Clone)]
pub struct TubeSpec<R: Real> {
    pub poly: Polynomial,
    pub epsilon: R,
    pub level: Option<u32>,
    p: FloatPoly<R>,
    qk: Option<(Polynomial, FloatPoly<R>)>,
}

/// `Q_k = sum_{j=0}^{k} P^j`; everywhere nonnegative.
pub fn residual_poly(p: &Polynomial, k: u32) -> Polynomial {
    let mut q = Polynomial::zero(p.nvars());
    for j in 0..=k {
        q = &q + &p.sum_sq_partials(j);
    }
    q
}

impl<R: Real> TubeSpec<R> {
    pub fn plain(poly: Polynomial, epsilon: R) -> Self {
        let p = poly.compile();
        TubeSpec {
            poly,
            epsilon,
            level: None,
            p,
            qk: None,
        }
    }

    pub fn stratum(poly: Polynomial, epsilon: R, k: u32) -> Self {
        let q = residual_poly(&poly, k);
        let qk = q.compile();
        let p = poly.compile();
        TubeSpec {
            poly,
            epsilon,
            level: Some(k),
            p,
            qk: Some((q, qk)),
        }
    }

    /// Tube membership test.
    pub fn contains(&self, x: &[R]) -> bool {
        match &self.qk {
            None => self.p.value(x).abs() < self.epsilon,
            Some((_, qk)) => qk.value(x) < self.epsilon * self.epsilon,
        }
    }

    pub fn with_epsilon(&self, epsilon: R) -> Self {
        let mut out = self.clone();
        out.epsilon = epsilon;
        out
    }
}

pub fn in_tube<R: Real>(spec: &TubeSpec<R>, x: &[R]) -> bool {
    spec.contains(x)
}

/// Smooth localization field subordinate to a tube: `phi(u(x))` with
/// `u = |P|/eps` (plain) or `u = Q_k/eps^2` (stratum), identically 1 deep
/// inside the tube and 0 outside the transition annulus.
#[derive(Debug, Clone)]
pub struct SmoothCutoffField<R: Real> {
    spec: TubeSpec<R>,
    cutoff: Cutoff,
}

impl<R: Real> SmoothCutoffField<R> {
    pub fn new(spec: TubeSpec<R>, cutoff: Cutoff) -> Self {
        SmoothCutoffField { spec, cutoff }
    }

    fn argument(&self, x: &[R]) -> R {
        match &self.spec.qk {
            None => self.spec.p.value(x).abs() / self.spec.epsilon,
            Some((_, qk)) => qk.value(x) / (self.spec.epsilon * self.spec.epsilon),
        }
    }
}

impl<R: Real> ScalarField<R> for SmoothCutoffField<R> {
    fn dim(&self) -> usize {
        self.spec.poly.nvars()
    }

    fn value(&self, x: &[R]) -> R {
        self.cutoff.value(self.argument(x))
    }

    fn gradient(&self, x: &[R]) -> Vec<R> {
        let du = self.cutoff.d1(self.argument(x));
        if du == r(0.0) {
            return vec![r(0.0); self.dim()];
        }
        match &self.spec.qk {
            None => {
                let pv = self.spec.p.value(x);
                let sign = if pv >= r(0.0) { r(1.0) } else { r(-1.0) };
                self.spec
                    .p
                    .gradient(x)
                    .into_iter()
                    .map(|g| du * sign * g / self.spec.epsilon)
                    .collect()
            }
            Some((_, qk)) => {
                let e2 = self.spec.epsilon * self.spec.epsilon;
                qk.gradient(x).into_iter().map(|g| du * g / e2).collect()
            }
        }
    }
}

/// One multiplicity stratum with its sampled witnesses.
#[derive(Debug, Clone, Serialize)]
pub struct StratumInfo {
    pub multiplicity: u32,
    /// Defining polynomial `P^k` of the next level.
    pub defining: Polynomial,
    pub witnesses: Vec<Vec<f64>>,
    /// `Q_{k-1}` residual at each witness.
    pub residuals: Vec<f64>,
    /// `P^k` value at each witness (bounded away from zero).
    pub next_level_values: Vec<f64>,
    pub codim_estimate: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stratification {
    pub poly: Polynomial,
    pub strata: Vec<StratumInfo>,
    pub max_mult: u32,
}

/// Search box for witnesses.
const SEARCH_LO: f64 = -2.0;
const SEARCH_HI: f64 = 2.0;
const MAX_WITNESSES: usize = 240;

/// Samples the multiplicity strata of `V(P)` by multi-start projected
/// gradient descent on the residuals `Q_{k-1}`, started from Halton points
/// in the search box. Strata where the budget found nothing are reported
/// with empty witness lists.
pub fn stratify(p: &Polynomial, sample_budget: usize) -> Stratification {
    let deg = match p.degree() {
        Ok(d) if d >= 1 => d,
        _ => {
            return Stratification {
                poly: p.clone(),
                strata: Vec::new(),
                max_mult: 0,
            }
        }
    };
    let n = p.nvars();
    let bounds: Vec<(f64, f64)> = vec![(SEARCH_LO, SEARCH_HI); n];
    let mut strata = Vec::new();
    let mut max_mult = 0;

    for k in 1..=deg {
        let residual = residual_poly(p, k - 1);
        let objective: FloatPoly<f64> = residual.compile();
        let next = p.sum_sq_partials(k);
        let next_f: FloatPoly<f64> = next.compile();
        let next_scale = next.coeff_scale();

        let mut witnesses = Vec::new();
        let mut residuals = Vec::new();
        let mut next_values = Vec::new();
        for start_idx in 0..sample_budget as u64 {
            if witnesses.len() >= MAX_WITNESSES {
                break;
            }
            let start = halton_point(start_idx, &bounds);
            if let Some(w) = descend(&objective, start, WITNESS_RESIDUAL_TOL) {
                let nv = next_f.value(&w);
                if nv.abs() > NEXT_LEVEL_RATIO * next_scale {
                    residuals.push(objective.value(&w));
                    next_values.push(nv);
                    witnesses.push(w);
                }
            }
        }
        if !witnesses.is_empty() {
            max_mult = k;
        }
        strata.push(StratumInfo {
            multiplicity: k,
            defining: next,
            codim_estimate: estimate_codim(n, &witnesses),
            witnesses,
            residuals,
            next_level_values: next_values,
        });
    }

    Stratification {
        poly: p.clone(),
        strata,
        max_mult,
    }
}

/// Projected gradient descent with Armijo backtracking, clamped to a box
/// slightly larger than the search box.
fn descend(objective: &FloatPoly<f64>, mut x: Vec<f64>, tol: f64) -> Option<Vec<f64>> {
    let clamp = |v: f64| v.clamp(SEARCH_LO - 0.5, SEARCH_HI + 0.5);
    let mut fx = objective.value(&x);
    for _ in 0..300 {
        if fx < tol * 1e-2 {
            break;
        }
        let g = objective.gradient(&x);
        let gnorm2: f64 = g.iter().map(|a| a * a).sum();
        if gnorm2 < 1e-32 {
            break;
        }
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let cand: Vec<f64> = x
                .iter()
                .zip(&g)
                .map(|(xi, gi)| clamp(xi - step * gi))
                .collect();
            let fc = objective.value(&cand);
            if fc <= fx - 1e-4 * step * gnorm2 {
                x = cand;
                fx = fc;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (fx < tol).then_some(x)
}

/// Stratum dimension by local PCA: for each witness, the rank of the cloud
/// of nearby witnesses; the stratum estimate is the most frequent local
/// rank. Needs at least 20 points in some neighborhood.
fn estimate_codim(n: usize, witnesses: &[Vec<f64>]) -> Option<usize> {
    if witnesses.len() < 20 {
        return None;
    }
    let mut dims = Vec::new();
    for w in witnesses {
        let local: Vec<Vec<f64>> = witnesses
            .iter()
            .filter(|v| dist(v, w) < 0.8)
            .cloned()
            .collect();
        if local.len() >= 20 {
            dims.push(pca_rank(&local, PCA_CUTOFF, PCA_FLOOR));
        }
    }
    if dims.is_empty() {
        return Some(n.saturating_sub(pca_rank(witnesses, PCA_CUTOFF, PCA_FLOOR)));
    }
    let mut counts = std::collections::BTreeMap::new();
    for d in dims {
        *counts.entry(d).or_insert(0usize) += 1;
    }
    let mode = counts
        .into_iter()
        .max_by_key(|&(d, c)| (c, usize::MAX - d))
        .map(|(d, _)| d)
        .unwrap();
    Some(n.saturating_sub(mode))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Verdict of the admissibility check on one stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GhVerdict {
    Passes,
    Fails,
    Inconclusive,
    /// Stratum is not of codimension 2, so the condition does not apply.
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct GhReport {
    pub per_stratum: Vec<(u32, GhVerdict)>,
    pub overall: GhVerdict,
}

/// Heuristic admissibility check: on each estimated codimension-2 stratum,
/// the span of unit gradients of `P` sampled near a witness approximates
/// the directions transverse to the variety; its orthogonal complement `E`
/// spans the candidate slice. The check searches the affine slice `x + E`
/// for points of `V(P)` distinct from `x`.
///
/// Low confidence (no codim-2 data, tiny budget, unstable rank) yields
/// `Inconclusive` rather than a boolean.
pub fn class_gh_check(
    p: &Polynomial,
    stratification: &Stratification,
    sample_budget: usize,
) -> GhReport {
    let n = p.nvars();
    let fp: FloatPoly<f64> = p.compile();
    let scale = p.coeff_scale();
    let mut per_stratum = Vec::new();

    for stratum in &stratification.strata {
        if stratum.codim_estimate != Some(2) {
            per_stratum.push((stratum.multiplicity, GhVerdict::NotApplicable));
            continue;
        }
        if sample_budget == 0 || stratum.witnesses.is_empty() {
            per_stratum.push((stratum.multiplicity, GhVerdict::Inconclusive));
            continue;
        }
        let mut passed = 0usize;
        let mut tested = 0usize;
        for w in stratum.witnesses.iter().take(8) {
            match slice_meets_variety(&fp, w, n, scale, sample_budget) {
                Some(true) => {
                    passed += 1;
                    tested += 1;
                }
                Some(false) => tested += 1,
                None => {}
            }
        }
        let verdict = if tested == 0 {
            GhVerdict::Inconclusive
        } else if 2 * passed >= tested {
            GhVerdict::Passes
        } else {
            GhVerdict::Fails
        };
        per_stratum.push((stratum.multiplicity, verdict));
    }

    let overall = if per_stratum.iter().any(|&(_, v)| v == GhVerdict::Fails) {
        GhVerdict::Fails
    } else if per_stratum
        .iter()
        .any(|&(_, v)| v == GhVerdict::Inconclusive)
    {
        GhVerdict::Inconclusive
    } else {
        // Vacuous when no codimension-2 stratum exists.
        GhVerdict::Passes
    };

    GhReport {
        per_stratum,
        overall,
    }
}

/// Estimates the slice plane at `w` and searches it for variety points away
/// from `w`. Returns `None` when the gradient cloud is too degenerate to
/// trust.
fn slice_meets_variety(
    fp: &FloatPoly<f64>,
    w: &[f64],
    n: usize,
    scale: f64,
    budget: usize,
) -> Option<bool> {
    // Gradient directions sampled around the witness span the transverse
    // space L; the slice E is its numerical null space.
    let delta = 1e-2;
    let mut moment = vec![vec![0.0; n]; n];
    let mut count = 0usize;
    for i in 0..(40.max(budget.min(400))) as u64 {
        let dir: Vec<f64> = halton_direction(i, n);
        let x: Vec<f64> = w.iter().zip(&dir).map(|(a, d)| a + delta * d).collect();
        let g = fp.gradient(&x);
        let gn = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        if gn < 1e-14 * scale {
            continue;
        }
        for a in 0..n {
            for b in 0..n {
                moment[a][b] += g[a] * g[b] / (gn * gn);
            }
        }
        count += 1;
    }
    if count < 10 {
        return None;
    }
    let (vals, vecs) = sym_eigen(&moment);
    let top = vals[0].max(1e-30);
    let slice_dirs: Vec<Vec<f64>> = vals
        .iter()
        .zip(&vecs)
        .filter(|(v, _)| v.max(0.0) / top < PCA_CUTOFF)
        .map(|(_, e)| e.clone())
        .collect();
    if slice_dirs.is_empty() {
        return Some(false);
    }

    // Search the slice for a zero of P away from the witness.
    let m = slice_dirs.len();
    let radius_ladder = [0.1, 0.2, 0.4];
    for (ri, &radius) in radius_ladder.iter().enumerate() {
        for i in 0..(16 * budget.clamp(1, 64)) as u64 {
            let t: Vec<f64> = halton_direction(i + 1000 * ri as u64, m);
            let mut y = w.to_vec();
            for (dir, &ti) in slice_dirs.iter().zip(&t) {
                for d in 0..n {
                    y[d] += radius * ti * dir[d];
                }
            }
            if let Some(z) = polish_on_slice(fp, &y, w, &slice_dirs) {
                if dist(&z, w) > 0.05 && fp.value(&z).abs() < 1e-8 * scale {
                    return Some(true);
                }
            }
        }
    }
    Some(false)
}

/// Gradient descent of `P^2` restricted to the affine slice.
fn polish_on_slice(
    fp: &FloatPoly<f64>,
    start: &[f64],
    base: &[f64],
    dirs: &[Vec<f64>],
) -> Option<Vec<f64>> {
    let n = start.len();
    // Coordinates of the current point within the slice.
    let mut t: Vec<f64> = dirs
        .iter()
        .map(|d| {
            (0..n)
                .map(|i| (start[i] - base[i]) * d[i])
                .sum::<f64>()
        })
        .collect();
    let point = |t: &[f64]| -> Vec<f64> {
        let mut y = base.to_vec();
        for (d, &ti) in dirs.iter().zip(t) {
            for i in 0..n {
                y[i] += ti * d[i];
            }
        }
        y
    };
    let value = |t: &[f64]| -> f64 {
        let v = fp.value(&point(t));
        v * v
    };
    let mut ft = value(&t);
    for _ in 0..120 {
        if ft < 1e-22 {
            break;
        }
        let y = point(&t);
        let v = fp.value(&y);
        let g_full = fp.gradient(&y);
        let g: Vec<f64> = dirs
            .iter()
            .map(|d| 2.0 * v * d.iter().zip(&g_full).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let gn2: f64 = g.iter().map(|a| a * a).sum();
        if gn2 < 1e-30 {
            break;
        }
        let mut step = 1.0;
        let mut ok = false;
        for _ in 0..40 {
            let cand: Vec<f64> = t.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let fc = value(&cand);
            if fc <= ft - 1e-4 * step * gn2 {
                t = cand;
                ft = fc;
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if !ok {
            break;
        }
    }
    (ft < 1e-16).then(|| point(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    #[test]
    fn in_tube_examples() {
        let line = parse("x1", 2).unwrap();
        let tube = TubeSpec::plain(line.clone(), 1.0_f64);
        assert!(tube.contains(&[0.5, 0.0]));
        assert!(!tube.contains(&[2.0, 0.0]));

        let cross = parse("x1*x2", 2).unwrap();
        let stratum_tube = TubeSpec::stratum(cross, 0.1_f64, 1);
        assert!(stratum_tube.contains(&[0.0, 0.0]));
    }

    #[test]
    fn cutoff_field_values_and_support() {
        let line = parse("x1", 2).unwrap();
        let spec = TubeSpec::plain(line, 1.0_f64);
        let field = SmoothCutoffField::new(spec, Cutoff::new(0.5));
        // Deep inside the tube.
        assert_eq!(field.value(&[0.1, 0.3]), 1.0);
        assert!(field.gradient(&[0.1, 0.3]).iter().all(|&g| g == 0.0));
        // Outside the support.
        assert_eq!(field.value(&[2.0, 0.0]), 0.0);
        assert!(field.gradient(&[2.0, 0.0]).iter().all(|&g| g == 0.0));
        // Transition annulus: value = phi(|x1|), gradient by chain rule.
        let x = [1.2, 0.0];
        let v = field.value(&x);
        assert!(v > 0.0 && v < 1.0);
        let g = field.gradient(&x);
        let expected = Cutoff::new(0.5).d1(1.2_f64);
        assert!((g[0] - expected).abs() < 1e-12);
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn cutoff_gradient_matches_finite_differences() {
        let cross = parse("x1*x2", 2).unwrap();
        let spec = TubeSpec::stratum(cross, 0.4_f64, 1);
        let field = SmoothCutoffField::new(spec, Cutoff::new(0.5));
        let pts = [[0.55, 0.8], [0.7, 0.9], [1.1, 0.5]];
        let h = 1e-6;
        for x in pts {
            let g = field.gradient(&x);
            for d in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[d] += h;
                xm[d] -= h;
                let fd = (field.value(&xp) - field.value(&xm)) / (2.0 * h);
                assert!(
                    (g[d] - fd).abs() <= 1e-5 * (1.0 + fd.abs()),
                    "x={x:?} d={d} analytic={} fd={fd}",
                    g[d]
                );
            }
        }
    }

    #[test]
    fn stratify_cross() {
        let cross = parse("x1*x2", 2).unwrap();
        let s = stratify(&cross, 256);
        assert_eq!(s.max_mult, 2);
        let s1 = &s.strata[0];
        assert!(!s1.witnesses.is_empty(), "smooth stratum sampled");
        // Witnesses of multiplicity 1 lie on one axis, off the origin.
        for w in &s1.witnesses {
            let on_axis = w[0].abs() < 1e-4 || w[1].abs() < 1e-4;
            assert!(on_axis, "witness {w:?} not on an axis");
            assert!(dist(w, &[0.0, 0.0]) > 1e-3);
        }
        let s2 = &s.strata[1];
        assert!(!s2.witnesses.is_empty(), "origin stratum sampled");
        for w in &s2.witnesses {
            assert!(dist(w, &[0.0, 0.0]) < 1e-4, "witness {w:?} not at origin");
        }
        assert_eq!(s2.codim_estimate, Some(2));
    }

    #[test]
    fn stratify_circle_has_only_the_origin() {
        let circle = parse("x1^2+x2^2", 2).unwrap();
        let s = stratify(&circle, 256);
        assert!(s.strata[0].witnesses.is_empty(), "no smooth real points");
        assert!(!s.strata[1].witnesses.is_empty());
        for w in &s.strata[1].witnesses {
            assert!(dist(w, &[0.0, 0.0]) < 1e-4);
        }
    }

    #[test]
    fn stratify_cubic_axis() {
        let cubic = parse("x1*(x2^2+x3^2)+x2^3", 3).unwrap();
        let s = stratify(&cubic, 512);
        let s2 = &s.strata[1];
        assert!(!s2.witnesses.is_empty(), "singular axis sampled");
        let mut on_axis = 0;
        for w in &s2.witnesses {
            if w[1].abs() < 1e-4 && w[2].abs() < 1e-4 {
                on_axis += 1;
            }
        }
        assert!(
            on_axis * 2 >= s2.witnesses.len(),
            "most multiplicity-2 witnesses on the x1 axis: {on_axis}/{}",
            s2.witnesses.len()
        );
    }

    #[test]
    fn nesting_of_residual_tubes() {
        // Witnesses of the higher stratum satisfy the lower-stratum tube
        // predicate for any epsilon above their own residual.
        let cross = parse("x1*x2", 2).unwrap();
        let s = stratify(&cross, 256);
        let q1 = residual_poly(&cross, 1).compile::<f64>();
        for w in &s.strata[1].witnesses {
            let tube = TubeSpec::stratum(cross.clone(), (q1.value(w).abs().sqrt() + 1e-6) * 2.0, 1);
            assert!(tube.contains(w));
        }
    }

    #[test]
    fn scaling_equivariance_of_witnesses() {
        // For homogeneous P a scaled witness stays on the stratum after
        // rescaling the tolerance.
        let cross = parse("x1*x2", 2).unwrap();
        let s = stratify(&cross, 128);
        let q0: FloatPoly<f64> = residual_poly(&cross, 0).compile();
        for w in s.strata[0].witnesses.iter().take(10) {
            for lambda in [0.5, 2.0] {
                let scaled: Vec<f64> = w.iter().map(|a| a * lambda).collect();
                // Q_0 = P^2 scales by lambda^{2 deg}.
                let factor = lambda.powi(4);
                assert!(q0.value(&scaled) <= factor * WITNESS_RESIDUAL_TOL * 1.01 + 1e-30);
            }
        }
    }

    #[test]
    fn gh_check_examples() {
        // Cylinder over a point in 3 vars: codim-2 stratum along the x3
        // axis; the slice contains the axis itself.
        let cyl = parse("x1^2+x2^2", 3).unwrap();
        let s = stratify(&cyl, 512);
        let report = class_gh_check(&cyl, &s, 32);
        assert_eq!(report.overall, GhVerdict::Passes, "{report:?}");

        // No codim-2 stratum: vacuous pass.
        let line = parse("x1", 2).unwrap();
        let s = stratify(&line, 64);
        let report = class_gh_check(&line, &s, 32);
        assert_eq!(report.overall, GhVerdict::Passes);

        // Budget 0 with a codim-2 stratum present: inconclusive.
        let cross = parse("x1*x2", 2).unwrap();
        let s = stratify(&cross, 256);
        let report = class_gh_check(&cross, &s, 0);
        assert_eq!(report.overall, GhVerdict::Inconclusive);
    }

    #[test]
    fn empty_stratification_for_constant() {
        let c = parse("3", 2).unwrap();
        let s = stratify(&c, 32);
        assert!(s.strata.is_empty());
        assert_eq!(s.max_mult, 0);
    }
}
