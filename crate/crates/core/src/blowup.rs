//! Local reduction of a hypersurface singularity to normal crossings by
//! blow-ups: Weierstrass-style preparation, center selection from the
//! monomial content of the coefficient polynomials, chart transforms, and
//! the multiplicity-descent loop with its termination bound.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::{Polynomial, RationalPoint};
use crate::scalar::Rat;

/// Serializes rationals as `"p/q"` strings inside reports.
fn ser_rat_vec<S: Serializer>(v: &Option<Vec<Rat>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(v) => {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&q.to_string())?;
            }
            seq.end()
        }
    }
}

fn ser_rat<S: Serializer>(q: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// One blow-up chart of the center `{x_i = 0 : i in blown}`.
///
/// The divisor coordinate is `x_k` for `k = chart_index`; the substitution
/// is `x_k = y_k`, `x_j = y_j * y_k` for the other blown-up variables, and
/// identity on the carried variables. The volume form pulls back with the
/// Jacobian monomial `y_k^(c-1)` where `c` is the codimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chart {
    pub nvars: usize,
    /// 1-based ambient variables blown up (the center is their common zero set).
    pub blown: Vec<usize>,
    /// 1-based index of the divisor coordinate; must be in `blown`.
    pub chart_index: usize,
}

impl Chart {
    pub fn new(nvars: usize, blown: Vec<usize>, chart_index: usize) -> Self {
        assert!(blown.contains(&chart_index), "chart index must be blown up");
        assert!(blown.iter().all(|&i| i >= 1 && i <= nvars));
        Chart {
            nvars,
            blown,
            chart_index,
        }
    }

    pub fn codim(&self) -> usize {
        self.blown.len()
    }

    pub fn jacobian_exponent(&self) -> u32 {
        (self.codim() - 1) as u32
    }

    /// Substitution images of the ambient variables.
    pub fn images(&self) -> Vec<Polynomial> {
        let n = self.nvars;
        let yk = Polynomial::var(n, self.chart_index).expect("chart index in range");
        (1..=n)
            .map(|i| {
                let yi = Polynomial::var(n, i).expect("index in range");
                if i == self.chart_index {
                    yk.clone()
                } else if self.blown.contains(&i) {
                    &yi * &yk
                } else {
                    yi
                }
            })
            .collect()
    }

    /// Forward map on points: `x = sigma(y)`.
    pub fn map_point(&self, y: &[f64]) -> Vec<f64> {
        let k = self.chart_index - 1;
        y.iter()
            .enumerate()
            .map(|(i, &yi)| {
                if i != k && self.blown.contains(&(i + 1)) {
                    yi * y[k]
                } else {
                    yi
                }
            })
            .collect()
    }

    /// Inverse on the torus `{x_k != 0}`.
    pub fn inverse_point(&self, x: &[f64]) -> Vec<f64> {
        let k = self.chart_index - 1;
        x.iter()
            .enumerate()
            .map(|(i, &xi)| {
                if i != k && self.blown.contains(&(i + 1)) {
                    xi / x[k]
                } else {
                    xi
                }
            })
            .collect()
    }
}

/// Total and strict transform of `p` through a chart along a center of
/// order `m`: `sigma*(p) = y_k^m * strict`, both exact.
pub fn apply_chart(p: &Polynomial, chart: &Chart, m: u32) -> Result<(Polynomial, Polynomial)> {
    let total = p.substitute(&chart.images())?;
    let strict = total
        .factor_out_variable_power(chart.chart_index, m)
        .map_err(|e| Error::CenterOrder(e.to_string()))?;
    Ok((total, strict))
}

/// Invertible linear coordinate change with exact rational entries.
#[derive(Debug, Clone, Serialize)]
pub struct CoordChange {
    pub kind: CoordChangeKind,
    pub label: String,
    #[serde(skip)]
    pub images: Vec<Polynomial>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordChangeKind {
    Identity,
    /// Swap of two coordinates.
    Swap(usize, usize),
    /// `x_i = y_i + t_i * y_n` for i < n.
    Shear,
}

impl CoordChange {
    fn identity(n: usize) -> Self {
        CoordChange {
            kind: CoordChangeKind::Identity,
            label: "identity".into(),
            images: (1..=n)
                .map(|i| Polynomial::var(n, i).expect("index in range"))
                .collect(),
        }
    }

    fn swap(n: usize, i: usize, j: usize) -> Self {
        let images = (1..=n)
            .map(|v| {
                let target = if v == i {
                    j
                } else if v == j {
                    i
                } else {
                    v
                };
                Polynomial::var(n, target).expect("index in range")
            })
            .collect();
        CoordChange {
            kind: CoordChangeKind::Swap(i, j),
            label: format!("swap x{i} <-> x{j}"),
            images,
        }
    }

    fn shear(n: usize, t: &[Rat]) -> Self {
        let yn = Polynomial::var(n, n).expect("index in range");
        let images = (1..=n)
            .map(|i| {
                let yi = Polynomial::var(n, i).expect("index in range");
                if i < n {
                    &yi + &yn.scale(&t[i - 1])
                } else {
                    yi
                }
            })
            .collect();
        let label = format!(
            "shear x_i = y_i + t_i*y{n} with t = [{}]",
            t.iter()
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
        CoordChange {
            kind: CoordChangeKind::Shear,
            label,
            images,
        }
    }
}

/// Deterministic shear parameter sequence.
fn shear_values() -> Vec<Rat> {
    let mut out = Vec::new();
    out.push(Rat::zero());
    for k in 1..=6i64 {
        out.push(Rat::from_integer(k.into()));
        out.push(Rat::from_integer((-k).into()));
        if k > 1 {
            out.push(Rat::new(1.into(), k.into()));
            out.push(Rat::new((-1).into(), k.into()));
        }
    }
    out
}

/// Finds an exact linear change making the initial form at `a` nonzero on
/// the last coordinate axis: tries coordinate swaps first, then a
/// deterministic sequence of rational shears.
pub fn rotate_to_regular(p: &Polynomial, a: &RationalPoint) -> Result<(CoordChange, Polynomial)> {
    let n = p.nvars();
    let translated = p.translate(a)?;
    let init = translated.initial_form(&RationalPoint::origin(n))?;

    // Axis probe, preferring the last variable (identity change).
    for i in (1..=n).rev() {
        let mut e = vec![Rat::zero(); n];
        e[i - 1] = Rat::one();
        if !init.eval_rat(&RationalPoint(e))?.is_zero() {
            let change = if i == n {
                CoordChange::identity(n)
            } else {
                CoordChange::swap(n, i, n)
            };
            let transformed = translated.substitute(&change.images)?;
            return Ok((change, transformed));
        }
    }

    // Shear probe: directions v = (t_1, .., t_{n-1}, 1).
    let values = shear_values();
    let mut stack = vec![Vec::<Rat>::new()];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == n - 1 {
            let mut v = prefix.clone();
            v.push(Rat::one());
            if !init.eval_rat(&RationalPoint(v))?.is_zero() {
                let change = CoordChange::shear(n, &prefix);
                let transformed = translated.substitute(&change.images)?;
                return Ok((change, transformed));
            }
            continue;
        }
        // Push in reverse so small parameters are tried first.
        for t in values.iter().rev() {
            let mut next = prefix.clone();
            next.push(t.clone());
            stack.push(next);
        }
    }
    Err(Error::RegularizationFailed(format!(
        "no direction in the shear grid regularizes {p}"
    )))
}

/// Weierstrass-style split of a polynomial regular of order `m` in the last
/// variable: `prepared = unit * x_n^m + sum_{k<m} coeffs[k] * x_n^k` with
/// `unit(0) != 0` and, after the translation step, `coeffs[m-1] == 0`.
#[derive(Debug, Clone, Serialize)]
pub struct WeierstrassData {
    pub m: u32,
    pub prepared: Polynomial,
    pub unit: Polynomial,
    pub coeffs: Vec<Polynomial>,
    /// Shift `T` applied as `x_n -> x_n - T` to kill the top coefficient.
    pub translation: Option<Polynomial>,
    /// Set when the unit is non-constant so the killing shift would leave
    /// the polynomial ring; the split proceeds with `coeffs[m-1] != 0`.
    pub translation_skipped: bool,
}

fn split_by_last_var(p: &Polynomial, m: u32) -> Result<(Polynomial, Vec<Polynomial>)> {
    let n = p.nvars();
    let layers = p.coefficients_of(n);
    let xn = Polynomial::var(n, n).expect("index in range");
    let mut unit = Polynomial::zero(n);
    for (k, layer) in layers.iter().enumerate().skip(m as usize) {
        unit = &unit + &(layer * &xn.pow(k as u32 - m));
    }
    let mut coeffs = vec![Polynomial::zero(n); m as usize];
    for (k, layer) in layers.iter().enumerate().take(m as usize) {
        coeffs[k] = layer.clone();
    }
    if unit
        .eval_rat(&RationalPoint::origin(n))?
        .is_zero()
    {
        return Err(Error::Invalid(format!(
            "polynomial is not regular of order {m} in x{n}: {p}"
        )));
    }
    Ok((unit, coeffs))
}

pub fn weierstrass_split(p: &Polynomial, m: u32) -> Result<WeierstrassData> {
    let n = p.nvars();
    let (unit, coeffs) = split_by_last_var(p, m)?;
    let top = &coeffs[m as usize - 1];

    if top.is_zero() {
        return Ok(WeierstrassData {
            m,
            prepared: p.clone(),
            unit,
            coeffs,
            translation: None,
            translation_skipped: false,
        });
    }

    if !unit.is_constant() {
        // The killing shift T = c_{m-1}/(m*unit) is not polynomial.
        return Ok(WeierstrassData {
            m,
            prepared: p.clone(),
            unit,
            coeffs,
            translation: None,
            translation_skipped: true,
        });
    }

    let q0 = unit.constant_term();
    let shift = top.scale(&(Rat::one() / (Rat::from_integer(m.into()) * q0)));
    let images: Vec<Polynomial> = (1..=n)
        .map(|i| {
            let yi = Polynomial::var(n, i).expect("index in range");
            if i == n {
                &yi - &shift
            } else {
                yi
            }
        })
        .collect();
    let prepared = p.substitute(&images)?;
    let (unit, coeffs) = split_by_last_var(&prepared, m)?;
    debug_assert!(coeffs[m as usize - 1].is_zero());
    Ok(WeierstrassData {
        m,
        prepared,
        unit,
        coeffs,
        translation: Some(shift),
        translation_skipped: false,
    })
}

impl WeierstrassData {
    /// `unit * x_n^m + sum coeffs[k] * x_n^k`; equals `prepared` exactly.
    pub fn reconstruct(&self) -> Polynomial {
        let n = self.prepared.nvars();
        let xn = Polynomial::var(n, n).expect("index in range");
        let mut acc = &self.unit * &xn.pow(self.m);
        for (k, c) in self.coeffs.iter().enumerate() {
            acc = &acc + &(c * &xn.pow(k as u32));
        }
        acc
    }
}

/// Product of all nonzero `c_k^(m!/(m-k))` and all their nonzero pairwise
/// differences; the common scaling by `m!` keeps the exponents integral.
pub fn aux_function(w: &WeierstrassData) -> Result<Polynomial> {
    let n = w.prepared.nvars();
    let m = w.m;
    let mfact: u64 = (1..=m as u64).product();
    let mut powers: Vec<Polynomial> = Vec::new();
    for (k, c) in w.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = mfact / (m as u64 - k as u64);
        if e > 64 {
            return Err(Error::Invalid(format!(
                "auxiliary exponent {mfact}/{} too large",
                m as u64 - k as u64
            )));
        }
        powers.push(c.pow(e as u32));
    }
    let mut acc = Polynomial::one(n);
    for p in &powers {
        acc = &acc * p;
    }
    for i in 0..powers.len() {
        for j in (i + 1)..powers.len() {
            let diff = &powers[i] - &powers[j];
            if !diff.is_zero() {
                acc = &acc * &diff;
            }
        }
    }
    Ok(acc)
}

/// Outcome of the prepared-form check: the exponent vector `gamma` over the
/// first `n-1` variables, in `(1/m!) * N^(n-1)`.
#[derive(Debug, Clone, Serialize)]
pub struct CaseStar {
    #[serde(serialize_with = "ser_rat_vec")]
    pub gamma: Option<Vec<Rat>>,
    /// Whether some minimal coefficient has unit cofactor at the origin.
    pub unit_at_origin: bool,
}

/// Extracts the normalized monomial contents `Omega_k / (m - k)` of the
/// nonzero coefficients and checks they are totally ordered componentwise;
/// returns the minimum as `gamma`. `None` means the prepared situation has
/// not been reached (incomparable contents).
pub fn case_star_check(w: &WeierstrassData) -> Option<CaseStar> {
    let n = w.prepared.nvars();
    let mut candidates: Vec<(usize, Vec<Rat>)> = Vec::new();
    for (k, c) in w.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let content = c.monomial_content();
        debug_assert_eq!(content[n - 1], 0, "coefficients do not involve x_n");
        let denom = Rat::from_integer((w.m as i64 - k as i64).into());
        let rho: Vec<Rat> = content[..n - 1]
            .iter()
            .map(|&e| Rat::from_integer(e.into()) / denom.clone())
            .collect();
        candidates.push((k, rho));
    }
    if candidates.is_empty() {
        // No lower coefficients at all: already a monomial times a unit.
        return Some(CaseStar {
            gamma: Some(vec![Rat::zero(); n - 1]),
            unit_at_origin: true,
        });
    }
    // Componentwise comparability of every pair.
    let leq = |a: &[Rat], b: &[Rat]| a.iter().zip(b).all(|(x, y)| x <= y);
    for i in 0..candidates.len() {
        for j in (i + 1)..candidates.len() {
            let (a, b) = (&candidates[i].1, &candidates[j].1);
            if !leq(a, b) && !leq(b, a) {
                return None;
            }
        }
    }
    let (min_idx, _) = candidates
        .iter()
        .enumerate()
        .min_by(|(_, (_, a)), (_, (_, b))| {
            if leq(a, b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        })
        .expect("nonempty");
    let gamma = candidates[min_idx].1.clone();
    // Unit condition on a minimal coefficient: stripping the content leaves
    // a nonzero constant term.
    let unit_at_origin = candidates
        .iter()
        .filter(|(_, rho)| *rho == gamma)
        .any(|(k, _)| {
            let (_, cofactor) = w.coeffs[*k].strip_monomial_content();
            !cofactor.constant_term().is_zero()
        });
    Some(CaseStar {
        gamma: Some(gamma),
        unit_at_origin,
    })
}

/// Minimal index set `I` with `sum_{i in I} gamma_i >= 1` and
/// `0 <= sum - 1 < gamma_k` for every `k in I`; subsets are scanned by
/// cardinality then lexicographically.
pub fn select_center(gamma: &[Rat], _m: u32) -> Result<Vec<usize>> {
    let total: Rat = gamma.iter().cloned().sum();
    if total < Rat::one() {
        return Err(Error::NoCenter {
            total: total.to_string(),
        });
    }
    let n = gamma.len();
    for card in 1..=n {
        let mut indices: Vec<usize> = (0..card).collect();
        loop {
            let sum: Rat = indices.iter().map(|&i| gamma[i].clone()).sum();
            if sum >= Rat::one() {
                let excess = sum.clone() - Rat::one();
                if indices.iter().all(|&i| excess < gamma[i]) {
                    return Ok(indices.iter().map(|&i| i + 1).collect());
                }
            }
            if !next_combination(&mut indices, n) {
                break;
            }
        }
    }
    Err(Error::NoCenter {
        total: total.to_string(),
    })
}

/// Advances to the next lexicographic k-combination of `0..n`.
fn next_combination(indices: &mut [usize], n: usize) -> bool {
    let k = indices.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if indices[i] != i + n - k {
            indices[i] += 1;
            for j in (i + 1)..k {
                indices[j] = indices[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// True iff, after translating `a` to the origin and factoring out the
/// maximal monomial, the cofactor is nonvanishing at the origin.
pub fn is_normal_crossings(p: &Polynomial, a: &RationalPoint) -> bool {
    if p.is_zero() {
        return false;
    }
    let translated = match p.translate(a) {
        Ok(t) => t,
        Err(_) => return false,
    };
    let (_, cofactor) = translated.strip_monomial_content();
    !cofactor.constant_term().is_zero()
}

/// Logarithmic vector fields: `D_i = x_i d/dx_i` and the generator of
/// dilations `E = sum_i x_i d/dx_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorField {
    LogDerivative(usize),
    Euler,
}

/// A combination `sum_i coeffs[i] * y_i d/dy_i` in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCombo {
    pub coeffs: Vec<Rat>,
}

impl FieldCombo {
    /// Applies the combination to a polynomial in chart coordinates.
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero(p.nvars());
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let xi = Polynomial::var(p.nvars(), i + 1).expect("index in range");
            let term = &xi * &p.partial(i + 1).expect("index in range");
            acc = &acc + &term.scale(c);
        }
        acc
    }
}

fn field_coeffs(field: &VectorField, n: usize) -> Vec<Rat> {
    match field {
        VectorField::Euler => vec![Rat::one(); n],
        VectorField::LogDerivative(i) => {
            let mut v = vec![Rat::zero(); n];
            v[i - 1] = Rat::one();
            v
        }
    }
}

/// Expresses an ambient logarithmic field in chart coordinates: the
/// pullback relations are `D_{x_i} = D_{y_i}` away from the divisor
/// coordinate and `D_{x_k} = D_{y_k} - sum_{j in blown, j != k} D_{y_j}`.
pub fn vector_field_transform(field: &VectorField, chart: &Chart) -> FieldCombo {
    let n = chart.nvars;
    let a = field_coeffs(field, n);
    let k = chart.chart_index;
    let mut coeffs = vec![Rat::zero(); n];
    for i in 1..=n {
        if i == k {
            coeffs[i - 1] = a[k - 1].clone();
        } else if chart.blown.contains(&i) {
            coeffs[i - 1] = a[i - 1].clone() - a[k - 1].clone();
        } else {
            coeffs[i - 1] = a[i - 1].clone();
        }
    }
    FieldCombo { coeffs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeFlag {
    /// The unit was non-constant, so the top coefficient was not killed.
    TranslationSkipped,
    /// Coefficient contents were incomparable; preparatory steps out of scope.
    CaseStarUnreachable,
    /// Node budget ran out before this node was expanded.
    BudgetExhausted,
    /// `|gamma| < 1`: the high-multiplicity locus is isolated, so the point
    /// itself was blown up.
    PointBlowUp,
    /// A shear was applied after earlier blow-ups; accumulated divisor
    /// exponents no longer align with coordinate hyperplanes.
    ShearedHistory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeStatus {
    /// Interior node that was blown up.
    Expanded,
    /// Terminal: order at the distinguished point is 0 or 1.
    ResolvedOrder,
    /// Terminal: monomial times a unit.
    ResolvedNormalCrossings,
    /// Terminal but not resolved (flag says why).
    Unresolved,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionNode {
    /// Strict transform in this node's local coordinates (origin is the
    /// distinguished point).
    pub poly: Polynomial,
    /// Order at the distinguished point.
    pub mult: u32,
    /// Chart used to arrive here (`None` at the root).
    pub chart: Option<Chart>,
    /// Labels of coordinate changes applied while processing this node.
    pub coord_changes: Vec<String>,
    /// Accumulated exceptional exponents per local variable (1-based).
    pub exc_exponents: BTreeMap<usize, u32>,
    /// Accumulated volume Jacobian exponents per local variable.
    pub jac_exponents: BTreeMap<usize, u32>,
    /// `gamma` vector of the prepared form, when reached.
    #[serde(serialize_with = "ser_rat_vec")]
    pub gamma: Option<Vec<Rat>>,
    /// Multiplicity of the generation this node belongs to.
    pub generation_mult: u32,
    /// Center-type blow-ups taken so far within the generation.
    pub generation_years: u32,
    pub flags: Vec<NodeFlag>,
    pub status: NodeStatus,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerationStat {
    pub mult: u32,
    pub years: u32,
    #[serde(serialize_with = "ser_rat")]
    pub gamma_total_at_start: Rat,
    /// Termination bound `|gamma| * m!` on the years of this generation.
    pub bound: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionTree {
    pub original: Polynomial,
    pub base_point: Vec<String>,
    pub nodes: Vec<ResolutionNode>,
    pub budget_exhausted: bool,
    pub generations: Vec<GenerationStat>,
}

impl ResolutionTree {
    pub fn root(&self) -> &ResolutionNode {
        &self.nodes[0]
    }

    pub fn leaves(&self) -> impl Iterator<Item = &ResolutionNode> {
        self.nodes.iter().filter(|n| n.children.is_empty())
    }

    pub fn is_fully_resolved(&self) -> bool {
        self.leaves().all(|n| {
            matches!(
                n.status,
                NodeStatus::ResolvedOrder | NodeStatus::ResolvedNormalCrossings
            )
        })
    }

    pub fn max_depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Accumulated volume Jacobian monomial of a node.
    pub fn volume_weight(&self, node: usize) -> &BTreeMap<usize, u32> {
        &self.nodes[node].jac_exponents
    }

    /// Indented text rendering of the tree.
    pub fn render_trace(&self) -> String {
        let mut out = String::new();
        self.render_node(0, 0, &mut out);
        out
    }

    fn render_node(&self, idx: usize, indent: usize, out: &mut String) {
        let n = &self.nodes[idx];
        let pad = "  ".repeat(indent);
        let chart = match &n.chart {
            None => "root".to_string(),
            Some(c) => format!(
                "chart y{} of center {{{}}}",
                c.chart_index,
                c.blown
                    .iter()
                    .map(|i| format!("x{i}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        };
        let gamma = match &n.gamma {
            None => String::new(),
            Some(g) => format!(
                " gamma=[{}]",
                g.iter()
                    .map(|q| q.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        };
        out.push_str(&format!(
            "{pad}[{idx}] {chart}: ord={} {:?}{gamma} poly={}\n",
            n.mult, n.status, n.poly
        ));
        for &c in &n.children {
            self.render_node(c, indent + 1, out);
        }
    }
}

/// Pulls an exponent map back through a chart and adds a new contribution
/// on the divisor coordinate.
fn pull_back_exponents(
    map: &BTreeMap<usize, u32>,
    chart: &Chart,
    add_on_divisor: u32,
) -> BTreeMap<usize, u32> {
    let k = chart.chart_index;
    let mut out: BTreeMap<usize, u32> = BTreeMap::new();
    let mut divisor_total = 0u32;
    for (&var, &e) in map {
        if chart.blown.contains(&var) {
            divisor_total += e;
            if var != k {
                *out.entry(var).or_insert(0) += e;
            }
        } else {
            *out.entry(var).or_insert(0) += e;
        }
    }
    *out.entry(k).or_insert(0) += divisor_total + add_on_divisor;
    out.retain(|_, &mut e| e > 0);
    out
}

/// Default node budget for resolution trees.
pub const DEFAULT_NODE_BUDGET: usize = 512;

/// Breadth-first multiplicity reduction at `a`. Every leaf either has order
/// at most 1 at its distinguished point, is locally a monomial times a
/// unit, or carries a flag explaining why expansion stopped.
pub fn resolve(p: &Polynomial, a: &RationalPoint, max_nodes: usize) -> Result<ResolutionTree> {
    if p.is_zero() {
        return Err(Error::Invalid("cannot resolve the zero polynomial".into()));
    }
    let n = p.nvars();
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.len(),
        });
    }
    let root_poly = p.translate(a)?;
    let origin = RationalPoint::origin(n);
    let root = ResolutionNode {
        mult: root_poly.order_at(&origin)?,
        poly: root_poly,
        chart: None,
        coord_changes: Vec::new(),
        exc_exponents: BTreeMap::new(),
        jac_exponents: BTreeMap::new(),
        gamma: None,
        generation_mult: 0,
        generation_years: 0,
        flags: Vec::new(),
        status: NodeStatus::Unresolved,
        parent: None,
        children: Vec::new(),
        depth: 0,
    };
    let mut tree = ResolutionTree {
        original: p.clone(),
        base_point: a.0.iter().map(|q| q.to_string()).collect(),
        nodes: vec![root],
        budget_exhausted: false,
        generations: Vec::new(),
    };
    let mut gen_tracker: BTreeMap<u32, GenerationStat> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([0usize]);

    while let Some(idx) = queue.pop_front() {
        let mult = tree.nodes[idx].mult;
        if mult <= 1 {
            tree.nodes[idx].status = NodeStatus::ResolvedOrder;
            continue;
        }
        if tree.nodes.len() + n > max_nodes {
            tree.nodes[idx].flags.push(NodeFlag::BudgetExhausted);
            tree.nodes[idx].status = NodeStatus::Unresolved;
            tree.budget_exhausted = true;
            continue;
        }

        // Prepare: rotate to regular position, then split. Nothing is
        // committed to the node until a blow-up is actually taken.
        let (change, rotated) = rotate_to_regular(&tree.nodes[idx].poly, &origin)?;
        let w = weierstrass_split(&rotated, mult)?;
        let star = case_star_check(&w);
        let already_nc = is_normal_crossings(&tree.nodes[idx].poly, &origin);

        let star = match star {
            Some(cs) => cs,
            None => {
                if already_nc {
                    tree.nodes[idx].status = NodeStatus::ResolvedNormalCrossings;
                } else {
                    tree.nodes[idx].flags.push(NodeFlag::CaseStarUnreachable);
                    tree.nodes[idx].status = NodeStatus::Unresolved;
                }
                continue;
            }
        };
        let gamma = star.gamma.clone().expect("gamma present when prepared");
        let gamma_total: Rat = gamma.iter().cloned().sum();

        // With no valid center a blow-up of the point cannot reduce a
        // monomial-times-unit form, so normal crossings is terminal here.
        if gamma_total < Rat::one() && already_nc {
            tree.nodes[idx].status = NodeStatus::ResolvedNormalCrossings;
            continue;
        }

        // Commit the preparation to the node.
        if change.kind == CoordChangeKind::Shear && !tree.nodes[idx].exc_exponents.is_empty() {
            tree.nodes[idx].flags.push(NodeFlag::ShearedHistory);
        }
        if let CoordChangeKind::Swap(i, j) = change.kind {
            let remap = |m: &BTreeMap<usize, u32>| -> BTreeMap<usize, u32> {
                m.iter()
                    .map(|(&v, &e)| {
                        let nv = if v == i {
                            j
                        } else if v == j {
                            i
                        } else {
                            v
                        };
                        (nv, e)
                    })
                    .collect()
            };
            tree.nodes[idx].exc_exponents = remap(&tree.nodes[idx].exc_exponents);
            tree.nodes[idx].jac_exponents = remap(&tree.nodes[idx].jac_exponents);
        }
        if change.kind != CoordChangeKind::Identity {
            tree.nodes[idx].coord_changes.push(change.label.clone());
        }
        if w.translation_skipped {
            tree.nodes[idx].flags.push(NodeFlag::TranslationSkipped);
        }
        if let Some(t) = &w.translation {
            tree.nodes[idx]
                .coord_changes
                .push(format!("translate x{n} -> x{n} - ({t})"));
        }
        // The node's polynomial is rewritten to the prepared form so chart
        // pullbacks below are bit-exact against it.
        tree.nodes[idx].poly = w.prepared.clone();
        tree.nodes[idx].gamma = Some(gamma.clone());

        let (blown, center_type) = if gamma_total >= Rat::one() {
            let index_set = select_center(&gamma, mult)?;
            let mut blown = index_set;
            blown.push(n);
            (blown, true)
        } else {
            tree.nodes[idx].flags.push(NodeFlag::PointBlowUp);
            ((1..=n).collect::<Vec<usize>>(), false)
        };

        // Generation bookkeeping starts when the first center of this
        // multiplicity is expanded.
        if center_type {
            let mfact: u64 = (1..=mult as u64).product();
            let entry = gen_tracker.entry(mult).or_insert_with(|| GenerationStat {
                mult,
                years: 0,
                gamma_total_at_start: gamma_total.clone(),
                bound: {
                    let b = gamma_total.clone() * Rat::from_integer(mfact.into());
                    b.ceil().to_integer().try_into().unwrap_or(u64::MAX)
                },
            });
            entry.years = entry.years.max(tree.nodes[idx].generation_years + 1);
        }

        let chart_ids: Vec<Chart> = blown
            .iter()
            .map(|&k| Chart::new(n, blown.clone(), k))
            .collect();
        tree.nodes[idx].status = NodeStatus::Expanded;
        for chart in chart_ids {
            let (_, strict) = apply_chart(&tree.nodes[idx].poly, &chart, mult)?;
            let child_mult = strict.order_at(&origin)?;
            let exc = pull_back_exponents(&tree.nodes[idx].exc_exponents, &chart, mult);
            let jac = pull_back_exponents(
                &tree.nodes[idx].jac_exponents,
                &chart,
                chart.jacobian_exponent(),
            );
            let same_generation = center_type && child_mult == mult;
            let child = ResolutionNode {
                poly: strict,
                mult: child_mult,
                chart: Some(chart),
                coord_changes: Vec::new(),
                exc_exponents: exc,
                jac_exponents: jac,
                gamma: None,
                generation_mult: if same_generation { mult } else { child_mult },
                generation_years: if same_generation {
                    tree.nodes[idx].generation_years + 1
                } else {
                    0
                },
                flags: Vec::new(),
                status: NodeStatus::Unresolved,
                parent: Some(idx),
                children: Vec::new(),
                depth: tree.nodes[idx].depth + 1,
            };
            let child_idx = tree.nodes.len();
            tree.nodes.push(child);
            tree.nodes[idx].children.push(child_idx);
            queue.push_back(child_idx);
        }
    }

    tree.generations = gen_tracker.into_values().collect();
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn p(text: &str, nvars: usize) -> Polynomial {
        parse(text, nvars).unwrap()
    }

    fn origin(n: usize) -> RationalPoint {
        RationalPoint::origin(n)
    }

    #[test]
    fn chart_formulas_and_inverse() {
        let chart = Chart::new(2, vec![1, 2], 1);
        let images = chart.images();
        assert_eq!(images[0], p("x1", 2));
        assert_eq!(images[1], p("x1*x2", 2));
        assert_eq!(chart.jacobian_exponent(), 1);
        // Inverse on the torus.
        let y = [0.7, -1.3];
        let x = chart.map_point(&y);
        let back = chart.inverse_point(&x);
        assert!((back[0] - y[0]).abs() < 1e-15);
        assert!((back[1] - y[1]).abs() < 1e-15);
    }

    #[test]
    fn apply_chart_examples() {
        let chart = Chart::new(2, vec![1, 2], 1);
        let (total, strict) = apply_chart(&p("x1^2+x2^2", 2), &chart, 2).unwrap();
        assert_eq!(strict, p("1+x2^2", 2));
        assert_eq!(total, p("x1^2 + x1^2*x2^2", 2));

        let (_, strict) = apply_chart(&p("x2^2-x1^3", 2), &chart, 2).unwrap();
        assert_eq!(strict, p("x2^2-x1", 2));

        let (_, strict) = apply_chart(&p("x1*x2", 2), &chart, 2).unwrap();
        assert_eq!(strict, p("x2", 2));

        // Overestimated center order is a divisibility failure.
        assert!(matches!(
            apply_chart(&p("x1*x2", 2), &chart, 3),
            Err(Error::CenterOrder(_))
        ));
    }

    #[test]
    fn total_equals_divisor_power_times_strict() {
        let chart = Chart::new(3, vec![2, 3], 3);
        let q = p("x1*(x2^2+x3^2)+x2^3", 3);
        let (total, strict) = apply_chart(&q, &chart, 2).unwrap();
        let divisor = p("x3", 3).pow(2);
        assert_eq!(total, &divisor * &strict);
    }

    #[test]
    fn rotate_examples() {
        // Cusp: already regular in the last variable.
        let (change, q) = rotate_to_regular(&p("x2^2-x1^3", 2), &origin(2)).unwrap();
        assert_eq!(change.kind, CoordChangeKind::Identity);
        assert_eq!(q, p("x2^2-x1^3", 2));

        // Cross: both axes lie in the zero set; a shear is needed.
        let (change, q) = rotate_to_regular(&p("x1*x2", 2), &origin(2)).unwrap();
        assert_eq!(change.kind, CoordChangeKind::Shear);
        // Regular of order 2 along the new last axis.
        let along_axis = q.eval_rat(&RationalPoint::from_i64(&[0, 1])).unwrap();
        assert!(!along_axis.is_zero());

        // Smooth in x1 only: swap.
        let (change, _) = rotate_to_regular(&p("x1^2 + x1*x2^3", 2), &origin(2)).unwrap();
        assert_eq!(change.kind, CoordChangeKind::Swap(1, 2));
    }

    #[test]
    fn weierstrass_examples() {
        let w = weierstrass_split(&p("x2^2-x1^3", 2), 2).unwrap();
        assert_eq!(w.unit, p("1", 2));
        assert!(w.coeffs[1].is_zero());
        assert_eq!(w.coeffs[0], p("-x1^3", 2));
        assert_eq!(w.reconstruct(), w.prepared);
        assert!(w.translation.is_none());

        // Completing the square.
        let w = weierstrass_split(&p("x2^2+x1*x2+x1^2", 2), 2).unwrap();
        assert_eq!(w.unit, p("1", 2));
        assert!(w.coeffs[1].is_zero());
        assert_eq!(w.coeffs[0], p("3/4*x1^2", 2));
        assert_eq!(w.translation.clone().unwrap(), p("1/2*x1", 2));
        assert_eq!(w.reconstruct(), w.prepared);

        // Pure power.
        let w = weierstrass_split(&p("x2^3", 2), 3).unwrap();
        assert_eq!(w.unit, p("1", 2));
        assert!(w.coeffs.iter().all(|c| c.is_zero()));

        // Non-constant unit blocks the killing translation.
        let w = weierstrass_split(&p("x2^2*(1+x1) + x1*x2 + x1^2", 2), 2).unwrap();
        assert!(w.translation_skipped);
        assert_eq!(w.coeffs[1], p("x1", 2));
        assert_eq!(w.reconstruct(), w.prepared);
    }

    #[test]
    fn aux_function_examples() {
        let w = weierstrass_split(&p("x2^2-x1^3", 2), 2).unwrap();
        // Single nonzero coefficient, exponent m!/(m-0) = 1.
        assert_eq!(aux_function(&w).unwrap(), p("-x1^3", 2));

        let w = weierstrass_split(&p("x2^3", 2), 3).unwrap();
        assert_eq!(aux_function(&w).unwrap(), p("1", 2));

        // Equal normalized powers: the difference factor vanishes and is
        // skipped. c_1 = x1 (exponent 2), c_0 = x1^2 (exponent 1).
        let w = weierstrass_split(&p("x2^2 + x1*x2 + x1^2", 3), 2);
        // Built by hand instead: translation would reshape the above.
        drop(w);
        let data = WeierstrassData {
            m: 2,
            prepared: p("0", 2),
            unit: p("1", 2),
            coeffs: vec![p("x1^2", 2), p("x1", 2)],
            translation: None,
            translation_skipped: true,
        };
        assert_eq!(aux_function(&data).unwrap(), p("x1^4", 2));
    }

    #[test]
    fn case_star_examples() {
        let w = weierstrass_split(&p("x2^2-x1^3", 2), 2).unwrap();
        let cs = case_star_check(&w).unwrap();
        assert_eq!(cs.gamma.unwrap(), vec![Rat::new(3.into(), 2.into())]);
        assert!(cs.unit_at_origin);

        // No monomial factor: gamma = 0 (the singular point is isolated).
        let data = WeierstrassData {
            m: 2,
            prepared: p("0", 3),
            unit: p("1", 3),
            coeffs: vec![p("x1^2+x2^2", 3), p("0", 3)],
            translation: None,
            translation_skipped: false,
        };
        let cs = case_star_check(&data).unwrap();
        assert_eq!(cs.gamma.unwrap(), vec![Rat::zero(), Rat::zero()]);

        // Incomparable contents: not prepared yet.
        let data = WeierstrassData {
            m: 2,
            prepared: p("0", 3),
            unit: p("1", 3),
            coeffs: vec![p("x2^2", 3), p("x1", 3)],
            translation: None,
            translation_skipped: false,
        };
        assert!(case_star_check(&data).is_none());
    }

    #[test]
    fn select_center_examples() {
        let g32 = vec![Rat::new(3.into(), 2.into())];
        assert_eq!(select_center(&g32, 2).unwrap(), vec![1]);

        let half = Rat::new(1.into(), 2.into());
        let g = vec![half.clone(), half.clone(), half];
        assert_eq!(select_center(&g, 2).unwrap(), vec![1, 2]);

        let g = vec![Rat::from_integer(2.into()), Rat::new(1.into(), 4.into())];
        assert_eq!(select_center(&g, 2).unwrap(), vec![1]);

        // Sum below 1: no valid center.
        let g = vec![Rat::new(1.into(), 3.into())];
        assert!(matches!(select_center(&g, 2), Err(Error::NoCenter { .. })));
    }

    #[test]
    fn normal_crossings_examples() {
        assert!(is_normal_crossings(&p("x1^2*x2*(1+x1)", 2), &origin(2)));
        assert!(!is_normal_crossings(&p("x2^2-x1^3", 2), &origin(2)));
        assert!(is_normal_crossings(
            &p("x1^2+x2^2", 2),
            &RationalPoint::from_i64(&[1, 0])
        ));
    }

    #[test]
    fn vector_field_transform_rules() {
        // Point blow-up in 2 vars, chart 1.
        let chart = Chart::new(2, vec![1, 2], 1);
        // D_{x_2} maps to D_{y_2}.
        let d2 = vector_field_transform(&VectorField::LogDerivative(2), &chart);
        assert_eq!(d2.coeffs, vec![Rat::zero(), Rat::one()]);
        // Euler maps to the divisor log-derivative.
        let e = vector_field_transform(&VectorField::Euler, &chart);
        assert_eq!(e.coeffs, vec![Rat::one(), Rat::zero()]);

        // Exact intertwining: F_y(sigma* f) == sigma*(F_x f).
        let f = p("x1^3 - 2*x1*x2^2 + x2^4", 2);
        let images = chart.images();
        for field in [
            VectorField::LogDerivative(1),
            VectorField::LogDerivative(2),
            VectorField::Euler,
        ] {
            let downstairs = FieldCombo {
                coeffs: field_coeffs(&field, 2),
            }
            .apply(&f)
            .substitute(&images)
            .unwrap();
            let upstairs = vector_field_transform(&field, &chart).apply(&f.substitute(&images).unwrap());
            assert_eq!(downstairs, upstairs, "field {field:?}");
        }
    }

    #[test]
    fn euler_field_is_radial() {
        // E f = r d/dr f(r u) along rays, checked numerically.
        let f = p("x1^3 - 2*x1*x2^2 + x2^4", 2);
        let e = FieldCombo {
            coeffs: vec![Rat::one(), Rat::one()],
        }
        .apply(&f);
        for x in [[0.6_f64, -0.8], [1.1, 0.4]] {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let u = [x[0] / r, x[1] / r];
            let h = 1e-6;
            let along = |t: f64| f.eval(&[t * u[0], t * u[1]]).unwrap();
            let radial: f64 = r * (along(r + h) - along(r - h)) / (2.0 * h);
            let direct: f64 = e.eval(&x).unwrap();
            assert!((radial - direct).abs() < 1e-6 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn euler_identity_under_point_blowup() {
        // E_1 = 2 E_0 - D_{x_k} on pullbacks, exactly and numerically.
        let chart = Chart::new(2, vec![1, 2], 2);
        let f = p("x1^2*x2 - x2^3 + x1^4", 2);
        let pulled = f.substitute(&chart.images()).unwrap();
        let e1 = FieldCombo {
            coeffs: vec![Rat::one(), Rat::one()],
        }
        .apply(&pulled);
        let two_e0_minus_dk = {
            let e0 = FieldCombo {
                coeffs: vec![Rat::one(), Rat::one()],
            }
            .apply(&f)
            .scale(&Rat::from_integer(2.into()));
            let dk = FieldCombo {
                coeffs: vec![Rat::zero(), Rat::one()],
            }
            .apply(&f);
            (&e0 - &dk).substitute(&chart.images()).unwrap()
        };
        assert_eq!(e1, two_e0_minus_dk);
        // Numeric spot check.
        for y in [[0.3_f64, -0.7], [1.1, 0.4]] {
            let a: f64 = e1.eval(&y).unwrap();
            let b: f64 = two_e0_minus_dk.eval(&y).unwrap();
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn resolve_cusp() {
        let tree = resolve(&p("x2^2-x1^3", 2), &origin(2), 512).unwrap();
        assert!(tree.is_fully_resolved());
        assert_eq!(tree.max_depth(), 1);
        assert_eq!(tree.root().children.len(), 2);
        for leaf in tree.leaves() {
            assert!(leaf.mult <= 1);
        }
        // gamma = 3/2, bound |gamma| * 2! = 3.
        let g = tree.generations.iter().find(|g| g.mult == 2).unwrap();
        assert_eq!(g.years, 1);
        assert_eq!(g.bound, 3);
        assert!(u64::from(g.years) <= g.bound);
        // The recorded strict transform in the first chart drops order.
        let child = &tree.nodes[tree.root().children[0]];
        assert_eq!(child.poly, p("x2^2 - x1", 2));
    }

    #[test]
    fn resolve_cross_to_normal_crossings() {
        let tree = resolve(&p("x1*x2", 2), &origin(2), 512).unwrap();
        assert!(tree.is_fully_resolved());
        assert_eq!(tree.max_depth(), 1);
        for leaf in tree.leaves() {
            assert!(matches!(
                leaf.status,
                NodeStatus::ResolvedOrder | NodeStatus::ResolvedNormalCrossings
            ));
        }
    }

    #[test]
    fn resolve_smooth_point_is_single_leaf() {
        let tree = resolve(&p("x1+x2^2", 2), &origin(2), 512).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert_eq!(tree.root().status, NodeStatus::ResolvedOrder);
    }

    #[test]
    fn resolve_respects_node_budget() {
        let tree = resolve(&p("x2^2-x1^3", 2), &origin(2), 1).unwrap();
        assert!(tree.budget_exhausted);
        assert!(!tree.is_fully_resolved());
        assert!(tree.root().flags.contains(&NodeFlag::BudgetExhausted));
    }

    #[test]
    fn gamma_descent_is_exact() {
        // x2^2 - x1^5: gamma = (5/2) -> (3/2) -> done, two years.
        let tree = resolve(&p("x2^2-x1^5", 2), &origin(2), 512).unwrap();
        assert!(tree.is_fully_resolved());
        let root_gamma = tree.root().gamma.clone().unwrap();
        assert_eq!(root_gamma, vec![Rat::new(5.into(), 2.into())]);
        // Find the chart-1 child that stayed at multiplicity 2.
        let child_idx = *tree
            .root()
            .children
            .iter()
            .find(|&&c| tree.nodes[c].mult == 2)
            .expect("one child continues the generation");
        let child_gamma = tree.nodes[child_idx].gamma.clone().unwrap();
        // Descent rule: gamma'_j = sum_I gamma_i - 1 for the blown chart.
        assert_eq!(child_gamma, vec![Rat::new(3.into(), 2.into())]);
        let g = tree.generations.iter().find(|g| g.mult == 2).unwrap();
        assert_eq!(g.years, 2);
        assert_eq!(g.bound, 5);
    }

    #[test]
    fn point_blowup_when_gamma_below_one() {
        // Isolated singular point of the sphere cone in 3 variables:
        // gamma = 0, so the point itself is blown up.
        let tree = resolve(&p("x1^2+x2^2+x3^2", 3), &origin(3), 512).unwrap();
        assert!(tree.is_fully_resolved());
        assert!(tree.root().flags.contains(&NodeFlag::PointBlowUp));
        assert_eq!(tree.root().children.len(), 3);
        for leaf in tree.leaves() {
            assert_eq!(leaf.mult, 0);
        }
    }

    #[test]
    fn monomial_times_unit_is_terminal() {
        // No valid center (every coefficient of the split vanishes) and
        // already normal crossings: zero blow-ups.
        let tree = resolve(&p("x2^2*(1+x2)^2", 2), &origin(2), 512).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert_eq!(tree.root().status, NodeStatus::ResolvedNormalCrossings);

        // Normal crossings with a usable center still reduces the order.
        let tree = resolve(&p("x1^2*x2^2*(1+x1)", 2), &origin(2), 512).unwrap();
        assert!(tree.is_fully_resolved());
        assert!(tree.max_depth() >= 1);
    }

    #[test]
    fn resolve_cubic_fixture() {
        let cubic = p("x1*(x2^2+x3^2)+x2^3", 3);
        // At the origin (order 3): resolves after the point blow-up.
        let tree = resolve(&cubic, &origin(3), 512).unwrap();
        assert!(tree.is_fully_resolved(), "{}", tree.render_trace());

        // On the singular axis (order 2): codimension-2 center along the axis.
        let tree = resolve(&cubic, &RationalPoint::from_i64(&[1, 0, 0]), 512).unwrap();
        assert!(tree.is_fully_resolved(), "{}", tree.render_trace());
        assert_eq!(tree.root().mult, 2);
        let chart = tree.nodes[tree.root().children[0]].chart.clone().unwrap();
        assert_eq!(chart.codim(), 2);
        assert_eq!(chart.blown, vec![2, 3]);
    }

    #[test]
    fn volume_weights_accumulate() {
        // Root has empty weight.
        let tree = resolve(&p("x2^2-x1^5", 2), &origin(2), 512).unwrap();
        assert!(tree.volume_weight(0).is_empty());
        // Codimension-2 blow-up: exponent 1 on the chart variable.
        let child = tree.root().children[0];
        let w = tree.volume_weight(child);
        let k = tree.nodes[child].chart.as_ref().unwrap().chart_index;
        assert_eq!(w.get(&k), Some(&1));
        // Nested blow-up composes the Jacobians.
        let grandchild = tree.nodes[child]
            .children
            .first()
            .copied()
            .expect("generation continues");
        let w2 = tree.volume_weight(grandchild);
        assert_eq!(w2.values().sum::<u32>() >= 2, true, "{w2:?}");
    }

    #[test]
    fn order_never_increases_along_edges() {
        for (text, n, a) in [
            ("x2^2-x1^3", 2, vec![0i64, 0]),
            ("x1*x2", 2, vec![0, 0]),
            ("x2^2-x1^5", 2, vec![0, 0]),
            ("x1*(x2^2+x3^2)+x2^3", 3, vec![0, 0, 0]),
        ] {
            let tree = resolve(&p(text, n), &RationalPoint::from_i64(&a), 512).unwrap();
            for node in &tree.nodes {
                for &c in &node.children {
                    assert!(
                        tree.nodes[c].mult <= node.mult,
                        "{text}: order increased on an edge"
                    );
                }
            }
        }
    }
}
