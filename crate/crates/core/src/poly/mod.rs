//! Exact sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors under graded-lex
//! order, so iteration, formatting and serialization are deterministic.
//! Coefficients are arbitrary-precision rationals; floats only appear at the
//! evaluation boundary (see [`float`]).

mod float;
mod parse;
mod serde_impl;

pub use float::FloatPoly;
pub use parse::parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{r, rat_to_real, Rat, Real};

/// Exponent vector of one term; ordered by total degree, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponents(pub Vec<u32>);

impl Exponents {
    pub fn zeros(nvars: usize) -> Self {
        Exponents(vec![0; nvars])
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Exponents) -> Exponents {
        Exponents(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Invariants: no stored coefficient is zero (the zero polynomial has an
/// empty term map) and every exponent vector has length `nvars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, Rat>,
}

/// A point with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoint(pub Vec<Rat>);

impl RationalPoint {
    pub fn origin(nvars: usize) -> Self {
        RationalPoint(vec![Rat::zero(); nvars])
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        RationalPoint(coords.iter().map(|&c| Rat::from_integer(c.into())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn to_floats<R: Real>(&self) -> Vec<R> {
        self.0.iter().map(rat_to_real).collect()
    }
}

impl Polynomial {
    /// The zero polynomial in `nvars` variables.
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    /// The constant polynomial `c`.
    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Exponents::zeros(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    /// The variable `x_{index}` (1-based, matching the text grammar).
    pub fn var(nvars: usize, index: usize) -> Result<Self> {
        if index == 0 || index > nvars {
            return Err(Error::VarOutOfRange { index, nvars });
        }
        let mut exp = vec![0; nvars];
        exp[index - 1] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Exponents(exp), Rat::one());
        Ok(Polynomial { nvars, terms })
    }

    /// A single monomial term `c * x^exp`.
    pub fn monomial(nvars: usize, exp: Vec<u32>, c: Rat) -> Self {
        assert_eq!(exp.len(), nvars, "exponent vector length");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Exponents(exp), c);
        }
        p
    }

    /// Builds from a list of `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms(nvars: usize, terms: Vec<(Vec<u32>, Rat)>) -> Self {
        let mut p = Self::zero(nvars);
        for (exp, c) in terms {
            p.add_term(Exponents(exp), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_constant())
    }

    /// Constant term (coefficient of `x^0`).
    pub fn constant_term(&self) -> Rat {
        self.terms
            .get(&Exponents::zeros(self.nvars))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &Rat)> {
        self.terms.iter()
    }

    fn add_term(&mut self, exp: Exponents, c: Rat) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(exp.0.len(), self.nvars);
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Total degree, or an error for the zero polynomial.
    pub fn degree(&self) -> Result<u32> {
        self.terms
            .keys()
            .map(|e| e.total_degree())
            .max()
            .ok_or(Error::ZeroDegree)
    }

    /// Lowest total degree among the terms (the order at the origin).
    pub fn low_degree(&self) -> Result<u32> {
        self.terms
            .keys()
            .map(|e| e.total_degree())
            .min()
            .ok_or(Error::ZeroDegree)
    }

    /// True iff all terms share one total degree. The zero polynomial counts
    /// as homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.total_degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rat(&self, x: &RationalPoint) -> Result<Rat> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        let mut acc = Rat::zero();
        for (exp, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &e) in x.0.iter().zip(&exp.0) {
                for _ in 0..e {
                    term *= xi;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Floating evaluation (plain term sum, no exclusion of cancellation).
    pub fn eval<R: Real>(&self, x: &[R]) -> Result<R> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        let mut acc = r::<R>(0.0);
        for (exp, c) in &self.terms {
            let mut term = rat_to_real::<R>(c);
            for (xi, &e) in x.iter().zip(&exp.0) {
                term = term * xi.powi(e as i32);
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v.clone() * c))
                .collect(),
        }
    }

    /// `self^k` by repeated multiplication.
    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to `x_i` (1-based).
    pub fn partial(&self, i: usize) -> Result<Polynomial> {
        if i == 0 || i > self.nvars {
            return Err(Error::VarOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let vi = i - 1;
        let mut out = Polynomial::zero(self.nvars);
        for (exp, c) in &self.terms {
            let e = exp.0[vi];
            if e == 0 {
                continue;
            }
            let mut new_exp = exp.0.clone();
            new_exp[vi] = e - 1;
            out.add_term(Exponents(new_exp), c.clone() * Rat::from_integer(e.into()));
        }
        Ok(out)
    }

    /// All first partials.
    pub fn grad(&self) -> Vec<Polynomial> {
        (1..=self.nvars)
            .map(|i| self.partial(i).expect("index in range"))
            .collect()
    }

    /// Trace of the second partials.
    pub fn laplacian(&self) -> Polynomial {
        let mut acc = Polynomial::zero(self.nvars);
        for i in 1..=self.nvars {
            let second = self
                .partial(i)
                .and_then(|p| p.partial(i))
                .expect("index in range");
            acc = &acc + &second;
        }
        acc
    }

    /// `sum_i x_i * d/dx_i`; equals `deg * self` exactly for homogeneous input.
    pub fn euler_apply(&self) -> Polynomial {
        let mut acc = Polynomial::zero(self.nvars);
        for (exp, c) in &self.terms {
            let d = exp.total_degree();
            if d == 0 {
                continue;
            }
            acc.add_term(exp.clone(), c.clone() * Rat::from_integer(d.into()));
        }
        acc
    }

    /// Iterated partial along a multi-index `j` (0-based component powers).
    pub fn partial_multi(&self, j: &[u32]) -> Polynomial {
        let mut p = self.clone();
        for (var, &reps) in j.iter().enumerate() {
            for _ in 0..reps {
                p = p.partial(var + 1).expect("index in range");
            }
        }
        p
    }

    /// Substitutes `x_i -> images[i]`; all images must share one variable count.
    ///
    /// This is a ring homomorphism and is exact.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.nvars {
            return Err(Error::ArityMismatch {
                nvars: self.nvars,
                images: images.len(),
            });
        }
        let target_nvars = images.first().map(|p| p.nvars).unwrap_or(0);
        if images.iter().any(|p| p.nvars != target_nvars) {
            return Err(Error::Invalid(
                "substitution images have mixed variable counts".into(),
            ));
        }
        // Cache image powers up to the maximal exponent per variable.
        let mut max_exp = vec![0u32; self.nvars];
        for exp in self.terms.keys() {
            for (m, &e) in max_exp.iter_mut().zip(&exp.0) {
                *m = (*m).max(e);
            }
        }
        let powers: Vec<Vec<Polynomial>> = images
            .iter()
            .enumerate()
            .map(|(i, img)| {
                let mut pows = vec![Polynomial::one(target_nvars)];
                for k in 1..=max_exp[i] {
                    pows.push(&pows[(k - 1) as usize] * img);
                }
                pows
            })
            .collect();

        let mut acc = Polynomial::zero(target_nvars);
        for (exp, c) in &self.terms {
            let mut term = Polynomial::constant(target_nvars, c.clone());
            for (i, &e) in exp.0.iter().enumerate() {
                if e > 0 {
                    term = &term * &powers[i][e as usize];
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Translates the point `a` to the origin: `x_i -> x_i + a_i`.
    pub fn translate(&self, a: &RationalPoint) -> Result<Polynomial> {
        if a.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: a.len(),
            });
        }
        if a.is_origin() {
            return Ok(self.clone());
        }
        let images: Vec<Polynomial> = (1..=self.nvars)
            .map(|i| {
                let xi = Polynomial::var(self.nvars, i).expect("index in range");
                &xi + &Polynomial::constant(self.nvars, a.0[i - 1].clone())
            })
            .collect();
        self.substitute(&images)
    }

    /// Order (multiplicity) of vanishing at `a`: the lowest total degree
    /// after translating `a` to the origin. Points off the variety have
    /// order 0.
    pub fn order_at(&self, a: &RationalPoint) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::ZeroDegree);
        }
        self.translate(a)?.low_degree()
    }

    /// Lowest-degree homogeneous component after translating `a` to the
    /// origin. Its degree equals `order_at(a)`.
    pub fn initial_form(&self, a: &RationalPoint) -> Result<Polynomial> {
        if self.is_zero() {
            return Err(Error::ZeroDegree);
        }
        let t = self.translate(a)?;
        let m = t.low_degree()?;
        let mut out = Polynomial::zero(self.nvars);
        for (exp, c) in &t.terms {
            if exp.total_degree() == m {
                out.terms.insert(exp.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Sum of squared `k`-th partials over all multi-indices with |j| = k,
    /// each multi-index counted once. `k = 0` gives `P^2`.
    pub fn sum_sq_partials(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::zero(self.nvars);
        for j in multi_indices(self.nvars, k) {
            let pj = self.partial_multi(&j);
            if !pj.is_zero() {
                acc = &acc + &(&pj * &pj);
            }
        }
        acc
    }

    /// Divides by `x_i^m` (1-based `i`), failing on the first non-divisible term.
    pub fn factor_out_variable_power(&self, i: usize, m: u32) -> Result<Polynomial> {
        if i == 0 || i > self.nvars {
            return Err(Error::VarOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let vi = i - 1;
        let mut out = Polynomial::zero(self.nvars);
        for (exp, c) in &self.terms {
            if exp.0[vi] < m {
                return Err(Error::NotDivisible {
                    var: i,
                    power: m,
                    term: format_term(exp, c),
                });
            }
            let mut new_exp = exp.0.clone();
            new_exp[vi] -= m;
            out.terms.insert(Exponents(new_exp), c.clone());
        }
        Ok(out)
    }

    /// Componentwise-minimal exponent vector over all terms (the monomial
    /// content). Zero polynomial yields all-zero content.
    pub fn monomial_content(&self) -> Vec<u32> {
        let mut content: Option<Vec<u32>> = None;
        for exp in self.terms.keys() {
            match &mut content {
                None => content = Some(exp.0.clone()),
                Some(c) => {
                    for (ci, &e) in c.iter_mut().zip(&exp.0) {
                        *ci = (*ci).min(e);
                    }
                }
            }
        }
        content.unwrap_or_else(|| vec![0; self.nvars])
    }

    /// Divides out the monomial content, returning `(content, cofactor)`.
    pub fn strip_monomial_content(&self) -> (Vec<u32>, Polynomial) {
        let content = self.monomial_content();
        let mut out = Polynomial::zero(self.nvars);
        for (exp, c) in &self.terms {
            let new_exp: Vec<u32> = exp.0.iter().zip(&content).map(|(e, m)| e - m).collect();
            out.terms.insert(Exponents(new_exp), c.clone());
        }
        (content, out)
    }

    /// Collects coefficients of powers of `x_i` (1-based): entry `k` is the
    /// polynomial coefficient of `x_i^k`, with `x_i` removed.
    pub fn coefficients_of(&self, i: usize) -> Vec<Polynomial> {
        assert!(i >= 1 && i <= self.nvars);
        let vi = i - 1;
        let max = self
            .terms
            .keys()
            .map(|e| e.0[vi])
            .max()
            .unwrap_or(0);
        let mut out = vec![Polynomial::zero(self.nvars); (max + 1) as usize];
        for (exp, c) in &self.terms {
            let k = exp.0[vi] as usize;
            let mut new_exp = exp.0.clone();
            new_exp[vi] = 0;
            out[k].add_term(Exponents(new_exp), c.clone());
        }
        out
    }

    /// Largest absolute coefficient as f64, used for tolerance scaling.
    pub fn coeff_scale(&self) -> f64 {
        self.terms
            .values()
            .map(|c| num_traits::ToPrimitive::to_f64(&c.abs()).unwrap_or(0.0))
            .fold(0.0_f64, f64::max)
            .max(1.0)
    }

    /// Canonical text form in descending graded-lex order.
    pub fn to_text(&self) -> String {
        format!("{self}")
    }

    /// Compiles to a float evaluator.
    pub fn compile<R: Real>(&self) -> FloatPoly<R> {
        FloatPoly::new(self)
    }
}

/// All multi-indices in `n` variables with total order `k`.
pub fn multi_indices(n: usize, k: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            let mut v = prefix.clone();
            v.push(k);
            out.push(v);
            return;
        }
        for first in 0..=k {
            prefix.push(first);
            rec(n - 1, k - first, prefix, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (exp, c) in &rhs.terms {
            out.add_term(exp.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (exp, c) in &rhs.terms {
            out.add_term(exp.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.mul(eb), ca.clone() * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }
}

fn format_coeff(c: &Rat) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn format_monomial(exp: &Exponents) -> String {
    let mut parts = Vec::new();
    for (i, &e) in exp.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("x{}", i + 1)),
            _ => parts.push(format!("x{}^{}", i + 1, e)),
        }
    }
    parts.join("*")
}

fn format_term(exp: &Exponents, c: &Rat) -> String {
    let mono = format_monomial(exp);
    if mono.is_empty() {
        format_coeff(c)
    } else if c.is_one() {
        mono
    } else if (-c.clone()).is_one() {
        format!("-{mono}")
    } else {
        format!("{}*{}", format_coeff(c), mono)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Descending graded-lex: leading term first.
        for (i, (exp, c)) in self.terms.iter().rev().enumerate() {
            let t = format_term(exp, c);
            if i == 0 {
                write!(f, "{t}")?;
            } else if let Some(stripped) = t.strip_prefix('-') {
                write!(f, " - {stripped}")?;
            } else {
                write!(f, " + {t}")?;
            }
        }
        Ok(())
    }
}
