//! Toolkit for studying real polynomial varieties near their singularities:
//! exact blow-up resolution trees, multiplicity stratification, weighted
//! Hardy-type inequality quotients, Lojasiewicz exponent fits, and growth of
//! integrals over semialgebraic sublevel sets.
//!
//! The exact side (polynomial algebra, blow-up bookkeeping) runs on
//! arbitrary-precision rationals; the numerical side (quadrature, fits,
//! witness search) is generic over the floating scalar via [`Real`], with
//! `f64` aliases exported at the crate root.

pub mod blowup;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod growth;
pub mod hardy;
pub mod jet;
pub mod loja;
pub mod poly;
pub mod profile;
pub mod quad;
pub(crate) mod sampling;
pub mod scalar;
pub mod strata;

pub use error::{Error, Result};
pub use poly::{Polynomial, RationalPoint};
pub use scalar::{Rat, Real};

/// Default floating scalar for the CLI and reports.
pub type F = f64;

/// `f64` quadrature grid.
pub type Grid = quad::QuadratureGrid<F>;
/// `f64` tube specification.
pub type Tube = strata::TubeSpec<F>;
/// `f64` admissible test function.
pub type Bump = hardy::TestFunction<F>;

