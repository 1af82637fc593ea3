//! Numerical kernel shared by every other module: adaptive quadrature,
//! bracketed root finding, polynomial roots, series summation and
//! periodized lattice sums.

mod lattice;
mod poly;
mod quadrature;
mod roots;
mod series;

pub use lattice::{hurwitz_tail, PeriodizedSinc};
pub use poly::{poly_complex_roots, poly_real_roots, ComplexRoots, PolynomialReal};
pub use quadrature::{
    adaptive_integrate, integrate, integrate_breakpoints, Interval, QuadratureOptions,
    QuadratureResult,
};
pub use roots::find_root_bracketed;
pub use series::{sum_alternating_series, SeriesSum};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("quadrature did not converge within {panels} panels (value {value}, error estimate {error_estimate})")]
    QuadratureNoConvergence {
        value: f64,
        error_estimate: f64,
        panels: usize,
    },
    #[error("integrand is not finite at x = {0}")]
    NonFiniteIntegrand(f64),
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("root finder exceeded {0} iterations")]
    MaxIterations(usize),
    #[error("polynomial has degree {0}, need at least 1")]
    DegreeTooLow(usize),
    #[error("ill-conditioned leading coefficient: {0}")]
    IllConditioned(String),
    #[error("polynomial root iteration did not converge (max residual {0:e})")]
    RootsNoConvergence(f64),
    #[error("series terms do not alternate or share a sign")]
    MixedSigns,
    #[error("divergent series: {0}")]
    Divergent(String),
    #[error("series did not reach tolerance {tol:e} (best {value}, bound {bound:e})")]
    SeriesNoConvergence { value: f64, bound: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, NumericsError>;
