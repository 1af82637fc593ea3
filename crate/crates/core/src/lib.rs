//! Weighted Fourier-side norms of spline and Daubechies wavelets, and the
//! Bernstein-type constants built from them.

// `!(x > 0.0)` guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod constants;
pub mod daubechies;
pub mod norms;
pub mod numerics;
pub mod splines;
pub mod tensor;
