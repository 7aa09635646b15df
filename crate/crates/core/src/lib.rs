//! Algebra and numerics for fixed points of compositions of generalized
//! Hénon maps `f_j(x, y) = (y, p_j(y) - δ_j x)` of C².
//!
//! The crate is organised bottom-up:
//!
//! - [`poly`]: sparse multivariate polynomials over exact Gaussian rationals or
//!   floating complex numbers, graded-lex ordering, multivariate division,
//!   S-polynomials and Gröbner-basis verification.
//! - [`model`]: Hénon factors and compositions, the cyclic fixed-point system
//!   `φ_1, …, φ_n`, the differential along a fixed cycle, the multiplier
//!   polynomial `Φ` and the span-structure checks on the differential.
//! - [`ideal`]: exact ideal-membership certificates for `Φ` and `(y_1 - α)Φ`
//!   and the division identity used to peel one factor off `(p')^J + h`.
//! - [`solver`]: enumeration of all `d` fixed points via multiplication
//!   matrices on the quotient ring, multipliers, classification and the
//!   multiplier-grouping check.
//! - [`dynamics`]: escape radius, forward/backward Green functions and raster
//!   slices of `G⁺`.
//! - [`input`]: the JSON composition format.
//! - [`sampling`]: random exact compositions.

mod complex_serde;
pub mod dynamics;
pub mod ideal;
pub mod input;
pub mod model;
pub mod poly;
pub mod sampling;
pub mod solver;

pub use model::{HenonComposition, HenonFactor};
pub use poly::{Coeff, DivisionResult, Exponent, GaussRat, MonomialOrder, PolyError, Polynomial};

/// Polynomial with exact Gaussian-rational coefficients.
pub type ExactPoly = Polynomial<GaussRat>;
/// Polynomial with floating complex coefficients.
pub type FloatPoly = Polynomial<num_complex::Complex64>;
