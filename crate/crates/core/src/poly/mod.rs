//! Sparse multivariate polynomial arithmetic.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use thiserror::Error;

mod coeff;
mod division;
mod monomial;
mod polynomial;

pub use coeff::{parse_rational, Coeff, GaussRat, ParseRationalError, FLOAT_ZERO_THRESHOLD};
pub use division::{
    buchberger_verify, buchberger_verify_with_cancel, divide_multivariate, divide_multivariate_with_cancel, s_polynomial,
    DivisionResult, GroebnerReport,
};
pub use monomial::{compare_monomials, Exponent, MonomialOrder};
pub use polynomial::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("ring mismatch: {left} variables vs {right}")]
    RingMismatch { left: usize, right: usize },
    #[error("leading term of the zero polynomial is undefined")]
    ZeroPolynomial,
    #[error("divisor {index} is the zero polynomial")]
    ZeroDivisor { index: usize },
    #[error("empty basis")]
    EmptyBasis,
    #[error("computation cancelled")]
    Cancelled,
}

/// Cooperative cancellation flag shared between a caller and a long-running
/// exact computation.
#[derive(Clone, Debug, Default)]
pub struct CancelToken(Option<Arc<AtomicBool>>);

impl CancelToken {
    pub fn new() -> Self {
        CancelToken(Some(Arc::new(AtomicBool::new(false))))
    }

    /// A token that can never fire.
    pub fn never() -> Self {
        CancelToken(None)
    }

    pub fn cancel(&self) {
        if let Some(flag) = &self.0 {
            flag.store(true, Ordering::Relaxed);
        }
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.as_ref().is_some_and(|f| f.load(Ordering::Relaxed))
    }
}
