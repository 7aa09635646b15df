//! The fixed-point system, the differential along a fixed cycle and the
//! multiplier polynomial.

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::{HenonComposition, ModelError};
use crate::poly::{Coeff, Exponent, Polynomial};

/// Cyclic fixed-point equations
/// `φ_i = p_i(y_i) - y_{i+1} - δ_i y_{i-1}` (indices mod n).
///
/// For `n = 1, 2` the neighbouring indices coincide and the linear terms are
/// summed on the shared variable. `LM(φ_i) = y_i^{d_i}` in every case.
pub fn fixed_point_system<C: Coeff>(comp: &HenonComposition<C>) -> Vec<Polynomial<C>> {
    let n = comp.len();
    comp.factors()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut phi = f.p_poly(n, i);
            phi.add_term(Exponent::var_power(n, (i + 1) % n, 1), C::one().negated());
            phi.add_term(Exponent::var_power(n, (i + n - 1) % n, 1), f.delta().negated());
            phi
        })
        .collect()
}

/// 2×2 matrix with polynomial entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix2Poly<C: Coeff> {
    pub m11: Polynomial<C>,
    pub m12: Polynomial<C>,
    pub m21: Polynomial<C>,
    pub m22: Polynomial<C>,
}

impl<C: Coeff> Matrix2Poly<C> {
    pub fn identity(nvars: usize) -> Self {
        Matrix2Poly {
            m11: Polynomial::one(nvars),
            m12: Polynomial::zero(nvars),
            m21: Polynomial::zero(nvars),
            m22: Polynomial::one(nvars),
        }
    }

    pub fn trace(&self) -> Polynomial<C> {
        self.m11.try_add(&self.m22).expect("entries share a ring")
    }

    pub fn det(&self) -> Polynomial<C> {
        let a = self.m11.try_mul(&self.m22).expect("entries share a ring");
        let b = self.m12.try_mul(&self.m21).expect("entries share a ring");
        a.try_sub(&b).expect("entries share a ring")
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Matrix2<Complex64> {
        Matrix2::new(
            self.m11.evaluate(point),
            self.m12.evaluate(point),
            self.m21.evaluate(point),
            self.m22.evaluate(point),
        )
    }

    /// `((0, 1), (-δ, slope)) · self`.
    pub(crate) fn left_mul_factor(&self, delta: &C, slope: &Polynomial<C>) -> Self {
        let neg_delta = delta.negated();
        let row2 = |top: &Polynomial<C>, bottom: &Polynomial<C>| {
            top.scale(&neg_delta)
                .try_add(&slope.try_mul(bottom).expect("entries share a ring"))
                .expect("entries share a ring")
        };
        Matrix2Poly {
            m11: self.m21.clone(),
            m12: self.m22.clone(),
            m21: row2(&self.m11, &self.m21),
            m22: row2(&self.m12, &self.m22),
        }
    }
}

/// Product `((0,1),(-δ_n, s_n)) ⋯ ((0,1),(-δ_1, s_1))` for the given slopes.
pub(crate) fn chain_product<C: Coeff>(nvars: usize, factors: impl IntoIterator<Item = (C, Polynomial<C>)>) -> Matrix2Poly<C> {
    factors
        .into_iter()
        .fold(Matrix2Poly::identity(nvars), |m, (delta, slope)| m.left_mul_factor(&delta, &slope))
}

/// Symbolic differential `M_n(y_1, …, y_n)` of the composition along a
/// cycle, entries in `C[y_1, …, y_n]`.
pub fn differential_symbolic<C: Coeff>(comp: &HenonComposition<C>) -> Matrix2Poly<C> {
    let n = comp.len();
    chain_product(
        n,
        comp.factors()
            .iter()
            .enumerate()
            .map(|(j, f)| (f.delta().clone(), f.p_prime_poly(n, j))),
    )
}

/// Numeric differential at the cycle `(y_1, …, y_n)`; the rightmost factor
/// is evaluated at `y_1`.
pub fn differential_numeric<C: Coeff>(comp: &HenonComposition<C>, cycle: &[Complex64]) -> Matrix2<Complex64> {
    assert_eq!(cycle.len(), comp.len(), "cycle length must equal the number of factors");
    comp.factors().iter().zip(cycle).fold(Matrix2::identity(), |m, (f, &y)| {
        let jac = Matrix2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            -f.delta().to_complex(),
            f.eval_p_prime(y),
        );
        jac * m
    })
}

/// `Φ = λ² - λ·tr(M_n) + δ`, whose zeros on the fixed-point variety are the
/// fixed points having `λ` as a multiplier.
pub fn multiplier_polynomial<C: Coeff>(comp: &HenonComposition<C>, lambda: &C) -> Polynomial<C> {
    let n = comp.len();
    let tr = differential_symbolic(comp).trace();
    let constant = lambda.times(lambda).plus(&comp.jacobian());
    Polynomial::constant(n, constant)
        .try_sub(&tr.scale(lambda))
        .expect("same ring")
}

/// Leading term of `Φ` for `λ ≠ 0`: `y_1^{d_1-1}⋯y_n^{d_n-1}` with
/// coefficient `-λ·d_1⋯d_n`.
pub fn expected_multiplier_leading<C: Coeff>(comp: &HenonComposition<C>, lambda: &C) -> (Exponent, C) {
    let exps = comp.degrees().iter().map(|&d| d as u32 - 1).collect();
    let d = C::from_i64(comp.degree() as i64);
    (Exponent::new(exps), lambda.times(&d).negated())
}

/// `η_j(y_j) = y_j q_j'(y_j) - α p_j'(y_j) - d_j q_j(y_j)` for the factor
/// with zero-based index `j`, as a polynomial in the composition's ring.
pub fn eta_polynomial<C: Coeff>(comp: &HenonComposition<C>, j: usize, alpha: &C) -> Result<Polynomial<C>, ModelError> {
    let n = comp.len();
    let f = comp
        .factors()
        .get(j)
        .ok_or(ModelError::IndexOutOfRange { index: j, n })?;
    let q = f.q_poly(n, j);
    let y_dq = q.derivative(j).try_mul(&Polynomial::var(n, j))?;
    let eta = y_dq
        .try_sub(&f.p_prime_poly(n, j).scale(alpha))?
        .try_sub(&q.scale(&C::from_i64(f.degree() as i64)))?;
    Ok(eta)
}
