//! Generalized Hénon factors `f_j(x, y) = (y, p_j(y) - δ_j x)` and their
//! compositions `f = f_n ∘ ⋯ ∘ f_1`.

use num_complex::Complex64;
use thiserror::Error;

use crate::poly::{Coeff, GaussRat, PolyError, Polynomial};

mod span;
mod system;

pub use span::{span_profile_check, EntryProfile, SpanProfile, SpanReport};
pub use system::{
    differential_numeric, differential_symbolic, eta_polynomial, expected_multiplier_leading, fixed_point_system,
    multiplier_polynomial, Matrix2Poly,
};

/// A point `(x, y)` of C².
pub type Point = [Complex64; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("factor {}: degree must be at least 2, got {degree}", index + 1)]
    DegreeTooSmall { index: usize, degree: usize },
    #[error("factor {}: delta must be nonzero", index + 1)]
    ZeroDelta { index: usize },
    #[error("a composition needs at least one factor")]
    Empty,
    #[error("rotation {k} out of range for {n} factors")]
    RotationOutOfRange { k: usize, n: usize },
    #[error("factor index {index} out of range for {n} factors")]
    IndexOutOfRange { index: usize, n: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// One generalized Hénon map with monic `p(y) = y^d + c_{d-1} y^{d-1} + ⋯ + c_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct HenonFactor<C: Coeff> {
    /// Non-leading coefficients `c_0, …, c_{d-1}`; the leading 1 is implicit.
    coeffs: Vec<C>,
    delta: C,
}

impl<C: Coeff> HenonFactor<C> {
    /// `coeffs` are `c_0 … c_{d-1}`, so the degree is `coeffs.len()`.
    pub fn new(coeffs: Vec<C>, delta: C) -> Result<Self, ModelError> {
        Self::validated(coeffs, delta, 0)
    }

    fn validated(coeffs: Vec<C>, delta: C, index: usize) -> Result<Self, ModelError> {
        if coeffs.len() < 2 {
            return Err(ModelError::DegreeTooSmall {
                index,
                degree: coeffs.len(),
            });
        }
        if delta.is_zero() {
            return Err(ModelError::ZeroDelta { index });
        }
        Ok(HenonFactor { coeffs, delta })
    }

    /// `p(y) = y^degree`.
    pub fn pure_power(degree: usize, delta: C) -> Result<Self, ModelError> {
        Self::new(vec![C::zero(); degree], delta)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn delta(&self) -> &C {
        &self.delta
    }

    /// `c_0, …, c_{d-1}, 1`.
    pub fn monic_coeffs(&self) -> Vec<C> {
        let mut v = self.coeffs.clone();
        v.push(C::one());
        v
    }

    /// `p(y_var)` in a ring with `nvars` variables.
    pub fn p_poly(&self, nvars: usize, var: usize) -> Polynomial<C> {
        Polynomial::univariate(nvars, var, &self.monic_coeffs())
    }

    /// `q(y_var) = p(y_var) - y_var^d`.
    pub fn q_poly(&self, nvars: usize, var: usize) -> Polynomial<C> {
        Polynomial::univariate(nvars, var, &self.coeffs)
    }

    pub fn p_prime_poly(&self, nvars: usize, var: usize) -> Polynomial<C> {
        self.p_poly(nvars, var).derivative(var)
    }

    /// `true` when the `y^{d-1}` coefficient is nonzero, i.e. the factor is
    /// not in the normal form with `deg q ≤ d - 2`.
    pub fn has_subleading_term(&self) -> bool {
        !self.coeffs[self.coeffs.len() - 1].is_zero()
    }

    pub fn eval_p(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(1.0, 0.0), |acc, c| acc * z + c.to_complex())
    }

    pub fn eval_p_prime(&self, z: Complex64) -> Complex64 {
        let d = self.degree();
        let mut acc = Complex64::new(d as f64, 0.0);
        for k in (1..d).rev() {
            acc = acc * z + self.coeffs[k].to_complex() * k as f64;
        }
        acc
    }

    /// `(x, y) ↦ (y, p(y) - δx)`.
    pub fn evaluate(&self, [x, y]: Point) -> Point {
        [y, self.eval_p(y) - self.delta.to_complex() * x]
    }

    /// `(x, y) ↦ ((p(x) - y)/δ, x)`.
    pub fn evaluate_inverse(&self, [x, y]: Point) -> Point {
        [(self.eval_p(x) - y) / self.delta.to_complex(), x]
    }

    pub fn to_float(&self) -> HenonFactor<Complex64> {
        HenonFactor {
            coeffs: self.coeffs.iter().map(Coeff::to_complex).collect(),
            delta: self.delta.to_complex(),
        }
    }
}

/// `f = f_n ∘ ⋯ ∘ f_1`, stored as `[f_1, …, f_n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HenonComposition<C: Coeff> {
    factors: Vec<HenonFactor<C>>,
}

impl<C: Coeff> HenonComposition<C> {
    pub fn new(factors: Vec<HenonFactor<C>>) -> Result<Self, ModelError> {
        if factors.is_empty() {
            return Err(ModelError::Empty);
        }
        let factors = factors
            .into_iter()
            .enumerate()
            .map(|(i, f)| HenonFactor::validated(f.coeffs, f.delta, i))
            .collect::<Result<_, _>>()?;
        Ok(HenonComposition { factors })
    }

    /// Validating constructor from raw `(coeffs, delta)` pairs.
    pub fn from_parts(parts: Vec<(Vec<C>, C)>) -> Result<Self, ModelError> {
        let factors = parts
            .into_iter()
            .enumerate()
            .map(|(i, (c, d))| HenonFactor::validated(c, d, i))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(factors)
    }

    pub fn factors(&self) -> &[HenonFactor<C>] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// `d = d_1⋯d_n`.
    pub fn degree(&self) -> u64 {
        self.factors.iter().map(|f| f.degree() as u64).product()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.factors.iter().map(HenonFactor::degree).collect()
    }

    /// `δ = δ_1⋯δ_n`.
    pub fn jacobian(&self) -> C {
        self.factors.iter().fold(C::one(), |acc, f| acc.times(&f.delta))
    }

    /// Cyclic shift so that factor `k` (zero-based) comes first. The result
    /// is conjugate to `self` by `f_k ∘ ⋯ ∘ f_1`.
    pub fn rotate(&self, k: usize) -> Result<Self, ModelError> {
        let n = self.len();
        if k >= n {
            return Err(ModelError::RotationOutOfRange { k, n });
        }
        let mut factors = self.factors.clone();
        factors.rotate_left(k);
        Ok(HenonComposition { factors })
    }

    /// The composition iterated `times` times, e.g. `f ∘ f ∘ f` for 3.
    pub fn repeated(&self, times: usize) -> Self {
        let factors = (0..times.max(1)).flat_map(|_| self.factors.iter().cloned()).collect();
        HenonComposition { factors }
    }

    pub fn evaluate(&self, point: Point) -> Point {
        self.factors.iter().fold(point, |p, f| f.evaluate(p))
    }

    pub fn evaluate_inverse(&self, point: Point) -> Point {
        self.factors.iter().rev().fold(point, |p, f| f.evaluate_inverse(p))
    }

    /// Human-readable notes about inputs outside the normal form assumed by
    /// the non-membership arguments.
    pub fn warnings(&self) -> Vec<String> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, f)| f.has_subleading_term())
            .map(|(i, f)| {
                format!(
                    "factor {}: p has a nonzero y^{} term; q is expected to have degree <= d-2",
                    i + 1,
                    f.degree() - 1
                )
            })
            .collect()
    }

    pub fn to_float(&self) -> HenonComposition<Complex64> {
        HenonComposition {
            factors: self.factors.iter().map(HenonFactor::to_float).collect(),
        }
    }
}

impl HenonComposition<GaussRat> {
    /// Pure powers `p_j = y^{d_j}` with the given rational Jacobian factors.
    pub fn pure_powers(degrees: &[usize], deltas: &[GaussRat]) -> Result<Self, ModelError> {
        let parts = degrees
            .iter()
            .zip(deltas)
            .map(|(&d, delta)| (vec![GaussRat::zero(); d], delta.clone()))
            .collect();
        Self::from_parts(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quad(delta: f64) -> HenonFactor<Complex64> {
        HenonFactor::pure_power(2, c(delta, 0.0)).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(quad(1.0).evaluate([c(0.0, 0.0), c(0.0, 0.0)]), [c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(quad(0.5).evaluate([c(2.0, 0.0), c(1.0, 0.0)]), [c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(quad(1.0).evaluate_inverse([c(0.0, 0.0), c(0.0, 0.0)]), [c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn inverse_round_trip() {
        let f = HenonFactor::pure_power(3, c(2.0, 0.0)).unwrap();
        let q = [c(1.3, 0.0), c(-0.7, 0.0)];
        let back = f.evaluate_inverse(f.evaluate(q));
        assert!((back[0] - q[0]).norm() < 1e-12 && (back[1] - q[1]).norm() < 1e-12);
    }

    #[test]
    fn derivative_matches_polynomial() {
        let f = HenonFactor::new(vec![c(0.3, -1.0), c(2.0, 0.5), c(0.0, 0.0)], c(0.7, 0.1)).unwrap();
        let z = c(0.4, -1.3);
        let dp = f.p_prime_poly(1, 0).evaluate(&[z]);
        assert!((dp - f.eval_p_prime(z)).norm() < 1e-12);
        assert!((f.p_poly(1, 0).evaluate(&[z]) - f.eval_p(z)).norm() < 1e-12);
    }

    #[test]
    fn validation() {
        assert_eq!(
            HenonFactor::new(vec![c(0.0, 0.0)], c(1.0, 0.0)).unwrap_err(),
            ModelError::DegreeTooSmall { index: 0, degree: 1 }
        );
        let err = HenonComposition::from_parts(vec![(vec![c(0.0, 0.0); 2], c(1.0, 0.0)), (vec![c(0.0, 0.0); 2], c(0.0, 0.0))]);
        assert_eq!(err.unwrap_err(), ModelError::ZeroDelta { index: 1 });
        assert_eq!(HenonComposition::<Complex64>::new(vec![]).unwrap_err(), ModelError::Empty);
    }

    #[test]
    fn rotation() {
        let comp = HenonComposition::new(vec![quad(0.1), quad(0.2), quad(0.3)]).unwrap();
        assert_eq!(comp.rotate(0).unwrap(), comp);
        let r = comp.rotate(1).unwrap();
        let deltas: Vec<f64> = r.factors().iter().map(|f| f.delta().re).collect();
        assert_eq!(deltas, vec![0.2, 0.3, 0.1]);
        assert_eq!(r.degree(), comp.degree());
        assert!((r.jacobian() - comp.jacobian()).norm() < 1e-15);
        assert!(comp.rotate(3).is_err());
    }

    #[test]
    fn subleading_warning() {
        let f = HenonFactor::new(vec![c(0.0, 0.0), c(1.0, 0.0)], c(1.0, 0.0)).unwrap();
        let comp = HenonComposition::new(vec![f]).unwrap();
        assert_eq!(comp.warnings().len(), 1);
    }
}
