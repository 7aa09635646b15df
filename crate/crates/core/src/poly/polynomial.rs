use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::coeff::{Coeff, GaussRat};
use super::monomial::{write_monomial, Exponent, MonomialOrder};
use super::PolyError;

/// Sparse polynomial in `nvars` variables with coefficients in `C`.
///
/// Terms are kept in a map ordered by graded-lex, so the leading term is the
/// last entry. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<C: Coeff> {
    nvars: usize,
    terms: BTreeMap<Exponent, C>,
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::term(Exponent::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    /// The variable `y_{var+1}` (zero-based index).
    pub fn var(nvars: usize, var: usize) -> Self {
        Self::term(Exponent::var_power(nvars, var, 1), C::one())
    }

    pub fn term(exp: Exponent, c: C) -> Self {
        let mut p = Polynomial::zero(exp.nvars());
        p.add_term(exp, c);
        p
    }

    /// `Σ_k coeffs[k] · y_var^k`.
    pub fn univariate(nvars: usize, var: usize, coeffs: &[C]) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(Exponent::var_power(nvars, var, k as u32), c.clone());
        }
        p
    }

    /// Build from arbitrary terms; duplicates are summed, zeros dropped.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, C)>) -> Result<Self, PolyError> {
        let mut p = Polynomial::zero(nvars);
        for (e, c) in terms {
            if e.nvars() != nvars {
                return Err(PolyError::RingMismatch {
                    left: nvars,
                    right: e.nvars(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &C)> + '_ {
        self.terms.iter()
    }

    pub fn coeff_of(&self, exp: &Exponent) -> Option<&C> {
        self.terms.get(exp)
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Exponent::degree).max()
    }

    /// Leading monomial and coefficient.
    pub fn leading(&self, order: MonomialOrder) -> Result<(Exponent, C), PolyError> {
        match order {
            MonomialOrder::GradedLex => self
                .terms
                .last_key_value()
                .map(|(e, c)| (e.clone(), c.clone()))
                .ok_or(PolyError::ZeroPolynomial),
        }
    }

    pub fn leading_monomial(&self) -> Option<&Exponent> {
        self.terms.last_key_value().map(|(e, _)| e)
    }

    pub fn leading_coeff(&self) -> Option<&C> {
        self.terms.last_key_value().map(|(_, c)| c)
    }

    pub(crate) fn pop_leading(&mut self) -> Option<(Exponent, C)> {
        self.terms.pop_last()
    }

    pub fn check_ring(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::RingMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    /// `self += c · y^exp`, dropping the term if it cancels.
    pub(crate) fn add_term(&mut self, exp: Exponent, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().plus(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// `self += c · y^shift · other`, rings assumed equal.
    pub(crate) fn add_scaled(&mut self, other: &Self, shift: &Exponent, c: &C) {
        for (e, oc) in &other.terms {
            self.add_term(e.mul(shift), oc.times(c));
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.negated());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_scaled(other, e, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Polynomial::zero(self.nvars);
        for (e, oc) in &self.terms {
            out.add_term(e.clone(), oc.times(c));
        }
        out
    }

    pub fn negated(&self) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.negated())).collect(),
        }
    }

    /// `c · y^exp · self`.
    pub fn mul_term(&self, exp: &Exponent, c: &C) -> Result<Self, PolyError> {
        if exp.nvars() != self.nvars {
            return Err(PolyError::RingMismatch {
                left: self.nvars,
                right: exp.nvars(),
            });
        }
        let mut out = Polynomial::zero(self.nvars);
        out.add_scaled(self, exp, c);
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..k {
            acc = acc.try_mul(self).expect("same ring");
        }
        acc
    }

    /// Partial derivative with respect to `y_{var+1}`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            let a = e[var];
            if a == 0 {
                continue;
            }
            let mut v = e.as_slice().to_vec();
            v[var] -= 1;
            out.add_term(Exponent::new(v), c.times(&C::from_i64(a as i64)));
        }
        out
    }

    /// Substitute `images[k]` for the k-th variable. The result lives in the
    /// ring of the images.
    pub fn compose(&self, images: &[Polynomial<C>]) -> Result<Polynomial<C>, PolyError> {
        if images.len() != self.nvars {
            return Err(PolyError::RingMismatch {
                left: self.nvars,
                right: images.len(),
            });
        }
        let target = images.first().map_or(0, |p| p.nvars);
        if let Some(bad) = images.iter().find(|p| p.nvars != target) {
            return Err(PolyError::RingMismatch {
                left: target,
                right: bad.nvars,
            });
        }
        let mut out = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut prod = Polynomial::constant(target, c.clone());
            for (k, &a) in e.as_slice().iter().enumerate() {
                if a > 0 {
                    prod = prod.try_mul(&images[k].pow(a))?;
                }
            }
            for (pe, pc) in prod.terms {
                out.add_term(pe, pc);
            }
        }
        Ok(out)
    }

    /// Numeric evaluation at a complex point.
    pub fn evaluate(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars, "evaluation point has wrong dimension");
        self.terms
            .iter()
            .map(|(e, c)| {
                e.as_slice()
                    .iter()
                    .zip(point)
                    .fold(c.to_complex(), |acc, (&a, z)| acc * z.powu(a))
            })
            .sum()
    }

    /// Evaluation in the coefficient field itself.
    pub fn evaluate_exact(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.nvars, "evaluation point has wrong dimension");
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (&a, z) in e.as_slice().iter().zip(point) {
                for _ in 0..a {
                    t = t.times(z);
                }
            }
            acc = acc.plus(&t);
        }
        acc
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn to_float(&self) -> Polynomial<Complex64> {
        self.map_coeffs(Coeff::to_complex)
    }

    /// Canonical text with a custom variable symbol (`y` by default).
    pub fn to_text_with(&self, symbol: &str) -> String {
        let mut out = String::new();
        if self.terms.is_empty() {
            out.push('0');
            return out;
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mut mono = String::new();
            write_monomial(&mut mono, e.as_slice(), symbol).expect("write to string");
            match c.real_text() {
                Some((negative, magnitude)) => {
                    match (i == 0, negative) {
                        (true, true) => out.push('-'),
                        (true, false) => {}
                        (false, true) => out.push_str(" - "),
                        (false, false) => out.push_str(" + "),
                    }
                    if e.is_one() {
                        out.push_str(&magnitude);
                    } else if magnitude == "1" {
                        out.push_str(&mono);
                    } else {
                        out.push_str(&magnitude);
                        out.push('*');
                        out.push_str(&mono);
                    }
                }
                None => {
                    if i > 0 {
                        out.push_str(" + ");
                    }
                    out.push('(');
                    out.push_str(&c.text());
                    out.push(')');
                    if !e.is_one() {
                        out.push('*');
                        out.push_str(&mono);
                    }
                }
            }
        }
        out
    }
}

impl Polynomial<GaussRat> {
    /// Exact evaluation at Gaussian-rational coordinates.
    pub fn evaluate_rational(&self, point: &[GaussRat]) -> GaussRat {
        self.evaluate_exact(point)
    }
}

/// Canonical text form: terms in decreasing graded-lex order, exact
/// coefficients as `a/b+c/d*i`, monomials as `y1^e1*y2^e2`.
impl<C: Coeff> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text_with("y"))
    }
}
