//! Multivariate division, S-polynomials and Buchberger's criterion.

use super::coeff::Coeff;
use super::monomial::{Exponent, MonomialOrder};
use super::polynomial::Polynomial;
use super::{CancelToken, PolyError};

/// Outcome of dividing `g` by an ordered list of divisors:
/// `g = Σ quotients[j]·divisors[j] + remainder`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisionResult<C: Coeff> {
    pub quotients: Vec<Polynomial<C>>,
    pub remainder: Polynomial<C>,
}

impl<C: Coeff> DivisionResult<C> {
    /// `Σ quotients[j]·divisors[j] + remainder`.
    pub fn reconstruct(&self, divisors: &[Polynomial<C>]) -> Result<Polynomial<C>, PolyError> {
        let mut acc = self.remainder.clone();
        for (q, f) in self.quotients.iter().zip(divisors) {
            acc = acc.try_add(&q.try_mul(f)?)?;
        }
        Ok(acc)
    }

    /// `true` when no remainder term is divisible by a divisor's leading
    /// monomial.
    pub fn remainder_is_reduced(&self, divisors: &[Polynomial<C>]) -> bool {
        let leads: Vec<&Exponent> = divisors.iter().filter_map(Polynomial::leading_monomial).collect();
        self.remainder
            .terms()
            .all(|(e, _)| leads.iter().all(|lm| !lm.divides(e)))
    }

    /// `LM(g) ≥ LM(q_j·f_j)` for every nonzero product.
    pub fn quotient_bound_holds(&self, dividend: &Polynomial<C>, divisors: &[Polynomial<C>]) -> bool {
        let Some(lg) = dividend.leading_monomial() else {
            return self.quotients.iter().all(Polynomial::is_zero);
        };
        self.quotients.iter().zip(divisors).all(|(q, f)| match (q.leading_monomial(), f.leading_monomial()) {
            (Some(lq), Some(lf)) => lq.mul(lf) <= *lg,
            _ => true,
        })
    }
}

/// Divide `g` by `divisors` in the given order.
///
/// At each step the current leading term is reduced by the first divisor
/// whose leading monomial divides it; otherwise it moves to the remainder.
pub fn divide_multivariate<C: Coeff>(
    g: &Polynomial<C>,
    divisors: &[Polynomial<C>],
    order: MonomialOrder,
) -> Result<DivisionResult<C>, PolyError> {
    divide_multivariate_with_cancel(g, divisors, order, &CancelToken::never())
}

/// [`divide_multivariate`] that polls `cancel` between reduction steps.
pub fn divide_multivariate_with_cancel<C: Coeff>(
    g: &Polynomial<C>,
    divisors: &[Polynomial<C>],
    order: MonomialOrder,
    cancel: &CancelToken,
) -> Result<DivisionResult<C>, PolyError> {
    let n = g.nvars();
    let mut leads = Vec::with_capacity(divisors.len());
    for (i, f) in divisors.iter().enumerate() {
        g.check_ring(f)?;
        let (lm, lc) = f.leading(order).map_err(|_| PolyError::ZeroDivisor { index: i })?;
        let inv = lc.inverse().ok_or(PolyError::ZeroDivisor { index: i })?;
        leads.push((lm, inv));
    }

    let mut quotients = vec![Polynomial::zero(n); divisors.len()];
    let mut remainder = Polynomial::zero(n);
    let mut work = g.clone();
    let mut steps: u64 = 0;
    while let Some((lm, lc)) = work.pop_leading() {
        steps += 1;
        if steps.is_multiple_of(256) && cancel.is_cancelled() {
            return Err(PolyError::Cancelled);
        }
        let hit = leads
            .iter()
            .enumerate()
            .find_map(|(i, (flm, inv))| flm.quotient_of(&lm).map(|shift| (i, shift, lc.times(inv))));
        match hit {
            Some((i, shift, factor)) => {
                quotients[i].add_term(shift.clone(), factor.clone());
                // the leading term cancels by construction; subtract the tail only
                let neg = factor.negated();
                for (fe, fc) in divisors[i].terms().rev().skip(1) {
                    work.add_term(fe.mul(&shift), fc.times(&neg));
                }
            }
            None => remainder.add_term(lm, lc),
        }
    }
    Ok(DivisionResult { quotients, remainder })
}

/// `S(f, g) = (L/LT(f))·f − (L/LT(g))·g` with `L = lcm(LM(f), LM(g))`.
pub fn s_polynomial<C: Coeff>(f: &Polynomial<C>, g: &Polynomial<C>, order: MonomialOrder) -> Result<Polynomial<C>, PolyError> {
    f.check_ring(g)?;
    let (lf, cf) = f.leading(order)?;
    let (lg, cg) = g.leading(order)?;
    let lcm = lf.lcm(&lg);
    let sf = lf.quotient_of(&lcm).expect("lcm is a multiple");
    let sg = lg.quotient_of(&lcm).expect("lcm is a multiple");
    let a = f.mul_term(&sf, &cf.inverse().ok_or(PolyError::ZeroPolynomial)?)?;
    let b = g.mul_term(&sg, &cg.inverse().ok_or(PolyError::ZeroPolynomial)?)?;
    a.try_sub(&b)
}

/// Result of checking Buchberger's criterion on a candidate basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerReport<C: Coeff> {
    pub is_groebner: bool,
    /// Number of S-pairs examined.
    pub pairs_checked: usize,
    /// First pair (zero-based indices) whose S-polynomial did not reduce to 0.
    pub failing_pair: Option<(usize, usize)>,
    pub witness_remainder: Option<Polynomial<C>>,
}

/// Check whether `basis` is a Gröbner basis: every S-polynomial must leave
/// remainder 0 on division by the basis.
pub fn buchberger_verify<C: Coeff>(basis: &[Polynomial<C>], order: MonomialOrder) -> Result<GroebnerReport<C>, PolyError> {
    buchberger_verify_with_cancel(basis, order, &CancelToken::never())
}

pub fn buchberger_verify_with_cancel<C: Coeff>(
    basis: &[Polynomial<C>],
    order: MonomialOrder,
    cancel: &CancelToken,
) -> Result<GroebnerReport<C>, PolyError> {
    if basis.is_empty() {
        return Err(PolyError::EmptyBasis);
    }
    for (i, f) in basis.iter().enumerate() {
        if f.is_zero() {
            return Err(PolyError::ZeroDivisor { index: i });
        }
        basis[0].check_ring(f)?;
    }
    let mut pairs_checked = 0;
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            pairs_checked += 1;
            let s = s_polynomial(&basis[i], &basis[j], order)?;
            let r = divide_multivariate_with_cancel(&s, basis, order, cancel)?.remainder;
            if !r.is_zero() {
                return Ok(GroebnerReport {
                    is_groebner: false,
                    pairs_checked,
                    failing_pair: Some((i, j)),
                    witness_remainder: Some(r),
                });
            }
        }
    }
    Ok(GroebnerReport {
        is_groebner: true,
        pairs_checked,
        failing_pair: None,
        witness_remainder: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::GaussRat;
    use proptest::prelude::*;

    type P = Polynomial<GaussRat>;
    const G: MonomialOrder = MonomialOrder::GradedLex;

    fn poly(n: usize, terms: &[(&[u32], i64)]) -> P {
        P::from_terms(n, terms.iter().map(|(e, c)| (Exponent::new(e.to_vec()), GaussRat::from_i64(*c)))).unwrap()
    }

    #[test]
    fn single_divisor() {
        // y1^2 / (y1^2 - 7) -> q = 1, r = 7
        let g = poly(1, &[(&[2], 1)]);
        let f = poly(1, &[(&[2], 1), (&[0], -7)]);
        let res = divide_multivariate(&g, std::slice::from_ref(&f), G).unwrap();
        assert_eq!(res.quotients[0], P::one(1));
        assert_eq!(res.remainder, P::constant(1, GaussRat::from_i64(7)));
    }

    #[test]
    fn zero_divisor_rejected() {
        let g = poly(1, &[(&[2], 1)]);
        let err = divide_multivariate(&g, &[poly(1, &[(&[1], 1)]), P::zero(1)], G).unwrap_err();
        assert_eq!(err, PolyError::ZeroDivisor { index: 1 });
    }

    #[test]
    fn first_match_rule() {
        // y1*y2 divided by [y1, y2]: the first divisor takes it
        let g = poly(2, &[(&[1, 1], 1)]);
        let res = divide_multivariate(&g, &[poly(2, &[(&[1, 0], 1)]), poly(2, &[(&[0, 1], 1)])], G).unwrap();
        assert_eq!(res.quotients[0], poly(2, &[(&[0, 1], 1)]));
        assert!(res.quotients[1].is_zero());
        assert!(res.remainder.is_zero());
    }

    #[test]
    fn s_polynomial_cases() {
        let f = poly(2, &[(&[2, 0], 1), (&[0, 1], 3)]);
        assert!(s_polynomial(&f, &f, G).unwrap().is_zero());
        let a = poly(2, &[(&[2, 0], 1)]);
        let b = poly(2, &[(&[0, 2], 1)]);
        assert!(s_polynomial(&a, &b, G).unwrap().is_zero());
        assert!(matches!(s_polynomial(&a, &P::zero(2), G), Err(PolyError::ZeroPolynomial)));
    }

    #[test]
    fn buchberger_small_cases() {
        assert!(buchberger_verify(&[poly(1, &[(&[1], 1)])], G).unwrap().is_groebner);
        assert!(matches!(buchberger_verify::<GaussRat>(&[], G), Err(PolyError::EmptyBasis)));
    }

    #[test]
    fn cancellation() {
        let token = CancelToken::new();
        token.cancel();
        // large enough to hit the poll interval
        let g = poly(1, &[(&[600], 1)]);
        let f = poly(1, &[(&[1], 1), (&[0], -1)]);
        let err = divide_multivariate_with_cancel(&g, &[f], G, &token).unwrap_err();
        assert_eq!(err, PolyError::Cancelled);
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = P> {
        prop::collection::vec((prop::collection::vec(0u32..4, n), -5i64..6, 1i64..4), 0..6).prop_map(move |ts| {
            P::from_terms(n, ts.into_iter().map(|(e, a, b)| (Exponent::new(e), GaussRat::ratio(a, b)))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn division_identity_and_purity(g in arb_poly(3), f1 in arb_poly(3), f2 in arb_poly(3)) {
            let divisors: Vec<P> = [f1, f2].into_iter().filter(|f| !f.is_zero()).collect();
            prop_assume!(!divisors.is_empty());
            let res = divide_multivariate(&g, &divisors, G).unwrap();
            prop_assert_eq!(res.reconstruct(&divisors).unwrap(), g.clone());
            prop_assert!(res.remainder_is_reduced(&divisors));
            prop_assert!(res.quotient_bound_holds(&g, &divisors));
        }

        #[test]
        fn s_polynomial_drops_below_lcm(f in arb_poly(2), g in arb_poly(2)) {
            prop_assume!(!f.is_zero() && !g.is_zero());
            let s = s_polynomial(&f, &g, G).unwrap();
            let lcm = f.leading_monomial().unwrap().lcm(g.leading_monomial().unwrap());
            if let Some(ls) = s.leading_monomial() {
                prop_assert!(*ls < lcm);
            }
        }
    }
}
