//! Exact ideal-membership certificates over the fixed-point system.
//!
//! All operations here take compositions with Gaussian-rational coefficients:
//! a nonzero remainder only certifies non-membership when it is exact, so the
//! floating field is not accepted.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::model::{eta_polynomial, fixed_point_system, multiplier_polynomial, HenonComposition, ModelError};
use crate::poly::{
    buchberger_verify_with_cancel, divide_multivariate_with_cancel, CancelToken, Coeff, Exponent, GaussRat,
    GroebnerReport, MonomialOrder, PolyError, Polynomial,
};

type ExactPoly = Polynomial<GaussRat>;

const ORDER: MonomialOrder = MonomialOrder::GradedLex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid index set: {0}")]
    IndexSet(String),
    #[error("h is not in the span H_J: {0}")]
    NotInSpan(String),
}

/// Outcome of reducing a target polynomial by the fixed-point system.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport {
    pub target: ExactPoly,
    pub remainder: ExactPoly,
    pub is_member: bool,
    pub target_leading: Option<(Exponent, GaussRat)>,
    pub remainder_leading: Option<(Exponent, GaussRat)>,
    /// Whether `LM(target)` is divisible by some `LM(φ_i) = y_i^{d_i}`.
    pub target_leading_reducible: bool,
    /// `LM(target) ≥ LM(A_j φ_j)` for every quotient.
    pub quotient_leading_bound_ok: bool,
}

/// Divide `target` by the fixed-point system of `comp` and summarize.
///
/// The verdict is an ideal-membership decision because the system is a
/// Gröbner basis for graded-lex; see [`verify_groebner_system`].
pub fn membership(comp: &HenonComposition<GaussRat>, target: &ExactPoly, cancel: &CancelToken) -> Result<MembershipReport, AnalysisError> {
    let system = fixed_point_system(comp);
    let division = divide_multivariate_with_cancel(target, &system, ORDER, cancel)?;
    let target_leading = target.leading(ORDER).ok();
    let target_leading_reducible = target_leading.as_ref().is_some_and(|(lm, _)| {
        system
            .iter()
            .filter_map(Polynomial::leading_monomial)
            .any(|lf| lf.divides(lm))
    });
    Ok(MembershipReport {
        target: target.clone(),
        is_member: division.remainder.is_zero(),
        remainder_leading: division.remainder.leading(ORDER).ok(),
        quotient_leading_bound_ok: division.quotient_bound_holds(target, &system),
        remainder: division.remainder,
        target_leading,
        target_leading_reducible,
    })
}

/// Run Buchberger's criterion on `{φ_1, …, φ_n}`.
pub fn verify_groebner_system(comp: &HenonComposition<GaussRat>, cancel: &CancelToken) -> Result<GroebnerReport<GaussRat>, AnalysisError> {
    Ok(buchberger_verify_with_cancel(&fixed_point_system(comp), ORDER, cancel)?)
}

/// Membership of the multiplier polynomial `Φ` in `⟨φ_1, …, φ_n⟩`.
pub fn phi_membership(comp: &HenonComposition<GaussRat>, lambda: &GaussRat, cancel: &CancelToken) -> Result<MembershipReport, AnalysisError> {
    membership(comp, &multiplier_polynomial(comp, lambda), cancel)
}

/// Membership of `(y_1 - α)Φ` in `⟨φ_1, …, φ_n⟩`.
pub fn shifted_phi_membership(
    comp: &HenonComposition<GaussRat>,
    lambda: &GaussRat,
    alpha: &GaussRat,
    cancel: &CancelToken,
) -> Result<MembershipReport, AnalysisError> {
    let n = comp.len();
    let shift = Polynomial::var(n, 0).try_sub(&Polynomial::constant(n, alpha.clone()))?;
    let target = shift.try_mul(&multiplier_polynomial(comp, lambda))?;
    membership(comp, &target, cancel)
}

/// Pieces of the one-step division identity
/// `(y_j - α)((p')^J + h) = A·φ_j + B·((p')^{J∖j} + ρ₁) + (y_j - α)·ρ₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeelReport {
    /// Left-hand side, expanded in `y`.
    pub lhs: ExactPoly,
    pub a: ExactPoly,
    /// `B = η_j + d_j y_{j+1} + d_j δ_j y_{j-1}`.
    pub b: ExactPoly,
    pub eta: ExactPoly,
    /// `(p')^{J∖j} + ρ₁`, expanded in `y`.
    pub mu: ExactPoly,
    /// `ρ₁`, `ρ₂` over the abstract symbols `P_k`.
    pub rho1: ExactPoly,
    pub rho2: ExactPoly,
    /// `lhs - rhs`; zero when the identity holds.
    pub difference: ExactPoly,
    pub identity_holds: bool,
    pub lhs_leading: Exponent,
    pub a_phi_leading: Exponent,
    pub leading_match: bool,
}

fn normalize_index_set(n: usize, set: &[usize], j: usize) -> Result<Vec<usize>, AnalysisError> {
    let unique: BTreeSet<usize> = set.iter().copied().collect();
    if unique.len() != set.len() {
        return Err(AnalysisError::IndexSet("repeated index".into()));
    }
    if let Some(bad) = unique.iter().find(|&&k| k >= n) {
        return Err(AnalysisError::IndexSet(format!("index {} exceeds {n} factors", bad + 1)));
    }
    if !unique.contains(&j) {
        return Err(AnalysisError::IndexSet(format!("j = {} is not in J", j + 1)));
    }
    Ok(unique.into_iter().collect())
}

/// Check that `h` (a polynomial in the symbols `P_1, …, P_n`) lies in `H_J`:
/// squarefree products `P^L`, `L ⊆ J`, `|L| ≤ |J| - 2`, `|L| ≡ |J| (mod 2)`.
pub fn check_in_span(h: &ExactPoly, set: &[usize]) -> Result<(), AnalysisError> {
    let allowed: BTreeSet<usize> = set.iter().copied().collect();
    let size = set.len();
    for (e, _) in h.terms() {
        let exps = e.as_slice();
        if exps.iter().any(|&a| a > 1) {
            return Err(AnalysisError::NotInSpan(format!("{} is not squarefree", e)));
        }
        let support: Vec<usize> = exps.iter().enumerate().filter(|(_, &a)| a == 1).map(|(i, _)| i).collect();
        if support.iter().any(|k| !allowed.contains(k)) {
            return Err(AnalysisError::NotInSpan(format!("{} uses a symbol outside J", e)));
        }
        let l = support.len();
        if l + 2 > size || !(size - l).is_multiple_of(2) {
            return Err(AnalysisError::NotInSpan(format!(
                "{} has |L| = {l}, need |L| <= {} with the parity of {size}",
                e,
                size as i64 - 2
            )));
        }
    }
    Ok(())
}

/// `P^L` as a polynomial in the abstract symbols.
fn symbol_product(n: usize, support: &[usize]) -> ExactPoly {
    let mut e = vec![0; n];
    for &k in support {
        e[k] = 1;
    }
    Polynomial::term(Exponent::new(e), GaussRat::one())
}

/// Build `A`, `B`, `ρ₁`, `ρ₂` for the given `J`, `j ∈ J`, `α` and `h ∈ H_J`,
/// and verify the division identity exactly.
///
/// Indices are zero-based. `h` is a polynomial in `n` abstract symbols
/// `P_1, …, P_n` standing for `p_1'(y_1), …, p_n'(y_n)`. It is split as
/// `h = P_j·ρ₁ + ρ₂` by collecting the products that contain `P_j`.
pub fn peel_identity_verify(
    comp: &HenonComposition<GaussRat>,
    set: &[usize],
    j: usize,
    alpha: &GaussRat,
    h: &ExactPoly,
) -> Result<PeelReport, AnalysisError> {
    let n = comp.len();
    let set = normalize_index_set(n, set, j)?;
    if h.nvars() != n {
        return Err(PolyError::RingMismatch { left: n, right: h.nvars() }.into());
    }
    check_in_span(h, &set)?;

    let rest: Vec<usize> = set.iter().copied().filter(|&k| k != j).collect();
    let mut rho1 = Polynomial::zero(n);
    let mut rho2 = Polynomial::zero(n);
    for (e, c) in h.terms() {
        if e[j] == 1 {
            let mut reduced = e.as_slice().to_vec();
            reduced[j] = 0;
            rho1 = rho1.try_add(&Polynomial::term(Exponent::new(reduced), c.clone()))?;
        } else {
            rho2 = rho2.try_add(&Polynomial::term(e.clone(), c.clone()))?;
        }
    }
    let mu_abstract = symbol_product(n, &rest).try_add(&rho1)?;

    // P_k -> p_k'(y_k)
    let images: Vec<ExactPoly> = comp
        .factors()
        .iter()
        .enumerate()
        .map(|(k, f)| f.p_prime_poly(n, k))
        .collect();
    let lhs_abstract = symbol_product(n, &set).try_add(h)?;
    let y_minus_alpha = Polynomial::var(n, j).try_sub(&Polynomial::constant(n, alpha.clone()))?;

    let lhs = y_minus_alpha.try_mul(&lhs_abstract.compose(&images)?)?;
    let mu = mu_abstract.compose(&images)?;
    let rho2_y = rho2.compose(&images)?;

    let factor = &comp.factors()[j];
    let dj = GaussRat::from_i64(factor.degree() as i64);
    let a = mu.scale(&dj);
    let eta = eta_polynomial(comp, j, alpha)?;
    let b = eta
        .try_add(&Polynomial::var(n, (j + 1) % n).scale(&dj))?
        .try_add(&Polynomial::var(n, (j + n - 1) % n).scale(&dj.times(factor.delta())))?;

    let phi_j = &fixed_point_system(comp)[j];
    let a_phi = a.try_mul(phi_j)?;
    let rhs = a_phi.try_add(&b.try_mul(&mu)?)?.try_add(&y_minus_alpha.try_mul(&rho2_y)?)?;
    let difference = lhs.try_sub(&rhs)?;

    let lhs_leading = lhs.leading(ORDER)?.0;
    let a_phi_leading = a_phi.leading(ORDER)?.0;
    Ok(PeelReport {
        identity_holds: difference.is_zero(),
        leading_match: lhs_leading == a_phi_leading,
        lhs,
        a,
        b,
        eta,
        mu,
        rho1,
        rho2,
        difference,
        lhs_leading,
        a_phi_leading,
    })
}

/// Random element of `H_J` with small rational coefficients, over `n`
/// abstract symbols. Each admissible product is included with probability
/// one half.
pub fn random_span_element<R: Rng + ?Sized>(rng: &mut R, n: usize, set: &[usize]) -> ExactPoly {
    let size = set.len();
    let mut h = Polynomial::zero(n);
    // enumerate subsets of J by bitmask
    for mask in 0u64..(1u64 << size) {
        let support: Vec<usize> = (0..size).filter(|b| mask >> b & 1 == 1).map(|b| set[b]).collect();
        let l = support.len();
        if l + 2 > size || !(size - l).is_multiple_of(2) {
            continue;
        }
        if rng.random_bool(0.5) {
            let num = rng.random_range(-9i64..=9);
            let den = rng.random_range(1i64..=7);
            if num != 0 {
                let term = symbol_product(n, &support).scale(&GaussRat::ratio(num, den));
                h = h.try_add(&term).expect("same ring");
            }
        }
    }
    h
}

/// Serializable summary of a [`MembershipReport`] (polynomials in canonical
/// text).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipSummary {
    pub target: String,
    pub remainder: String,
    pub is_member: bool,
    pub target_leading_monomial: Option<String>,
    pub target_leading_coefficient: Option<String>,
    pub target_leading_reducible: bool,
    pub remainder_leading_monomial: Option<String>,
    pub remainder_leading_coefficient: Option<String>,
    pub remainder_terms: usize,
    pub quotient_leading_bound_ok: bool,
}

impl From<&MembershipReport> for MembershipSummary {
    fn from(r: &MembershipReport) -> Self {
        MembershipSummary {
            target: r.target.to_string(),
            remainder: r.remainder.to_string(),
            is_member: r.is_member,
            target_leading_monomial: r.target_leading.as_ref().map(|(e, _)| e.to_string()),
            target_leading_coefficient: r.target_leading.as_ref().map(|(_, c)| c.to_string()),
            target_leading_reducible: r.target_leading_reducible,
            remainder_leading_monomial: r.remainder_leading.as_ref().map(|(e, _)| e.to_string()),
            remainder_leading_coefficient: r.remainder_leading.as_ref().map(|(_, c)| c.to_string()),
            remainder_terms: r.remainder.num_terms(),
            quotient_leading_bound_ok: r.quotient_leading_bound_ok,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::expected_multiplier_leading;
    use crate::poly::buchberger_verify;

    fn r(a: i64, b: i64) -> GaussRat {
        GaussRat::ratio(a, b)
    }

    fn never() -> CancelToken {
        CancelToken::never()
    }

    #[test]
    fn groebner_small() {
        let one = HenonComposition::pure_powers(&[3], &[r(2, 3)]).unwrap();
        assert!(verify_groebner_system(&one, &never()).unwrap().is_groebner);
        let three = HenonComposition::from_parts(vec![
            (vec![r(1, 2), r(-1, 1)], r(1, 3)),
            (vec![r(0, 1), r(2, 1), r(0, 1)], r(-2, 5)),
            (vec![GaussRat::complex_ratio((1, 1), (1, 2)), r(0, 1)], r(3, 1)),
        ])
        .unwrap();
        let rep = verify_groebner_system(&three, &never()).unwrap();
        assert!(rep.is_groebner);
        assert_eq!(rep.pairs_checked, 3);
    }

    #[test]
    fn corrupted_system_fails() {
        let comp = HenonComposition::from_parts(vec![(vec![r(1, 2), r(0, 1)], r(1, 3)), (vec![r(0, 1), r(0, 1)], r(-2, 5))]).unwrap();
        let mut system = fixed_point_system(&comp);
        // drop y1^2 from φ1: LM becomes y2, which now overlaps LM(φ2) = y2^2
        system[0].pop_leading();
        let rep = buchberger_verify(&system, ORDER).unwrap();
        assert!(!rep.is_groebner);
        assert_eq!(rep.failing_pair, Some((0, 1)));
        assert!(!rep.witness_remainder.unwrap().is_zero());
    }

    #[test]
    fn phi_not_member_three_quadratics() {
        let comp = HenonComposition::pure_powers(&[2, 2, 2], &[r(1, 2), r(-1, 3), r(2, 5)]).unwrap();
        let lambda = GaussRat::from_i64(8);
        let rep = phi_membership(&comp, &lambda, &never()).unwrap();
        assert!(!rep.is_member);
        assert!(!rep.target_leading_reducible);
        let (lm, lc) = expected_multiplier_leading(&comp, &lambda);
        assert_eq!(rep.target_leading, Some((lm.clone(), lc.clone())));
        // the leading monomial survives division untouched
        assert_eq!(rep.remainder.coeff_of(&lm), Some(&lc));
        assert_eq!(rep.remainder_leading, Some((lm, lc)));
    }

    #[test]
    fn phi_times_phi1_is_member() {
        let comp = HenonComposition::pure_powers(&[2, 2, 2], &[r(1, 2), r(-1, 3), r(2, 5)]).unwrap();
        let target = multiplier_polynomial(&comp, &r(8, 1))
            .try_mul(&fixed_point_system(&comp)[0])
            .unwrap();
        assert!(membership(&comp, &target, &never()).unwrap().is_member);
    }

    #[test]
    fn peel_degenerate_singleton() {
        let comp = HenonComposition::from_parts(vec![(vec![r(3, 1), r(0, 1), r(1, 2)], r(1, 2))]).unwrap();
        let rep = peel_identity_verify(&comp, &[0], 0, &r(2, 1), &Polynomial::zero(1)).unwrap();
        assert!(rep.identity_holds, "difference {}", rep.difference);
        assert!(rep.leading_match);
        assert!(rep.rho1.is_zero() && rep.rho2.is_zero());
        assert_eq!(rep.mu, Polynomial::one(1));
    }

    #[test]
    fn peel_rejects_bad_inputs() {
        let comp = HenonComposition::pure_powers(&[2, 2, 2], &[r(1, 2), r(-1, 3), r(2, 5)]).unwrap();
        let zero = Polynomial::zero(3);
        assert!(matches!(peel_identity_verify(&comp, &[0, 1], 2, &r(0, 1), &zero), Err(AnalysisError::IndexSet(_))));
        assert!(matches!(peel_identity_verify(&comp, &[0, 5], 0, &r(0, 1), &zero), Err(AnalysisError::IndexSet(_))));
        // |L| = |J| is not allowed in h
        let h = symbol_product(3, &[0, 1, 2]);
        assert!(matches!(peel_identity_verify(&comp, &[0, 1, 2], 0, &r(0, 1), &h), Err(AnalysisError::NotInSpan(_))));
    }
}
