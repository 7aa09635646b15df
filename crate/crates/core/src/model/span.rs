//! Structure of the differential when each `p_j'` is treated as an opaque
//! symbol `P_j`.
//!
//! Every entry of `M_n` is then a polynomial in `P_1, …, P_n` whose monomials
//! are squarefree products `P^L = ∏_{l ∈ L} P_l`. The diagonal entries (after
//! removing `P_1⋯P_n` from `m22`) only involve `|L| ≤ n - 2` with
//! `|L| ≡ n (mod 2)`; the off-diagonal entries `|L| ≤ n - 1` with
//! `|L| ≡ n - 1 (mod 2)`.

use std::collections::BTreeSet;

use serde::Serialize;

use super::system::chain_product;
use super::HenonComposition;
use crate::poly::{Coeff, Exponent, Polynomial};

/// Expansion of a polynomial over the symbols `P_1, …, P_n`: support sets
/// `L` (zero-based) with their coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanProfile<C: Coeff> {
    pub terms: Vec<(Vec<usize>, C)>,
    /// Monomials with some `P_l` to a power above 1, as exponent vectors.
    pub non_squarefree: Vec<Vec<u32>>,
}

impl<C: Coeff> SpanProfile<C> {
    pub fn of(p: &Polynomial<C>) -> Self {
        let mut terms = Vec::new();
        let mut non_squarefree = Vec::new();
        for (e, c) in p.terms().rev() {
            if e.as_slice().iter().any(|&a| a > 1) {
                non_squarefree.push(e.as_slice().to_vec());
            } else {
                let support = e.as_slice().iter().enumerate().filter(|(_, &a)| a == 1).map(|(i, _)| i).collect();
                terms.push((support, c.clone()));
            }
        }
        SpanProfile { terms, non_squarefree }
    }

    pub fn support_sizes(&self) -> BTreeSet<usize> {
        self.terms.iter().map(|(l, _)| l.len()).collect()
    }
}

/// Result of checking one matrix entry (or `Φ`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryProfile {
    pub name: String,
    /// `|L|` values that occur.
    pub support_sizes: Vec<usize>,
    pub max_size: i64,
    pub parity: usize,
    pub constants_admitted: bool,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpanReport {
    pub n: usize,
    pub entries: Vec<EntryProfile>,
    /// Coefficient of `P_1⋯P_n` in `m22` is 1 and in `Φ` is `-λ`.
    pub top_coefficients_ok: bool,
    pub passed: bool,
}

fn check_entry<C: Coeff>(name: &str, p: &Polynomial<C>, max_size: i64, constants_admitted: bool) -> EntryProfile {
    let profile = SpanProfile::of(p);
    let parity = max_size.rem_euclid(2) as usize;
    let mut violations: Vec<String> = profile
        .non_squarefree
        .iter()
        .map(|e| format!("{name}: monomial {} is not squarefree", Exponent::new(e.clone())))
        .collect();
    for (support, _) in &profile.terms {
        let size = support.len();
        if size == 0 && constants_admitted {
            continue;
        }
        if size as i64 > max_size || size % 2 != parity {
            let labels: Vec<String> = support.iter().map(|l| format!("P{}", l + 1)).collect();
            violations.push(format!(
                "{name}: product {{{}}} has |L| = {size}, outside |L| <= {max_size} with |L| = {parity} mod 2",
                labels.join(",")
            ));
        }
    }
    EntryProfile {
        name: name.to_string(),
        support_sizes: profile.support_sizes().into_iter().collect(),
        max_size,
        parity,
        constants_admitted,
        violations,
    }
}

/// Recompute `M_n` with `p_j'` replaced by the symbol `P_j` (keeping the
/// numeric `δ_j`) and check the span structure of its entries and of
/// `Φ = λ² - λ·tr(M_n) + δ`.
///
/// Constants are admitted in the `Φ` check because `λ²` and `δ` are
/// constants regardless of the parity of `n`.
pub fn span_profile_check<C: Coeff>(comp: &HenonComposition<C>, lambda: &C) -> SpanReport {
    let n = comp.len();
    let m = chain_product(
        n,
        comp.factors()
            .iter()
            .enumerate()
            .map(|(j, f)| (f.delta().clone(), Polynomial::var(n, j))),
    );
    let top = Exponent::new(vec![1; n]);
    let top_poly = Polynomial::term(top.clone(), C::one());

    let m22_rest = m.m22.try_sub(&top_poly).expect("same ring");
    let constant = lambda.times(lambda).plus(&comp.jacobian());
    let phi = Polynomial::constant(n, constant)
        .try_sub(&m.trace().scale(lambda))
        .expect("same ring");
    let phi_rest = phi.try_add(&top_poly.scale(lambda)).expect("same ring");

    let n = n as i64;
    let entries = vec![
        check_entry("m11", &m.m11, n - 2, false),
        check_entry("m22 - P1...Pn", &m22_rest, n - 2, false),
        check_entry("m12", &m.m12, n - 1, false),
        check_entry("m21", &m.m21, n - 1, false),
        check_entry("Phi + lambda*P1...Pn", &phi_rest, n - 2, true),
    ];

    let top_m22 = m.m22.coeff_of(&top).is_some_and(Coeff::is_one);
    let top_phi = if lambda.is_zero() {
        phi.coeff_of(&top).is_none()
    } else {
        phi.coeff_of(&top) == Some(&lambda.negated())
    };
    let top_coefficients_ok = top_m22 && top_phi;
    let passed = top_coefficients_ok && entries.iter().all(|e| e.violations.is_empty());
    SpanReport {
        n: n as usize,
        entries,
        top_coefficients_ok,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::GaussRat;

    #[test]
    fn base_cases() {
        let one = HenonComposition::pure_powers(&[2], &[GaussRat::ratio(1, 3)]).unwrap();
        let rep = span_profile_check(&one, &GaussRat::from_i64(2));
        assert!(rep.passed, "{rep:?}");
        assert!(rep.entries[0].support_sizes.is_empty());

        let two = HenonComposition::pure_powers(&[2, 3], &[GaussRat::ratio(1, 3), GaussRat::ratio(-2, 5)]).unwrap();
        let rep = span_profile_check(&two, &GaussRat::from_i64(6));
        assert!(rep.passed, "{rep:?}");
        // m11 = -δ1 has |L| = 0; m12 = P1 has |L| = 1
        assert_eq!(rep.entries[0].support_sizes, vec![0]);
        assert_eq!(rep.entries[2].support_sizes, vec![1]);
    }

    #[test]
    fn detects_violations() {
        let p = Polynomial::<GaussRat>::from_terms(
            3,
            [
                (Exponent::new(vec![1, 1, 0]), GaussRat::one()),
                (Exponent::new(vec![2, 0, 0]), GaussRat::one()),
            ],
        )
        .unwrap();
        let e = check_entry("x", &p, 1, false);
        assert_eq!(e.violations.len(), 2);
    }
}
