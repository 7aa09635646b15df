use henon_core::ideal::{membership, phi_membership, shifted_phi_membership, verify_groebner_system};
use henon_core::model::{differential_symbolic, expected_multiplier_leading, fixed_point_system, multiplier_polynomial};
use henon_core::poly::{buchberger_verify, divide_multivariate, s_polynomial, CancelToken};
use henon_core::{Coeff, ExactPoly, Exponent, GaussRat, HenonComposition, MonomialOrder, Polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GLEX: MonomialOrder = MonomialOrder::GradedLex;

fn r(a: i64, b: i64) -> GaussRat {
    GaussRat::ratio(a, b)
}

fn poly(nvars: usize, terms: &[(&[u32], GaussRat)]) -> ExactPoly {
    Polynomial::from_terms(nvars, terms.iter().map(|(e, c)| (Exponent::new(e.to_vec()), c.clone()))).unwrap()
}

/// Plain Buchberger completion: add nonzero S-remainders until none remain.
fn complete(mut basis: Vec<ExactPoly>) -> Vec<ExactPoly> {
    let mut i = 0;
    while i < basis.len() {
        for j in 0..i {
            let s = s_polynomial(&basis[j], &basis[i], GLEX).unwrap();
            let rem = divide_multivariate(&s, &basis, GLEX).unwrap().remainder;
            if !rem.is_zero() {
                basis.push(rem);
            }
        }
        i += 1;
    }
    basis
}

#[test]
fn non_groebner_pair_is_detected() {
    // {y1*y2 - 1, y1^2 - y2}: S-remainder y2^2 - y1
    let f = vec![
        poly(2, &[(&[1, 1], r(1, 1)), (&[0, 0], r(-1, 1))]),
        poly(2, &[(&[2, 0], r(1, 1)), (&[0, 1], r(-1, 1))]),
    ];
    let rep = buchberger_verify(&f, GLEX).unwrap();
    assert!(!rep.is_groebner);
    let witness = rep.witness_remainder.unwrap();
    let expected = poly(2, &[(&[0, 2], r(1, 1)), (&[1, 0], r(-1, 1))]);
    assert!(witness == expected || witness == expected.negated(), "{witness}");

    let completed = complete(f.clone());
    assert!(completed.len() > f.len());
    assert!(buchberger_verify(&completed, GLEX).unwrap().is_groebner);
}

#[test]
fn hand_division() {
    // y1^3 = y1*(y1^2 - y2) + y1*y2
    let g = poly(2, &[(&[3, 0], r(1, 1))]);
    let f = poly(2, &[(&[2, 0], r(1, 1)), (&[0, 1], r(-1, 1))]);
    let res = divide_multivariate(&g, std::slice::from_ref(&f), GLEX).unwrap();
    assert_eq!(res.quotients[0], poly(2, &[(&[1, 0], r(1, 1))]));
    assert_eq!(res.remainder, poly(2, &[(&[1, 1], r(1, 1))]));
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<GaussRat> {
    (0..n)
        .map(|_| GaussRat::complex_ratio((rng.random_range(-9..=9), rng.random_range(1..=5)), (rng.random_range(-9..=9), rng.random_range(1..=5))))
        .collect()
}

#[test]
fn division_identity_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let comp = HenonComposition::from_parts(vec![
        (vec![r(1, 2), r(0, 1)], r(2, 3)),
        (vec![r(-1, 3), r(1, 1), r(0, 1)], r(-1, 4)),
        (vec![GaussRat::complex_ratio((0, 1), (1, 2)), r(0, 1)], r(5, 7)),
    ])
    .unwrap();
    let system = fixed_point_system(&comp);
    for _ in 0..20 {
        let mut g = Polynomial::zero(3);
        for _ in 0..6 {
            let e = Exponent::new((0..3).map(|_| rng.random_range(0..4)).collect());
            g = g.try_add(&Polynomial::term(e, r(rng.random_range(-5..=5), rng.random_range(1..=4)))).unwrap();
        }
        let res = divide_multivariate(&g, &system, GLEX).unwrap();
        for _ in 0..3 {
            let pt = random_point(&mut rng, 3);
            let mut rhs = res.remainder.evaluate_exact(&pt);
            for (a, phi) in res.quotients.iter().zip(&system) {
                rhs = rhs.plus(&a.evaluate_exact(&pt).times(&phi.evaluate_exact(&pt)));
            }
            assert_eq!(g.evaluate_exact(&pt), rhs);
        }
    }
}

#[test]
fn printed_two_factor_differential() {
    // M_2 = [[-δ1, p1'], [-δ1 p2', p1' p2' - δ2]]
    let comp = HenonComposition::from_parts(vec![(vec![r(1, 3), r(-2, 1), r(0, 1)], r(3, 5)), (vec![r(-1, 1), r(0, 1)], r(-7, 2))]).unwrap();
    let m = differential_symbolic(&comp);
    let f = comp.factors();
    let (d1, d2) = (f[0].delta().clone(), f[1].delta().clone());
    let p1 = f[0].p_prime_poly(2, 0);
    let p2 = f[1].p_prime_poly(2, 1);
    assert_eq!(m.m11, Polynomial::constant(2, d1.negated()));
    assert_eq!(m.m12, p1);
    assert_eq!(m.m21, p2.scale(&d1.negated()));
    assert_eq!(m.m22, p1.try_mul(&p2).unwrap().try_sub(&Polynomial::constant(2, d2)).unwrap());
}

#[test]
fn one_factor_system_text() {
    let comp = HenonComposition::pure_powers(&[2], &[r(1, 2)]).unwrap();
    assert_eq!(fixed_point_system(&comp)[0].to_string(), "y1^2 - 3/2*y1");
}

#[test]
fn multiplier_leading_term() {
    let comp = HenonComposition::pure_powers(&[2, 3, 2], &[r(1, 2), r(-1, 3), r(2, 5)]).unwrap();
    let lambda = GaussRat::from_i64(12);
    let phi = multiplier_polynomial(&comp, &lambda);
    let (lm, lc) = phi.leading(GLEX).unwrap();
    assert_eq!(lm, Exponent::new(vec![1, 2, 1]));
    assert_eq!(lc, GaussRat::from_i64(-12 * 12));
    assert_eq!(expected_multiplier_leading(&comp, &lambda), (lm, lc));
}

#[test]
fn three_squares_normal_forms() {
    let (d1, d2, d3) = (r(1, 2), r(-2, 3), r(3, 7));
    let comp = HenonComposition::pure_powers(&[2, 2, 2], &[d1.clone(), d2.clone(), d3.clone()]).unwrap();
    let never = CancelToken::never();
    assert!(verify_groebner_system(&comp, &never).unwrap().is_groebner);
    for lambda in [GaussRat::from_i64(8), r(5, 3), GaussRat::complex_ratio((1, 1), (-2, 1))] {
        let delta = d1.times(&d2).times(&d3);
        // Φ has no reducible monomial: normal form is Φ itself
        let rep = phi_membership(&comp, &lambda, &never).unwrap();
        assert_eq!(rep.remainder, multiplier_polynomial(&comp, &lambda));
        assert!(!rep.is_member);

        let rep = shifted_phi_membership(&comp, &lambda, &GaussRat::zero(), &never).unwrap();
        let l = |c: GaussRat| lambda.times(&c);
        let linear = lambda.times(&lambda).plus(&delta).minus(&l(GaussRat::from_i64(8))).minus(&l(GaussRat::from_i64(8).times(&delta)));
        let six = GaussRat::from_i64(-6);
        let expected = poly(
            3,
            &[
                (&[1, 1, 0], l(six.times(&d1))),
                (&[1, 0, 1], l(six.times(&d2))),
                (&[1, 0, 0], linear),
                (&[0, 1, 0], l(six.times(&d3))),
                (&[0, 0, 1], l(six.times(&d1).times(&d3))),
            ],
        );
        assert_eq!(rep.remainder, expected, "lambda = {lambda}");
        assert!(!rep.is_member);
    }
}

#[test]
fn products_of_system_are_members() {
    let comp = HenonComposition::pure_powers(&[2, 3], &[r(1, 2), r(4, 3)]).unwrap();
    let sys = fixed_point_system(&comp);
    let target = sys[0]
        .try_mul(&poly(2, &[(&[2, 1], r(3, 1)), (&[0, 0], r(-1, 2))]))
        .unwrap()
        .try_add(&sys[1].try_mul(&poly(2, &[(&[0, 4], r(1, 1))])).unwrap())
        .unwrap();
    assert!(membership(&comp, &target, &CancelToken::never()).unwrap().is_member);
}
