//! Random exact compositions for scans and property tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::model::HenonComposition;
use crate::poly::{Coeff, GaussRat};

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSpec {
    pub factors: usize,
    /// Degrees are drawn uniformly from this menu.
    pub degrees: Vec<usize>,
    /// Every `|δ_j|` stays strictly below this, so `|δ| < bound^n`.
    pub delta_bound: f64,
    /// Bound on `|Re|`, `|Im|` of the coefficients of `p_j`.
    pub coeff_bound: f64,
    /// Allow nonzero imaginary parts.
    pub gaussian: bool,
    /// Keep the `y^{d-1}` coefficient zero.
    pub normal_form: bool,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            factors: 3,
            degrees: vec![2],
            delta_bound: 0.9,
            coeff_bound: 1.0,
            gaussian: false,
            normal_form: true,
        }
    }
}

fn rational_below<R: Rng + ?Sized>(rng: &mut R, bound: f64) -> BigRational {
    let den: i64 = rng.random_range(64..=1024);
    let max = ((bound * den as f64).floor() as i64 - 1).max(0);
    let num = rng.random_range(-max..=max);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn scalar<R: Rng + ?Sized>(rng: &mut R, bound: f64, gaussian: bool) -> GaussRat {
    if gaussian {
        let b = bound / std::f64::consts::SQRT_2;
        GaussRat::new(rational_below(rng, b), rational_below(rng, b))
    } else {
        GaussRat::real(rational_below(rng, bound))
    }
}

/// One random composition; `δ_j` is redrawn until nonzero.
pub fn random_composition<R: Rng + ?Sized>(rng: &mut R, spec: &SampleSpec) -> HenonComposition<GaussRat> {
    assert!(spec.factors >= 1 && !spec.degrees.is_empty());
    let parts = (0..spec.factors)
        .map(|_| {
            let d = spec.degrees[rng.random_range(0..spec.degrees.len())];
            let mut coeffs: Vec<GaussRat> = (0..d).map(|_| scalar(rng, spec.coeff_bound, spec.gaussian)).collect();
            if spec.normal_form {
                coeffs[d - 1] = GaussRat::zero();
            }
            let delta = loop {
                let s = scalar(rng, spec.delta_bound, spec.gaussian);
                if !s.is_zero() {
                    break s;
                }
            };
            (coeffs, delta)
        })
        .collect();
    HenonComposition::from_parts(parts).expect("sampled factors are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = SampleSpec { gaussian: true, degrees: vec![2, 3], ..SampleSpec::default() };
        for _ in 0..50 {
            let comp = random_composition(&mut rng, &spec);
            assert_eq!(comp.len(), 3);
            for f in comp.factors() {
                let z = f.delta().to_complex().norm();
                assert!(z > 0.0 && z < 0.9);
                assert!(!f.has_subleading_term());
            }
        }
    }
}
