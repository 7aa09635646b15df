use henon_core::dynamics::{
    backward_filtration_radius, filtration_radius, green_plus, in_k_plus, render_slice, EscapeOptions, SliceSpec,
};
use henon_core::model::HenonFactor;
use henon_core::sampling::{random_composition, SampleSpec};
use henon_core::solver::{solve_fixed_points, Classification, SolveOptions};
use henon_core::{GaussRat, HenonComposition};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn on_circle(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius, rng.random_range(0.0..std::f64::consts::TAU))
}

#[test]
fn escape_doubling_on_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let spec = SampleSpec {
        factors: 2,
        degrees: vec![2, 3, 4],
        delta_bound: 3.0,
        coeff_bound: 2.0,
        gaussian: true,
        normal_form: false,
    };
    for k in 0..100 {
        let comp = random_composition(&mut rng, &spec).to_float();
        let r_plus = filtration_radius(&comp);
        let r_minus = backward_filtration_radius(&comp);
        let samples = if k == 0 { 10_000 } else { 100 };
        for _ in 0..samples {
            let y = on_circle(&mut rng, r_plus);
            let s: f64 = rng.random_range(0.0..=1.0);
            let x = on_circle(&mut rng, r_plus * s);
            for f in comp.factors() {
                let [_, y1] = f.evaluate([x, y]);
                assert!(y1.norm() >= 2.0 * y.norm() * (1.0 - 1e-12));
            }
            let x = on_circle(&mut rng, r_minus);
            let s: f64 = rng.random_range(0.0..=1.0);
            let y = on_circle(&mut rng, r_minus * s);
            for f in comp.factors() {
                let [x1, _] = f.evaluate_inverse([x, y]);
                assert!(x1.norm() >= 2.0 * x.norm() * (1.0 - 1e-12));
            }
        }
    }
}

#[test]
fn quadratic_radius_value() {
    let comp = HenonComposition::new(vec![HenonFactor::pure_power(2, c(0.5)).unwrap()]).unwrap();
    assert_eq!(filtration_radius(&comp), 2.5);
    let far = in_k_plus(&comp, [c(0.0), c(25.0)], &EscapeOptions::default());
    assert!(!far.is_bounded());
}

#[test]
fn solved_points_are_fixed_and_bounded() {
    let comp = HenonComposition::pure_powers(&[2, 3], &[GaussRat::ratio(1, 3), GaussRat::ratio(-3, 4)]).unwrap();
    let recs = solve_fixed_points(&comp, &SolveOptions::default()).unwrap();
    assert_eq!(recs.iter().map(|r| r.multiplicity).sum::<usize>(), 6);
    let f = comp.to_float();
    let opts = EscapeOptions::default();
    for rec in &recs {
        let image = f.evaluate(rec.point);
        assert!((image[0] - rec.point[0]).norm() < 1e-9 && (image[1] - rec.point[1]).norm() < 1e-9);
        assert_eq!(green_plus(&f, rec.point, &opts).value, 0.0);
        let [a, b] = rec.multipliers;
        assert!((a * b - c(-0.25)).norm() < 1e-9);
    }
}

#[test]
fn green_grows_like_log_y() {
    let comp = HenonComposition::from_parts(vec![
        (vec![c(0.3), c(-0.2), c(0.0)], Complex64::new(0.5, 0.5)),
        (vec![c(-1.0), c(0.0)], c(0.8)),
    ])
    .unwrap();
    let opts = EscapeOptions::default();
    let y = Complex64::from_polar(1e8, 0.7);
    for x in [c(0.0), Complex64::from_polar(1e8, 2.0), c(-3e7)] {
        let g = green_plus(&comp, [x, y], &opts).value;
        let ratio = g / y.norm().ln();
        assert!((0.99..=1.01).contains(&ratio), "{ratio}");
    }
}

#[test]
fn render_resolution_doubling_shares_samples() {
    let comp = HenonComposition::new(vec![HenonFactor::new(vec![c(-0.9), c(0.0)], c(0.3)).unwrap()]).unwrap();
    let opts = EscapeOptions::default();
    let coarse = SliceSpec::real_plane([c(0.0), c(0.0)], [-2.0, 2.0, -1.5, 1.5], [16, 12]);
    let mut fine = coarse.clone();
    fine.resolution = [32, 24];
    let a = render_slice(&comp, &coarse, &opts).unwrap();
    let b = render_slice(&comp, &fine, &opts).unwrap();
    for j in 0..12 {
        for i in 0..16 {
            assert_eq!(a.get(i, j).to_bits(), b.get(2 * i, 2 * j).to_bits());
        }
    }
    assert_eq!(render_slice(&comp, &coarse, &opts).unwrap(), a);
}

#[test]
fn far_slice_has_no_zero_pixels() {
    let comp = HenonComposition::new(vec![HenonFactor::pure_power(2, c(0.5)).unwrap()]).unwrap();
    let r = filtration_radius(&comp);
    let one = c(1.0);
    let slice = SliceSpec {
        origin: [c(0.0), c(0.0)],
        axis_u: [c(0.0), one],
        axis_v: [c(0.0), Complex64::new(0.0, 1.0)],
        extent: [10.0 * r, 20.0 * r, -5.0, 5.0],
        resolution: [20, 10],
    };
    let raster = render_slice(&comp, &slice, &EscapeOptions::default()).unwrap();
    assert!(raster.values.iter().all(|&v| v > 0.0));
}

#[test]
fn saddle_pixel_is_black() {
    let comp = HenonComposition::pure_powers(&[2], &[GaussRat::ratio(1, 2)]).unwrap();
    let recs = solve_fixed_points(&comp, &SolveOptions::default()).unwrap();
    let saddle = recs.iter().find(|r| r.classification == Classification::Saddle).unwrap();
    let slice = SliceSpec::real_plane(saddle.point, [0.0, 1.0, -1.0, 0.0], [8, 8]);
    let f = comp.to_float();
    let raster = render_slice(&f, &slice, &EscapeOptions::default()).unwrap();
    assert_eq!(raster.get(0, 0), 0.0);
    assert_eq!(raster.to_pgm()[b"P5\n8 8\n255\n".len()], 0);
}

#[test]
fn sampled_three_factor_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let comp = random_composition(&mut rng, &SampleSpec::default());
        let recs = solve_fixed_points(&comp, &SolveOptions::default()).unwrap();
        assert_eq!(recs.iter().map(|r| r.multiplicity).sum::<usize>(), 8);
        assert!(recs.iter().all(|r| r.residual < 1e-8));
    }
}

#[test]
fn green_zero_iff_bounded_and_tail_contracts() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let opts = EscapeOptions::default();
    let spec = SampleSpec { factors: 2, degrees: vec![2, 3], delta_bound: 0.9, gaussian: true, ..SampleSpec::default() };
    let mut checked_ratios = 0;
    for _ in 0..5 {
        let comp = random_composition(&mut rng, &spec).to_float();
        let d = comp.degree() as f64;
        let r = filtration_radius(&comp);
        for _ in 0..400 {
            let q = [
                Complex64::new(rng.random_range(-r..r), rng.random_range(-r..r)),
                Complex64::new(rng.random_range(-r..r), rng.random_range(-r..r)),
            ];
            let g = green_plus(&comp, q, &opts);
            assert_eq!(g.value == 0.0, in_k_plus(&comp, q, &opts).is_bounded());
            assert_eq!(g.value == 0.0, g.escape.is_bounded());
            if let Some(ratio) = g.tail_ratio() {
                assert!(ratio < 2.0 / d, "ratio {ratio} at {q:?}: {:?}", g.increments);
                checked_ratios += 1;
            }
        }
    }
    assert!(checked_ratios > 0);
}
