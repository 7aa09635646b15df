//! Escape radius, forward/backward Green functions and raster slices of `G⁺`.
//!
//! The forward escape region is `V⁺ = {|y| ≥ max(|x|, R)}`. Each factor maps
//! it into itself and at least doubles `|y|`, so an orbit entering `V⁺` tends
//! to infinity and `V⁺` is disjoint from `K⁺`. Symmetrically
//! `V⁻ = {|x| ≥ max(|y|, R⁻)}` is backward-escaping.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{HenonComposition, HenonFactor, Point};
use crate::poly::Coeff;

/// Orbits whose max-norm passes this are not iterated further.
const NORM_CEILING: f64 = 1e100;
/// `‖f(q) - q‖ ≤ STAGNATION · max(1, ‖q‖)` is read as a fixed point.
const STAGNATION: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeOptions {
    /// Iterations of the full composition.
    pub max_iterations: usize,
    /// Stop once successive Green estimates differ by less than this.
    pub tolerance: f64,
    /// Escape threshold; values below the filtration radius are raised to it.
    pub escape_radius: Option<f64>,
}

impl Default for EscapeOptions {
    fn default() -> Self {
        EscapeOptions {
            max_iterations: 200,
            tolerance: 1e-10,
            escape_radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error("escape radius must be positive and finite, got {0}")]
    Radius(f64),
    #[error("invalid slice: {0}")]
    Slice(String),
}

impl EscapeOptions {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        if self.max_iterations == 0 {
            return Err(DynamicsError::NoIterations);
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(DynamicsError::Tolerance(self.tolerance));
        }
        match self.escape_radius {
            Some(r) if !(r > 0.0 && r.is_finite()) => Err(DynamicsError::Radius(r)),
            _ => Ok(()),
        }
    }
}

fn coeff_mass<C: Coeff>(f: &HenonFactor<C>) -> f64 {
    f.coeffs().iter().map(|c| c.to_complex().norm()).sum()
}

/// `R = max_j (2 + |δ_j| + Σ_k |c_{j,k}|)`. For `|y| ≥ max(|x|, R)` every
/// factor gives `|p_j(y) - δ_j x| ≥ 2|y|`.
pub fn filtration_radius<C: Coeff>(comp: &HenonComposition<C>) -> f64 {
    comp.factors()
        .iter()
        .map(|f| 2.0 + f.delta().to_complex().norm() + coeff_mass(f))
        .fold(0.0, f64::max)
}

/// `R⁻ = max_j max(2, 1 + Σ_k |c_{j,k}| + 2|δ_j|)`. For `|x| ≥ max(|y|, R⁻)`
/// every inverse factor gives `|(p_j(x) - y)/δ_j| ≥ 2|x|`.
pub fn backward_filtration_radius<C: Coeff>(comp: &HenonComposition<C>) -> f64 {
    comp.factors()
        .iter()
        .map(|f| (1.0 + coeff_mass(f) + 2.0 * f.delta().to_complex().norm()).max(2.0))
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Escape {
    /// No escape within the iteration budget. `fixed` marks an orbit that
    /// stopped moving (a fixed point up to rounding).
    Bounded { iterations: usize, fixed: bool },
    /// Entered the escape region (or overflowed) after `iteration`
    /// compositions.
    Escaped { iteration: usize },
}

impl Escape {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Escape::Bounded { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreenValue {
    pub value: f64,
    pub escape: Escape,
    /// Change of the estimate over each full composition after escape.
    pub increments: Vec<f64>,
}

impl GreenValue {
    /// Largest ratio of consecutive increments after the first one,
    /// ignoring increments already at rounding level. `None` when no pair
    /// qualifies.
    pub fn tail_ratio(&self) -> Option<f64> {
        self.increments
            .get(1..)?
            .windows(2)
            .filter(|w| w[0].abs() > 1e-13)
            .map(|w| (w[1] / w[0]).abs())
            .reduce(f64::max)
    }
}

fn norm(q: &Point) -> f64 {
    q[0].norm().max(q[1].norm())
}

fn finite(q: &Point) -> bool {
    q.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[derive(Clone, Copy, PartialEq)]
enum Direction {
    Forward,
    Backward,
}

struct Stepper<'a> {
    comp: &'a HenonComposition<Complex64>,
    dir: Direction,
    radius: f64,
}

impl Stepper<'_> {
    fn n(&self) -> usize {
        self.comp.len()
    }

    /// Factor applied at position `k` within one composition.
    fn factor(&self, k: usize) -> &HenonFactor<Complex64> {
        match self.dir {
            Direction::Forward => &self.comp.factors()[k],
            Direction::Backward => &self.comp.factors()[self.n() - 1 - k],
        }
    }

    fn apply(&self, k: usize, q: Point) -> Point {
        match self.dir {
            Direction::Forward => self.factor(k).evaluate(q),
            Direction::Backward => self.factor(k).evaluate_inverse(q),
        }
    }

    fn full(&self, q: Point) -> Point {
        (0..self.n()).fold(q, |p, k| self.apply(k, p))
    }

    fn in_region(&self, q: &Point) -> bool {
        let (lead, other) = match self.dir {
            Direction::Forward => (q[1].norm(), q[0].norm()),
            Direction::Backward => (q[0].norm(), q[1].norm()),
        };
        lead >= other.max(self.radius)
    }

    /// Asymptotic additive drift of `log ‖·‖` per factor: `0` forward (monic),
    /// `-log|δ|` backward.
    fn drift(&self, k: usize) -> f64 {
        match self.dir {
            Direction::Forward => 0.0,
            Direction::Backward => -self.factor(k).delta().norm().ln(),
        }
    }

    /// `Σ_{m ≥ 0} drift(k+m) / (d_{k} ⋯ d_{k+m})`: the part of the limit not
    /// yet visible in `log ‖q‖ / D` when the next factor is `k`.
    fn drift_tail(&self, k: usize) -> f64 {
        if self.dir == Direction::Forward {
            return 0.0;
        }
        let n = self.n();
        let d = self.comp.degree() as f64;
        let mut scale = 1.0;
        let mut period = 0.0;
        for m in 0..n {
            let idx = (k + m) % n;
            scale *= self.factor(idx).degree() as f64;
            period += self.drift(idx) / scale;
        }
        period / (1.0 - 1.0 / d)
    }

    fn escape(&self, q: Point, max_iterations: usize) -> (Escape, Point) {
        let mut q = q;
        for t in 0..max_iterations {
            if !finite(&q) || self.in_region(&q) {
                return (Escape::Escaped { iteration: t }, q);
            }
            let next = self.full(q);
            if finite(&next) && norm(&(next_minus(&next, &q))) <= STAGNATION * norm(&q).max(1.0) {
                return (Escape::Bounded { iterations: t + 1, fixed: true }, q);
            }
            q = next;
        }
        if !finite(&q) || self.in_region(&q) {
            return (Escape::Escaped { iteration: max_iterations }, q);
        }
        (Escape::Bounded { iterations: max_iterations, fixed: false }, q)
    }

    fn green(&self, q: Point, opts: &EscapeOptions) -> GreenValue {
        let (escape, mut q) = self.escape(q, opts.max_iterations);
        let Escape::Escaped { iteration } = escape else {
            return GreenValue { value: 0.0, escape, increments: Vec::new() };
        };
        let d = self.comp.degree() as f64;
        let mut denom = d.powi(iteration as i32);
        if !finite(&q) {
            return GreenValue { value: 0.0, escape, increments: Vec::new() };
        }
        let mut value = norm(&q).ln() / denom + self.drift_tail(0) / denom;
        let mut increments = Vec::new();
        let mut since_composition = 0.0;
        'outer: loop {
            for k in 0..self.n() {
                if norm(&q) > NORM_CEILING {
                    break 'outer;
                }
                let next = self.apply(k, q);
                let next_denom = denom * self.factor(k).degree() as f64;
                if !finite(&next) || !next_denom.is_finite() {
                    break 'outer;
                }
                let next_value = (norm(&next).ln() + self.drift_tail((k + 1) % self.n())) / next_denom;
                if !next_value.is_finite() {
                    break 'outer;
                }
                let inc = next_value - value;
                since_composition += inc;
                q = next;
                denom = next_denom;
                value = next_value;
                if k + 1 == self.n() {
                    increments.push(since_composition);
                    if since_composition.abs() < opts.tolerance {
                        break 'outer;
                    }
                    since_composition = 0.0;
                }
            }
        }
        GreenValue { value, escape, increments }
    }
}

fn next_minus(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn effective_radius(base: f64, opts: &EscapeOptions) -> f64 {
    opts.escape_radius.map_or(base, |r| r.max(base))
}

fn forward<'a>(comp: &'a HenonComposition<Complex64>, opts: &EscapeOptions) -> Stepper<'a> {
    Stepper {
        comp,
        dir: Direction::Forward,
        radius: effective_radius(filtration_radius(comp), opts),
    }
}

fn backward<'a>(comp: &'a HenonComposition<Complex64>, opts: &EscapeOptions) -> Stepper<'a> {
    Stepper {
        comp,
        dir: Direction::Backward,
        radius: effective_radius(backward_filtration_radius(comp), opts),
    }
}

/// Forward escape test.
pub fn in_k_plus(comp: &HenonComposition<Complex64>, point: Point, opts: &EscapeOptions) -> Escape {
    forward(comp, opts).escape(point, opts.max_iterations).0
}

/// Backward escape test.
pub fn in_k_minus(comp: &HenonComposition<Complex64>, point: Point, opts: &EscapeOptions) -> Escape {
    backward(comp, opts).escape(point, opts.max_iterations).0
}

/// `G⁺(q) = lim d^{-t} log⁺ ‖f^t(q)‖_∞`; zero exactly when [`in_k_plus`] is
/// bounded.
pub fn green_plus(comp: &HenonComposition<Complex64>, point: Point, opts: &EscapeOptions) -> GreenValue {
    forward(comp, opts).green(point, opts)
}

/// `G⁻(q) = lim d^{-t} log⁺ ‖f^{-t}(q)‖_∞`.
pub fn green_minus(comp: &HenonComposition<Complex64>, point: Point, opts: &EscapeOptions) -> GreenValue {
    backward(comp, opts).green(point, opts)
}

/// A real 2-plane `origin + u·axis_u + v·axis_v` in C² sampled on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceSpec {
    #[serde(with = "crate::complex_serde::pair")]
    pub origin: Point,
    #[serde(with = "crate::complex_serde::pair")]
    pub axis_u: Point,
    #[serde(with = "crate::complex_serde::pair")]
    pub axis_v: Point,
    /// `[u_min, u_max, v_min, v_max]`.
    pub extent: [f64; 4],
    /// `[width, height]` in pixels.
    pub resolution: [usize; 2],
}

impl SliceSpec {
    /// The `(x, y)`-real plane through `origin`.
    pub fn real_plane(origin: Point, extent: [f64; 4], resolution: [usize; 2]) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        SliceSpec {
            origin,
            axis_u: [one, zero],
            axis_v: [zero, one],
            extent,
            resolution,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let [w, h] = self.resolution;
        if w == 0 || h == 0 {
            return Err(DynamicsError::Slice(format!("resolution must be at least 1x1, got {w}x{h}")));
        }
        let [u0, u1, v0, v1] = self.extent;
        if !self.extent.iter().all(|x| x.is_finite()) || !(u0 < u1) || !(v0 < v1) {
            return Err(DynamicsError::Slice(format!("extent must be finite with min < max, got {:?}", self.extent)));
        }
        if !self.origin.iter().chain(&self.axis_u).chain(&self.axis_v).all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(DynamicsError::Slice("origin and axes must be finite".into()));
        }
        let real = |p: &Point| [p[0].re, p[0].im, p[1].re, p[1].im];
        let (a, b) = (real(&self.axis_u), real(&self.axis_v));
        let dot = |x: &[f64; 4], y: &[f64; 4]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
        let (aa, bb, ab) = (dot(&a, &a), dot(&b, &b), dot(&a, &b));
        if !(aa * bb - ab * ab > 1e-12 * aa.max(1e-300) * bb.max(1e-300)) || aa == 0.0 || bb == 0.0 {
            return Err(DynamicsError::Slice("axis vectors must be linearly independent over the reals".into()));
        }
        Ok(())
    }

    /// Sample coordinates of pixel `(i, j)`: its top-left corner, with `v`
    /// decreasing downwards.
    pub fn coordinates(&self, i: usize, j: usize) -> (f64, f64) {
        let [u0, u1, v0, v1] = self.extent;
        let [w, h] = self.resolution;
        let u = u0 + (i as f64 * (u1 - u0)) / w as f64;
        let v = v1 - (j as f64 * (v1 - v0)) / h as f64;
        (u, v)
    }

    pub fn point(&self, i: usize, j: usize) -> Point {
        let (u, v) = self.coordinates(i, j);
        [
            self.origin[0] + self.axis_u[0] * u + self.axis_v[0] * v,
            self.origin[1] + self.axis_u[1] * u + self.axis_v[1] * v,
        ]
    }
}

/// Row-major grid of `G⁺` values.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl Raster {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.width + i]
    }

    /// Binary 8-bit graymap: 0 is black, positive values are log-scaled into
    /// `1..=255`.
    pub fn to_pgm(&self) -> Vec<u8> {
        let vmax = self.values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        let denom = vmax.ln_1p();
        out.extend(self.values.iter().map(|&v| {
            if !(v > 0.0) {
                0u8
            } else if !v.is_finite() || denom <= 0.0 {
                255
            } else {
                (1.0 + (254.0 * v.ln_1p() / denom).round()).min(255.0) as u8
            }
        }));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in self.values.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}

/// `G⁺` on every pixel of the slice. Rows are evaluated in parallel; the
/// result does not depend on scheduling.
pub fn render_slice(comp: &HenonComposition<Complex64>, slice: &SliceSpec, opts: &EscapeOptions) -> Result<Raster, DynamicsError> {
    slice.validate()?;
    opts.validate()?;
    let [width, height] = slice.resolution;
    let mut values = vec![0.0; width * height];
    values.par_chunks_mut(width).enumerate().for_each(|(j, row)| {
        for (i, v) in row.iter_mut().enumerate() {
            *v = green_plus(comp, slice.point(i, j), opts).value;
        }
    });
    Ok(Raster { width, height, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn quad(delta: f64) -> HenonComposition<Complex64> {
        HenonComposition::new(vec![HenonFactor::pure_power(2, c(delta)).unwrap()]).unwrap()
    }

    #[test]
    fn radius_formula() {
        assert_eq!(filtration_radius(&quad(0.5)), 2.5);
        assert_eq!(backward_filtration_radius(&quad(0.5)), 2.0);
        assert!((filtration_radius(&quad(1e-8)) - 2.0).abs() < 1e-7);
    }

    #[test]
    fn fixed_point_is_bounded() {
        let comp = quad(0.5);
        let opts = EscapeOptions::default();
        let origin = [c(0.0), c(0.0)];
        assert!(in_k_plus(&comp, origin, &opts).is_bounded());
        assert_eq!(green_plus(&comp, origin, &opts).value, 0.0);
        let saddle = [c(1.5), c(1.5)];
        assert!(in_k_plus(&comp, saddle, &opts).is_bounded());
        assert!(in_k_minus(&comp, saddle, &opts).is_bounded());
    }

    #[test]
    fn far_point_escapes_immediately() {
        let comp = quad(0.5);
        let r = filtration_radius(&comp);
        let v = in_k_plus(&comp, [c(0.0), c(10.0 * r)], &EscapeOptions::default());
        assert_eq!(v, Escape::Escaped { iteration: 0 });
    }

    #[test]
    fn functional_equations() {
        let comp = HenonComposition::new(vec![
            HenonFactor::new(vec![c(-0.3), c(0.0)], Complex64::new(0.4, 0.2)).unwrap(),
            HenonFactor::new(vec![c(0.1), c(0.0), c(0.0)], c(-0.7)).unwrap(),
        ])
        .unwrap();
        let d = comp.degree() as f64;
        let opts = EscapeOptions::default();
        let q = [Complex64::new(0.3, -0.2), Complex64::new(1.7, 0.4)];
        let g = green_plus(&comp, q, &opts).value;
        let gf = green_plus(&comp, comp.evaluate(q), &opts).value;
        assert!(g > 0.0);
        assert!((gf - d * g).abs() < 1e-6, "{gf} vs {}", d * g);
        let p = [Complex64::new(3.1, 0.2), Complex64::new(0.2, -0.1)];
        let h = green_minus(&comp, p, &opts).value;
        let hf = green_minus(&comp, comp.evaluate(p), &opts).value;
        assert!(h > 0.0);
        assert!((hf - h / d).abs() < 1e-6, "{hf} vs {}", h / d);
    }

    #[test]
    fn slice_validation_and_corners() {
        let s = SliceSpec::real_plane([c(0.0), c(0.0)], [-2.0, 2.0, -2.0, 2.0], [4, 4]);
        s.validate().unwrap();
        assert_eq!(s.coordinates(0, 0), (-2.0, 2.0));
        assert_eq!(s.coordinates(2, 2), (0.0, 0.0));
        let mut bad = s.clone();
        bad.axis_v = [c(2.0), c(0.0)];
        assert!(bad.validate().is_err());
        bad = s.clone();
        bad.resolution = [0, 3];
        assert!(bad.validate().is_err());
    }

    #[test]
    fn pgm_layout() {
        let r = Raster { width: 2, height: 1, values: vec![0.0, 3.0] };
        let bytes = r.to_pgm();
        assert!(bytes.starts_with(b"P5\n2 1\n255\n"));
        assert_eq!(&bytes[bytes.len() - 2..], &[0, 255]);
        assert_eq!(r.to_csv(), "0,3\n");
    }
}
