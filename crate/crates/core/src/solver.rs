//! Enumeration of all fixed points through the quotient ring
//! `C[y_1, …, y_n] / ⟨φ_1, …, φ_n⟩`.
//!
//! The leading monomials `y_i^{d_i}` of the Gröbner basis leave the box of
//! monomials `y^a` with `0 ≤ a_i < d_i` as a vector-space basis of the
//! quotient, so its dimension is `d = d_1⋯d_n`. Multiplication by `y_i` is a
//! `d × d` matrix on that basis; the fixed points are the joint eigenvalues.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::model::{differential_numeric, fixed_point_system, HenonComposition, Point};
use crate::poly::{divide_multivariate, Coeff, Exponent, MonomialOrder, PolyError};

/// Band around the unit circle treated as neutral when classifying.
pub const NEUTRAL_BAND: f64 = 1e-6;

const MAX_ATTEMPTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("eigenvalue extraction failed after {attempts} random combinations (worst residual {worst_residual:.3e}, tolerance {tolerance:.1e})")]
    IllConditioned {
        attempts: usize,
        worst_residual: f64,
        tolerance: f64,
    },
}

/// Standard monomials `y^a`, `0 ≤ a_i ≤ d_i - 1`, in increasing graded-lex
/// order.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientBasis {
    pub monomials: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
}

impl QuotientBasis {
    pub fn dimension(&self) -> usize {
        self.monomials.len()
    }

    pub fn position(&self, e: &Exponent) -> Option<usize> {
        self.index.get(e).copied()
    }
}

pub fn quotient_basis<C: Coeff>(comp: &HenonComposition<C>) -> QuotientBasis {
    let degrees = comp.degrees();
    let mut monomials = vec![Exponent::new(vec![])];
    for &d in &degrees {
        monomials = monomials
            .into_iter()
            .flat_map(|e| {
                (0..d as u32).map(move |a| {
                    let mut v = e.as_slice().to_vec();
                    v.push(a);
                    Exponent::new(v)
                })
            })
            .collect();
    }
    monomials.sort();
    let index = monomials.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    QuotientBasis { monomials, index }
}

/// Matrix of multiplication by `y_{var+1}` on the quotient ring: column `c`
/// holds the normal form of `y_var · basis[c]`.
pub fn multiplication_matrix<C: Coeff>(comp: &HenonComposition<C>, basis: &QuotientBasis, var: usize) -> Result<DMatrix<Complex64>, SolveError> {
    let system = fixed_point_system(comp);
    multiplication_matrix_with(&system, basis, var)
}

fn multiplication_matrix_with<C: Coeff>(
    system: &[crate::poly::Polynomial<C>],
    basis: &QuotientBasis,
    var: usize,
) -> Result<DMatrix<Complex64>, SolveError> {
    let dim = basis.dimension();
    let n = system.len();
    let shift = Exponent::var_power(n, var, 1);
    let mut m = DMatrix::zeros(dim, dim);
    for (col, mono) in basis.monomials.iter().enumerate() {
        let product = crate::poly::Polynomial::term(mono.mul(&shift), C::one());
        let nf = divide_multivariate(&product, system, MonomialOrder::GradedLex)?.remainder;
        for (e, c) in nf.terms() {
            let row = basis.position(e).expect("normal forms lie in the standard basis");
            m[(row, col)] = c.to_complex();
        }
    }
    Ok(m)
}

/// Multiplication matrices for every variable.
pub fn multiplication_matrices<C: Coeff>(comp: &HenonComposition<C>) -> Result<(QuotientBasis, Vec<DMatrix<Complex64>>), SolveError> {
    let basis = quotient_basis(comp);
    let system = fixed_point_system(comp);
    let mats = (0..comp.len())
        .map(|i| multiplication_matrix_with(&system, &basis, i))
        .collect::<Result<_, _>>()?;
    Ok((basis, mats))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Saddle,
    Attracting,
    Repelling,
    SemiNeutral,
    Indeterminate,
}

/// Classify by the moduli of the multipliers with a neutral band `eps`.
pub fn classify_multipliers(alpha: Complex64, beta: Complex64, eps: f64) -> Classification {
    let (a, b) = (alpha.norm(), beta.norm());
    if !a.is_finite() || !b.is_finite() {
        return Classification::Indeterminate;
    }
    if (a - 1.0).abs() <= eps || (b - 1.0).abs() <= eps {
        return Classification::SemiNeutral;
    }
    let (small, large) = if a <= b { (a, b) } else { (b, a) };
    match (small < 1.0, large < 1.0) {
        (true, true) => Classification::Attracting,
        (false, false) => Classification::Repelling,
        _ => Classification::Saddle,
    }
}

/// Eigenvalues of a 2×2 matrix, ordered `|α| ≤ |β|`.
pub fn multipliers_of(m: &Matrix2<Complex64>) -> (Complex64, Complex64) {
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m.determinant();
    let disc = (tr * tr - det * 4.0).sqrt();
    // pick the sign that avoids cancellation, then use the product for the other
    let big = if (tr + disc).norm() >= (tr - disc).norm() {
        (tr + disc) / 2.0
    } else {
        (tr - disc) / 2.0
    };
    let small = if big.norm() > 0.0 { det / big } else { Complex64::new(0.0, 0.0) };
    if small.norm() <= big.norm() {
        (small, big)
    } else {
        (big, small)
    }
}

/// A solved fixed point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointRecord {
    /// `(y_1, …, y_n)` along the cycle.
    #[serde(with = "crate::complex_serde::vec")]
    pub y_cycle: Vec<Complex64>,
    /// The fixed point `(x, y) = (y_n, y_1)` of the composition.
    #[serde(with = "crate::complex_serde::pair")]
    pub point: Point,
    /// `max_i |φ_i(ŷ)|`.
    pub residual: f64,
    pub multiplicity: usize,
    /// Multipliers `(α, β)` with `|α| ≤ |β|`.
    #[serde(with = "crate::complex_serde::pair")]
    pub multipliers: [Complex64; 2],
    pub classification: Classification,
    /// `β ≈ d` and `α ≈ δ/d`: the multiplier profile forced on fixed points
    /// of a smooth forward Julia set.
    pub degree_profile: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Residual bound every returned point must satisfy after polishing.
    pub tolerance: f64,
    /// Points closer than this (max-norm on the cycle) form one cluster.
    pub cluster_radius: f64,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerance: 1e-8,
            cluster_radius: 1e-6,
            seed: 0x5eed,
        }
    }
}

fn residuals(comp: &HenonComposition<Complex64>, y: &[Complex64]) -> DVector<Complex64> {
    let n = y.len();
    DVector::from_iterator(
        n,
        comp.factors().iter().enumerate().map(|(i, f)| {
            f.eval_p(y[i]) - y[(i + 1) % n] - *f.delta() * y[(i + n - 1) % n]
        }),
    )
}

fn max_residual(comp: &HenonComposition<Complex64>, y: &[Complex64]) -> f64 {
    residuals(comp, y).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Newton iterations on the full system; a step is kept only if it lowers
/// the residual.
fn newton_polish(comp: &HenonComposition<Complex64>, y: &mut [Complex64], steps: usize) {
    let n = y.len();
    let mut best = max_residual(comp, y);
    for _ in 0..steps {
        if best == 0.0 {
            return;
        }
        let mut jac = DMatrix::<Complex64>::zeros(n, n);
        for (i, f) in comp.factors().iter().enumerate() {
            jac[(i, i)] += f.eval_p_prime(y[i]);
            jac[(i, (i + 1) % n)] -= Complex64::new(1.0, 0.0);
            jac[(i, (i + n - 1) % n)] -= *f.delta();
        }
        let rhs = residuals(comp, y);
        let Some(step) = jac.lu().solve(&rhs) else {
            return;
        };
        let candidate: Vec<Complex64> = y.iter().zip(step.iter()).map(|(a, s)| a - s).collect();
        let res = max_residual(comp, &candidate);
        if !(res < best) {
            return;
        }
        best = res;
        y.copy_from_slice(&candidate);
    }
}

/// Eigenvector of `t` for the eigenvalue `mu` by inverse iteration.
fn eigenvector(t: &DMatrix<Complex64>, mu: Complex64) -> Option<DVector<Complex64>> {
    let dim = t.nrows();
    let scale = 1.0 + mu.norm();
    let shifted_mu = mu + Complex64::new(1e-11 * scale, 1e-11 * scale);
    let shifted = t - DMatrix::<Complex64>::identity(dim, dim) * shifted_mu;
    let lu = shifted.lu();
    let mut x = DVector::from_iterator(dim, (0..dim).map(|k| Complex64::new(1.0, 0.1 * k as f64)));
    for _ in 0..3 {
        x = lu.solve(&x)?;
        let norm = x.norm();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        x /= Complex64::new(norm, 0.0);
    }
    Some(x)
}

/// `x^H M^T x / x^H x`.
fn rayleigh(mt: &DMatrix<Complex64>, x: &DVector<Complex64>) -> Complex64 {
    let mx = mt * x;
    x.dotc(&mx) / x.dotc(x)
}

fn union_find_groups(count: usize, linked: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..count {
        for j in i + 1..count {
            if linked(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..count {
        let root = find(&mut parent, i);
        let g = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

fn max_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// One attempt: eigen-decompose a random combination and read coordinates.
fn extract_points(
    comp: &HenonComposition<Complex64>,
    transposed: &[DMatrix<Complex64>],
    weights: &[f64],
) -> Option<Vec<Vec<Complex64>>> {
    let dim = transposed[0].nrows();
    let mut combo = DMatrix::<Complex64>::zeros(dim, dim);
    for (m, &w) in transposed.iter().zip(weights) {
        combo += m * Complex64::new(w, 0.0);
    }
    let eigenvalues = combo.clone().try_schur(1e-15, 10_000)?.eigenvalues()?;
    let mut points = Vec::with_capacity(dim);
    for &mu in eigenvalues.iter() {
        let x = eigenvector(&combo, mu)?;
        let mut y: Vec<Complex64> = transposed.iter().map(|mt| rayleigh(mt, &x)).collect();
        newton_polish(comp, &mut y, 8);
        points.push(y);
    }
    Some(points)
}

/// All fixed points of the composition with multiplicities, multipliers and
/// classification. Deterministic for a given seed.
pub fn solve_fixed_points<C: Coeff>(comp: &HenonComposition<C>, opts: &SolveOptions) -> Result<Vec<FixedPointRecord>, SolveError> {
    let (_, mats) = multiplication_matrices(comp)?;
    let fcomp = comp.to_float();
    let transposed: Vec<DMatrix<Complex64>> = mats.iter().map(|m| m.transpose()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = f64::INFINITY;
    for _ in 0..MAX_ATTEMPTS {
        let weights: Vec<f64> = (0..transposed.len()).map(|_| rng.random_range(0.5..1.5)).collect();
        let Some(points) = extract_points(&fcomp, &transposed, &weights) else {
            continue;
        };
        let attempt_worst = points.iter().map(|y| max_residual(&fcomp, y)).fold(0.0, f64::max);
        if !(attempt_worst <= opts.tolerance) {
            worst = worst.min(attempt_worst);
            continue;
        }
        return Ok(build_records(&fcomp, points, opts));
    }
    Err(SolveError::IllConditioned {
        attempts: MAX_ATTEMPTS,
        worst_residual: worst,
        tolerance: opts.tolerance,
    })
}

fn build_records(comp: &HenonComposition<Complex64>, points: Vec<Vec<Complex64>>, opts: &SolveOptions) -> Vec<FixedPointRecord> {
    let groups = union_find_groups(points.len(), |i, j| max_dist(&points[i], &points[j]) <= opts.cluster_radius);
    let n = comp.len();
    let mut records: Vec<FixedPointRecord> = groups
        .iter()
        .map(|members| {
            let rep = members
                .iter()
                .map(|&k| (k, max_residual(comp, &points[k])))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(k, _)| k)
                .expect("groups are nonempty");
            let y = points[rep].clone();
            let residual = max_residual(comp, &y);
            let (alpha, beta) = multipliers_of(&differential_numeric(comp, &y));
            FixedPointRecord {
                point: [y[n - 1], y[0]],
                residual,
                multiplicity: members.len(),
                multipliers: [alpha, beta],
                classification: classify_multipliers(alpha, beta, NEUTRAL_BAND),
                degree_profile: degree_profile(comp, alpha, beta),
                y_cycle: y,
            }
        })
        .collect();
    records.sort_by(|a, b| {
        a.y_cycle
            .iter()
            .zip(&b.y_cycle)
            .map(|(p, q)| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    records
}

fn degree_profile<C: Coeff>(comp: &HenonComposition<C>, alpha: Complex64, beta: Complex64) -> bool {
    let d = comp.degree() as f64;
    let delta = comp.jacobian().to_complex();
    let close = |z: Complex64, w: Complex64| (z - w).norm() <= 1e-6 * w.norm().max(1.0);
    close(beta, Complex64::new(d, 0.0)) && close(alpha, delta / d)
}

/// Classification of a solved record under the composition's band.
pub fn classify_fixed_point<C: Coeff>(comp: &HenonComposition<C>, record: &FixedPointRecord) -> (Classification, bool) {
    let [alpha, beta] = record.multipliers;
    (classify_multipliers(alpha, beta, NEUTRAL_BAND), degree_profile(comp, alpha, beta))
}

/// Outcome of grouping fixed points by multiplier pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupingReport {
    pub applicable: bool,
    /// Why the check does not apply, when it does not.
    pub reason: Option<String>,
    pub degree: u64,
    pub fixed_points: usize,
    /// Sizes of the multiplier groups, largest first.
    pub group_sizes: Vec<usize>,
    pub largest_group: usize,
    /// Largest allowed group, `d - 2`.
    pub bound: u64,
    pub violation: bool,
    pub semi_neutral_excluded: usize,
    pub warnings: Vec<String>,
}

/// Group fixed points whose multiplier pairs agree within `tolerance`
/// (transitively). Returns index groups.
pub fn group_by_multipliers(records: &[FixedPointRecord], tolerance: f64) -> Vec<Vec<usize>> {
    union_find_groups(records.len(), |i, j| {
        let [a1, b1] = records[i].multipliers;
        let [a2, b2] = records[j].multipliers;
        (a1 - a2).norm() <= tolerance && (b1 - b2).norm() <= tolerance
    })
}

/// Check that no `d - 1` of the `d` distinct fixed points share a multiplier
/// pair. Semi-neutral points are left out of the grouping.
pub fn check_multiplier_grouping<C: Coeff>(
    comp: &HenonComposition<C>,
    records: &[FixedPointRecord],
    multiplier_tolerance: f64,
) -> GroupingReport {
    let d = comp.degree();
    let mut report = GroupingReport {
        applicable: false,
        reason: None,
        degree: d,
        fixed_points: records.len(),
        group_sizes: Vec::new(),
        largest_group: 0,
        bound: d.saturating_sub(2),
        violation: false,
        semi_neutral_excluded: 0,
        warnings: Vec::new(),
    };
    let jac = comp.jacobian().to_complex().norm();
    if comp.len() < 3 {
        report.reason = Some(format!("needs at least 3 factors, got {}", comp.len()));
        return report;
    }
    if !(jac < 1.0) {
        report.reason = Some(format!("|delta| = {jac} is not below 1"));
        return report;
    }
    if records.len() as u64 != d || records.iter().any(|r| r.multiplicity != 1) {
        report.reason = Some("non-distinct spectrum: some fixed points are multiple".into());
        return report;
    }
    let kept: Vec<FixedPointRecord> = records
        .iter()
        .filter(|r| r.classification != Classification::SemiNeutral)
        .cloned()
        .collect();
    report.semi_neutral_excluded = records.len() - kept.len();
    if report.semi_neutral_excluded > 0 {
        report.warnings.push(format!(
            "{} semi-neutral fixed point(s) excluded from grouping",
            report.semi_neutral_excluded
        ));
    }
    let mut sizes: Vec<usize> = group_by_multipliers(&kept, multiplier_tolerance).iter().map(Vec::len).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    report.applicable = true;
    report.largest_group = sizes.first().copied().unwrap_or(0);
    report.violation = report.largest_group as u64 > report.bound;
    report.group_sizes = sizes;
    report
}

/// Solve and run [`check_multiplier_grouping`] in one call.
pub fn scan_multiplier_grouping<C: Coeff>(
    comp: &HenonComposition<C>,
    opts: &SolveOptions,
    multiplier_tolerance: f64,
) -> Result<(Vec<FixedPointRecord>, GroupingReport), SolveError> {
    let records = solve_fixed_points(comp, opts)?;
    let report = check_multiplier_grouping(comp, &records, multiplier_tolerance);
    Ok((records, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HenonFactor;
    use crate::poly::GaussRat;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn basis_dimensions() {
        let one = HenonComposition::pure_powers(&[2], &[GaussRat::one()]).unwrap();
        let b = quotient_basis(&one);
        assert_eq!(b.monomials, vec![Exponent::new(vec![0]), Exponent::new(vec![1])]);
        let three = HenonComposition::pure_powers(&[2, 2, 2], &[GaussRat::one(), GaussRat::one(), GaussRat::one()]).unwrap();
        assert_eq!(quotient_basis(&three).dimension(), 8);
        let two = HenonComposition::pure_powers(&[2, 3], &[GaussRat::one(), GaussRat::one()]).unwrap();
        let b = quotient_basis(&two);
        assert_eq!(b.dimension(), 6);
        assert!(b.monomials.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_factor_multiplication_matrix() {
        // y1^2 ≡ (1 + δ) y1 with δ = 1/2
        let comp = HenonComposition::pure_powers(&[2], &[GaussRat::ratio(1, 2)]).unwrap();
        let m = multiplication_matrix(&comp, &quotient_basis(&comp), 0).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(1.0), c(1.5)]));
    }

    #[test]
    fn single_factor_fixed_points() {
        let comp = HenonComposition::pure_powers(&[2], &[GaussRat::ratio(1, 2)]).unwrap();
        let recs = solve_fixed_points(&comp, &SolveOptions::default()).unwrap();
        assert_eq!(recs.len(), 2);
        assert!(recs[0].y_cycle[0].norm() < 1e-12);
        assert!((recs[1].y_cycle[0] - c(1.5)).norm() < 1e-12);
        assert_eq!(recs[1].point, [recs[1].y_cycle[0]; 2]);
        // λ² - 3λ + 1/2 = 0 at (3/2, 3/2)
        let s7 = 7f64.sqrt();
        let [a, b] = recs[1].multipliers;
        assert!((a - c((3.0 - s7) / 2.0)).norm() < 1e-12);
        assert!((b - c((3.0 + s7) / 2.0)).norm() < 1e-12);
        assert_eq!(recs[1].classification, Classification::Saddle);
    }

    #[test]
    fn classification_cases() {
        assert_eq!(classify_multipliers(c(0.17712), c(2.82288), NEUTRAL_BAND), Classification::Saddle);
        assert_eq!(classify_multipliers(c(0.3), c(0.9), NEUTRAL_BAND), Classification::Attracting);
        assert_eq!(classify_multipliers(c(1.3), c(-2.0), NEUTRAL_BAND), Classification::Repelling);
        assert_eq!(classify_multipliers(c(0.5), c(1.0 + 1e-8), NEUTRAL_BAND), Classification::SemiNeutral);
        assert_eq!(classify_multipliers(c(f64::NAN), c(2.0), NEUTRAL_BAND), Classification::Indeterminate);
    }

    #[test]
    fn degree_profile_flag() {
        let comp = HenonComposition::new(vec![
            HenonFactor::pure_power(2, c(0.5)).unwrap(),
            HenonFactor::pure_power(2, c(0.5)).unwrap(),
            HenonFactor::pure_power(2, c(0.5)).unwrap(),
        ])
        .unwrap();
        let d = 8.0;
        let delta = 0.125;
        assert!(degree_profile(&comp, c(delta / d), c(d)));
        assert_eq!(classify_multipliers(c(delta / d), c(d), NEUTRAL_BAND), Classification::Saddle);
        assert!(!degree_profile(&comp, c(0.3), c(2.0)));
    }

    #[test]
    fn multipliers_ordered() {
        let m = Matrix2::new(c(0.0), c(1.0), c(-0.5), c(3.0));
        let (a, b) = multipliers_of(&m);
        assert!(a.norm() <= b.norm());
        assert!((a * b - c(0.5)).norm() < 1e-14);
    }

    #[test]
    fn grouping_with_zero_tolerance() {
        let comp = HenonComposition::pure_powers(&[2, 2, 2], &[GaussRat::ratio(1, 2), GaussRat::ratio(1, 3), GaussRat::ratio(-1, 4)]).unwrap();
        let recs = solve_fixed_points(&comp, &SolveOptions::default()).unwrap();
        let groups = group_by_multipliers(&recs, 0.0);
        assert!(groups.iter().all(|g| g.len() == 1) || groups.len() < recs.len());
        let rep = check_multiplier_grouping(&comp, &recs, 1e-6);
        assert!(rep.applicable, "{rep:?}");
        assert!(!rep.violation);
    }

    #[test]
    fn too_few_factors_inapplicable() {
        let comp = HenonComposition::pure_powers(&[2], &[GaussRat::ratio(1, 2)]).unwrap();
        let recs = solve_fixed_points(&comp, &SolveOptions::default()).unwrap();
        let rep = check_multiplier_grouping(&comp, &recs, 1e-6);
        assert!(!rep.applicable);
        assert!(!rep.violation);
    }
}
