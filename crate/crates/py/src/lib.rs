//! Python bindings. Reports come back as plain dicts with the same shape as
//! the `henon` CLI's `result` field.

use henon_core::dynamics::{self, EscapeOptions, SliceSpec};
use henon_core::ideal::{self, MembershipSummary};
use henon_core::input::{composition_to_json, parse_composition_exact};
use henon_core::model::{fixed_point_system, span_profile_check};
use henon_core::poly::{parse_rational, CancelToken};
use henon_core::solver::{self, SolveOptions};
use henon_core::{Coeff, ExactPoly, GaussRat, HenonComposition};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn invalid(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, value: &Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// `"re"` or `"re,im"`, each part an integer, fraction or decimal.
fn scalar(text: &str) -> PyResult<GaussRat> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [re] => Ok(GaussRat::real(parse_rational(re).map_err(invalid)?)),
        [re, im] => Ok(GaussRat::new(parse_rational(re).map_err(invalid)?, parse_rational(im).map_err(invalid)?)),
        _ => Err(invalid(format!("bad scalar {text:?}"))),
    }
}

fn escape_options(max_iterations: usize, tolerance: f64, escape_radius: Option<f64>) -> PyResult<EscapeOptions> {
    let opts = EscapeOptions {
        max_iterations,
        tolerance,
        escape_radius,
    };
    opts.validate().map_err(invalid)?;
    Ok(opts)
}

/// A composition `f_n ∘ … ∘ f_1` of generalized Hénon maps with exact
/// Gaussian-rational coefficients.
#[pyclass(frozen, module = "henon")]
struct Composition {
    inner: HenonComposition<GaussRat>,
}

#[pymethods]
impl Composition {
    /// Parse the JSON composition format.
    #[new]
    fn new(json_text: &str) -> PyResult<Self> {
        Ok(Composition {
            inner: parse_composition_exact(json_text).map_err(invalid)?,
        })
    }

    /// Build from `[(coeffs, delta), ...]` where `coeffs = [c_0, ..., c_{d-1}]`
    /// are the non-leading coefficients of the monic `p`, scalars as strings.
    #[staticmethod]
    fn from_parts(parts: Vec<(Vec<String>, String)>) -> PyResult<Self> {
        let parts = parts
            .iter()
            .map(|(cs, d)| Ok((cs.iter().map(|c| scalar(c)).collect::<PyResult<Vec<_>>>()?, scalar(d)?)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Composition {
            inner: HenonComposition::from_parts(parts).map_err(invalid)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Composition(factors={}, degree={})", self.inner.len(), self.inner.degree())
    }

    #[getter]
    fn degree(&self) -> u64 {
        self.inner.degree()
    }

    #[getter]
    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    #[getter]
    fn jacobian(&self) -> String {
        self.inner.jacobian().to_string()
    }

    fn warnings(&self) -> Vec<String> {
        self.inner.warnings()
    }

    /// Cyclic shift by `k` factors.
    fn rotate(&self, k: usize) -> PyResult<Self> {
        Ok(Composition {
            inner: self.inner.rotate(k).map_err(invalid)?,
        })
    }

    fn to_json(&self) -> String {
        composition_to_json(&self.inner).to_string()
    }

    /// Apply the composition (or its inverse) to `(x, y)`.
    #[pyo3(signature = (x, y, inverse = false))]
    fn evaluate(&self, x: Complex64, y: Complex64, inverse: bool) -> (Complex64, Complex64) {
        let f = self.inner.to_float();
        let [a, b] = if inverse { f.evaluate_inverse([x, y]) } else { f.evaluate([x, y]) };
        (a, b)
    }

    /// The fixed-point system as canonical polynomial text.
    fn system(&self) -> Vec<String> {
        fixed_point_system(&self.inner).iter().map(ToString::to_string).collect()
    }

    fn groebner(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let rep = ideal::verify_groebner_system(&self.inner, &CancelToken::never()).map_err(invalid)?;
        to_py(
            py,
            &json!({
                "is_groebner": rep.is_groebner,
                "pairs_checked": rep.pairs_checked,
                "failing_pair": rep.failing_pair.map(|(i, j)| [i + 1, j + 1]),
                "witness_remainder": rep.witness_remainder.map(|p| p.to_string()),
            }),
        )
    }

    /// Membership of the multiplier polynomial; `lam` defaults to the degree.
    #[pyo3(signature = (lam = None))]
    fn phi_membership(&self, py: Python<'_>, lam: Option<&str>) -> PyResult<Py<PyAny>> {
        let lam = self.lambda(lam)?;
        let rep = ideal::phi_membership(&self.inner, &lam, &CancelToken::never()).map_err(invalid)?;
        to_py(py, &json!(MembershipSummary::from(&rep)))
    }

    /// Membership of `(y_1 - alpha)` times the multiplier polynomial.
    #[pyo3(signature = (lam = None, alpha = "0"))]
    fn shifted_phi_membership(&self, py: Python<'_>, lam: Option<&str>, alpha: &str) -> PyResult<Py<PyAny>> {
        let lam = self.lambda(lam)?;
        let rep = ideal::shifted_phi_membership(&self.inner, &lam, &scalar(alpha)?, &CancelToken::never()).map_err(invalid)?;
        to_py(py, &json!(MembershipSummary::from(&rep)))
    }

    /// One-step division identity for index set `index_set` and `index`
    /// (both 1-based). `h` is random from `seed` unless `zero_h`.
    #[pyo3(signature = (index_set, index, alpha = "0", zero_h = false, seed = 0))]
    fn peel_identity(&self, py: Python<'_>, index_set: Vec<usize>, index: usize, alpha: &str, zero_h: bool, seed: u64) -> PyResult<Py<PyAny>> {
        let n = self.inner.len();
        if index == 0 || index_set.iter().chain([&index]).any(|&k| k == 0 || k > n) {
            return Err(invalid(format!("indices must lie in 1..={n}")));
        }
        let set: Vec<usize> = index_set.iter().map(|k| k - 1).collect();
        let h = if zero_h {
            ExactPoly::zero(n)
        } else {
            ideal::random_span_element(&mut ChaCha8Rng::seed_from_u64(seed), n, &set)
        };
        let rep = ideal::peel_identity_verify(&self.inner, &set, index - 1, &scalar(alpha)?, &h).map_err(invalid)?;
        let p = |poly: &ExactPoly| poly.to_text_with("P");
        to_py(
            py,
            &json!({
                "h": p(&h),
                "lhs": rep.lhs.to_string(),
                "a": rep.a.to_string(),
                "b": rep.b.to_string(),
                "difference": rep.difference.to_string(),
                "identity_holds": rep.identity_holds,
                "leading_match": rep.leading_match,
            }),
        )
    }

    #[pyo3(signature = (lam = None))]
    fn span_check(&self, py: Python<'_>, lam: Option<&str>) -> PyResult<Py<PyAny>> {
        let lam = self.lambda(lam)?;
        to_py(py, &json!(span_profile_check(&self.inner, &lam)))
    }

    #[pyo3(signature = (tolerance = 1e-8, cluster_radius = 1e-6, seed = 0x5eed))]
    fn fixed_points(&self, py: Python<'_>, tolerance: f64, cluster_radius: f64, seed: u64) -> PyResult<Py<PyAny>> {
        let opts = SolveOptions {
            tolerance,
            cluster_radius,
            seed,
        };
        let records = py
            .detach(|| solver::solve_fixed_points(&self.inner, &opts))
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        to_py(py, &json!(records))
    }

    /// Group fixed points by multiplier pair and compare with `d - 2`.
    #[pyo3(signature = (multiplier_tolerance = 1e-6, seed = 0x5eed))]
    fn multiplier_grouping(&self, py: Python<'_>, multiplier_tolerance: f64, seed: u64) -> PyResult<Py<PyAny>> {
        let opts = SolveOptions {
            seed,
            ..SolveOptions::default()
        };
        let (_, rep) = py
            .detach(|| solver::scan_multiplier_grouping(&self.inner, &opts, multiplier_tolerance))
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        to_py(py, &json!(rep))
    }

    #[pyo3(signature = (x, y, max_iterations = 200, tolerance = 1e-10, escape_radius = None))]
    fn green_plus(&self, py: Python<'_>, x: Complex64, y: Complex64, max_iterations: usize, tolerance: f64, escape_radius: Option<f64>) -> PyResult<Py<PyAny>> {
        let opts = escape_options(max_iterations, tolerance, escape_radius)?;
        to_py(py, &json!(dynamics::green_plus(&self.inner.to_float(), [x, y], &opts)))
    }

    #[pyo3(signature = (x, y, max_iterations = 200, tolerance = 1e-10, escape_radius = None))]
    fn green_minus(&self, py: Python<'_>, x: Complex64, y: Complex64, max_iterations: usize, tolerance: f64, escape_radius: Option<f64>) -> PyResult<Py<PyAny>> {
        let opts = escape_options(max_iterations, tolerance, escape_radius)?;
        to_py(py, &json!(dynamics::green_minus(&self.inner.to_float(), [x, y], &opts)))
    }

    fn filtration_radius(&self) -> f64 {
        dynamics::filtration_radius(&self.inner)
    }

    /// Raster of `G⁺` over the real `(Re x, Re y)` plane through `origin`.
    /// Returns `(width, height, values)` with values row-major, top row first.
    #[pyo3(signature = (origin, extent, resolution, max_iterations = 200, tolerance = 1e-10))]
    fn render(
        &self,
        py: Python<'_>,
        origin: (Complex64, Complex64),
        extent: [f64; 4],
        resolution: [usize; 2],
        max_iterations: usize,
        tolerance: f64,
    ) -> PyResult<(usize, usize, Vec<f64>)> {
        let opts = escape_options(max_iterations, tolerance, None)?;
        let slice = SliceSpec::real_plane([origin.0, origin.1], extent, resolution);
        slice.validate().map_err(invalid)?;
        let comp = self.inner.to_float();
        let raster = py.detach(|| dynamics::render_slice(&comp, &slice, &opts)).map_err(invalid)?;
        Ok((raster.width, raster.height, raster.values))
    }
}

impl Composition {
    fn lambda(&self, lam: Option<&str>) -> PyResult<GaussRat> {
        match lam {
            Some(text) => scalar(text),
            None => Ok(GaussRat::from_i64(self.inner.degree() as i64)),
        }
    }
}

#[pymodule]
fn henon(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Composition>()?;
    Ok(())
}
