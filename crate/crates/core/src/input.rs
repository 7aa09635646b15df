//! JSON composition files.
//!
//! ```json
//! {"factors": [
//!   {"degree": 2, "coefficients": ["-1/2", "0"], "delta": ["3/10", "0"]},
//!   {"degree": 3, "coefficients": [["1", "1/2"], "0", 0], "delta": [0.25, 0]}
//! ]}
//! ```
//!
//! `coefficients` lists `c_0 … c_{d-1}` of the monic `p`; the leading 1 is
//! implicit. A scalar is a string (`"num/den"` or a decimal literal) or a
//! JSON number; a complex value is a `[re, im]` pair of scalars. A bare
//! top-level array of factors is also accepted.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{HenonComposition, ModelError};
use crate::poly::{parse_rational, GaussRat, ParseRationalError};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("factor {factor}: degree is {degree} but {found} coefficients were given")]
    DegreeMismatch { factor: usize, degree: usize, found: usize },
    #[error("factor {factor}: {source}")]
    Number { factor: usize, source: ParseRationalError },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CompositionDoc {
    List(Vec<FactorDoc>),
    Object { factors: Vec<FactorDoc> },
}

#[derive(Deserialize, Serialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct FactorDoc {
    degree: usize,
    coefficients: Vec<ScalarDoc>,
    delta: ScalarDoc,
}

#[derive(Deserialize, Serialize, Clone, Debug)]
#[serde(untagged)]
enum ScalarDoc {
    Complex([RealDoc; 2]),
    Real(RealDoc),
}

#[derive(Deserialize, Serialize, Clone, Debug)]
#[serde(untagged)]
enum RealDoc {
    Text(String),
    Number(serde_json::Number),
}

impl RealDoc {
    fn text(&self) -> String {
        match self {
            RealDoc::Text(s) => s.clone(),
            RealDoc::Number(n) => n.to_string(),
        }
    }

    fn exact(&self) -> Result<num_rational::BigRational, ParseRationalError> {
        parse_rational(&self.text())
    }

    fn float(&self) -> Result<f64, ParseRationalError> {
        let text = self.text();
        if !text.contains('/') {
            if let Ok(v) = text.trim().parse::<f64>() {
                return Ok(v);
            }
        }
        let r = parse_rational(&text)?;
        Ok(r.to_f64().unwrap_or(f64::NAN))
    }
}

impl ScalarDoc {
    fn exact(&self) -> Result<GaussRat, ParseRationalError> {
        match self {
            ScalarDoc::Real(r) => Ok(GaussRat::real(r.exact()?)),
            ScalarDoc::Complex([re, im]) => Ok(GaussRat::new(re.exact()?, im.exact()?)),
        }
    }

    fn float(&self) -> Result<Complex64, ParseRationalError> {
        match self {
            ScalarDoc::Real(r) => Ok(Complex64::new(r.float()?, 0.0)),
            ScalarDoc::Complex([re, im]) => Ok(Complex64::new(re.float()?, im.float()?)),
        }
    }
}

fn parse_docs(text: &str) -> Result<Vec<FactorDoc>, InputError> {
    let doc: CompositionDoc = serde_json::from_str(text).map_err(|e| InputError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let factors = match doc {
        CompositionDoc::List(f) | CompositionDoc::Object { factors: f } => f,
    };
    for (i, f) in factors.iter().enumerate() {
        if f.degree != f.coefficients.len() {
            return Err(InputError::DegreeMismatch {
                factor: i + 1,
                degree: f.degree,
                found: f.coefficients.len(),
            });
        }
    }
    Ok(factors)
}

fn build<C: crate::poly::Coeff>(
    docs: Vec<FactorDoc>,
    conv: impl Fn(&ScalarDoc) -> Result<C, ParseRationalError>,
) -> Result<HenonComposition<C>, InputError> {
    let parts = docs
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let num = |source| InputError::Number { factor: i + 1, source };
            let coeffs = f.coefficients.iter().map(&conv).collect::<Result<Vec<_>, _>>().map_err(num)?;
            let delta = conv(&f.delta).map_err(num)?;
            Ok((coeffs, delta))
        })
        .collect::<Result<Vec<_>, InputError>>()?;
    Ok(HenonComposition::from_parts(parts)?)
}

/// Parse with exact coefficients; decimals are expanded literally.
pub fn parse_composition_exact(text: &str) -> Result<HenonComposition<GaussRat>, InputError> {
    build(parse_docs(text)?, ScalarDoc::exact)
}

/// Parse with floating coefficients; decimals are used as written.
pub fn parse_composition_float(text: &str) -> Result<HenonComposition<Complex64>, InputError> {
    build(parse_docs(text)?, ScalarDoc::float)
}

fn exact_doc(c: &GaussRat) -> ScalarDoc {
    let re = RealDoc::Text(GaussRat::real(c.re.clone()).to_string());
    if c.is_real() {
        ScalarDoc::Real(re)
    } else {
        ScalarDoc::Complex([re, RealDoc::Text(GaussRat::real(c.im.clone()).to_string())])
    }
}

/// Serialize an exact composition in the input format (object form).
pub fn composition_to_json(comp: &HenonComposition<GaussRat>) -> serde_json::Value {
    let factors: Vec<FactorDoc> = comp
        .factors()
        .iter()
        .map(|f| FactorDoc {
            degree: f.degree(),
            coefficients: f.coeffs().iter().map(exact_doc).collect(),
            delta: exact_doc(f.delta()),
        })
        .collect();
    serde_json::json!({ "factors": factors })
}
