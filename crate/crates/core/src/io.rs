//! Text form documents and JSON encodings of forms and equivariant elements.
//!
//! Form document layout:
//!
//! ```text
//! # equihodge form v1
//! backend sphere N=4
//! degree 0
//! dimension 5
//! entries 1
//! 1 -1/1
//! ```
//!
//! Entries list nonzero coefficients as `index value`; values are exact
//! fractions `p/q` on exact backends and decimals on DEC.

use std::fmt::Write as _;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::backend::BackendSpec;
use crate::derham::{DeRhamBackend, HodgeEngine, InvariantForm};
use crate::equivariant::{Cartan, EquivariantElement, Monomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const FORM_HEADER: &str = "# equihodge form v1";

/// A parsed form document, not yet bound to a backend instance.
#[derive(Clone, Debug, PartialEq)]
pub struct FormDocument<S> {
    pub backend: BackendSpec,
    pub degree: i32,
    pub dimension: usize,
    pub entries: Vec<(usize, S)>,
}

impl<S: Scalar> FormDocument<S> {
    /// Binds the document to `backend`, which must have the same spec.
    pub fn into_form<B>(self, backend: &B) -> Result<InvariantForm<S>>
    where
        B: DeRhamBackend<Scalar = S> + ?Sized,
    {
        let spec = backend.spec();
        if spec != self.backend {
            return Err(Error::InvalidParameters(format!(
                "form was written for `{}`, backend is `{spec}`",
                self.backend
            )));
        }
        let mut coeffs = vec![S::zero(); self.dimension];
        for (i, v) in self.entries {
            coeffs[i] = v;
        }
        backend.form(self.degree, coeffs)
    }
}

pub fn serialize_form<B: DeRhamBackend + ?Sized>(backend: &B, form: &InvariantForm<B::Scalar>) -> Result<String> {
    backend.check_form(form)?;
    let entries: Vec<(usize, &B::Scalar)> = form
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, "{FORM_HEADER}");
    let _ = writeln!(out, "backend {}", backend.spec());
    let _ = writeln!(out, "degree {}", form.degree());
    let _ = writeln!(out, "dimension {}", form.coeffs().len());
    let _ = writeln!(out, "entries {}", entries.len());
    for (i, v) in entries {
        let _ = writeln!(out, "{i} {}", v.render());
    }
    Ok(out)
}

pub fn parse_form_document<S: Scalar>(text: &str) -> Result<FormDocument<S>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, message: String| Error::Parse { line, message };
    let mut last_line = 0;
    match lines.next() {
        Some((_, l)) if l == FORM_HEADER => {}
        Some((line, other)) => return Err(err(line, format!("expected header `{FORM_HEADER}`, got `{other}`"))),
        None => return Err(err(0, "empty form document".into())),
    }
    let mut field = |key: &str| -> Result<(usize, String)> {
        let (line, text) = lines
            .next()
            .ok_or_else(|| err(last_line + 1, format!("missing `{key}` line")))?;
        last_line = line;
        if key.is_empty() {
            return Ok((line, text.to_string()));
        }
        match text.split_once(' ') {
            Some((k, rest)) if k == key => Ok((line, rest.trim().to_string())),
            _ => Err(err(line, format!("expected `{key} ...`, got `{text}`"))),
        }
    };
    let (line, spec) = field("backend")?;
    let backend: BackendSpec = spec.parse().map_err(|e: Error| err(line, e.to_string()))?;
    let (line, degree) = field("degree")?;
    let degree: i32 = degree.parse().map_err(|_| err(line, format!("invalid degree `{degree}`")))?;
    let (line, dimension) = field("dimension")?;
    let dimension: usize = dimension
        .parse()
        .map_err(|_| err(line, format!("invalid dimension `{dimension}`")))?;
    let (line, count) = field("entries")?;
    let count: usize = count.parse().map_err(|_| err(line, format!("invalid entry count `{count}`")))?;
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, text) = field("")?;
        let (index, value) = text
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(line, format!("expected `index value`, got `{text}`")))?;
        let index: usize = index.parse().map_err(|_| err(line, format!("invalid index `{index}`")))?;
        if index >= dimension {
            return Err(err(line, format!("index {index} out of range for dimension {dimension}")));
        }
        if entries.iter().any(|(i, _)| *i == index) {
            return Err(err(line, format!("index {index} listed twice")));
        }
        let value = S::parse_text(value).map_err(|m| err(line, m))?;
        entries.push((index, value));
    }
    if let Some((line, _)) = lines.next() {
        return Err(err(line, "trailing content after the entries".into()));
    }
    Ok(FormDocument {
        backend,
        degree,
        dimension,
        entries,
    })
}

pub fn parse_form<B: DeRhamBackend + ?Sized>(backend: &B, text: &str) -> Result<InvariantForm<B::Scalar>> {
    parse_form_document(text)?.into_form(backend)
}

/// `{"degree": q, "entries": [[i, "p/q"], ...]}` with zero entries omitted.
pub fn form_to_json<S: Scalar>(form: &InvariantForm<S>) -> Value {
    let entries: Vec<Value> = form
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| json!([i, v.render()]))
        .collect();
    json!({ "degree": form.degree(), "entries": entries })
}

pub fn form_from_json<B: DeRhamBackend + ?Sized>(backend: &B, value: &Value) -> Result<InvariantForm<B::Scalar>> {
    let bad = |m: &str| Error::InvalidParameters(format!("malformed form record: {m}"));
    let degree = value["degree"].as_i64().ok_or_else(|| bad("missing degree"))? as i32;
    let mut coeffs = vec![B::Scalar::zero(); crate::derham::dimension_of(backend, degree)];
    for entry in value["entries"].as_array().ok_or_else(|| bad("missing entries"))? {
        let index = entry[0].as_u64().ok_or_else(|| bad("entry index"))? as usize;
        let text = entry[1].as_str().ok_or_else(|| bad("entry value"))?;
        let slot = coeffs.get_mut(index).ok_or_else(|| bad("entry index out of range"))?;
        *slot = B::Scalar::parse_text(text).map_err(|m| bad(&m))?;
    }
    backend.form(degree, coeffs)
}

/// `{"total_degree": d, "terms": [{"monomial": "t1*t2", "exponents": [...], "form": ...}]}`.
pub fn element_to_json<B: DeRhamBackend + ?Sized>(cartan: &Cartan<'_, B>, x: &EquivariantElement<B::Scalar>) -> Value {
    let gens = cartan.generators();
    let terms: Vec<Value> = x
        .terms()
        .map(|(mono, form)| {
            json!({
                "monomial": mono.display(gens).to_string(),
                "exponents": mono.exponents(),
                "form": form_to_json(form),
            })
        })
        .collect();
    json!({ "total_degree": x.total_degree(), "terms": terms })
}

pub fn element_from_json<B: DeRhamBackend + ?Sized>(
    cartan: &Cartan<'_, B>,
    value: &Value,
) -> Result<EquivariantElement<B::Scalar>> {
    let bad = |m: &str| Error::InvalidParameters(format!("malformed element record: {m}"));
    let total = value["total_degree"].as_i64().ok_or_else(|| bad("missing total_degree"))? as i32;
    let mut terms = Vec::new();
    for term in value["terms"].as_array().ok_or_else(|| bad("missing terms"))? {
        let exponents = term["exponents"]
            .as_array()
            .ok_or_else(|| bad("missing exponents"))?
            .iter()
            .map(|e| e.as_u64().map(|e| e as u32).ok_or_else(|| bad("exponent")))
            .collect::<Result<Vec<_>>>()?;
        let form = form_from_json(cartan.backend(), &term["form"])?;
        terms.push((Monomial::from_exponents(exponents), form));
    }
    cartan.element_from_terms(total, terms)
}
