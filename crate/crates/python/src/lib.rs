//! Python bindings.
//!
//! Exact backends exchange coefficients as fraction strings ("-1/2"; ints
//! are accepted on input), the DEC backend as floats.

use std::sync::Arc;

use equihodge::scenario::{self, ScenarioConfig, ScenarioOutput, PRESETS};
use equihodge::{
    BackendSpec, Cartan, DeRhamBackend, DecBackend, ExactBackend, ExtensionStatus, HodgeEngine, InvariantForm,
    Rational, Scalar,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[derive(Clone, IntoPyObject)]
enum Coeffs {
    Exact(Vec<String>),
    Dec(Vec<f64>),
}

trait PyScalar: Scalar {
    fn extract(obj: &Bound<'_, PyAny>) -> PyResult<Self>;
    fn export(values: &[Self]) -> Coeffs;
}

impl PyScalar for Rational {
    fn extract(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        if let Ok(n) = obj.extract::<i64>() {
            return Ok(Rational::from_i64(n));
        }
        let text: String = obj.extract()?;
        Rational::parse_text(&text).map_err(py_err)
    }

    fn export(values: &[Self]) -> Coeffs {
        Coeffs::Exact(values.iter().map(Scalar::render).collect())
    }
}

impl PyScalar for f64 {
    fn extract(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        obj.extract()
    }

    fn export(values: &[Self]) -> Coeffs {
        Coeffs::Dec(values.to_vec())
    }
}

fn to_form<B>(b: &B, degree: i32, coeffs: &[Bound<'_, PyAny>]) -> PyResult<InvariantForm<B::Scalar>>
where
    B: DeRhamBackend + ?Sized,
    B::Scalar: PyScalar,
{
    let values = coeffs.iter().map(|c| B::Scalar::extract(c)).collect::<PyResult<Vec<_>>>()?;
    b.form(degree, values).map_err(py_err)
}

fn export<S: PyScalar>(form: &InvariantForm<S>) -> Coeffs {
    S::export(form.coeffs())
}

fn extend_on<B>(b: &B, degree: i32, coeffs: &[Bound<'_, PyAny>]) -> PyResult<Extension>
where
    B: DeRhamBackend + ?Sized,
    B::Scalar: PyScalar,
{
    let alpha = to_form(b, degree, coeffs)?;
    let report = Cartan::new(b).extension_report(&alpha).map_err(py_err)?;
    let gens = b.generators();
    let terms = report
        .terms
        .iter()
        .map(|x| {
            x.terms()
                .map(|(mono, form)| (mono.display(gens).to_string(), form.degree(), export(form)))
                .collect()
        })
        .collect();
    Ok(Extension {
        status: match report.status {
            ExtensionStatus::Extended => "extended",
            ExtensionStatus::Obstructed => "obstructed",
        }
        .to_string(),
        terminated_at_stage: report.terminated_at_stage,
        stage_obstructions: report.stage_obstructions.iter().map(|n| n.value()).collect(),
        final_residual: report.final_residual.value(),
        terms,
    })
}

enum Built {
    Exact(ExactBackend),
    Dec(Arc<DecBackend>),
}

macro_rules! with_backend {
    ($self:expr, $b:ident => $body:expr) => {
        match &$self.built {
            Built::Exact(inner) => {
                let $b = inner.as_ref();
                $body
            }
            Built::Dec(inner) => {
                let $b = inner.as_ref();
                $body
            }
        }
    };
}

/// A de Rham model of invariant forms, built from a backend description
/// such as "sphere N=6" or "dec nsym=8 level=2".
#[pyclass(unsendable, module = "equihodge")]
struct Backend {
    spec: BackendSpec,
    built: Built,
}

#[pymethods]
impl Backend {
    #[new]
    #[pyo3(signature = (spec, tolerance=None))]
    fn new(spec: &str, tolerance: Option<f64>) -> PyResult<Self> {
        let spec: BackendSpec = spec.parse().map_err(py_err)?;
        let built = match &spec {
            BackendSpec::Dec { n_sym, level } => {
                let mut dec = DecBackend::sphere(*n_sym, *level).map_err(py_err)?;
                if let Some(t) = tolerance {
                    dec = dec.with_tolerance(t).map_err(py_err)?;
                }
                Built::Dec(Arc::new(dec))
            }
            _ => Built::Exact(spec.build_exact().map_err(py_err)?),
        };
        Ok(Self { spec, built })
    }

    #[getter]
    fn spec(&self) -> String {
        self.spec.to_string()
    }

    #[getter]
    fn exact(&self) -> bool {
        matches!(self.built, Built::Exact(_))
    }

    #[getter]
    fn manifold_dim(&self) -> usize {
        with_backend!(self, b => b.manifold_dim())
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        with_backend!(self, b => {
            let gens = b.generators();
            (0..gens.rank()).map(|j| gens.label(j).to_string()).collect()
        })
    }

    fn dimension(&self, degree: usize) -> usize {
        with_backend!(self, b => b.dimension(degree))
    }

    fn harmonic_dimension(&self, degree: usize) -> usize {
        with_backend!(self, b => b.harmonic_basis(degree).len())
    }

    fn d(&self, degree: i32, coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<Coeffs> {
        with_backend!(self, b => Ok(export(&b.d(&to_form(b, degree, &coeffs)?).map_err(py_err)?)))
    }

    fn codifferential(&self, degree: i32, coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<Coeffs> {
        with_backend!(self, b => Ok(export(&b.codifferential(&to_form(b, degree, &coeffs)?).map_err(py_err)?)))
    }

    fn laplacian(&self, degree: i32, coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<Coeffs> {
        with_backend!(self, b => Ok(export(&b.laplacian(&to_form(b, degree, &coeffs)?).map_err(py_err)?)))
    }

    fn green(&self, degree: i32, coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<Coeffs> {
        with_backend!(self, b => Ok(export(&b.green(&to_form(b, degree, &coeffs)?).map_err(py_err)?)))
    }

    /// L2 norm as a float.
    fn norm(&self, degree: i32, coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<f64> {
        with_backend!(self, b => Ok(b.norm(&to_form(b, degree, &coeffs)?).map_err(py_err)?.value()))
    }

    /// Dict with "harmonic", "exact" and "coexact" coefficient lists.
    fn hodge<'py>(&self, py: Python<'py>, degree: i32, coeffs: Vec<Bound<'py, PyAny>>) -> PyResult<Bound<'py, PyDict>> {
        let dict = PyDict::new(py);
        with_backend!(self, b => {
            let split = b.hodge_decompose(&to_form(b, degree, &coeffs)?).map_err(py_err)?;
            dict.set_item("harmonic", export(&split.harmonic))?;
            dict.set_item("exact", export(&split.exact))?;
            dict.set_item("coexact", export(&split.coexact))?;
        });
        Ok(dict)
    }

    fn extend(&self, degree: i32, coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<Extension> {
        with_backend!(self, b => extend_on(b, degree, &coeffs))
    }

    /// Moment map of an invariant 2-form.
    fn moment_map(&self, coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<Coeffs> {
        with_backend!(self, b => {
            let omega = to_form(b, 2, &coeffs)?;
            Ok(export(&Cartan::new(b).moment_map(&omega).map_err(py_err)?))
        })
    }

    fn serialize_form(&self, degree: i32, coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<String> {
        with_backend!(self, b => equihodge::io::serialize_form(b, &to_form(b, degree, &coeffs)?).map_err(py_err))
    }

    /// Returns `(degree, coefficients)`.
    fn parse_form(&self, text: &str) -> PyResult<(i32, Coeffs)> {
        with_backend!(self, b => {
            let form = equihodge::io::parse_form(b, text).map_err(py_err)?;
            Ok((form.degree(), export(&form)))
        })
    }

    /// Mesh document of a DEC backend.
    fn mesh_text(&self) -> PyResult<String> {
        match &self.built {
            Built::Dec(dec) => Ok(dec.mesh().to_text()),
            Built::Exact(_) => Err(PyValueError::new_err("exact backends have no mesh")),
        }
    }

    fn __repr__(&self) -> String {
        format!("Backend({:?})", self.spec.to_string())
    }
}

/// Outcome of `Backend.extend`; obstructions are reported, not raised.
/// Each entry of `terms` is one stage, given as `(monomial, form degree,
/// coefficients)` triples.
#[pyclass(module = "equihodge", get_all)]
struct Extension {
    status: String,
    terminated_at_stage: usize,
    stage_obstructions: Vec<f64>,
    final_residual: f64,
    terms: Vec<Vec<(String, i32, Coeffs)>>,
}

#[pymethods]
impl Extension {
    #[getter]
    fn extended(&self) -> bool {
        self.status == "extended"
    }

    fn __repr__(&self) -> String {
        format!(
            "Extension(status={:?}, stages={}, final_residual={:e})",
            self.status,
            self.terms.len(),
            self.final_residual
        )
    }
}

/// Table, JSONL records and success flag of a scenario.
#[pyclass(module = "equihodge", get_all)]
struct Report {
    table: String,
    records: Vec<String>,
    success: bool,
}

#[pymethods]
impl Report {
    fn jsonl(&self) -> String {
        self.records.iter().map(|r| format!("{r}\n")).collect()
    }
}

impl From<ScenarioOutput> for Report {
    fn from(out: ScenarioOutput) -> Self {
        Report {
            table: out.table,
            records: out.records.iter().map(ToString::to_string).collect(),
            success: out.success,
        }
    }
}

/// Runs a scenario described by a JSON configuration.
#[pyfunction]
fn run_scenario(config: &str) -> PyResult<Report> {
    let config: ScenarioConfig = serde_json::from_str(config).map_err(py_err)?;
    Ok(scenario::run_scenario(&config).map_err(py_err)?.into())
}

/// Recomputes the residual of an extend report in JSONL form.
#[pyfunction]
fn verify(jsonl: &str) -> PyResult<Report> {
    Ok(scenario::verify_report(jsonl).map_err(py_err)?.into())
}

#[pyfunction]
fn presets() -> Vec<(&'static str, &'static str)> {
    PRESETS.iter().map(|p| (p.name, p.description)).collect()
}

/// Rows `(level, triangles, residual, moment map error, extended)`.
#[pyfunction]
#[pyo3(signature = (n_sym=8, levels=vec![0, 1, 2, 3], tolerance=None))]
fn convergence(n_sym: usize, levels: Vec<usize>, tolerance: Option<f64>) -> PyResult<Vec<(usize, usize, f64, f64, bool)>> {
    let rows = scenario::convergence_study(n_sym, &levels, tolerance).map_err(py_err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.level, r.triangles, r.residual, r.moment_map_error, r.extended))
        .collect())
}

#[pymodule]
#[pyo3(name = "equihodge")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Backend>()?;
    m.add_class::<Extension>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(convergence, m)?)?;
    Ok(())
}
