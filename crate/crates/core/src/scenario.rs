//! Named scenarios and their reports.
//!
//! A scenario picks a backend, an input form and an operation, runs it, and
//! renders the result twice: a fixed-width table for people and a list of
//! JSON records (one per line when written out) for programs. Exact
//! backends produce byte-identical output across runs.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::backend::{BackendSpec, DecBackend, ExactBackend, ProductBackend, SphereBackend, TorusBackend};
use crate::derham::{DeRhamBackend, HodgeEngine, InvariantForm, Norm};
use crate::equivariant::{Cartan, ExtensionReport, ExtensionStatus};
use crate::error::Error;
use crate::io;
use crate::scalar::{q, Rational, Scalar};

/// Environment variable naming the default directory for machine-readable output.
pub const OUT_DIR_ENV: &str = "EQUIHODGE_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operation {
    Extend,
    Hodge,
    MomentMap,
    Convergence,
}

impl Operation {
    pub fn name(self) -> &'static str {
        match self {
            Operation::Extend => "extend",
            Operation::Hodge => "hodge",
            Operation::MomentMap => "moment-map",
            Operation::Convergence => "convergence",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    /// One of [`PRESETS`].
    Preset(String),
    /// Nonzero coefficients `(index, value)` of a form of the given degree.
    Inline { degree: i32, entries: Vec<(usize, String)> },
    /// Path to a form document.
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub operation: Operation,
    #[serde(default)]
    pub backend: Option<BackendSpec>,
    #[serde(default)]
    pub input: Option<InputSpec>,
    /// Overrides the truncation of the (preset or given) exact backend.
    #[serde(default)]
    pub truncation: Option<usize>,
    /// Zero threshold for the DEC backend.
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Refinement levels for a convergence study.
    #[serde(default)]
    pub levels: Option<Vec<usize>>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn new(operation: Operation) -> Self {
        Self {
            operation,
            backend: None,
            input: None,
            truncation: None,
            tolerance: None,
            levels: None,
            output: None,
        }
    }

    pub fn with_preset(mut self, name: &str) -> Self {
        self.input = Some(InputSpec::Preset(name.to_string()));
        self
    }

    /// Checks everything that can be checked without computing.
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::InvalidParameters(m));
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t >= 0.0) {
                return bad(format!("tolerance must be finite and non-negative, got {t}"));
            }
        }
        if self.truncation == Some(0) {
            return bad("truncation must be positive".into());
        }
        if let Some(InputSpec::Preset(name)) = &self.input {
            if preset(name).is_none() {
                let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
                return bad(format!("unknown preset `{name}` (known: {})", names.join(", ")));
            }
        }
        if matches!(self.input, Some(InputSpec::Inline { .. })) && self.backend.is_none() {
            return bad("inline input needs an explicit backend".into());
        }
        match self.operation {
            Operation::Convergence => {
                if !matches!(self.backend, None | Some(BackendSpec::Dec { .. })) {
                    return bad("convergence studies run on the dec backend".into());
                }
                if self.levels.as_ref().is_some_and(|l| l.is_empty()) {
                    return bad("convergence needs at least one level".into());
                }
            }
            _ => {
                if self.input.is_none() {
                    return bad(format!("`{}` needs an input form (preset, inline or file)", self.operation.name()));
                }
            }
        }
        Ok(())
    }
}

/// A scenario failure, carrying which scenario it was.
#[derive(Debug, thiserror::Error)]
#[error("{context}: {source}")]
pub struct ScenarioError {
    pub context: String,
    #[source]
    pub source: Error,
}

/// Rendered outcome of a scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioOutput {
    pub table: String,
    pub records: Vec<Value>,
    /// Extended, decomposed, or (for convergence) every level extended.
    pub success: bool,
}

impl ScenarioOutput {
    /// One JSON object per line.
    pub fn jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    default_backend: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "sphere/symplectic",
        description: "area form dz∧dφ on the round sphere",
        default_backend: "sphere N=4",
    },
    Preset {
        name: "sphere/height",
        description: "z dz∧dφ on the round sphere",
        default_backend: "sphere N=4",
    },
    Preset {
        name: "sphere/exact",
        description: "the exact 1-form d(z³) on the round sphere",
        default_backend: "sphere N=4",
    },
    Preset {
        name: "torus-free/volume",
        description: "dx∧dy on T² under the free rotation v = (1,0)",
        default_backend: "torus n=2 K=2 v=1,0",
    },
    Preset {
        name: "torus-free/dx",
        description: "dx on T² under the free rotation v = (1,0)",
        default_backend: "torus n=2 K=2 v=1,0",
    },
    Preset {
        name: "product/symplectic",
        description: "ω₁ + ω₂ on S²×S²",
        default_backend: "product(sphere N=3;sphere N=3)",
    },
    Preset {
        name: "product/volume",
        description: "ω₁∧ω₂ on S²×S²",
        default_backend: "product(sphere N=3;sphere N=3)",
    },
    Preset {
        name: "dec/volume",
        description: "discretized area form on a symmetric sphere mesh",
        default_backend: "dec nsym=8 level=2",
    },
];

pub fn preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// A backend with an input form on it.
pub enum Prepared {
    Exact {
        backend: ExactBackend,
        form: InvariantForm<Rational>,
    },
    Dec {
        backend: Arc<DecBackend>,
        form: InvariantForm<f64>,
    },
}

fn with_truncation(spec: &BackendSpec, truncation: Option<usize>) -> Result<BackendSpec, Error> {
    let Some(t) = truncation else {
        return Ok(spec.clone());
    };
    Ok(match spec {
        BackendSpec::Sphere { .. } => BackendSpec::Sphere { truncation: t },
        BackendSpec::Torus { dim, action, .. } => BackendSpec::Torus {
            dim: *dim,
            truncation: t,
            action: action.clone(),
        },
        BackendSpec::Product { first, second } => BackendSpec::Product {
            first: Box::new(with_truncation(first, truncation)?),
            second: Box::new(with_truncation(second, truncation)?),
        },
        BackendSpec::Dec { .. } => {
            return Err(Error::InvalidParameters(
                "the dec backend has no truncation; choose the level in --backend".into(),
            ))
        }
    })
}

fn build_dec(spec: &BackendSpec, tolerance: Option<f64>) -> Result<Arc<DecBackend>, Error> {
    let BackendSpec::Dec { n_sym, level } = spec else {
        return Err(Error::InvalidParameters(format!("`{spec}` is not a dec backend")));
    };
    let mut backend = DecBackend::sphere(*n_sym, *level)?;
    if let Some(t) = tolerance {
        backend = backend.with_tolerance(t)?;
    }
    Ok(Arc::new(backend))
}

fn build_any(spec: &BackendSpec, tolerance: Option<f64>) -> Result<AnyBackend, Error> {
    if spec.is_exact() {
        Ok(AnyBackend::Exact(spec.build_exact()?))
    } else {
        Ok(AnyBackend::Dec(build_dec(spec, tolerance)?))
    }
}

enum AnyBackend {
    Exact(ExactBackend),
    Dec(Arc<DecBackend>),
}

fn preset_mismatch(name: &str, spec: &BackendSpec) -> Error {
    Error::InvalidParameters(format!("preset `{name}` does not apply to backend `{spec}`"))
}

fn sphere_pair(spec: &BackendSpec) -> Option<(usize, usize)> {
    match spec {
        BackendSpec::Product { first, second } => match (first.as_ref(), second.as_ref()) {
            (BackendSpec::Sphere { truncation: a }, BackendSpec::Sphere { truncation: b }) => Some((*a, *b)),
            _ => None,
        },
        _ => None,
    }
}

/// Builds the preset's form on `spec`.
fn prepare_preset(name: &str, spec: &BackendSpec, tolerance: Option<f64>) -> Result<Prepared, Error> {
    let one = || q(1, 1);
    match name {
        "sphere/symplectic" | "sphere/height" | "sphere/exact" => {
            let BackendSpec::Sphere { truncation } = spec else {
                return Err(preset_mismatch(name, spec));
            };
            let s = SphereBackend::new(*truncation)?;
            let form = match name {
                "sphere/symplectic" => s.form(2, s.two_form(&[one()])?)?,
                "sphere/height" => s.form(2, s.two_form(&[q(0, 1), one()])?)?,
                _ => s.form(1, s.one_form(&[q(0, 1), q(0, 1), q(3, 1)], &[])?)?,
            };
            Ok(Prepared::Exact {
                backend: Arc::new(s),
                form,
            })
        }
        "torus-free/volume" | "torus-free/dx" => {
            let BackendSpec::Torus {
                dim: 2,
                truncation,
                action,
            } = spec
            else {
                return Err(preset_mismatch(name, spec));
            };
            let t = TorusBackend::new(2, *truncation, action)?;
            let zero_mode = vec![0, 0];
            let coords: &[usize] = if name == "torus-free/volume" { &[0, 1] } else { &[0] };
            let form = t.form(
                coords.len() as i32,
                t.basis_form(&zero_mode, crate::backend::torus::Phase::Cos, coords)?,
            )?;
            Ok(Prepared::Exact {
                backend: Arc::new(t),
                form,
            })
        }
        "product/symplectic" | "product/volume" => {
            let (n1, n2) = sphere_pair(spec).ok_or_else(|| preset_mismatch(name, spec))?;
            let s1 = Arc::new(SphereBackend::new(n1)?);
            let s2 = Arc::new(SphereBackend::new(n2)?);
            let omega1 = s1.two_form(&[one()])?;
            let omega2 = s2.two_form(&[one()])?;
            let unit1 = s1.function(&[one()])?;
            let unit2 = s2.function(&[one()])?;
            let p = ProductBackend::new(s1, s2)?;
            let form = if name == "product/volume" {
                p.form(4, p.tensor(2, &omega1, 2, &omega2)?)?
            } else {
                let a = p.form(2, p.tensor(2, &omega1, 0, &unit2)?)?;
                let b = p.form(2, p.tensor(0, &unit1, 2, &omega2)?)?;
                a.add(&b)?
            };
            Ok(Prepared::Exact {
                backend: Arc::new(p),
                form,
            })
        }
        "dec/volume" => {
            let backend = build_dec(spec, tolerance).map_err(|_| preset_mismatch(name, spec))?;
            let form = backend.form(2, backend.volume_form())?;
            Ok(Prepared::Dec { backend, form })
        }
        other => Err(Error::InvalidParameters(format!("unknown preset `{other}`"))),
    }
}

fn inline_form<B: DeRhamBackend + ?Sized>(
    backend: &B,
    degree: i32,
    entries: &[(usize, String)],
) -> Result<InvariantForm<B::Scalar>, Error> {
    let mut coeffs = vec![<B::Scalar as num_traits::Zero>::zero(); crate::derham::dimension_of(backend, degree)];
    for (i, text) in entries {
        let slot = coeffs
            .get_mut(*i)
            .ok_or_else(|| Error::InvalidParameters(format!("inline entry index {i} out of range")))?;
        *slot = B::Scalar::parse_text(text).map_err(Error::InvalidParameters)?;
    }
    backend.form(degree, coeffs)
}

/// Resolves backend and input form for a non-convergence scenario.
pub fn prepare(config: &ScenarioConfig) -> Result<Prepared, Error> {
    config.validate()?;
    let input = config
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidParameters("no input form".into()))?;
    match input {
        InputSpec::Preset(name) => {
            let p = preset(name).ok_or_else(|| Error::InvalidParameters(format!("unknown preset `{name}`")))?;
            let base = match &config.backend {
                Some(spec) => spec.clone(),
                None => p.default_backend.parse()?,
            };
            prepare_preset(name, &with_truncation(&base, config.truncation)?, config.tolerance)
        }
        InputSpec::Inline { degree, entries } => {
            let spec = with_truncation(config.backend.as_ref().expect("validated"), config.truncation)?;
            match build_any(&spec, config.tolerance)? {
                AnyBackend::Exact(backend) => {
                    let form = inline_form(backend.as_ref(), *degree, entries)?;
                    Ok(Prepared::Exact { backend, form })
                }
                AnyBackend::Dec(backend) => {
                    let form = inline_form(backend.as_ref(), *degree, entries)?;
                    Ok(Prepared::Dec { backend, form })
                }
            }
        }
        InputSpec::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidParameters(format!("cannot read {}: {e}", path.display())))?;
            // the document names its backend; exact and DEC scalars parse differently
            let spec = match io::parse_form_document::<Rational>(&text) {
                Ok(doc) => doc.backend,
                Err(_) => io::parse_form_document::<f64>(&text)?.backend,
            };
            if let Some(given) = &config.backend {
                if *given != spec {
                    return Err(Error::InvalidParameters(format!(
                        "form file is for `{spec}`, --backend says `{given}`"
                    )));
                }
            }
            match build_any(&spec, config.tolerance)? {
                AnyBackend::Exact(backend) => {
                    let form = io::parse_form(backend.as_ref(), &text)?;
                    Ok(Prepared::Exact { backend, form })
                }
                AnyBackend::Dec(backend) => {
                    let form = io::parse_form(backend.as_ref(), &text)?;
                    Ok(Prepared::Dec { backend, form })
                }
            }
        }
    }
}

fn input_label(config: &ScenarioConfig) -> String {
    match &config.input {
        Some(InputSpec::Preset(name)) => format!("preset {name}"),
        Some(InputSpec::Inline { degree, .. }) => format!("inline {degree}-form"),
        Some(InputSpec::File(path)) => format!("file {}", path.display()),
        None => "none".into(),
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput, ScenarioError> {
    let context = format!("{} ({})", config.operation.name(), input_label(config));
    let wrap = |source: Error| ScenarioError {
        context: context.clone(),
        source,
    };
    if config.operation == Operation::Convergence {
        return convergence(config).map_err(wrap);
    }
    let prepared = prepare(config).map_err(wrap)?;
    let label = input_label(config);
    match prepared {
        Prepared::Exact { backend, form } => run_on(backend.as_ref(), &form, config.operation, &label),
        Prepared::Dec { backend, form } => run_on(backend.as_ref(), &form, config.operation, &label),
    }
    .map_err(wrap)
}

fn run_on<B: DeRhamBackend + ?Sized>(
    backend: &B,
    form: &InvariantForm<B::Scalar>,
    operation: Operation,
    label: &str,
) -> Result<ScenarioOutput, Error> {
    let gens = backend.generators();
    let labels: Vec<&str> = (0..gens.rank()).map(|j| gens.label(j)).collect();
    let header = json!({
        "record": "scenario",
        "operation": operation.name(),
        "backend": backend.spec().to_string(),
        "input": label,
        "generators": labels,
        "tolerance": backend.tolerance(),
    });
    let mut table = String::new();
    let _ = writeln!(table, "{:<10} {}", "operation", operation.name());
    let _ = writeln!(table, "{:<10} {}", "backend", backend.spec());
    let _ = writeln!(table, "{:<10} {}", "input", label);
    let mut records = vec![header, json!({"record": "input", "form": io::form_to_json(form)})];
    let success = match operation {
        Operation::Extend => {
            let cartan = Cartan::new(backend);
            let report = cartan.extension_report(form)?;
            extension_records(&cartan, &report, &mut table, &mut records);
            report.is_extended()
        }
        Operation::Hodge => {
            let split = backend.hodge_decompose(form)?;
            let _ = writeln!(table, "{:<10} {:>14}  coefficients", "part", "norm");
            for (name, part) in [("harmonic", &split.harmonic), ("exact", &split.exact), ("coexact", &split.coexact)] {
                let norm = backend.norm(part)?;
                let _ = writeln!(table, "{:<10} {:>14}  {}", name, norm_text(&norm), coefficient_text(part));
                records.push(json!({
                    "record": "part",
                    "part": name,
                    "form": io::form_to_json(part),
                    "norm": norm_json(&norm),
                }));
            }
            records.push(json!({"record": "summary", "status": "decomposed"}));
            let _ = writeln!(table, "status     decomposed");
            true
        }
        Operation::MomentMap => {
            let cartan = Cartan::new(backend);
            match cartan.moment_map(form) {
                Ok(mu) => {
                    let harmonic = backend.norm(&backend.harmonic_part(&mu)?)?;
                    let _ = writeln!(table, "{:<10} {}", "mu", coefficient_text(&mu));
                    let _ = writeln!(table, "{:<10} {}", "harmonic", norm_text(&harmonic));
                    let _ = writeln!(table, "status     extended");
                    records.push(json!({
                        "record": "moment_map",
                        "form": io::form_to_json(&mu),
                        "harmonic_norm": norm_json(&harmonic),
                    }));
                    records.push(json!({"record": "summary", "status": "extended"}));
                    true
                }
                Err(Error::ObstructionDetected { stage, residual }) => {
                    let _ = writeln!(table, "status     obstructed at stage {stage} (residual {residual:e})");
                    records.push(json!({
                        "record": "summary",
                        "status": "obstructed",
                        "terminated_at_stage": stage,
                        "residual": residual,
                    }));
                    false
                }
                Err(e) => return Err(e),
            }
        }
        Operation::Convergence => unreachable!("handled by convergence()"),
    };
    Ok(ScenarioOutput {
        table,
        records,
        success,
    })
}

fn norm_json<S: Scalar>(n: &Norm<S>) -> Value {
    json!({ "squared": n.squared.render(), "pi_power": n.pi_power, "value": n.value() })
}

fn norm_text<S: Scalar>(n: &Norm<S>) -> String {
    if S::EXACT && n.squared.is_zero() {
        "0".into()
    } else {
        format!("{:.6e}", n.value())
    }
}

fn coefficient_text<S: Scalar>(form: &InvariantForm<S>) -> String {
    const SHOWN: usize = 6;
    let nonzero: Vec<String> = form
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| format!("[{i}]={}", if S::EXACT { v.render() } else { format!("{:.6e}", v.to_f64()) }))
        .collect();
    match nonzero.len() {
        0 => "0".into(),
        n if n <= SHOWN => nonzero.join(" "),
        n => format!("{} ... ({} more)", nonzero[..SHOWN].join(" "), n - SHOWN),
    }
}

fn extension_records<B: DeRhamBackend + ?Sized>(
    cartan: &Cartan<'_, B>,
    report: &ExtensionReport<B::Scalar>,
    table: &mut String,
    records: &mut Vec<Value>,
) {
    let gens = cartan.generators();
    let _ = writeln!(table, "{:<6} {:<12} {:<7} coefficients", "stage", "monomial", "degree");
    for (stage, term) in report.terms.iter().enumerate() {
        for (mono, form) in term.terms() {
            let _ = writeln!(
                table,
                "{:<6} {:<12} {:<7} {}",
                stage,
                mono.display(gens).to_string(),
                form.degree(),
                coefficient_text(form)
            );
        }
        records.push(json!({
            "record": "term",
            "stage": stage,
            "element": io::element_to_json(cartan, term),
        }));
    }
    let _ = writeln!(table, "{:<6} {:>14}", "stage", "obstruction");
    for (stage, n) in report.stage_obstructions.iter().enumerate() {
        let _ = writeln!(table, "{:<6} {:>14}", stage, norm_text(n));
        records.push(json!({"record": "stage", "stage": stage, "obstruction": norm_json(n)}));
    }
    let status = match report.status {
        ExtensionStatus::Extended => "extended",
        ExtensionStatus::Obstructed => "obstructed",
    };
    let _ = writeln!(
        table,
        "status {status}, terminated at stage {}, final residual {}",
        report.terminated_at_stage,
        norm_text(&report.final_residual)
    );
    records.push(json!({
        "record": "summary",
        "status": status,
        "terminated_at_stage": report.terminated_at_stage,
        "final_residual": norm_json(&report.final_residual),
    }));
}

/// One row of a DEC convergence study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub triangles: usize,
    pub residual: f64,
    pub moment_map_error: f64,
    pub extended: bool,
}

/// Extends the discretized area form and computes the discrete moment map on
/// each level; the moment map error is the max vertex deviation from `-z`.
pub fn convergence_study(n_sym: usize, levels: &[usize], tolerance: Option<f64>) -> Result<Vec<ConvergenceRow>, Error> {
    levels
        .iter()
        .map(|&level| {
            let backend = build_dec(&BackendSpec::Dec { n_sym, level }, tolerance)?;
            let omega = backend.form(2, backend.volume_form())?;
            let cartan = Cartan::new(backend.as_ref());
            let report = cartan.extension_report(&omega)?;
            let mu = cartan.moment_map(&omega)?;
            let moment_map_error = mu
                .coeffs()
                .iter()
                .zip(backend.height())
                .map(|(m, z)| (m + z).abs())
                .fold(0.0, f64::max);
            Ok(ConvergenceRow {
                level,
                triangles: backend.mesh().count(2),
                residual: report.final_residual.value(),
                moment_map_error,
                extended: report.is_extended(),
            })
        })
        .collect()
}

fn convergence(config: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    config.validate()?;
    let n_sym = match &config.backend {
        Some(BackendSpec::Dec { n_sym, .. }) => *n_sym,
        _ => 8,
    };
    let levels = config.levels.clone().unwrap_or_else(|| vec![0, 1, 2, 3]);
    let rows = convergence_study(n_sym, &levels, config.tolerance)?;
    let mut table = String::new();
    let _ = writeln!(table, "convergence on dec nsym={n_sym}");
    let _ = writeln!(
        table,
        "{:<6} {:>9} {:>14} {:>8} {:>14} {:>8}",
        "level", "triangles", "residual", "ratio", "mu error", "ratio"
    );
    let mut records = vec![json!({
        "record": "scenario",
        "operation": "convergence",
        "backend": format!("dec nsym={n_sym}"),
        "levels": levels,
    })];
    for (i, row) in rows.iter().enumerate() {
        let ratio = |f: fn(&ConvergenceRow) -> f64| {
            if i == 0 {
                "-".to_string()
            } else {
                let r = f(row) / f(&rows[i - 1]);
                if r.abs() < 1e3 {
                    format!("{r:.3}")
                } else {
                    format!("{r:.2e}")
                }
            }
        };
        let _ = writeln!(
            table,
            "{:<6} {:>9} {:>14.6e} {:>8} {:>14.6e} {:>8}",
            row.level,
            row.triangles,
            row.residual,
            ratio(|r| r.residual),
            row.moment_map_error,
            ratio(|r| r.moment_map_error)
        );
        let mut record = serde_json::to_value(row).expect("row serializes");
        record["record"] = json!("level");
        records.push(record);
    }
    let decreasing = |f: fn(&ConvergenceRow) -> f64| rows.windows(2).all(|w| f(&w[1]) < f(&w[0]));
    let residual_monotone = decreasing(|r| r.residual);
    let mu_monotone = decreasing(|r| r.moment_map_error);
    let all_extended = rows.iter().all(|r| r.extended);
    let _ = writeln!(
        table,
        "residual monotone: {residual_monotone}, moment map error monotone: {mu_monotone}"
    );
    records.push(json!({
        "record": "summary",
        "status": if all_extended { "extended" } else { "obstructed" },
        "residual_monotone": residual_monotone,
        "moment_map_error_monotone": mu_monotone,
    }));
    Ok(ScenarioOutput {
        table,
        records,
        success: all_extended,
    })
}

/// Recomputes `‖d_G α̂‖` from a machine-readable extension report.
pub fn verify_report(jsonl: &str) -> Result<ScenarioOutput, ScenarioError> {
    let wrap = |source: Error| ScenarioError {
        context: "verify".into(),
        source,
    };
    let records = jsonl
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str::<Value>(l).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(wrap)?;
    let find = |kind: &str| records.iter().find(|r| r["record"] == kind);
    let header = find("scenario").ok_or_else(|| wrap(Error::InvalidParameters("no scenario record".into())))?;
    if header["operation"] != "extend" {
        return Err(wrap(Error::InvalidParameters("verify needs an extend report".into())));
    }
    let spec: BackendSpec = header["backend"]
        .as_str()
        .unwrap_or_default()
        .parse()
        .map_err(wrap)?;
    let tolerance = header["tolerance"].as_f64().filter(|t| *t > 0.0);
    let input = find("input").ok_or_else(|| wrap(Error::InvalidParameters("no input record".into())))?;
    let status = find("summary").and_then(|s| s["status"].as_str()).unwrap_or("missing").to_string();
    let terms: Vec<&Value> = records.iter().filter(|r| r["record"] == "term").collect();
    match build_any(&spec, tolerance).map_err(wrap)? {
        AnyBackend::Exact(b) => verify_on(b.as_ref(), input, &terms, &status),
        AnyBackend::Dec(b) => verify_on(b.as_ref(), input, &terms, &status),
    }
    .map_err(wrap)
}

fn verify_on<B: DeRhamBackend + ?Sized>(
    backend: &B,
    input: &Value,
    terms: &[&Value],
    status: &str,
) -> Result<ScenarioOutput, Error> {
    let cartan = Cartan::new(backend);
    let alpha = io::form_from_json(backend, &input["form"])?;
    let elements = terms
        .iter()
        .map(|t| io::element_from_json(&cartan, &t["element"]))
        .collect::<Result<Vec<_>, _>>()?;
    let report = ExtensionReport {
        input: alpha,
        terms: elements,
        stage_obstructions: Vec::new(),
        final_residual: Norm::zero(),
        terminated_at_stage: terms.len(),
        status: ExtensionStatus::Extended,
    };
    let residual = cartan.verify_extension(&report)?;
    let zero = residual.is_negligible(backend.tolerance());
    let mut table = String::new();
    let _ = writeln!(table, "{:<16} {}", "backend", backend.spec());
    let _ = writeln!(table, "{:<16} {}", "reported status", status);
    let _ = writeln!(table, "{:<16} {}", "terms", report.terms.len());
    let _ = writeln!(table, "{:<16} {}", "recomputed", norm_text(&residual));
    let records = vec![json!({
        "record": "verify",
        "backend": backend.spec().to_string(),
        "reported_status": status,
        "residual": norm_json(&residual),
        "closed": zero,
    })];
    Ok(ScenarioOutput {
        table,
        records,
        success: zero && status == "extended",
    })
}
