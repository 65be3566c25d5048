//! `equihodge` command-line driver.
//!
//! Each verb prints a fixed-width table on stdout and writes the JSONL
//! records to `--out`, to `$EQUIHODGE_OUT_DIR/<verb>.jsonl`, or (with
//! neither) to stdout after the table. Exit status: 0 when the form
//! extended or the decomposition completed, 1 when the computation ran but
//! did not succeed (for instance an obstruction), 2 on errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use equihodge::scenario::{
    run_scenario, verify_report, InputSpec, Operation, ScenarioConfig, ScenarioOutput, OUT_DIR_ENV, PRESETS,
};
use equihodge::BackendSpec;

#[derive(Parser, Debug)]
#[command(name = "equihodge", version, about = "Equivariant extensions of invariant forms via Hodge theory")]
#[command(after_help = presets_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extend a closed invariant form to an equivariantly closed one.
    Extend(ScenarioArgs),
    /// Split a form into harmonic, exact and coexact parts.
    Hodge(ScenarioArgs),
    /// Compute the moment map of an invariant 2-form.
    MomentMap(ScenarioArgs),
    /// Refine a symmetric sphere mesh and track residuals and moment map errors.
    Convergence(ConvergenceArgs),
    /// Recompute the equivariant residual of a saved extend report.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Backend, e.g. "sphere N=6", "torus n=2 K=3 v=1,0",
    /// "product(sphere N=3;sphere N=3)" or "dec nsym=8 level=2".
    #[arg(long)]
    backend: Option<BackendSpec>,
    /// Zero threshold for the DEC backend.
    #[arg(long = "tol")]
    tolerance: Option<f64>,
    /// Where to write the JSONL records.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scenario configuration as JSON; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    #[command(flatten)]
    common: Common,
    /// Named input form (see the list below).
    #[arg(long, conflicts_with = "input")]
    preset: Option<String>,
    /// Form document to read.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Truncation order of the exact backend.
    #[arg(long)]
    truncation: Option<usize>,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[command(flatten)]
    common: Common,
    /// Refinement levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// JSONL report written by `extend`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Where to write the JSONL records.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn presets_help() -> String {
    let mut text = String::from("Presets:\n");
    for p in PRESETS {
        text.push_str(&format!("  {:<20} {}\n", p.name, p.description));
    }
    text.push_str(&format!("\nDefault output directory: ${OUT_DIR_ENV}"));
    text
}

fn load_config(operation: Operation, common: &Common) -> Result<ScenarioConfig, String> {
    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let config: ScenarioConfig =
                serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            if config.operation != operation {
                return Err(format!(
                    "{} describes a `{}` scenario, not `{}`",
                    path.display(),
                    config.operation.name(),
                    operation.name()
                ));
            }
            config
        }
        None => ScenarioConfig::new(operation),
    };
    if common.backend.is_some() {
        config.backend = common.backend.clone();
    }
    if common.tolerance.is_some() {
        config.tolerance = common.tolerance;
    }
    if common.out.is_some() {
        config.output = common.out.clone();
    }
    Ok(config)
}

fn scenario_config(operation: Operation, args: &ScenarioArgs) -> Result<ScenarioConfig, String> {
    let mut config = load_config(operation, &args.common)?;
    if let Some(name) = &args.preset {
        config.input = Some(InputSpec::Preset(name.clone()));
    }
    if let Some(path) = &args.input {
        config.input = Some(InputSpec::File(path.clone()));
    }
    if args.truncation.is_some() {
        config.truncation = args.truncation;
    }
    Ok(config)
}

fn output_target(explicit: Option<&Path>, verb: &str) -> Option<PathBuf> {
    if let Some(path) = explicit {
        return Some(path.to_path_buf());
    }
    let dir = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty())?;
    Some(PathBuf::from(dir).join(format!("{verb}.jsonl")))
}

fn emit(output: &ScenarioOutput, target: Option<PathBuf>) -> Result<(), String> {
    let mut text = output.table.clone();
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| format!("cannot create {}: {e}", parent.display()))?;
            }
            std::fs::write(&path, output.jsonl()).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            text.push_str(&format!("records written to {}\n", path.display()));
        }
        None => {
            text.push('\n');
            text.push_str(&output.jsonl());
        }
    }
    // a closed pipe (`| head`) is not an error
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(format!("cannot write to stdout: {e}")),
        _ => Ok(()),
    }
}

fn run(command: Command) -> Result<bool, String> {
    let (verb, output, explicit) = match command {
        Command::Extend(args) => form_verb(Operation::Extend, &args)?,
        Command::Hodge(args) => form_verb(Operation::Hodge, &args)?,
        Command::MomentMap(args) => form_verb(Operation::MomentMap, &args)?,
        Command::Convergence(args) => {
            let mut config = load_config(Operation::Convergence, &args.common)?;
            if args.levels.is_some() {
                config.levels = args.levels;
            }
            let output = run_scenario(&config).map_err(|e| e.to_string())?;
            ("convergence", output, config.output)
        }
        Command::Verify(args) => {
            let text = std::fs::read_to_string(&args.input)
                .map_err(|e| format!("cannot read {}: {e}", args.input.display()))?;
            let output = verify_report(&text).map_err(|e| e.to_string())?;
            ("verify", output, args.out)
        }
    };
    emit(&output, output_target(explicit.as_deref(), verb))?;
    Ok(output.success)
}

fn form_verb(operation: Operation, args: &ScenarioArgs) -> Result<(&'static str, ScenarioOutput, Option<PathBuf>), String> {
    let config = scenario_config(operation, args)?;
    let output = run_scenario(&config).map_err(|e| e.to_string())?;
    Ok((operation.name(), output, config.output))
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
