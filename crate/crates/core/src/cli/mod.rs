//! File-driven front end: load a generator file, run checks, print a report.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 inconclusive (closure budget),
//! 3 input error, 4 a structural theorem was violated (a reproduction bundle is written).

mod input;
mod pipeline;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

pub use input::{
    digest, effective_tol, parse_group, parse_input, BasicSpec, BudgetSpec, ClosureMode, GeneratorFile, Input,
    MatrixSpec, TensorSpec,
};
pub use pipeline::{parse_checks, run_pipeline, Check, Overrides};
pub use report::{
    emit, AnalysisReport, AtomicElementReport, AtomicReport, BandSummary, ClosureSummary, EnrichmentSummary, Format,
    GeneratorDecomposition, Settings, SplitClass, Status, Structures, Verdict, ZeroUnitaryReport, SCHEMA,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Parser)]
#[command(
    name = "pisemi",
    version,
    about = "Analyse semigroups generated by partial isometries"
)]
pub struct Args {
    /// Generator file (JSON).
    pub input: PathBuf,
    /// Frobenius-norm tolerance, overriding the file.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Closure budget: maximum number of elements.
    #[arg(long)]
    pub max_elements: Option<usize>,
    /// Closure budget: maximum word length.
    #[arg(long)]
    pub max_words: Option<usize>,
    /// Comma-separated check names, or `all`.
    #[arg(long, default_value = "all")]
    pub checks: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for the randomized cross-checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the reproduction bundle on a theorem violation.
    #[arg(long)]
    pub repro_dir: Option<PathBuf>,
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Args::try_parse_from(args) {
        Ok(a) => run(&a, out, err),
        Err(e) => {
            let _ = write!(err, "{e}");
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            }
        }
    }
}

pub fn run(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let report = match analyse(args) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let _ = out.write_all(&emit(&report, args.format));
    let code = report.exit_code();
    if code == EXIT_VIOLATION {
        let dir = args
            .repro_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("pisemi-repro-{}", &report.input_digest[..12])));
        match write_repro_bundle(&dir, args, &report) {
            Ok(()) => {
                let _ = writeln!(
                    err,
                    "theorem violation: reproduction bundle written to {}",
                    dir.display()
                );
            }
            Err(e) => {
                let _ = writeln!(err, "theorem violation: could not write reproduction bundle: {e}");
            }
        }
    }
    code
}

/// Loads the input named by `args` and runs the pipeline.
pub fn analyse(args: &Args) -> Result<AnalysisReport, InputError> {
    let bytes = std::fs::read(&args.input).map_err(|source| InputError::Io {
        path: args.input.clone(),
        source,
    })?;
    let input = parse_input(&bytes)?;
    let checks = parse_checks(&args.checks)?;
    let overrides = Overrides {
        tol: args.tol,
        max_elements: args.max_elements,
        max_word_length: args.max_words,
        seed: args.seed,
    };
    run_pipeline(&input, &checks, &overrides)
}

/// Input file, full report, the violating verdicts' witnesses and the command line.
fn write_repro_bundle(dir: &Path, args: &Args, report: &AnalysisReport) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::copy(&args.input, dir.join("input.json"))?;
    std::fs::write(dir.join("report.json"), emit(report, Format::Json))?;
    let violations: Vec<&Verdict> = report
        .verdicts
        .iter()
        .filter(|v| v.status == Status::Violation)
        .collect();
    let mut witnesses = serde_json::to_vec_pretty(&violations).map_err(std::io::Error::other)?;
    witnesses.push(b'\n');
    std::fs::write(dir.join("violations.json"), witnesses)?;
    let command = format!(
        "pisemi input.json --checks {:?} --format json --seed {}{}{}{}\n",
        report.settings.checks.join(","),
        args.seed,
        args.tol.map(|t| format!(" --tol {t:e}")).unwrap_or_default(),
        args.max_elements
            .map(|m| format!(" --max-elements {m}"))
            .unwrap_or_default(),
        args.max_words.map(|m| format!(" --max-words {m}")).unwrap_or_default(),
    );
    std::fs::write(dir.join("command.txt"), command)
}
