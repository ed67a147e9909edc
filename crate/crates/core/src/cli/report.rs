//! The analysis report (`report/v1`) and its JSON and text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::closure::ClosureStatus;
use crate::linalg::CMatrix;
use crate::structure::{
    ElementPattern, IrreducibilityReport, PartialPermutation, SandwichReport, ZeroUnitaryStructure,
};

use super::input::ClosureMode;

pub const SCHEMA: &str = "report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
    /// A structural theorem failed on an input meeting its hypotheses.
    Violation,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::Skipped => "skipped",
            Status::Violation => "violation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    pub detail: String,
    /// Outcome of classification checks (irreducibility, masa) when they ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<CMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tol: f64,
    pub max_elements: usize,
    pub max_word_length: usize,
    pub closure: ClosureMode,
    pub checks: Vec<String>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureSummary {
    pub generators: usize,
    pub size: usize,
    pub status: ClosureStatus,
    pub max_word_length: usize,
    pub work_tol: f64,
    pub selfadjoint: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorDecomposition {
    pub generator: usize,
    pub unitary_dim: usize,
    pub shift_sizes: Vec<usize>,
    pub basis: CMatrix,
    pub unitary_block: CMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandSummary {
    pub atom_ranks: Vec<usize>,
    pub atoms: Vec<CMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnrichmentSummary {
    pub size: usize,
    pub projections: usize,
    pub max_word_length: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroUnitaryReport {
    pub structure: ZeroUnitaryStructure,
    pub sandwich: SandwichReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomicElementReport {
    pub permutation: PartialPermutation,
    pub unitaries: Vec<CMatrix>,
    pub weights: Vec<f64>,
}

/// Atomic representation of the enriched semigroup, one entry per enriched element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomicReport {
    pub block_dim: usize,
    pub atom_ranks: Vec<usize>,
    pub elements: Vec<AtomicElementReport>,
    pub max_reconstruction_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitClass {
    pub atom_rank: usize,
    pub dim: usize,
    pub size: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Structures {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub halmos_wallen: Vec<GeneratorDecomposition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<BandSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enrichment: Option<EnrichmentSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irreducibility: Option<IrreducibilityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_unitary: Option<ZeroUnitaryReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atomic: Option<AtomicReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reducible_split: Vec<SplitClass>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub input_digest: String,
    pub settings: Settings,
    pub closure: ClosureSummary,
    pub verdicts: Vec<Verdict>,
    pub structures: Structures,
}

impl AnalysisReport {
    pub fn verdict(&self, check: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }

    pub fn zero_unitary_patterns(&self) -> Option<&[ElementPattern]> {
        self.structures
            .zero_unitary
            .as_ref()
            .map(|z| z.structure.patterns.as_slice())
    }

    /// 4 on any violation, else 1 on any failure, else 2 if anything was inconclusive, else 0.
    pub fn exit_code(&self) -> i32 {
        let has = |s: Status| self.verdicts.iter().any(|v| v.status == s);
        if has(Status::Violation) {
            4
        } else if has(Status::Fail) {
            1
        } else if has(Status::Inconclusive) || self.closure.status == ClosureStatus::BudgetExhausted {
            2
        } else {
            0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

pub fn emit(report: &AnalysisReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Text => render_text(report).into_bytes(),
    }
}

fn render_text(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", r.schema, r.name.as_deref().unwrap_or("(unnamed)"));
    let _ = writeln!(s, "input sha256 {}", r.input_digest);
    let c = &r.closure;
    let _ = writeln!(
        s,
        "closure: {} elements from {} generators, {}, longest word {}, working tolerance {:e}{}",
        c.size,
        c.generators,
        match c.status {
            ClosureStatus::Closed => "closed",
            ClosureStatus::BudgetExhausted => "budget exhausted",
        },
        c.max_word_length,
        c.work_tol,
        if c.selfadjoint { ", self-adjoint" } else { "" }
    );
    for v in &r.verdicts {
        let _ = writeln!(s, "[{}] {}: {}", v.status.as_str(), v.check, v.detail);
        if let Some(w) = &v.witness {
            for i in 0..w.rows() {
                let row: Vec<String> = (0..w.cols())
                    .map(|j| {
                        let z = w.get(i, j);
                        format!("[{:?}, {:?}]", z.re, z.im)
                    })
                    .collect();
                let _ = writeln!(s, "    {}", row.join(" "));
            }
        }
    }
    s
}
