//! Generator files: JSON with complex entries as `[re, im]` pairs.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::closure::ClosureBudget;
use crate::families::{tensor_example, SmallGroup};
use crate::linalg::{CMatrix, Tol, C64};

use super::InputError;

/// How the generators are closed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosureMode {
    /// The semigroup generated by the listed matrices.
    #[default]
    Plain,
    /// The semigroup generated by the matrices and their adjoints.
    SelfAdjoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetSpec {
    pub max_elements: usize,
    pub max_word_length: usize,
}

/// `E_ij` (one-based), optionally scaled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasicSpec {
    #[serde(rename = "E")]
    pub e: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Dense(Vec<Vec<[f64; 2]>>),
    Basic(BasicSpec),
}

/// `E_ij ⊗ g` for all `i, j ≤ r` and generators `g` of a named group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSpec {
    pub r: usize,
    /// Degree of the group; checked against `group` when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    /// `trivial`, `cyclic-<m>`, `s3`, `d4`, `q8` or `a4`.
    pub group: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    #[serde(default)]
    pub generators: Vec<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensor: Option<TensorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetSpec>,
    #[serde(default)]
    pub closure: ClosureMode,
}

/// A validated generator file with its expanded matrices.
#[derive(Clone, Debug)]
pub struct Input {
    pub file: GeneratorFile,
    pub generators: Vec<CMatrix>,
    /// Hex SHA-256 of the raw file bytes.
    pub digest: String,
}

pub fn parse_group(name: &str) -> Option<SmallGroup> {
    match name {
        "trivial" => Some(SmallGroup::Cyclic(1)),
        "s3" => Some(SmallGroup::S3),
        "d4" => Some(SmallGroup::D4),
        "q8" => Some(SmallGroup::Q8),
        "a4" => Some(SmallGroup::A4),
        _ => name
            .strip_prefix("cyclic-")
            .and_then(|m| m.parse().ok())
            .filter(|&m| m >= 1)
            .map(SmallGroup::Cyclic),
    }
}

impl GeneratorFile {
    pub fn budget(&self) -> ClosureBudget {
        self.budget.map_or_else(ClosureBudget::default, |b| ClosureBudget {
            max_elements: b.max_elements,
            max_word_length: b.max_word_length,
        })
    }

    /// Expands shorthands and checks every matrix against `dim`.
    pub fn expand(&self) -> Result<Vec<CMatrix>, InputError> {
        let n = self.dim;
        if n == 0 {
            return Err(InputError::Validation("dim: must be positive".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(InputError::Validation(format!("tol: {t} is not in (0, 1)")));
            }
        }
        if let Some(b) = self.budget {
            ClosureBudget::new(b.max_elements, b.max_word_length)
                .map_err(|e| InputError::Validation(format!("budget: {e}")))?;
        }
        let mut out = Vec::with_capacity(self.generators.len());
        for (idx, spec) in self.generators.iter().enumerate() {
            out.push(expand_matrix(spec, n).map_err(|e| InputError::Validation(format!("generators[{idx}]: {e}")))?);
        }
        if let Some(t) = &self.tensor {
            let group = parse_group(&t.group)
                .ok_or_else(|| InputError::Validation(format!("tensor.group: unknown group {:?}", t.group)))?;
            if let Some(s) = t.s {
                if s != group.degree() {
                    return Err(InputError::Validation(format!(
                        "tensor.s: {s} does not match the degree {} of {}",
                        group.degree(),
                        t.group
                    )));
                }
            }
            if t.r == 0 || t.r * group.degree() != n {
                return Err(InputError::Validation(format!(
                    "tensor: r = {} times degree {} does not equal dim {n}",
                    t.r,
                    group.degree()
                )));
            }
            out.extend(tensor_example(t.r, &group.generators()));
        }
        if out.is_empty() {
            return Err(InputError::Validation(
                "generators: at least one generator is required".into(),
            ));
        }
        Ok(out)
    }
}

fn expand_matrix(spec: &MatrixSpec, n: usize) -> Result<CMatrix, String> {
    match spec {
        MatrixSpec::Basic(b) => {
            let [i, j] = b.e;
            if i == 0 || j == 0 || i > n || j > n {
                return Err(format!("E index ({i}, {j}) outside 1..={n}"));
            }
            let m = CMatrix::basic(n, i - 1, j - 1);
            Ok(match b.scale {
                Some([re, im]) if re.is_finite() && im.is_finite() => m.scale(C64::new(re, im)),
                Some(_) => return Err("scale is not finite".into()),
                None => m,
            })
        }
        MatrixSpec::Dense(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                let cols = rows.first().map_or(0, Vec::len);
                return Err(format!("expected {n}x{n}, got {}x{cols}", rows.len()));
            }
            let entries: Vec<C64> = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
            CMatrix::from_row_major(n, n, &entries).map_err(|e| e.to_string())
        }
    }
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses and validates a generator file.
pub fn parse_input(bytes: &[u8]) -> Result<Input, InputError> {
    let file: GeneratorFile = serde_json::from_slice(bytes).map_err(|e| InputError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let generators = file.expand()?;
    Ok(Input {
        file,
        generators,
        digest: digest(bytes),
    })
}

/// Tolerance from an override, the file, or the default, in that order.
pub fn effective_tol(file: &GeneratorFile, override_tol: Option<f64>) -> Result<Tol, InputError> {
    let eps = override_tol.or(file.tol).unwrap_or(crate::linalg::DEFAULT_EPS);
    if !(eps > 0.0 && eps < 1.0) {
        return Err(InputError::Validation(format!("tol: {eps} is not in (0, 1)")));
    }
    Tol::new(eps).map_err(|e| InputError::Validation(e.to_string()))
}
