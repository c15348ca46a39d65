//! JSON description of a linear Hamiltonian system `ẋ = J B(t) x`.
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "n": 1,
//!   "tau": 1.0,
//!   "kind": "piecewise-constant",
//!   "blocks": [
//!     { "until": 0.5, "matrix": [[1.0, 0.0], [0.0, 1.0]] },
//!     { "until": 1.0, "matrix": [[0.0, 2.0], [2.0, 0.0]] }
//!   ]
//! }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::path::{
    integrate, HamiltonianData, HamiltonianDescriptor, HamiltonianKind, Provenance,
    SymplecticPath, TrigTerm,
};
use crate::symplectic::{structure, Mat};

pub const SCHEMA_VERSION: &str = "1";
pub const DEFAULT_STEPS: usize = 64;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed system document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0:?}")]
    Version(String),
    #[error("invalid system: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub schema_version: String,
    pub n: usize,
    pub tau: f64,
    pub kind: HamiltonianKind,
    /// Row-major `2n × 2n` block for `kind = "constant"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<BlockRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TrigRecord>,
    /// Integration steps; constant systems are evaluated in closed form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockRecord {
    pub until: f64,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigRecord {
    pub frequency: u32,
    pub cos: Vec<Vec<f64>>,
    pub sin: Vec<Vec<f64>>,
}

fn to_mat(rows: &[Vec<f64>], dim: usize, what: &str) -> Result<Mat, DocumentError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(DocumentError::Invalid(format!(
            "{what}: expected {dim}x{dim} rows"
        )));
    }
    Ok(Mat::from_fn(dim, dim, |i, j| rows[i][j]))
}

fn to_rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl SystemDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let doc: SystemDocument = serde_json::from_str(text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(DocumentError::Version(doc.schema_version));
        }
        doc.descriptor()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn constant(b: &Mat, tau: f64, label: Option<&str>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            n: b.nrows() / 2,
            tau,
            kind: HamiltonianKind::Constant,
            matrix: Some(to_rows(b)),
            blocks: Vec::new(),
            terms: Vec::new(),
            steps: None,
            label: label.map(str::to_owned),
        }
    }

    /// Constant `B = (θ/τ) I`, whose flow is `exp(tθJ/τ)`.
    pub fn rotation(n: usize, theta: f64, tau: f64) -> Self {
        let b = Mat::identity(2 * n, 2 * n) * (theta / tau);
        Self::constant(&b, tau, Some(&format!("rotation({theta})")))
    }

    pub fn from_descriptor(desc: &HamiltonianDescriptor, label: Option<&str>) -> Self {
        let mut doc = Self {
            schema_version: SCHEMA_VERSION.into(),
            n: desc.n(),
            tau: desc.tau(),
            kind: desc.kind(),
            matrix: None,
            blocks: Vec::new(),
            terms: Vec::new(),
            steps: None,
            label: label.map(str::to_owned),
        };
        match desc.data() {
            HamiltonianData::Constant(b) => doc.matrix = Some(to_rows(b)),
            HamiltonianData::PiecewiseConstant { ends, blocks } => {
                doc.blocks = ends
                    .iter()
                    .zip(blocks)
                    .map(|(&until, m)| BlockRecord {
                        until,
                        matrix: to_rows(m),
                    })
                    .collect();
            }
            HamiltonianData::TrigPolynomial { terms } => {
                doc.terms = terms
                    .iter()
                    .map(|t| TrigRecord {
                        frequency: t.frequency,
                        cos: to_rows(&t.cos),
                        sin: to_rows(&t.sin),
                    })
                    .collect();
            }
        }
        doc
    }

    pub fn descriptor(&self) -> Result<HamiltonianDescriptor, DocumentError> {
        let dim = 2 * self.n;
        let data = match self.kind {
            HamiltonianKind::Constant => {
                if !self.blocks.is_empty() || !self.terms.is_empty() {
                    return Err(DocumentError::Invalid(
                        "constant systems take only \"matrix\"".into(),
                    ));
                }
                let rows = self
                    .matrix
                    .as_ref()
                    .ok_or_else(|| DocumentError::Invalid("missing \"matrix\"".into()))?;
                HamiltonianData::Constant(to_mat(rows, dim, "matrix")?)
            }
            HamiltonianKind::PiecewiseConstant => {
                if self.matrix.is_some() || !self.terms.is_empty() || self.blocks.is_empty() {
                    return Err(DocumentError::Invalid(
                        "piecewise-constant systems take a nonempty \"blocks\" list".into(),
                    ));
                }
                let ends = self.blocks.iter().map(|b| b.until).collect();
                let blocks = self
                    .blocks
                    .iter()
                    .enumerate()
                    .map(|(k, b)| to_mat(&b.matrix, dim, &format!("blocks[{k}]")))
                    .collect::<Result<_, _>>()?;
                HamiltonianData::PiecewiseConstant { ends, blocks }
            }
            HamiltonianKind::TrigPolynomial => {
                if self.matrix.is_some() || !self.blocks.is_empty() || self.terms.is_empty() {
                    return Err(DocumentError::Invalid(
                        "trig-polynomial systems take a nonempty \"terms\" list".into(),
                    ));
                }
                let terms = self
                    .terms
                    .iter()
                    .enumerate()
                    .map(|(k, t)| {
                        Ok(TrigTerm {
                            frequency: t.frequency,
                            cos: to_mat(&t.cos, dim, &format!("terms[{k}].cos"))?,
                            sin: to_mat(&t.sin, dim, &format!("terms[{k}].sin"))?,
                        })
                    })
                    .collect::<Result<_, DocumentError>>()?;
                HamiltonianData::TrigPolynomial { terms }
            }
        };
        HamiltonianDescriptor::new(self.n, self.tau, data)
            .map_err(|e| DocumentError::Invalid(e.to_string()))
    }

    /// The fundamental solution, in closed form for constant systems.
    pub fn path(&self) -> crate::error::Result<SymplecticPath> {
        let desc = self
            .descriptor()
            .map_err(|e| crate::error::Error::InvalidInput(e.to_string()))?;
        match desc.data() {
            HamiltonianData::Constant(b) => {
                let label = self.label.clone().unwrap_or_else(|| "constant".into());
                Ok(SymplecticPath::flow(
                    structure(self.n) * b,
                    self.tau,
                    Provenance::Analytic { label },
                ))
            }
            _ => integrate(&desc, self.steps.unwrap_or(DEFAULT_STEPS)),
        }
    }
}
