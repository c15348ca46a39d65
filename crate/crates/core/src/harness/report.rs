//! Structured JSON reports.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circle::AngleRecord;
use crate::index::{CrossingRecord, DegenerateOutcome, IndexPair};
use crate::iteration::{InequalityReport, MeanIndex, SplittingData};
use crate::jump::JumpSearch;

use super::selftest::SelftestReport;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<InputDigest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub omega: Vec<OmegaResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iterations: Vec<IterationRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<SplittingData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_index: Option<MeanIndex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bott: Option<BottRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jump: Option<JumpSearch>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub oracle: Vec<OracleCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selftest: Option<SelftestReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: super::SCHEMA_VERSION.into(),
            command: command.into(),
            ..Self::default()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub file: String,
    pub sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub provenance: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaResult {
    pub angle: AngleRecord,
    pub index: i64,
    pub nullity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scanned_radians: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub crossings: Vec<CrossingRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<DegenerateOutcome>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub m: u32,
    pub index: i64,
    pub nullity: usize,
    /// `i(γ, m)` from the precise iteration formula, absent when a ceiling
    /// argument is ambiguous.
    pub formula: Option<i64>,
    pub formula_agrees: Option<bool>,
    pub inequalities: InequalityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BottRecord {
    pub m: u32,
    pub z: AngleRecord,
    pub direct: IndexPair,
    pub sum: IndexPair,
    pub roots: Vec<RootTerm>,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootTerm {
    pub angle: AngleRecord,
    pub index: i64,
    pub nullity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub what: String,
    pub grid: usize,
    pub engine: i64,
    pub oracle: i64,
    pub agree: bool,
}
