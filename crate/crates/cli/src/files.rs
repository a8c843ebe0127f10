//! Instance and result files.

use choremarket::solver::SolveMeta;
use choremarket::{validate_instance, Preprocessed, Rational};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::exact::{parse_rational, Exact};

/// Reads `{"values": [[..]], "budgets": [..]}`; entries may be JSON numbers
/// or strings in any form [`parse_rational`] accepts.
pub fn parse_instance(text: &str) -> Result<Preprocessed, CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::Parse("instance must be a JSON object".into()))?;
    let values = obj
        .get("values")
        .ok_or_else(|| CliError::Parse("missing \"values\"".into()))?;
    let budgets = obj
        .get("budgets")
        .ok_or_else(|| CliError::Parse("missing \"budgets\"".into()))?;
    let values = values
        .as_array()
        .ok_or_else(|| CliError::Parse("\"values\" must be an array of rows".into()))?
        .iter()
        .map(parse_row)
        .collect::<Result<Vec<_>, _>>()?;
    let budgets = parse_row(budgets)?;
    Ok(validate_instance(values, budgets)?)
}

fn parse_row(row: &Value) -> Result<Vec<Rational>, CliError> {
    row.as_array()
        .ok_or_else(|| CliError::Parse(format!("expected an array, found {row}")))?
        .iter()
        .map(parse_entry)
        .collect()
}

fn parse_entry(v: &Value) -> Result<Rational, CliError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(CliError::Parse(format!("expected a number, found {other}"))),
    };
    parse_rational(&text).map_err(|e| CliError::Parse(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub u: Vec<Exact>,
    pub z: Vec<Vec<Exact>>,
    pub p: Vec<Exact>,
}

/// 1-indexed chore handed to a 1-indexed agent at price zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreassignmentRecord {
    pub chore: usize,
    pub agent: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionCounts {
    pub non_negative_utility: u64,
    pub sum_mismatch: u64,
    pub flow_deficit: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaRecord {
    pub graphs_enumerated: u64,
    pub graphs_pruned: u64,
    pub duplicate_graphs: u64,
    pub rejected: RejectionCounts,
    pub accepted: u64,
    pub mode: String,
    /// `null` unless degeneracy was checked.
    pub degenerate: Option<bool>,
    pub oracle_profiles: Option<usize>,
}

impl MetaRecord {
    pub fn from_meta(meta: &SolveMeta) -> Self {
        MetaRecord {
            graphs_enumerated: meta.graphs_enumerated,
            graphs_pruned: meta.graphs_pruned,
            duplicate_graphs: meta.duplicate_graphs,
            rejected: RejectionCounts {
                non_negative_utility: meta.rejected_non_negative,
                sum_mismatch: meta.rejected_sum_mismatch,
                flow_deficit: meta.rejected_flow_deficit,
            },
            accepted: meta.accepted,
            mode: meta.mode.map_or("auto", |m| m.name()).to_string(),
            degenerate: meta.degenerate,
            oracle_profiles: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub profiles: Vec<Vec<Exact>>,
    pub outcomes: Vec<OutcomeRecord>,
    pub preassigned: Vec<PreassignmentRecord>,
    /// Unique allocation per profile, when requested and available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocations: Option<Vec<Vec<Vec<Exact>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocations_refused: Option<String>,
    pub meta: MetaRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    pub ef11: bool,
    pub prop1: bool,
    pub budgets_close: bool,
}

impl Certificates {
    pub fn all(&self) -> bool {
        self.ef11 && self.prop1 && self.budgets_close
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundingFile {
    /// 1-indexed owner of each chore.
    pub owner: Vec<usize>,
    pub b_prime: Vec<Exact>,
    pub p: Vec<Exact>,
    pub weights: Vec<Exact>,
    pub certificates: Certificates,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}
