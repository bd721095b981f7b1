//! Pattern-tensor JSON: `{"order": m, "dim": n, "entries": [[i_1, ..., i_m], ...]}`.
//!
//! Indices are 1-based. Unknown keys (including `"values"`) are ignored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::PatternTensor;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorJson {
    pub order: usize,
    pub dim: usize,
    pub entries: Vec<Vec<usize>>,
}

impl From<&PatternTensor> for TensorJson {
    fn from(t: &PatternTensor) -> Self {
        TensorJson {
            order: t.order(),
            dim: t.dim(),
            entries: t.entry_tuples(),
        }
    }
}

impl TryFrom<TensorJson> for PatternTensor {
    type Error = Error;

    fn try_from(j: TensorJson) -> Result<Self> {
        PatternTensor::new(j.order, j.dim, j.entries)
    }
}

pub fn tensor_from_json(text: &str) -> Result<PatternTensor> {
    let raw: TensorJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    raw.try_into()
}

pub fn tensor_to_json(t: &PatternTensor) -> String {
    serde_json::to_string(&TensorJson::from(t)).expect("pattern JSON serialization")
}

/// A replay file is a JSON array of pattern-tensor objects.
pub fn tensors_from_json(text: &str) -> Result<Vec<PatternTensor>> {
    let raw: Vec<TensorJson> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    raw.into_iter().map(PatternTensor::try_from).collect()
}

pub fn tensors_to_json(ts: &[PatternTensor]) -> String {
    let raw: Vec<TensorJson> = ts.iter().map(TensorJson::from).collect();
    serde_json::to_string_pretty(&raw).expect("pattern JSON serialization")
}
