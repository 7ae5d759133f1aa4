//! The `anyonkit-model/1` document format.
//!
//! ```text
//! { "format": "anyonkit-model/1",
//!   "labels": ["1", "tau"],
//!   "fusion": [[[1,0],[0,1]], [[0,1],[1,1]]],
//!   "F": { "tau,tau,tau;tau": { "rows": ["1","tau"], "cols": ["1","tau"],
//!                               "matrix": [[[re,im], …], …] }, … },
//!   "R": { "tau,tau;1": [re, im], … } }
//! ```
//!
//! Loading accepts F rows and columns in any order and stores them in
//! ascending label order; saving always writes that canonical form.

use std::collections::BTreeMap;

use anyonkit_core::fusion_ring::{FusionTable, Label, TableError};
use anyonkit_core::linalg::CMatrix;
use anyonkit_core::model_store::{AnyonModel, FBlock, FKey, ModelError, RKey};
use anyonkit_core::Complex64;
use serde::Deserialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::json;

pub const MODEL_FORMAT: &str = "anyonkit-model/1";

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    format: String,
    labels: Vec<String>,
    fusion: Vec<Vec<Vec<u32>>>,
    #[serde(rename = "F")]
    f: BTreeMap<String, FDoc>,
    #[serde(rename = "R")]
    r: BTreeMap<String, [f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FDoc {
    rows: Vec<String>,
    cols: Vec<String>,
    matrix: Value,
}

fn schema(msg: impl Into<String>) -> LoadError {
    LoadError::Schema(msg.into())
}

fn exact_label(table: &FusionTable, name: &str, key: &str) -> Result<Label, LoadError> {
    table
        .names()
        .iter()
        .position(|n| n == name)
        .map(Label)
        .ok_or_else(|| schema(format!("key {key:?}: unknown label {name:?}")))
}

fn parse_f_key(table: &FusionTable, key: &str) -> Result<FKey, LoadError> {
    let bad = || schema(format!("F key {key:?} must be \"a,b,c;d\""));
    let (lhs, d) = key.split_once(';').ok_or_else(bad)?;
    let parts: Vec<&str> = lhs.split(',').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(bad());
    };
    Ok(FKey::new(
        exact_label(table, a, key)?,
        exact_label(table, b, key)?,
        exact_label(table, c, key)?,
        exact_label(table, d, key)?,
    ))
}

fn parse_r_key(table: &FusionTable, key: &str) -> Result<RKey, LoadError> {
    let bad = || schema(format!("R key {key:?} must be \"a,b;c\""));
    let (lhs, c) = key.split_once(';').ok_or_else(bad)?;
    let (a, b) = lhs.split_once(',').ok_or_else(bad)?;
    Ok(RKey::new(
        exact_label(table, a, key)?,
        exact_label(table, b, key)?,
        exact_label(table, c, key)?,
    ))
}

/// Reorders rows and columns to ascending label order when the given
/// channel lists are permutations of sorted ones. Anything else is passed
/// through unchanged for model validation to reject.
fn canonical_block(rows: Vec<Label>, cols: Vec<Label>, matrix: CMatrix) -> FBlock {
    let square = matrix.rows() == rows.len() && matrix.cols() == cols.len();
    let order = |ls: &[Label]| {
        let mut idx: Vec<usize> = (0..ls.len()).collect();
        idx.sort_by_key(|&i| ls[i]);
        idx
    };
    let (ri, ci) = (order(&rows), order(&cols));
    if !square || (ri.iter().copied().eq(0..rows.len()) && ci.iter().copied().eq(0..cols.len())) {
        return FBlock { rows, cols, matrix };
    }
    let permuted = ri
        .iter()
        .map(|&i| ci.iter().map(|&j| matrix[(i, j)]).collect())
        .collect();
    FBlock {
        rows: ri.iter().map(|&i| rows[i]).collect(),
        cols: ci.iter().map(|&j| cols[j]).collect(),
        matrix: CMatrix::from_rows(permuted).expect("rectangular"),
    }
}

/// Parses and validates a model document.
pub fn load_model(bytes: &[u8]) -> Result<AnyonModel, LoadError> {
    let doc: ModelDoc = serde_json::from_slice(bytes)?;
    if doc.format != MODEL_FORMAT {
        return Err(schema(format!(
            "format must be {MODEL_FORMAT:?}, found {:?}",
            doc.format
        )));
    }
    let table = FusionTable::new(doc.labels, doc.fusion)?;
    let mut f = BTreeMap::new();
    for (key_text, block) in doc.f {
        let key = parse_f_key(&table, &key_text)?;
        let names = |ls: &[String]| {
            ls.iter()
                .map(|n| exact_label(&table, n, &key_text))
                .collect::<Result<Vec<_>, _>>()
        };
        let rows = names(&block.rows)?;
        let cols = names(&block.cols)?;
        let matrix = json::parse_matrix(&block.matrix).map_err(|e| schema(format!("F block {key_text:?}: {e}")))?;
        f.insert(key, canonical_block(rows, cols, matrix));
    }
    let mut r = BTreeMap::new();
    for (key_text, [re, im]) in doc.r {
        r.insert(parse_r_key(&table, &key_text)?, Complex64::new(re, im));
    }
    Ok(AnyonModel::new(table, f, r)?)
}

/// The model document as JSON.
pub fn model_value(model: &AnyonModel) -> Value {
    let table = model.table();
    let names = |ls: &[Label]| -> Value { ls.iter().map(|&l| Value::from(table.name(l))).collect() };
    let mut f = Map::new();
    for (key, block) in model.f_blocks() {
        let mut b = Map::new();
        b.insert("rows".into(), names(&block.rows));
        b.insert("cols".into(), names(&block.cols));
        b.insert("matrix".into(), json::matrix(&block.matrix));
        f.insert(key.render(table), Value::Object(b));
    }
    let mut r = Map::new();
    for (key, &z) in model.r_symbols() {
        r.insert(key.render(table), json::complex(z));
    }
    let mut doc = Map::new();
    doc.insert("format".into(), MODEL_FORMAT.into());
    doc.insert(
        "labels".into(),
        table.names().iter().map(|n| Value::from(n.as_str())).collect(),
    );
    doc.insert(
        "fusion".into(),
        serde_json::to_value(table.to_nested()).expect("integers"),
    );
    doc.insert("F".into(), Value::Object(f));
    doc.insert("R".into(), Value::Object(r));
    Value::Object(doc)
}

/// Canonical serialization of a model.
pub fn save_model(model: &AnyonModel) -> Vec<u8> {
    json::to_bytes(&model_value(model))
}
