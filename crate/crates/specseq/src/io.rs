use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::complex::{ComplexError, FilteredComplex};
use crate::field::Field;
use crate::matrix::Matrix;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad block key {0:?}; expected \"(i,j)\"")]
    Key(String),
    #[error("bad matrix entry {0}")]
    Entry(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// On-disk form: `{"dims": [..], "blocks": {"(i,j)": [[..]]}, "hdeg": [..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexFile {
    pub dims: Vec<usize>,
    #[serde(default)]
    pub blocks: BTreeMap<String, Vec<Vec<Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hdeg: Option<Vec<i64>>,
}

pub fn parse_block_key(key: &str) -> Option<(usize, usize)> {
    let inner = key.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

fn entry<F: Field>(v: &Value) -> Result<F, FormatError> {
    let parsed = match v {
        Value::String(s) => F::parse(s),
        Value::Number(n) => n.as_i64().map(F::from_i64),
        _ => None,
    };
    parsed.ok_or_else(|| FormatError::Entry(v.to_string()))
}

impl ComplexFile {
    pub fn to_complex<F: Field>(&self) -> Result<FilteredComplex<F>, FormatError> {
        let mut blocks = BTreeMap::new();
        for (key, rows) in &self.blocks {
            let ij = parse_block_key(key).ok_or_else(|| FormatError::Key(key.clone()))?;
            let ncols = rows.first().map_or(self.dims.get(ij.1).copied().unwrap_or(0), Vec::len);
            let parsed = rows
                .iter()
                .map(|r| r.iter().map(entry).collect::<Result<Vec<F>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            if parsed.iter().any(|r| r.len() != ncols) {
                return Err(FormatError::Entry(format!("ragged rows in block {key}")));
            }
            blocks.insert(ij, Matrix::from_rows(parsed, ncols));
        }
        Ok(FilteredComplex::from_blocks(self.dims.clone(), &blocks, self.hdeg.clone())?)
    }

    pub fn from_complex<F: Field>(fc: &FilteredComplex<F>) -> Self {
        let mut blocks = BTreeMap::new();
        for i in 0..=fc.top() {
            for j in 0..=i {
                let b = fc.block(i, j);
                if b.rows() > 0 && b.cols() > 0 && !b.is_zero() {
                    let rows = (0..b.rows())
                        .map(|r| b.row(r).iter().map(|x| Value::String(x.to_string())).collect())
                        .collect();
                    blocks.insert(format!("({i},{j})"), rows);
                }
            }
        }
        ComplexFile { dims: fc.dims().to_vec(), blocks, hdeg: fc.hdeg().map(<[i64]>::to_vec) }
    }
}

pub fn parse_complex<F: Field>(json: &str) -> Result<FilteredComplex<F>, FormatError> {
    let file: ComplexFile = serde_json::from_str(json)?;
    file.to_complex()
}
