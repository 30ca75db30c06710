use std::collections::BTreeMap;
use std::ops::Range;

use thiserror::Error;

use crate::field::Field;
use crate::matrix::Matrix;

#[derive(Debug, Error, PartialEq)]
pub enum ComplexError {
    #[error("block ({i},{j}) has shape {got:?}, expected {expected:?}")]
    Shape { i: usize, j: usize, got: (usize, usize), expected: (usize, usize) },
    #[error("block ({i},{j}) lies above the diagonal; the differential must be block lower triangular")]
    UpperBlock { i: usize, j: usize },
    #[error("d^2 != 0: block ({i},{j}) of d^2 is nonzero")]
    NotNilpotent { i: usize, j: usize },
    #[error("expected {expected} homological labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("d maps basis vector {from} (hdeg {from_deg}) to basis vector {to} (hdeg {to_deg}); d must raise hdeg by one")]
    LabelDegree { from: usize, to: usize, from_deg: i64, to_deg: i64 },
}

/// A differential on `V = V_0 ⊕ … ⊕ V_P` with `d V_{≥i} ⊂ V_{≥i}` and `d² = 0`.
#[derive(Clone, Debug)]
pub struct FilteredComplex<F> {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    d: Matrix<F>,
    hdeg: Option<Vec<i64>>,
}

impl<F: Field> FilteredComplex<F> {
    /// Builds the complex from its blocks `d_{ij}: V_j → V_i`; missing blocks are zero.
    pub fn from_blocks(
        dims: Vec<usize>,
        blocks: &BTreeMap<(usize, usize), Matrix<F>>,
        hdeg: Option<Vec<i64>>,
    ) -> Result<Self, ComplexError> {
        let offsets = offsets(&dims);
        let n = *offsets.last().unwrap();
        let mut d = Matrix::zeros(n, n);
        for (&(i, j), m) in blocks {
            let expected = (dims.get(i).copied().unwrap_or(0), dims.get(j).copied().unwrap_or(0));
            if i >= dims.len() || j >= dims.len() || (m.rows(), m.cols()) != expected {
                return Err(ComplexError::Shape { i, j, got: (m.rows(), m.cols()), expected });
            }
            if i < j {
                if m.is_zero() {
                    continue;
                }
                return Err(ComplexError::UpperBlock { i, j });
            }
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    d[(offsets[i] + r, offsets[j] + c)] = m[(r, c)].clone();
                }
            }
        }
        Self::from_total(dims, d, hdeg)
    }

    /// Builds the complex from the full matrix of `d`.
    pub fn from_total(dims: Vec<usize>, d: Matrix<F>, hdeg: Option<Vec<i64>>) -> Result<Self, ComplexError> {
        let offsets = offsets(&dims);
        let n = *offsets.last().unwrap();
        if (d.rows(), d.cols()) != (n, n) {
            return Err(ComplexError::Shape { i: 0, j: 0, got: (d.rows(), d.cols()), expected: (n, n) });
        }
        let fc = FilteredComplex { dims, offsets, d, hdeg };
        for i in 0..fc.dims.len() {
            for j in i + 1..fc.dims.len() {
                if !fc.block(i, j).is_zero() {
                    return Err(ComplexError::UpperBlock { i, j });
                }
            }
        }
        let d2 = &fc.d * &fc.d;
        for i in 0..fc.dims.len() {
            for j in 0..=i {
                if !d2.submatrix(fc.range(i), fc.range(j)).is_zero() {
                    return Err(ComplexError::NotNilpotent { i, j });
                }
            }
        }
        if let Some(labels) = &fc.hdeg {
            if labels.len() != n {
                return Err(ComplexError::LabelCount { expected: n, got: labels.len() });
            }
            for c in 0..n {
                for r in 0..n {
                    if !fc.d[(r, c)].is_zero() && labels[r] != labels[c] + 1 {
                        return Err(ComplexError::LabelDegree { from: c, to: r, from_deg: labels[c], to_deg: labels[r] });
                    }
                }
            }
        }
        Ok(fc)
    }

    /// The filtration length `P`; gradings are `0..=P`.
    pub fn top(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn differential(&self) -> &Matrix<F> {
        &self.d
    }

    pub fn hdeg(&self) -> Option<&[i64]> {
        self.hdeg.as_deref()
    }

    /// Coordinates of `V_i` inside the total space.
    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Coordinates of `V_a ⊕ … ⊕ V_b` inside the total space.
    pub fn span(&self, a: usize, b: usize) -> Range<usize> {
        self.offsets[a]..self.offsets[b + 1]
    }

    pub fn block(&self, i: usize, j: usize) -> Matrix<F> {
        self.d.submatrix(self.range(i), self.range(j))
    }

    /// Distinct homological labels, or a single dummy class when unlabelled.
    pub(crate) fn label_classes(&self) -> Vec<Option<i64>> {
        match &self.hdeg {
            None => vec![None],
            Some(l) => {
                let mut v: Vec<i64> = l.clone();
                v.sort_unstable();
                v.dedup();
                v.into_iter().map(Some).collect()
            }
        }
    }

    /// Indices (relative to `offset`) among `range` with the given label.
    pub(crate) fn with_label(&self, range: Range<usize>, label: Option<i64>) -> Vec<usize> {
        let start = range.start;
        range
            .filter(|&k| match (label, &self.hdeg) {
                (Some(h), Some(l)) => l[k] == h,
                _ => true,
            })
            .map(|k| k - start)
            .collect()
    }
}

fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut o = vec![0];
    for d in dims {
        o.push(o.last().unwrap() + d);
    }
    o
}
