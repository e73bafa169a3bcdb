//! Self-describing text documents for workspaces and matrices.
//!
//! A workspace file records the dimension, the weight spectrum, an optional
//! eigenbasis, and named operator matrices. Complex entries are serialized as
//! `[re, im]` pairs in row-major order; floating-point values use shortest
//! round-trip decimal printing, so write-then-read is bit exact.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{CMatrix, C64};
use crate::weighted::WeightedSpace;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<[f64; 2]>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut entries = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixDoc { rows: m.nrows(), cols: m.ncols(), entries }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::InvalidSpec(format!(
                "matrix document claims {}x{} but carries {} entries",
                self.rows,
                self.cols,
                self.entries.len()
            )));
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.entries[i * self.cols + j];
            C64::new(re, im)
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WorkspaceDoc {
    pub dim: usize,
    pub weight_spectrum: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub operators: BTreeMap<String, MatrixDoc>,
}

impl WorkspaceDoc {
    pub fn new(dim: usize, weight_spectrum: Vec<f64>) -> Self {
        WorkspaceDoc { dim, weight_spectrum, basis: None, operators: BTreeMap::new() }
    }

    pub fn insert_operator(&mut self, name: &str, m: &CMatrix) {
        self.operators.insert(name.to_string(), MatrixDoc::from_matrix(m));
    }

    pub fn operator(&self, name: &str) -> Result<CMatrix> {
        self.operators
            .get(name)
            .ok_or_else(|| Error::InvalidSpec(format!("workspace has no operator named {name:?}")))?
            .to_matrix()
    }

    /// Rebuilds the weighted space from the stored spectrum and basis.
    pub fn to_space(&self) -> Result<WeightedSpace> {
        if self.weight_spectrum.len() != self.dim {
            return Err(Error::InvalidSpec(format!(
                "dimension {} does not match spectrum length {}",
                self.dim,
                self.weight_spectrum.len()
            )));
        }
        let basis = self.basis.as_ref().map(|b| b.to_matrix()).transpose()?;
        WeightedSpace::from_spectrum(&self.weight_spectrum, basis.as_ref())
    }
}

pub fn write_workspace(path: &Path, doc: &WorkspaceDoc) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_workspace(path: &Path) -> Result<WorkspaceDoc> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_matrix(path: &Path, m: &CMatrix) -> Result<()> {
    let text = serde_json::to_string_pretty(&MatrixDoc::from_matrix(m))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    let text = std::fs::read_to_string(path)?;
    let doc: MatrixDoc = serde_json::from_str(&text)?;
    doc.to_matrix()
}
