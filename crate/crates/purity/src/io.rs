//! JSON file formats.
//!
//! - vector: `{"n": 3, "entries": [0.2, 0.5, 0.3]}`
//! - matrix: `{"d": 2, "entries": [[[re, im], [re, im]], [[re, im], [re, im]]]}`, row-major
//! - channel: `{"d_in": 2, "d_out": 2, "kraus": [matrix, ...]}` or `{"choi": matrix}`
//! - tomography input: `{"basis": [matrix, ...], "frequencies": [...], "t": 0.8}`

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use purity_core::channel::ChannelRep;
use purity_core::linalg::{c64, Matrix};
use purity_core::ObjectiveVector;

use crate::error::{CliError, Result};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFile {
    pub n: usize,
    pub entries: Vec<f64>,
}

impl VectorFile {
    pub fn to_objective(&self) -> Result<ObjectiveVector> {
        if self.entries.len() != self.n {
            return Err(CliError::Validation(format!(
                "vector declares n = {} but has {} entries",
                self.n,
                self.entries.len()
            )));
        }
        Ok(ObjectiveVector::new(self.entries.clone())?)
    }
}

/// Matrix with `d` rows of `[re, im]` pairs. Rows of a Kraus operator may be
/// longer or shorter than `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub d: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &Matrix) -> Self {
        let entries = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self { d: m.rows(), entries }
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        if self.entries.len() != self.d {
            return Err(CliError::Validation(format!(
                "matrix declares d = {} but has {} rows",
                self.d,
                self.entries.len()
            )));
        }
        let cols = self.entries.first().map_or(0, Vec::len);
        if self.entries.iter().any(|r| r.len() != cols) {
            return Err(CliError::Validation("matrix rows have different lengths".into()));
        }
        let data = self.entries.iter().flatten().map(|[re, im]| c64(*re, *im)).collect();
        Matrix::from_vec(self.d, cols, data).ok_or_else(|| CliError::Validation("bad matrix shape".into()))
    }

    /// Square matrix.
    pub fn to_square(&self) -> Result<Matrix> {
        let m = self.to_matrix()?;
        if !m.is_square() {
            return Err(CliError::Validation(format!("expected a {0}x{0} matrix", self.d)));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelFile {
    Kraus { d_in: usize, d_out: usize, kraus: Vec<MatrixFile> },
    Choi {
        #[serde(default)]
        d_in: Option<usize>,
        #[serde(default)]
        d_out: Option<usize>,
        choi: MatrixFile,
    },
}

impl ChannelFile {
    pub fn to_channel(&self) -> Result<ChannelRep> {
        match self {
            ChannelFile::Kraus { d_in, d_out, kraus } => {
                let ks = kraus.iter().map(MatrixFile::to_matrix).collect::<Result<Vec<_>>>()?;
                Ok(ChannelRep::from_kraus(*d_in, *d_out, ks)?)
            }
            ChannelFile::Choi { d_in, d_out, choi } => {
                let j = choi.to_square()?;
                let (d_in, d_out) = match (d_in, d_out) {
                    (Some(a), Some(b)) => (*a, *b),
                    (Some(a), None) => (*a, j.rows() / a.max(&1)),
                    (None, Some(b)) => (j.rows() / b.max(&1), *b),
                    (None, None) => {
                        let d = (j.rows() as f64).sqrt().round() as usize;
                        (d, d)
                    }
                };
                Ok(ChannelRep::from_choi(d_in, d_out, j)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomoFile {
    pub basis: Vec<MatrixFile>,
    pub frequencies: Vec<f64>,
    pub t: f64,
}

/// Output of `purity solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub n: usize,
    pub t: f64,
    pub solver: String,
    pub optimum: f64,
    pub optimizer: Vec<f64>,
    pub purity: f64,
    pub regime: String,
    pub iterations: usize,
    pub recursion_depth: usize,
}
