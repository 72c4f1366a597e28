//! JSON schemas for matrices, channels, spans and structures.
//!
//! Matrices are `{"re": [[..]], "im": [[..]]}` in row-major order. Parsing reports the field
//! path of the first malformed entry.

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraStructure;
use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{c, Matrix};
use crate::opspace::{orthonormalize_span, OperatorSpan};
use crate::tol;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        let rows = |f: fn(&num_complex::Complex64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            re: rows(|z| z.re),
            im: Some(rows(|z| z.im)),
        }
    }
}

impl MatrixJson {
    /// Converts to a matrix; `path` names the field in diagnostics. A missing `im` means zero.
    pub fn to_matrix(&self, path: &str) -> Result<Matrix> {
        let rows = self.re.len();
        if rows == 0 {
            return Err(Error::Parse(format!("{path}.re: matrix has no rows")));
        }
        let cols = self.re[0].len();
        if cols == 0 {
            return Err(Error::Parse(format!("{path}.re[0]: matrix has no columns")));
        }
        for (i, row) in self.re.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Parse(format!(
                    "{path}.re[{i}]: expected {cols} entries, found {}",
                    row.len()
                )));
            }
        }
        if let Some(im) = &self.im {
            if im.len() != rows {
                return Err(Error::Parse(format!(
                    "{path}.im: expected {rows} rows, found {}",
                    im.len()
                )));
            }
            for (i, row) in im.iter().enumerate() {
                if row.len() != cols {
                    return Err(Error::Parse(format!(
                        "{path}.im[{i}]: expected {cols} entries, found {}",
                        row.len()
                    )));
                }
            }
        }
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let re = self.re[i][j];
                let im = self.im.as_ref().map_or(0.0, |im| im[i][j]);
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::Parse(format!("{path}[{i}][{j}]: non-finite entry")));
                }
                m[(i, j)] = c(re, im);
            }
        }
        Ok(m)
    }
}

fn matrices(list: &[MatrixJson], path: &str) -> Result<Vec<Matrix>> {
    list.iter()
        .enumerate()
        .map(|(i, m)| m.to_matrix(&format!("{path}[{i}]")))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

impl ChannelJson {
    pub fn to_channel(&self) -> Result<KrausChannel> {
        if self.kraus.is_empty() {
            return Err(Error::Parse("kraus: empty Kraus list".into()));
        }
        let kraus = matrices(&self.kraus, "kraus")?;
        for (i, k) in kraus.iter().enumerate() {
            if k.nrows() != self.dim_out || k.ncols() != self.dim_in {
                return Err(Error::Parse(format!(
                    "kraus[{i}]: expected {}x{} (dim_out x dim_in), found {}x{}",
                    self.dim_out,
                    self.dim_in,
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        KrausChannel::new(kraus)
    }
}

impl From<&KrausChannel> for ChannelJson {
    fn from(ch: &KrausChannel) -> Self {
        Self {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch.kraus().iter().map(Into::into).collect(),
        }
    }
}

/// A list of operators spanning a space; `generate` asks for the generated algebra instead.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpanJson {
    pub basis: Vec<MatrixJson>,
    #[serde(default)]
    pub generate: bool,
}

impl SpanJson {
    pub fn to_matrices(&self) -> Result<Vec<Matrix>> {
        if self.basis.is_empty() {
            return Err(Error::Parse("basis: empty operator list".into()));
        }
        let mats = matrices(&self.basis, "basis")?;
        let (r, c) = mats[0].shape();
        if r != c {
            return Err(Error::Parse(format!(
                "basis[0]: expected a square matrix, found {r}x{c}"
            )));
        }
        for (i, m) in mats.iter().enumerate() {
            if m.shape() != (r, r) {
                return Err(Error::Parse(format!(
                    "basis[{i}]: expected {r}x{r}, found {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(mats)
    }

    /// The orthonormalized span, or the generated algebra when `generate` is set.
    pub fn to_span(&self) -> Result<OperatorSpan> {
        let mats = self.to_matrices()?;
        if self.generate {
            crate::algebra::generate_algebra(&mats, tol::RANK)
        } else {
            orthonormalize_span(&mats, tol::RANK)
        }
    }
}

impl From<&OperatorSpan> for SpanJson {
    fn from(s: &OperatorSpan) -> Self {
        Self {
            basis: s.basis().iter().map(Into::into).collect(),
            generate: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorJson {
    pub projector: MatrixJson,
    pub n: usize,
    pub m: usize,
    pub frame: MatrixJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureJson {
    pub unit: MatrixJson,
    pub sectors: Vec<SectorJson>,
}

impl From<&AlgebraStructure> for StructureJson {
    fn from(s: &AlgebraStructure) -> Self {
        Self {
            unit: (&s.unit).into(),
            sectors: s
                .sectors
                .iter()
                .map(|k| SectorJson {
                    projector: (&k.projector).into(),
                    n: k.n,
                    m: k.m,
                    frame: (&k.frame).into(),
                })
                .collect(),
        }
    }
}

/// Parses JSON text into `T`, reporting line and column on syntax or schema errors.
pub fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!(
            "{what}: line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}
