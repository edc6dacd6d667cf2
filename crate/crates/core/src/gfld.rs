//! `GFLD` field dumps.
//!
//! An ASCII header line `GFLD n m kind`, followed by node values in row-major
//! node order (`k = j*n + i`, `x = -1 + i h`, `y = -1 + j h`). Each node writes
//! its entries row-major as little-endian complex64 (two `f32`: re, im). A
//! one-form writes the `dx` block then the `dy` block per node.

use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{MatrixField, MatrixOneForm};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Matrix,
    Vector,
    OneForm,
    TwoForm,
}

impl FieldKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Matrix => "matrix",
            FieldKind::Vector => "vector",
            FieldKind::OneForm => "oneform",
            FieldKind::TwoForm => "twoform",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "scalar" => FieldKind::Scalar,
            "matrix" => FieldKind::Matrix,
            "vector" => FieldKind::Vector,
            "oneform" => FieldKind::OneForm,
            "twoform" => FieldKind::TwoForm,
            other => return Err(Error::Format(format!("unknown kind {other:?}"))),
        })
    }

    /// Complex entries per node for fiber dimension `m`.
    pub fn entries(self, m: usize) -> usize {
        match self {
            FieldKind::Scalar => 1,
            FieldKind::Vector => m,
            FieldKind::Matrix | FieldKind::TwoForm => m * m,
            FieldKind::OneForm => 2 * m * m,
        }
    }
}

/// A decoded dump: the header plus raw node entries.
#[derive(Debug, Clone)]
pub struct Dump {
    pub n: usize,
    pub m: usize,
    pub kind: FieldKind,
    pub values: Vec<Complex64>,
}

pub fn write_raw<W: Write>(
    mut w: W,
    n: usize,
    m: usize,
    kind: FieldKind,
    values: &[Complex64],
) -> Result<()> {
    writeln!(w, "GFLD {n} {m} {}", kind.as_str())?;
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&(v.re as f32).to_le_bytes());
        bytes.extend_from_slice(&(v.im as f32).to_le_bytes());
    }
    w.write_all(&bytes)?;
    Ok(())
}

pub fn write_field<W: Write>(w: W, f: &MatrixField, kind: FieldKind) -> Result<()> {
    let m = f.rows();
    write_raw(w, f.grid().n(), m, kind, f.data())
}

pub fn write_one_form<W: Write>(w: W, f: &MatrixOneForm) -> Result<()> {
    let width = f.cx.width();
    let mut values = Vec::with_capacity(2 * f.cx.data().len());
    for k in 0..f.grid().len() {
        values.extend_from_slice(&f.cx.data()[k * width..(k + 1) * width]);
        values.extend_from_slice(&f.cy.data()[k * width..(k + 1) * width]);
    }
    write_raw(w, f.grid().n(), f.m(), FieldKind::OneForm, &values)
}

pub fn read<R: BufRead>(mut r: R) -> Result<Dump> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "GFLD" {
        return Err(Error::Format(format!("bad header {:?}", header.trim_end())));
    }
    let n: usize = parts[1]
        .parse()
        .map_err(|_| Error::Format("bad n".into()))?;
    let m: usize = parts[2]
        .parse()
        .map_err(|_| Error::Format("bad m".into()))?;
    let kind = FieldKind::parse(parts[3])?;
    let count = n * n * kind.entries(m);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != count * 8 {
        return Err(Error::Format(format!(
            "expected {} bytes of values, found {}",
            count * 8,
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    Ok(Dump { n, m, kind, values })
}

impl Dump {
    /// Pointwise magnitude of the dumped object at every node.
    pub fn node_norms(&self) -> Vec<f64> {
        let w = self.kind.entries(self.m);
        self.values
            .chunks_exact(w)
            .map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    /// Rebuild as a matrix field (one-forms are not representable here).
    pub fn to_field(&self, grid: &Arc<GridSpec>) -> Result<MatrixField> {
        let (rows, cols) = match self.kind {
            FieldKind::Scalar => (1, 1),
            FieldKind::Vector => (self.m, 1),
            FieldKind::Matrix | FieldKind::TwoForm => (self.m, self.m),
            FieldKind::OneForm => {
                return Err(Error::Format("one-form dump is not a single field".into()))
            }
        };
        MatrixField::from_raw(grid, rows, cols, self.values.clone())
    }
}
