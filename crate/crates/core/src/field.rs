//! Node-valued fields on a [`GridSpec`].
//!
//! Every field stores a small complex matrix per node, row-major, in one flat
//! buffer. Scalars are `1x1`, `C^m` vectors are `m x 1`. Values at exterior
//! nodes are kept at exactly zero by every constructor and operator here.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

pub type CMat = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct MatrixField {
    grid: Arc<GridSpec>,
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// A scalar field is a `1x1` matrix field.
pub type ScalarField = MatrixField;

impl MatrixField {
    pub fn zeros_shaped(grid: &Arc<GridSpec>, rows: usize, cols: usize) -> Self {
        Self {
            grid: grid.clone(),
            rows,
            cols,
            data: vec![ZERO; grid.len() * rows * cols],
        }
    }

    pub fn zeros(grid: &Arc<GridSpec>, m: usize) -> Self {
        Self::zeros_shaped(grid, m, m)
    }

    pub fn scalar_zeros(grid: &Arc<GridSpec>) -> Self {
        Self::zeros_shaped(grid, 1, 1)
    }

    pub fn identity(grid: &Arc<GridSpec>, m: usize) -> Self {
        Self::from_fn(grid, m, m, |_, _| CMat::identity(m, m))
    }

    /// Evaluate `f(node, z)` at every interior and boundary node.
    pub fn from_fn(
        grid: &Arc<GridSpec>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, Complex64) -> CMat,
    ) -> Self {
        let mut out = Self::zeros_shaped(grid, rows, cols);
        for k in 0..grid.len() {
            if grid.in_support(k) {
                let v = f(k, grid.z(k));
                out.set(k, &v);
            }
        }
        out
    }

    pub fn scalar_from_fn(grid: &Arc<GridSpec>, mut f: impl FnMut(Complex64) -> Complex64) -> Self {
        let mut out = Self::scalar_zeros(grid);
        for k in 0..grid.len() {
            if grid.in_support(k) {
                out.data[k] = f(grid.z(k));
            }
        }
        out
    }

    /// Build from a raw buffer; exterior entries are forced to zero.
    pub fn from_raw(
        grid: &Arc<GridSpec>,
        rows: usize,
        cols: usize,
        mut data: Vec<Complex64>,
    ) -> Result<Self> {
        let w = rows * cols;
        if data.len() != grid.len() * w {
            return Err(Error::DimensionMismatch(format!(
                "buffer of {} values for {} nodes of width {w}",
                data.len(),
                grid.len()
            )));
        }
        for k in 0..grid.len() {
            if !grid.in_support(k) {
                data[k * w..(k + 1) * w].fill(ZERO);
            }
        }
        Ok(Self {
            grid: grid.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Fiber dimension (row count).
    pub fn m(&self) -> usize {
        self.rows
    }

    pub fn width(&self) -> usize {
        self.rows * self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn node(&self, k: usize) -> &[Complex64] {
        let w = self.width();
        &self.data[k * w..(k + 1) * w]
    }

    pub fn node_mut(&mut self, k: usize) -> &mut [Complex64] {
        let w = self.width();
        &mut self.data[k * w..(k + 1) * w]
    }

    pub fn at(&self, k: usize) -> CMat {
        CMat::from_row_slice(self.rows, self.cols, self.node(k))
    }

    pub fn set(&mut self, k: usize, v: &CMat) {
        debug_assert_eq!((v.nrows(), v.ncols()), (self.rows, self.cols));
        let cols = self.cols;
        let slot = self.node_mut(k);
        for r in 0..v.nrows() {
            for c in 0..cols {
                slot[r * cols + c] = v[(r, c)];
            }
        }
    }

    /// First entry of node `k`; the value of a scalar field.
    pub fn value(&self, k: usize) -> Complex64 {
        self.data[k * self.width()]
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols || self.grid.n() != other.grid.n() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} on n={} vs {}x{} on n={}",
                self.rows,
                self.cols,
                self.grid.n(),
                other.rows,
                other.cols,
                other.grid.n()
            )));
        }
        Ok(())
    }

    /// Apply `f` at every support node, producing a field of the returned shape.
    pub fn map_nodes(
        &self,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, CMat) -> CMat,
    ) -> Self {
        let mut out = Self::zeros_shaped(&self.grid, rows, cols);
        for k in 0..self.grid.len() {
            if self.grid.in_support(k) {
                let v = f(k, self.at(k));
                out.set(k, &v);
            }
        }
        out
    }

    pub fn zip_with(
        &self,
        other: &Self,
        mut f: impl FnMut(Complex64, Complex64) -> Complex64,
    ) -> Self {
        debug_assert_eq!(self.data.len(), other.data.len());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self {
            grid: self.grid.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let data = self.data.iter().map(|&a| a * c).collect();
        Self {
            grid: self.grid.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Node-wise matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "node product {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.map_nodes(self.rows, other.cols, |k, a| a * other.at(k)))
    }

    pub fn adjoint(&self) -> Self {
        self.map_nodes(self.cols, self.rows, |_, a| a.adjoint())
    }

    /// Cell-area inner product `sum_interior h^2 Re tr(a^* b)`.
    pub fn inner(&self, other: &Self) -> f64 {
        let w = self.width();
        let s: f64 = self
            .grid
            .interior()
            .iter()
            .map(|&k| {
                self.data[k * w..(k + 1) * w]
                    .iter()
                    .zip(&other.data[k * w..(k + 1) * w])
                    .map(|(a, b)| (a.conj() * b).re)
                    .sum::<f64>()
            })
            .sum();
        s * self.grid.cell_area()
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// L2 norm restricted to the listed nodes.
    pub fn norm_l2_on(&self, nodes: &[usize]) -> f64 {
        let s: f64 = nodes
            .iter()
            .map(|&k| self.node(k).iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum();
        (s * self.grid.cell_area()).sqrt()
    }

    pub fn norm_l1_on(&self, nodes: &[usize]) -> f64 {
        nodes.iter().map(|&k| self.node_norm(k)).sum::<f64>() * self.grid.cell_area()
    }

    /// Frobenius norm of node `k`.
    pub fn node_norm(&self, k: usize) -> f64 {
        self.node(k)
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius norm at every node (zero outside the support).
    pub fn node_norms(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|k| self.node_norm(k)).collect()
    }

    pub fn max_norm_on(&self, nodes: &[usize]) -> f64 {
        nodes.iter().map(|&k| self.node_norm(k)).fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.max_norm_on(self.grid.interior())
    }

    /// Largest entry of `M + M^*` over support nodes.
    pub fn skew_hermitian_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let m = self.rows;
        let mut worst = 0.0f64;
        for k in 0..self.grid.len() {
            let v = self.node(k);
            for r in 0..m {
                for c in 0..m {
                    worst = worst.max((v[r * m + c] + v[c * m + r].conj()).norm());
                }
            }
        }
        worst
    }
}

/// `cx dx + cy dy` with matrix-valued coefficients.
#[derive(Debug, Clone)]
pub struct MatrixOneForm {
    pub cx: MatrixField,
    pub cy: MatrixField,
}

impl MatrixOneForm {
    pub fn new(cx: MatrixField, cy: MatrixField) -> Result<Self> {
        cx.same_shape(&cy)?;
        Ok(Self { cx, cy })
    }

    pub fn zeros(grid: &Arc<GridSpec>, m: usize) -> Self {
        Self {
            cx: MatrixField::zeros(grid, m),
            cy: MatrixField::zeros(grid, m),
        }
    }

    /// Evaluate `f(node, z) -> (cx, cy)` on the support.
    pub fn from_fn(
        grid: &Arc<GridSpec>,
        m: usize,
        mut f: impl FnMut(usize, Complex64) -> (CMat, CMat),
    ) -> Self {
        let mut out = Self::zeros(grid, m);
        for k in 0..grid.len() {
            if grid.in_support(k) {
                let (a, b) = f(k, grid.z(k));
                out.cx.set(k, &a);
                out.cy.set(k, &b);
            }
        }
        out
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        self.cx.grid()
    }

    pub fn m(&self) -> usize {
        self.cx.m()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            cx: self.cx.add(&other.cx),
            cy: self.cy.add(&other.cy),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            cx: self.cx.sub(&other.cx),
            cy: self.cy.sub(&other.cy),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            cx: self.cx.scale(c),
            cy: self.cy.scale(c),
        }
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.cx.inner(&other.cx) + self.cy.inner(&other.cy)
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    pub fn norm_l2_on(&self, nodes: &[usize]) -> f64 {
        self.cx.norm_l2_on(nodes).hypot(self.cy.norm_l2_on(nodes))
    }

    /// Pointwise `sqrt(|cx|^2 + |cy|^2)`.
    pub fn node_norms(&self) -> Vec<f64> {
        self.cx
            .node_norms()
            .iter()
            .zip(self.cy.node_norms())
            .map(|(a, b)| a.hypot(b))
            .collect()
    }

    pub fn max_norm(&self) -> f64 {
        let norms = self.node_norms();
        self.grid()
            .interior()
            .iter()
            .map(|&k| norms[k])
            .fold(0.0, f64::max)
    }

    pub fn skew_hermitian_defect(&self) -> f64 {
        self.cx
            .skew_hermitian_defect()
            .max(self.cy.skew_hermitian_defect())
    }

    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        self.skew_hermitian_defect() <= tol
    }

    /// Errors unless both components are skew-Hermitian to `1e-12` per entry.
    pub fn require_skew_hermitian(&self) -> Result<()> {
        let defect = self.skew_hermitian_defect();
        if defect > 1e-12 {
            return Err(Error::NotSkewHermitian { defect });
        }
        Ok(())
    }
}

/// `c dx ^ dy`.
#[derive(Debug, Clone)]
pub struct MatrixTwoForm {
    pub c: MatrixField,
}

/// A `C^m`-valued (1,0)-form `c dz`, stored as an `m x 1` field.
#[derive(Debug, Clone)]
pub struct VectorOneForm10 {
    pub c: MatrixField,
}

impl VectorOneForm10 {
    pub fn from_fn(
        grid: &Arc<GridSpec>,
        m: usize,
        mut f: impl FnMut(usize, Complex64) -> Vec<Complex64>,
    ) -> Self {
        Self {
            c: MatrixField::from_fn(grid, m, 1, |k, z| {
                let v = f(k, z);
                CMat::from_column_slice(m, 1, &v)
            }),
        }
    }

    pub fn m(&self) -> usize {
        self.c.rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<GridSpec> {
        Arc::new(GridSpec::new(17).unwrap())
    }

    #[test]
    fn exterior_stays_zero() {
        let g = grid();
        let f = MatrixField::scalar_from_fn(&g, |_| Complex64::new(1.0, 0.0));
        for k in 0..g.len() {
            if !g.in_support(k) {
                assert_eq!(f.value(k), ZERO);
            }
        }
        let raw = MatrixField::from_raw(&g, 1, 1, vec![Complex64::new(2.0, 0.0); g.len()]).unwrap();
        assert_eq!(raw.value(0), ZERO);
    }

    #[test]
    fn constant_norm_is_sqrt_measure() {
        let g = grid();
        let f = MatrixField::scalar_from_fn(&g, |_| Complex64::new(0.0, 1.0));
        assert!((f.norm_l2() - g.measure().sqrt()).abs() < 1e-12);
    }

    #[test]
    fn skew_defect_detects_hermitian_part() {
        let g = grid();
        let i = Complex64::new(0.0, 1.0);
        let skew = MatrixField::from_fn(&g, 2, 2, |_, _| {
            CMat::from_row_slice(2, 2, &[i, 1.0.into(), (-1.0).into(), ZERO])
        });
        assert_eq!(skew.skew_hermitian_defect(), 0.0);
        let herm = MatrixField::from_fn(&g, 2, 2, |_, _| CMat::identity(2, 2));
        assert!((herm.skew_hermitian_defect() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let g = grid();
        let a = MatrixField::zeros(&g, 2);
        let b = MatrixField::zeros(&g, 3);
        assert!(MatrixOneForm::new(a.clone(), b.clone()).is_err());
        assert!(a.matmul(&b).is_err());
    }
}
