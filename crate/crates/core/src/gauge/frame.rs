//! Invertible matrix fields used as changes of frame.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{CMat, MatrixField};
use crate::grid::GridSpec;
use crate::mat::{condition_number, dist_to_unitary, unitarity_defect};

/// Largest node condition number accepted for a frame.
pub const MAX_CONDITION: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    Unitary,
    Invertible,
}

#[derive(Debug, Clone)]
pub struct GaugeFrame {
    pub values: MatrixField,
    pub kind: FrameKind,
    /// Largest node condition number over the support.
    pub condition: f64,
}

impl GaugeFrame {
    /// Wrap `values`, failing with `SingularFrame` at the first ill-conditioned node.
    pub fn new(values: MatrixField, kind: FrameKind) -> Result<Self> {
        let grid = values.grid().clone();
        let mut condition = 1.0f64;
        for k in 0..grid.len() {
            if !grid.in_support(k) {
                continue;
            }
            let c = condition_number(&values.at(k));
            if !(c <= MAX_CONDITION) {
                return Err(Error::SingularFrame { node: k });
            }
            condition = condition.max(c);
        }
        Ok(Self {
            values,
            kind,
            condition,
        })
    }

    pub fn identity(grid: &Arc<GridSpec>, m: usize) -> Self {
        Self {
            values: MatrixField::identity(grid, m),
            kind: FrameKind::Unitary,
            condition: 1.0,
        }
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        self.values.grid()
    }

    pub fn m(&self) -> usize {
        self.values.m()
    }

    pub fn at(&self, k: usize) -> CMat {
        self.values.at(k)
    }

    /// Node-wise inverse (conjugate transpose for unitary frames).
    pub fn inverse(&self) -> MatrixField {
        match self.kind {
            FrameKind::Unitary => self.values.adjoint(),
            FrameKind::Invertible => self.values.map_nodes(self.m(), self.m(), |_, a| {
                a.try_inverse()
                    .expect("conditioning checked at construction")
            }),
        }
    }

    /// Largest `max_k |sigma_k - 1|` over `nodes`.
    pub fn max_dist_to_unitary_on(&self, nodes: &[usize]) -> f64 {
        nodes
            .iter()
            .map(|&k| dist_to_unitary(&self.at(k)))
            .fold(0.0, f64::max)
    }

    pub fn max_dist_to_unitary(&self) -> f64 {
        self.max_dist_to_unitary_on(self.grid().interior())
    }

    /// Largest `||P^* P - I||_F` over the support.
    pub fn max_unitarity_defect(&self) -> f64 {
        let g = self.grid();
        (0..g.len())
            .filter(|&k| g.in_support(k))
            .map(|k| unitarity_defect(&self.at(k)))
            .fold(0.0, f64::max)
    }

    /// Largest `||Q - I||_F` over `nodes`.
    pub fn max_dist_to_identity_on(&self, nodes: &[usize]) -> f64 {
        let m = self.m();
        nodes
            .iter()
            .map(|&k| (self.at(k) - CMat::identity(m, m)).norm())
            .fold(0.0, f64::max)
    }

    /// Frame product `self * other`, node-wise.
    pub fn compose(&self, other: &GaugeFrame) -> Result<GaugeFrame> {
        let values = self.values.matmul(&other.values)?;
        let kind = if self.kind == FrameKind::Unitary && other.kind == FrameKind::Unitary {
            FrameKind::Unitary
        } else {
            FrameKind::Invertible
        };
        GaugeFrame::new(values, kind)
    }
}
