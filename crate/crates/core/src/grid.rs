//! Uniform Cartesian grid over `[-1, 1]^2` with a mask for the unit disc.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// `|z| < 1 - h/2`; carries unknowns and quadrature weight.
    Interior,
    /// Not interior, but 4-adjacent to an interior node; carries boundary data.
    Boundary,
    Exterior,
}

/// Grid axis, used for derivative stencils and circle crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone)]
pub struct GridSpec {
    n: usize,
    h: f64,
    kinds: Vec<NodeKind>,
    interior: Vec<usize>,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 5 {
            return Err(Error::Config(format!(
                "grid needs at least 5 nodes per axis, got {n}"
            )));
        }
        let h = 2.0 / (n - 1) as f64;
        let coord = |i: usize| -1.0 + i as f64 * h;
        let mut kinds = vec![NodeKind::Exterior; n * n];
        for j in 0..n {
            for i in 0..n {
                if coord(i).hypot(coord(j)) < 1.0 - 0.5 * h {
                    kinds[j * n + i] = NodeKind::Interior;
                }
            }
        }
        for j in 0..n {
            for i in 0..n {
                let k = j * n + i;
                if kinds[k] == NodeKind::Interior {
                    continue;
                }
                let touches = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .any(|&(di, dj)| {
                        let (a, b) = (i as i64 + di, j as i64 + dj);
                        a >= 0
                            && b >= 0
                            && (a as usize) < n
                            && (b as usize) < n
                            && kinds[b as usize * n + a as usize] == NodeKind::Interior
                    });
                if touches {
                    kinds[k] = NodeKind::Boundary;
                }
            }
        }
        let interior = (0..n * n)
            .filter(|&k| kinds[k] == NodeKind::Interior)
            .collect::<Vec<_>>();
        if interior.is_empty() {
            return Err(Error::EmptyMask);
        }
        Ok(Self {
            n,
            h,
            kinds,
            interior,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    /// `(i, j)` column/row of node `k`.
    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.n, k / self.n)
    }

    pub fn x(&self, i: usize) -> f64 {
        -1.0 + i as f64 * self.h
    }

    pub fn point(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.coords(k);
        (self.x(i), self.x(j))
    }

    pub fn z(&self, k: usize) -> Complex64 {
        let (x, y) = self.point(k);
        Complex64::new(x, y)
    }

    pub fn kind(&self, k: usize) -> NodeKind {
        self.kinds[k]
    }

    pub fn is_interior(&self, k: usize) -> bool {
        self.kinds[k] == NodeKind::Interior
    }

    /// Interior or boundary.
    pub fn in_support(&self, k: usize) -> bool {
        self.kinds[k] != NodeKind::Exterior
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Total cell area of interior nodes; the discrete measure of the disc.
    pub fn measure(&self) -> f64 {
        self.interior.len() as f64 * self.cell_area()
    }

    /// Neighbor of `k` one step along `axis` in direction `sign` (+1 / -1).
    pub fn neighbor(&self, k: usize, axis: Axis, sign: i64) -> Option<usize> {
        let (i, j) = self.coords(k);
        let (a, b) = match axis {
            Axis::X => (i as i64 + sign, j as i64),
            Axis::Y => (i as i64, j as i64 + sign),
        };
        if a < 0 || b < 0 || a as usize >= self.n || b as usize >= self.n {
            None
        } else {
            Some(b as usize * self.n + a as usize)
        }
    }

    /// Distance (in units of `h`) from node `k` to the unit circle along `axis`
    /// in direction `sign`. Only meaningful for nodes strictly inside the circle.
    pub fn crossing_fraction(&self, k: usize, axis: Axis, sign: i64) -> f64 {
        let (x, y) = self.point(k);
        let (along, across) = match axis {
            Axis::X => (x, y),
            Axis::Y => (y, x),
        };
        let reach = (1.0 - across * across).max(0.0).sqrt();
        let dist = if sign > 0 {
            reach - along
        } else {
            reach + along
        };
        (dist / self.h).max(1e-6)
    }

    /// Interior nodes with `|z| <= radius`.
    pub fn interior_within(&self, radius: f64) -> Vec<usize> {
        self.interior
            .iter()
            .copied()
            .filter(|&k| self.z(k).norm() <= radius)
            .collect()
    }

    /// Interior-margin set `U = {|z| <= 1 - margin_cells * h}`.
    pub fn margin_set(&self, margin_cells: f64) -> Vec<usize> {
        self.interior_within(1.0 - margin_cells * self.h)
    }

    /// Fraction of the grid edge from `k` to its `+axis` neighbor lying in the closed unit disc.
    pub fn edge_fraction_in_disc(&self, k: usize, axis: Axis) -> f64 {
        let (x, y) = self.point(k);
        let (along, across) = match axis {
            Axis::X => (x, y),
            Axis::Y => (y, x),
        };
        if across.abs() >= 1.0 {
            return 0.0;
        }
        let reach = (1.0 - across * across).sqrt();
        let lo = along.max(-reach);
        let hi = (along + self.h).min(reach);
        ((hi - lo) / self.h).clamp(0.0, 1.0)
    }
}
