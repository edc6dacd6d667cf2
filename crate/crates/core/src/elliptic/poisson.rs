//! Poisson problems on the masked disc.
//!
//! Dirichlet problems put the zero boundary value on the unit circle itself:
//! a stencil arm from an interior node that leaves the interior is cut where
//! it meets the circle, at distance `theta h`, and contributes `u_k / theta`
//! (ghost-fluid treatment). Unknowns are all support nodes strictly inside
//! the circle, so every cut arm is at most one cell long. This keeps the
//! operator symmetric and the solution second-order accurate despite the
//! staircase mask. Returned fields are zero on boundary nodes.

use num_complex::Complex64;

use super::cg::{pcg, CgReport};
use crate::calculus::partial;
use crate::error::{Error, Result};
use crate::field::{MatrixField, MatrixOneForm};
use crate::grid::{Axis, GridSpec};

const DIRS: [(Axis, i64); 4] = [(Axis::X, 1), (Axis::X, -1), (Axis::Y, 1), (Axis::Y, -1)];

pub const CG_TOL: f64 = 1e-10;

/// CG iteration cap for a grid with `n` nodes per axis.
pub fn iteration_cap(n: usize) -> usize {
    20 * n
}

/// Symmetric positive operator `-h^2 Lap` on its unknown nodes.
struct Stencil {
    nodes: Vec<usize>,
    neighbors: Vec<[usize; 4]>,
    diag: Vec<f64>,
}

const NONE: usize = usize::MAX;

impl Stencil {
    fn dirichlet(grid: &GridSpec) -> Self {
        Self::build(grid, true)
    }

    fn neumann(grid: &GridSpec) -> Self {
        Self::build(grid, false)
    }

    fn build(grid: &GridSpec, dirichlet: bool) -> Self {
        let nodes: Vec<usize> = if dirichlet {
            (0..grid.len())
                .filter(|&k| grid.in_support(k) && grid.z(k).norm() < 1.0)
                .collect()
        } else {
            grid.interior().to_vec()
        };
        let mut slot = vec![NONE; grid.len()];
        for (u, &k) in nodes.iter().enumerate() {
            slot[k] = u;
        }
        let mut neighbors = Vec::with_capacity(nodes.len());
        let mut diag = Vec::with_capacity(nodes.len());
        for &k in &nodes {
            let mut nb = [NONE; 4];
            let mut d = 0.0;
            for (s, &(axis, sign)) in DIRS.iter().enumerate() {
                match grid.neighbor(k, axis, sign) {
                    Some(q) if slot[q] != NONE => {
                        nb[s] = slot[q];
                        d += 1.0;
                    }
                    _ if dirichlet => d += 1.0 / grid.crossing_fraction(k, axis, sign),
                    _ => {}
                }
            }
            neighbors.push(nb);
            diag.push(d);
        }
        Self {
            nodes,
            neighbors,
            diag,
        }
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (u, nb) in self.neighbors.iter().enumerate() {
            let mut v = x[u] * self.diag[u];
            for &q in nb {
                if q != NONE {
                    v -= x[q];
                }
            }
            y[u] = v;
        }
    }

    fn solve_entries(
        &self,
        grid: &GridSpec,
        rhs: &MatrixField,
        scale: f64,
    ) -> Result<(MatrixField, CgReport)> {
        let w = rhs.width();
        let mut out = MatrixField::zeros_shaped(rhs.grid(), rhs.rows(), rhs.cols());
        let mut worst = CgReport::default();
        for c in 0..w {
            let b: Vec<Complex64> = self
                .nodes
                .iter()
                .map(|&k| rhs.data()[k * w + c] * scale)
                .collect();
            let (x, rep) = pcg(
                |x, y| self.apply(x, y),
                &self.diag,
                &b,
                CG_TOL,
                iteration_cap(grid.n()),
            )?;
            for (u, &k) in self.nodes.iter().enumerate() {
                if grid.is_interior(k) {
                    out.data_mut()[k * w + c] = x[u];
                }
            }
            worst.iterations = worst.iterations.max(rep.iterations);
            worst.residual = worst.residual.max(rep.residual);
        }
        Ok((out, worst))
    }
}

/// Solve `Lap phi = rhs` in the disc with `phi = 0` on the unit circle.
///
/// Sign convention: `rhs = 1` gives `phi = (|z|^2 - 1) / 4`.
pub fn poisson_dirichlet(rhs: &MatrixField) -> Result<MatrixField> {
    poisson_dirichlet_report(rhs).map(|(f, _)| f)
}

pub fn poisson_dirichlet_report(rhs: &MatrixField) -> Result<(MatrixField, CgReport)> {
    let grid = rhs.grid().clone();
    let h2 = grid.cell_area();
    Stencil::dirichlet(&grid).solve_entries(&grid, rhs, -h2)
}

#[derive(Debug, Clone, Copy)]
pub struct NeumannOptions {
    /// Subtract the masked mean instead of rejecting incompatible data.
    pub auto_project: bool,
    /// Allowed `|mean| / ||rhs||_{L2}` without projection.
    pub tol_mean: f64,
}

impl Default for NeumannOptions {
    fn default() -> Self {
        Self {
            auto_project: false,
            tol_mean: 1e-8,
        }
    }
}

/// Solve `Lap a = rhs` with zero normal flux; the returned `a` has zero mean.
///
/// The discrete operator is the graph Laplacian on links between interior
/// nodes. Errors with `CompatibilityViolation` when `rhs` has nonzero mean
/// and `auto_project` is off.
pub fn poisson_neumann(rhs: &MatrixField, opts: NeumannOptions) -> Result<MatrixField> {
    let grid = rhs.grid().clone();
    let w = rhs.width();
    let interior = grid.interior();
    let count = interior.len() as f64;
    let mut centered = rhs.clone();
    let norm = rhs.norm_l2();
    for c in 0..w {
        let mean: Complex64 = interior
            .iter()
            .map(|&k| rhs.data()[k * w + c])
            .sum::<Complex64>()
            / count;
        if mean.norm() > opts.tol_mean * norm && !opts.auto_project {
            return Err(Error::CompatibilityViolation { mean: mean.norm() });
        }
        for &k in interior {
            centered.data_mut()[k * w + c] -= mean;
        }
    }
    for k in 0..grid.len() {
        if !grid.is_interior(k) {
            centered.node_mut(k).fill(Complex64::new(0.0, 0.0));
        }
    }
    let (mut a, _) = Stencil::neumann(&grid).solve_entries(&grid, &centered, -grid.cell_area())?;
    for c in 0..w {
        let mean: Complex64 = interior
            .iter()
            .map(|&k| a.data()[k * w + c])
            .sum::<Complex64>()
            / count;
        for &k in interior {
            a.data_mut()[k * w + c] -= mean;
        }
    }
    Ok(a)
}

/// The graph Laplacian used by [`poisson_neumann`], applied to interior values.
pub fn neumann_laplacian(f: &MatrixField) -> MatrixField {
    let grid = f.grid().clone();
    let st = Stencil::neumann(&grid);
    let w = f.width();
    let mut out = MatrixField::zeros_shaped(f.grid(), f.rows(), f.cols());
    let inv = -1.0 / grid.cell_area();
    for c in 0..w {
        let x: Vec<Complex64> = st.nodes.iter().map(|&k| f.data()[k * w + c]).collect();
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        st.apply(&x, &mut y);
        for (u, &k) in st.nodes.iter().enumerate() {
            out.data_mut()[k * w + c] = y[u] * inv;
        }
    }
    out
}

/// Gradient of a field that vanishes on the unit circle.
///
/// At interior nodes a stencil arm leaving the interior ends on the circle
/// (value 0, distance `theta h`) and the three-point formula for unequal
/// spacing is used; elsewhere this is the ordinary discrete gradient.
pub fn dirichlet_gradient(u: &MatrixField) -> MatrixOneForm {
    let grid = u.grid().clone();
    let w = u.width();
    let h = grid.h();
    let mut comps = [Axis::X, Axis::Y].map(|axis| partial(&grid, u.data(), w, axis));
    for (slot, axis) in comps.iter_mut().zip([Axis::X, Axis::Y]) {
        for &k in grid.interior() {
            let arm = |sign: i64| match grid.neighbor(k, axis, sign) {
                Some(q) if grid.is_interior(q) => (h, Some(q)),
                _ => (grid.crossing_fraction(k, axis, sign) * h, None),
            };
            let (h2, fwd) = arm(1);
            let (h1, bwd) = arm(-1);
            let cb = -h2 / (h1 * (h1 + h2));
            let c0 = (h2 - h1) / (h1 * h2);
            let cf = h1 / (h2 * (h1 + h2));
            for c in 0..w {
                let vb = bwd.map_or(Complex64::new(0.0, 0.0), |q| u.data()[q * w + c]);
                let vf = fwd.map_or(Complex64::new(0.0, 0.0), |q| u.data()[q * w + c]);
                slot[k * w + c] = vb * cb + u.data()[k * w + c] * c0 + vf * cf;
            }
        }
    }
    let [cx, cy] = comps;
    MatrixOneForm {
        cx: MatrixField::from_raw(u.grid(), u.rows(), u.cols(), cx).expect("shape"),
        cy: MatrixField::from_raw(u.grid(), u.rows(), u.cols(), cy).expect("shape"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn grid(n: usize) -> Arc<GridSpec> {
        Arc::new(GridSpec::new(n).unwrap())
    }

    fn radial_error(n: usize, c: f64) -> f64 {
        let g = grid(n);
        let rhs = MatrixField::scalar_from_fn(&g, |_| c.into());
        let phi = poisson_dirichlet(&rhs).unwrap();
        g.interior()
            .iter()
            .map(|&k| (phi.value(k).re - c * (g.z(k).norm_sqr() - 1.0) / 4.0).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_rhs() {
        let g = grid(33);
        let phi = poisson_dirichlet(&MatrixField::zeros(&g, 2)).unwrap();
        assert_eq!(phi.max_norm(), 0.0);
    }

    #[test]
    fn constant_rhs_second_order() {
        let e1 = radial_error(33, 1.0);
        let e2 = radial_error(65, 1.0);
        let order = (e1 / e2).log2();
        assert!(order > 1.7 && order < 2.3, "{e1} {e2} {order}");
        let e4 = radial_error(65, 4.0);
        assert!((e4 - 4.0 * e2).abs() < 1e-8);
    }

    #[test]
    fn boundary_nodes_stay_zero() {
        let g = grid(33);
        let phi = poisson_dirichlet(&crate::random::real_scalar(&g, 2)).unwrap();
        for k in 0..g.len() {
            if !g.is_interior(k) {
                assert_eq!(phi.value(k), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn neumann_residual_and_compatibility() {
        let g = grid(65);
        let rhs = MatrixField::scalar_from_fn(&g, |z| z.re.into());
        let a = poisson_neumann(&rhs, NeumannOptions::default()).unwrap();
        let res = neumann_laplacian(&a).sub(&rhs);
        assert!(res.norm_l2() <= 1e-8 * rhs.norm_l2());
        let ones = MatrixField::scalar_from_fn(&g, |_| 1.0.into());
        assert!(matches!(
            poisson_neumann(&ones, NeumannOptions::default()),
            Err(Error::CompatibilityViolation { .. })
        ));
        let projected = poisson_neumann(
            &ones,
            NeumannOptions {
                auto_project: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(projected.max_norm() < 1e-9);
    }

    #[test]
    fn dirichlet_gradient_of_radial_solution() {
        let g = grid(65);
        let phi = MatrixField::scalar_from_fn(&g, |z| ((z.norm_sqr() - 1.0) / 4.0).into());
        let grad = dirichlet_gradient(&phi);
        for &k in g.interior() {
            let z = g.z(k);
            assert!((grad.cx.value(k).re - z.re / 2.0).abs() < 1e-10);
            assert!((grad.cy.value(k).re - z.im / 2.0).abs() < 1e-10);
        }
    }
}
