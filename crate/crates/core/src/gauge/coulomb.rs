//! Coulomb gauge by minimizing the lattice energy `E(P) = sum_e |P_j - U_e P_i|^2`.
//!
//! The connection is sampled as link matrices `U_e = exp(-h omega_e)` on the
//! grid edges `i -> j` (`+x` or `+y`) touching the interior, with `omega_e` the
//! edge-midpoint average of the relevant component. This is the discrete form
//! of `int |dP + omega P|^2`, and the identity `E(P; U) = E(Id; U^P)` with
//! `U^P_e = P_j^* U_e P_i` holds exactly. The gauged link connection is
//! `a_e = (V_e^* - V_e) / 2h` for `V_e = U^P_e`, and stationarity is the
//! vanishing of its lattice codifferential.

use std::sync::Arc;

use num_complex::Complex64;

use super::frame::{FrameKind, GaugeFrame};
use super::transform::transform_connection;
use crate::calculus::exterior_d1;
use crate::elliptic::cg::pcg;
use crate::elliptic::{iteration_cap, poisson_dirichlet, CG_TOL};
use crate::error::{Error, Result};
use crate::field::{CMat, MatrixField, MatrixOneForm};
use crate::grid::{Axis, GridSpec};
use crate::mat::{expm, skew_part};

/// Connection sampled on grid edges.
#[derive(Debug, Clone)]
pub struct Links {
    grid: Arc<GridSpec>,
    m: usize,
    /// `(i, j)` with `j` the `+x` or `+y` neighbor of `i`.
    pub edges: Vec<(usize, usize)>,
    pub u: Vec<CMat>,
    /// Nodes touched by at least one edge, and node -> position map.
    pub nodes: Vec<usize>,
    slot: Vec<usize>,
}

impl Links {
    pub fn from_form(omega: &MatrixOneForm) -> Self {
        let grid = omega.grid().clone();
        let h = grid.h();
        let mut edges = Vec::new();
        let mut u = Vec::new();
        for i in 0..grid.len() {
            if !grid.in_support(i) {
                continue;
            }
            for (axis, comp) in [(Axis::X, &omega.cx), (Axis::Y, &omega.cy)] {
                let Some(j) = grid.neighbor(i, axis, 1) else {
                    continue;
                };
                if !grid.in_support(j) || !(grid.is_interior(i) || grid.is_interior(j)) {
                    continue;
                }
                let mid = (comp.at(i) + comp.at(j)) * Complex64::new(-0.5 * h, 0.0);
                edges.push((i, j));
                u.push(expm(&mid));
            }
        }
        let mut slot = vec![usize::MAX; grid.len()];
        let mut nodes = Vec::new();
        for &(i, j) in &edges {
            for k in [i, j] {
                if slot[k] == usize::MAX {
                    slot[k] = 0;
                    nodes.push(k);
                }
            }
        }
        nodes.sort_unstable();
        for (s, &k) in nodes.iter().enumerate() {
            slot[k] = s;
        }
        Self {
            grid,
            m: omega.m(),
            edges,
            u,
            nodes,
            slot,
        }
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    /// `E(P) = sum_e |P_j - U_e P_i|_F^2`.
    pub fn energy(&self, p: &MatrixField) -> f64 {
        self.edges
            .iter()
            .zip(&self.u)
            .map(|(&(i, j), u)| (p.at(j) - u * p.at(i)).norm_squared())
            .sum()
    }

    /// Gauged links `V_e = P_j^* U_e P_i`.
    pub fn gauged(&self, p: &MatrixField) -> Vec<CMat> {
        self.edges
            .iter()
            .zip(&self.u)
            .map(|(&(i, j), u)| p.at(j).adjoint() * u * p.at(i))
            .collect()
    }

    /// Links transformed by `p`, as a new link field.
    pub fn transformed(&self, p: &MatrixField) -> Links {
        Links {
            u: self.gauged(p),
            ..self.clone()
        }
    }

    /// `a_e = (V_e^* - V_e) / 2h` for the given link matrices.
    pub fn connection(&self, v: &[CMat]) -> Vec<CMat> {
        let s = Complex64::new(0.5 / self.grid.h(), 0.0);
        v.iter().map(|v| (v.adjoint() - v) * s).collect()
    }

    /// Lattice codifferential `-(1/h)(sum_out a_e - sum_in a_e)` at every link node.
    pub fn codifferential(&self, a: &[CMat]) -> Vec<CMat> {
        let m = self.m;
        let mut out = vec![CMat::zeros(m, m); self.nodes.len()];
        let s = Complex64::new(-1.0 / self.grid.h(), 0.0);
        for (&(i, j), a) in self.edges.iter().zip(a) {
            out[self.slot[i]] += a * s;
            out[self.slot[j]] -= a * s;
        }
        out
    }

    /// `sqrt(h^2 sum |r_i|^2)` over link nodes.
    pub fn residual_norm(&self, r: &[CMat]) -> f64 {
        (r.iter().map(|x| x.norm_squared()).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    /// Discrete `||grad P||_{L2}`: `sqrt(sum_e |P_j - P_i|^2)`.
    pub fn gradient_norm(&self, p: &MatrixField) -> f64 {
        self.edges
            .iter()
            .map(|&(i, j)| (p.at(j) - p.at(i)).norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// Solve the graph Laplacian `L phi = rhs` on link nodes (rhs must sum to zero).
    fn laplace_solve(&self, rhs: &[CMat]) -> Result<Vec<CMat>> {
        let len = self.nodes.len();
        let m = self.m;
        let mut diag = vec![0.0; len];
        for &(i, j) in &self.edges {
            diag[self.slot[i]] += 1.0;
            diag[self.slot[j]] += 1.0;
        }
        let apply = |x: &[Complex64], y: &mut [Complex64]| {
            for (s, v) in y.iter_mut().enumerate() {
                *v = x[s] * diag[s];
            }
            for &(i, j) in &self.edges {
                let (a, b) = (self.slot[i], self.slot[j]);
                y[a] -= x[b];
                y[b] -= x[a];
            }
        };
        let mut out = vec![CMat::zeros(m, m); len];
        for r in 0..m {
            for c in 0..m {
                let b: Vec<Complex64> = rhs.iter().map(|x| x[(r, c)]).collect();
                let (x, _) = pcg(apply, &diag, &b, CG_TOL, 2 * iteration_cap(self.grid.n()))?;
                let mean = x.iter().sum::<Complex64>() / len as f64;
                for (s, v) in x.iter().enumerate() {
                    out[s][(r, c)] = v - mean;
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CoulombOptions {
    pub max_iter: usize,
    /// Stop when `||d* a|| <= tol * ||omega||`.
    pub tol: f64,
    /// Armijo slope parameter.
    pub armijo: f64,
    pub min_step: f64,
}

impl Default for CoulombOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-4,
            armijo: 1e-4,
            min_step: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoulombResult {
    pub p: GaugeFrame,
    /// Potential with `-Lap eta = *d omega_P`, zero on the circle (diagnostic).
    pub eta: MatrixField,
    pub energy_history: Vec<f64>,
    pub residual_history: Vec<f64>,
    /// Final `||d*_lat a||`.
    pub residual: f64,
    /// `||d* omega_P||` with nodal difference quotients (diagnostic).
    pub nodal_residual: f64,
    pub grad_p: f64,
    /// `E(Id)`, the energy of the input connection.
    pub initial_energy: f64,
    pub iterations: usize,
}

/// Minimize `E(P)` over unitary frames by preconditioned Riemannian descent.
///
/// Each step solves `L phi = -h^2 d*_lat a` (graph Laplacian, the Hessian of
/// `E` at a flat connection), then backtracks along `P exp(t phi)` from
/// `t = 1`, halving until the Armijo condition holds.
pub fn coulomb_gauge(omega: &MatrixOneForm, opts: CoulombOptions) -> Result<CoulombResult> {
    omega.require_skew_hermitian()?;
    let grid = omega.grid().clone();
    let m = omega.m();
    let links = Links::from_form(omega);
    let h2 = grid.cell_area();
    let target = opts.tol * omega.norm_l2();
    let mut p = MatrixField::identity(&grid, m);
    let initial_energy = links.energy(&p);
    let mut energy = initial_energy;
    let mut energy_history = vec![energy];
    let mut residual_history = Vec::new();
    let mut iterations = 0;
    let residual = loop {
        let r = links.codifferential(&links.connection(&links.gauged(&p)));
        let res = links.residual_norm(&r);
        residual_history.push(res);
        if res <= target || omega.norm_l2() == 0.0 {
            break res;
        }
        if iterations >= opts.max_iter {
            return Err(Error::Stalled {
                energy,
                residual: res,
            });
        }
        iterations += 1;
        let rhs: Vec<CMat> = r.iter().map(|x| x * Complex64::new(-h2, 0.0)).collect();
        let mut phi: Vec<CMat> = links.laplace_solve(&rhs)?.iter().map(skew_part).collect();
        // gradient of E with respect to right-multiplied generators
        let grad: Vec<CMat> = r
            .iter()
            .map(|x| x * Complex64::new(2.0 * h2, 0.0))
            .collect();
        let mut slope: f64 = grad.iter().zip(&phi).map(|(g, f)| g.dotc(f).re).sum();
        if !(slope < 0.0) {
            phi = grad.iter().map(|g| -g).collect();
            slope = -grad.iter().map(|g| g.norm_squared()).sum::<f64>();
        }
        let mut t = 1.0;
        loop {
            let mut trial = p.clone();
            for (s, &k) in links.nodes.iter().enumerate() {
                let step = expm(&(&phi[s] * Complex64::new(t, 0.0)));
                trial.set(k, &(p.at(k) * step));
            }
            let e = links.energy(&trial);
            if e <= energy + opts.armijo * t * slope && e <= energy {
                p = trial;
                energy = e;
                energy_history.push(e);
                break;
            }
            t *= 0.5;
            if t < opts.min_step {
                return Err(Error::Stalled {
                    energy,
                    residual: res,
                });
            }
        }
    };
    let grad_p = links.gradient_norm(&p);
    let frame = GaugeFrame {
        values: p,
        kind: FrameKind::Unitary,
        condition: 1.0,
    };
    let omega_p = transform_connection(&frame, omega)?;
    let nodal_residual = crate::calculus::codifferential(&omega_p).norm_l2();
    let eta = poisson_dirichlet(&exterior_d1(&omega_p).c.scale((-1.0).into()))?;
    Ok(CoulombResult {
        p: frame,
        eta,
        energy_history,
        residual_history,
        residual,
        nodal_residual,
        grad_p,
        initial_energy,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Arc<GridSpec> {
        Arc::new(GridSpec::new(n).unwrap())
    }

    #[test]
    fn zero_connection() {
        let g = grid(33);
        let res = coulomb_gauge(&MatrixOneForm::zeros(&g, 2), CoulombOptions::default()).unwrap();
        assert_eq!(res.p.max_unitarity_defect(), 0.0);
        assert_eq!(res.energy_history, vec![0.0]);
        assert_eq!(res.eta.max_norm(), 0.0);
    }

    #[test]
    fn flat_connection_is_gauged_away() {
        let g = grid(33);
        let i = Complex64::new(0.0, 1.0);
        // P0 = exp(i x E11) and omega = -dP0 P0^{-1} = -i dx E11
        let omega = MatrixOneForm::from_fn(&g, 2, |_, _| {
            let mut cx = CMat::zeros(2, 2);
            cx[(0, 0)] = -i;
            (cx, CMat::zeros(2, 2))
        });
        let p0 = MatrixField::from_fn(&g, 2, 2, |_, z| {
            let mut p = CMat::identity(2, 2);
            p[(0, 0)] = (i * z.re).exp();
            p
        });
        let links = Links::from_form(&omega);
        assert!(links.energy(&p0) < 1e-24);
        let res = coulomb_gauge(&omega, CoulombOptions::default()).unwrap();
        let e = *res.energy_history.last().unwrap();
        assert!(e <= 1e-6 * omega.norm_l2().powi(2), "{e}");
    }

    #[test]
    fn energy_identity_and_link_covariance() {
        let g = grid(33);
        let omega = crate::random::skew_form(&g, 2, 5, Some(0.7));
        let links = Links::from_form(&omega);
        let gen = crate::random::complex_matrix(&g, 2, 9);
        let p = gen.map_nodes(2, 2, |_, a| expm(&skew_part(&a)));
        let q =
            crate::random::complex_matrix(&g, 2, 10).map_nodes(2, 2, |_, a| expm(&skew_part(&a)));
        let id = MatrixField::identity(&g, 2);
        let lhs = links.energy(&p);
        let rhs = links.transformed(&p).energy(&id);
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0));
        let both = links.transformed(&p.matmul(&q).unwrap());
        let stepwise = links.transformed(&p).transformed(&q);
        let gap = both
            .u
            .iter()
            .zip(&stepwise.u)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(gap < 1e-10);
    }

    #[test]
    fn random_connection_converges_monotonically() {
        let g = grid(33);
        let omega = crate::random::skew_form(&g, 2, 2, Some(0.5));
        let res = coulomb_gauge(&omega, CoulombOptions::default()).unwrap();
        assert!(res.residual <= 1e-4 * omega.norm_l2());
        assert!(res.energy_history.windows(2).all(|w| w[1] <= w[0]));
        assert!(res.p.max_unitarity_defect() < 1e-8);
        assert!(res.grad_p <= 2.0 * omega.norm_l2() * (1.0 + 10.0 * g.h()));
        for k in 0..g.len() {
            if !g.is_interior(k) {
                assert_eq!(res.eta.node_norm(k), 0.0);
            }
        }
    }
}
