//! Tension field, the antisymmetric connection of a sphere-valued map and
//! the Hopf differential.

use num_complex::Complex64;

use super::map::{MapField, Target};
use crate::calculus::{dbar, dz, exterior_d, zbar_part};
use crate::error::Result;
use crate::field::{CMat, MatrixField, MatrixOneForm};
use crate::grid::{Axis, GridSpec};

/// Five-point Laplacian at interior nodes, zero elsewhere.
pub(crate) fn laplacian5(f: &MatrixField) -> MatrixField {
    let grid: &GridSpec = f.grid();
    let w = f.width();
    let inv = 1.0 / grid.cell_area();
    let mut out = MatrixField::zeros_shaped(f.grid(), f.rows(), f.cols());
    for &k in grid.interior() {
        let nbs: Vec<usize> = [(Axis::X, 1), (Axis::X, -1), (Axis::Y, 1), (Axis::Y, -1)]
            .iter()
            .map(|&(a, s)| {
                grid.neighbor(k, a, s)
                    .expect("interior nodes have four neighbors")
            })
            .collect();
        for c in 0..w {
            let sum: Complex64 = nbs.iter().map(|&q| f.data()[q * w + c]).sum();
            out.data_mut()[k * w + c] = (sum - f.data()[k * w + c] * 4.0) * inv;
        }
    }
    out
}

/// `sum_i |grad u^i|^2` per node.
fn grad_sq_field(du: &MatrixOneForm) -> Vec<f64> {
    let n = du.grid().len();
    (0..n)
        .map(|k| du.cx.node_norm(k).powi(2) + du.cy.node_norm(k).powi(2))
        .collect()
}

/// `||grad u||_{L2}^2` over interior nodes.
pub fn grad_energy(u: &MapField) -> f64 {
    let du = exterior_d(&u.to_field());
    let g = grad_sq_field(&du);
    u.grid().interior().iter().map(|&k| g[k]).sum::<f64>() * u.grid().cell_area()
}

#[derive(Debug, Clone)]
pub struct Tension {
    /// `-(Lap u + |grad u|^2 u / r^2)` for sphere targets, `-Lap u` otherwise.
    pub tau: MatrixField,
    /// Tangential part of `tau`.
    pub tangential: MatrixField,
    pub norm: f64,
    pub tangential_norm: f64,
}

pub fn tension(u: &MapField) -> Result<Tension> {
    u.check_on_target()?;
    let grid = u.grid().clone();
    let uf = u.to_field();
    let lap = laplacian5(&uf);
    let g = grad_sq_field(&exterior_d(&uf));
    let m = u.m();
    let mut tau = lap.scale((-1.0).into());
    let mut tangential = tau.clone();
    if let Target::Sphere { radius } = u.target() {
        let r2 = radius * radius;
        for &k in grid.interior() {
            let p = u.at(k);
            let t = tau.node_mut(k);
            for c in 0..m {
                t[c] -= Complex64::new(g[k] * p[c] / r2, 0.0);
            }
            let along: f64 = (0..m).map(|c| t[c].re * p[c]).sum::<f64>() / r2;
            let s = tangential.node_mut(k);
            for c in 0..m {
                s[c] = t[c] - along * p[c];
            }
        }
    }
    let nodes = grid.interior();
    Ok(Tension {
        norm: tau.norm_l2_on(nodes),
        tangential_norm: tangential.norm_l2_on(nodes),
        tau,
        tangential,
    })
}

/// `omega^i_j = (u^i du^j - u^j du^i) / r^2`, real antisymmetric.
///
/// With this sign a harmonic map satisfies `Lap u + omega . grad u = 0` and
/// `dbar(u_z) + omega^{0,1} u_z = 0`, the same form as `dbar S = -omega^{0,1} S`.
/// Euclidean targets give the zero connection.
pub fn riviere_connection(u: &MapField) -> Result<MatrixOneForm> {
    u.check_on_target()?;
    let m = u.m();
    let Target::Sphere { radius } = u.target() else {
        return Ok(MatrixOneForm::zeros(u.grid(), m));
    };
    let du = exterior_d(&u.to_field());
    let r2 = radius * radius;
    let build = |d: &MatrixField| {
        MatrixField::from_fn(u.grid(), m, m, |k, _| {
            let p = u.at(k);
            let dv = d.node(k);
            CMat::from_fn(m, m, |i, j| {
                Complex64::new((p[i] * dv[j].re - p[j] * dv[i].re) / r2, 0.0)
            })
        })
    };
    Ok(MatrixOneForm {
        cx: build(&du.cx),
        cy: build(&du.cy),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ConnectionResiduals {
    /// `||Lap u + omega . grad u||_{L1}`, i.e. `d(*du) + omega ^ *du`.
    pub divergence: f64,
    /// `||dbar(u_z) + omega^{0,1} u_z||_{L1}`.
    pub dbar: f64,
    /// `||grad u||_{L2}^2`.
    pub grad_sq: f64,
}

/// How well `u` solves the first-order system defined by `omega`.
pub fn connection_residuals(u: &MapField, omega: &MatrixOneForm) -> Result<ConnectionResiduals> {
    let uf = u.to_field();
    let du = exterior_d(&uf);
    let nodes = u.grid().interior();
    let div = laplacian5(&uf)
        .add(&omega.cx.matmul(&du.cx)?)
        .add(&omega.cy.matmul(&du.cy)?);
    let uz = dz(&uf);
    let d = dbar(&uz).add(&zbar_part(omega).matmul(&uz)?);
    Ok(ConnectionResiduals {
        divergence: div.norm_l1_on(nodes),
        dbar: d.norm_l1_on(nodes),
        grad_sq: grad_energy(u),
    })
}

/// Radius of the subdisc on which the Hopf residual is measured.
///
/// Boundary data sit on staircase nodes off the circle, which leaves a
/// layer of a few cells where difference quotients of `phi` do not
/// converge; a fixed subdisc keeps the residual a pure interior quantity.
pub const HOPF_RADIUS: f64 = 0.9;

/// Hopf differential `phi = (u_z, u_z)` (complex bilinear) and
/// `||dbar phi||_{L1}` over `|z| <= HOPF_RADIUS`.
pub fn hopf_differential(u: &MapField) -> (MatrixField, f64) {
    let uz = dz(&u.to_field());
    let phi = MatrixField::from_fn(u.grid(), 1, 1, |k, _| {
        CMat::from_element(1, 1, uz.node(k).iter().map(|v| v * v).sum::<Complex64>())
    });
    let residual = dbar(&phi).norm_l1_on(&u.grid().interior_within(HOPF_RADIUS));
    (phi, residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::map::inverse_stereographic;
    use std::sync::Arc;

    fn stereo(n: usize) -> MapField {
        let g = Arc::new(GridSpec::new(n).unwrap());
        MapField::from_fn(&g, 3, Target::unit_sphere(), |z| {
            inverse_stereographic(z, 1.0)
        })
        .unwrap()
    }

    #[test]
    fn constant_map_is_trivial() {
        let g = Arc::new(GridSpec::new(17).unwrap());
        let u = MapField::from_fn(&g, 3, Target::unit_sphere(), |_| vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(tension(&u).unwrap().norm, 0.0);
        assert_eq!(riviere_connection(&u).unwrap().max_norm(), 0.0);
    }

    #[test]
    fn stereographic_tension_is_discretization_error() {
        let (t1, t2) = (
            tension(&stereo(33)).unwrap().norm,
            tension(&stereo(65)).unwrap().norm,
        );
        assert!(t1 / t2 > 1.8, "{t1} {t2}");
    }

    #[test]
    fn graph_patch_is_not_harmonic() {
        let g = Arc::new(GridSpec::new(65).unwrap());
        let u = MapField::from_fn(&g, 3, Target::unit_sphere(), |z| {
            let (x, y) = (0.5 * z.re, 0.5 * z.im);
            vec![x, y, (1.0 - x * x - y * y).sqrt()]
        })
        .unwrap();
        assert!(tension(&u).unwrap().norm > 0.1);
    }

    #[test]
    fn connection_is_antisymmetric_and_closes_the_equation() {
        let u = stereo(65);
        let w = riviere_connection(&u).unwrap();
        for k in 0..u.grid().len() {
            for c in [&w.cx, &w.cy] {
                let a = c.at(k);
                assert!((&a + a.transpose()).norm() <= 1e-12);
            }
        }
        let r65 = connection_residuals(&u, &w).unwrap();
        let u2 = stereo(129);
        let r129 = connection_residuals(&u2, &riviere_connection(&u2).unwrap()).unwrap();
        assert!(r65.divergence / r129.divergence > 1.8);
        assert!(r65.dbar / r129.dbar > 1.8);
    }

    #[test]
    fn hopf_vanishes_for_conformal_maps() {
        let (phi, _) = hopf_differential(&stereo(65));
        assert!(phi.max_norm_on(phi.grid().interior()) < 0.05);
        let g = Arc::new(GridSpec::new(65).unwrap());
        let u =
            MapField::from_fn(&g, 3, Target::Euclidean, |z| vec![z.re * z.re, 0.0, 0.0]).unwrap();
        let (_, res) = hopf_differential(&u);
        // dbar(x^2) = x
        let l1: f64 = g
            .interior_within(HOPF_RADIUS)
            .iter()
            .map(|&k| g.z(k).re.abs())
            .sum::<f64>()
            * g.cell_area();
        assert!((res - l1).abs() < 1e-3 * l1, "{res} vs {l1}");
    }
}
