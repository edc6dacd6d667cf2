//! Conformal immersions with prescribed mean curvature.
//!
//! Sign convention: `Lap u = -2 rho^2 H`, so the unit-sphere patch given by
//! inverse stereographic projection has `H = u`. With this convention
//! `omega_H = H du^T - du H^T` satisfies `d omega_H = 2 |H|^2 du ^ du`
//! when `H` is parallel and `Lap u + omega_H . grad u = 0`.

use num_complex::Complex64;

use super::geometry::{grad_energy, laplacian5};
use super::map::{MapField, Target};
use crate::calculus::{codifferential, dbar, dz, exterior_d, exterior_d1, zbar_part};
use crate::error::{Error, Result};
use crate::field::{CMat, MatrixField, MatrixOneForm};

#[derive(Debug, Clone)]
pub struct ImmersionData {
    pub u: MapField,
    /// Mean curvature vector per node, in `R^m`.
    pub mean_curvature: MapField,
    /// Conformal factor `|u_x|` per node.
    pub rho: Vec<f64>,
}

impl ImmersionData {
    pub fn new(u: MapField, mean_curvature: MapField) -> Result<Self> {
        if u.m() != mean_curvature.m() || u.grid().n() != mean_curvature.grid().n() {
            return Err(Error::DimensionMismatch(
                "immersion and mean curvature differ in shape".into(),
            ));
        }
        let du = exterior_d(&u.to_field());
        let rho = (0..u.grid().len()).map(|k| du.cx.node_norm(k)).collect();
        Ok(Self {
            u,
            mean_curvature,
            rho,
        })
    }

    /// Largest `max(||u_x|^2 - |u_y|^2|, |<u_x, u_y>|) / rho^2` over interior nodes,
    /// with the node where it occurs.
    pub fn conformality_defect(&self) -> (usize, f64) {
        let du = exterior_d(&self.u.to_field());
        let mut worst = (0, 0.0);
        for &k in self.u.grid().interior() {
            let (ux, uy) = (du.cx.node(k), du.cy.node(k));
            let xx: f64 = ux.iter().map(|v| v.re * v.re).sum();
            let yy: f64 = uy.iter().map(|v| v.re * v.re).sum();
            let xy: f64 = ux.iter().zip(uy).map(|(a, b)| a.re * b.re).sum();
            let d = (xx - yy).abs().max(xy.abs()) / xx.max(f64::MIN_POSITIVE);
            if d > worst.1 {
                worst = (k, d);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PmcOptions {
    /// Allowed conformality defect relative to `rho^2`.
    pub tol_conf: f64,
    /// Largest normalized `r3` for which `Lap u` counts as a sum of Wente terms.
    pub tol_wente: f64,
}

impl Default for PmcOptions {
    fn default() -> Self {
        Self {
            tol_conf: 0.05,
            tol_wente: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PmcReport {
    /// `||d omega_H - 2|H|^2 du ^ du||_{L1} / ||grad u||^2`.
    pub r1: f64,
    /// `||d* omega_H||_{L1} / ||grad u||^2`.
    pub r2: f64,
    /// `||dbar(u_z) + omega^{0,1} u_z||_{L1} / ||grad u||^2`.
    pub r3: f64,
    /// `||Lap u + omega . grad u||_{L1} / ||grad u||^2`.
    pub wente_defect: f64,
    pub wente_terms: bool,
    pub grad_sq: f64,
    pub conformality_defect: f64,
}

/// `omega_H = H du^T - du H^T`.
pub fn mean_curvature_form(data: &ImmersionData) -> MatrixOneForm {
    let m = data.u.m();
    let du = exterior_d(&data.u.to_field());
    let hf = &data.mean_curvature;
    let build = |d: &MatrixField| {
        MatrixField::from_fn(data.u.grid(), m, m, |k, _| {
            let hv = hf.at(k);
            let dv = d.node(k);
            CMat::from_fn(m, m, |i, j| {
                Complex64::new(hv[i] * dv[j].re - hv[j] * dv[i].re, 0.0)
            })
        })
    };
    MatrixOneForm {
        cx: build(&du.cx),
        cy: build(&du.cy),
    }
}

/// `omega_H`, plus the sphere connection when `u` has a sphere target.
pub fn immersion_connection(data: &ImmersionData) -> Result<MatrixOneForm> {
    let omega_h = mean_curvature_form(data);
    if let Target::Sphere { .. } = data.u.target() {
        Ok(omega_h.add(&super::geometry::riviere_connection(&data.u)?))
    } else {
        Ok(omega_h)
    }
}

pub fn pmc_diagnostics(data: &ImmersionData, opts: PmcOptions) -> Result<PmcReport> {
    let (node, defect) = data.conformality_defect();
    if defect > opts.tol_conf {
        return Err(Error::ConformalityViolated { node, defect });
    }
    let grid = data.u.grid().clone();
    let m = data.u.m();
    let uf = data.u.to_field();
    let du = exterior_d(&uf);
    let hf = &data.mean_curvature;
    let omega_h = mean_curvature_form(data);
    let wedge = MatrixField::from_fn(&grid, m, m, |k, _| {
        let (ux, uy) = (du.cx.node(k), du.cy.node(k));
        let h2: f64 = hf.at(k).iter().map(|v| v * v).sum();
        CMat::from_fn(m, m, |i, j| {
            Complex64::new(2.0 * h2 * (ux[i].re * uy[j].re - uy[i].re * ux[j].re), 0.0)
        })
    });
    let nodes = grid.interior();
    let grad_sq = grad_energy(&data.u);
    let scale = if grad_sq > 0.0 { 1.0 / grad_sq } else { 0.0 };
    let r1 = exterior_d1(&omega_h).c.sub(&wedge).norm_l1_on(nodes) * scale;
    let r2 = codifferential(&omega_h).norm_l1_on(nodes) * scale;
    let omega = immersion_connection(data)?;
    let uz = dz(&uf);
    let r3 = dbar(&uz)
        .add(&zbar_part(&omega).matmul(&uz)?)
        .norm_l1_on(nodes)
        * scale;
    let div = laplacian5(&uf)
        .add(&omega.cx.matmul(&du.cx)?)
        .add(&omega.cy.matmul(&du.cy)?);
    let wente_defect = div.norm_l1_on(nodes) * scale;
    Ok(PmcReport {
        r1,
        r2,
        r3,
        wente_defect,
        wente_terms: wente_defect <= opts.tol_wente,
        grad_sq,
        conformality_defect: defect,
    })
}
