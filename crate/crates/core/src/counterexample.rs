//! A `dbar_omega`-closed section that is not bounded, for a connection whose
//! co-exact potential has `grad b` in every `L^{2,q}` with `q > 1` but not in
//! `L^{2,1}`.
//!
//! With `L = log(e/|z|)` and `J = [[0, 1], [-1, 0]]`:
//! `alpha = (1, -i) dz / (z L)`, `omega = J (y dx - x dy) / (r^2 L)` and
//! `omega = *du J` for `u = log L`, which vanishes on the unit circle.

use std::sync::Arc;

use num_complex::Complex64;

use crate::calculus::{dbar, zbar_part};
use crate::elliptic::hodge_decompose;
use crate::error::{Error, Result};
use crate::field::{CMat, MatrixField, MatrixOneForm, ScalarField, VectorOneForm10};
use crate::gauge::{build_holomorphic_frame, FrameOptions};
use crate::grid::GridSpec;
use crate::lorentz::lorentz_norm_of;

/// Norms skip `|z| <= EXCLUSION_CELLS * h`.
pub const EXCLUSION_CELLS: f64 = 2.0;
/// The closedness residual skips `|z| <= RESIDUAL_CELLS * h`.
pub const RESIDUAL_CELLS: f64 = 8.0;

fn log_factor(r: f64) -> f64 {
    1.0 - r.ln()
}

fn rotation() -> CMat {
    CMat::from_row_slice(2, 2, &[0.0.into(), 1.0.into(), (-1.0).into(), 0.0.into()])
}

/// Closed-form `alpha` at `z` (zero at the origin).
pub fn alpha_at(z: Complex64) -> [Complex64; 2] {
    if z.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    let c = 1.0 / (z * log_factor(z.norm()));
    [c, c * Complex64::new(0.0, -1.0)]
}

/// Closed-form `du` for `u = log log(e/r)`: `-(x, y) / (r^2 L)`.
pub fn potential_gradient(z: Complex64) -> (f64, f64) {
    let r2 = z.norm_sqr();
    if r2 == 0.0 {
        return (0.0, 0.0);
    }
    let s = -1.0 / (r2 * log_factor(r2.sqrt()));
    (s * z.re, s * z.im)
}

#[derive(Debug, Clone)]
pub struct SingularFields {
    pub alpha: VectorOneForm10,
    pub omega: MatrixOneForm,
    pub u: ScalarField,
    /// Nodes where the closed forms are singular and set to zero.
    pub excluded: Vec<usize>,
}

pub fn frehse_fields(grid: &Arc<GridSpec>) -> SingularFields {
    let alpha = VectorOneForm10::from_fn(grid, 2, |_, z| alpha_at(z).to_vec());
    let j = rotation();
    let omega = MatrixOneForm::from_fn(grid, 2, |_, z| {
        let r2 = z.norm_sqr();
        if r2 == 0.0 {
            return (CMat::zeros(2, 2), CMat::zeros(2, 2));
        }
        let s = 1.0 / (r2 * log_factor(r2.sqrt()));
        (
            &j * Complex64::new(s * z.im, 0.0),
            &j * Complex64::new(-s * z.re, 0.0),
        )
    });
    let u = MatrixField::scalar_from_fn(grid, |z| {
        if z.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            log_factor(z.norm()).ln().into()
        }
    });
    let excluded = (0..grid.len())
        .filter(|&k| grid.in_support(k) && grid.z(k).norm() == 0.0)
        .collect();
    SingularFields {
        alpha,
        omega,
        u,
        excluded,
    }
}

/// `max |omega - *du J|` over support nodes, with `du` in closed form.
pub fn identification_error(fields: &SingularFields) -> f64 {
    let grid = fields.omega.grid();
    let j = rotation();
    let mut worst = 0.0f64;
    for k in 0..grid.len() {
        if !grid.in_support(k) {
            continue;
        }
        let (ux, uy) = potential_gradient(grid.z(k));
        // *du = ux dy - uy dx
        let cx = &j * Complex64::new(-uy, 0.0);
        let cy = &j * Complex64::new(ux, 0.0);
        worst = worst
            .max((fields.omega.cx.at(k) - cx).norm())
            .max((fields.omega.cy.at(k) - cy).norm());
    }
    worst
}

/// `||dbar alpha + omega^{0,1} alpha|| / ||dbar alpha||` in `L2` over interior nodes with `|z| > radius`.
pub fn closedness_residual_beyond(fields: &SingularFields, radius: f64) -> Result<f64> {
    let grid = fields.alpha.c.grid();
    let nodes: Vec<usize> = grid
        .interior()
        .iter()
        .copied()
        .filter(|&k| grid.z(k).norm() > radius)
        .collect();
    let d = dbar(&fields.alpha.c);
    let r = d.add(&zbar_part(&fields.omega).matmul(&fields.alpha.c)?);
    Ok(r.norm_l2_on(&nodes) / d.norm_l2_on(&nodes))
}

/// [`closedness_residual_beyond`] with radius `RESIDUAL_CELLS * h`.
pub fn closedness_residual(fields: &SingularFields) -> Result<f64> {
    closedness_residual_beyond(fields, RESIDUAL_CELLS * fields.alpha.c.grid().h())
}

#[derive(Debug, Clone)]
pub struct SharpnessRow {
    pub n: usize,
    pub h: f64,
    pub sup_alpha: f64,
    pub residual: f64,
    /// `||d*b||_{L^{2,q}}` for `q = 1, 1.5, 2`.
    pub l21: f64,
    pub l2_15: f64,
    pub l22: f64,
    /// Outcome of the frame construction: an error name, or `ok`.
    pub frame: String,
}

#[derive(Debug, Clone)]
pub struct SharpnessReport {
    pub rows: Vec<SharpnessRow>,
    pub exclusion_radius_cells: f64,
}

impl SharpnessReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("n,h,sup_alpha,residual,l21,l2_15,l22,frame\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{}\n",
                r.n, r.h, r.sup_alpha, r.residual, r.l21, r.l2_15, r.l22, r.frame
            ));
        }
        s
    }
}

pub fn sharpness_row(n: usize, frame_opts: FrameOptions) -> Result<SharpnessRow> {
    let grid = Arc::new(GridSpec::new(n)?);
    let fields = frehse_fields(&grid);
    let cut = EXCLUSION_CELLS * grid.h();
    let nodes: Vec<usize> = grid
        .interior()
        .iter()
        .copied()
        .filter(|&k| grid.z(k).norm() > cut)
        .collect();
    let sup_alpha = nodes
        .iter()
        .map(|&k| fields.alpha.c.node_norm(k))
        .fold(0.0, f64::max);
    let residual = closedness_residual(&fields)?;
    let dec = hodge_decompose(&fields.omega)?;
    let mags = dec.dstar_b.node_norms();
    let norm = |q: f64| lorentz_norm_of(&grid, &mags, &nodes, 2.0, q);
    let frame = match build_holomorphic_frame(&fields.omega, frame_opts) {
        Ok(_) => "ok".to_string(),
        Err(e) => e.name().to_string(),
    };
    Ok(SharpnessRow {
        n,
        h: grid.h(),
        sup_alpha,
        residual,
        l21: norm(1.0)?,
        l2_15: norm(1.5)?,
        l22: norm(2.0)?,
        frame,
    })
}

/// One row per resolution, in the given (increasing) order.
pub fn sharpness_scan(resolutions: &[usize], frame_opts: FrameOptions) -> Result<SharpnessReport> {
    if resolutions.len() < 3 {
        return Err(Error::Config(
            "the scan needs at least three resolutions".into(),
        ));
    }
    if resolutions.windows(2).any(|w| w[1] <= w[0]) || resolutions.iter().any(|n| n % 2 == 0) {
        return Err(Error::Config(
            "resolutions must be odd and increasing".into(),
        ));
    }
    let rows = resolutions
        .iter()
        .map(|&n| sharpness_row(n, frame_opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(SharpnessReport {
        rows,
        exclusion_radius_cells: EXCLUSION_CELLS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let a = alpha_at(Complex64::new(0.5, 0.0));
        let mag = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
        let expected = 2f64.sqrt() / (0.5 * (1.0 + 2f64.ln()));
        assert!((mag - expected).abs() < 1e-12);
        assert!((expected - 1.6706).abs() < 1e-4);
    }

    #[test]
    fn connection_is_the_rotated_potential_gradient() {
        let g = Arc::new(GridSpec::new(65).unwrap());
        let f = frehse_fields(&g);
        assert!(identification_error(&f) <= 1e-12);
        assert_eq!(f.excluded, vec![g.index(32, 32)]);
        assert!(f.omega.skew_hermitian_defect() == 0.0);
    }

    #[test]
    fn section_is_closed_to_second_order() {
        let f1 = frehse_fields(&Arc::new(GridSpec::new(65).unwrap()));
        let f2 = frehse_fields(&Arc::new(GridSpec::new(129).unwrap()));
        assert!(closedness_residual(&f1).unwrap() < 0.05);
        let (r1, r2) = (
            closedness_residual_beyond(&f1, 0.25).unwrap(),
            closedness_residual_beyond(&f2, 0.25).unwrap(),
        );
        assert!(r1 / r2 > 3.5, "{r1} {r2}");
    }

    #[test]
    fn scan_rejects_bad_resolutions() {
        assert!(sharpness_scan(&[33, 65], FrameOptions::default()).is_err());
        assert!(sharpness_scan(&[65, 33, 129], FrameOptions::default()).is_err());
    }
}
