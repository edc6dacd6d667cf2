//! Holomorphic frames `S = P Q` with `dbar S = -omega^{0,1} S`, and the
//! regularity solve `h = S^{-1} alpha` for sections with `dbar_omega alpha = 0`.

use super::coulomb::{coulomb_gauge, CoulombOptions};
use super::frame::{FrameKind, GaugeFrame};
use super::holomorphic::{holomorphic_gauge, FixedPointOptions};
use super::transform::transform_connection;
use crate::calculus::{dbar, exterior_d, exterior_d1, zbar_part};
use crate::elliptic::{coexact_part, hodge_decompose, poisson_dirichlet, verdict, DaggerVerdict};
use crate::error::{Error, Result};
use crate::field::{MatrixField, MatrixOneForm, VectorOneForm10};
use crate::lorentz::hardy_h1_norm;

#[derive(Debug, Clone, Copy)]
pub struct FrameOptions {
    /// Threshold for `||omega||_{L2} + ||grad b||_{L^{2,1}}`.
    pub eps: f64,
    pub coulomb: CoulombOptions,
    pub fixed_point: FixedPointOptions,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self {
            eps: 2.0,
            coulomb: CoulombOptions::default(),
            fixed_point: FixedPointOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FrameReport {
    pub dagger: DaggerVerdict,
    pub coulomb_iterations: usize,
    pub coulomb_residual: f64,
    pub fixed_point_iterations: usize,
    pub contraction_rate: f64,
    /// `||dbar Q + alpha Q||` in integral form (see [`holomorphic_gauge`]).
    pub fixed_point_residual: f64,
    /// `||dbar S + omega^{0,1} S||_{L2(U)}`.
    pub residual: f64,
    pub omega_norm: f64,
    pub p_unitarity: f64,
    pub q_dist_to_unitary: f64,
    pub s_dist_to_unitary: f64,
    /// `||grad S||_{L2(U)} / ||omega||_{L2}`.
    pub grad_s_ratio: f64,
    /// `||alpha - alpha_eta||_{L2(U)}`, where `alpha_eta` is the (0,1) part
    /// rebuilt from the potentials `eta` and `b` instead of from `omega_P`.
    pub potential_route_gap: f64,
}

#[derive(Debug, Clone)]
pub struct HolomorphicFrame {
    pub p: GaugeFrame,
    pub q: GaugeFrame,
    pub s: GaugeFrame,
    pub eta: MatrixField,
    pub alpha: MatrixField,
    pub report: FrameReport,
}

/// Build `S = P Q`.
///
/// `P` is the Coulomb gauge of the exact part `da`, `omega_P` the transformed
/// connection and `Q` the holomorphic gauge of its (0,1) part.
pub fn build_holomorphic_frame(
    omega: &MatrixOneForm,
    opts: FrameOptions,
) -> Result<HolomorphicFrame> {
    omega.require_skew_hermitian()?;
    let grid = omega.grid().clone();
    let dec = hodge_decompose(omega)?;
    let dagger = verdict(&dec, opts.eps);
    if !dagger.satisfied {
        return Err(Error::ConditionDaggerViolated {
            eps_dagger: dagger.eps_dagger,
            eps: opts.eps,
        });
    }
    let coulomb = coulomb_gauge(&dec.da, opts.coulomb)?;
    let p = coulomb.p;
    let omega_p = transform_connection(&p, omega)?;
    let alpha = zbar_part(&omega_p);

    // the same (0,1) part through the potentials: omega_P ~ d*eta + P^{-1} d*b P
    let pinv = p.inverse();
    let rotated_b = MatrixOneForm {
        cx: pinv.matmul(&dec.dstar_b.cx)?.matmul(&p.values)?,
        cy: pinv.matmul(&dec.dstar_b.cy)?.matmul(&p.values)?,
    };
    let eta = poisson_dirichlet(&exterior_d1(&omega_p.sub(&rotated_b)).c.scale((-1.0).into()))?;
    let alpha_eta = zbar_part(&coexact_part(&eta).add(&rotated_b));
    let u = grid.margin_set(opts.fixed_point.margin);
    let potential_route_gap = alpha.sub(&alpha_eta).norm_l2_on(&u);

    let (q, fp) = holomorphic_gauge(&alpha, opts.fixed_point)?;
    let s = GaugeFrame::new(p.values.matmul(&q.values)?, FrameKind::Invertible)?;
    let residual = frame_residual(&s, omega, &u)?;
    let omega_norm = omega.norm_l2();
    let grad_s = exterior_d(&s.values).norm_l2_on(&u);
    let report = FrameReport {
        dagger,
        coulomb_iterations: coulomb.iterations,
        coulomb_residual: coulomb.residual,
        fixed_point_iterations: fp.iterations,
        contraction_rate: fp.rate,
        fixed_point_residual: fp.residual,
        residual,
        omega_norm,
        p_unitarity: p.max_unitarity_defect(),
        q_dist_to_unitary: q.max_dist_to_unitary(),
        s_dist_to_unitary: s.max_dist_to_unitary(),
        grad_s_ratio: if omega_norm > 0.0 {
            grad_s / omega_norm
        } else {
            0.0
        },
        potential_route_gap,
    };
    Ok(HolomorphicFrame {
        p,
        q,
        s,
        eta: coulomb.eta,
        alpha,
        report,
    })
}

/// `||dbar S + omega^{0,1} S||_{L2}` over `nodes`.
pub fn frame_residual(s: &GaugeFrame, omega: &MatrixOneForm, nodes: &[usize]) -> Result<f64> {
    Ok(dbar(&s.values)
        .add(&zbar_part(omega).matmul(&s.values)?)
        .norm_l2_on(nodes))
}

/// Transform by `p`, then test condition dagger on the result.
pub fn transform_then_check(
    p: &GaugeFrame,
    omega: &MatrixOneForm,
    eps: f64,
) -> Result<DaggerVerdict> {
    let t = transform_connection(p, omega)?;
    Ok(verdict(&hodge_decompose(&t)?, eps))
}

#[derive(Debug, Clone, Copy)]
pub struct RegularityOptions {
    pub frame: FrameOptions,
    /// Allowed `||dbar alpha + omega^{0,1} alpha||_{L2(U)} / ||alpha||_{L2}`.
    pub tol_input: f64,
}

impl Default for RegularityOptions {
    fn default() -> Self {
        Self {
            frame: FrameOptions::default(),
            tol_input: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub input_residual: f64,
    /// `||dbar h||_{L2(U)}`.
    pub dbar_h: f64,
    pub alpha_sup: f64,
    pub alpha_grad: f64,
    pub alpha_l2_sq: f64,
    /// Local Hardy norm of `|alpha|^2` and its ratio to `||alpha||_{L2}^2`.
    pub hardy: f64,
    pub hardy_ratio: f64,
    pub frame: FrameReport,
}

/// Holomorphic representative `h = S^{-1} alpha` of a `dbar_omega`-closed section.
pub fn dbar_regularity_solve(
    alpha: &VectorOneForm10,
    omega: &MatrixOneForm,
    opts: RegularityOptions,
) -> Result<(VectorOneForm10, RegularityReport)> {
    let grid = omega.grid().clone();
    let u = grid.margin_set(opts.frame.fixed_point.margin);
    let zb = zbar_part(omega);
    let closed = dbar(&alpha.c).add(&zb.matmul(&alpha.c)?);
    let alpha_l2 = alpha.c.norm_l2();
    let input_residual = if alpha_l2 > 0.0 {
        closed.norm_l2_on(&u) / alpha_l2
    } else {
        0.0
    };
    if input_residual > opts.tol_input {
        return Err(Error::InputNotClosed {
            residual: input_residual,
            tolerance: opts.tol_input,
        });
    }
    let frame = build_holomorphic_frame(omega, opts.frame)?;
    let h = frame.s.inverse().matmul(&alpha.c)?;
    let dbar_h = dbar(&h).norm_l2_on(&u);
    let sq = MatrixField::from_fn(&grid, 1, 1, |k, _| {
        crate::field::CMat::from_element(1, 1, alpha.c.node_norm(k).powi(2).into())
    });
    let hardy = hardy_h1_norm(&sq).value;
    let alpha_l2_sq = alpha_l2 * alpha_l2;
    let report = RegularityReport {
        input_residual,
        dbar_h,
        alpha_sup: alpha.c.max_norm_on(&u),
        alpha_grad: exterior_d(&alpha.c).norm_l2_on(&u),
        alpha_l2_sq,
        hardy,
        hardy_ratio: if alpha_l2_sq > 0.0 {
            hardy / alpha_l2_sq
        } else {
            0.0
        },
        frame: frame.report,
    };
    Ok((VectorOneForm10 { c: h }, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CMat;
    use crate::grid::GridSpec;
    use num_complex::Complex64;
    use std::sync::Arc;

    #[test]
    fn zero_connection_gives_identity_frame() {
        let g = Arc::new(GridSpec::new(33).unwrap());
        let f =
            build_holomorphic_frame(&MatrixOneForm::zeros(&g, 2), FrameOptions::default()).unwrap();
        assert_eq!(f.s.max_dist_to_identity_on(g.interior()), 0.0);
        assert_eq!(f.report.residual, 0.0);
    }

    #[test]
    fn constant_section_without_connection() {
        let g = Arc::new(GridSpec::new(33).unwrap());
        let alpha =
            VectorOneForm10::from_fn(&g, 2, |_, _| vec![Complex64::new(1.0, 0.0), 0.0.into()]);
        let (h, rep) = dbar_regularity_solve(
            &alpha,
            &MatrixOneForm::zeros(&g, 2),
            RegularityOptions::default(),
        )
        .unwrap();
        assert!(h.c.sub(&alpha.c).max_norm() < 1e-14);
        assert!(rep.dbar_h < 1e-14);
    }

    #[test]
    fn small_random_connection() {
        let g = Arc::new(GridSpec::new(33).unwrap());
        let omega = crate::random::skew_form(&g, 2, 12, Some(0.3));
        let f = build_holomorphic_frame(&omega, FrameOptions::default()).unwrap();
        assert!(f.report.s_dist_to_unitary <= 1.0 / 3.0);
        assert!(f.report.p_unitarity < 1e-8);
        let ps = f.p.values.matmul(&f.q.values).unwrap();
        assert!(ps.sub(&f.s.values).max_norm() < 1e-14);
        assert!(
            f.report.residual < 0.05 * omega.norm_l2(),
            "{}",
            f.report.residual
        );
    }

    #[test]
    fn large_connection_violates_dagger() {
        let g = Arc::new(GridSpec::new(33).unwrap());
        let omega = crate::random::skew_form(&g, 2, 12, Some(3.0));
        assert!(matches!(
            build_holomorphic_frame(&omega, FrameOptions::default()),
            Err(Error::ConditionDaggerViolated { .. })
        ));
        let _ = CMat::identity(1, 1);
    }
}
