//! Holomorphic gauge `Q` with `dbar Q = -alpha Q`, by the fixed point
//! `Q = Id - T(alpha Q)` with `T` the Cauchy transform.

use super::cauchy::CauchyTransform;
use super::frame::{FrameKind, GaugeFrame};
use crate::calculus::dbar;
use crate::error::{Error, Result};
use crate::field::MatrixField;

#[derive(Debug, Clone, Copy)]
pub struct FixedPointOptions {
    /// Stop when successive iterates differ by at most this in `L^inf`.
    pub tol: f64,
    pub max_iter: usize,
    /// Margin (in cells) of the set `U` on which residuals are measured.
    pub margin: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            margin: 8.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub iterations: usize,
    /// `L^inf` gaps between successive iterates.
    pub gaps: Vec<f64>,
    /// Largest ratio of successive gaps (the measured contraction rate).
    pub rate: f64,
    /// `||dbar(Q - Id + T(alpha Q))||_{L2(U)}`: the equation residual in integral form.
    pub residual: f64,
    /// `||dbar Q + alpha Q||_{L2(U)}` with nodal difference quotients.
    pub difference_residual: f64,
    pub alpha_norm: f64,
    pub dist_to_unitary: f64,
}

/// Solve `dbar Q = -alpha Q` for a `dz-bar` coefficient `alpha`.
///
/// Errors with `NoContraction` when a gap grows or the iteration cap is hit.
pub fn holomorphic_gauge(
    alpha: &MatrixField,
    opts: FixedPointOptions,
) -> Result<(GaugeFrame, FixedPointReport)> {
    let grid = alpha.grid().clone();
    let m = alpha.m();
    let t = CauchyTransform::new(&grid);
    let id = MatrixField::identity(&grid, m);
    let mut q = id.clone();
    let mut gaps = Vec::new();
    let mut rate = 0.0f64;
    let support: Vec<usize> = (0..grid.len()).filter(|&k| grid.in_support(k)).collect();
    loop {
        let next = id.sub(&t.apply(&alpha.matmul(&q)?));
        let gap = next.sub(&q).max_norm_on(&support);
        q = next;
        if let Some(&prev) = gaps.last() {
            let r: f64 = if prev > 0.0 { gap / prev } else { 0.0 };
            rate = rate.max(r);
            if r > 1.0 {
                gaps.push(gap);
                return Err(Error::NoContraction {
                    iterations: gaps.len(),
                    growth: r,
                });
            }
        }
        gaps.push(gap);
        if gap <= opts.tol {
            break;
        }
        if gaps.len() >= opts.max_iter {
            return Err(Error::NoContraction {
                iterations: gaps.len(),
                growth: rate,
            });
        }
    }
    let u = grid.margin_set(opts.margin);
    let aq = alpha.matmul(&q)?;
    let defect = q.sub(&id).add(&t.apply(&aq));
    let residual = dbar(&defect).norm_l2_on(&u);
    let difference_residual = dbar(&q).add(&aq).norm_l2_on(&u);
    let frame = GaugeFrame::new(q, FrameKind::Invertible)?;
    let report = FixedPointReport {
        iterations: gaps.len(),
        rate,
        residual,
        difference_residual,
        alpha_norm: alpha.norm_l2(),
        dist_to_unitary: frame.max_dist_to_unitary(),
        gaps,
    };
    Ok((frame, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::lorentz::lorentz_norm;
    use std::sync::Arc;

    #[test]
    fn zero_alpha_gives_identity() {
        let g = Arc::new(GridSpec::new(33).unwrap());
        let (q, rep) =
            holomorphic_gauge(&MatrixField::zeros(&g, 2), FixedPointOptions::default()).unwrap();
        assert_eq!(q.max_dist_to_identity_on(g.interior()), 0.0);
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn constant_alpha_matches_exponential_up_to_holomorphic_factor() {
        let g = Arc::new(GridSpec::new(65).unwrap());
        let c = 0.1;
        let alpha = MatrixField::identity(&g, 2).scale(c.into());
        let (q, rep) = holomorphic_gauge(&alpha, FixedPointOptions::default()).unwrap();
        assert!(rep.residual <= 1e-6 * rep.alpha_norm, "{}", rep.residual);
        // Q exp(c zbar) must be holomorphic
        let hol = MatrixField::from_fn(&g, 2, 2, |k, z| q.at(k) * (z.conj() * c).exp());
        let d = dbar(&hol).norm_l2_on(&g.margin_set(8.0));
        assert!(d < 1e-3, "{d}");
        assert!(rep.dist_to_unitary < 1.0 / 3.0);
    }

    #[test]
    fn large_alpha_does_not_contract() {
        let g = Arc::new(GridSpec::new(33).unwrap());
        let base = MatrixField::from_fn(&g, 2, 2, |_, z| crate::field::CMat::identity(2, 2) * z);
        let scale = 10.0 / lorentz_norm(&base, 2.0, 1.0).unwrap();
        let alpha = base.scale(scale.into());
        assert!(matches!(
            holomorphic_gauge(&alpha, FixedPointOptions::default()),
            Err(Error::NoContraction { .. })
        ));
    }
}
