//! Change of frame for connection forms.

use super::frame::{FrameKind, GaugeFrame};
use crate::calculus::exterior_d;
use crate::error::{Error, Result};
use crate::field::{MatrixField, MatrixOneForm};
use crate::mat::skew_part;

/// `omega_P = P^{-1} dP + P^{-1} omega P`.
///
/// For unitary frames the difference quotient `P^* dP` is only skew-Hermitian
/// up to `O(h^2)`; the result is projected onto its skew-Hermitian part so the
/// `u(m)` structure is kept exactly.
pub fn transform_connection(p: &GaugeFrame, omega: &MatrixOneForm) -> Result<MatrixOneForm> {
    if p.m() != omega.m() || p.grid().n() != omega.grid().n() {
        return Err(Error::DimensionMismatch(format!(
            "frame of rank {} on n={} vs form of rank {} on n={}",
            p.m(),
            p.grid().n(),
            omega.m(),
            omega.grid().n()
        )));
    }
    let pinv = p.inverse();
    let dp = exterior_d(&p.values);
    let part = |dpc: &MatrixField, wc: &MatrixField| -> Result<MatrixField> {
        let v = pinv.matmul(dpc)?.add(&pinv.matmul(&wc.matmul(&p.values)?)?);
        Ok(match p.kind {
            FrameKind::Unitary => v.map_nodes(v.rows(), v.cols(), |_, a| skew_part(&a)),
            FrameKind::Invertible => v,
        })
    };
    Ok(MatrixOneForm {
        cx: part(&dp.cx, &omega.cx)?,
        cy: part(&dp.cy, &omega.cy)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CMat;
    use crate::grid::GridSpec;
    use crate::mat::expm;
    use num_complex::Complex64;
    use std::sync::Arc;

    fn unitary_frame(g: &Arc<GridSpec>, seed: u64, amp: f64) -> GaugeFrame {
        let gen = crate::random::complex_matrix(g, 2, seed);
        let values = gen.map_nodes(2, 2, |_, a| {
            expm(&(skew_part(&a) * Complex64::new(amp, 0.0)))
        });
        GaugeFrame::new(values, FrameKind::Unitary).unwrap()
    }

    #[test]
    fn identity_and_constant_frames() {
        let g = Arc::new(GridSpec::new(33).unwrap());
        let omega = crate::random::skew_form(&g, 2, 1, Some(1.0));
        let same = transform_connection(&GaugeFrame::identity(&g, 2), &omega).unwrap();
        assert!(same.sub(&omega).max_norm() < 1e-15);
        let u = expm(&CMat::from_row_slice(
            2,
            2,
            &[
                0.0.into(),
                1.0.into(),
                (-1.0).into(),
                Complex64::new(0.0, 0.3),
            ],
        ));
        let frame = GaugeFrame::new(
            MatrixField::from_fn(&g, 2, 2, |_, _| u.clone()),
            FrameKind::Unitary,
        )
        .unwrap();
        let t = transform_connection(&frame, &omega).unwrap();
        for &k in g.interior() {
            let expect = u.adjoint() * omega.cx.at(k) * &u;
            assert!((t.cx.at(k) - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn covariance_is_second_order() {
        let mut errs = Vec::new();
        for n in [33, 65] {
            let g = Arc::new(GridSpec::new(n).unwrap());
            let omega = crate::random::skew_form(&g, 2, 3, Some(1.0));
            let (p1, p2) = (unitary_frame(&g, 10, 1.0), unitary_frame(&g, 11, 1.0));
            let both = transform_connection(&p1.compose(&p2).unwrap(), &omega).unwrap();
            let stepwise =
                transform_connection(&p2, &transform_connection(&p1, &omega).unwrap()).unwrap();
            errs.push(both.sub(&stepwise).norm_l2());
            assert!(both.is_skew_hermitian(1e-12));
        }
        assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
    }
}
