//! Wente problem `Lap phi = *(da ^ db)` with zero boundary values.

use super::poisson::{dirichlet_gradient, poisson_dirichlet};
use crate::calculus::{exterior_d, hodge_star2, wedge};
use crate::error::{Error, Result};
use crate::field::MatrixField;
use crate::lorentz::lorentz_norm_of;

#[derive(Debug, Clone, Copy)]
pub struct WenteReport {
    pub sup: f64,
    pub grad_l2: f64,
    pub grad_l21: f64,
    pub grad_a: f64,
    pub grad_b: f64,
    /// `||phi||_inf / (||grad a|| ||grad b||)`; NaN when undefined.
    pub ratio: f64,
}

/// Solve the Wente problem for real scalar `a`, `b`.
///
/// Returns `DegenerateInput` alongside nothing when the ratio is undefined;
/// use [`wente_solve_partial`] to keep `phi` in that case.
pub fn wente_solve(a: &MatrixField, b: &MatrixField) -> Result<(MatrixField, WenteReport)> {
    let (phi, report) = wente_solve_partial(a, b)?;
    if !report.ratio.is_finite() {
        return Err(Error::DegenerateInput("||grad a|| ||grad b|| = 0".into()));
    }
    Ok((phi, report))
}

/// As [`wente_solve`] but always returns `phi`; the ratio is NaN when undefined.
pub fn wente_solve_partial(a: &MatrixField, b: &MatrixField) -> Result<(MatrixField, WenteReport)> {
    let (da, db) = (exterior_d(a), exterior_d(b));
    let rhs = hodge_star2(&wedge(&da, &db)?);
    let phi = poisson_dirichlet(&rhs)?;
    let grid = phi.grid().clone();
    let grad = dirichlet_gradient(&phi);
    let (grad_a, grad_b) = (da.norm_l2(), db.norm_l2());
    let sup = phi.max_norm();
    let denom = grad_a * grad_b;
    let report = WenteReport {
        sup,
        grad_l2: grad.norm_l2(),
        grad_l21: lorentz_norm_of(&grid, &grad.node_norms(), grid.interior(), 2.0, 1.0)?,
        grad_a,
        grad_b,
        ratio: if denom > 0.0 { sup / denom } else { f64::NAN },
    };
    Ok((phi, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use num_complex::Complex64;
    use std::sync::Arc;

    #[test]
    fn parallel_gradients_give_zero() {
        let g = Arc::new(GridSpec::new(33).unwrap());
        let x = MatrixField::scalar_from_fn(&g, |z| z.re.into());
        let (phi, rep) = wente_solve(&x, &x).unwrap();
        assert!(phi.max_norm() < 1e-14);
        assert!(rep.ratio < 1e-12);
    }

    #[test]
    fn coordinate_pair_ratio() {
        let g = Arc::new(GridSpec::new(129).unwrap());
        let x = MatrixField::scalar_from_fn(&g, |z| z.re.into());
        let y = MatrixField::scalar_from_fn(&g, |z| z.im.into());
        let (_, rep) = wente_solve(&x, &y).unwrap();
        let target = 1.0 / (4.0 * std::f64::consts::PI);
        assert!((rep.ratio / target - 1.0).abs() < 0.05, "{}", rep.ratio);
        assert!(rep.grad_l21.is_finite() && rep.grad_l21 >= rep.grad_l2);
    }

    #[test]
    fn degenerate_input() {
        let g = Arc::new(GridSpec::new(33).unwrap());
        let zero = MatrixField::scalar_zeros(&g);
        let x = MatrixField::scalar_from_fn(&g, |z| Complex64::from(z.re));
        assert!(matches!(
            wente_solve(&zero, &x),
            Err(Error::DegenerateInput(_))
        ));
        assert!(wente_solve_partial(&zero, &x).is_ok());
    }
}
