//! Hodge decomposition `omega = da + d*b + residual` and the condition-dagger check.

use num_complex::Complex64;

use super::cg::pcg;
use super::poisson::{dirichlet_gradient, iteration_cap, poisson_dirichlet, CG_TOL};
use crate::calculus::{exterior_d, exterior_d1};
use crate::error::Result;
use crate::field::{MatrixField, MatrixOneForm};
use crate::grid::Axis;
use crate::lorentz::lorentz_norm_of;

#[derive(Debug, Clone)]
pub struct HodgeDecomposition {
    pub a: MatrixField,
    /// Coefficient of the 2-form potential `b dx ^ dy`; zero on boundary nodes.
    pub b: MatrixField,
    pub da: MatrixOneForm,
    /// `d*(b dx ^ dy) = b_y dx - b_x dy`.
    pub dstar_b: MatrixOneForm,
    pub residual: MatrixOneForm,
    /// `||omega||_{L2} + ||grad b||_{L^{2,1}}`.
    pub eps_dagger: f64,
    pub l2: f64,
    pub l21: f64,
}

/// `d*` of the 2-form `b dx ^ dy`, using the circle-aware gradient of `b`.
pub fn coexact_part(b: &MatrixField) -> MatrixOneForm {
    let g = dirichlet_gradient(b);
    MatrixOneForm {
        cx: g.cy,
        cy: g.cx.scale((-1.0).into()),
    }
}

/// `|grad b|` per node.
fn gradient_magnitudes(b: &MatrixField) -> Vec<f64> {
    dirichlet_gradient(b).node_norms()
}

/// Least-squares `a` minimizing `||r - grad a||` over interior nodes.
///
/// Unknowns live on all support nodes; the normal equations carry the
/// natural (zero flux) boundary condition. Returns mean-zero `a`.
fn exact_potential(r: &MatrixOneForm) -> Result<MatrixField> {
    let grid = r.grid().clone();
    let w = r.cx.width();
    let support: Vec<usize> = (0..grid.len()).filter(|&k| grid.in_support(k)).collect();
    let mut slot = vec![usize::MAX; grid.len()];
    for (u, &k) in support.iter().enumerate() {
        slot[k] = u;
    }
    let inv2h = 0.5 / grid.h();
    // (row, fwd, bwd) in unknown numbering for every interior row and axis
    let rows: Vec<(usize, usize, usize, Axis)> = grid
        .interior()
        .iter()
        .enumerate()
        .flat_map(|(ri, &k)| {
            let g = &grid;
            let slot = &slot;
            [Axis::X, Axis::Y].into_iter().map(move |axis| {
                let f = g.neighbor(k, axis, 1).expect("interior");
                let b = g.neighbor(k, axis, -1).expect("interior");
                (ri, slot[f], slot[b], axis)
            })
        })
        .collect();
    let mut diag = vec![0.0; support.len()];
    for &(_, f, b, _) in &rows {
        diag[f] += inv2h * inv2h;
        diag[b] += inv2h * inv2h;
    }
    let apply = |x: &[Complex64], y: &mut [Complex64]| {
        y.fill(Complex64::new(0.0, 0.0));
        for &(_, f, b, _) in &rows {
            let g = (x[f] - x[b]) * inv2h;
            y[f] += g * inv2h;
            y[b] -= g * inv2h;
        }
    };
    let mut a = MatrixField::zeros_shaped(r.grid(), r.cx.rows(), r.cx.cols());
    let interior = grid.interior();
    for c in 0..w {
        let mut rhs = vec![Complex64::new(0.0, 0.0); support.len()];
        for &(ri, f, b, axis) in &rows {
            let k = interior[ri];
            let v = match axis {
                Axis::X => r.cx.data()[k * w + c],
                Axis::Y => r.cy.data()[k * w + c],
            };
            rhs[f] += v * inv2h;
            rhs[b] -= v * inv2h;
        }
        let (x, _) = pcg(apply, &diag, &rhs, CG_TOL, 2 * iteration_cap(grid.n()))?;
        let mean: Complex64 =
            interior.iter().map(|&k| x[slot[k]]).sum::<Complex64>() / interior.len() as f64;
        for (u, &k) in support.iter().enumerate() {
            a.data_mut()[k * w + c] = x[u] - mean;
        }
    }
    Ok(a)
}

/// Decompose `omega` into exact and coexact parts.
///
/// `b` solves `-Lap b = *d omega` with zero boundary values; `a` is the
/// least-squares potential of `omega - d*b`; whatever neither captures is
/// returned as `residual`.
pub fn hodge_decompose(omega: &MatrixOneForm) -> Result<HodgeDecomposition> {
    let curl = exterior_d1(omega).c;
    let b = poisson_dirichlet(&curl.scale((-1.0).into()))?;
    let dstar_b = coexact_part(&b);
    let rem = omega.sub(&dstar_b);
    let a = exact_potential(&rem)?;
    let da = exterior_d(&a);
    let residual = rem.sub(&da);
    let l2 = omega.norm_l2();
    let l21 = lorentz_norm_of(
        b.grid(),
        &gradient_magnitudes(&b),
        b.grid().interior(),
        2.0,
        1.0,
    )?;
    Ok(HodgeDecomposition {
        a,
        b,
        da,
        dstar_b,
        residual,
        eps_dagger: l2 + l21,
        l2,
        l21,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct DaggerVerdict {
    pub satisfied: bool,
    pub eps_dagger: f64,
    pub l2: f64,
    pub l21: f64,
}

/// Compare `||omega||_{L2} + ||grad Lap^{-1} d omega||_{L^{2,1}}` with `eps`.
pub fn check_condition_dagger(omega: &MatrixOneForm, eps: f64) -> Result<DaggerVerdict> {
    omega.require_skew_hermitian()?;
    let dec = hodge_decompose(omega)?;
    Ok(verdict(&dec, eps))
}

pub fn verdict(dec: &HodgeDecomposition, eps: f64) -> DaggerVerdict {
    DaggerVerdict {
        satisfied: dec.eps_dagger <= eps,
        eps_dagger: dec.eps_dagger,
        l2: dec.l2,
        l21: dec.l21,
    }
}

/// Orthogonality defect `|<da, d*b>|` on the interior.
pub fn cross_term(dec: &HodgeDecomposition) -> f64 {
    dec.da.inner(&dec.dstar_b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CMat;
    use crate::grid::GridSpec;
    use std::sync::Arc;

    fn grid(n: usize) -> Arc<GridSpec> {
        Arc::new(GridSpec::new(n).unwrap())
    }

    #[test]
    fn zero_form() {
        let g = grid(33);
        let dec = hodge_decompose(&MatrixOneForm::zeros(&g, 2)).unwrap();
        assert_eq!(dec.eps_dagger, 0.0);
        assert_eq!(
            dec.a.max_norm() + dec.b.max_norm() + dec.residual.max_norm(),
            0.0
        );
    }

    #[test]
    fn exact_form_has_no_coexact_part() {
        let g = grid(65);
        let i = Complex64::new(0.0, 1.0);
        let a0 = MatrixField::from_fn(&g, 2, 2, |_, z| {
            let mut m = CMat::zeros(2, 2);
            m[(0, 0)] = i * z.re;
            m
        });
        let omega = exterior_d(&a0);
        let dec = hodge_decompose(&omega).unwrap();
        let grad_b = dirichlet_gradient(&dec.b).norm_l2();
        assert!(grad_b <= 1.0 * g.h() * omega.norm_l2(), "{grad_b}");
        let diff = dec.a.sub(&a0);
        let mean = diff.at(g.interior()[0]);
        let spread = g
            .interior()
            .iter()
            .map(|&k| (diff.at(k) - &mean).norm())
            .fold(0.0, f64::max);
        assert!(spread < 1e-6, "{spread}");
        assert!(dec.residual.norm_l2() <= 10.0 * g.h() * omega.norm_l2());
    }

    #[test]
    fn random_form_reconstruction() {
        let g = grid(65);
        for seed in 0..3 {
            let omega = crate::random::skew_form(&g, 2, seed, Some(1.0));
            let dec = hodge_decompose(&omega).unwrap();
            let h = g.h();
            assert!(
                dec.residual.norm_l2() <= 10.0 * h,
                "residual {}",
                dec.residual.norm_l2()
            );
            assert!(cross_term(&dec) <= 10.0 * h, "cross {}", cross_term(&dec));
            assert!(dec.a.skew_hermitian_defect() < 1e-10);
            assert!(dec.b.skew_hermitian_defect() < 1e-10);
            assert!(dec.residual.skew_hermitian_defect() < 1e-10);
            let back = dec.da.add(&dec.dstar_b).add(&dec.residual);
            assert!(back.sub(&omega).max_norm() < 1e-12);
        }
    }

    #[test]
    fn dagger_of_zero() {
        let g = grid(33);
        let v = check_condition_dagger(&MatrixOneForm::zeros(&g, 1), 0.1).unwrap();
        assert!(v.satisfied);
        assert_eq!(v.eps_dagger, 0.0);
    }
}
