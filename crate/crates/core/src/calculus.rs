//! Discrete exterior calculus on the masked disc grid.
//!
//! Conventions: `d* = -div` on 1-forms, `*dx = dy`, `*dy = -dx`,
//! `*(dx ^ dy) = 1`, and the (0,1) part of `cx dx + cy dy` is `(cx + i cy)/2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{CMat, MatrixField, MatrixOneForm, MatrixTwoForm};
use crate::grid::{Axis, GridSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Partial derivative along `axis` of a flat node buffer of width `w`.
///
/// Central differences wherever both neighbors are in the support (always the
/// case at interior nodes), second-order one-sided stencils otherwise.
pub(crate) fn partial(grid: &GridSpec, data: &[Complex64], w: usize, axis: Axis) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    let inv2h = 0.5 / grid.h();
    let inv_h = 1.0 / grid.h();
    let live = |k: Option<usize>| k.filter(|&k| grid.in_support(k));
    for k in 0..grid.len() {
        if !grid.in_support(k) {
            continue;
        }
        let fwd = live(grid.neighbor(k, axis, 1));
        let bwd = live(grid.neighbor(k, axis, -1));
        let slot = &mut out[k * w..(k + 1) * w];
        match (fwd, bwd) {
            (Some(p), Some(q)) => {
                for c in 0..w {
                    slot[c] = (data[p * w + c] - data[q * w + c]) * inv2h;
                }
            }
            (Some(p), None) => match live(grid.neighbor(p, axis, 1)) {
                Some(pp) => {
                    for c in 0..w {
                        slot[c] = (-3.0 * data[k * w + c] + 4.0 * data[p * w + c]
                            - data[pp * w + c])
                            * inv2h;
                    }
                }
                None => {
                    for c in 0..w {
                        slot[c] = (data[p * w + c] - data[k * w + c]) * inv_h;
                    }
                }
            },
            (None, Some(q)) => match live(grid.neighbor(q, axis, -1)) {
                Some(qq) => {
                    for c in 0..w {
                        slot[c] = (3.0 * data[k * w + c] - 4.0 * data[q * w + c]
                            + data[qq * w + c])
                            * inv2h;
                    }
                }
                None => {
                    for c in 0..w {
                        slot[c] = (data[k * w + c] - data[q * w + c]) * inv_h;
                    }
                }
            },
            (None, None) => {}
        }
    }
    out
}

fn partial_field(f: &MatrixField, axis: Axis) -> MatrixField {
    let data = partial(f.grid(), f.data(), f.width(), axis);
    MatrixField::from_raw(f.grid(), f.rows(), f.cols(), data).expect("shape preserved")
}

pub fn partial_x(f: &MatrixField) -> MatrixField {
    partial_field(f, Axis::X)
}

pub fn partial_y(f: &MatrixField) -> MatrixField {
    partial_field(f, Axis::Y)
}

/// `df = f_x dx + f_y dy`.
pub fn exterior_d(f: &MatrixField) -> MatrixOneForm {
    MatrixOneForm {
        cx: partial_x(f),
        cy: partial_y(f),
    }
}

/// `d* omega = -(d_x cx + d_y cy)`.
pub fn codifferential(omega: &MatrixOneForm) -> MatrixField {
    partial_x(&omega.cx)
        .add(&partial_y(&omega.cy))
        .scale((-1.0).into())
}

pub fn hodge_star(omega: &MatrixOneForm) -> MatrixOneForm {
    MatrixOneForm {
        cx: omega.cy.scale((-1.0).into()),
        cy: omega.cx.clone(),
    }
}

/// `*(c dx ^ dy) = c`.
pub fn hodge_star2(tau: &MatrixTwoForm) -> MatrixField {
    tau.c.clone()
}

/// `(cx1 dx + cy1 dy) ^ (cx2 dx + cy2 dy) = (cx1 cy2 - cy1 cx2) dx ^ dy`, node-wise products.
pub fn wedge(a: &MatrixOneForm, b: &MatrixOneForm) -> Result<MatrixTwoForm> {
    let c = a.cx.matmul(&b.cy)?.sub(&a.cy.matmul(&b.cx)?);
    Ok(MatrixTwoForm { c })
}

/// Exterior derivative of a 1-form, `d(cx dx + cy dy) = (d_x cy - d_y cx) dx ^ dy`.
pub fn exterior_d1(omega: &MatrixOneForm) -> MatrixTwoForm {
    MatrixTwoForm {
        c: partial_x(&omega.cy).sub(&partial_y(&omega.cx)),
    }
}

/// The `dz-bar` coefficient `(cx + i cy) / 2`.
pub fn zbar_part(omega: &MatrixOneForm) -> MatrixField {
    omega.cx.add(&omega.cy.scale(I)).scale(0.5.into())
}

/// The `dz` coefficient `(cx - i cy) / 2`.
pub fn z_part(omega: &MatrixOneForm) -> MatrixField {
    omega.cx.sub(&omega.cy.scale(I)).scale(0.5.into())
}

/// `d/dz-bar = (d_x + i d_y) / 2` applied to a field.
pub fn dbar(f: &MatrixField) -> MatrixField {
    zbar_part(&exterior_d(f))
}

/// `d/dz = (d_x - i d_y) / 2` applied to a field.
pub fn dz(f: &MatrixField) -> MatrixField {
    z_part(&exterior_d(f))
}

/// `F = d omega + [omega, omega]`, with `[omega, omega](d_x, d_y) = [cx, cy]`.
pub fn curvature(omega: &MatrixOneForm) -> MatrixTwoForm {
    let bracket = omega
        .cx
        .matmul(&omega.cy)
        .and_then(|a| Ok(a.sub(&omega.cy.matmul(&omega.cx)?)))
        .expect("square components");
    MatrixTwoForm {
        c: exterior_d1(omega).c.add(&bracket),
    }
}

fn real_parts(z: &CMat) -> (CMat, CMat) {
    (
        z.map(|v| Complex64::new(v.re, 0.0)),
        z.map(|v| Complex64::new(v.im, 0.0)),
    )
}

fn sym(a: &CMat) -> CMat {
    (a + a.transpose()) * Complex64::new(0.5, 0.0)
}

fn antisym(a: &CMat) -> CMat {
    (a - a.transpose()) * Complex64::new(0.5, 0.0)
}

/// The unique `u(m)`-valued form with the same (0,1) part as `w`.
///
/// Writing `w^{0,1} = w1 + i w2` with real `w1, w2`, returns
/// `cx = 2(w1^A + i w2^S)`, `cy = 2(w2^A - i w1^S)`.
pub fn skew_hermitian_lift(w: &MatrixOneForm) -> MatrixOneForm {
    let zb = zbar_part(w);
    let m = w.m();
    let two = Complex64::new(2.0, 0.0);
    let mut out = MatrixOneForm::zeros(w.grid(), m);
    for k in 0..w.grid().len() {
        if !w.grid().in_support(k) {
            continue;
        }
        let (w1, w2) = real_parts(&zb.at(k));
        let cx = (antisym(&w1) + sym(&w2) * I) * two;
        let cy = (antisym(&w2) - sym(&w1) * I) * two;
        out.cx.set(k, &cx);
        out.cy.set(k, &cy);
    }
    out
}

/// Checks that two forms live on the same grid with the same fiber dimension.
pub fn check_compatible(a: &MatrixOneForm, b: &MatrixOneForm) -> Result<()> {
    if a.grid().n() != b.grid().n() || a.m() != b.m() {
        return Err(Error::DimensionMismatch(format!(
            "forms of rank {} on n={} and rank {} on n={}",
            a.m(),
            a.grid().n(),
            b.m(),
            b.grid().n()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn grid(n: usize) -> Arc<GridSpec> {
        Arc::new(GridSpec::new(n).unwrap())
    }

    fn mat2(a: [Complex64; 4]) -> CMat {
        CMat::from_row_slice(2, 2, &a)
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = grid(33);
        let f = MatrixField::scalar_from_fn(&g, |_| c(3.5));
        let d = exterior_d(&f);
        assert_eq!(d.max_norm(), 0.0);
    }

    #[test]
    fn affine_exactness_everywhere_in_support() {
        let g = grid(33);
        let f = MatrixField::scalar_from_fn(&g, |z| c(z.re));
        let d = exterior_d(&f);
        for k in 0..g.len() {
            if g.in_support(k) {
                assert!((d.cx.value(k) - c(1.0)).norm() < 1e-12);
                assert!(d.cy.value(k).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn quadratic_gradient_error_is_second_order() {
        // Oracle: analytic gradient (2x, 2y) of x^2 + y^2.
        let mut errs = vec![];
        for n in [33, 65] {
            let g = grid(n);
            let f = MatrixField::scalar_from_fn(&g, |z| c(z.norm_sqr()));
            let d = exterior_d(&f);
            let err = (0..g.len())
                .filter(|&k| g.in_support(k))
                .map(|k| {
                    let z = g.z(k);
                    (d.cx.value(k) - c(2.0 * z.re))
                        .norm()
                        .max((d.cy.value(k) - c(2.0 * z.im)).norm())
                })
                .fold(0.0, f64::max);
            errs.push(err / (g.h() * g.h()));
        }
        // central and one-sided stencils are both exact on quadratics
        assert!(errs.iter().all(|&e| e < 1e-8), "{errs:?}");
    }

    #[test]
    fn codifferential_sign_convention() {
        let g = grid(33);
        let zero = MatrixOneForm::zeros(&g, 1);
        assert_eq!(codifferential(&zero).max_norm(), 0.0);
        let dx = MatrixOneForm::from_fn(&g, 1, |_, _| {
            (CMat::from_element(1, 1, c(1.0)), CMat::zeros(1, 1))
        });
        assert!(codifferential(&dx).max_norm() < 1e-12);
        let xdx = MatrixOneForm::from_fn(&g, 1, |_, z| {
            (CMat::from_element(1, 1, c(z.re)), CMat::zeros(1, 1))
        });
        let div = codifferential(&xdx);
        for &k in g.interior() {
            assert!((div.value(k) + c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn star_conventions() {
        let g = grid(17);
        let dx = MatrixOneForm::from_fn(&g, 1, |_, _| {
            (CMat::from_element(1, 1, c(1.0)), CMat::zeros(1, 1))
        });
        let s = hodge_star(&dx);
        assert!(s.cx.max_norm() == 0.0 && (s.cy.value(g.interior()[0]) - c(1.0)).norm() == 0.0);
        let vol = MatrixTwoForm {
            c: MatrixField::scalar_from_fn(&g, |_| c(1.0)),
        };
        assert_eq!(hodge_star2(&vol).value(g.interior()[0]), c(1.0));
    }

    #[test]
    fn wedge_of_dx_dy_and_constant_matrices() {
        let g = grid(17);
        let m = mat2([c(1.0), c(2.0), c(0.0), I]);
        let nmat = mat2([c(0.0), c(1.0), c(-1.0), c(3.0)]);
        let mdx = MatrixOneForm::from_fn(&g, 2, |_, _| (m.clone(), CMat::zeros(2, 2)));
        let ndy = MatrixOneForm::from_fn(&g, 2, |_, _| (CMat::zeros(2, 2), nmat.clone()));
        let w = wedge(&mdx, &ndy).unwrap();
        let k = g.interior()[0];
        assert!((w.c.at(k) - &m * &nmat).norm() < 1e-14);
        let three = MatrixOneForm::zeros(&g, 3);
        assert!(wedge(&mdx, &three).is_err());
    }

    #[test]
    fn zbar_part_definition() {
        let g = grid(17);
        let m = mat2([c(1.0), c(2.0), c(3.0), c(4.0)]);
        let mdx = MatrixOneForm::from_fn(&g, 2, |_, _| (m.clone(), CMat::zeros(2, 2)));
        let mdy = MatrixOneForm::from_fn(&g, 2, |_, _| (CMat::zeros(2, 2), m.clone()));
        let k = g.interior()[3];
        assert!((zbar_part(&mdx).at(k) - &m * c(0.5)).norm() < 1e-15);
        assert!((zbar_part(&mdy).at(k) - &m * (I * 0.5)).norm() < 1e-15);
    }

    #[test]
    fn curvature_of_constant_form_is_commutator() {
        let g = grid(17);
        let m = mat2([c(0.0), c(1.0), c(0.0), c(0.0)]);
        let nmat = mat2([c(0.0), c(0.0), c(1.0), c(0.0)]);
        let w = MatrixOneForm::from_fn(&g, 2, |_, _| (m.clone(), nmat.clone()));
        let f = curvature(&w);
        let expected = &m * &nmat - &nmat * &m;
        for k in 0..g.len() {
            if g.in_support(k) {
                assert!((f.c.at(k) - &expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn lift_of_real_symmetric_dzbar() {
        // w = M dzbar means cx = M, cy = -i M; by hand the lift is cx = 0, cy = -2i M.
        let g = grid(17);
        let m = mat2([c(1.0), c(2.0), c(2.0), c(-1.0)]);
        let w = MatrixOneForm::from_fn(&g, 2, |_, _| (m.clone(), &m * (-I)));
        let lift = skew_hermitian_lift(&w);
        let k = g.interior()[5];
        assert!(lift.cx.at(k).norm() < 1e-14);
        assert!((lift.cy.at(k) - &m * (I * -2.0)).norm() < 1e-14);
        assert!(lift.skew_hermitian_defect() < 1e-14);
    }
}
