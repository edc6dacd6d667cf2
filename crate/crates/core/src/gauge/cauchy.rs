//! Cauchy transform `(T f)(z) = (1/pi) int_D f(w) / (z - w) dA(w)`, the
//! solution operator of `dbar u = f`.
//!
//! `f` is treated as constant on each interior cell and every cell integral of
//! the kernel is evaluated in closed form, so the self cell contributes exactly
//! zero and near-diagonal cells are exact.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::fft::Convolver;
use crate::field::MatrixField;
use crate::grid::GridSpec;

/// Antiderivative with `d^2 F / dx dy = 1 / (x + i y)`.
fn antiderivative(x: f64, y: f64) -> Complex64 {
    let z = Complex64::new(x, y);
    Complex64::new(0.0, -1.0) * (z * z.ln() - z)
}

/// `int 1/zeta dA` over the square of side `h` centered at `c`, for `Re c >= h`.
fn right_half_square(c: Complex64, h: f64) -> Complex64 {
    let (x0, x1) = (c.re - 0.5 * h, c.re + 0.5 * h);
    let (y0, y1) = (c.im - 0.5 * h, c.im + 0.5 * h);
    antiderivative(x1, y1) - antiderivative(x0, y1) - antiderivative(x1, y0)
        + antiderivative(x0, y0)
}

/// `int 1/zeta dA` over the cell centered at `h (di + i dj)`.
pub fn cell_integral(di: i64, dj: i64, h: f64) -> Complex64 {
    if di == 0 && dj == 0 {
        return Complex64::new(0.0, 0.0);
    }
    if di >= dj.abs() {
        return right_half_square(Complex64::new(di as f64 * h, dj as f64 * h), h);
    }
    if -di >= dj.abs() {
        // zeta -> -zeta
        return -cell_integral(-di, -dj, h);
    }
    // zeta = i zeta', the cell rotates to the one centered at -i c
    Complex64::new(0.0, -1.0) * cell_integral(dj, -di, h)
}

/// Reusable Cauchy transform on one grid.
pub struct CauchyTransform {
    conv: Convolver,
    interior: Vec<bool>,
}

impl CauchyTransform {
    pub fn new(grid: &GridSpec) -> Self {
        let h = grid.h();
        let n = grid.n();
        let conv = Convolver::new(n, n - 1, |di, dj| cell_integral(di, dj, h) / PI);
        let interior = (0..grid.len()).map(|k| grid.is_interior(k)).collect();
        Self { conv, interior }
    }

    /// Apply `T` entry-wise to a matrix field; the result is kept on the support.
    pub fn apply(&self, f: &MatrixField) -> MatrixField {
        let w = f.width();
        let len = f.grid().len();
        let mut out = vec![Complex64::new(0.0, 0.0); len * w];
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for c in 0..w {
            for k in 0..len {
                buf[k] = if self.interior[k] {
                    f.data()[k * w + c]
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
            let v = self.conv.apply(&buf);
            for k in 0..len {
                out[k * w + c] = v[k];
            }
        }
        MatrixField::from_raw(f.grid(), f.rows(), f.cols(), out).expect("shape")
    }
}

/// One-shot Cauchy transform.
pub fn cauchy_pompeiu(f: &MatrixField) -> MatrixField {
    CauchyTransform::new(f.grid()).apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::dbar;
    use std::sync::Arc;

    /// Midpoint-refined quadrature of the cell integral.
    fn brute(di: i64, dj: i64, h: f64) -> Complex64 {
        let s = 200;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..s {
            for b in 0..s {
                let x = (di as f64 - 0.5 + (a as f64 + 0.5) / s as f64) * h;
                let y = (dj as f64 - 0.5 + (b as f64 + 0.5) / s as f64) * h;
                acc += 1.0 / Complex64::new(x, y);
            }
        }
        acc * (h * h / (s * s) as f64)
    }

    #[test]
    fn closed_form_cells() {
        for (di, dj) in [
            (1, 0),
            (0, 1),
            (-1, 0),
            (0, -1),
            (1, 1),
            (-2, 1),
            (3, -5),
            (-1, -1),
            (0, 4),
        ] {
            let exact = cell_integral(di, dj, 0.1);
            assert!(
                (exact - brute(di, dj, 0.1)).norm() < 1e-5 * exact.norm(),
                "{di} {dj}"
            );
        }
    }

    #[test]
    fn inverts_dbar() {
        let mut rel = Vec::new();
        for n in [33, 65] {
            let g = Arc::new(GridSpec::new(n).unwrap());
            let u = g.margin_set(4.0);
            for f in [
                MatrixField::scalar_from_fn(&g, |_| 1.0.into()),
                MatrixField::scalar_from_fn(&g, |z| z),
            ] {
                let t = cauchy_pompeiu(&f);
                let res = dbar(&t).sub(&f).norm_l2_on(&u) / f.norm_l2();
                assert!(res < 0.05, "{res}");
                rel.push(res);
            }
        }
        assert!(rel[2] < rel[0] && rel[3] < rel[1], "{rel:?}");
    }

    #[test]
    fn constant_density_gives_conjugate_plus_holomorphic() {
        let g = Arc::new(GridSpec::new(65).unwrap());
        let t = cauchy_pompeiu(&MatrixField::scalar_from_fn(&g, |_| 1.0.into()));
        // inside the disc T1 = zbar exactly in the continuum
        for &k in &g.margin_set(8.0) {
            assert!((t.value(k) - g.z(k).conj()).norm() < 0.02);
        }
    }
}
