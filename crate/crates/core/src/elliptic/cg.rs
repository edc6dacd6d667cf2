//! Jacobi-preconditioned conjugate gradients for real symmetric operators
//! acting on complex vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct CgReport {
    pub iterations: usize,
    /// Final `||b - A x|| / ||b||`.
    pub residual: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Solve `A x = b` from `x = 0`, `A` given by `apply(x, out)` and its diagonal.
///
/// Stops at relative residual `tol`; errors after `max_iter` iterations.
pub fn pcg(
    apply: impl Fn(&[Complex64], &mut [Complex64]),
    diag: &[f64],
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<Complex64>, CgReport)> {
    let len = b.len();
    let mut x = vec![Complex64::new(0.0, 0.0); len];
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((x, CgReport::default()));
    }
    let mut r = b.to_vec();
    let mut z: Vec<Complex64> = r.iter().zip(diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![Complex64::new(0.0, 0.0); len];
    let mut rz = dot(&r, &z).re;
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap).re;
        if pap <= 0.0 {
            return Err(Error::NonConvergence {
                iterations: it,
                residual: norm(&r) / bnorm,
            });
        }
        let alpha = rz / pap;
        for i in 0..len {
            x[i] += p[i] * alpha;
            r[i] -= ap[i] * alpha;
        }
        let res = norm(&r) / bnorm;
        if res <= tol {
            return Ok((
                x,
                CgReport {
                    iterations: it,
                    residual: res,
                },
            ));
        }
        for i in 0..len {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z).re;
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..len {
            p[i] = z[i] + p[i] * beta;
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: norm(&r) / bnorm,
    })
}
