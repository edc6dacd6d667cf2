//! Small dense complex matrix helpers used node-by-node.

use num_complex::Complex64;

use crate::field::CMat;

/// Matrix exponential by scaling and squaring with a degree-16 Taylor core.
///
/// Applied to skew-Hermitian generators, the result is unitary to round-off.
pub fn expm(a: &CMat) -> CMat {
    let m = a.nrows();
    let norm = a.norm();
    let mut squarings = 0u32;
    if norm > 0.25 {
        squarings = (norm / 0.25).log2().ceil() as u32;
    }
    let scaled = a / Complex64::new(2f64.powi(squarings as i32), 0.0);
    let mut term = CMat::identity(m, m);
    let mut sum = CMat::identity(m, m);
    for k in 1..=16 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `(A - A^*) / 2`.
pub fn skew_part(a: &CMat) -> CMat {
    (a - a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Singular values, largest first.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let mut s = a
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect::<Vec<_>>();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Spectral-norm distance to the unitary group, `max_k |sigma_k - 1|`.
pub fn dist_to_unitary(a: &CMat) -> f64 {
    singular_values(a)
        .iter()
        .map(|s| (s - 1.0).abs())
        .fold(0.0, f64::max)
}

/// `||P^* P - I||_F`.
pub fn unitarity_defect(p: &CMat) -> f64 {
    let m = p.nrows();
    (p.adjoint() * p - CMat::identity(m, m)).norm()
}

/// Spectral condition number; infinite for singular input.
pub fn condition_number(a: &CMat) -> f64 {
    let s = singular_values(a);
    let smin = *s.last().unwrap_or(&0.0);
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        s[0] / smin
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_of_diagonal_generator() {
        let a = CMat::from_row_slice(2, 2, &[c(0.0, 3.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
        let e = expm(&a);
        assert!((e[(0, 0)] - c(3f64.cos(), 3f64.sin())).norm() < 1e-13);
        assert!((e[(1, 1)] - c(1f64.cos(), -(1f64.sin()))).norm() < 1e-13);
        assert!(unitarity_defect(&e) < 1e-13);
    }

    #[test]
    fn exp_of_rotation_generator() {
        let a = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0)]);
        let e = expm(&a);
        assert!((e[(0, 0)] - c(2f64.cos(), 0.0)).norm() < 1e-13);
        assert!((e[(0, 1)] - c(2f64.sin(), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn distance_to_unitary() {
        let a = CMat::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.9)]);
        assert!((dist_to_unitary(&a) - 0.2).abs() < 1e-12);
        assert!((condition_number(&a) - 1.2 / 0.9).abs() < 1e-12);
    }
}
