//! Seeded band-limited test fields.
//!
//! Each field is a sum of at most 8 plane waves `C cos(pi (kx x + ky y) + phase)`
//! with small integer wave numbers and seed-derived coefficients, so the same
//! seed describes the same continuum field on every grid.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{CMat, MatrixField, MatrixOneForm};
use crate::grid::GridSpec;
use crate::mat::skew_part;

pub const MAX_MODES: usize = 8;
const MAX_WAVE: i32 = 3;

struct Mode {
    kx: f64,
    ky: f64,
    phase: f64,
    coef: CMat,
}

/// Plane-wave expansion with `rows x cols` complex coefficients.
pub struct ModeSet {
    modes: Vec<Mode>,
    rows: usize,
    cols: usize,
}

impl ModeSet {
    pub fn new(rng: &mut ChaCha8Rng, rows: usize, cols: usize, real: bool) -> Self {
        let count = rng.gen_range(4..=MAX_MODES);
        let modes = (0..count)
            .map(|_| {
                let kx = rng.gen_range(-MAX_WAVE..=MAX_WAVE) as f64;
                let ky = rng.gen_range(-MAX_WAVE..=MAX_WAVE) as f64;
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                let decay = 1.0 / (1.0 + kx * kx + ky * ky);
                let coef = CMat::from_fn(rows, cols, |_, _| {
                    let re = rng.gen_range(-1.0..1.0);
                    let im = if real { 0.0 } else { rng.gen_range(-1.0..1.0) };
                    Complex64::new(re, im) * decay
                });
                Mode {
                    kx,
                    ky,
                    phase,
                    coef,
                }
            })
            .collect();
        Self { modes, rows, cols }
    }

    pub fn eval(&self, z: Complex64) -> CMat {
        let mut out = CMat::zeros(self.rows, self.cols);
        for md in &self.modes {
            let arg = std::f64::consts::PI * (md.kx * z.re + md.ky * z.im) + md.phase;
            out += &md.coef * Complex64::new(arg.cos(), 0.0);
        }
        out
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real scalar field.
pub fn real_scalar(grid: &Arc<GridSpec>, seed: u64) -> MatrixField {
    let modes = ModeSet::new(&mut rng(seed), 1, 1, true);
    MatrixField::from_fn(grid, 1, 1, |_, z| modes.eval(z))
}

/// General complex `m x m` field.
pub fn complex_matrix(grid: &Arc<GridSpec>, m: usize, seed: u64) -> MatrixField {
    let modes = ModeSet::new(&mut rng(seed), m, m, false);
    MatrixField::from_fn(grid, m, m, |_, z| modes.eval(z))
}

/// `u(m)`-valued 1-form, scaled to the requested L2 norm when given.
pub fn skew_form(grid: &Arc<GridSpec>, m: usize, seed: u64, l2: Option<f64>) -> MatrixOneForm {
    let mut r = rng(seed);
    let mx = ModeSet::new(&mut r, m, m, false);
    let my = ModeSet::new(&mut r, m, m, false);
    let form = MatrixOneForm::from_fn(grid, m, |_, z| {
        (skew_part(&mx.eval(z)), skew_part(&my.eval(z)))
    });
    match l2 {
        Some(target) => {
            let norm = form.norm_l2();
            if norm > 0.0 {
                form.scale((target / norm).into())
            } else {
                form
            }
        }
        None => form,
    }
}

/// Smooth cutoff `(1 - 4|z|^2)^2` on `|z| <= 1/2`, zero outside.
pub fn half_disc_bump(z: Complex64) -> f64 {
    let s = 1.0 - 4.0 * z.norm_sqr();
    if s > 0.0 {
        s * s
    } else {
        0.0
    }
}

/// Scalar and 1-form pair supported in `|z| <= 1/2`.
pub fn compact_pair(grid: &Arc<GridSpec>, m: usize, seed: u64) -> (MatrixField, MatrixOneForm) {
    let mut r = rng(seed);
    let mf = ModeSet::new(&mut r, m, m, false);
    let mx = ModeSet::new(&mut r, m, m, false);
    let my = ModeSet::new(&mut r, m, m, false);
    let f = MatrixField::from_fn(grid, m, m, |_, z| {
        mf.eval(z) * Complex64::from(half_disc_bump(z))
    });
    let w = MatrixOneForm::from_fn(grid, m, |_, z| {
        let c = Complex64::from(half_disc_bump(z));
        (mx.eval(z) * c, my.eval(z) * c)
    });
    (f, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_field() {
        let g = Arc::new(GridSpec::new(17).unwrap());
        let a = skew_form(&g, 2, 7, Some(0.5));
        let b = skew_form(&g, 2, 7, Some(0.5));
        assert_eq!(a.cx.data(), b.cx.data());
        assert!((a.norm_l2() - 0.5).abs() < 1e-12);
        assert!(a.is_skew_hermitian(1e-14));
        let c = skew_form(&g, 2, 8, Some(0.5));
        assert_ne!(a.cx.data(), c.cx.data());
    }

    #[test]
    fn resolution_independent() {
        let g1 = Arc::new(GridSpec::new(17).unwrap());
        let g2 = Arc::new(GridSpec::new(33).unwrap());
        let a = real_scalar(&g1, 3);
        let b = real_scalar(&g2, 3);
        // node (8, 8) on the coarse grid is node (16, 16) on the fine one
        assert_eq!(a.value(g1.index(8, 8)), b.value(g2.index(16, 16)));
        assert_eq!(a.value(g1.index(8, 8)).im, 0.0);
    }

    #[test]
    fn compact_support() {
        let g = Arc::new(GridSpec::new(33).unwrap());
        let (f, w) = compact_pair(&g, 1, 1);
        for k in 0..g.len() {
            if g.z(k).norm() > 0.5 {
                assert_eq!(f.value(k), Complex64::new(0.0, 0.0));
                assert_eq!(w.cx.value(k), Complex64::new(0.0, 0.0));
            }
        }
    }
}
