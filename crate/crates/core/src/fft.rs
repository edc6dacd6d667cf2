//! Linear 2-D convolution on the node lattice via zero-padded FFTs.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Convolution `out[i] = sum_k kernel(i - k) f[k]` over an `n x n` lattice,
/// with the kernel supported on offsets `|di|, |dj| <= reach`.
pub struct Convolver {
    n: usize,
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<Complex64>,
}

impl Convolver {
    pub fn new(n: usize, reach: usize, kernel: impl Fn(i64, i64) -> Complex64) -> Self {
        let reach = reach.min(n - 1);
        let size = n + reach;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let mut buf = vec![Complex64::new(0.0, 0.0); size * size];
        let r = reach as i64;
        for dj in -r..=r {
            for di in -r..=r {
                let a = di.rem_euclid(size as i64) as usize;
                let b = dj.rem_euclid(size as i64) as usize;
                buf[b * size + a] = kernel(di, dj);
            }
        }
        let mut conv = Self {
            n,
            size,
            forward,
            inverse,
            kernel_hat: Vec::new(),
        };
        conv.transform(&mut buf, true);
        conv.kernel_hat = buf;
        conv
    }

    fn transform(&self, buf: &mut [Complex64], forward: bool) {
        let plan = if forward {
            &self.forward
        } else {
            &self.inverse
        };
        let s = self.size;
        for row in buf.chunks_exact_mut(s) {
            plan.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); s];
        for i in 0..s {
            for j in 0..s {
                col[j] = buf[j * s + i];
            }
            plan.process(&mut col);
            for j in 0..s {
                buf[j * s + i] = col[j];
            }
        }
    }

    /// Convolve one scalar lattice function (length `n*n`, row-major).
    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        let (n, s) = (self.n, self.size);
        let mut buf = vec![Complex64::new(0.0, 0.0); s * s];
        for j in 0..n {
            buf[j * s..j * s + n].copy_from_slice(&f[j * n..(j + 1) * n]);
        }
        self.transform(&mut buf, true);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.transform(&mut buf, false);
        let norm = 1.0 / (s * s) as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for i in 0..n {
                out[j * n + i] = buf[j * s + i] * norm;
            }
        }
        out
    }
}
