//! Lorentz quasi-norms from the exact discrete rearrangement, and a
//! local-Hardy-space estimator based on a truncated maximal function.
//!
//! The rearrangement of a node function is the step function taking the
//! sorted values `f*_1 >= f*_2 >= ...` on the intervals `(t_{k-1}, t_k]`,
//! `t_k = k h^2`. Norms are integrated exactly on that step function:
//!
//! `||f||_{p,q}^q = sum_k f*_k^q (p/q) (t_k^{q/p} - t_{k-1}^{q/p})`, and
//! `||f||_{p,inf} = max_k t_k^{1/p} f*_k`,
//!
//! so `||f||_{2,inf} <= ||f||_2 <= ||f||_{2,1}` holds exactly.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Convolver;
use crate::field::MatrixField;
use crate::grid::GridSpec;

/// Decreasing rearrangement of `|f|` over a node set.
#[derive(Debug, Clone)]
pub struct RearrangementProfile {
    pub values: Vec<f64>,
    pub areas: Vec<f64>,
}

impl RearrangementProfile {
    pub fn new(magnitudes: impl IntoIterator<Item = f64>, cell_area: f64) -> Result<Self> {
        let mut values: Vec<f64> = magnitudes.into_iter().map(f64::abs).collect();
        if values.is_empty() {
            return Err(Error::EmptyMask);
        }
        values.sort_by(|a, b| b.total_cmp(a));
        let areas = (1..=values.len()).map(|k| k as f64 * cell_area).collect();
        Ok(Self { values, areas })
    }

    /// Profile of the node norms of `f` on interior nodes.
    pub fn of_field(f: &MatrixField) -> Result<Self> {
        Self::of_nodes(f, f.grid().interior())
    }

    pub fn of_nodes(f: &MatrixField, nodes: &[usize]) -> Result<Self> {
        Self::new(nodes.iter().map(|&k| f.node_norm(k)), f.grid().cell_area())
    }

    pub fn measure(&self) -> f64 {
        *self.areas.last().unwrap_or(&0.0)
    }

    pub fn norm(&self, p: f64, q: f64) -> Result<f64> {
        if !(p >= 1.0) || !(q >= 1.0) {
            return Err(Error::DegenerateInput(format!(
                "Lorentz exponents p={p}, q={q}"
            )));
        }
        if q.is_infinite() {
            return Ok(self
                .values
                .iter()
                .zip(&self.areas)
                .map(|(f, t)| t.powf(1.0 / p) * f)
                .fold(0.0, f64::max));
        }
        let r = q / p;
        let mut prev = 0.0;
        let mut sum = 0.0;
        for (f, t) in self.values.iter().zip(&self.areas) {
            let cur = t.powf(r);
            sum += f.powf(q) * (cur - prev);
            prev = cur;
        }
        Ok((sum * p / q).powf(1.0 / q))
    }
}

/// `||f||_{L^{p,q}}` of the node norms of `f` over interior nodes; `q` may be infinite.
pub fn lorentz_norm(f: &MatrixField, p: f64, q: f64) -> Result<f64> {
    RearrangementProfile::of_field(f)?.norm(p, q)
}

/// As [`lorentz_norm`], restricted to the listed nodes.
pub fn lorentz_norm_on(f: &MatrixField, nodes: &[usize], p: f64, q: f64) -> Result<f64> {
    RearrangementProfile::of_nodes(f, nodes)?.norm(p, q)
}

/// Lorentz norm of precomputed node magnitudes `mags[k]` over `nodes`.
pub fn lorentz_norm_of(
    grid: &GridSpec,
    mags: &[f64],
    nodes: &[usize],
    p: f64,
    q: f64,
) -> Result<f64> {
    RearrangementProfile::new(nodes.iter().map(|&k| mags[k]), grid.cell_area())?.norm(p, q)
}

/// Reference bump `(1 - r^2)^2` on the unit ball.
pub fn bump(r: f64) -> f64 {
    if r < 1.0 {
        let s = 1.0 - r * r;
        s * s
    } else {
        0.0
    }
}

/// Largest scale used by the maximal function.
pub const MAX_SCALE: f64 = 0.25;

/// Dyadic scales `2h, 4h, ...` not exceeding [`MAX_SCALE`].
pub fn hardy_scales(h: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = 2.0 * h;
    while t <= MAX_SCALE + 1e-12 {
        out.push(t);
        t *= 2.0;
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct HardyEstimate {
    pub value: f64,
    /// Scale realizing the maximal function where it is largest (0 = pointwise value).
    pub dominant_scale: f64,
}

/// `int_D M f`, with `M f = max(|f|, max_t |phi_t * f|)` over [`hardy_scales`].
///
/// `f` is a scalar field extended by zero outside the disc.
pub fn hardy_h1_norm(f: &MatrixField) -> HardyEstimate {
    let grid: &Arc<GridSpec> = f.grid();
    let (n, h) = (grid.n(), grid.h());
    let vals: Vec<Complex64> = (0..grid.len())
        .map(|k| {
            if grid.in_support(k) {
                f.value(k)
            } else {
                0.0.into()
            }
        })
        .collect();
    let mut maximal: Vec<f64> = vals.iter().map(|v| v.norm()).collect();
    let mut which = vec![0.0f64; grid.len()];
    for t in hardy_scales(h) {
        let reach = (t / h).ceil() as usize;
        let rr = reach as i64;
        let mut total = 0.0;
        for dj in -rr..=rr {
            for di in -rr..=rr {
                total += bump(h * ((di * di + dj * dj) as f64).sqrt() / t);
            }
        }
        let conv = Convolver::new(n, reach, |di, dj| {
            Complex64::new(
                bump(h * ((di * di + dj * dj) as f64).sqrt() / t) / total,
                0.0,
            )
        });
        let avg = conv.apply(&vals);
        for &k in grid.interior() {
            let a = avg[k].norm();
            if a > maximal[k] {
                maximal[k] = a;
                which[k] = t;
            }
        }
    }
    let mut value = 0.0;
    let mut peak = (-1.0, 0.0);
    for &k in grid.interior() {
        value += maximal[k];
        if maximal[k] > peak.0 {
            peak = (maximal[k], which[k]);
        }
    }
    HardyEstimate {
        value: value * grid.cell_area(),
        dominant_scale: peak.1,
    }
}

/// Bundle of discrete norms of one scalar magnitude field.
#[derive(Debug, Clone)]
pub struct NormReport {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub l21: f64,
    pub l2inf: f64,
    pub h1: Option<HardyEstimate>,
    /// Number of nodes in the profile and their total area.
    pub nodes: usize,
    pub measure: f64,
}

impl NormReport {
    /// Norms of the node norms of `f` over `nodes`; `h1` only if requested.
    pub fn of(f: &MatrixField, nodes: &[usize], with_h1: bool) -> Result<Self> {
        let profile = RearrangementProfile::of_nodes(f, nodes)?;
        Ok(Self {
            l1: profile.norm(1.0, 1.0)?,
            l2: profile.norm(2.0, 2.0)?,
            linf: profile.values[0],
            l21: profile.norm(2.0, 1.0)?,
            l2inf: profile.norm(2.0, f64::INFINITY)?,
            h1: if with_h1 {
                Some(hardy_h1_norm(f))
            } else {
                None
            },
            nodes: profile.values.len(),
            measure: profile.measure(),
        })
    }

    /// `(name, p, q, value)` rows for CSV output.
    pub fn rows(&self) -> Vec<(&'static str, String, String, f64)> {
        let mut rows = vec![
            ("lebesgue", "1".to_string(), "1".to_string(), self.l1),
            ("lebesgue", "2".to_string(), "2".to_string(), self.l2),
            ("lebesgue", "inf".to_string(), "inf".to_string(), self.linf),
            ("lorentz", "2".to_string(), "1".to_string(), self.l21),
            ("lorentz", "2".to_string(), "inf".to_string(), self.l2inf),
        ];
        if let Some(h) = self.h1 {
            rows.push(("hardy", "1".to_string(), "-".to_string(), h.value));
        }
        rows
    }
}
