//! Maps from the disc into `R^m`, optionally constrained to a round sphere.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{CMat, MatrixField};
use crate::grid::GridSpec;

/// Allowed `| |u| - r |` at interior nodes for sphere targets.
pub const ON_TARGET_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Euclidean,
    /// Round sphere of the given radius centred at the origin.
    Sphere {
        radius: f64,
    },
}

impl Target {
    pub fn unit_sphere() -> Self {
        Target::Sphere { radius: 1.0 }
    }

    /// Nearest-point projection; the identity for Euclidean targets.
    pub fn project(&self, p: &mut [f64]) {
        if let Target::Sphere { radius } = *self {
            let len = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            if len > 0.0 {
                p.iter_mut().for_each(|v| *v *= radius / len);
            }
        }
    }
}

/// Values in `R^m` at every support node (zero at exterior nodes).
#[derive(Debug, Clone)]
pub struct MapField {
    grid: Arc<GridSpec>,
    m: usize,
    values: Vec<f64>,
    target: Target,
}

impl MapField {
    pub fn new(
        grid: &Arc<GridSpec>,
        m: usize,
        mut values: Vec<f64>,
        target: Target,
    ) -> Result<Self> {
        if values.len() != grid.len() * m {
            return Err(Error::DimensionMismatch(format!(
                "map buffer of {} values for {} nodes of rank {m}",
                values.len(),
                grid.len()
            )));
        }
        for k in 0..grid.len() {
            if !grid.in_support(k) {
                values[k * m..(k + 1) * m].fill(0.0);
            }
        }
        let u = Self {
            grid: grid.clone(),
            m,
            values,
            target,
        };
        u.check_on_target()?;
        Ok(u)
    }

    /// Evaluate `f(z)` at every support node.
    pub fn from_fn(
        grid: &Arc<GridSpec>,
        m: usize,
        target: Target,
        mut f: impl FnMut(Complex64) -> Vec<f64>,
    ) -> Result<Self> {
        let mut values = vec![0.0; grid.len() * m];
        for k in 0..grid.len() {
            if grid.in_support(k) {
                values[k * m..(k + 1) * m].copy_from_slice(&f(grid.z(k)));
            }
        }
        Self::new(grid, m, values, target)
    }

    /// Like [`MapField::from_fn`] but projects every value onto the target first.
    pub fn projected_from_fn(
        grid: &Arc<GridSpec>,
        m: usize,
        target: Target,
        mut f: impl FnMut(Complex64) -> Vec<f64>,
    ) -> Result<Self> {
        Self::from_fn(grid, m, target, |z| {
            let mut p = f(z);
            target.project(&mut p);
            p
        })
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn at(&self, k: usize) -> &[f64] {
        &self.values[k * self.m..(k + 1) * self.m]
    }

    pub fn check_on_target(&self) -> Result<()> {
        if let Target::Sphere { radius } = self.target {
            for &k in self.grid.interior() {
                let len = self.at(k).iter().map(|v| v * v).sum::<f64>().sqrt();
                let deviation = (len - radius).abs();
                if deviation > ON_TARGET_TOL {
                    return Err(Error::NotOnTarget { node: k, deviation });
                }
            }
        }
        Ok(())
    }

    /// The map as an `m x 1` complex field with zero imaginary parts.
    pub fn to_field(&self) -> MatrixField {
        MatrixField::from_fn(&self.grid, self.m, 1, |k, _| {
            CMat::from_iterator(
                self.m,
                1,
                self.at(k).iter().map(|&v| Complex64::new(v, 0.0)),
            )
        })
    }

    /// Same values, other target (checked).
    pub fn with_target(&self, target: Target) -> Result<Self> {
        Self::new(&self.grid, self.m, self.values.clone(), target)
    }
}

/// Inverse stereographic projection of `lambda z` onto the unit sphere in `R^3`.
///
/// For `lambda = 1` the unit disc covers the upper hemisphere; the image of
/// the disc has area (and Dirichlet energy) `4 pi lambda^2 / (1 + lambda^2)`.
pub fn inverse_stereographic(z: Complex64, lambda: f64) -> Vec<f64> {
    let w = z * lambda;
    let r2 = w.norm_sqr();
    let d = 1.0 + r2;
    vec![2.0 * w.re / d, 2.0 * w.im / d, (1.0 - r2) / d]
}

/// Exact Dirichlet energy of [`inverse_stereographic`] on the unit disc.
pub fn stereographic_energy(lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    4.0 * std::f64::consts::PI * l2 / (1.0 + l2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stereographic_lands_on_sphere() {
        let g = Arc::new(GridSpec::new(33).unwrap());
        let u = MapField::from_fn(&g, 3, Target::unit_sphere(), |z| {
            inverse_stereographic(z, 1.0)
        })
        .unwrap();
        let k = g.index(16, 16);
        assert_eq!(u.at(k), &[0.0, 0.0, 1.0]);
        assert!((stereographic_energy(1.0) - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn off_target_rejected() {
        let g = Arc::new(GridSpec::new(17).unwrap());
        let r = MapField::from_fn(&g, 3, Target::unit_sphere(), |z| vec![z.re, z.im, 1.0]);
        assert!(matches!(r, Err(Error::NotOnTarget { .. })));
        let p =
            MapField::projected_from_fn(&g, 3, Target::unit_sphere(), |z| vec![z.re, z.im, 1.0]);
        assert!(p.is_ok());
    }
}
