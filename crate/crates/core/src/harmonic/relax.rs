//! Dirichlet-energy relaxation of maps with a fixed boundary trace.
//!
//! The energy is `1/2 sum_e w_e |u_j - u_i|^2` over grid edges, where `w_e`
//! is the fraction of the edge inside the closed disc. Interior nodes are
//! free; every other support node keeps the boundary trace.

use num_complex::Complex64;

use super::map::{MapField, Target};
use crate::elliptic::cg::pcg;
use crate::elliptic::iteration_cap;
use crate::error::{Error, Result};
use crate::grid::{Axis, GridSpec};

/// Relative tolerance of the inner tangent-space solve. Any CG iterate
/// started from zero lowers the quadratic energy, so this only affects speed.
const INNER_TOL: f64 = 1e-3;

/// Weighted edges `(i, j, w)` between support nodes.
pub(crate) fn edges(grid: &GridSpec) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for k in 0..grid.len() {
        if !grid.in_support(k) {
            continue;
        }
        for axis in [Axis::X, Axis::Y] {
            if let Some(q) = grid.neighbor(k, axis, 1).filter(|&q| grid.in_support(q)) {
                let w = grid.edge_fraction_in_disc(k, axis);
                if w > 0.0 {
                    out.push((k, q, w));
                }
            }
        }
    }
    out
}

fn energy_of(edges: &[(usize, usize, f64)], m: usize, v: &[f64]) -> f64 {
    0.5 * edges
        .iter()
        .map(|&(i, j, w)| {
            w * (0..m)
                .map(|c| (v[j * m + c] - v[i * m + c]).powi(2))
                .sum::<f64>()
        })
        .sum::<f64>()
}

/// `E(new) - E(old)` summed edge by edge, accurate far below the round-off of `E`.
fn energy_change(edges: &[(usize, usize, f64)], m: usize, old: &[f64], new: &[f64]) -> f64 {
    0.5 * edges
        .iter()
        .map(|&(i, j, w)| {
            w * (0..m)
                .map(|c| {
                    let a = old[j * m + c] - old[i * m + c];
                    let b = new[j * m + c] - new[i * m + c];
                    (b - a) * (b + a)
                })
                .sum::<f64>()
        })
        .sum::<f64>()
}

/// Energy gradient `sum_e w_e (u_k - u_nb)` at every node.
fn gradient_of(edges: &[(usize, usize, f64)], m: usize, v: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; v.len()];
    for &(i, j, w) in edges {
        for c in 0..m {
            let d = w * (v[i * m + c] - v[j * m + c]);
            g[i * m + c] += d;
            g[j * m + c] -= d;
        }
    }
    g
}

/// Discrete Dirichlet energy `1/2 int |grad u|^2`.
pub fn dirichlet_energy(u: &MapField) -> f64 {
    energy_of(&edges(u.grid()), u.m(), u.values())
}

/// Remove the component along `p` (sphere targets only).
fn tangential(target: Target, p: &[f64], g: &mut [f64]) {
    if let Target::Sphere { .. } = target {
        let pp: f64 = p.iter().map(|v| v * v).sum();
        let gp: f64 = p.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
        g.iter_mut().zip(p).for_each(|(v, a)| *v -= gp / pp * a);
    }
}

/// `L2` norm over interior nodes of the tangential part of the discrete Laplacian.
fn residual_of(grid: &GridSpec, target: Target, m: usize, v: &[f64], g: &[f64]) -> f64 {
    let h2 = grid.cell_area();
    let mut sum = 0.0;
    for &k in grid.interior() {
        let mut t = g[k * m..(k + 1) * m].to_vec();
        tangential(target, &v[k * m..(k + 1) * m], &mut t);
        sum += t.iter().map(|x| x * x).sum::<f64>() / (h2 * h2) * h2;
    }
    sum.sqrt()
}

/// Tension residual of the discrete energy: `||P_u Lap_h u||_{L2}`.
pub fn tension_residual(u: &MapField) -> f64 {
    let e = edges(u.grid());
    let g = gradient_of(&e, u.m(), u.values());
    residual_of(u.grid(), u.target(), u.m(), u.values(), &g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxMethod {
    /// Minimize the energy over tangent updates, then project back.
    TangentPlane,
    /// Projected explicit gradient flow with time step `0.2 h^2`.
    Flow,
}

#[derive(Debug, Clone, Copy)]
pub struct RelaxOptions {
    pub method: RelaxMethod,
    /// Stop once the tension residual is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Flow time step in units of `h^2`.
    pub dt: f64,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self {
            method: RelaxMethod::TangentPlane,
            tol: 1e-6,
            max_iter: 2000,
            dt: 0.2,
        }
    }
}

impl RelaxOptions {
    pub fn flow() -> Self {
        Self {
            method: RelaxMethod::Flow,
            max_iter: 2_000_000,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RelaxReport {
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    /// `(step, energy, tension_residual)`, starting with the initial state.
    pub history: Vec<(usize, f64, f64)>,
}

/// Orthonormal basis of the complement of `p` (Householder), or the identity.
fn tangent_basis(target: Target, p: &[f64]) -> Vec<Vec<f64>> {
    let m = p.len();
    match target {
        Target::Euclidean => (0..m)
            .map(|c| (0..m).map(|r| if r == c { 1.0 } else { 0.0 }).collect())
            .collect(),
        Target::Sphere { .. } => {
            let len = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut v: Vec<f64> = p.iter().map(|x| x / len).collect();
            v[0] += if v[0] >= 0.0 { 1.0 } else { -1.0 };
            let vv: f64 = v.iter().map(|x| x * x).sum();
            (1..m)
                .map(|c| {
                    (0..m)
                        .map(|r| (if r == c { 1.0 } else { 0.0 }) - 2.0 * v[r] * v[c] / vv)
                        .collect()
                })
                .collect()
        }
    }
}

/// Relax `u0` towards a harmonic map with the trace of `boundary` on every
/// non-interior support node.
///
/// The energy never increases from one accepted step to the next. Errors
/// with `Stalled` when the tension residual is still above `opts.tol` after
/// `opts.max_iter` steps, or when no step length decreases the energy.
pub fn harmonic_relax(
    u0: &MapField,
    boundary: &MapField,
    opts: RelaxOptions,
) -> Result<(MapField, RelaxReport)> {
    if u0.m() != boundary.m() || u0.grid().n() != boundary.grid().n() {
        return Err(Error::DimensionMismatch(
            "initial map and boundary trace differ in shape".into(),
        ));
    }
    u0.check_on_target()?;
    let grid = u0.grid().clone();
    let m = u0.m();
    let target = u0.target();
    let mut u = u0.clone();
    for k in 0..grid.len() {
        if grid.in_support(k) && !grid.is_interior(k) {
            let mut p = boundary.at(k).to_vec();
            target.project(&mut p);
            u.values_mut()[k * m..(k + 1) * m].copy_from_slice(&p);
        }
    }
    let e = edges(&grid);
    let mut energy = energy_of(&e, m, u.values());
    let mut g = gradient_of(&e, m, u.values());
    let mut residual = residual_of(&grid, target, m, u.values(), &g);
    let mut report = RelaxReport {
        history: vec![(0, energy, residual)],
        ..Default::default()
    };
    let record = match opts.method {
        RelaxMethod::TangentPlane => 1,
        RelaxMethod::Flow => (opts.max_iter / 2000).max(1).min(grid.n()),
    };
    let mut step = 0;
    while residual > opts.tol {
        if step >= opts.max_iter {
            return Err(Error::Stalled { energy, residual });
        }
        let direction = match opts.method {
            RelaxMethod::TangentPlane => tangent_minimizer(&grid, &e, target, m, u.values(), &g)?,
            RelaxMethod::Flow => {
                let mut d = vec![0.0; g.len()];
                for &k in grid.interior() {
                    let mut t: Vec<f64> =
                        g[k * m..(k + 1) * m].iter().map(|v| -opts.dt * v).collect();
                    tangential(target, u.at(k), &mut t);
                    d[k * m..(k + 1) * m].copy_from_slice(&t);
                }
                d
            }
        };
        let mut t = 1.0;
        let next = loop {
            let mut trial = u.values().to_vec();
            for &k in grid.interior() {
                let p = &mut trial[k * m..(k + 1) * m];
                p.iter_mut()
                    .zip(&direction[k * m..(k + 1) * m])
                    .for_each(|(a, d)| *a += t * d);
                target.project(p);
            }
            let delta = energy_change(&e, m, u.values(), &trial);
            if delta <= 0.0 {
                energy += delta;
                break trial;
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::Stalled { energy, residual });
            }
        };
        u.values_mut().copy_from_slice(&next);
        g = gradient_of(&e, m, u.values());
        residual = residual_of(&grid, target, m, u.values(), &g);
        step += 1;
        if step % record == 0 || residual <= opts.tol {
            report.history.push((step, energy, residual));
        }
    }
    report.energy = energy;
    report.residual = residual;
    report.iterations = step;
    Ok((u, report))
}

/// Tangent update `v` minimizing the quadratic energy of `u + v`.
fn tangent_minimizer(
    grid: &GridSpec,
    edges: &[(usize, usize, f64)],
    target: Target,
    m: usize,
    v: &[f64],
    g: &[f64],
) -> Result<Vec<f64>> {
    let free = grid.interior();
    let mut slot = vec![usize::MAX; grid.len()];
    for (s, &k) in free.iter().enumerate() {
        slot[k] = s;
    }
    let bases: Vec<Vec<Vec<f64>>> = free
        .iter()
        .map(|&k| tangent_basis(target, &v[k * m..(k + 1) * m]))
        .collect();
    let dim = bases[0].len();
    let mut diag = vec![0.0; free.len()];
    let mut links = Vec::new();
    for &(i, j, w) in edges {
        let (si, sj) = (slot[i], slot[j]);
        if si != usize::MAX {
            diag[si] += w;
        }
        if sj != usize::MAX {
            diag[sj] += w;
        }
        if si != usize::MAX && sj != usize::MAX {
            links.push((si, sj, w));
        }
    }
    // coupling blocks B_i^T B_j, so the operator never leaves tangent coordinates
    let couplings: Vec<f64> = links
        .iter()
        .flat_map(|&(si, sj, w)| {
            let (bi, bj) = (&bases[si], &bases[sj]);
            (0..dim * dim).map(move |ab| {
                let (a, b) = (ab / dim, ab % dim);
                w * (0..m).map(|r| bi[a][r] * bj[b][r]).sum::<f64>()
            })
        })
        .collect();
    let apply = |c: &[Complex64], out: &mut [Complex64]| {
        for (s, d) in diag.iter().enumerate() {
            for a in 0..dim {
                out[s * dim + a] = c[s * dim + a] * d;
            }
        }
        for (l, &(si, sj, _)) in links.iter().enumerate() {
            let block = &couplings[l * dim * dim..(l + 1) * dim * dim];
            for a in 0..dim {
                for b in 0..dim {
                    let wab = block[a * dim + b];
                    out[si * dim + a] -= c[sj * dim + b] * wab;
                    out[sj * dim + b] -= c[si * dim + a] * wab;
                }
            }
        }
    };
    let mut rhs = vec![Complex64::new(0.0, 0.0); free.len() * dim];
    for (s, &k) in free.iter().enumerate() {
        for (a, col) in bases[s].iter().enumerate() {
            rhs[s * dim + a] =
                Complex64::new(-(0..m).map(|r| col[r] * g[k * m + r]).sum::<f64>(), 0.0);
        }
    }
    let pdiag: Vec<f64> = diag
        .iter()
        .flat_map(|&d| std::iter::repeat_n(d, dim))
        .collect();
    let (c, _) = pcg(apply, &pdiag, &rhs, INNER_TOL, 4 * iteration_cap(grid.n()))?;
    let mut out = vec![0.0; v.len()];
    for (s, &k) in free.iter().enumerate() {
        for (a, col) in bases[s].iter().enumerate() {
            for r in 0..m {
                out[k * m + r] += c[s * dim + a].re * col[r];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::map::{inverse_stereographic, stereographic_energy};
    use std::sync::Arc;

    fn grid(n: usize) -> Arc<GridSpec> {
        Arc::new(GridSpec::new(n).unwrap())
    }

    #[test]
    fn constant_boundary_gives_constant_map() {
        let g = grid(33);
        let p0 = vec![0.0, 0.6, 0.8];
        let b = MapField::from_fn(&g, 3, Target::unit_sphere(), |_| p0.clone()).unwrap();
        let u0 =
            MapField::projected_from_fn(&g, 3, Target::unit_sphere(), |z| vec![z.re, 0.6, 0.8])
                .unwrap();
        let (u, rep) = harmonic_relax(&u0, &b, RelaxOptions::default()).unwrap();
        assert!(rep.energy < 1e-12, "{}", rep.energy);
        for &k in g.interior() {
            assert!(u.at(k).iter().zip(&p0).all(|(a, b)| (a - b).abs() < 1e-6));
        }
    }

    #[test]
    fn stereographic_energy_and_monotonicity() {
        let g = grid(65);
        let b = MapField::from_fn(&g, 3, Target::unit_sphere(), |z| {
            inverse_stereographic(z, 1.0)
        })
        .unwrap();
        let u0 = MapField::projected_from_fn(&g, 3, Target::unit_sphere(), |z| {
            let s = inverse_stereographic(z, 1.0);
            vec![s[0] + 0.3 * (1.0 - z.norm_sqr()), s[1], s[2]]
        })
        .unwrap();
        let (u, rep) = harmonic_relax(&u0, &b, RelaxOptions::default()).unwrap();
        assert!(rep.history.windows(2).all(|w| w[1].1 <= w[0].1));
        let exact = stereographic_energy(1.0);
        assert!(
            (rep.energy - exact).abs() < 0.02 * exact,
            "{} vs {exact}",
            rep.energy
        );
        assert!((dirichlet_energy(&u) - rep.energy).abs() < 1e-12);
    }

    #[test]
    fn flow_decreases_energy() {
        let g = grid(17);
        let b = MapField::from_fn(&g, 3, Target::unit_sphere(), |z| {
            inverse_stereographic(z, 1.0)
        })
        .unwrap();
        let u0 = MapField::projected_from_fn(&g, 3, Target::unit_sphere(), |z| {
            let s = inverse_stereographic(z, 1.0);
            vec![s[0] + 0.3 * (1.0 - z.norm_sqr()), s[1], s[2]]
        })
        .unwrap();
        let (_, flow) = harmonic_relax(&u0, &b, RelaxOptions::flow()).unwrap();
        assert!(flow.history.windows(2).all(|w| w[1].1 <= w[0].1));
        let (_, tp) = harmonic_relax(&u0, &b, RelaxOptions::default()).unwrap();
        assert!((flow.energy - tp.energy).abs() < 1e-6 * tp.energy);
    }
}
