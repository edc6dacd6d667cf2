//! One runner per subcommand. Each writes its artifacts into the output
//! directory and returns a short human-readable summary line.

use std::f64::consts::PI;
use std::fs;
use std::io::BufReader;
use std::sync::Arc;

use num_complex::Complex64;

use super::config::{CommandKind, RunConfig};
use super::output::{num, Artifacts};
use crate::calculus::dz;
use crate::counterexample::sharpness_scan;
use crate::elliptic::{cross_term, hodge_decompose, wente_solve_partial};
use crate::error::{Error, Result};
use crate::field::{MatrixField, MatrixOneForm, VectorOneForm10};
use crate::gauge::{
    build_holomorphic_frame, coulomb_gauge, dbar_regularity_solve, CoulombOptions,
    FixedPointOptions, FrameOptions, RegularityOptions,
};
use crate::gfld::{self, FieldKind};
use crate::grid::GridSpec;
use crate::harmonic::{
    connection_residuals, harmonic_relax, hopf_differential, immersion_connection,
    inverse_stereographic, pmc_diagnostics, riviere_connection, stereographic_energy,
    ImmersionData, MapField, PmcOptions, RelaxOptions, Target,
};
use crate::lorentz::NormReport;
use crate::random;

pub fn run(cfg: &RunConfig) -> Result<String> {
    let out = Artifacts::create(&cfg.out()?)?;
    out.manifest(cfg)?;
    match cfg.command {
        CommandKind::Hodge => hodge(cfg, &out),
        CommandKind::Wente => wente(cfg, &out),
        CommandKind::Norms => norms(cfg, &out),
        CommandKind::Coulomb => coulomb(cfg, &out),
        CommandKind::Frame => frame(cfg, &out),
        CommandKind::Regularity => regularity(cfg, &out),
        CommandKind::Harmonic => harmonic(cfg, &out),
        CommandKind::Pmc => pmc(cfg, &out),
        CommandKind::Counterexample => counterexample(cfg, &out),
    }
}

fn grid_of(cfg: &RunConfig) -> Result<Arc<GridSpec>> {
    Ok(Arc::new(GridSpec::new(cfg.n()?)?))
}

fn frame_options(cfg: &RunConfig) -> Result<FrameOptions> {
    Ok(FrameOptions {
        eps: cfg.real("eps")?,
        coulomb: CoulombOptions {
            tol: cfg.real("tol-coulomb")?,
            ..CoulombOptions::default()
        },
        fixed_point: FixedPointOptions {
            tol: cfg.real("tol-fp")?,
            ..FixedPointOptions::default()
        },
    })
}

/// `random` (seeded, scaled to `l2`) or `zero`.
fn skew_input(cfg: &RunConfig, grid: &Arc<GridSpec>) -> Result<MatrixOneForm> {
    let m = cfg.m()?;
    Ok(match cfg.choice("field", &["random", "zero"])?.as_str() {
        "random" => random::skew_form(grid, m, cfg.seed()?, Some(cfg.real("l2")?)),
        _ => MatrixOneForm::zeros(grid, m),
    })
}

fn stereographic_map(grid: &Arc<GridSpec>, lambda: f64) -> Result<MapField> {
    MapField::from_fn(grid, 3, Target::unit_sphere(), |z| {
        inverse_stereographic(z, lambda)
    })
}

/// Connection for the frame and regularity runs; for `harmonic` also the map.
fn connection(
    cfg: &RunConfig,
    grid: &Arc<GridSpec>,
    allowed: &[&str],
) -> Result<(MatrixOneForm, Option<MapField>)> {
    let m = cfg.m()?;
    Ok(match cfg.choice("omega", allowed)?.as_str() {
        "zero" => (MatrixOneForm::zeros(grid, m), None),
        "random" => (
            random::skew_form(grid, m, cfg.seed()?, Some(cfg.real("l2")?)),
            None,
        ),
        _ => {
            let u = stereographic_map(grid, cfg.real("lambda")?)?;
            (riviere_connection(&u)?, Some(u))
        }
    })
}

fn hodge(cfg: &RunConfig, out: &Artifacts) -> Result<String> {
    let grid = grid_of(cfg)?;
    let omega = skew_input(cfg, &grid)?;
    let dec = hodge_decompose(&omega)?;
    let rows = [
        ("omega", "l2", omega.norm_l2()),
        ("exact", "l2", dec.da.norm_l2()),
        ("coexact", "l2", dec.dstar_b.norm_l2()),
        ("residual", "l2", dec.residual.norm_l2()),
        ("grad_b", "l21", dec.l21),
        ("cross", "inner", cross_term(&dec)),
        ("dagger", "eps", dec.eps_dagger),
    ];
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(c, n, v)| vec![c.to_string(), n.to_string(), num(*v)])
        .collect();
    out.csv("hodge.csv", "component,norm,value", &rows)?;
    out.one_form("omega", &omega)?;
    out.field("a", &dec.a, FieldKind::Matrix)?;
    out.field("b", &dec.b, FieldKind::Matrix)?;
    out.one_form("da", &dec.da)?;
    out.one_form("dstar_b", &dec.dstar_b)?;
    Ok(format!(
        "hodge: residual {:.3e}, eps_dagger {:.4}",
        dec.residual.norm_l2(),
        dec.eps_dagger
    ))
}

fn wente(cfg: &RunConfig, out: &Artifacts) -> Result<String> {
    let grid = grid_of(cfg)?;
    let seed = cfg.seed()?;
    let (a, b) = match cfg.choice("case", &["analytic", "random"])?.as_str() {
        "analytic" => (
            MatrixField::scalar_from_fn(&grid, |z| z.re.into()),
            MatrixField::scalar_from_fn(&grid, |z| z.im.into()),
        ),
        _ => (
            random::real_scalar(&grid, 2 * seed),
            random::real_scalar(&grid, 2 * seed + 1),
        ),
    };
    let (phi, rep) = wente_solve_partial(&a, &b)?;
    let n = grid.n().to_string();
    let rows: Vec<Vec<String>> = [
        ("ratio", rep.ratio),
        ("sup", rep.sup),
        ("grad_l2", rep.grad_l2),
        ("grad_l21", rep.grad_l21),
        ("grad_a", rep.grad_a),
        ("grad_b", rep.grad_b),
    ]
    .iter()
    .map(|(k, v)| vec![k.to_string(), n.clone(), seed.to_string(), num(*v)])
    .collect();
    out.csv("wente.csv", "ratio,n,seed,value", &rows)?;
    out.field("phi", &phi, FieldKind::Scalar)?;
    if !rep.ratio.is_finite() {
        return Err(Error::DegenerateInput("||grad a|| ||grad b|| = 0".into()));
    }
    Ok(format!(
        "wente: ratio {:.5} (1/(4 pi) = {:.5})",
        rep.ratio,
        0.25 / PI
    ))
}

fn norms(cfg: &RunConfig, out: &Artifacts) -> Result<String> {
    let input = cfg.text("input")?;
    let f = if input.is_empty() {
        let grid = grid_of(cfg)?;
        match cfg.choice("field", &["random", "inverse-radius"])?.as_str() {
            "random" => random::complex_matrix(&grid, cfg.m()?, cfg.seed()?),
            _ => MatrixField::scalar_from_fn(&grid, |z| {
                let r = z.norm();
                if r > 0.0 {
                    (1.0 / r).into()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    } else {
        let dump = gfld::read(BufReader::new(fs::File::open(&input)?))?;
        let grid = Arc::new(GridSpec::new(dump.n)?);
        dump.to_field(&grid)?
    };
    let grid = f.grid().clone();
    let nodes: Vec<usize> = grid
        .interior()
        .iter()
        .copied()
        .filter(|&k| grid.z(k).norm() > 0.0)
        .collect();
    let report = NormReport::of(&f, &nodes, true)?;
    let rows: Vec<Vec<String>> = report
        .rows()
        .into_iter()
        .map(|(name, p, q, v)| vec![name.to_string(), p, q, num(v)])
        .collect();
    out.csv("norms.csv", "norm,p,q,value", &rows)?;
    out.pgm("input", &grid, &f.node_norms())?;
    Ok(format!(
        "norms: L2 {:.5}, L(2,1) {:.5}",
        report.l2, report.l21
    ))
}

fn coulomb(cfg: &RunConfig, out: &Artifacts) -> Result<String> {
    let grid = grid_of(cfg)?;
    let omega = skew_input(cfg, &grid)?;
    let res = coulomb_gauge(
        &omega,
        CoulombOptions {
            tol: cfg.real("tol-coulomb")?,
            ..CoulombOptions::default()
        },
    )?;
    let rows: Vec<Vec<String>> = res
        .energy_history
        .iter()
        .zip(&res.residual_history)
        .enumerate()
        .map(|(i, (e, r))| vec![i.to_string(), num(*e), num(*r)])
        .collect();
    out.csv("coulomb.csv", "iter,energy,residual", &rows)?;
    out.summary(
        "summary.csv",
        &[
            ("omega_l2", omega.norm_l2()),
            ("residual", res.residual),
            ("nodal_residual", res.nodal_residual),
            ("grad_p", res.grad_p),
            ("initial_energy", res.initial_energy),
            ("iterations", res.iterations as f64),
        ],
    )?;
    out.field("P", &res.p.values, FieldKind::Matrix)?;
    out.field("eta", &res.eta, FieldKind::Matrix)?;
    Ok(format!(
        "coulomb: {} iterations, residual {:.3e}",
        res.iterations, res.residual
    ))
}

fn frame(cfg: &RunConfig, out: &Artifacts) -> Result<String> {
    let grid = grid_of(cfg)?;
    let (omega, _) = connection(cfg, &grid, &["zero", "random", "harmonic"])?;
    out.one_form("omega", &omega)?;
    let f = build_holomorphic_frame(&omega, frame_options(cfg)?)?;
    let r = &f.report;
    out.csv(
        "residual.csv",
        "n,residual",
        &[vec![grid.n().to_string(), num(r.residual)]],
    )?;
    out.summary(
        "frame.csv",
        &[
            ("eps_dagger", r.dagger.eps_dagger),
            ("omega_l2", r.omega_norm),
            ("coulomb_iterations", r.coulomb_iterations as f64),
            ("coulomb_residual", r.coulomb_residual),
            ("fixed_point_iterations", r.fixed_point_iterations as f64),
            ("contraction_rate", r.contraction_rate),
            ("fixed_point_residual", r.fixed_point_residual),
            ("residual", r.residual),
            ("p_unitarity", r.p_unitarity),
            ("q_dist_to_unitary", r.q_dist_to_unitary),
            ("s_dist_to_unitary", r.s_dist_to_unitary),
            ("grad_s_ratio", r.grad_s_ratio),
            ("potential_route_gap", r.potential_route_gap),
        ],
    )?;
    out.field("P", &f.p.values, FieldKind::Matrix)?;
    out.field("Q", &f.q.values, FieldKind::Matrix)?;
    out.field("S", &f.s.values, FieldKind::Matrix)?;
    out.field("eta", &f.eta, FieldKind::Matrix)?;
    Ok(format!(
        "frame: residual {:.3e}, dist(S, U(m)) {:.3e}",
        r.residual, r.s_dist_to_unitary
    ))
}

fn regularity(cfg: &RunConfig, out: &Artifacts) -> Result<String> {
    let grid = grid_of(cfg)?;
    let m = cfg.m()?;
    let (omega, u) = connection(cfg, &grid, &["zero", "harmonic"])?;
    // harmonic: u_z is closed for the connection of u; zero: the monomials 1, z, z^2, ...
    let alpha = match u {
        Some(u) => VectorOneForm10 {
            c: dz(&u.to_field()),
        },
        None => {
            VectorOneForm10::from_fn(&grid, m, |_, z| (0..m).map(|p| z.powu(p as u32)).collect())
        }
    };
    let (h, r) = dbar_regularity_solve(
        &alpha,
        &omega,
        RegularityOptions {
            frame: frame_options(cfg)?,
            tol_input: cfg.real("tol-input")?,
        },
    )?;
    out.summary(
        "regularity.csv",
        &[
            ("input_residual", r.input_residual),
            ("dbar_h", r.dbar_h),
            ("alpha_sup", r.alpha_sup),
            ("alpha_grad", r.alpha_grad),
            ("alpha_l2_sq", r.alpha_l2_sq),
            ("hardy", r.hardy),
            ("hardy_ratio", r.hardy_ratio),
            ("frame_residual", r.frame.residual),
            ("s_dist_to_unitary", r.frame.s_dist_to_unitary),
        ],
    )?;
    out.field("alpha", &alpha.c, FieldKind::Vector)?;
    out.field("h", &h.c, FieldKind::Vector)?;
    Ok(format!(
        "regularity: input residual {:.3e}, |dbar h| {:.3e}",
        r.input_residual, r.dbar_h
    ))
}

fn harmonic(cfg: &RunConfig, out: &Artifacts) -> Result<String> {
    let grid = grid_of(cfg)?;
    let lambda = cfg.real("lambda")?;
    let amp = cfg.real("perturbation")?;
    let sphere = Target::unit_sphere();
    let kind = cfg.choice("boundary", &["stereographic", "perturbed", "constant"])?;
    let trace = |z: Complex64| -> Vec<f64> {
        match kind.as_str() {
            "stereographic" => inverse_stereographic(z, lambda),
            "perturbed" => {
                let s = inverse_stereographic(z, lambda);
                let t = z.arg();
                vec![
                    s[0] + amp * (3.0 * t).sin(),
                    s[1] + amp * (2.0 * t).cos(),
                    s[2] + amp * z.re * z.im,
                ]
            }
            _ => vec![0.0, 0.0, 1.0],
        }
    };
    let boundary = MapField::projected_from_fn(&grid, 3, sphere, trace)?;
    // start away from the trace's own extension so the descent has work to do
    let u0 = MapField::projected_from_fn(&grid, 3, sphere, |z| {
        let mut p = trace(z);
        p[0] += 0.3 * (1.0 - z.norm_sqr());
        p
    })?;
    let mut opts = match cfg.choice("method", &["tangent", "flow"])?.as_str() {
        "tangent" => RelaxOptions::default(),
        _ => RelaxOptions::flow(),
    };
    opts.tol = cfg.real("tol-hm")?;
    let (u, rep) = harmonic_relax(&u0, &boundary, opts)?;
    let rows: Vec<Vec<String>> = rep
        .history
        .iter()
        .map(|(s, e, r)| vec![s.to_string(), num(*e), num(*r)])
        .collect();
    out.csv("harmonic.csv", "step,energy,tension_residual", &rows)?;
    let omega = riviere_connection(&u)?;
    let (phi, hopf) = hopf_differential(&u);
    let cr = connection_residuals(&u, &omega)?;
    let mut summary = vec![
        ("energy", rep.energy),
        ("tension_residual", rep.residual),
        ("iterations", rep.iterations as f64),
        ("hopf_dbar_l1", hopf),
        ("connection_divergence_l1", cr.divergence),
        ("connection_dbar_l1", cr.dbar),
    ];
    if kind == "stereographic" {
        summary.push(("expected_energy", stereographic_energy(lambda)));
    }
    out.summary("summary.csv", &summary)?;
    out.field("u", &u.to_field(), FieldKind::Vector)?;
    out.one_form("omega", &omega)?;
    out.field("phi", &phi, FieldKind::Scalar)?;
    Ok(format!(
        "harmonic: energy {:.6} after {} steps, Hopf residual {:.3e}",
        rep.energy, rep.iterations, hopf
    ))
}

fn pmc(cfg: &RunConfig, out: &Artifacts) -> Result<String> {
    let grid = grid_of(cfg)?;
    let sign = cfg.real("sign")?;
    let flat = Target::Euclidean;
    let (u, h) = match cfg.choice("patch", &["sphere", "plane"])?.as_str() {
        "sphere" => (
            MapField::from_fn(&grid, 3, flat, |z| inverse_stereographic(z, 1.0))?,
            MapField::from_fn(&grid, 3, flat, |z| {
                inverse_stereographic(z, 1.0)
                    .into_iter()
                    .map(|v| sign * v)
                    .collect()
            })?,
        ),
        _ => (
            MapField::from_fn(&grid, 3, flat, |z| vec![z.re, z.im, 0.0])?,
            MapField::from_fn(&grid, 3, flat, |_| vec![0.0; 3])?,
        ),
    };
    let data = ImmersionData::new(u, h)?;
    let r = pmc_diagnostics(
        &data,
        PmcOptions {
            tol_conf: cfg.real("tol-conf")?,
            tol_wente: cfg.real("tol-wente")?,
        },
    )?;
    out.summary(
        "pmc.csv",
        &[
            ("h", grid.h()),
            ("r1", r.r1),
            ("r2", r.r2),
            ("r3", r.r3),
            ("wente_defect", r.wente_defect),
            ("wente_terms", if r.wente_terms { 1.0 } else { 0.0 }),
            ("grad_sq", r.grad_sq),
            ("conformality_defect", r.conformality_defect),
        ],
    )?;
    out.field("u", &data.u.to_field(), FieldKind::Vector)?;
    out.one_form("omega", &immersion_connection(&data)?)?;
    Ok(format!(
        "pmc: r1 {:.3e}, r2 {:.3e}, r3 {:.3e}",
        r.r1, r.r2, r.r3
    ))
}

fn counterexample(cfg: &RunConfig, out: &Artifacts) -> Result<String> {
    let report = sharpness_scan(&cfg.resolutions()?, frame_options(cfg)?)?;
    out.raw_text("sharpness.csv", &report.csv())?;
    let frames: Vec<&str> = report.rows.iter().map(|r| r.frame.as_str()).collect();
    Ok(format!(
        "counterexample: {} resolutions, frame outcomes {}",
        report.rows.len(),
        frames.join(" ")
    ))
}
