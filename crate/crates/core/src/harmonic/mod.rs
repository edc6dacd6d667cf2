//! Harmonic maps into round spheres and conformal-immersion diagnostics.

mod geometry;
mod immersion;
mod map;
mod relax;

pub use geometry::{
    connection_residuals, grad_energy, hopf_differential, riviere_connection, tension,
    ConnectionResiduals, Tension, HOPF_RADIUS,
};
pub use immersion::{
    immersion_connection, mean_curvature_form, pmc_diagnostics, ImmersionData, PmcOptions,
    PmcReport,
};
pub use map::{inverse_stereographic, stereographic_energy, MapField, Target, ON_TARGET_TOL};
pub use relax::{
    dirichlet_energy, harmonic_relax, tension_residual, RelaxMethod, RelaxOptions, RelaxReport,
};
