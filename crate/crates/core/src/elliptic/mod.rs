//! Poisson solvers, Hodge decomposition and the Wente problem on the disc.

pub mod cg;
mod hodge;
mod poisson;
mod wente;

pub use hodge::{
    check_condition_dagger, coexact_part, cross_term, hodge_decompose, verdict, DaggerVerdict,
    HodgeDecomposition,
};
pub use poisson::{
    dirichlet_gradient, iteration_cap, neumann_laplacian, poisson_dirichlet,
    poisson_dirichlet_report, poisson_neumann, NeumannOptions, CG_TOL,
};
pub use wente::{wente_solve, wente_solve_partial, WenteReport};
