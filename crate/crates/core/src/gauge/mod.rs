//! Gauge frames, Coulomb gauges and holomorphic frames.

mod cauchy;
mod coulomb;
mod frame;
mod holomorphic;
mod pipeline;
mod transform;

pub use cauchy::{cauchy_pompeiu, cell_integral, CauchyTransform};
pub use coulomb::{coulomb_gauge, CoulombOptions, CoulombResult, Links};
pub use frame::{FrameKind, GaugeFrame, MAX_CONDITION};
pub use holomorphic::{holomorphic_gauge, FixedPointOptions, FixedPointReport};
pub use pipeline::{
    build_holomorphic_frame, dbar_regularity_solve, frame_residual, transform_then_check,
    FrameOptions, FrameReport, HolomorphicFrame, RegularityOptions, RegularityReport,
};
pub use transform::transform_connection;
