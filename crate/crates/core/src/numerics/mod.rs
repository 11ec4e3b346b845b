//! Numerical kernels shared by the schedulers: Lambert W, scalar root and
//! maximum search, a dense simplex LP solver and a projected-subgradient
//! driver for the dual problems.

mod lambert;
mod scalar;
mod simplex;
mod subgradient;

pub use lambert::lambert_w0;
pub use scalar::{bisect_root, golden_section_max};
pub use simplex::{solve_lp, Bound, Constraint, LinearProgram, LpSolution, LpStatus, Relation};
pub use subgradient::{projected_subgradient, DualEvaluation, SubgradientConfig, SubgradientOutcome};

/// Lower clamp for fractions that must stay inside the open interval (0, 1).
pub const CLAMP_LOW: f64 = 1e-9;
/// Upper clamp for fractions that must stay inside the open interval (0, 1).
pub const CLAMP_HIGH: f64 = 1.0 - 1e-9;

pub(crate) fn clamp_open_unit(t: f64) -> f64 {
    t.clamp(CLAMP_LOW, CLAMP_HIGH)
}
