//! Convex kernels used inside a time step.

pub mod alternating;
pub mod linear;
pub mod prox;
pub mod sparse;

pub use alternating::{alternating_min, AltMinOptions, AltMinProblem, AltMinResult};
pub use linear::{conjugate_gradient, solve_spd, LinearSolverKind, SpdSolver};
pub use prox::{prox_ball_1hom, prox_ball_1hom_metric, prox_damage_unidirectional, GroupMetric, OneHomGroup};
pub use sparse::{CsrMatrix, SparseSymmetric};
