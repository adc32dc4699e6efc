//! Generic time steppers for `(u, v, pi, zeta)` systems and their energy audit.

mod ledger;
mod problem;
mod state;
mod stepper;
mod trajectory;

pub use ledger::{EnergyLedger, LedgerRow};
pub use problem::{EnergyParts, Loads, ProblemInstance, QuadraticModel, ZetaStep};
pub use state::{Dims, LoadSampling, Scheme, SchemeConfig, State3F};
pub use stepper::{
    energy_balance_residual, sample_loads, step_backward_euler, step_cn_monolithic, step_fractional,
    total_energy, StepEnergy, Stepper,
};
pub use trajectory::{run_trajectory, Observer, Trajectory};
