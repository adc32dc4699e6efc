//! Drivers for the bar experiments: configuration, CSV output and
//! refinement studies.

mod config;
mod refine;
mod run;

pub use config::{
    ExperimentConfig, ExperimentKind, WaveformKind, BAR_HEIGHT, BAR_LENGTH, DELAMINATION_AMPLITUDE,
};
pub use refine::{
    observed_order, refinement_study, relative_l2, write_refinement_report, LevelTrace, PairDifference,
    RefinementReport,
};
pub use run::{
    bulk_problem, experiment_mesh, hysteresis_loop, run_experiment, simulate, surface_problem, HysteresisLoop,
    RunSummary, Simulation,
};
