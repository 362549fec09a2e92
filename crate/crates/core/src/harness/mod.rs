//! Simulation, noise models, file formats, embedded example data and
//! experiment runners.

pub mod experiments;
pub mod fixtures;
pub mod io;
pub mod noise;
pub mod simulate;

pub use experiments::{
    run_reproduction, run_sensitivity, Check, ExperimentReport, ReproductionOptions,
    ReproductionReport, SensitivityConfig,
};
pub use noise::{NoiseKind, NoiseModel, NoiseTarget};
pub use simulate::{simulate, simulate_motion, simulate_triangle, Motion, Simulation};
