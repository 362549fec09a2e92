//! Link lengths of a closed linkage from orthographic views of it in many
//! poses.
//!
//! Each frame contributes the projected lengths of the loop's links. For a
//! four-link loop the closure condition of every frame lifts to one linear
//! equation in 19 shape-only unknowns, the first four of which are the
//! squared link lengths. Stacking frames and solving by least squares
//! recovers the shape.
//!
//! ```
//! use jointloop::harness::{simulate, NoiseModel};
//! use jointloop::{assemble, solve, LoopShape, SolveOptions};
//!
//! let shape = LoopShape::from_lengths(&[2.0, 3.0, 4.0, 1.0]).unwrap();
//! let sim = simulate(&shape, 30, &NoiseModel::none(), 7).unwrap();
//! let result = solve(&assemble(&sim.frames).unwrap(), &SolveOptions::default()).unwrap();
//! let lengths = result.lengths.unwrap();
//! assert!((lengths[2] - 4.0).abs() < 1e-6);
//! ```

pub mod error;
pub mod geometry;
pub mod harness;
pub mod linearizer;
pub mod solver;
pub mod sum;

pub use error::{Error, Result};
pub use geometry::{
    dof_feasible_ranges, loop_residual, project_orthographic, reconstruct_depths,
    reconstruct_depths_with, synthesize_pose, synthesize_triangle, DepthAssignment, DofRanges,
    FrameObservation, LoopShape, Pose, PoseDof,
};
pub use linearizer::{
    coefficient3_row, coefficient_row, lift3_shape, lift_shape, sign_product3_oracle,
    sign_product_oracle, Coefficient3Row, CoefficientRow, Lifted3Vector, LiftedVector,
};
pub use solver::{
    assemble, recover_shape, solve, solve3, validate_against_frames, ClosureReport, LinearSystem,
    Recovery3Result, RecoveryResult, SolveOptions, FULL_RANK,
};
