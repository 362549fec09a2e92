//! Seeded generation of ground-truth poses and their projected frames.

use std::f64::consts::TAU;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::noise::{NoiseModel, NoiseTarget};
use crate::error::{Error, Result};
use crate::geometry::{
    dof_feasible_ranges, project_orthographic, synthesize_pose, synthesize_triangle, DofRanges,
    FrameObservation, LoopShape, Pose, PoseDof,
};

/// Fraction of each sampled interval trimmed at both ends.
pub const INTERVAL_SHRINK: f64 = 0.01;

/// How the object moves between frames.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Motion {
    /// Independent random configuration and orientation per frame.
    #[default]
    Free,
    /// The same pose in every frame.
    Static,
    /// One configuration and orientation, randomly shifted per frame.
    Translation,
    /// One configuration, rotated only about the projection (Z) axis.
    ZRotation,
}

impl std::str::FromStr for Motion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(Motion::Free),
            "static" => Ok(Motion::Static),
            "translation" => Ok(Motion::Translation),
            "z-rotation" | "z_rotation" => Ok(Motion::ZRotation),
            other => Err(Error::Parse(format!(
                "motion must be free, static, translation or z-rotation, got {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub frames: Vec<FrameObservation>,
    pub poses: Vec<Pose>,
}

fn uniform_in<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let w = hi - lo;
    let (lo, hi) = (lo + INTERVAL_SHRINK * w, hi - INTERVAL_SHRINK * w);
    lo + rng.random::<f64>() * (hi - lo)
}

/// Draw one set of pose parameters: diagonals uniform in their trimmed
/// feasible intervals, angles uniform in `[0, 2pi)`, a fair dihedral sign.
pub fn sample_dof<R: Rng + ?Sized>(ranges: &DofRanges, rng: &mut R) -> PoseDof {
    let (lo, hi) = ranges.diag_pr;
    let diag_pr = uniform_in(rng, lo, hi);
    let (q_lo, q_hi) = ranges
        .diag_qs(diag_pr)
        .expect("sampled diag_pr is inside its interval");
    let diag_qs = uniform_in(rng, q_lo, q_hi);
    PoseDof {
        diag_pr,
        diag_qs,
        rot_x: rng.random::<f64>() * TAU,
        rot_y: rng.random::<f64>() * TAU,
        rot_z: rng.random::<f64>() * TAU,
        dihedral_sign: if rng.random::<bool>() { 1.0 } else { -1.0 },
    }
}

/// Project a pose and apply measurement noise.
pub fn observe<R: Rng + ?Sized>(
    pose: &Pose,
    frame_index: usize,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<FrameObservation> {
    if noise.is_none() {
        return Ok(project_orthographic(pose).with_frame_index(frame_index));
    }
    match noise.target {
        NoiseTarget::Distances => {
            let exact = project_orthographic(pose);
            let noisy: Vec<f64> = exact
                .distances()
                .into_iter()
                .map(|d| noise.apply_distance(d, rng))
                .collect();
            FrameObservation::from_distances(frame_index, &noisy)
        }
        NoiseTarget::Points => {
            let points: Vec<[f64; 2]> = pose
                .projected_points()
                .into_iter()
                .map(|[x, y]| [noise.apply(x, rng), noise.apply(y, rng)])
                .collect();
            FrameObservation::from_projected_points(frame_index, &points)
        }
    }
}

/// Simulate `frame_count` frames of freely moving four-link loop.
pub fn simulate(
    shape: &LoopShape,
    frame_count: usize,
    noise: &NoiseModel,
    seed: u64,
) -> Result<Simulation> {
    simulate_motion(shape, frame_count, noise, seed, Motion::Free)
}

pub fn simulate_motion(
    shape: &LoopShape,
    frame_count: usize,
    noise: &NoiseModel,
    seed: u64,
    motion: Motion,
) -> Result<Simulation> {
    if frame_count == 0 {
        return Err(Error::TooFewFrames { needed: 1, got: 0 });
    }
    noise.validate()?;
    let ranges = dof_feasible_ranges(shape)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let base = sample_dof(&ranges, &mut rng);
    let base_pose = synthesize_pose(shape, &base)?;

    let mut poses = Vec::with_capacity(frame_count);
    for _ in 0..frame_count {
        let pose = match motion {
            Motion::Free => synthesize_pose(shape, &sample_dof(&ranges, &mut rng))?,
            Motion::Static => base_pose.clone(),
            Motion::Translation => {
                let offset = Vector3::new(
                    rng.random_range(-10.0..10.0),
                    rng.random_range(-10.0..10.0),
                    rng.random_range(-10.0..10.0),
                );
                base_pose.translated(&offset)
            }
            Motion::ZRotation => {
                let dof = PoseDof {
                    rot_z: rng.random::<f64>() * TAU,
                    ..base
                };
                synthesize_pose(shape, &dof)?
            }
        };
        poses.push(pose);
    }
    let frames = poses
        .iter()
        .enumerate()
        .map(|(i, p)| observe(p, i + 1, noise, &mut noise_rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(Simulation { frames, poses })
}

/// Exact frames of a rigid triangle under random orientations.
pub fn simulate_triangle(shape: &LoopShape, frame_count: usize, seed: u64) -> Result<Simulation> {
    if frame_count == 0 {
        return Err(Error::TooFewFrames { needed: 1, got: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poses = (0..frame_count)
        .map(|_| {
            let rot = [
                rng.random::<f64>() * TAU,
                rng.random::<f64>() * TAU,
                rng.random::<f64>() * TAU,
            ];
            synthesize_triangle(shape, rot)
        })
        .collect::<Result<Vec<_>>>()?;
    let frames = poses
        .iter()
        .enumerate()
        .map(|(i, p)| project_orthographic(p).with_frame_index(i + 1))
        .collect();
    Ok(Simulation { frames, poses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::loop_residual;

    fn shape() -> LoopShape {
        LoopShape::from_lengths(&[2.0, 3.0, 4.0, 1.0]).unwrap()
    }

    #[test]
    fn exact_frames_close() {
        let sim = simulate(&shape(), 19, &NoiseModel::none(), 42).unwrap();
        assert_eq!(sim.frames.len(), 19);
        assert_eq!(sim.frames[18].frame_index, 19);
        for f in &sim.frames {
            assert!(loop_residual(&shape(), f).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = simulate(&shape(), 5, &NoiseModel::none(), 1).unwrap();
        let b = simulate(&shape(), 5, &NoiseModel::none(), 1).unwrap();
        let c = simulate(&shape(), 5, &NoiseModel::none(), 2).unwrap();
        assert_eq!(a.frames, b.frames);
        assert_ne!(a.frames, c.frames);
    }

    #[test]
    fn rounding_noise_gives_three_digit_distances() {
        let sim = simulate(&shape(), 10, &NoiseModel::round_sig(3), 3).unwrap();
        for f in &sim.frames {
            for d in f.distances() {
                assert_eq!(super::super::noise::round_sig(d, 3), d);
            }
        }
    }

    #[test]
    fn zero_frames_rejected() {
        assert!(simulate(&shape(), 0, &NoiseModel::none(), 1).is_err());
    }

    #[test]
    fn infeasible_shape_rejected() {
        let bad = LoopShape::from_lengths(&[1.0, 1.0, 1.0, 10.0]).unwrap();
        assert!(matches!(
            simulate(&bad, 3, &NoiseModel::none(), 1),
            Err(Error::InfeasibleShape(_))
        ));
    }

    #[test]
    fn degenerate_motions_repeat_the_projection() {
        for motion in [Motion::Static, Motion::Translation, Motion::ZRotation] {
            let sim = simulate_motion(&shape(), 6, &NoiseModel::none(), 9, motion).unwrap();
            let first = sim.frames[0].sq_proj();
            for f in &sim.frames {
                for (u, v) in f.sq_proj().iter().zip(first) {
                    assert!((u - v).abs() < 1e-9, "{motion:?}");
                }
            }
        }
    }
}
