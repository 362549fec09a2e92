//! Loop shapes, poses, orthographic projection and per-frame loop closure.
//!
//! A loop `P1 -> P2 -> ... -> Pn -> P1` of rigid links is described by its
//! squared link lengths. Projecting a pose onto the XY plane yields squared
//! projected link lengths; the depth step of each link is then
//! `sqrt(sq_length - sq_proj)` up to sign, and the signed depth steps around
//! a closed loop must cancel.

use nalgebra::{Point3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on loop size; closure checks enumerate `2^(n-1)` sign patterns.
pub const MAX_LINKS: usize = 24;

/// Radicands in `[-RADICAND_CLAMP * sq_length, 0)` are treated as zero.
pub const RADICAND_CLAMP: f64 = 1e-6;

/// Scale factor of the default closure threshold (times the sum of link lengths).
pub const CLOSURE_REL_TOL: f64 = 1e-6;

/// Squared link lengths of a closed loop, in loop order.
///
/// For the four-link loop `P -> Q -> R -> S -> P` these are `(a, b, c, d)`
/// with `a = |PQ|^2`, `b = |QR|^2`, `c = |RS|^2`, `d = |SP|^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopShape {
    sq_lengths: Vec<f64>,
}

impl LoopShape {
    pub fn new(sq_lengths: Vec<f64>) -> Result<Self> {
        if sq_lengths.len() < 3 {
            return Err(Error::InvalidShape(format!(
                "a loop needs at least 3 links, got {}",
                sq_lengths.len()
            )));
        }
        if sq_lengths.len() > MAX_LINKS {
            return Err(Error::InvalidShape(format!(
                "at most {MAX_LINKS} links supported, got {}",
                sq_lengths.len()
            )));
        }
        if let Some(bad) = sq_lengths.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidShape(format!(
                "squared lengths must be positive and finite, got {bad}"
            )));
        }
        Ok(Self { sq_lengths })
    }

    /// Build from link lengths (not squared).
    pub fn from_lengths(lengths: &[f64]) -> Result<Self> {
        if let Some(bad) = lengths.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidShape(format!(
                "link lengths must be positive and finite, got {bad}"
            )));
        }
        Self::new(lengths.iter().map(|l| l * l).collect())
    }

    pub fn sq_lengths(&self) -> &[f64] {
        &self.sq_lengths
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.sq_lengths.iter().map(|v| v.sqrt()).collect()
    }

    pub fn len(&self) -> usize {
        self.sq_lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sq_lengths.is_empty()
    }

    /// `(a, b, c, d)` of a four-link loop.
    pub fn as_quad(&self) -> Result<[f64; 4]> {
        self.sq_lengths
            .as_slice()
            .try_into()
            .map_err(|_| Error::LinkCountMismatch {
                expected: 4,
                got: self.len(),
            })
    }

    /// Default "can close a loop" threshold: `1e-6 * sum of link lengths`.
    pub fn closure_threshold(&self) -> f64 {
        CLOSURE_REL_TOL * self.sq_lengths.iter().map(|v| v.sqrt()).sum::<f64>()
    }
}

/// Junction points of one pose, in loop order.
#[derive(Clone, Debug, PartialEq)]
pub struct Pose {
    pub points: Vec<Point3<f64>>,
}

impl Pose {
    pub fn new(points: Vec<Point3<f64>>) -> Self {
        Self { points }
    }

    pub fn from_coords(coords: &[[f64; 3]]) -> Self {
        Self::new(
            coords
                .iter()
                .map(|c| Point3::new(c[0], c[1], c[2]))
                .collect(),
        )
    }

    /// Squared 3D distances between cyclically consecutive points.
    pub fn link_sq_lengths(&self) -> Vec<f64> {
        let n = self.points.len();
        (0..n)
            .map(|k| (self.points[(k + 1) % n] - self.points[k]).norm_squared())
            .collect()
    }

    /// Apply a rotation about the origin.
    pub fn rotated(&self, rotation: &Rotation3<f64>) -> Self {
        Self::new(self.points.iter().map(|p| rotation * p).collect())
    }

    pub fn translated(&self, offset: &Vector3<f64>) -> Self {
        Self::new(self.points.iter().map(|p| p + offset).collect())
    }

    /// Z coordinates relative to the first point.
    pub fn anchored_depths(&self) -> Vec<f64> {
        let z0 = self.points.first().map_or(0.0, |p| p.z);
        self.points.iter().map(|p| p.z - z0).collect()
    }

    /// XY coordinates of the projected points.
    pub fn projected_points(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|p| [p.x, p.y]).collect()
    }
}

/// Squared projected link lengths of one frame (`A, B, C, D` for four links).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameObservation {
    pub frame_index: usize,
    sq_proj: Vec<f64>,
}

impl FrameObservation {
    pub fn new(frame_index: usize, sq_proj: Vec<f64>) -> Result<Self> {
        if frame_index == 0 {
            return Err(Error::InvalidObservation("frame index must be >= 1".into()));
        }
        if let Some(bad) = sq_proj.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidObservation(format!(
                "squared projected distances must be non-negative and finite, got {bad}"
            )));
        }
        Ok(Self {
            frame_index,
            sq_proj,
        })
    }

    /// Build from projected distances (not squared).
    pub fn from_distances(frame_index: usize, distances: &[f64]) -> Result<Self> {
        if let Some(bad) = distances.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidObservation(format!(
                "projected distances must be non-negative and finite, got {bad}"
            )));
        }
        Self::new(frame_index, distances.iter().map(|d| d * d).collect())
    }

    /// Measure squared distances between cyclically consecutive image points.
    pub fn from_projected_points(frame_index: usize, points: &[[f64; 2]]) -> Result<Self> {
        Self::new(frame_index, cyclic_sq_distances_2d(points))
    }

    pub fn sq_proj(&self) -> &[f64] {
        &self.sq_proj
    }

    pub fn distances(&self) -> Vec<f64> {
        self.sq_proj.iter().map(|v| v.sqrt()).collect()
    }

    pub fn len(&self) -> usize {
        self.sq_proj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sq_proj.is_empty()
    }

    pub fn as_quad(&self) -> Result<[f64; 4]> {
        self.sq_proj
            .as_slice()
            .try_into()
            .map_err(|_| Error::LinkCountMismatch {
                expected: 4,
                got: self.len(),
            })
    }

    pub fn with_frame_index(mut self, frame_index: usize) -> Self {
        self.frame_index = frame_index;
        self
    }
}

fn cyclic_sq_distances_2d(points: &[[f64; 2]]) -> Vec<f64> {
    let n = points.len();
    (0..n)
        .map(|k| {
            let p = points[k];
            let q = points[(k + 1) % n];
            (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)
        })
        .collect()
}

/// Degrees of freedom of a four-link pose.
///
/// Canonical construction: `P` at the origin, `R` on the +X axis at
/// `diag_pr`, `Q` in the XY plane with `y >= 0`, and `S` rotated about the
/// PR axis by the dihedral angle that yields `|QS| = diag_qs`. The dihedral
/// angle is 0 when `S` lies on the same side as `Q`; `dihedral_sign` picks
/// one of the two mirror images. The rigid rotation is extrinsic X, then Y,
/// then Z.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoseDof {
    pub diag_pr: f64,
    pub diag_qs: f64,
    pub rot_x: f64,
    pub rot_y: f64,
    pub rot_z: f64,
    pub dihedral_sign: f64,
}

impl PoseDof {
    pub fn rotation(&self) -> Rotation3<f64> {
        extrinsic_xyz(self.rot_x, self.rot_y, self.rot_z)
    }
}

/// Rotation about X by `rx`, then about the fixed Y axis by `ry`, then about
/// the fixed Z axis by `rz`.
pub fn extrinsic_xyz(rx: f64, ry: f64, rz: f64) -> Rotation3<f64> {
    Rotation3::from_axis_angle(&Vector3::z_axis(), rz)
        * Rotation3::from_axis_angle(&Vector3::y_axis(), ry)
        * Rotation3::from_axis_angle(&Vector3::x_axis(), rx)
}

/// Feasible diagonal ranges of a four-link shape.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DofRanges {
    lengths: [f64; 4],
    /// Open interval of admissible `|PR|`.
    pub diag_pr: (f64, f64),
}

/// In-plane placement of Q and S relative to the PR axis for a given `|PR|`.
#[derive(Clone, Copy, Debug)]
struct Triangles {
    q_x: f64,
    q_r: f64,
    s_x: f64,
    s_r: f64,
}

impl DofRanges {
    fn triangles(&self, diag_pr: f64) -> Triangles {
        let [la, lb, lc, ld] = self.lengths;
        let (a, b, c, d) = (la * la, lb * lb, lc * lc, ld * ld);
        let p2 = diag_pr * diag_pr;
        let q_x = (a - b + p2) / (2.0 * diag_pr);
        let s_x = (d - c + p2) / (2.0 * diag_pr);
        Triangles {
            q_x,
            q_r: (a - q_x * q_x).max(0.0).sqrt(),
            s_x,
            s_r: (d - s_x * s_x).max(0.0).sqrt(),
        }
    }

    fn check_pr(&self, diag_pr: f64) -> Result<()> {
        let (lo, hi) = self.diag_pr;
        let slack = 1e-12 * hi;
        if !diag_pr.is_finite() || diag_pr < lo - slack || diag_pr > hi + slack || diag_pr <= 0.0 {
            return Err(Error::InfeasibleDof(format!(
                "diag_pr {diag_pr} outside ({lo}, {hi})"
            )));
        }
        Ok(())
    }

    /// Closed interval of `|QS|` obtained by sweeping the dihedral angle
    /// from 0 to pi at the given `|PR|`.
    pub fn diag_qs(&self, diag_pr: f64) -> Result<(f64, f64)> {
        self.check_pr(diag_pr)?;
        let t = self.triangles(diag_pr);
        let dx = t.q_x - t.s_x;
        Ok((dx.hypot(t.q_r - t.s_r), dx.hypot(t.q_r + t.s_r)))
    }
}

/// Admissible diagonal ranges of a four-link shape.
pub fn dof_feasible_ranges(shape: &LoopShape) -> Result<DofRanges> {
    let [a, b, c, d] = shape.as_quad()?;
    let lengths = [a.sqrt(), b.sqrt(), c.sqrt(), d.sqrt()];
    let [la, lb, lc, ld] = lengths;
    let lo = (la - lb).abs().max((ld - lc).abs());
    let hi = (la + lb).min(ld + lc);
    if lo >= hi {
        return Err(Error::InfeasibleShape(format!(
            "|PR| interval ({lo}, {hi}) is empty"
        )));
    }
    Ok(DofRanges {
        lengths,
        diag_pr: (lo, hi),
    })
}

/// Place the four junction points for the given degrees of freedom.
pub fn synthesize_pose(shape: &LoopShape, dof: &PoseDof) -> Result<Pose> {
    let ranges = dof_feasible_ranges(shape)?;
    let (q_lo, q_hi) = ranges.diag_qs(dof.diag_pr)?;
    let slack = 1e-12 * q_hi.max(1.0);
    if !dof.diag_qs.is_finite() || dof.diag_qs < q_lo - slack || dof.diag_qs > q_hi + slack {
        return Err(Error::InfeasibleDof(format!(
            "diag_qs {} outside [{q_lo}, {q_hi}] for diag_pr {}",
            dof.diag_qs, dof.diag_pr
        )));
    }
    let t = ranges.triangles(dof.diag_pr);
    // |QS|^2 = dx^2 + q_r^2 + s_r^2 - 2 q_r s_r cos(phi)
    let denom = 2.0 * t.q_r * t.s_r;
    let phi = if denom > 0.0 {
        let dx = t.q_x - t.s_x;
        let cos_phi = (dx * dx + t.q_r * t.q_r + t.s_r * t.s_r - dof.diag_qs * dof.diag_qs) / denom;
        cos_phi.clamp(-1.0, 1.0).acos()
    } else {
        0.0
    };
    let sign = if dof.dihedral_sign < 0.0 { -1.0 } else { 1.0 };
    let canonical = Pose::new(vec![
        Point3::origin(),
        Point3::new(t.q_x, t.q_r, 0.0),
        Point3::new(dof.diag_pr, 0.0, 0.0),
        Point3::new(t.s_x, t.s_r * phi.cos(), sign * t.s_r * phi.sin()),
    ]);
    Ok(canonical.rotated(&dof.rotation()))
}

/// Place a rigid three-link loop (triangle) and rotate it extrinsically
/// about X, Y, Z.
pub fn synthesize_triangle(shape: &LoopShape, rot: [f64; 3]) -> Result<Pose> {
    let [a, b, c]: [f64; 3] =
        shape
            .sq_lengths()
            .try_into()
            .map_err(|_| Error::LinkCountMismatch {
                expected: 3,
                got: shape.len(),
            })?;
    let (la, lb, lc) = (a.sqrt(), b.sqrt(), c.sqrt());
    if la >= lb + lc || lb >= la + lc || lc >= la + lb {
        return Err(Error::InfeasibleShape(format!(
            "links ({la}, {lb}, {lc}) violate the triangle inequality"
        )));
    }
    // P at origin, Q on +X; R at distance sqrt(c) from P and sqrt(b) from Q.
    let r_x = (c - b + a) / (2.0 * la);
    let r_y = (c - r_x * r_x).max(0.0).sqrt();
    let pose = Pose::new(vec![
        Point3::origin(),
        Point3::new(la, 0.0, 0.0),
        Point3::new(r_x, r_y, 0.0),
    ]);
    Ok(pose.rotated(&extrinsic_xyz(rot[0], rot[1], rot[2])))
}

/// Drop Z and measure squared distances between consecutive projected points.
pub fn project_orthographic(pose: &Pose) -> FrameObservation {
    FrameObservation {
        frame_index: 1,
        sq_proj: cyclic_sq_distances_2d(&pose.projected_points()),
    }
}

/// Unsigned depth step `sqrt(sq_length - sq_proj)` of every link.
pub fn depth_steps(shape: &LoopShape, obs: &FrameObservation) -> Result<Vec<f64>> {
    if shape.len() != obs.len() {
        return Err(Error::LinkCountMismatch {
            expected: shape.len(),
            got: obs.len(),
        });
    }
    shape
        .sq_lengths()
        .iter()
        .zip(obs.sq_proj())
        .enumerate()
        .map(|(link, (&sq_length, &sq_proj))| {
            let r = sq_length - sq_proj;
            if r >= 0.0 {
                Ok(r.sqrt())
            } else if r >= -RADICAND_CLAMP * sq_length {
                Ok(0.0)
            } else {
                Err(Error::NegativeRadicand {
                    link,
                    sq_length,
                    sq_proj,
                })
            }
        })
        .collect()
}

/// Smallest `|h_1 +- h_2 +- ... +- h_n|` over all sign patterns.
///
/// Zero means the projected frame is consistent with the shape.
pub fn loop_residual(shape: &LoopShape, obs: &FrameObservation) -> Result<f64> {
    let steps = depth_steps(shape, obs)?;
    let (first, rest) = steps.split_first().expect("shape has at least 3 links");
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << rest.len()) {
        let mut s = *first;
        for (k, h) in rest.iter().enumerate() {
            if mask & (1 << k) != 0 {
                s -= h;
            } else {
                s += h;
            }
        }
        best = best.min(s.abs());
    }
    Ok(best)
}

/// Relative depths of one consistent sign choice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthAssignment {
    /// Z of each point relative to the first point.
    pub z_offsets: Vec<f64>,
    /// `+1` / `-1` per link: sign of `z[k+1] - z[k]`.
    pub sign_pattern: Vec<i8>,
}

impl DepthAssignment {
    pub fn reflected(&self) -> Self {
        Self {
            z_offsets: self.z_offsets.iter().map(|z| -z).collect(),
            sign_pattern: self.sign_pattern.iter().map(|s| -s).collect(),
        }
    }
}

/// Every depth assignment that closes the loop, with the default threshold.
pub fn reconstruct_depths(
    shape: &LoopShape,
    obs: &FrameObservation,
) -> Result<Vec<DepthAssignment>> {
    reconstruct_depths_with(shape, obs, shape.closure_threshold())
}

/// Every depth assignment whose signed steps sum to within `tolerance` of 0.
///
/// Sign patterns that differ only on zero-length steps produce identical
/// offsets and are collapsed. The result is closed under global reflection.
pub fn reconstruct_depths_with(
    shape: &LoopShape,
    obs: &FrameObservation,
    tolerance: f64,
) -> Result<Vec<DepthAssignment>> {
    let steps = depth_steps(shape, obs)?;
    let n = steps.len();
    let mut best = f64::INFINITY;
    let mut out: Vec<DepthAssignment> = Vec::new();
    for mask in 0u32..(1 << n) {
        let signs: Vec<i8> = (0..n)
            .map(|k| if mask & (1 << k) != 0 { -1 } else { 1 })
            .collect();
        let closure: f64 = steps
            .iter()
            .zip(&signs)
            .map(|(h, &s)| f64::from(s) * h)
            .sum();
        best = best.min(closure.abs());
        if closure.abs() > tolerance {
            continue;
        }
        let mut z = Vec::with_capacity(n);
        let mut acc = 0.0;
        z.push(acc);
        for k in 0..n - 1 {
            acc += f64::from(signs[k]) * steps[k];
            z.push(acc);
        }
        let duplicate = out.iter().any(|d| {
            d.z_offsets
                .iter()
                .zip(&z)
                .all(|(u, v)| (u - v).abs() <= tolerance)
        });
        if !duplicate {
            out.push(DepthAssignment {
                z_offsets: z,
                sign_pattern: signs,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::InconsistentFrame {
            residual: best,
            tolerance,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, SQRT_2};

    fn quad(a: f64, b: f64, c: f64, d: f64) -> LoopShape {
        LoopShape::new(vec![a, b, c, d]).unwrap()
    }

    fn unit_square_xy() -> Pose {
        Pose::from_coords(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
        ])
    }

    #[test]
    fn shape_validation() {
        assert!(LoopShape::new(vec![1.0, 1.0]).is_err());
        assert!(LoopShape::new(vec![1.0, 0.0, 1.0]).is_err());
        assert!(LoopShape::new(vec![1.0, f64::NAN, 1.0]).is_err());
        assert!(LoopShape::new(vec![1.0; MAX_LINKS + 1]).is_err());
        let s = LoopShape::from_lengths(&[2.0, 3.0, 4.0, 1.0]).unwrap();
        assert_eq!(s.sq_lengths(), &[4.0, 9.0, 16.0, 1.0]);
        assert!((s.closure_threshold() - 1e-5).abs() < 1e-18);
    }

    #[test]
    fn observation_validation() {
        assert!(FrameObservation::new(0, vec![1.0; 4]).is_err());
        assert!(FrameObservation::new(1, vec![1.0, -1.0, 1.0, 1.0]).is_err());
        let o = FrameObservation::from_distances(3, &[2.0, 0.5]).unwrap();
        assert_eq!(o.sq_proj(), &[4.0, 0.25]);
        assert_eq!(o.frame_index, 3);
    }

    #[test]
    fn pr_interval_from_triangle_inequalities() {
        let r = dof_feasible_ranges(&quad(4.0, 9.0, 16.0, 1.0)).unwrap();
        assert_eq!(r.diag_pr, (3.0, 5.0));
        let r = dof_feasible_ranges(&quad(1.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(r.diag_pr, (0.0, 2.0));
        let (lo, hi) = r.diag_qs(SQRT_2).unwrap();
        assert!(lo <= SQRT_2 && SQRT_2 <= hi + 1e-15);
    }

    #[test]
    fn empty_pr_interval_is_infeasible() {
        let err = dof_feasible_ranges(&quad(1.0, 1.0, 1.0, 10.0)).unwrap_err();
        assert!(matches!(err, Error::InfeasibleShape(_)));
    }

    #[test]
    fn qs_interval_matches_dihedral_sweep() {
        let shape = quad(4.0, 9.0, 16.0, 1.0);
        let ranges = dof_feasible_ranges(&shape).unwrap();
        let pr = 4.2;
        let (lo, hi) = ranges.diag_qs(pr).unwrap();
        // sweep the dihedral angle of the constructed pose
        let (mut min, mut max) = (f64::INFINITY, 0.0f64);
        for i in 0..=2000 {
            let phi = std::f64::consts::PI * f64::from(i) / 2000.0;
            let t = ranges.triangles(pr);
            let q = Point3::new(t.q_x, t.q_r, 0.0);
            let s = Point3::new(t.s_x, t.s_r * phi.cos(), t.s_r * phi.sin());
            let d = (q - s).norm();
            min = min.min(d);
            max = max.max(d);
        }
        assert!((lo - min).abs() < 1e-12);
        assert!((hi - max).abs() < 1e-12);
    }

    #[test]
    fn planar_unit_square() {
        let shape = quad(1.0, 1.0, 1.0, 1.0);
        let dof = PoseDof {
            diag_pr: SQRT_2,
            diag_qs: SQRT_2,
            rot_x: 0.0,
            rot_y: 0.0,
            rot_z: 0.0,
            dihedral_sign: 1.0,
        };
        let pose = synthesize_pose(&shape, &dof).unwrap();
        for p in &pose.points {
            assert!(p.z.abs() < 1e-12);
        }
        for l in pose.link_sq_lengths() {
            assert!((l - 1.0).abs() < 1e-12);
        }
        let obs = project_orthographic(&pose);
        for v in obs.sq_proj() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unreachable_qs_is_rejected() {
        let shape = quad(1.0, 1.0, 1.0, 1.0);
        let dof = PoseDof {
            diag_pr: SQRT_2,
            diag_qs: 2.1,
            rot_x: 0.0,
            rot_y: 0.0,
            rot_z: 0.0,
            dihedral_sign: 1.0,
        };
        assert!(matches!(
            synthesize_pose(&shape, &dof),
            Err(Error::InfeasibleDof(_))
        ));
    }

    #[test]
    fn synthesized_links_hold() {
        let shape = quad(4.0, 9.0, 16.0, 1.0);
        let ranges = dof_feasible_ranges(&shape).unwrap();
        for (pr, frac, sign) in [(3.1, 0.2, 1.0), (4.0, 0.5, -1.0), (4.9, 0.9, 1.0)] {
            let (lo, hi) = ranges.diag_qs(pr).unwrap();
            let dof = PoseDof {
                diag_pr: pr,
                diag_qs: lo + frac * (hi - lo),
                rot_x: 0.3,
                rot_y: -1.1,
                rot_z: 2.5,
                dihedral_sign: sign,
            };
            let pose = synthesize_pose(&shape, &dof).unwrap();
            for (got, want) in pose.link_sq_lengths().iter().zip(shape.sq_lengths()) {
                assert!((got - want).abs() <= 1e-9 * want);
            }
            assert!(((pose.points[2] - pose.points[0]).norm() - pr).abs() < 1e-12);
            assert!(((pose.points[3] - pose.points[1]).norm() - dof.diag_qs).abs() < 1e-9);
        }
    }

    #[test]
    fn edge_on_square_projects_two_links_to_zero() {
        let rot = extrinsic_xyz(FRAC_PI_2, 0.0, 0.0);
        let obs = project_orthographic(&unit_square_xy().rotated(&rot));
        let zeros = obs.sq_proj().iter().filter(|v| v.abs() < 1e-15).count();
        assert_eq!(zeros, 2);
    }

    #[test]
    fn residual_zero_when_projection_equals_shape() {
        let shape = quad(1.0, 1.0, 1.0, 1.0);
        let obs = FrameObservation::new(1, vec![1.0; 4]).unwrap();
        assert_eq!(loop_residual(&shape, &obs).unwrap(), 0.0);
    }

    #[test]
    fn radicand_clamp_and_rejection() {
        let shape = quad(1.0, 1.0, 1.0, 1.0);
        let slightly = FrameObservation::new(1, vec![1.0 + 5e-7, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(depth_steps(&shape, &slightly).unwrap()[0], 0.0);
        let far = FrameObservation::new(1, vec![1.0 + 1e-5, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            loop_residual(&shape, &far),
            Err(Error::NegativeRadicand { link: 0, .. })
        ));
    }

    #[test]
    fn residual_link_count_mismatch() {
        let shape = quad(1.0, 1.0, 1.0, 1.0);
        let obs = FrameObservation::new(1, vec![0.5; 3]).unwrap();
        assert!(matches!(
            loop_residual(&shape, &obs),
            Err(Error::LinkCountMismatch {
                expected: 4,
                got: 3
            })
        ));
    }

    #[test]
    fn planar_pose_has_single_flat_depth_assignment() {
        let shape = quad(1.0, 1.0, 1.0, 1.0);
        let obs = project_orthographic(&unit_square_xy());
        let depths = reconstruct_depths(&shape, &obs).unwrap();
        assert_eq!(depths.len(), 1);
        assert!(depths[0].z_offsets.iter().all(|z| *z == 0.0));
    }

    #[test]
    fn tilted_square_depths_match_pose() {
        let shape = quad(1.0, 1.0, 1.0, 1.0);
        let pose = unit_square_xy().rotated(&extrinsic_xyz(FRAC_PI_6, 0.0, 0.0));
        let obs = project_orthographic(&pose);
        let want = pose.anchored_depths();
        assert!((want[2] - FRAC_PI_6.sin()).abs() < 1e-12);
        let depths = reconstruct_depths(&shape, &obs).unwrap();
        assert!(depths.iter().any(|d| d
            .z_offsets
            .iter()
            .zip(&want)
            .all(|(u, v)| (u - v).abs() < 1e-7)));
        for d in &depths {
            let r = d.reflected();
            assert!(depths.iter().any(|e| e
                .z_offsets
                .iter()
                .zip(&r.z_offsets)
                .all(|(u, v)| (u - v).abs() < 1e-12)));
        }
    }

    #[test]
    fn inconsistent_frame_is_reported() {
        let shape = quad(4.0, 9.0, 16.0, 4.0);
        // steps 2, 0, 0, 0: no pattern closes
        let obs = FrameObservation::new(1, vec![0.0, 9.0, 16.0, 4.0]).unwrap();
        assert!(matches!(
            reconstruct_depths(&shape, &obs),
            Err(Error::InconsistentFrame { .. })
        ));
    }

    #[test]
    fn triangle_synthesis() {
        let shape = LoopShape::from_lengths(&[3.0, 4.0, 5.0]).unwrap();
        let pose = synthesize_triangle(&shape, [0.4, 1.3, -0.7]).unwrap();
        for (got, want) in pose.link_sq_lengths().iter().zip(shape.sq_lengths()) {
            assert!((got - want).abs() <= 1e-12 * want);
        }
        let flat = LoopShape::from_lengths(&[1.0, 1.0, 2.0]).unwrap();
        assert!(synthesize_triangle(&flat, [0.0; 3]).is_err());
    }
}
