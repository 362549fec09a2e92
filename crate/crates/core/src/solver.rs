//! Assembly and least-squares solution of the lifted linear system.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{loop_residual, FrameObservation, LoopShape};
use crate::linearizer::{
    coefficient3_row, coefficient_row, Lifted3Vector, LiftedVector, LIFTED_LEN,
};
use crate::sum::csum;

/// Highest attainable rank of the four-link lifted system.
///
/// The factors of `x5..x14` always sum to zero, so `e5 + ... + e14` lies in
/// the null space of every coefficient matrix.
pub const FULL_RANK: usize = LIFTED_LEN - 1;

/// Rank of a well-posed three-link system (unknowns `a, b, c, s`).
pub const FULL_RANK_3: usize = 4;

/// Frames per equation row; one row per frame.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    /// `m x 19` matrix of `f1..f19`.
    pub matrix: DMatrix<f64>,
    /// `-f0` per row.
    pub rhs: DVector<f64>,
    pub frame_indices: Vec<usize>,
    pub frames: Vec<FrameObservation>,
}

impl LinearSystem {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Build one lifted equation per frame, ordered by frame index.
pub fn assemble(frames: &[FrameObservation]) -> Result<LinearSystem> {
    if frames.is_empty() {
        return Err(Error::EmptySystem);
    }
    let mut sorted: Vec<FrameObservation> = frames.to_vec();
    sorted.sort_by_key(|f| f.frame_index);
    let quads = sorted
        .iter()
        .map(FrameObservation::as_quad)
        .collect::<Result<Vec<_>>>()?;
    let m = sorted.len();
    let mut matrix = DMatrix::zeros(m, LIFTED_LEN);
    let mut rhs = DVector::zeros(m);
    for (i, q) in quads.into_iter().enumerate() {
        let row = coefficient_row(q);
        for (j, v) in row.factors().iter().enumerate() {
            matrix[(i, j)] = *v;
        }
        rhs[i] = -row.constant();
    }
    Ok(LinearSystem {
        matrix,
        rhs,
        frame_indices: sorted.iter().map(|f| f.frame_index).collect(),
        frames: sorted,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Singular values below `svd_rcond * sigma_max` are discarded.
    pub svd_rcond: f64,
    /// Solve the square 19 x 19 system by LU instead of SVD least squares.
    pub square_solve: bool,
    pub min_frames: usize,
    pub allow_underdetermined: bool,
    /// Closure threshold for the per-frame validation; `None` uses
    /// `1e-6 * sum of recovered link lengths`.
    pub closure_threshold: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            svd_rcond: 1e-10,
            square_solve: false,
            min_frames: LIFTED_LEN,
            allow_underdetermined: false,
            closure_threshold: None,
        }
    }
}

/// Solution of the four-link system and its diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct RecoveryResult {
    pub x: [f64; LIFTED_LEN],
    /// `(x1, x2, x3, x4)`.
    pub sq_lengths: [f64; 4],
    /// Square roots of `x1..x4`; `None` when any of them is not positive.
    pub lengths: Option<[f64; 4]>,
    pub non_physical: bool,
    /// `sigma_max / sigma_min` over the retained singular values.
    pub condition_number: f64,
    pub residual_norm: f64,
    pub rank: usize,
    pub rank_deficient: bool,
    pub singular_values: Vec<f64>,
    /// `|x5 - x1^2|, ..., |x14 - x3 x4|, |x15 - P15(x1..x4)|, ..., |x19 - P19(x1..x4)|`.
    pub consistency: [f64; 15],
    /// Loop residual of the recovered shape on every frame, `None` where a
    /// radicand is negative. Empty when the result is non-physical.
    pub per_frame_closure: Vec<Option<f64>>,
    pub frame_indices: Vec<usize>,
}

struct LstsqSolution {
    x: DVector<f64>,
    singular_values: Vec<f64>,
    rank: usize,
}

/// Minimum-norm least squares via SVD with relative truncation.
fn svd_lstsq(matrix: &DMatrix<f64>, rhs: &DVector<f64>, rcond: f64) -> LstsqSolution {
    let svd = matrix.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let cutoff = rcond * sigma.first().copied().unwrap_or(0.0);
    let mut x = DVector::zeros(matrix.ncols());
    let mut rank = 0;
    for (&i, &s) in order.iter().zip(&sigma) {
        if s <= cutoff || s == 0.0 {
            break;
        }
        rank += 1;
        let coeff = u.column(i).dot(rhs) / s;
        x += v_t.row(i).transpose() * coeff;
    }
    LstsqSolution {
        x,
        singular_values: sigma,
        rank,
    }
}

fn condition(singular_values: &[f64], rank: usize) -> f64 {
    if rank == 0 {
        f64::INFINITY
    } else {
        singular_values[0] / singular_values[rank - 1]
    }
}

fn check_frames(m: usize, options: &SolveOptions, needed: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::EmptySystem);
    }
    let needed = options.min_frames.max(needed);
    if m < needed && !options.allow_underdetermined {
        return Err(Error::TooFewFrames { needed, got: m });
    }
    Ok(())
}

/// Solve the lifted system and fill in every diagnostic.
pub fn solve(system: &LinearSystem, options: &SolveOptions) -> Result<RecoveryResult> {
    let m = system.rows();
    check_frames(m, options, 0)?;

    let lstsq = svd_lstsq(&system.matrix, &system.rhs, options.svd_rcond);
    let x = if options.square_solve {
        if m != LIFTED_LEN {
            return Err(Error::NotSquare {
                needed: LIFTED_LEN,
                got: m,
            });
        }
        system
            .matrix
            .clone()
            .lu()
            .solve(&system.rhs)
            .filter(|x| x.iter().all(|v| v.is_finite()))
            .ok_or(Error::SingularSystem)?
    } else {
        lstsq.x
    };

    let mut xs = [0.0; LIFTED_LEN];
    xs.copy_from_slice(x.as_slice());
    pin_null_direction(&mut xs);
    let residual_norm = (&system.matrix * DVector::from_column_slice(&xs) - &system.rhs).norm();
    let sq_lengths = [xs[0], xs[1], xs[2], xs[3]];
    let non_physical = sq_lengths.iter().any(|v| !(v.is_finite() && *v > 0.0));
    let lengths = (!non_physical).then(|| sq_lengths.map(f64::sqrt));

    let per_frame_closure = if non_physical {
        Vec::new()
    } else {
        let shape = LoopShape::new(sq_lengths.to_vec())?;
        system
            .frames
            .iter()
            .map(|f| loop_residual(&shape, f).ok())
            .collect()
    };

    Ok(RecoveryResult {
        x: xs,
        sq_lengths,
        lengths,
        non_physical,
        condition_number: condition(&lstsq.singular_values, lstsq.rank),
        residual_norm,
        rank: lstsq.rank,
        rank_deficient: lstsq.rank < FULL_RANK,
        singular_values: lstsq.singular_values,
        consistency: consistency(&xs),
        per_frame_closure,
        frame_indices: system.frame_indices.clone(),
    })
}

/// Move `x` along the structural null direction `e5 + ... + e14` so that
/// `x5..x14` best match the products of `x1..x4`. Every equation row is
/// unchanged by this shift.
pub fn pin_null_direction(x: &mut [f64; LIFTED_LEN]) {
    let implied = LiftedVector::evaluate([x[0], x[1], x[2], x[3]]);
    let shift = csum(&(4..14).map(|k| implied.0[k] - x[k]).collect::<Vec<_>>()) / 10.0;
    for v in &mut x[4..14] {
        *v += shift;
    }
}

/// Discrepancies between solved `x5..x19` and the polynomials of `x1..x4`.
pub fn consistency(x: &[f64; LIFTED_LEN]) -> [f64; 15] {
    let implied = LiftedVector::evaluate([x[0], x[1], x[2], x[3]]);
    let mut out = [0.0; 15];
    for (k, o) in out.iter_mut().enumerate() {
        *o = (x[k + 4] - implied.0[k + 4]).abs();
    }
    out
}

/// Shape with squared lengths `x1..x4`.
pub fn recover_shape(result: &RecoveryResult) -> Result<LoopShape> {
    if result.non_physical {
        return Err(Error::NonPhysical(result.sq_lengths.to_vec()));
    }
    LoopShape::new(result.sq_lengths.to_vec())
}

/// Per-frame loop-closure check of a shape.
#[derive(Debug)]
pub struct ClosureReport {
    pub frame_indices: Vec<usize>,
    pub residuals: Vec<Result<f64>>,
    pub threshold: f64,
    pub consistent: bool,
}

impl ClosureReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| r.as_ref().copied().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

/// Apply `loop_residual` to every frame; negative radicands count as failed
/// frames.
pub fn validate_against_frames(
    shape: &LoopShape,
    frames: &[FrameObservation],
    threshold: f64,
) -> ClosureReport {
    let residuals: Vec<Result<f64>> = frames.iter().map(|f| loop_residual(shape, f)).collect();
    let consistent = residuals
        .iter()
        .all(|r| matches!(r, Ok(v) if *v <= threshold));
    ClosureReport {
        frame_indices: frames.iter().map(|f| f.frame_index).collect(),
        residuals,
        threshold,
        consistent,
    }
}

/// Solution of the three-link system.
#[derive(Clone, Debug, Serialize)]
pub struct Recovery3Result {
    /// `(a, b, c, s)`.
    pub x: [f64; 4],
    pub sq_lengths: [f64; 3],
    pub lengths: Option<[f64; 3]>,
    pub non_physical: bool,
    pub condition_number: f64,
    pub residual_norm: f64,
    pub rank: usize,
    pub rank_deficient: bool,
    pub singular_values: Vec<f64>,
    /// `|s - (a^2 + b^2 + c^2 - 2ab - 2ac - 2bc)|`.
    pub s_consistency: f64,
}

/// Least squares over `(a, b, c, s)` for a three-link loop.
pub fn solve3(frames: &[FrameObservation], options: &SolveOptions) -> Result<Recovery3Result> {
    let m = frames.len();
    let opts = SolveOptions {
        min_frames: options.min_frames.min(FULL_RANK_3),
        ..*options
    };
    check_frames(m, &opts, FULL_RANK_3)?;
    let mut matrix = DMatrix::zeros(m, 4);
    let mut rhs = DVector::zeros(m);
    for (i, f) in frames.iter().enumerate() {
        let obs: [f64; 3] = f
            .sq_proj()
            .try_into()
            .map_err(|_| Error::LinkCountMismatch {
                expected: 3,
                got: f.len(),
            })?;
        let row = coefficient3_row(obs);
        for (j, v) in row.factors().iter().enumerate() {
            matrix[(i, j)] = *v;
        }
        rhs[i] = -row.constant();
    }
    let lstsq = svd_lstsq(&matrix, &rhs, options.svd_rcond);
    let residual_norm = (&matrix * &lstsq.x - &rhs).norm();
    let x = [lstsq.x[0], lstsq.x[1], lstsq.x[2], lstsq.x[3]];
    let sq_lengths = [x[0], x[1], x[2]];
    let non_physical = sq_lengths.iter().any(|v| !(v.is_finite() && *v > 0.0));
    let implied = Lifted3Vector::evaluate(sq_lengths);
    Ok(Recovery3Result {
        x,
        sq_lengths,
        lengths: (!non_physical).then(|| sq_lengths.map(f64::sqrt)),
        non_physical,
        condition_number: condition(&lstsq.singular_values, lstsq.rank),
        residual_norm,
        rank: lstsq.rank,
        rank_deficient: lstsq.rank < FULL_RANK_3,
        singular_values: lstsq.singular_values,
        s_consistency: (x[3] - implied.0[3]).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(i: usize, q: [f64; 4]) -> FrameObservation {
        FrameObservation::new(i, q.to_vec()).unwrap()
    }

    #[test]
    fn empty_system() {
        assert!(matches!(assemble(&[]), Err(Error::EmptySystem)));
    }

    #[test]
    fn rows_follow_frame_index() {
        let frames = vec![
            frame(3, [1.0, 2.0, 3.0, 0.5]),
            frame(1, [0.5, 1.0, 2.0, 0.25]),
        ];
        let sys = assemble(&frames).unwrap();
        assert_eq!(sys.frame_indices, vec![1, 3]);
        assert_eq!(sys.matrix[(0, 14)], 0.5);
        assert_eq!(sys.matrix[(1, 18)], 1.0);
        let f = coefficient_row([1.0, 2.0, 3.0, 0.5]);
        assert_eq!(sys.rhs[1], -f.constant());
    }

    #[test]
    fn duplicate_frames_give_duplicate_rows() {
        let q = [1.0, 2.0, 3.0, 0.5];
        let sys = assemble(&[frame(1, q), frame(2, q)]).unwrap();
        assert_eq!(sys.matrix.row(0), sys.matrix.row(1));
    }

    #[test]
    fn wrong_link_count_rejected() {
        let f = FrameObservation::new(1, vec![1.0; 3]).unwrap();
        assert!(matches!(
            assemble(&[f]),
            Err(Error::LinkCountMismatch {
                expected: 4,
                got: 3
            })
        ));
    }

    #[test]
    fn too_few_frames() {
        let sys = assemble(&[frame(1, [1.0, 2.0, 3.0, 0.5])]).unwrap();
        assert!(matches!(
            solve(&sys, &SolveOptions::default()),
            Err(Error::TooFewFrames { needed: 19, got: 1 })
        ));
        let opts = SolveOptions {
            allow_underdetermined: true,
            ..Default::default()
        };
        let r = solve(&sys, &opts).unwrap();
        assert_eq!(r.rank, 1);
        assert!(r.rank_deficient);
    }

    #[test]
    fn repeated_frame_is_rank_deficient() {
        let frames: Vec<_> = (1..=19).map(|i| frame(i, [3.8, 2.1, 9.8, 0.93])).collect();
        let r = solve(&assemble(&frames).unwrap(), &SolveOptions::default()).unwrap();
        assert_eq!(r.rank, 1);
        assert!(r.rank_deficient);
    }

    #[test]
    fn square_solve_requires_19_rows() {
        let frames: Vec<_> = (1..=20).map(|i| frame(i, [3.8, 2.1, 9.8, 0.93])).collect();
        let opts = SolveOptions {
            square_solve: true,
            ..Default::default()
        };
        assert!(matches!(
            solve(&assemble(&frames).unwrap(), &opts),
            Err(Error::NotSquare { .. })
        ));
    }

    fn fake_result(sq: [f64; 4]) -> RecoveryResult {
        let mut x = [0.0; LIFTED_LEN];
        x[..4].copy_from_slice(&sq);
        let non_physical = sq.iter().any(|v| *v <= 0.0);
        RecoveryResult {
            x,
            sq_lengths: sq,
            lengths: None,
            non_physical,
            condition_number: 1.0,
            residual_norm: 0.0,
            rank: FULL_RANK,
            rank_deficient: false,
            singular_values: vec![],
            consistency: [0.0; 15],
            per_frame_closure: vec![],
            frame_indices: vec![],
        }
    }

    #[test]
    fn recover_shape_from_result() {
        let s = recover_shape(&fake_result([4.0, 9.0, 16.0, 1.0])).unwrap();
        assert_eq!(s.lengths(), vec![2.0, 3.0, 4.0, 1.0]);
        assert!(matches!(
            recover_shape(&fake_result([4.0, 9.0, 16.0, -0.1])),
            Err(Error::NonPhysical(_))
        ));
    }

    #[test]
    fn pinning_restores_shifted_products() {
        let exact = LiftedVector::evaluate([4.0, 9.0, 16.0, 1.0]).0;
        let mut x = exact;
        for v in &mut x[4..14] {
            *v -= 7.0;
        }
        pin_null_direction(&mut x);
        for (u, v) in x.iter().zip(&exact) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn consistency_is_zero_for_exact_lift() {
        let x = LiftedVector::evaluate([4.0, 9.0, 16.0, 1.0]);
        assert!(consistency(&x.0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn solve3_needs_four_frames() {
        let frames: Vec<_> = (1..=3)
            .map(|i| FrameObservation::new(i, vec![1.0, 2.0, 3.0]).unwrap())
            .collect();
        assert!(matches!(
            solve3(&frames, &SolveOptions::default()),
            Err(Error::TooFewFrames { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn solve3_identical_frames_rank_deficient() {
        let frames: Vec<_> = (1..=4)
            .map(|i| FrameObservation::new(i, vec![5.0, 12.0, 20.0]).unwrap())
            .collect();
        let r = solve3(&frames, &SolveOptions::default()).unwrap();
        assert!(r.rank_deficient);
    }
}
