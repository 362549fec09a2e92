//! Example reproduction and noise-sensitivity sweeps.

use rayon::prelude::*;
use serde::Serialize;

use super::fixtures::{
    published_frames, true_shape, PUBLISHED_COEFFICIENTS, PUBLISHED_DISTANCES, PUBLISHED_SOLUTION,
    TRUE_LENGTHS,
};
use super::noise::{round_sig, NoiseModel};
use super::simulate::{simulate_motion, Motion};
use crate::error::Result;
use crate::geometry::{FrameObservation, LoopShape};
use crate::linearizer::coefficient_row;
use crate::solver::{assemble, solve, validate_against_frames, RecoveryResult, SolveOptions};

/// Relative tolerance for the published coefficient table.
pub const COEFFICIENT_REL_TOL: f64 = 5e-5;
/// Relative agreement with the published `x1..x4` (3 significant digits).
pub const SOLUTION_REL_TOL: f64 = 5e-3;
/// Relative agreement of recovered link lengths with `(2, 3, 4, 1)`.
pub const LENGTH_REL_TOL: f64 = 3e-3;
/// Closure threshold for the 6-digit published frames.
pub const PUBLISHED_CLOSURE_TOL: f64 = 1e-3;
/// Relative length error tolerated with 3-digit measurements.
pub const NOISY_LENGTH_REL_TOL: f64 = 0.10;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReproductionOptions {
    /// Digits to round measurements to; `None` uses the published data as is.
    pub round_digits: Option<u32>,
    pub square_solve: bool,
    pub seed: u64,
    /// Trials of the regenerated noisy experiment.
    pub trials: usize,
}

impl Default for ReproductionOptions {
    fn default() -> Self {
        Self {
            round_digits: None,
            square_solve: false,
            seed: 1,
            trials: 50,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproductionReport {
    pub checks: Vec<Check>,
    pub result: RecoveryResult,
}

impl ReproductionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Largest relative deviation of recomputed coefficients from the table,
/// and the number of entries above `tol`.
pub fn coefficient_table_deviation(tol: f64) -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut over = 0;
    for (d, published) in PUBLISHED_DISTANCES
        .iter()
        .zip(PUBLISHED_COEFFICIENTS.iter())
    {
        let row = coefficient_row(d.map(|v| v * v));
        for (ours, theirs) in row.0.iter().zip(published) {
            let rel = (ours - theirs).abs() / theirs.abs();
            worst = worst.max(rel);
            if rel > tol {
                over += 1;
            }
        }
    }
    (worst, over)
}

fn half_unit(value: f64, digits: i32) -> f64 {
    if value == 0.0 {
        return 0.0;
    }
    0.5 * 10f64.powi(value.abs().log10().floor() as i32 - digits + 1)
}

/// Largest ratio of `|recomputed - published|` to the spread explained by
/// 6-digit rounding: the coefficient range over all corners of each frame's
/// input rounding box plus half a unit in the 6th digit of the published entry.
pub fn coefficient_rounding_ratio() -> f64 {
    let mut worst: f64 = 0.0;
    for (d, published) in PUBLISHED_DISTANCES
        .iter()
        .zip(PUBLISHED_COEFFICIENTS.iter())
    {
        let centre = coefficient_row(d.map(|v| v * v));
        let mut lo = centre.0;
        let mut hi = centre.0;
        for corner in 0..16 {
            let mut q = [0.0; 4];
            for k in 0..4 {
                let h = half_unit(d[k], 6);
                let v = if corner & (1 << k) == 0 {
                    d[k] - h
                } else {
                    d[k] + h
                };
                q[k] = v * v;
            }
            let row = coefficient_row(q);
            for j in 0..20 {
                lo[j] = lo[j].min(row.0[j]);
                hi[j] = hi[j].max(row.0[j]);
            }
        }
        for j in 0..20 {
            let spread = (hi[j] - lo[j]) + half_unit(published[j], 6) + 1e-12;
            worst = worst.max((centre.0[j] - published[j]).abs() / spread);
        }
    }
    worst
}

fn max_rel(got: &[f64], want: &[f64]) -> f64 {
    got.iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs() / w.abs())
        .fold(0.0, f64::max)
}

fn solve_options(square_solve: bool) -> SolveOptions {
    SolveOptions {
        square_solve,
        ..SolveOptions::default()
    }
}

/// Rebuild the published example and check every reproducible value.
pub fn run_reproduction(opts: &ReproductionOptions) -> Result<ReproductionReport> {
    match opts.round_digits {
        None => run_exact_reproduction(opts),
        Some(digits) => run_noisy_reproduction(opts, digits),
    }
}

fn run_exact_reproduction(opts: &ReproductionOptions) -> Result<ReproductionReport> {
    let mut checks = Vec::new();
    let (worst, over) = coefficient_table_deviation(COEFFICIENT_REL_TOL);
    checks.push(Check::new(
        "coefficient table within 5e-5 relative",
        over == 0,
        format!("max relative deviation {worst:.3e}; {over} of 380 entries above tolerance"),
    ));
    let ratio = coefficient_rounding_ratio();
    checks.push(Check::new(
        "coefficient table within 6-digit input rounding",
        ratio <= 1.0,
        format!("max deviation / rounding spread = {ratio:.3}"),
    ));

    let frames = published_frames();
    let shape = true_shape()?;
    let closure = validate_against_frames(&shape, &frames, PUBLISHED_CLOSURE_TOL);
    checks.push(Check::new(
        "published frames close with the true shape",
        closure.consistent,
        format!("max residual {:.3e}", closure.max_residual()),
    ));

    let result = solve(&assemble(&frames)?, &solve_options(opts.square_solve))?;
    let x_err = max_rel(&result.sq_lengths, &PUBLISHED_SOLUTION[..4]);
    checks.push(Check::new(
        "x1..x4 match the published solution to 3 digits",
        x_err <= SOLUTION_REL_TOL,
        format!(
            "x1..x4 = {:?}; max relative difference {x_err:.3e}",
            result.sq_lengths
        ),
    ));
    let len_err = result
        .lengths
        .map_or(f64::INFINITY, |l| max_rel(&l, &TRUE_LENGTHS));
    checks.push(Check::new(
        "lengths within 0.3% of (2, 3, 4, 1)",
        len_err <= LENGTH_REL_TOL,
        format!(
            "lengths {:?}; max relative error {len_err:.3e}",
            result.lengths
        ),
    ));
    Ok(ReproductionReport { checks, result })
}

fn run_noisy_reproduction(opts: &ReproductionOptions, digits: u32) -> Result<ReproductionReport> {
    let mut checks = Vec::new();
    // Same poses as the published run, measurements rounded.
    let frames = PUBLISHED_DISTANCES
        .iter()
        .enumerate()
        .map(|(i, d)| FrameObservation::from_distances(i + 1, &d.map(|v| round_sig(v, digits))))
        .collect::<Result<Vec<_>>>()?;
    let result = solve(&assemble(&frames)?, &solve_options(opts.square_solve))?;
    let err = result
        .lengths
        .map_or(f64::INFINITY, |l| max_rel(&l, &TRUE_LENGTHS));
    checks.push(Check::new(
        "rounded published frames: lengths within 10%",
        err <= NOISY_LENGTH_REL_TOL,
        format!(
            "x1..x4 = {:?}; max relative length error {err:.3e}",
            result.sq_lengths
        ),
    ));

    // Fresh simulations with the same protocol.
    let config = SensitivityConfig {
        shape: true_shape()?,
        trials: opts.trials.max(1),
        frame_counts: vec![19],
        noises: vec![NoiseModel::round_sig(digits)],
        motion: Motion::Free,
        seed: opts.seed,
        options: solve_options(false),
    };
    let report = run_sensitivity(&config);
    let cell = &report.cells[0];
    checks.push(Check::new(
        "regenerated 19-frame runs: median length error within 10%",
        cell.median_max_rel_error <= NOISY_LENGTH_REL_TOL,
        format!(
            "{} trials; median {:.3e}, 90th percentile {:.3e}",
            cell.trials.len(),
            cell.median_max_rel_error,
            cell.p90_max_rel_error
        ),
    ));
    Ok(ReproductionReport { checks, result })
}

#[derive(Clone, Debug)]
pub struct SensitivityConfig {
    pub shape: LoopShape,
    pub trials: usize,
    pub frame_counts: Vec<usize>,
    pub noises: Vec<NoiseModel>,
    pub motion: Motion,
    pub seed: u64,
    pub options: SolveOptions,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub lengths: Option<[f64; 4]>,
    /// `|recovered - true| / true` per link.
    pub rel_errors: Option<[f64; 4]>,
    /// Largest per-link relative error; infinite for failed trials.
    pub max_rel_error: f64,
    pub condition_number: Option<f64>,
    pub rank: Option<usize>,
    pub rank_deficient: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub frame_count: usize,
    pub noise: String,
    pub median_max_rel_error: f64,
    pub p90_max_rel_error: f64,
    pub rank_deficient_fraction: f64,
    pub failures: usize,
    pub trials: Vec<TrialOutcome>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub true_lengths: Vec<f64>,
    pub motion: Motion,
    pub cells: Vec<CellReport>,
}

fn run_trial(
    config: &SensitivityConfig,
    frames: usize,
    noise: &NoiseModel,
    trial: usize,
) -> TrialOutcome {
    let seed = config.seed ^ trial as u64;
    let noise = noise.with_seed(noise.seed ^ trial as u64);
    let truth = config.shape.lengths();
    let failed = |e: String| TrialOutcome {
        trial,
        seed,
        lengths: None,
        rel_errors: None,
        max_rel_error: f64::INFINITY,
        condition_number: None,
        rank: None,
        rank_deficient: false,
        error: Some(e),
    };
    let outcome = simulate_motion(&config.shape, frames, &noise, seed, config.motion)
        .and_then(|sim| assemble(&sim.frames))
        .and_then(|sys| solve(&sys, &config.options));
    let result = match outcome {
        Ok(r) => r,
        Err(e) => return failed(e.to_string()),
    };
    let rel_errors = result.lengths.map(|l| {
        let mut e = [0.0; 4];
        for k in 0..4 {
            e[k] = (l[k] - truth[k]).abs() / truth[k];
        }
        e
    });
    TrialOutcome {
        trial,
        seed,
        lengths: result.lengths,
        rel_errors,
        max_rel_error: rel_errors.map_or(f64::INFINITY, |e| e.iter().copied().fold(0.0, f64::max)),
        condition_number: Some(result.condition_number),
        rank: Some(result.rank),
        rank_deficient: result.rank_deficient,
        error: result
            .non_physical
            .then(|| "non-physical solution".to_string()),
    }
}

/// Linear-interpolated quantile of a sample, `q` in `[0, 1]`.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    if i + 1 >= v.len() || frac == 0.0 {
        v[i]
    } else {
        v[i] + frac * (v[i + 1] - v[i])
    }
}

/// Simulate and solve every `(frame_count, noise)` cell over seeded trials.
pub fn run_sensitivity(config: &SensitivityConfig) -> ExperimentReport {
    let mut cells = Vec::new();
    for &frames in &config.frame_counts {
        for noise in &config.noises {
            let trials: Vec<TrialOutcome> = (0..config.trials)
                .into_par_iter()
                .map(|t| run_trial(config, frames, noise, t))
                .collect();
            let errs: Vec<f64> = trials.iter().map(|t| t.max_rel_error).collect();
            let deficient = trials.iter().filter(|t| t.rank_deficient).count();
            cells.push(CellReport {
                frame_count: frames,
                noise: noise.kind.to_string(),
                median_max_rel_error: quantile(&errs, 0.5),
                p90_max_rel_error: quantile(&errs, 0.9),
                rank_deficient_fraction: deficient as f64 / trials.len().max(1) as f64,
                failures: trials.iter().filter(|t| t.error.is_some()).count(),
                trials,
            });
        }
    }
    ExperimentReport {
        true_lengths: config.shape.lengths(),
        motion: config.motion,
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v = [3.0, 1.0, 2.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert!((quantile(&v, 0.9) - 3.7).abs() < 1e-12);
        assert_eq!(quantile(&[f64::INFINITY, 1.0, 2.0], 0.5), 2.0);
    }

    #[test]
    fn static_motion_is_always_rank_deficient() {
        let config = SensitivityConfig {
            shape: true_shape().unwrap(),
            trials: 4,
            frame_counts: vec![19],
            noises: vec![NoiseModel::none()],
            motion: Motion::Static,
            seed: 5,
            options: SolveOptions::default(),
        };
        let report = run_sensitivity(&config);
        assert_eq!(report.cells[0].rank_deficient_fraction, 1.0);
    }
}
