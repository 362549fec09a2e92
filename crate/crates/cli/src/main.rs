//! `jointloop` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use jointloop::harness::io::{read_frames_csv, write_frames_csv, write_result_json};
use jointloop::harness::{
    run_reproduction, run_sensitivity, simulate_motion, Motion, NoiseKind, NoiseModel, NoiseTarget,
    ReproductionOptions, SensitivityConfig,
};
use jointloop::{
    assemble, reconstruct_depths, solve, validate_against_frames, Error, LoopShape, SolveOptions,
};

#[derive(Parser)]
#[command(
    name = "jointloop",
    version,
    about = "Link lengths of closed linkages from orthographic frames"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate frames of a randomly moving loop.
    Simulate(SimulateArgs),
    /// Recover squared link lengths from a frames file.
    Solve(SolveArgs),
    /// Loop-closure residual of a shape on every frame.
    Residual(ResidualArgs),
    /// Relative depths of the points in one frame.
    Depths(DepthsArgs),
    /// Rebuild the published 19-frame example and check it.
    ReproducePaper(ReproduceArgs),
    /// Length error statistics over seeded trials.
    Sensitivity(SensitivityArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Link lengths (not squared), comma separated.
    #[arg(long, value_parser = parse_shape)]
    shape: LoopShape,
    #[arg(long)]
    frames: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// none, round:K or gauss:SIGMA.
    #[arg(long, default_value = "none", value_parser = parse_noise)]
    noise: NoiseKind,
    #[arg(long, default_value = "distances", value_parser = parse_target)]
    noise_on: NoiseTarget,
    /// free, static, translation or z-rotation.
    #[arg(long, default_value = "free", value_parser = parse_motion)]
    motion: Motion,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    rcond: f64,
    /// Solve exactly 19 equations by LU instead of SVD least squares.
    #[arg(long)]
    square_solve: bool,
    #[arg(long, default_value_t = 19)]
    min_frames: usize,
    /// Exit with status 2 when the system is rank deficient.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ResidualArgs {
    #[arg(long, value_parser = parse_shape)]
    shape: LoopShape,
    #[arg(long = "in")]
    input: PathBuf,
    /// Defaults to 1e-6 times the sum of link lengths.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct DepthsArgs {
    #[arg(long, value_parser = parse_shape)]
    shape: LoopShape,
    #[arg(long = "in")]
    input: PathBuf,
    /// Frame index as written in the file.
    #[arg(long)]
    frame: usize,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Round measurements, e.g. round3 or round:3.
    #[arg(long, value_parser = parse_noise)]
    noise: Option<NoiseKind>,
    #[arg(long)]
    square_solve: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Regenerated trials for the noisy check.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Exit with status 2 when any check fails.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SensitivityArgs {
    #[arg(long, value_parser = parse_shape)]
    shape: LoopShape,
    #[arg(long)]
    trials: usize,
    /// Frame counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    frames: Vec<usize>,
    /// Noise models, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "none", value_parser = parse_noise)]
    noise: Vec<NoiseKind>,
    #[arg(long, default_value = "distances", value_parser = parse_target)]
    noise_on: NoiseTarget,
    #[arg(long, default_value = "free", value_parser = parse_motion)]
    motion: Motion,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    rcond: f64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_shape(s: &str) -> Result<LoopShape, String> {
    let lengths = s
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad length {v:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    LoopShape::from_lengths(&lengths).map_err(|e| e.to_string())
}

fn parse_noise(s: &str) -> Result<NoiseKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_target(s: &str) -> Result<NoiseTarget, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_motion(s: &str) -> Result<Motion, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure carrying its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_numerical() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn numerical(message: String) -> Failure {
    Failure { code: 2, message }
}

type Outcome = Result<(), Failure>;

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn load_frames(path: &Path) -> Result<Vec<jointloop::FrameObservation>, Error> {
    read_frames_csv(BufReader::new(File::open(path)?))
}

fn write_json(value: &impl serde::Serialize, writer: impl Write) -> Result<(), Error> {
    let mut writer = writer;
    serde_json::to_writer_pretty(&mut writer, value)?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

fn run_simulate(a: SimulateArgs) -> Outcome {
    let noise = NoiseModel {
        kind: a.noise,
        target: a.noise_on,
        seed: a.seed,
    };
    let sim = simulate_motion(&a.shape, a.frames, &noise, a.seed, a.motion)?;
    let mut out = create(&a.out)?;
    write_frames_csv(&sim.frames, &mut out)?;
    out.flush().map_err(Error::from)?;
    Ok(())
}

fn run_solve(a: SolveArgs) -> Outcome {
    let frames = load_frames(&a.input)?;
    let options = SolveOptions {
        svd_rcond: a.rcond,
        square_solve: a.square_solve,
        min_frames: a.min_frames,
        ..SolveOptions::default()
    };
    let result = solve(&assemble(&frames)?, &options)?;
    let mut out = create(&a.out)?;
    write_result_json(&result, &mut out)?;
    out.flush().map_err(Error::from)?;
    if result.rank_deficient {
        let msg = format!("rank deficient system: rank {} of 18", result.rank);
        if a.strict {
            return Err(numerical(msg));
        }
        eprintln!("warning: {msg}");
    }
    if result.non_physical {
        return Err(numerical(format!(
            "non-physical solution, x1..x4 = {:?}",
            result.sq_lengths
        )));
    }
    Ok(())
}

fn run_residual(a: ResidualArgs) -> Outcome {
    let frames = load_frames(&a.input)?;
    let threshold = a.threshold.unwrap_or_else(|| a.shape.closure_threshold());
    let report = validate_against_frames(&a.shape, &frames, threshold);
    let rows: Vec<_> = report
        .frame_indices
        .iter()
        .zip(&report.residuals)
        .map(|(idx, r)| match r {
            Ok(v) => json!({ "frame": idx, "residual": v }),
            Err(e) => json!({ "frame": idx, "residual": null, "error": e.to_string() }),
        })
        .collect();
    let doc = json!({
        "threshold": threshold,
        "consistent": report.consistent,
        "max_residual": report.max_residual(),
        "frames": rows,
    });
    write_json(&doc, io::stdout().lock())?;
    if report.consistent {
        Ok(())
    } else {
        Err(numerical(format!(
            "shape does not close on every frame (max residual {:e})",
            report.max_residual()
        )))
    }
}

fn run_depths(a: DepthsArgs) -> Outcome {
    let frames = load_frames(&a.input)?;
    let frame = frames
        .iter()
        .find(|f| f.frame_index == a.frame)
        .ok_or_else(|| Error::Parse(format!("no frame {} in {}", a.frame, a.input.display())))?;
    let assignments = reconstruct_depths(&a.shape, frame)?;
    write_json(
        &json!({ "frame": a.frame, "assignments": assignments }),
        io::stdout().lock(),
    )?;
    Ok(())
}

fn run_reproduce(a: ReproduceArgs) -> Outcome {
    let round_digits = match a.noise {
        None | Some(NoiseKind::None) => None,
        Some(NoiseKind::RoundSig(k)) => Some(k),
        Some(other) => {
            return Err(Error::InvalidNoise(format!(
                "reproduction supports rounding noise only, got {other}"
            ))
            .into())
        }
    };
    let report = run_reproduction(&ReproductionOptions {
        round_digits,
        square_solve: a.square_solve,
        seed: a.seed,
        trials: a.trials,
    })?;
    let mut stdout = io::stdout().lock();
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        writeln!(stdout, "[{tag}] {}: {}", c.name, c.detail).map_err(Error::from)?;
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    if a.strict && failed > 0 {
        return Err(numerical(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn run_sensitivity_cmd(a: SensitivityArgs) -> Outcome {
    if a.trials == 0 {
        return Err(Error::Parse("--trials must be at least 1".into()).into());
    }
    let noises = a
        .noise
        .iter()
        .map(|&kind| NoiseModel {
            kind,
            target: a.noise_on,
            seed: a.seed,
        })
        .collect();
    let config = SensitivityConfig {
        shape: a.shape,
        trials: a.trials,
        frame_counts: a.frames,
        noises,
        motion: a.motion,
        seed: a.seed,
        options: SolveOptions {
            svd_rcond: a.rcond,
            ..SolveOptions::default()
        },
    };
    let report = run_sensitivity(&config);
    write_json(&report, create(&a.out)?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Simulate(a) => run_simulate(a),
        Command::Solve(a) => run_solve(a),
        Command::Residual(a) => run_residual(a),
        Command::Depths(a) => run_depths(a),
        Command::ReproducePaper(a) => run_reproduce(a),
        Command::Sensitivity(a) => run_sensitivity_cmd(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
