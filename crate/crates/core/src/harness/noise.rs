use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    /// Round to this many significant digits.
    RoundSig(u32),
    /// Additive zero-mean Gaussian with this standard deviation.
    Gaussian(f64),
}

/// What the noise is applied to before distances are squared.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseTarget {
    /// Projected link lengths.
    #[default]
    Distances,
    /// Projected point coordinates; distances are measured afterwards.
    Points,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub target: NoiseTarget,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::none()
    }
}

impl NoiseModel {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            target: NoiseTarget::Distances,
            seed: 0,
        }
    }

    pub fn round_sig(digits: u32) -> Self {
        Self {
            kind: NoiseKind::RoundSig(digits),
            ..Self::none()
        }
    }

    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Gaussian(sigma),
            target: NoiseTarget::Distances,
            seed,
        }
    }

    pub fn on(mut self, target: NoiseTarget) -> Self {
        self.target = target;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn is_none(&self) -> bool {
        matches!(self.kind, NoiseKind::None)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            NoiseKind::RoundSig(0) => Err(Error::InvalidNoise(
                "significant digits must be >= 1".into(),
            )),
            NoiseKind::Gaussian(s) if !(s.is_finite() && s >= 0.0) => Err(Error::InvalidNoise(
                format!("sigma must be finite and >= 0, got {s}"),
            )),
            _ => Ok(()),
        }
    }

    /// Perturb one measured value. Results are clamped at zero.
    pub fn apply<R: Rng + ?Sized>(&self, value: f64, rng: &mut R) -> f64 {
        match self.kind {
            NoiseKind::None => value,
            NoiseKind::RoundSig(digits) => round_sig(value, digits),
            NoiseKind::Gaussian(sigma) => {
                if sigma == 0.0 {
                    return value;
                }
                let normal = Normal::new(0.0, sigma).expect("sigma validated");
                value + normal.sample(rng)
            }
        }
    }

    /// Perturb a projected distance (never negative).
    pub fn apply_distance<R: Rng + ?Sized>(&self, value: f64, rng: &mut R) -> f64 {
        self.apply(value, rng).abs()
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseKind::None => write!(f, "none"),
            NoiseKind::RoundSig(k) => write!(f, "round:{k}"),
            NoiseKind::Gaussian(s) => write!(f, "gauss:{s}"),
        }
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    /// `none`, `round:K`, `roundK`, or `gauss:SIGMA`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let kind = if s == "none" {
            NoiseKind::None
        } else if let Some(k) = s.strip_prefix("round:").or_else(|| s.strip_prefix("round")) {
            let digits = k
                .parse()
                .map_err(|_| Error::InvalidNoise(format!("bad digit count in {s:?}")))?;
            NoiseKind::RoundSig(digits)
        } else if let Some(v) = s.strip_prefix("gauss:") {
            let sigma = v
                .parse()
                .map_err(|_| Error::InvalidNoise(format!("bad sigma in {s:?}")))?;
            NoiseKind::Gaussian(sigma)
        } else {
            return Err(Error::InvalidNoise(format!(
                "expected none, round:K or gauss:SIGMA, got {s:?}"
            )));
        };
        NoiseModel {
            kind,
            ..NoiseModel::none()
        }
        .validate()?;
        Ok(kind)
    }
}

impl FromStr for NoiseTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "distances" => Ok(NoiseTarget::Distances),
            "points" => Ok(NoiseTarget::Points),
            other => Err(Error::InvalidNoise(format!(
                "noise target must be distances or points, got {other:?}"
            ))),
        }
    }
}

/// Round to `digits` significant decimal digits (half away from zero on the
/// decimal representation).
pub fn round_sig(value: f64, digits: u32) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    let precision = digits.saturating_sub(1) as usize;
    format!("{value:.precision$e}")
        .parse()
        .expect("formatted float parses")
}
