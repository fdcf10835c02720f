use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::RandomStream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("parameters must be finite")]
    NonFinite,
    #[error("exponential rate must be > 0 (got {0})")]
    NonPositiveRate(f64),
    #[error("uniform requires low <= high (got {low}, {high})")]
    UniformOrder { low: f64, high: f64 },
    #[error("triangular requires low <= mode <= high (got {low}, {mode}, {high})")]
    TriangularOrder { low: f64, mode: f64, high: f64 },
    #[error("values must be non-negative")]
    Negative,
    #[error("cannot parse distribution `{0}`; expected deterministic(v), exponential(rate), uniform(low, high) or triangular(low, mode, high)")]
    Syntax(String),
}

/// A continuous distribution sampled by inverse transform, so every sample
/// consumes exactly one uniform draw from its stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Deterministic(f64),
    /// Rate per minute; mean is `1 / rate`.
    Exponential {
        rate: f64,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    Triangular {
        low: f64,
        mode: f64,
        high: f64,
    },
}

impl DistributionSpec {
    pub fn exponential_with_mean(mean: f64) -> Self {
        Self::Exponential { rate: 1.0 / mean }
    }

    pub fn validate(&self) -> Result<(), DistributionError> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            Self::Deterministic(v) if !finite(&[v]) => Err(DistributionError::NonFinite),
            Self::Deterministic(_) => Ok(()),
            Self::Exponential { rate } if !finite(&[rate]) => Err(DistributionError::NonFinite),
            Self::Exponential { rate } if rate <= 0.0 => {
                Err(DistributionError::NonPositiveRate(rate))
            }
            Self::Exponential { .. } => Ok(()),
            Self::Uniform { low, high } if !finite(&[low, high]) => {
                Err(DistributionError::NonFinite)
            }
            Self::Uniform { low, high } if low > high => {
                Err(DistributionError::UniformOrder { low, high })
            }
            Self::Uniform { .. } => Ok(()),
            Self::Triangular { low, mode, high } if !finite(&[low, mode, high]) => {
                Err(DistributionError::NonFinite)
            }
            Self::Triangular { low, mode, high } if !(low <= mode && mode <= high) => {
                Err(DistributionError::TriangularOrder { low, mode, high })
            }
            Self::Triangular { .. } => Ok(()),
        }
    }

    /// Validation for durations and delays: valid and never negative.
    pub fn validate_duration(&self) -> Result<(), DistributionError> {
        self.validate()?;
        let lowest = match *self {
            Self::Deterministic(v) => v,
            Self::Exponential { .. } => 0.0,
            Self::Uniform { low, .. } | Self::Triangular { low, .. } => low,
        };
        if lowest < 0.0 {
            return Err(DistributionError::Negative);
        }
        Ok(())
    }

    /// Inverse CDF at `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Self::Deterministic(v) => v,
            Self::Exponential { rate } => -(1.0 - u).ln() / rate,
            Self::Uniform { low, high } => low + u * (high - low),
            Self::Triangular { low, mode, high } => {
                let width = high - low;
                if width <= 0.0 {
                    return low;
                }
                let split = (mode - low) / width;
                if u < split {
                    low + (u * width * (mode - low)).sqrt()
                } else {
                    high - ((1.0 - u) * width * (high - mode)).sqrt()
                }
            }
        }
    }

    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        self.quantile(stream.uniform())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Deterministic(v) => v,
            Self::Exponential { rate } => 1.0 / rate,
            Self::Uniform { low, high } => 0.5 * (low + high),
            Self::Triangular { low, mode, high } => (low + mode + high) / 3.0,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Self::Deterministic(_))
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Deterministic(v) => write!(f, "deterministic({v})"),
            Self::Exponential { rate } => write!(f, "exponential({rate})"),
            Self::Uniform { low, high } => write!(f, "uniform({low}, {high})"),
            Self::Triangular { low, mode, high } => write!(f, "triangular({low}, {mode}, {high})"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = DistributionError;

    /// Parses `name(a, b, ...)`. A bare number is read as deterministic.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || DistributionError::Syntax(s.to_string());
        let text = s.trim();
        if let Ok(v) = text.parse::<f64>() {
            let spec = Self::Deterministic(v);
            spec.validate()?;
            return Ok(spec);
        }
        let open = text.find('(').ok_or_else(syntax)?;
        let inner = text[open + 1..].strip_suffix(')').ok_or_else(syntax)?;
        let name = text[..open].trim().to_ascii_lowercase();
        let args = inner
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| syntax())?;
        let spec = match (name.as_str(), args.as_slice()) {
            ("deterministic" | "constant", [v]) => Self::Deterministic(*v),
            ("exponential" | "exp", [rate]) => Self::Exponential { rate: *rate },
            ("uniform", [low, high]) => Self::Uniform {
                low: *low,
                high: *high,
            },
            ("triangular", [low, mode, high]) => Self::Triangular {
                low: *low,
                mode: *mode,
                high: *high,
            },
            _ => return Err(syntax()),
        };
        spec.validate()?;
        Ok(spec)
    }
}
