//! Scenario configuration and its key-value file format.
//!
//! The file uses dotted keys, one setting per line:
//!
//! ```text
//! seed = 42
//! replications = 100
//! arrival.rates = [24, 34, 44, 56.5, 56.5, 44, 34, 24]
//! service.job1 = "triangular(0.1, 0.3, 0.5)"
//! patience = "infinite"
//! proactive.threshold = 3
//! ```
//!
//! Any key left out takes its default. Distributions are written as
//! `deterministic(v)`, `exponential(rate)`, `uniform(low, high)` or
//! `triangular(low, mode, high)`, with times in minutes.

use std::path::Path;

use thiserror::Error;
use toml::{Table, Value};

use crate::engine::{ArrivalProfile, DistributionSpec};
use crate::proactive::{CheckMode, ProactivePolicy, ServiceTimeTable, Thresholds};

/// Symmetric midday-peaked profile, 317 expected customers per day.
pub const DEFAULT_RATES: [f64; 8] = [24.0, 34.0, 44.0, 56.5, 56.5, 44.0, 34.0, 24.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Patience {
    Infinite,
    Finite(DistributionSpec),
}

/// Which customers the mean waiting time averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaitEstimator {
    ServedOnly,
    AllCustomers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub master_seed: u64,
    pub replications: usize,
    pub arrivals: ArrivalProfile,
    pub cubicles: u32,
    pub staff_count: u32,
    /// Normal service laws for job1, job2, job3.
    pub services: [DistributionSpec; 3],
    pub fitting: DistributionSpec,
    pub help_probability: f64,
    /// Fraction of the fitting time elapsed when a help request is made.
    pub help_fraction: DistributionSpec,
    pub patience: Patience,
    pub proactive: ProactivePolicy,
    pub wait_estimator: WaitEstimator,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            replications: 100,
            arrivals: ArrivalProfile::new(&DEFAULT_RATES, 1.0).expect("valid default profile"),
            cubicles: 8,
            staff_count: 1,
            services: [
                DistributionSpec::Triangular {
                    low: 0.1,
                    mode: 0.3,
                    high: 0.5,
                },
                DistributionSpec::Triangular {
                    low: 1.0,
                    mode: 1.5,
                    high: 2.0,
                },
                DistributionSpec::Triangular {
                    low: 0.1,
                    mode: 0.2,
                    high: 0.3,
                },
            ],
            fitting: DistributionSpec::Triangular {
                low: 4.0,
                mode: 8.0,
                high: 12.0,
            },
            help_probability: 0.2,
            help_fraction: DistributionSpec::Uniform {
                low: 0.3,
                high: 0.7,
            },
            patience: Patience::Finite(DistributionSpec::exponential_with_mean(40.0)),
            proactive: ProactivePolicy::default(),
            wait_estimator: WaitEstimator::ServedOnly,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config syntax error: {0}")]
    Parse(String),
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
}

fn invalid(field: &str, reason: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.to_string(),
    }
}

impl ScenarioConfig {
    pub fn service_table(&self) -> ServiceTimeTable {
        ServiceTimeTable::new(self.services, self.proactive.speedup)
    }

    pub fn with_arrival_scale(&self, scale: f64) -> Result<Self, ConfigError> {
        let arrivals = self
            .arrivals
            .with_scale(scale)
            .map_err(|e| invalid("arrival.scale", e))?;
        Ok(Self {
            arrivals,
            ..self.clone()
        })
    }

    pub fn with_proactive(&self, enabled: bool) -> Self {
        let mut c = self.clone();
        c.proactive.enabled = enabled;
        c
    }

    /// Checks every invariant, naming the offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.replications < 1 {
            return Err(invalid("replications", "must be >= 1"));
        }
        if self.cubicles < 1 {
            return Err(invalid("cubicles", "must be >= 1"));
        }
        if self.staff_count != 1 {
            return Err(invalid("staff", "only a single staff member is supported"));
        }
        for (name, spec) in ["service.job1", "service.job2", "service.job3"]
            .iter()
            .zip(&self.services)
        {
            spec.validate_duration().map_err(|e| invalid(name, e))?;
        }
        self.fitting
            .validate_duration()
            .map_err(|e| invalid("service.fitting", e))?;
        if !(0.0..=1.0).contains(&self.help_probability) {
            return Err(invalid("help.probability", "must lie in [0, 1]"));
        }
        validate_fraction(&self.help_fraction).map_err(|e| invalid("help.fraction", e))?;
        if let Patience::Finite(spec) = &self.patience {
            spec.validate_duration()
                .map_err(|e| invalid("patience", e))?;
        }
        let p = &self.proactive;
        for (name, t) in [
            ("proactive.threshold_entry", p.thresholds.entry),
            ("proactive.threshold_help", p.thresholds.help),
            ("proactive.threshold_return", p.thresholds.ret),
        ] {
            if t < 1 {
                return Err(invalid(name, "must be >= 1"));
            }
        }
        if !(0.0..1.0).contains(&p.speedup) {
            return Err(invalid("proactive.speedup", "must lie in [0, 1)"));
        }
        p.revert_delay
            .validate_duration()
            .map_err(|e| invalid("proactive.revert_delay", e))?;
        if let CheckMode::Polling(spec) = &p.check {
            spec.validate_duration()
                .map_err(|e| invalid("proactive.poll_interval", e))?;
            if spec.mean() <= 0.0 {
                return Err(invalid("proactive.poll_interval", "mean must be > 0"));
            }
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        let mut keys = Keys::flatten(table);
        let mut c = Self::default();

        if let Some(v) = keys.take("seed") {
            c.master_seed = as_uint("seed", &v)?;
        }
        if let Some(v) = keys.take("replications") {
            c.replications = as_uint("replications", &v)? as usize;
        }
        if let Some(v) = keys.take("cubicles") {
            c.cubicles = as_u32("cubicles", &v)?;
        }
        if let Some(v) = keys.take("staff") {
            c.staff_count = as_u32("staff", &v)?;
        }
        let rates = match keys.take("arrival.rates") {
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| as_float("arrival.rates", v))
                .collect::<Result<Vec<_>, _>>()?,
            Some(_) => return Err(invalid("arrival.rates", "expected an array of numbers")),
            None => c.arrivals.rates().to_vec(),
        };
        let scale = match keys.take("arrival.scale") {
            Some(v) => as_float("arrival.scale", &v)?,
            None => c.arrivals.scale(),
        };
        c.arrivals = ArrivalProfile::new(&rates, scale).map_err(|e| {
            let field = match e {
                crate::engine::ProfileError::BadScale(_) => "arrival.scale",
                _ => "arrival.rates",
            };
            invalid(field, e)
        })?;
        for (i, name) in ["service.job1", "service.job2", "service.job3"]
            .iter()
            .enumerate()
        {
            if let Some(v) = keys.take(name) {
                c.services[i] = as_dist(name, &v)?;
            }
        }
        if let Some(v) = keys.take("service.fitting") {
            c.fitting = as_dist("service.fitting", &v)?;
        }
        if let Some(v) = keys.take("help.probability") {
            c.help_probability = as_float("help.probability", &v)?;
        }
        if let Some(v) = keys.take("help.fraction") {
            c.help_fraction = as_dist("help.fraction", &v)?;
        }
        if let Some(v) = keys.take("patience") {
            c.patience = match &v {
                Value::String(s) if s.trim().eq_ignore_ascii_case("infinite") => Patience::Infinite,
                _ => Patience::Finite(as_dist("patience", &v)?),
            };
        }
        if let Some(v) = keys.take("proactive.enabled") {
            c.proactive.enabled = v
                .as_bool()
                .ok_or_else(|| invalid("proactive.enabled", "expected true or false"))?;
        }
        if let Some(v) = keys.take("proactive.threshold") {
            c.proactive.thresholds =
                Thresholds::uniform(as_uint("proactive.threshold", &v)? as usize);
        }
        if let Some(v) = keys.take("proactive.threshold_entry") {
            c.proactive.thresholds.entry = as_uint("proactive.threshold_entry", &v)? as usize;
        }
        if let Some(v) = keys.take("proactive.threshold_help") {
            c.proactive.thresholds.help = as_uint("proactive.threshold_help", &v)? as usize;
        }
        if let Some(v) = keys.take("proactive.threshold_return") {
            c.proactive.thresholds.ret = as_uint("proactive.threshold_return", &v)? as usize;
        }
        if let Some(v) = keys.take("proactive.speedup") {
            c.proactive.speedup = as_float("proactive.speedup", &v)?;
        }
        if let Some(v) = keys.take("proactive.revert_delay") {
            c.proactive.revert_delay = as_dist("proactive.revert_delay", &v)?;
        }
        let poll_interval = match keys.take("proactive.poll_interval") {
            Some(v) => Some(as_dist("proactive.poll_interval", &v)?),
            None => None,
        };
        match keys.take("proactive.check") {
            None => {
                if let Some(spec) = poll_interval {
                    c.proactive.check = CheckMode::Polling(spec);
                }
            }
            Some(Value::String(s)) if s == "event" => {
                if poll_interval.is_some() {
                    return Err(invalid(
                        "proactive.poll_interval",
                        "only meaningful with proactive.check = \"poll\"",
                    ));
                }
                c.proactive.check = CheckMode::EventDriven;
            }
            Some(Value::String(s)) if s == "poll" => {
                c.proactive.check = CheckMode::Polling(
                    poll_interval.unwrap_or(DistributionSpec::exponential_with_mean(1.0)),
                );
            }
            Some(_) => return Err(invalid("proactive.check", "expected \"event\" or \"poll\"")),
        }
        if let Some(v) = keys.take("metrics.wait_estimator") {
            c.wait_estimator = match v.as_str() {
                Some("served") => WaitEstimator::ServedOnly,
                Some("all") => WaitEstimator::AllCustomers,
                _ => {
                    return Err(invalid(
                        "metrics.wait_estimator",
                        "expected \"served\" or \"all\"",
                    ))
                }
            };
        }
        keys.finish()?;
        c.validate()?;
        Ok(c)
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ScenarioConfig::from_text(&text)
}

fn validate_fraction(spec: &DistributionSpec) -> Result<(), String> {
    spec.validate().map_err(|e| e.to_string())?;
    let (lo, hi) = match *spec {
        DistributionSpec::Deterministic(v) => (v, v),
        DistributionSpec::Uniform { low, high }
        | DistributionSpec::Triangular { low, high, .. } => (low, high),
        DistributionSpec::Exponential { .. } => return Err("must be bounded within [0, 1]".into()),
    };
    if lo < 0.0 || hi > 1.0 {
        return Err("support must lie within [0, 1]".into());
    }
    Ok(())
}

/// Flattened `dotted.key -> value` view of the parsed file.
struct Keys(Vec<(String, Value)>);

impl Keys {
    fn flatten(table: Table) -> Self {
        fn walk(prefix: &str, table: Table, out: &mut Vec<(String, Value)>) {
            for (k, v) in table {
                let key = if prefix.is_empty() {
                    k
                } else {
                    format!("{prefix}.{k}")
                };
                match v {
                    Value::Table(t) => walk(&key, t, out),
                    other => out.push((key, other)),
                }
            }
        }
        let mut out = Vec::new();
        walk("", table, &mut out);
        Self(out)
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        let pos = self.0.iter().position(|(k, _)| k == key)?;
        Some(self.0.remove(pos).1)
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.0.into_iter().next() {
            Some((k, _)) => Err(ConfigError::UnknownKey(k)),
            None => Ok(()),
        }
    }
}

fn as_uint(field: &str, v: &Value) -> Result<u64, ConfigError> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        Value::Integer(_) => Err(invalid(field, "must be >= 0")),
        _ => Err(invalid(field, "expected an integer")),
    }
}

fn as_u32(field: &str, v: &Value) -> Result<u32, ConfigError> {
    u32::try_from(as_uint(field, v)?).map_err(|_| invalid(field, "out of range"))
}

fn as_float(field: &str, v: &Value) -> Result<f64, ConfigError> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(invalid(field, "expected a number")),
    }
}

fn as_dist(field: &str, v: &Value) -> Result<DistributionSpec, ConfigError> {
    match v {
        Value::String(s) => s.parse().map_err(|e| invalid(field, e)),
        Value::Float(_) | Value::Integer(_) => {
            Ok(DistributionSpec::Deterministic(as_float(field, v)?))
        }
        _ => Err(invalid(field, "expected a distribution string")),
    }
}
