use rayon::prelude::*;
use thiserror::Error;

use super::report::{ExperimentReport, ReportRow};
use super::HarnessError;
use crate::abs::run_abs;
use crate::config::ScenarioConfig;
use crate::des::run_des;
use crate::metrics::{summarize, Measure, RunMetrics};
use crate::model::{ModelError, RunOptions, RunOutcome};
use crate::stats::{decide, mann_whitney_u, HypothesisOutcome, MannWhitneyResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Des,
    Abs,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::Des, ModelKind::Abs];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Des => "des",
            ModelKind::Abs => "abs",
        }
    }

    pub fn run(
        self,
        config: &ScenarioConfig,
        replication: u64,
        options: RunOptions,
    ) -> Result<RunOutcome, ModelError> {
        match self {
            ModelKind::Des => run_des(config, replication, options),
            ModelKind::Abs => run_abs(config, replication, options),
        }
    }

    /// Hypothesis labels for the wait and utilisation comparisons.
    fn hypotheses(self) -> (&'static str, &'static str) {
        match self {
            ModelKind::Des => ("H01", "H03"),
            ModelKind::Abs => ("H02", "H04"),
        }
    }
}

/// Runs every replication, in parallel, returned in replication order.
pub fn run_outcomes(
    config: &ScenarioConfig,
    model: ModelKind,
) -> Result<Vec<RunOutcome>, HarnessError> {
    config.validate()?;
    (0..config.replications as u64)
        .into_par_iter()
        .map(|rep| model.run(config, rep, RunOptions::default()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(HarnessError::from)
}

pub fn run_replications(
    config: &ScenarioConfig,
    model: ModelKind,
) -> Result<Vec<RunMetrics>, HarnessError> {
    Ok(run_outcomes(config, model)?
        .into_iter()
        .map(|o| o.metrics)
        .collect())
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepSpecError {
    #[error("sweep needs at least one level")]
    NoLevels,
    #[error("growth factor must be positive and finite, got {0}")]
    BadFactor(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub levels: usize,
    pub factor: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            levels: 5,
            factor: 1.3,
        }
    }
}

impl SweepSpec {
    pub fn new(levels: usize, factor: f64) -> Result<Self, SweepSpecError> {
        let spec = Self { levels, factor };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SweepSpecError> {
        if self.levels < 1 {
            return Err(SweepSpecError::NoLevels);
        }
        if !(self.factor.is_finite() && self.factor > 0.0) {
            return Err(SweepSpecError::BadFactor(self.factor));
        }
        Ok(())
    }

    /// Arrival scale of level `k` (1-based): `factor^(k-1)`.
    pub fn scale(&self, level: usize) -> f64 {
        self.factor.powi(level as i32 - 1)
    }

    pub fn scales(&self) -> Vec<f64> {
        (1..=self.levels).map(|k| self.scale(k)).collect()
    }
}

fn summary_rows(
    label: &str,
    level: usize,
    arrival_scale: f64,
    runs: &[RunMetrics],
) -> Result<Vec<ReportRow>, HarnessError> {
    Measure::ALL
        .iter()
        .map(|&measure| {
            let sample: Vec<f64> = runs.iter().map(|m| measure.of(m)).collect();
            Ok(ReportRow {
                model: label.to_string(),
                level,
                arrival_scale,
                measure,
                stats: summarize(&sample)?,
            })
        })
        .collect()
}

/// Runs each model at every level of the sweep. The config's own arrival
/// scale is the base that level scales multiply.
pub fn sweep(
    config: &ScenarioConfig,
    spec: &SweepSpec,
    models: &[ModelKind],
) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    let base = config.arrivals.scale();
    let mut rows = Vec::new();
    for &model in models {
        for level in 1..=spec.levels {
            let scale = spec.scale(level);
            let scaled = config.with_arrival_scale(base * scale)?;
            let runs = run_replications(&scaled, model)?;
            log::info!("{} level {level} done", model.name());
            rows.extend(summary_rows(model.name(), level, scale, &runs)?);
        }
    }
    Ok(ExperimentReport {
        rows,
        hypotheses: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// Both experiments reuse the same random streams.
    CommonRandomNumbers,
    /// Experiment B runs from a different master seed.
    Independent,
}

/// Added to the master seed for Experiment B under independent pairing.
pub const INDEPENDENT_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct ModelComparison {
    pub model: ModelKind,
    /// Experiment A, proactive behaviour off.
    pub reactive: Vec<RunOutcome>,
    /// Experiment B, proactive behaviour on.
    pub proactive: Vec<RunOutcome>,
    pub wait_test: MannWhitneyResult,
    pub util_test: MannWhitneyResult,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub report: ExperimentReport,
    pub models: Vec<ModelComparison>,
}

fn sample(runs: &[RunOutcome], measure: Measure) -> Vec<f64> {
    runs.iter().map(|o| measure.of(&o.metrics)).collect()
}

/// Experiment A (proactive off) against Experiment B (proactive on), with a
/// Mann-Whitney test on mean wait and staff utilisation per model.
pub fn compare_experiments(
    config: &ScenarioConfig,
    models: &[ModelKind],
    pairing: Pairing,
    alpha: f64,
) -> Result<Comparison, HarnessError> {
    let config_a = config.with_proactive(false);
    let mut config_b = config.with_proactive(true);
    if pairing == Pairing::Independent {
        config_b.master_seed = config.master_seed.wrapping_add(INDEPENDENT_SEED_OFFSET);
    }
    let scale = config.arrivals.scale();
    let mut rows = Vec::new();
    let mut hypotheses: Vec<HypothesisOutcome> = Vec::new();
    let mut results = Vec::new();
    for &model in models {
        let reactive = run_outcomes(&config_a, model)?;
        let proactive = run_outcomes(&config_b, model)?;
        for (tag, runs) in [("A", &reactive), ("B", &proactive)] {
            let metrics: Vec<RunMetrics> = runs.iter().map(|o| o.metrics).collect();
            rows.extend(summary_rows(
                &format!("{}-{tag}", model.name()),
                1,
                scale,
                &metrics,
            )?);
        }
        let wait_test = mann_whitney_u(
            &sample(&reactive, Measure::MeanWait),
            &sample(&proactive, Measure::MeanWait),
        )?;
        let util_test = mann_whitney_u(
            &sample(&reactive, Measure::StaffUtil),
            &sample(&proactive, Measure::StaffUtil),
        )?;
        let (wait_label, util_label) = model.hypotheses();
        hypotheses.push(decide(wait_label, wait_test.p_value, alpha));
        hypotheses.push(decide(util_label, util_test.p_value, alpha));
        results.push(ModelComparison {
            model,
            reactive,
            proactive,
            wait_test,
            util_test,
        });
    }
    hypotheses.sort_by(|a, b| a.hypothesis.cmp(&b.hypothesis));
    Ok(Comparison {
        report: ExperimentReport { rows, hypotheses },
        models: results,
    })
}
