//! Per-replication performance measures and their summaries.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The six measures reported for every replication.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunMetrics {
    /// Minutes of queueing per customer, summed over the three queues.
    pub mean_wait: f64,
    pub staff_util: f64,
    pub cubicle_util: f64,
    pub served: u64,
    pub not_served: u64,
    pub service_time_changes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    MeanWait,
    StaffUtil,
    CubicleUtil,
    Served,
    NotServed,
    ServiceTimeChanges,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::MeanWait,
        Measure::StaffUtil,
        Measure::CubicleUtil,
        Measure::Served,
        Measure::NotServed,
        Measure::ServiceTimeChanges,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::MeanWait => "mean_wait",
            Measure::StaffUtil => "staff_util",
            Measure::CubicleUtil => "cubicle_util",
            Measure::Served => "served",
            Measure::NotServed => "not_served",
            Measure::ServiceTimeChanges => "service_time_changes",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn of(self, m: &RunMetrics) -> f64 {
        match self {
            Measure::MeanWait => m.mean_wait,
            Measure::StaffUtil => m.staff_util,
            Measure::CubicleUtil => m.cubicle_util,
            Measure::Served => m.served as f64,
            Measure::NotServed => m.not_served as f64,
            Measure::ServiceTimeChanges => m.service_time_changes as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 divisor); zero for a single value.
    pub sd: f64,
    pub median: f64,
}

impl SummaryStats {
    pub fn standard_error(&self) -> f64 {
        self.sd / (self.n as f64).sqrt()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFinite,
}

pub fn summarize(sample: &[f64]) -> Result<SummaryStats, StatsError> {
    if sample.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let n = sample.len();
    let mean = sample.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        let ss: f64 = sample.iter().map(|x| (x - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(SummaryStats {
        n,
        mean,
        sd,
        median: median(sample),
    })
}

/// Middle value of the sorted sample; mean of the middle two for even n.
pub fn median(sample: &[f64]) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_summaries() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!((s.mean, s.median), (2.5, 2.5));
        let s = summarize(&[5.0]).unwrap();
        assert_eq!((s.n, s.mean, s.sd, s.median), (1, 5.0, 0.0, 5.0));
        assert_eq!(summarize(&[2.0, 2.0, 2.0]).unwrap().sd, 0.0);
        assert_eq!(summarize(&[]), Err(StatsError::EmptySample));
    }

    #[test]
    fn sample_sd_uses_n_minus_one() {
        let s = summarize(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert!((s.sd - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn measure_names_round_trip() {
        for m in Measure::ALL {
            assert_eq!(Measure::from_name(m.name()), Some(m));
        }
    }

    proptest! {
        #[test]
        fn median_matches_sorted_middle(xs in prop::collection::vec(-1e6f64..1e6, 1..60)) {
            let s = summarize(&xs).unwrap();
            let mut sorted = xs.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = sorted.len();
            let expected = if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 };
            prop_assert_eq!(s.median, expected);
            prop_assert!(s.median >= sorted[0] && s.median <= sorted[n - 1]);
            prop_assert!(s.sd >= 0.0);
        }
    }
}
