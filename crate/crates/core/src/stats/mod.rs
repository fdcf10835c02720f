//! Two-sample Mann-Whitney U test and hypothesis decisions.

mod mann_whitney;
mod oracle;

pub use mann_whitney::{
    exact_null_counts, mann_whitney_u, mann_whitney_u_with, MannWhitneyError, MannWhitneyResult,
    MwMethod, MwMode, EXACT_MAX_SMALLER_SAMPLE,
};
pub use oracle::{exact_mw_oracle, OracleError, ORACLE_MAX_TOTAL};

use serde::{Deserialize, Serialize};

/// Conventional significance level.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Reject,
    FailToReject,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Reject => "reject",
            Decision::FailToReject => "fail-to-reject",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "reject" => Some(Decision::Reject),
            "fail-to-reject" => Some(Decision::FailToReject),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisOutcome {
    pub hypothesis: String,
    pub p_value: f64,
    pub alpha: f64,
    pub decision: Decision,
}

/// Rejects the null hypothesis iff `p < alpha`.
pub fn decide(label: &str, p_value: f64, alpha: f64) -> HypothesisOutcome {
    let decision = if p_value < alpha {
        Decision::Reject
    } else {
        Decision::FailToReject
    };
    HypothesisOutcome {
        hypothesis: label.to_string(),
        p_value,
        alpha,
        decision,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decisions_at_five_percent() {
        assert_eq!(decide("H01", 0.1608, 0.05).decision, Decision::FailToReject);
        assert_eq!(decide("H03", 0.000, 0.05).decision, Decision::Reject);
        assert_eq!(decide("H02", 0.05, 0.05).decision, Decision::FailToReject);
        assert_eq!(decide("H02", 0.06, 0.05).decision, Decision::FailToReject);
    }

    #[test]
    fn decision_names() {
        for d in [Decision::Reject, Decision::FailToReject] {
            assert_eq!(Decision::from_name(d.as_str()), Some(d));
        }
    }
}
