use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

/// The exact null distribution is used when the smaller sample has at most
/// this many observations and there are no ties.
pub const EXACT_MAX_SMALLER_SAMPLE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MannWhitneyError {
    #[error("both samples must be non-empty")]
    EmptySample,
    #[error("samples must not contain NaN or infinite values")]
    NonFinite,
    #[error("the exact test is undefined with tied observations")]
    TiesInExact,
    #[error("null distribution too large to enumerate exactly")]
    TooLarge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MwMethod {
    Exact,
    NormalApproximation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwMode {
    /// Exact for small tie-free samples, normal approximation otherwise.
    Auto,
    Exact,
    Approximate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitneyResult {
    /// `min(U_a, U_b)`.
    pub u: f64,
    /// Two-sided.
    pub p_value: f64,
    pub method: MwMethod,
    pub tie_corrected: bool,
}

struct Ranked {
    u_a: f64,
    n: usize,
    m: usize,
    /// Sum of `t^3 - t` over tie groups.
    tie_term: f64,
}

fn rank(a: &[f64], b: &[f64]) -> Ranked {
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&y| (y, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // Positions i..j share the average of ranks i+1..=j.
        let avg = (i + 1 + j) as f64 / 2.0;
        let in_a = pooled[i..j].iter().filter(|p| p.1).count();
        rank_sum_a += avg * in_a as f64;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let n = a.len();
    Ranked {
        u_a: rank_sum_a - (n * (n + 1)) as f64 / 2.0,
        n,
        m: b.len(),
        tie_term,
    }
}

/// Null distribution of U for sample sizes `n` and `m` without ties:
/// `counts[k]` is the number of the `C(n+m, n)` label assignments with
/// `U = k`. These are the coefficients of the Gaussian binomial
/// `[n+m choose n]_q`, built one factor `(1 - q^(m+i)) / (1 - q^i)` at a time.
/// Returns `None` on overflow.
pub fn exact_null_counts(n: usize, m: usize) -> Option<Vec<i128>> {
    let (small, large) = if n <= m { (n, m) } else { (m, n) };
    let max_u = small.checked_mul(large)?;
    let mut c = vec![0i128; max_u + 1];
    c[0] = 1;
    for i in 1..=small {
        let shift = large + i;
        for k in (shift..=max_u).rev() {
            c[k] = c[k].checked_sub(c[k - shift])?;
        }
        for k in i..=max_u {
            c[k] = c[k].checked_add(c[k - i])?;
        }
    }
    Some(c)
}

fn exact_p(u_min: f64, n: usize, m: usize) -> Option<f64> {
    let counts = exact_null_counts(n, m)?;
    let total: i128 = counts
        .iter()
        .try_fold(0i128, |acc, &c| acc.checked_add(c))?;
    let k = u_min.round() as usize;
    let tail: i128 = counts[..=k.min(counts.len() - 1)].iter().sum();
    let p = (2 * tail) as f64 / total as f64;
    Some(p.min(1.0))
}

fn approximate_p(r: &Ranked) -> f64 {
    let n = r.n as f64;
    let m = r.m as f64;
    let total = n + m;
    let mean = n * m / 2.0;
    let correction = if total > 1.0 {
        r.tie_term / (total * (total - 1.0))
    } else {
        0.0
    };
    let var = n * m / 12.0 * ((total + 1.0) - correction);
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((r.u_a - mean).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / SQRT_2).clamp(0.0, 1.0)
}

/// Two-sided Mann-Whitney U test, choosing the method automatically.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitneyResult, MannWhitneyError> {
    mann_whitney_u_with(a, b, MwMode::Auto)
}

pub fn mann_whitney_u_with(
    a: &[f64],
    b: &[f64],
    mode: MwMode,
) -> Result<MannWhitneyResult, MannWhitneyError> {
    if a.is_empty() || b.is_empty() {
        return Err(MannWhitneyError::EmptySample);
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(MannWhitneyError::NonFinite);
    }
    let r = rank(a, b);
    let u_b = (r.n * r.m) as f64 - r.u_a;
    let u = r.u_a.min(u_b);
    let ties = r.tie_term > 0.0;

    let want_exact = match mode {
        MwMode::Exact => {
            if ties {
                return Err(MannWhitneyError::TiesInExact);
            }
            true
        }
        MwMode::Approximate => false,
        MwMode::Auto => !ties && r.n.min(r.m) <= EXACT_MAX_SMALLER_SAMPLE,
    };
    if want_exact {
        match exact_p(u, r.n, r.m) {
            Some(p_value) => {
                return Ok(MannWhitneyResult {
                    u,
                    p_value,
                    method: MwMethod::Exact,
                    tie_corrected: false,
                })
            }
            None if mode == MwMode::Exact => return Err(MannWhitneyError::TooLarge),
            None => {}
        }
    }
    Ok(MannWhitneyResult {
        u,
        p_value: approximate_p(&r),
        method: MwMethod::NormalApproximation,
        tie_corrected: ties,
    })
}
