//! Brute-force exact Mann-Whitney p-value. Deliberately shares nothing with
//! the rank-based implementation: it enumerates every way of labelling the
//! pooled observations and counts pairwise wins directly.

use thiserror::Error;

pub const ORACLE_MAX_TOTAL: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("both samples must be non-empty")]
    EmptySample,
    #[error("oracle enumerates at most {ORACLE_MAX_TOTAL} observations")]
    TooLarge,
    #[error("oracle requires distinct observations")]
    Ties,
}

fn wins(xs: &[f64], ys: &[f64]) -> i64 {
    xs.iter()
        .map(|x| ys.iter().filter(|y| x > y).count() as i64)
        .sum()
}

/// Two-sided exact p-value: the share of the `C(n+m, n)` equally likely
/// labellings whose U is at least as far from `nm/2` as the observed one.
pub fn exact_mw_oracle(a: &[f64], b: &[f64]) -> Result<f64, OracleError> {
    if a.is_empty() || b.is_empty() {
        return Err(OracleError::EmptySample);
    }
    let n = a.len();
    let m = b.len();
    let total = n + m;
    if total > ORACLE_MAX_TOTAL {
        return Err(OracleError::TooLarge);
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    for i in 0..total {
        for j in i + 1..total {
            if pooled[i] == pooled[j] {
                return Err(OracleError::Ties);
            }
        }
    }
    let nm = (n * m) as i64;
    let observed = (2 * wins(a, b) - nm).abs();
    let mut extreme = 0u64;
    let mut labellings = 0u64;
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(m);
        for (i, &v) in pooled.iter().enumerate() {
            if mask & (1 << i) != 0 {
                xs.push(v);
            } else {
                ys.push(v);
            }
        }
        labellings += 1;
        if (2 * wins(&xs, &ys) - nm).abs() >= observed {
            extreme += 1;
        }
    }
    Ok((extreme as f64 / labellings as f64).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_triples() {
        assert_eq!(exact_mw_oracle(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]), Ok(0.1));
    }

    #[test]
    fn singletons() {
        assert_eq!(exact_mw_oracle(&[1.0], &[2.0]), Ok(1.0));
    }

    #[test]
    fn rejects_out_of_scope_inputs() {
        assert_eq!(
            exact_mw_oracle(&[1.0; 7], &[2.0; 6]),
            Err(OracleError::TooLarge)
        );
        assert_eq!(exact_mw_oracle(&[1.0, 2.0], &[2.0]), Err(OracleError::Ties));
        assert_eq!(exact_mw_oracle(&[], &[2.0]), Err(OracleError::EmptySample));
    }
}
