use thiserror::Error;

use super::{RandomStream, SimTime, HORIZON};

/// Opening hours covered by an arrival profile.
pub const HOURS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("arrival profile needs exactly {HOURS} hourly rates (got {0})")]
    WrongLength(usize),
    #[error("hourly rate {hour} must be finite and >= 0 (got {rate})")]
    BadRate { hour: usize, rate: f64 },
    #[error("arrival scale must be finite and > 0 (got {0})")]
    BadScale(f64),
}

/// Piecewise-constant customer arrival rate, one value (customers per hour)
/// for each opening hour, multiplied by `scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalProfile {
    rates: [f64; HOURS],
    scale: f64,
}

impl ArrivalProfile {
    pub fn new(rates: &[f64], scale: f64) -> Result<Self, ProfileError> {
        let rates: [f64; HOURS] = rates
            .try_into()
            .map_err(|_| ProfileError::WrongLength(rates.len()))?;
        for (hour, &rate) in rates.iter().enumerate() {
            if !rate.is_finite() || rate < 0.0 {
                return Err(ProfileError::BadRate { hour, rate });
            }
        }
        if !scale.is_finite() || scale <= 0.0 {
            return Err(ProfileError::BadScale(scale));
        }
        Ok(Self { rates, scale })
    }

    pub fn rates(&self) -> &[f64; HOURS] {
        &self.rates
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn with_scale(&self, scale: f64) -> Result<Self, ProfileError> {
        Self::new(&self.rates, scale)
    }

    /// Effective customers per hour during `hour`.
    pub fn hourly_rate(&self, hour: usize) -> f64 {
        self.rates[hour] * self.scale
    }

    /// Expected number of arrivals over the whole day.
    pub fn expected_total(&self) -> f64 {
        (0..HOURS).map(|h| self.hourly_rate(h)).sum()
    }

    /// Next arrival strictly after `now`, or `None` if the day ends first.
    ///
    /// Draws one unit-rate exponential and spends it against the integrated
    /// rate hour by hour; whatever is left at an hour boundary carries into
    /// the next hour. This inverts the cumulative intensity exactly.
    pub fn next_arrival(&self, now: SimTime, stream: &mut RandomStream) -> Option<SimTime> {
        let mut budget = -(1.0 - stream.uniform()).ln();
        let mut t = now;
        while t < HORIZON {
            let hour = (t / 60.0).floor() as usize;
            if hour >= HOURS {
                break;
            }
            let hour_end = (hour + 1) as f64 * 60.0;
            let per_minute = self.hourly_rate(hour) / 60.0;
            if per_minute > 0.0 {
                let capacity = per_minute * (hour_end - t);
                if budget < capacity {
                    let at = t + budget / per_minute;
                    return (at < HORIZON).then_some(at);
                }
                budget -= capacity;
            }
            t = hour_end;
        }
        None
    }
}
