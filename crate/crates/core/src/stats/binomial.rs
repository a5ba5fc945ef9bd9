use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, Normal};

use super::StatsError;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Normal quantile `z` with `P(|Z| ≤ z) = level`.
pub fn z_for_level(level: f64) -> Result<f64, StatsError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::Domain(format!("confidence level {level} outside (0, 1)")));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(0.5 + level / 2.0))
}

/// Wilson score interval for `successes` out of `trials` at quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

pub fn binomial_ci(successes: u64, trials: u64, level: f64) -> Result<(f64, f64), StatsError> {
    if trials == 0 {
        return Err(StatsError::Domain("binomial interval needs at least one trial".into()));
    }
    if successes > trials {
        return Err(StatsError::Domain(format!("{successes} successes out of {trials} trials")));
    }
    Ok(wilson_interval(successes, trials, z_for_level(level)?))
}

/// Smallest `k` with `P(X ≤ k) ≥ prob` for `X ~ Binomial(n, p)`.
pub fn binomial_quantile(n: u64, p: f64, prob: f64) -> Result<u64, StatsError> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(StatsError::Domain(format!("probability {prob} outside [0, 1]")));
    }
    let dist = Binomial::new(p, n).map_err(|e| StatsError::Domain(e.to_string()))?;
    Ok(dist.inverse_cdf(prob))
}
