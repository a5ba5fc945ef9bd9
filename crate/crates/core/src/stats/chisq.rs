use serde::Serialize;
use statrs::function::gamma::gamma_ur;

use super::StatsError;

/// Smallest expected count per bin for the asymptotic p-value to be trusted.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSqResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

fn upper_tail(statistic: f64, dof: usize) -> f64 {
    if statistic <= 0.0 {
        1.0
    } else {
        gamma_ur(dof as f64 / 2.0, statistic / 2.0)
    }
}

/// Pearson goodness of fit against fully specified bin probabilities;
/// `dof = bins − 1`.
pub fn chi_square_gof(counts: &[u64], expected_probs: &[f64]) -> Result<ChiSqResult, StatsError> {
    if counts.len() != expected_probs.len() {
        return Err(StatsError::LengthMismatch(counts.len(), expected_probs.len()));
    }
    if counts.len() < 2 {
        return Err(StatsError::Domain("need at least two bins".into()));
    }
    let mass: f64 = expected_probs.iter().sum();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(StatsError::NotNormalized(mass));
    }
    let n: u64 = counts.iter().sum();
    let nf = n as f64;
    let mut statistic = 0.0;
    for (bin, (&o, &p)) in counts.iter().zip(expected_probs).enumerate() {
        let e = nf * p;
        if !(e >= MIN_EXPECTED) {
            return Err(StatsError::ExpectedTooSmall { bin, expected: e });
        }
        let diff = o as f64 - e;
        statistic += diff * diff / e;
    }
    let dof = counts.len() - 1;
    Ok(ChiSqResult {
        statistic,
        dof,
        p_value: upper_tail(statistic, dof),
    })
}

/// Two-sample homogeneity test on binned counts (a 2×k contingency
/// table). Bins empty in both samples are dropped; `dof = used bins − 1`.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> Result<ChiSqResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(StatsError::Domain("need at least two bins".into()));
    }
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return Err(StatsError::Empty);
    }
    let (na, nb) = (na as f64, nb as f64);
    let total = na + nb;
    let mut statistic = 0.0;
    let mut used = 0usize;
    for (bin, (&x, &y)) in a.iter().zip(b).enumerate() {
        if x + y == 0 {
            continue;
        }
        used += 1;
        let col = (x + y) as f64;
        let (ea, eb) = (na * col / total, nb * col / total);
        let smaller = ea.min(eb);
        if !(smaller >= MIN_EXPECTED) {
            return Err(StatsError::ExpectedTooSmall { bin, expected: smaller });
        }
        statistic += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    if used < 2 {
        return Err(StatsError::Domain("need at least two non-empty bins".into()));
    }
    let dof = used - 1;
    Ok(ChiSqResult {
        statistic,
        dof,
        p_value: upper_tail(statistic, dof),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn proportional_counts_give_zero() {
        let r = chi_square_gof(&[20, 30, 50], &[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.dof, 2);
    }

    #[test]
    fn reference_value() {
        // observed 10,20,30,40 vs uniform: stat = (225+25+25+225)/25 = 20, dof 3
        let r = chi_square_gof(&[10, 20, 30, 40], &[0.25; 4]).unwrap();
        assert_relative_eq!(r.statistic, 20.0, epsilon = 1e-12);
        // upper tail of chi2(3) at 20: closed form for odd dof
        let x: f64 = 20.0;
        let tail = libm_erfc((x / 2.0).sqrt())
            + (2.0 * x / std::f64::consts::PI).sqrt() * (-x / 2.0).exp();
        assert_relative_eq!(r.p_value, tail, epsilon = 1e-10);
    }

    // erfc by Simpson's rule, independent of the gamma routines under test
    fn libm_erfc(x: f64) -> f64 {
        let n = 20_000;
        let upper = x + 10.0;
        let h = (upper - x) / n as f64;
        let f = |t: f64| (-t * t).exp();
        let mut s = f(x) + f(upper);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x + h * i as f64);
        }
        s * h / 3.0 * 2.0 / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            chi_square_gof(&[1, 2], &[0.5, 0.5]),
            Err(StatsError::ExpectedTooSmall { .. })
        ));
        assert!(matches!(
            chi_square_gof(&[10, 10], &[0.5, 0.6]),
            Err(StatsError::NotNormalized(_))
        ));
        assert!(matches!(
            chi_square_gof(&[10, 10, 10], &[0.5, 0.5]),
            Err(StatsError::LengthMismatch(3, 2))
        ));
    }

    #[test]
    fn uniform_counts_pass_and_linear_density_fails() {
        let n = 100_000;
        let mut rng = RngStream::new(11);
        let mut uni = vec![0u64; 50];
        let mut lin = vec![0u64; 50];
        for _ in 0..n {
            uni[(rng.next_uniform() * 50.0) as usize] += 1;
            // density 2r via inverse cdf √u
            lin[(rng.next_uniform().sqrt() * 50.0) as usize] += 1;
        }
        let expected = vec![1.0 / 50.0; 50];
        assert!(chi_square_gof(&uni, &expected).unwrap().p_value > 1e-3);
        assert!(chi_square_gof(&lin, &expected).unwrap().p_value < 1e-6);
    }

    #[test]
    fn homogeneity() {
        let r = chi_square_homogeneity(&[50, 50, 100], &[50, 50, 100]).unwrap();
        assert_eq!(r.statistic, 0.0);
        let r = chi_square_homogeneity(&[500, 100], &[100, 500]).unwrap();
        assert!(r.p_value < 1e-10);
        assert!(chi_square_homogeneity(&[1, 1], &[1, 1]).is_err());
        let r = chi_square_homogeneity(&[50, 0, 100], &[50, 0, 100]).unwrap();
        assert_eq!(r.dof, 1);
        assert!(chi_square_homogeneity(&[50, 0], &[50, 0]).is_err());
    }

    proptest! {
        #[test]
        fn statistic_invariant_under_bin_permutation(
            counts in prop::collection::vec(0u64..500, 3..12),
            seed in any::<u64>(),
        ) {
            let k = counts.len();
            let total: u64 = counts.iter().sum();
            prop_assume!(total as f64 / k as f64 >= MIN_EXPECTED);
            let probs = vec![1.0 / k as f64; k];
            let base = chi_square_gof(&counts, &probs).unwrap();
            let mut idx: Vec<usize> = (0..k).collect();
            let mut rng = RngStream::new(seed);
            for i in (1..k).rev() {
                let j = (rng.next_uniform() * (i + 1) as f64) as usize;
                idx.swap(i, j);
            }
            let permuted: Vec<u64> = idx.iter().map(|&i| counts[i]).collect();
            let again = chi_square_gof(&permuted, &probs).unwrap();
            prop_assert!((base.statistic - again.statistic).abs() <= 1e-9 * base.statistic.max(1.0));
        }
    }
}
