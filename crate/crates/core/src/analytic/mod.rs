//! Closed-form densities and probabilities, plus numerical checks of the
//! scale-invariance functional equation.
//!
//! The scale-invariant midpoint densities form the one-parameter family
//!
//! ```text
//! f(r) = q · r^(q−2) / (2π R^q),      0 < r < R,
//! ```
//!
//! with areal element `r dr dθ`. `q = 1` is the straw / parallel-line law and
//! `q = 2` the uniform-area law.

pub mod quadrature;

use num_rational::Ratio;
use thiserror::Error;

use crate::samplers::Method;
use crate::scalar::Scalar;
pub use quadrature::{integrate, QuadConfig, QuadResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge ({intervals} intervals, error estimate {abs_err:e})")]
    NonConvergence { intervals: usize, abs_err: f64 },
}

fn domain<T>(msg: String) -> Result<T, AnalyticError> {
    Err(AnalyticError::Domain(msg))
}

/// Member `q` of the scale-invariant midpoint-density family on a circle of
/// radius `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QFamily<T> {
    q: T,
    radius: T,
}

impl<T: Scalar> QFamily<T> {
    pub fn new(q: T, radius: T) -> Result<Self, AnalyticError> {
        if !(q.is_finite() && q > T::zero()) {
            return domain(format!("q must be positive, got {q}"));
        }
        if !(radius.is_finite() && radius > T::zero()) {
            return domain(format!("radius must be positive, got {radius}"));
        }
        Ok(Self { q, radius })
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    fn check_open(&self, r: T, upper: T) -> Result<(), AnalyticError> {
        if r > T::zero() && r < upper {
            Ok(())
        } else {
            domain(format!("r = {r} outside (0, {upper})"))
        }
    }

    /// Areal midpoint density `q r^(q−2) / (2π R^q)`.
    pub fn midpoint_radial_pdf(&self, r: T) -> Result<T, AnalyticError> {
        self.check_open(r, self.radius)?;
        Ok(self.density_unchecked(r))
    }

    fn density_unchecked(&self, r: T) -> T {
        self.q * r.powf(self.q - T::lit(2.0)) / (T::TAU() * self.radius.powf(self.q))
    }

    /// Density of `r` alone, `2πr·f(r) = q r^(q−1) / R^q`.
    pub fn radial_marginal_pdf(&self, r: T) -> Result<T, AnalyticError> {
        self.check_open(r, self.radius)?;
        Ok(self.q * r.powf(self.q - T::one()) / self.radius.powf(self.q))
    }

    /// `P(r ≤ x) = (x/R)^q`, clamped to `[0, 1]`.
    pub fn radial_cdf(&self, x: T) -> T {
        if x <= T::zero() {
            T::zero()
        } else if x >= self.radius {
            T::one()
        } else {
            (x / self.radius).powf(self.q)
        }
    }

    /// Inverse of [`QFamily::radial_cdf`].
    pub fn radial_quantile(&self, p: T) -> T {
        self.radius * p.powf(T::one() / self.q)
    }

    /// `P(length ≤ ℓ) = 1 − (√(R² − ℓ²/4) / R)^q` for `ℓ ∈ [0, 2R]`.
    pub fn chord_length_cdf(&self, ell: T) -> Result<T, AnalyticError> {
        let two = T::lit(2.0);
        if !(ell >= T::zero() && ell <= two * self.radius) {
            return domain(format!("chord length {ell} outside [0, 2R]"));
        }
        let half = ell / two;
        let ratio = ((self.radius - half) * (self.radius + half)).sqrt() / self.radius;
        Ok(T::one() - ratio.powf(self.q))
    }

    /// Density seen on the concentric sub-circle of radius `aR`:
    /// `f(r) / ∫_0^{aR} f(u) 2πu du = q r^(q−2) / (2π (aR)^q)`.
    pub fn conditional_rescale_pdf(&self, a: T, r: T) -> Result<T, AnalyticError> {
        if !(a > T::zero() && a <= T::one()) {
            return domain(format!("scale factor a = {a} outside (0, 1]"));
        }
        let inner = a * self.radius;
        self.check_open(r, inner)?;
        Ok(self.q * r.powf(self.q - T::lit(2.0)) / (T::TAU() * inner.powf(self.q)))
    }

    /// Probability that the chord beats the triangle side, `(1/2)^q`.
    pub fn long_chord_probability(&self) -> T {
        long_chord_probability_from_q(self.q)
    }
}

/// `∫_0^{R/2} q r^(q−1) / R^q dr = (1/2)^q`.
pub fn long_chord_probability_from_q<T: Scalar>(q: T) -> T {
    T::lit(0.5).powf(q)
}

/// The exact probability that each procedure yields a chord longer than the
/// inscribed triangle's side.
pub fn bertrand_probability(method: Method) -> Ratio<u32> {
    match method {
        Method::Straw | Method::RadiusPoint => Ratio::new(1, 2),
        Method::Dart => Ratio::new(1, 4),
        Method::Spinner | Method::Stick => Ratio::new(1, 3),
    }
}

/// Midpoint-law exponent of the procedures whose midpoint density belongs to
/// the scale-invariant family.
pub fn q_of_method(method: Method) -> Option<u32> {
    match method {
        Method::Straw | Method::RadiusPoint => Some(1),
        Method::Dart => Some(2),
        Method::Spinner | Method::Stick => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularKind {
    /// Spinner angles `(α, β)` over `[0, 2π)²`.
    SpinnerF1,
    /// Stick release angle `ψ ∈ [0, 2π)` and fall angle in the success
    /// window `(−π/2, π/2)`.
    StickF2,
}

/// The constant angular densities of the perimeter-based procedures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularPdf<T> {
    pub kind: AngularKind,
    pub value: T,
}

impl<T: Scalar> AngularPdf<T> {
    pub fn new(kind: AngularKind) -> Self {
        let pi = T::PI();
        let value = match kind {
            AngularKind::SpinnerF1 => T::one() / (T::lit(4.0) * pi * pi),
            AngularKind::StickF2 => T::one() / (T::lit(2.0) * pi * pi),
        };
        Self { kind, value }
    }

    /// Support of the second angle, as `(lo, hi)`.
    pub fn second_angle_support(&self) -> (T, T) {
        match self.kind {
            AngularKind::SpinnerF1 => (T::zero(), T::TAU()),
            AngularKind::StickF2 => (-T::FRAC_PI_2(), T::FRAC_PI_2()),
        }
    }

    /// Ranges of the second angle that yield chords longer than the side.
    pub fn long_chord_ranges(&self) -> Vec<(T, T)> {
        let sixth = T::PI() / T::lit(6.0);
        match self.kind {
            AngularKind::SpinnerF1 => vec![
                (-sixth, sixth),
                (T::lit(5.0) * sixth, T::lit(7.0) * sixth),
            ],
            AngularKind::StickF2 => vec![(-sixth, sixth)],
        }
    }

    /// `∫_0^{2π} ∫_ranges f dβ dα` by nested adaptive quadrature.
    pub fn integrate_over(&self, ranges: &[(T, T)], config: QuadConfig) -> Result<T, AnalyticError> {
        let value = self.value;
        let outer = |_alpha: T| -> T {
            ranges
                .iter()
                .map(|&(lo, hi)| {
                    integrate(|_b: T| value, lo, hi, config)
                        .map(|r| r.value)
                        .unwrap_or_else(|_| T::nan())
                })
                .sum()
        };
        Ok(integrate(outer, T::zero(), T::TAU(), config)?.value)
    }

    pub fn total_mass(&self, config: QuadConfig) -> Result<T, AnalyticError> {
        let support = self.second_angle_support();
        self.integrate_over(&[support], config)
    }

    pub fn long_chord_probability(&self, config: QuadConfig) -> Result<T, AnalyticError> {
        self.integrate_over(&self.long_chord_ranges(), config)
    }
}

/// `max_r |a² f(a r) − 2π f(r) ∫_0^{aR} f(u) u du|` over `sample_points`.
///
/// Zero (to rounding) exactly when `density` solves the scale-invariance
/// equation. With `q_hint`, the inner integral is taken after the change of
/// variable `u = aR·t^(1/q)`, which removes the `u^(q−1)` endpoint
/// singularity for densities close to the family member `q`.
pub fn scale_equation_residual<T, F>(
    density: F,
    q_hint: Option<T>,
    a: T,
    radius: T,
    sample_points: &[T],
) -> Result<T, AnalyticError>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if !(a > T::zero() && a <= T::one()) {
        return domain(format!("scale factor a = {a} outside (0, 1]"));
    }
    if !(radius > T::zero()) {
        return domain(format!("radius must be positive, got {radius}"));
    }
    for &r in sample_points {
        if !(r > T::zero() && r < radius && a * r > T::zero()) {
            return domain(format!("sample point {r} outside (0, {radius})"));
        }
    }
    let config = QuadConfig::default();
    let upper = a * radius;
    let mass = match q_hint {
        Some(q) if q > T::zero() => {
            let inv_q = T::one() / q;
            let exponent = T::lit(2.0) * inv_q - T::one();
            let integrand = |t: T| density(upper * t.powf(inv_q)) * t.powf(exponent);
            integrate(integrand, T::zero(), T::one(), config)?.value * upper * upper * inv_q
        }
        Some(q) => return domain(format!("q_hint must be positive, got {q}")),
        None => integrate(|u: T| density(u) * u, T::zero(), upper, config)?.value,
    };
    let residual = sample_points
        .iter()
        .map(|&r| (a * a * density(a * r) - T::TAU() * density(r) * mass).abs())
        .fold(T::zero(), T::max);
    Ok(residual)
}

/// `n` log-spaced points in `[lo, hi]`.
pub fn log_spaced<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![lo];
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            let t = T::lit(i as f64 / (n - 1) as f64);
            (llo + (lhi - llo) * t).exp()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn fam(q: f64, r: f64) -> QFamily<f64> {
        QFamily::new(q, r).unwrap()
    }

    /// Composite Simpson with `n` (even) panels: the independent oracle for
    /// the quadrature-derived values below.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + h * i as f64);
        }
        s * h / 3.0
    }

    #[test]
    fn midpoint_density_examples() {
        assert_relative_eq!(fam(2.0, 1.0).midpoint_radial_pdf(0.3).unwrap(), 1.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(fam(1.0, 1.0).midpoint_radial_pdf(0.5).unwrap(), 1.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(fam(1.0, 2.0).midpoint_radial_pdf(1.0).unwrap(), 1.0 / (4.0 * PI), epsilon = 1e-15);
        assert!(fam(1.0, 1.0).midpoint_radial_pdf(0.0).is_err());
        assert!(fam(1.0, 1.0).midpoint_radial_pdf(1.0).is_err());
    }

    #[test]
    fn radial_marginal_examples() {
        for r in [0.01, 0.3, 0.99] {
            assert_relative_eq!(fam(1.0, 1.0).radial_marginal_pdf(r).unwrap(), 1.0);
        }
        assert_relative_eq!(fam(2.0, 1.0).radial_marginal_pdf(0.5).unwrap(), 1.0);
    }

    #[test]
    fn marginal_normalizes() {
        for q in [0.5, 1.0, 2.0, 3.0] {
            for radius in [1.0, 2.5] {
                let f = fam(q, radius);
                let mass = integrate(
                    |r| f.radial_marginal_pdf(r).unwrap(),
                    0.0,
                    radius,
                    QuadConfig::default(),
                )
                .unwrap()
                .value;
                assert!((mass - 1.0).abs() < 1e-10, "q={q} R={radius} mass={mass}");
            }
        }
    }

    #[test]
    fn areal_density_normalizes_over_punctured_disk() {
        for q in [0.5, 1.0, 2.0, 3.0] {
            let f = fam(q, 1.0);
            let inner = |r: f64| f.midpoint_radial_pdf(r).unwrap() * r;
            let mass = integrate(
                |_theta: f64| {
                    integrate(inner, 0.0, 1.0, QuadConfig::default())
                        .unwrap()
                        .value
                },
                0.0,
                2.0 * PI,
                QuadConfig::default(),
            )
            .unwrap()
            .value;
            assert!((mass - 1.0).abs() < 1e-10, "q={q} mass={mass}");
        }
    }

    #[test]
    fn bertrand_values() {
        assert_eq!(bertrand_probability(Method::Dart), Ratio::new(1, 4));
        assert_eq!(bertrand_probability(Method::Spinner), Ratio::new(1, 3));
        assert_eq!(bertrand_probability(Method::Straw), Ratio::new(1, 2));
        assert_eq!(bertrand_probability(Method::RadiusPoint), Ratio::new(1, 2));
        assert_eq!(bertrand_probability(Method::Stick), Ratio::new(1, 3));
    }

    #[test]
    fn long_chord_from_q() {
        assert_eq!(long_chord_probability_from_q(1.0), 0.5);
        assert_eq!(long_chord_probability_from_q(2.0), 0.25);
        // q = 3: Simpson on the radial marginal 3r² over (0, 1/2)
        let oracle = simpson(|r| 3.0 * r * r, 0.0, 0.5, 100);
        assert_relative_eq!(oracle, 0.125, epsilon = 1e-14);
        assert_relative_eq!(long_chord_probability_from_q(3.0), oracle, epsilon = 1e-14);
    }

    #[test]
    fn length_cdf_examples() {
        let s3 = 3f64.sqrt();
        assert_relative_eq!(fam(1.0, 1.0).chord_length_cdf(s3).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(fam(2.0, 1.0).chord_length_cdf(s3).unwrap(), 0.75, epsilon = 1e-15);
        assert_eq!(fam(1.0, 1.0).chord_length_cdf(2.0).unwrap(), 1.0);
        assert_eq!(fam(1.0, 1.0).chord_length_cdf(0.0).unwrap(), 0.0);
        assert!(fam(1.0, 1.0).chord_length_cdf(2.1).is_err());
        assert!(fam(1.0, 1.0).chord_length_cdf(-0.1).is_err());
    }

    #[test]
    fn length_cdf_monotone_and_consistent() {
        for q in [0.5, 1.0, 2.0, 3.0] {
            for radius in [0.5, 1.0, 3.0] {
                let f = fam(q, radius);
                let mut prev = 0.0;
                for i in 0..=1000 {
                    let ell = 2.0 * radius * i as f64 / 1000.0;
                    let c = f.chord_length_cdf(ell.min(2.0 * radius)).unwrap();
                    assert!(c >= prev - 1e-15);
                    prev = c;
                }
                assert_relative_eq!(prev, 1.0);
                let complement = 1.0 - f.chord_length_cdf(3f64.sqrt() * radius).unwrap();
                assert_relative_eq!(complement, f.long_chord_probability(), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn conditional_rescale_examples() {
        // oracle: f(r) divided by Simpson's estimate of ∫_0^{aR} f(u)·2πu du
        let f = fam(1.0, 1.0);
        let mass = simpson(|u| 2.0 * PI * u * f.density_unchecked(u), 1e-12, 0.5, 200);
        let oracle = f.density_unchecked(0.25) / mass;
        assert_relative_eq!(oracle, 1.273_239_544_735_162_7, epsilon = 1e-9);
        assert_relative_eq!(f.conditional_rescale_pdf(0.5, 0.25).unwrap(), oracle, epsilon = 1e-9);

        assert_relative_eq!(
            fam(2.0, 1.0).conditional_rescale_pdf(0.5, 0.2).unwrap(),
            1.0 / (0.25 * PI),
            epsilon = 1e-15
        );
        for q in [0.5, 1.0, 3.0] {
            let f = fam(q, 2.0);
            assert_relative_eq!(
                f.conditional_rescale_pdf(1.0, 0.7).unwrap(),
                f.midpoint_radial_pdf(0.7).unwrap(),
                epsilon = 1e-15
            );
        }
        assert!(f.conditional_rescale_pdf(0.5, 0.5).is_err());
        assert!(f.conditional_rescale_pdf(0.0, 0.1).is_err());
        assert!(f.conditional_rescale_pdf(1.5, 0.1).is_err());
    }

    #[test]
    fn residual_vanishes_on_the_family() {
        let pts = log_spaced(1e-3, 0.999, 20);
        for (q, a) in [(1.0, 0.7), (2.0, 0.3), (1.0, 0.3), (2.0, 0.7), (3.0, 0.5), (0.5, 0.5)] {
            let f = fam(q, 1.0);
            let res = scale_equation_residual(|r| f.density_unchecked(r), Some(q), a, 1.0, &pts).unwrap();
            assert!(res < 1e-8, "q={q} a={a} residual={res}");
        }
        // without the hint the plain integrand is regular for q >= 1
        for (q, a) in [(1.0, 0.7), (2.0, 0.3)] {
            let f = fam(q, 1.0);
            let res = scale_equation_residual(|r| f.density_unchecked(r), None, a, 1.0, &pts).unwrap();
            assert!(res < 1e-8, "q={q} a={a} residual={res}");
        }
    }

    #[test]
    fn residual_detects_exponential_density() {
        // e^r normalized on the unit disk: ∫_0^1 e^r 2πr dr = 2π
        let density = |r: f64| r.exp() / (2.0 * PI);
        let pts = log_spaced(1e-3, 0.999, 20);
        let a = 0.5;
        // oracle: closed-form inner integral ∫_0^a (e^u/2π) u du = ((a−1)e^a + 1)/2π
        let inner = ((a - 1.0) * f64::exp(a) + 1.0) / (2.0 * PI);
        let oracle = pts
            .iter()
            .map(|&r| (a * a * density(a * r) - r.exp() * inner).abs())
            .fold(0.0, f64::max);
        let res = scale_equation_residual(density, None, a, 1.0, &pts).unwrap();
        assert_relative_eq!(res, oracle, epsilon = 1e-10);
        assert!(res > 1e-3);
    }

    #[test]
    fn residual_validates_inputs() {
        let d = |r: f64| r;
        assert!(scale_equation_residual(d, None, 0.0, 1.0, &[0.5]).is_err());
        assert!(scale_equation_residual(d, None, 0.5, 1.0, &[1.5]).is_err());
        assert!(scale_equation_residual(d, Some(-1.0), 0.5, 1.0, &[0.5]).is_err());
    }

    #[test]
    fn angular_densities() {
        let cfg = QuadConfig::default();
        let f1 = AngularPdf::<f64>::new(AngularKind::SpinnerF1);
        assert_relative_eq!(f1.value, 0.025_330_295_910_584_444, epsilon = 1e-15);
        assert!((f1.total_mass(cfg).unwrap() - 1.0).abs() < 1e-12);
        assert!((f1.long_chord_probability(cfg).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let f2 = AngularPdf::<f64>::new(AngularKind::StickF2);
        assert!((f2.total_mass(cfg).unwrap() - 1.0).abs() < 1e-12);
        assert!((f2.long_chord_probability(cfg).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn family_validation_and_quantiles() {
        assert!(QFamily::new(0.0, 1.0).is_err());
        assert!(QFamily::new(1.0, -1.0).is_err());
        let f = fam(2.0, 3.0);
        for p in [0.1, 0.5, 0.9] {
            assert_relative_eq!(f.radial_cdf(f.radial_quantile(p)), p, epsilon = 1e-14);
        }
    }

    #[test]
    fn generic_over_f32() {
        let f = QFamily::<f32>::new(1.0, 1.0).unwrap();
        assert!((f.chord_length_cdf(3f32.sqrt()).unwrap() - 0.5).abs() < 1e-6);
    }
}
