//! The random chord-selection procedures.
//!
//! Each sampler performs exactly one trial: it consumes a fixed number of
//! uniforms from the stream and returns either a chord or the reason the
//! trial produced none. Resampling is the engine's job.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{
    chord_from_endpoint_angle, chord_from_line, chord_from_midpoint, chord_from_perimeter_fall,
    Chord, Circle, Line, Point2, Rejection,
};
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Half-width of the extended straw window, in radii.
pub const STRAW_WINDOW_RADII: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Infinite straws thrown with the uniform line measure.
    Straw,
    /// A random radius, then a random point on it as the midpoint.
    RadiusPoint,
    /// A dart landing uniformly in the disk marks the midpoint.
    Dart,
    /// A random perimeter point, then a random direction from it.
    Spinner,
    /// A stick released upright at a random perimeter point.
    Stick,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Straw,
        Method::RadiusPoint,
        Method::Dart,
        Method::Spinner,
        Method::Stick,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Straw => "straw",
            Method::RadiusPoint => "radius-point",
            Method::Dart => "dart",
            Method::Spinner => "spinner",
            Method::Stick => "stick",
        }
    }

    /// One trial of this procedure (straws use the circle-sized window).
    pub fn sample<T: Scalar>(self, circle: &Circle<T>, rng: &mut RngStream) -> SampleResult<T> {
        match self {
            Method::Straw => sample_straw(circle, rng, false),
            Method::RadiusPoint => sample_radius_point(circle, rng),
            Method::Dart => sample_dart(circle, rng),
            Method::Spinner => sample_spinner(circle, rng),
            Method::Stick => sample_stick(circle, rng),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleResult<T> {
    Accepted(Chord<T>),
    Rejected(Rejection),
}

impl<T: Scalar> SampleResult<T> {
    pub fn chord(&self) -> Option<&Chord<T>> {
        match self {
            SampleResult::Accepted(c) => Some(c),
            SampleResult::Rejected(_) => None,
        }
    }

    pub fn rejection(&self) -> Option<Rejection> {
        match self {
            SampleResult::Accepted(_) => None,
            SampleResult::Rejected(r) => Some(*r),
        }
    }

    pub fn is_accepted(&self) -> bool {
        matches!(self, SampleResult::Accepted(_))
    }
}

impl<T> From<Result<Chord<T>, Rejection>> for SampleResult<T> {
    fn from(r: Result<Chord<T>, Rejection>) -> Self {
        match r {
            Ok(c) => SampleResult::Accepted(c),
            Err(e) => SampleResult::Rejected(e),
        }
    }
}

/// Anything that produces one chord trial per call: a [`Method`], or a
/// closure for alternative laws and controls.
pub trait ChordLaw<T: Scalar>: Sync {
    fn draw(&self, circle: &Circle<T>, rng: &mut RngStream) -> SampleResult<T>;
}

impl<T: Scalar> ChordLaw<T> for Method {
    fn draw(&self, circle: &Circle<T>, rng: &mut RngStream) -> SampleResult<T> {
        self.sample(circle, rng)
    }
}

impl<T, F> ChordLaw<T> for F
where
    T: Scalar,
    F: Fn(&Circle<T>, &mut RngStream) -> SampleResult<T> + Sync,
{
    fn draw(&self, circle: &Circle<T>, rng: &mut RngStream) -> SampleResult<T> {
        self(circle, rng)
    }
}

/// A uniformly random line meeting the window `|d| < half_width` about
/// `center`: `φ ~ U[0, π)`, `d ~ U(−w, w)`.
pub fn random_line<T: Scalar>(center: Point2<T>, half_width: T, rng: &mut RngStream) -> Line<T> {
    let phi = T::lit(rng.uniform_in(0.0, std::f64::consts::PI));
    let d = half_width * T::lit(rng.uniform_in(-1.0, 1.0));
    let normal = Point2::from_polar(T::one(), phi);
    Line::new(d + center.dot(normal), phi)
}

/// Straw throw. With `extended`, lines are drawn over a window of
/// half-width `4R` so most straws miss the circle.
pub fn sample_straw<T: Scalar>(
    circle: &Circle<T>,
    rng: &mut RngStream,
    extended: bool,
) -> SampleResult<T> {
    let half_width = if extended {
        circle.radius() * T::lit(STRAW_WINDOW_RADII)
    } else {
        circle.radius()
    };
    let line = random_line(circle.center(), half_width, rng);
    chord_from_line(*circle, line).into()
}

pub fn sample_radius_point<T: Scalar>(circle: &Circle<T>, rng: &mut RngStream) -> SampleResult<T> {
    let diameter_dir = rng.uniform_in(0.0, std::f64::consts::TAU);
    let u = rng.next_uniform();
    if u == 0.0 {
        return SampleResult::Rejected(Rejection::Diameter);
    }
    let t = circle.radius() * T::lit(u);
    let theta = T::lit(diameter_dir) + T::FRAC_PI_2();
    chord_from_midpoint(*circle, t, theta)
        .map_err(|_| Rejection::Degenerate)
        .into()
}

pub fn sample_dart<T: Scalar>(circle: &Circle<T>, rng: &mut RngStream) -> SampleResult<T> {
    let theta = rng.uniform_in(0.0, std::f64::consts::TAU);
    let u = rng.next_uniform();
    if u == 0.0 {
        return SampleResult::Rejected(Rejection::Degenerate);
    }
    let r = circle.radius() * T::lit(u.sqrt());
    chord_from_midpoint(*circle, r, T::lit(theta))
        .map_err(|_| Rejection::Degenerate)
        .into()
}

/// The two spinner angles `(α, β)`, each uniform on `[0, 2π)`.
pub fn spinner_angles<T: Scalar>(rng: &mut RngStream) -> (T, T) {
    let alpha = rng.uniform_in(0.0, std::f64::consts::TAU);
    let beta = rng.uniform_in(0.0, std::f64::consts::TAU);
    (T::lit(alpha), T::lit(beta))
}

pub fn sample_spinner<T: Scalar>(circle: &Circle<T>, rng: &mut RngStream) -> SampleResult<T> {
    let (alpha, beta) = spinner_angles(rng);
    chord_from_endpoint_angle(*circle, alpha, beta).into()
}

/// Spinner with `β` restricted to `(−π/2, π/2)`: each chord is reached
/// twice instead of four times.
pub fn sample_spinner_reduced<T: Scalar>(
    circle: &Circle<T>,
    rng: &mut RngStream,
) -> SampleResult<T> {
    let alpha = rng.uniform_in(0.0, std::f64::consts::TAU);
    let beta = rng.uniform_in(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
    chord_from_endpoint_angle(*circle, T::lit(alpha), T::lit(beta)).into()
}

/// Release point `ψ` and absolute fall direction, each uniform on `[0, 2π)`.
pub fn stick_release<T: Scalar>(rng: &mut RngStream) -> (T, T) {
    let psi = rng.uniform_in(0.0, std::f64::consts::TAU);
    let fall = rng.uniform_in(0.0, std::f64::consts::TAU);
    (T::lit(psi), T::lit(fall))
}

pub fn sample_stick<T: Scalar>(circle: &Circle<T>, rng: &mut RngStream) -> SampleResult<T> {
    let (psi, fall) = stick_release(rng);
    chord_from_perimeter_fall(*circle, psi, fall).into()
}
