//! Circles, chords and lines.
//!
//! Every chord is stored by the polar coordinates `(r, θ)` of its midpoint
//! relative to the circle center. Diameters (`r = 0`) and tangent
//! degeneracies (`r = R`) cannot be represented; constructors that could
//! produce them report a [`Rejection`] instead.
//!
//! Angle convention for chords drawn from a point on the perimeter: the
//! endpoint sits at perimeter angle `α`, and `β` is the clockwise angle from
//! the outward radius-vector to the chord's line. With this convention a
//! chord is reached by exactly four pairs: `(α, β)`, `(α, β + π)`,
//! `(π + α − 2β, −β)` and `(π + α − 2β, π − β)`.

use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{fold_half_turn, wrap_signed_pi, wrap_two_pi, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("midpoint distance {r} outside the open interval (0, {radius})")]
    MidpointOutOfRange { r: f64, radius: f64 },
    #[error("circle radius must be finite and strictly positive, got {0}")]
    BadRadius(f64),
    #[error("scale factor must be finite and strictly positive, got {0}")]
    BadScale(f64),
    #[error("non-finite coordinate")]
    NonFinite,
}

/// Why a single trial produced no chord.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    /// The line does not meet the circle.
    MissedCircle,
    /// The stick fell away from the circle.
    FellOutside,
    /// The draw selects a diameter, excluded from the regularized problem.
    Diameter,
    /// Zero-length (tangent) chord or a midpoint at the exact center.
    Degenerate,
}

impl Rejection {
    pub const ALL: [Rejection; 4] = [
        Rejection::MissedCircle,
        Rejection::FellOutside,
        Rejection::Diameter,
        Rejection::Degenerate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Rejection::MissedCircle => "missed_circle",
            Rejection::FellOutside => "fell_outside",
            Rejection::Diameter => "diameter",
            Rejection::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Add for Point2<T> {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point2<T> {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn from_polar(r: T, theta: T) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k)
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn angle(self) -> T {
        wrap_two_pi(self.y.atan2(self.x))
    }

    /// Rotation about the origin.
    pub fn rotate(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle<T> {
    center: Point2<T>,
    radius: T,
}

impl<T: Scalar> Circle<T> {
    pub fn new(center: Point2<T>, radius: T) -> Result<Self, GeometryError> {
        if !center.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if !(radius.is_finite() && radius > T::zero()) {
            return Err(GeometryError::BadRadius(radius.as_f64()));
        }
        Ok(Self { center, radius })
    }

    /// Circle of the given radius centered at the origin.
    pub fn centered(radius: T) -> Result<Self, GeometryError> {
        Self::new(Point2::origin(), radius)
    }

    pub fn unit() -> Self {
        Self {
            center: Point2::origin(),
            radius: T::one(),
        }
    }

    pub fn center(&self) -> Point2<T> {
        self.center
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// Point on the perimeter at polar angle `angle`.
    pub fn perimeter_point(&self, angle: T) -> Point2<T> {
        self.center.add(Point2::from_polar(self.radius, angle))
    }

    /// Strict interior test.
    pub fn contains(&self, p: Point2<T>) -> bool {
        p.sub(self.center).norm() < self.radius
    }

    /// Length of a side of the inscribed equilateral triangle, `√3·R`.
    pub fn triangle_side(&self) -> T {
        T::lit(3.0).sqrt() * self.radius
    }
}

/// A non-diameter chord, identified by its midpoint's polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chord<T> {
    circle: Circle<T>,
    r: T,
    theta: T,
}

impl<T: Scalar> Chord<T> {
    pub fn circle(&self) -> &Circle<T> {
        &self.circle
    }

    /// Midpoint distance from the center, in `(0, R)`.
    pub fn r(&self) -> T {
        self.r
    }

    /// Midpoint direction, in `[0, 2π)`.
    pub fn theta(&self) -> T {
        self.theta
    }

    /// `r / R`, in `(0, 1)`.
    pub fn relative_r(&self) -> T {
        self.r / self.circle.radius
    }

    pub fn midpoint(&self) -> Point2<T> {
        self.circle
            .center
            .add(Point2::from_polar(self.r, self.theta))
    }

    pub fn length(&self) -> T {
        chord_length(self)
    }

    pub fn is_longer_than_side(&self) -> bool {
        is_longer_than_side(self)
    }

    pub fn endpoints(&self) -> (Point2<T>, Point2<T>) {
        let m = self.midpoint();
        let half = (self.circle.radius * self.circle.radius - self.r * self.r).sqrt();
        let (s, c) = self.theta.sin_cos();
        let t = Point2::new(-s, c).scale(half);
        (m.add(t), m.sub(t))
    }

    /// The infinite line carrying the chord.
    pub fn line(&self) -> Line<T> {
        Line::new(
            self.r + self.circle.center.dot(Point2::from_polar(T::one(), self.theta)),
            self.theta,
        )
    }

    /// Applies the same motion as [`transform_circle`] to the whole figure.
    pub fn transformed(
        &self,
        rotation: T,
        scale: T,
        translation: Point2<T>,
    ) -> Result<Self, GeometryError> {
        let circle = transform_circle(self.circle, rotation, scale, translation)?;
        Ok(Self {
            circle,
            r: self.r * scale,
            theta: wrap_two_pi(self.theta + rotation),
        })
    }
}

/// An infinite line `{p : p·(cos φ, sin φ) = d}` in global coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line<T> {
    d: T,
    phi: T,
}

impl<T: Scalar> Line<T> {
    /// Builds a line from any `(d, φ)`, normalizing `φ` into `[0, π)` and
    /// flipping the sign of `d` when the normal is reversed.
    pub fn new(d: T, phi: T) -> Self {
        let pi = T::PI();
        let mut phi = wrap_two_pi(phi);
        let mut d = d;
        if phi >= pi {
            phi = phi - pi;
            d = -d;
        }
        Self { d, phi }
    }

    /// Line through two distinct points.
    pub fn through(p: Point2<T>, q: Point2<T>) -> Self {
        let dir = q.sub(p);
        let normal = Point2::new(-dir.y, dir.x);
        let normal = normal.scale(T::one() / normal.norm());
        Self::new(normal.dot(p), normal.y.atan2(normal.x))
    }

    pub fn d(&self) -> T {
        self.d
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn normal(&self) -> Point2<T> {
        Point2::from_polar(T::one(), self.phi)
    }

    /// Signed distance of `p` from the line, positive on the normal side.
    pub fn signed_distance(&self, p: Point2<T>) -> T {
        p.dot(self.normal()) - self.d
    }
}

/// The chord whose midpoint has polar coordinates `(r, θ)` about the center.
pub fn chord_from_midpoint<T: Scalar>(
    circle: Circle<T>,
    r: T,
    theta: T,
) -> Result<Chord<T>, GeometryError> {
    if !(r > T::zero() && r < circle.radius) {
        return Err(GeometryError::MidpointOutOfRange {
            r: r.as_f64(),
            radius: circle.radius.as_f64(),
        });
    }
    if !theta.is_finite() {
        return Err(GeometryError::NonFinite);
    }
    Ok(Chord {
        circle,
        r,
        theta: wrap_two_pi(theta),
    })
}

/// `2·√(R² − r²)`.
pub fn chord_length<T: Scalar>(c: &Chord<T>) -> T {
    let radius = c.circle.radius;
    T::lit(2.0) * ((radius - c.r) * (radius + c.r)).sqrt()
}

/// Strictly longer than the inscribed triangle's side, i.e. `r < R/2`.
/// A chord of exactly the side length is not longer.
pub fn is_longer_than_side<T: Scalar>(c: &Chord<T>) -> bool {
    c.r < c.circle.radius / T::lit(2.0)
}

/// Chord cut from `circle` by `line`. The midpoint is the foot of the
/// perpendicular from the center.
pub fn chord_from_line<T: Scalar>(circle: Circle<T>, line: Line<T>) -> Result<Chord<T>, Rejection> {
    let offset = line.d - circle.center.dot(line.normal());
    if offset == T::zero() {
        return Err(Rejection::Diameter);
    }
    let r = offset.abs();
    if r >= circle.radius {
        return Err(Rejection::MissedCircle);
    }
    let theta = if offset > T::zero() {
        line.phi
    } else {
        line.phi + T::PI()
    };
    chord_from_midpoint(circle, r, theta).map_err(|_| Rejection::Degenerate)
}

/// Chord through the perimeter point at angle `alpha` whose line is turned
/// by `turn` (counterclockwise) away from the inward radius. `turn` and
/// `turn + π` give the same line.
fn chord_from_perimeter_turn<T: Scalar>(
    circle: Circle<T>,
    alpha: T,
    turn: T,
) -> Result<Chord<T>, Rejection> {
    let gamma = fold_half_turn(turn);
    if gamma == T::zero() {
        return Err(Rejection::Diameter);
    }
    let half_pi = T::FRAC_PI_2();
    if gamma.abs() >= half_pi {
        return Err(Rejection::Degenerate);
    }
    let r = circle.radius * gamma.sin().abs();
    let theta = if gamma > T::zero() {
        alpha + gamma - half_pi
    } else {
        alpha + gamma + half_pi
    };
    chord_from_midpoint(circle, r, theta).map_err(|_| Rejection::Degenerate)
}

/// Chord from the perimeter point at angle `alpha`, in direction `beta`
/// measured clockwise from the outward radius-vector (the line is extended
/// both ways). Midpoint distance `R·|sin β|`, length `2R·|cos β|`.
///
/// `β ∈ {0, π}` selects a diameter; `β ∈ {π/2, 3π/2}` a tangent.
pub fn chord_from_endpoint_angle<T: Scalar>(
    circle: Circle<T>,
    alpha: T,
    beta: T,
) -> Result<Chord<T>, Rejection> {
    chord_from_perimeter_turn(circle, alpha, -beta)
}

/// Chord made by a stick released at perimeter angle `psi` that falls in the
/// absolute direction `theta_fall`.
///
/// With `β′ = theta_fall − (psi + π)` wrapped to `(−π, π]`, the stick lands
/// across the circle only when `|β′| < π/2`.
pub fn chord_from_perimeter_fall<T: Scalar>(
    circle: Circle<T>,
    psi: T,
    theta_fall: T,
) -> Result<Chord<T>, Rejection> {
    let turn = fall_turn(psi, theta_fall);
    if turn.abs() >= T::FRAC_PI_2() {
        return Err(Rejection::FellOutside);
    }
    chord_from_perimeter_turn(circle, psi, turn)
}

/// Fall direction relative to the inward diameter at the release point,
/// wrapped to `(−π, π]`.
pub fn fall_turn<T: Scalar>(psi: T, theta_fall: T) -> T {
    wrap_signed_pi(theta_fall - (psi + T::PI()))
}

/// Rotates the center about the global origin, then translates it; scales
/// the radius about the circle's own center.
pub fn transform_circle<T: Scalar>(
    circle: Circle<T>,
    rotation: T,
    scale: T,
    translation: Point2<T>,
) -> Result<Circle<T>, GeometryError> {
    if !(scale.is_finite() && scale > T::zero()) {
        return Err(GeometryError::BadScale(scale.as_f64()));
    }
    Circle::new(
        circle.center.rotate(rotation).add(translation),
        circle.radius * scale,
    )
}
