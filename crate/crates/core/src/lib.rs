//! Monte Carlo laboratory for Bertrand's chord paradox.
//!
//! Five chord-selection procedures ([`samplers::Method`]), their exact
//! probabilities and density families ([`analytic`]), a deterministic
//! parallel estimator ([`montecarlo`]), goodness-of-fit statistics
//! ([`stats`]) and per-procedure transformation-group tests ([`symmetry`]).
//!
//! Geometry, densities and sampling are generic over [`scalar::Scalar`]
//! (`f32` or `f64`); the aliases below fix the common choices. Exact
//! probabilities are rationals.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod geometry;
pub mod montecarlo;
pub mod rng;
pub mod samplers;
pub mod scalar;
pub mod stats;
pub mod symmetry;

pub use analytic::{bertrand_probability, AngularKind, AngularPdf, QFamily};
pub use geometry::{Chord, Circle, Line, Point2, Rejection};
pub use montecarlo::{EngineConfig, Estimate};
pub use rng::RngStream;
pub use samplers::{Method, SampleResult};
pub use scalar::Scalar;
pub use symmetry::{GroupAction, SymmetryReport, Verdict};

/// Exact probabilities.
pub type Probability = num_rational::Ratio<u32>;

pub type Point64 = Point2<f64>;
pub type Circle64 = Circle<f64>;
pub type Chord64 = Chord<f64>;
pub type Line64 = Line<f64>;
pub type QFamily64 = QFamily<f64>;
pub type EngineConfig64 = EngineConfig<f64>;

pub type Point32 = Point2<f32>;
pub type Circle32 = Circle<f32>;
pub type Chord32 = Chord<f32>;
pub type Line32 = Line<f32>;
pub type QFamily32 = QFamily<f32>;
pub type EngineConfig32 = EngineConfig<f32>;
