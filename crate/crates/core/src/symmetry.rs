//! Transformation-group invariance tests.
//!
//! Each selection procedure carries its own meaning of "the same problem
//! after a rotation, rescaling or translation". A [`GroupAction`] records
//! which procedures it is meaningful for; applying it elsewhere is a usage
//! error. Every test returns a [`SymmetryReport`] whose verdict is
//! [`Verdict::Invariant`] iff all of its component tests pass at
//! [`SYMMETRY_THRESHOLD`].
//!
//! The `_with` variants accept an arbitrary law in place of the procedure,
//! which is how the biased controls are run.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::ops::{Add, Sub};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{
    chord_from_line, chord_from_perimeter_fall, fall_turn, Chord, Circle, Line, Point2,
};
use crate::montecarlo::{collect_chords, collect_trials, EngineConfig, EngineError};
use crate::rng::{derive_seed, RngStream};
use crate::samplers::{random_line, sample_dart, sample_straw, spinner_angles, stick_release, ChordLaw, Method};
use crate::scalar::{fold_half_turn, wrap_two_pi, Scalar};
use crate::stats::{self, StatsError};

/// Significance level shared by every statistical component.
pub const SYMMETRY_THRESHOLD: f64 = 1e-3;

/// Fewest samples a statistical comparison will run on.
pub const MIN_SAMPLES: usize = 1000;

/// Rings and sectors of the region grid; rings have equal area.
pub const GRID_RINGS: usize = 8;
pub const GRID_SECTORS: usize = 8;

const ROTATION_BINS: usize = 36;
const FRESH_RUN_TAG: u64 = 0x5CA1E;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupAction {
    Rotation { angle: f64 },
    ConcentricScale { a: f64 },
    TranslationSharedLines { b: f64 },
    TranslationSharedPoints { b: f64 },
    TangentScale { a: f64 },
    TangentTranslation { phi: f64 },
    SpinnerAxis { theta_shift: f64, phi_shift: f64 },
}

impl GroupAction {
    pub const NAMES: [&'static str; 7] = [
        "rotation",
        "concentric-scale",
        "shared-lines",
        "shared-points",
        "tangent-scale",
        "tangent-translation",
        "spinner-axis",
    ];

    /// Builds an action from its command-line name. Only `spinner-axis`
    /// reads `param2`.
    pub fn from_name(name: &str, param: f64, param2: f64) -> Result<Self, SymmetryError> {
        Ok(match name {
            "rotation" => GroupAction::Rotation { angle: param },
            "concentric-scale" => GroupAction::ConcentricScale { a: param },
            "shared-lines" => GroupAction::TranslationSharedLines { b: param },
            "shared-points" => GroupAction::TranslationSharedPoints { b: param },
            "tangent-scale" => GroupAction::TangentScale { a: param },
            "tangent-translation" => GroupAction::TangentTranslation { phi: param },
            "spinner-axis" => GroupAction::SpinnerAxis {
                theta_shift: param,
                phi_shift: param2,
            },
            other => {
                return Err(SymmetryError::Precondition(format!(
                    "unknown action {other:?}; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GroupAction::Rotation { .. } => "rotation",
            GroupAction::ConcentricScale { .. } => "concentric-scale",
            GroupAction::TranslationSharedLines { .. } => "shared-lines",
            GroupAction::TranslationSharedPoints { .. } => "shared-points",
            GroupAction::TangentScale { .. } => "tangent-scale",
            GroupAction::TangentTranslation { .. } => "tangent-translation",
            GroupAction::SpinnerAxis { .. } => "spinner-axis",
        }
    }

    pub fn applicable_methods(&self) -> &'static [Method] {
        match self {
            GroupAction::Rotation { .. } => &Method::ALL,
            GroupAction::ConcentricScale { .. } => &[Method::Straw, Method::RadiusPoint, Method::Dart],
            GroupAction::TranslationSharedLines { .. } => &[Method::Straw],
            GroupAction::TranslationSharedPoints { .. } => &[Method::Dart],
            GroupAction::TangentScale { .. } | GroupAction::TangentTranslation { .. } => &[Method::Stick],
            GroupAction::SpinnerAxis { .. } => &[Method::Spinner],
        }
    }

    pub fn applies_to(&self, method: Method) -> bool {
        self.applicable_methods().contains(&method)
    }

    /// Why the action is restricted to its methods.
    pub fn applicability_rule(&self) -> &'static str {
        match self {
            GroupAction::Rotation { .. } => "rotation about the center applies to every procedure",
            GroupAction::ConcentricScale { .. } => {
                "concentric rescaling needs a procedure whose chords of the smaller circle are the \
                 chords of the larger one with midpoint inside it (straw, radius-point, dart); \
                 the stick's circles must be tangent and the spinner's endpoint lies on the rim"
            }
            GroupAction::TranslationSharedLines { .. } => {
                "shared-lines translation requires a common line ensemble cutting both circles, \
                 which only the straw procedure provides"
            }
            GroupAction::TranslationSharedPoints { .. } => {
                "shared-points translation requires a common point ensemble serving as midpoints \
                 in both circles, which only the dart procedure provides"
            }
            GroupAction::TangentScale { .. } | GroupAction::TangentTranslation { .. } => {
                "tangent-circle actions keep the release point on both perimeters and only make \
                 sense for the stick procedure"
            }
            GroupAction::SpinnerAxis { .. } => {
                "axis shifts act on the spinner's (alpha, beta) angles; translation carries no \
                 information once the center is fixed"
            }
        }
    }
}

impl fmt::Display for GroupAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestKind {
    #[serde(rename = "KS")]
    Ks,
    ChiSq,
    ExactPerSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Invariant,
    Violated,
}

/// One statistical comparison inside a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestComponent {
    pub label: String,
    pub test: TestKind,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub n: u64,
}

impl TestComponent {
    fn ks(label: &str, r: stats::KsResult) -> Self {
        Self {
            label: label.into(),
            test: TestKind::Ks,
            statistic: r.statistic,
            p_value: Some(r.p_value),
            n: r.n as u64,
        }
    }

    fn chi(label: &str, r: stats::ChiSqResult, n: u64) -> Self {
        Self {
            label: label.into(),
            test: TestKind::ChiSq,
            statistic: r.statistic,
            p_value: Some(r.p_value),
            n,
        }
    }

    pub fn passes(&self, threshold: f64) -> bool {
        match self.p_value {
            Some(p) => p > threshold,
            None => self.statistic == 0.0,
        }
    }
}

/// Count of midpoints in one ring sector `[r_lo, r_hi) × [theta_lo, theta_hi)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionTally {
    /// 0 for the original circle, 1 for the translated one.
    pub frame: u8,
    pub r_lo: f64,
    pub r_hi: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub count: u64,
    pub total: u64,
}

/// Tallies `(r, θ)` pairs over the equal-area grid of a radius-`radius`
/// disk. Pairs with `r ≥ radius` are ignored.
pub fn region_tallies(frame: u8, radius: f64, points: &[(f64, f64)]) -> Vec<RegionTally> {
    let mut counts = vec![0u64; GRID_RINGS * GRID_SECTORS];
    let mut total = 0;
    for &(r, theta) in points {
        let ring = ((r / radius).powi(2) * GRID_RINGS as f64) as usize;
        let sector = (wrap_two_pi(theta) / TAU * GRID_SECTORS as f64) as usize;
        if ring < GRID_RINGS {
            counts[ring * GRID_SECTORS + sector.min(GRID_SECTORS - 1)] += 1;
            total += 1;
        }
    }
    let ring_edge = |k: usize| radius * (k as f64 / GRID_RINGS as f64).sqrt();
    let sector_edge = |k: usize| TAU * k as f64 / GRID_SECTORS as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            let (ring, sector) = (i / GRID_SECTORS, i % GRID_SECTORS);
            RegionTally {
                frame,
                r_lo: ring_edge(ring),
                r_hi: ring_edge(ring + 1),
                theta_lo: sector_edge(sector),
                theta_hi: sector_edge(sector + 1),
                count,
                total,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub action: GroupAction,
    pub method: Method,
    /// Kind, statistic and p-value of the weakest component.
    pub test: TestKind,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub threshold: f64,
    pub verdict: Verdict,
    pub n_samples: u64,
    pub components: Vec<TestComponent>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<RegionTally>,
}

impl SymmetryReport {
    fn new(action: GroupAction, method: Method, n_samples: u64, components: Vec<TestComponent>) -> Self {
        let threshold = SYMMETRY_THRESHOLD;
        let weakest = components
            .iter()
            .min_by(|a, b| {
                let key = |c: &TestComponent| match c.p_value {
                    Some(p) => p,
                    None if c.statistic == 0.0 => 1.0,
                    None => -1.0,
                };
                key(a).total_cmp(&key(b))
            })
            .expect("report has at least one component")
            .clone();
        let verdict = if components.iter().all(|c| c.passes(threshold)) {
            Verdict::Invariant
        } else {
            Verdict::Violated
        };
        Self {
            action,
            method,
            test: weakest.test,
            statistic: weakest.statistic,
            p_value: weakest.p_value,
            threshold,
            verdict,
            n_samples,
            components,
            regions: Vec::new(),
        }
    }

    pub fn is_invariant(&self) -> bool {
        self.verdict == Verdict::Invariant
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("inconclusive: {got} usable samples, at least {needed} required")]
    Inconclusive { needed: usize, got: usize },
    #[error("{action} is not applicable to {method}: {rule}")]
    NotApplicable {
        action: &'static str,
        method: Method,
        rule: &'static str,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), SymmetryError> {
    if ok {
        Ok(())
    } else {
        Err(SymmetryError::Precondition(msg()))
    }
}

fn enough(got: usize) -> Result<(), SymmetryError> {
    if got < MIN_SAMPLES {
        return Err(SymmetryError::Inconclusive {
            needed: MIN_SAMPLES,
            got,
        });
    }
    Ok(())
}

fn check_applicable(action: &GroupAction, method: Method) -> Result<(), SymmetryError> {
    if action.applies_to(method) {
        Ok(())
    } else {
        Err(SymmetryError::NotApplicable {
            action: action.name(),
            method,
            rule: action.applicability_rule(),
        })
    }
}

fn uniform_counts(values: impl Iterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for v in values {
        let i = ((v - lo) / (hi - lo) * bins as f64) as usize;
        counts[i.min(bins - 1)] += 1;
    }
    counts
}

/// Runs the test named by `action` for `method`, rejecting pairs outside
/// the action's applicability set.
pub fn run_action<T: Scalar>(
    method: Method,
    action: GroupAction,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError> {
    check_applicable(&action, method)?;
    let config = EngineConfig { method, ..*config };
    match action {
        GroupAction::Rotation { angle } => rotation_test(method, angle, &config),
        GroupAction::ConcentricScale { a } => concentric_scale_test(method, a, &config),
        GroupAction::TranslationSharedLines { b } => translation_shared_lines_test(b, &config),
        GroupAction::TranslationSharedPoints { b } => translation_shared_points_test(b, &config),
        GroupAction::TangentScale { a } => tangent_scale_test(a, &config),
        GroupAction::TangentTranslation { phi } => tangent_translation_test(phi, &config),
        GroupAction::SpinnerAxis {
            theta_shift,
            phi_shift,
        } => spinner_axis_test(theta_shift, phi_shift, &config),
    }
}

/// Midpoint direction θ is uniform, and matches its own rotation by `alpha`.
pub fn rotation_test<T: Scalar>(
    method: Method,
    alpha: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError> {
    rotation_test_with(&method, method, alpha, config)
}

pub fn rotation_test_with<T: Scalar, L: ChordLaw<T> + ?Sized>(
    law: &L,
    method: Method,
    alpha: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError> {
    require(alpha.is_finite(), || format!("rotation angle must be finite, got {alpha}"))?;
    config.validate()?;
    let theta: Vec<f64> = collect_chords(config, law)
        .iter()
        .map(|c| c.theta().as_f64())
        .collect();
    enough(theta.len())?;
    let rotated: Vec<f64> = theta.iter().map(|&t| wrap_two_pi(t + alpha)).collect();
    let counts = uniform_counts(theta.iter().copied(), 0.0, TAU, ROTATION_BINS);
    let chi = stats::chi_square_gof(&counts, &vec![1.0 / ROTATION_BINS as f64; ROTATION_BINS])?;
    let ks = stats::ks_two_sample(&theta, &rotated)?;
    let n = theta.len() as u64;
    Ok(SymmetryReport::new(
        GroupAction::Rotation { angle: alpha },
        method,
        n,
        vec![
            TestComponent::chi("theta_uniform", chi, n),
            TestComponent::ks("theta_vs_rotated", ks),
        ],
    ))
}

/// Midpoints inside the concentric circle of radius `aR`, rescaled by
/// `1/a`, against a fresh run on the full circle.
pub fn concentric_scale_test<T: Scalar>(
    method: Method,
    a: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError> {
    let action = GroupAction::ConcentricScale { a };
    check_applicable(&action, method)?;
    concentric_scale_test_with(&method, method, a, config)
}

pub fn concentric_scale_test_with<T: Scalar, L: ChordLaw<T> + ?Sized>(
    law: &L,
    method: Method,
    a: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError> {
    require(a > 0.0 && a < 1.0, || format!("scale factor must lie in (0, 1), got {a}"))?;
    config.validate()?;
    let inner: Vec<f64> = collect_chords(config, law)
        .iter()
        .map(|c| c.relative_r().as_f64())
        .filter(|&x| x < a)
        .map(|x| x / a)
        .collect();
    enough(inner.len())?;
    let fresh_config = config.with_seed(derive_seed(config.seed, FRESH_RUN_TAG));
    let fresh: Vec<f64> = collect_chords(&fresh_config, law)
        .iter()
        .map(|c| c.relative_r().as_f64())
        .collect();
    enough(fresh.len())?;
    let ks = stats::ks_two_sample(&inner, &fresh)?;
    Ok(SymmetryReport::new(
        GroupAction::ConcentricScale { a },
        method,
        inner.len() as u64,
        vec![TestComponent::ks("rescaled_r_vs_fresh", ks)],
    ))
}

fn translated<T: Scalar>(circle: &Circle<T>, b: f64) -> Circle<T> {
    Circle::new(circle.center().add(Point2::new(T::lit(b), T::zero())), circle.radius())
        .expect("translated circle keeps its radius")
}

/// One global straw ensemble over the smallest window centered between
/// both circles; compares the `(r, θ)` laws of the chords it cuts in each.
pub fn translation_shared_lines_test<T: Scalar>(
    b: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError> {
    let half_width = config.circle.radius().as_f64() + b.abs() / 2.0;
    translation_shared_lines_test_in_window(b, half_width, config)
}

/// As [`translation_shared_lines_test`] with an explicit window half-width,
/// which must cover both circles.
pub fn translation_shared_lines_test_in_window<T: Scalar>(
    b: f64,
    half_width: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError> {
    let radius = config.circle.radius().as_f64();
    let needed = radius + b.abs() / 2.0;
    require(half_width >= needed, || {
        format!("line window half-width {half_width} does not cover both circles (needs {needed})")
    })?;
    let center = config
        .circle
        .center()
        .add(Point2::new(T::lit(b / 2.0), T::zero()));
    let w = T::lit(half_width);
    translation_shared_lines_test_with(
        &|rng: &mut RngStream| Some(random_line(center, w, rng)),
        Method::Straw,
        b,
        config,
    )
}

/// Shared-lines comparison for an arbitrary line law.
pub fn translation_shared_lines_test_with<T, F>(
    lines: &F,
    method: Method,
    b: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError>
where
    T: Scalar,
    F: Fn(&mut RngStream) -> Option<Line<T>> + Sync,
{
    let radius = config.circle.radius().as_f64();
    require(b >= 0.0 && b < radius, || {
        format!("offset must lie in [0, R) = [0, {radius}), got {b}")
    })?;
    config.validate()?;
    let c0 = config.circle;
    let c1 = translated(&c0, b);
    let polar = |c: &Chord<T>| (c.relative_r().as_f64(), c.theta().as_f64());
    let pairs = collect_trials(config.seed, config.n_trials, config.n_workers, |rng| {
        lines(rng).map(|line| {
            (
                chord_from_line(c0, line).ok().map(|c| polar(&c)),
                chord_from_line(c1, line).ok().map(|c| polar(&c)),
            )
        })
    });
    let (s0, s1): (Vec<_>, Vec<_>) = (
        pairs.iter().flatten().filter_map(|p| p.0).collect(),
        pairs.iter().flatten().filter_map(|p| p.1).collect(),
    );
    enough(s0.len().min(s1.len()))?;
    let split = |s: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>) { s.iter().copied().unzip() };
    let ((r0, t0), (r1, t1)) = (split(&s0), split(&s1));
    let ks_r = stats::ks_two_sample(&r0, &r1)?;
    let ks_t = stats::ks_two_sample(&t0, &t1)?;
    Ok(SymmetryReport::new(
        GroupAction::TranslationSharedLines { b },
        method,
        s0.len().min(s1.len()) as u64,
        vec![TestComponent::ks("r_original_vs_translated", ks_r), TestComponent::ks("theta_original_vs_translated", ks_t)],
    ))
}

/// One global uniform point ensemble over a box covering both circles; the
/// points inside each circle, read as midpoints relative to that circle,
/// must have constant density on its region grid.
pub fn translation_shared_points_test<T: Scalar>(
    b: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError> {
    let c = config.circle.center();
    let radius = config.circle.radius().as_f64();
    let (x0, y0) = (c.x.as_f64() - radius, c.y.as_f64() - radius);
    let (w, h) = (2.0 * radius + b.abs(), 2.0 * radius);
    translation_shared_points_test_with(
        &|rng: &mut RngStream| {
            let x = rng.uniform_in(x0, x0 + w);
            let y = rng.uniform_in(y0, y0 + h);
            Some(Point2::new(T::lit(x), T::lit(y)))
        },
        Method::Dart,
        b,
        config,
    )
}

/// Shared-points comparison for an arbitrary point law.
pub fn translation_shared_points_test_with<T, F>(
    points: &F,
    method: Method,
    b: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError>
where
    T: Scalar,
    F: Fn(&mut RngStream) -> Option<Point2<T>> + Sync,
{
    let radius = config.circle.radius().as_f64();
    require(b >= 0.0 && b < 2.0 * radius, || {
        format!("offset must lie in [0, 2R) = [0, {}) for the circles to overlap, got {b}", 2.0 * radius)
    })?;
    config.validate()?;
    let c0 = config.circle;
    let c1 = translated(&c0, b);
    let relative = |circle: &Circle<T>, p: Point2<T>| {
        let v = p.sub(circle.center());
        let r = v.norm().as_f64();
        (r < radius).then(|| (r, wrap_two_pi(v.angle().as_f64())))
    };
    let pairs = collect_trials(config.seed, config.n_trials, config.n_workers, |rng| {
        points(rng).map(|p| (relative(&c0, p), relative(&c1, p)))
    });
    let s0: Vec<(f64, f64)> = pairs.iter().flatten().filter_map(|p| p.0).collect();
    let s1: Vec<(f64, f64)> = pairs.iter().flatten().filter_map(|p| p.1).collect();
    enough(s0.len().min(s1.len()))?;
    let cells = GRID_RINGS * GRID_SECTORS;
    let flat = vec![1.0 / cells as f64; cells];
    let mut components = Vec::new();
    let mut regions = Vec::new();
    for (frame, sample) in [(0u8, &s0), (1u8, &s1)] {
        let tallies = region_tallies(frame, radius, sample);
        let counts: Vec<u64> = tallies.iter().map(|t| t.count).collect();
        let chi = stats::chi_square_gof(&counts, &flat)?;
        let label = if frame == 0 { "grid_original" } else { "grid_translated" };
        components.push(TestComponent::chi(label, chi, sample.len() as u64));
        regions.extend(tallies);
    }
    let mut report = SymmetryReport::new(
        GroupAction::TranslationSharedPoints { b },
        method,
        s0.len().min(s1.len()) as u64,
        components,
    );
    report.regions = regions;
    Ok(report)
}

/// Each stick fall also cuts the circle of radius `aR` tangent internally
/// at the release point; the long/short classification must agree for
/// every sample.
pub fn tangent_scale_test<T: Scalar>(
    a: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError> {
    require(a > 0.0 && a <= 1.0, || format!("scale factor must lie in (0, 1], got {a}"))?;
    config.validate()?;
    let big = config.circle;
    let scale = T::lit(a);
    let outcomes = collect_trials(config.seed, config.n_trials, config.n_workers, |rng| {
        let (psi, fall) = stick_release::<T>(rng);
        let p = big.perimeter_point(psi);
        let small = Circle::new(
            p.add(big.center().sub(p).scale(scale)),
            big.radius() * scale,
        )
        .expect("scaled circle is valid");
        match (
            chord_from_perimeter_fall(big, psi, fall),
            chord_from_perimeter_fall(small, psi, fall),
        ) {
            (Ok(x), Ok(y)) => Some(x.is_longer_than_side() != y.is_longer_than_side()),
            (Err(_), Err(_)) => None,
            _ => Some(true),
        }
    });
    exact_report(GroupAction::TangentScale { a }, &outcomes)
}

/// Control for [`tangent_scale_test`]: the small circle is moved by
/// `offset` away from tangency and the stick's line is intersected with it.
pub fn tangent_scale_test_offset<T: Scalar>(
    a: f64,
    offset: Point2<T>,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError> {
    require(a > 0.0 && a <= 1.0, || format!("scale factor must lie in (0, 1], got {a}"))?;
    config.validate()?;
    let big = config.circle;
    let scale = T::lit(a);
    let outcomes = collect_trials(config.seed, config.n_trials, config.n_workers, |rng| {
        let (psi, fall) = stick_release::<T>(rng);
        let p = big.perimeter_point(psi);
        let small = Circle::new(
            p.add(big.center().sub(p).scale(scale)).add(offset),
            big.radius() * scale,
        )
        .expect("scaled circle is valid");
        let x = chord_from_perimeter_fall(big, psi, fall).ok()?;
        let direction = Point2::from_polar(T::one(), fall);
        let line = Line::through(p, p.add(direction));
        Some(match chord_from_line(small, line) {
            Ok(y) => x.is_longer_than_side() != y.is_longer_than_side(),
            Err(_) => true,
        })
    });
    exact_report(GroupAction::TangentScale { a }, &outcomes)
}

fn exact_report(action: GroupAction, outcomes: &[Option<bool>]) -> Result<SymmetryReport, SymmetryError> {
    let n = outcomes.iter().flatten().count() as u64;
    let disagreements = outcomes.iter().flatten().filter(|&&d| d).count() as u64;
    Ok(SymmetryReport::new(
        action,
        Method::Stick,
        n,
        vec![TestComponent {
            label: "classification_disagreements".into(),
            test: TestKind::ExactPerSample,
            statistic: disagreements as f64,
            p_value: None,
            n,
        }],
    ))
}

/// The fall angle `β′` of accepted sticks against the same sample turned
/// by `phi` about the release point, wrapped back into `(−π/2, π/2]`.
pub fn tangent_translation_test<T: Scalar>(
    phi: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError> {
    tangent_translation_test_with(&stick_release::<T>, phi, config)
}

/// `release` returns the release angle and the absolute fall direction.
pub fn tangent_translation_test_with<T, F>(
    release: &F,
    phi: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError>
where
    T: Scalar,
    F: Fn(&mut RngStream) -> (T, T) + Sync,
{
    require(phi.abs() < FRAC_PI_2, || format!("shift must satisfy |phi| < pi/2, got {phi}"))?;
    config.validate()?;
    let falls = collect_trials(config.seed, config.n_trials, config.n_workers, |rng| {
        let (psi, fall) = release(rng);
        let turn = fall_turn(psi, fall).as_f64();
        (turn.abs() < FRAC_PI_2).then_some(turn)
    });
    let sample: Vec<f64> = falls.into_iter().flatten().collect();
    enough(sample.len())?;
    let shifted: Vec<f64> = sample.iter().map(|&t| fold_half_turn(t + phi)).collect();
    let ks = stats::ks_two_sample(&sample, &shifted)?;
    Ok(SymmetryReport::new(
        GroupAction::TangentTranslation { phi },
        Method::Stick,
        sample.len() as u64,
        vec![TestComponent::ks("fall_angle_vs_shifted", ks)],
    ))
}

/// The `(α, β)` sample against itself shifted to `(α − θ, β − φ)`: KS on
/// each marginal and a chi-square homogeneity test on an 8×8 grid.
pub fn spinner_axis_test<T: Scalar>(
    theta_shift: f64,
    phi_shift: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError> {
    spinner_axis_test_with(&spinner_angles::<T>, theta_shift, phi_shift, config)
}

pub fn spinner_axis_test_with<T, F>(
    angles: &F,
    theta_shift: f64,
    phi_shift: f64,
    config: &EngineConfig<T>,
) -> Result<SymmetryReport, SymmetryError>
where
    T: Scalar,
    F: Fn(&mut RngStream) -> (T, T) + Sync,
{
    require(theta_shift.is_finite() && phi_shift.is_finite(), || {
        "shifts must be finite".into()
    })?;
    config.validate()?;
    let pairs: Vec<(f64, f64)> = collect_trials(config.seed, config.n_trials, config.n_workers, |rng| {
        let (a, b) = angles(rng);
        (wrap_two_pi(a.as_f64()), wrap_two_pi(b.as_f64()))
    });
    enough(pairs.len())?;
    let shifted: Vec<(f64, f64)> = pairs
        .iter()
        .map(|&(a, b)| (wrap_two_pi(a - theta_shift), wrap_two_pi(b - phi_shift)))
        .collect();
    let (a0, b0): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    let (a1, b1): (Vec<f64>, Vec<f64>) = shifted.iter().copied().unzip();
    let grid = |s: &[(f64, f64)]| {
        let mut counts = vec![0u64; GRID_SECTORS * GRID_SECTORS];
        for &(a, b) in s {
            let i = ((a / TAU * GRID_SECTORS as f64) as usize).min(GRID_SECTORS - 1);
            let j = ((b / TAU * GRID_SECTORS as f64) as usize).min(GRID_SECTORS - 1);
            counts[i * GRID_SECTORS + j] += 1;
        }
        counts
    };
    let chi = stats::chi_square_homogeneity(&grid(&pairs), &grid(&shifted))?;
    let n = pairs.len() as u64;
    Ok(SymmetryReport::new(
        GroupAction::SpinnerAxis {
            theta_shift,
            phi_shift,
        },
        Method::Spinner,
        n,
        vec![
            TestComponent::ks("alpha_vs_shifted", stats::ks_two_sample(&a0, &a1)?),
            TestComponent::ks("beta_vs_shifted", stats::ks_two_sample(&b0, &b1)?),
            TestComponent::chi("grid_vs_shifted", chi, n),
        ],
    ))
}

/// Line of a dart-law chord in `circle`: the dart control for shared lines.
pub fn dart_line<T: Scalar>(circle: &Circle<T>, rng: &mut RngStream) -> Option<Line<T>> {
    sample_dart(circle, rng).chord().map(|c| c.line())
}

/// Midpoint of a straw-law chord in `circle`: the straw control for shared
/// points.
pub fn straw_midpoint<T: Scalar>(circle: &Circle<T>, rng: &mut RngStream) -> Option<Point2<T>> {
    sample_straw(circle, rng, false).chord().map(|c| c.midpoint())
}
