use std::f64::consts::{FRAC_PI_2, PI, TAU};

use bertrand_core::geometry::{chord_from_line, Circle, Line, Point2};
use bertrand_core::montecarlo::EngineConfig;
use bertrand_core::rng::RngStream;
use bertrand_core::samplers::{Method, SampleResult};
use bertrand_core::symmetry::{
    concentric_scale_test_with, dart_line, rotation_test_with, run_action, spinner_axis_test_with,
    straw_midpoint, tangent_scale_test_offset, tangent_translation_test_with,
    translation_shared_lines_test_with, translation_shared_points_test_with, GroupAction,
    SymmetryReport, Verdict,
};

const SEEDS: u64 = 30;

fn cfg(method: Method, n: u64, seed: u64) -> EngineConfig<f64> {
    EngineConfig::new(method, n, seed).with_workers(8)
}

fn all_violated(label: &str, run: impl Fn(u64) -> SymmetryReport) {
    for seed in 0..SEEDS {
        let r = run(1_000 + seed);
        assert_eq!(r.verdict, Verdict::Violated, "{label}, seed {seed}: {r:?}");
    }
}

#[test]
fn biased_controls_are_flagged_on_every_seed() {
    let n = 100_000;
    let circle = Circle::<f64>::unit();
    let quarter_turn = |c: &Circle<f64>, rng: &mut RngStream| -> SampleResult<f64> {
        let phi = rng.uniform_in(0.0, FRAC_PI_2);
        chord_from_line(*c, Line::new(rng.uniform_in(-1.0, 1.0) * c.radius(), phi)).into()
    };
    all_violated("rotation, quarter-turn lines", |s| {
        rotation_test_with(&quarter_turn, Method::Straw, 1.0, &cfg(Method::Straw, n, s)).unwrap()
    });
    all_violated("concentric, spinner midpoints", |s| {
        concentric_scale_test_with(&Method::Spinner, Method::Spinner, 0.5, &cfg(Method::Spinner, n, s)).unwrap()
    });
    all_violated("shared lines, dart lines", |s| {
        translation_shared_lines_test_with(&|rng: &mut RngStream| dart_line(&circle, rng), Method::Dart, 0.3, &cfg(Method::Dart, n, s))
            .unwrap()
    });
    all_violated("shared points, straw midpoints", |s| {
        translation_shared_points_test_with(&|rng: &mut RngStream| straw_midpoint(&circle, rng), Method::Straw, 0.4, &cfg(Method::Straw, n, s))
            .unwrap()
    });
    all_violated("tangent scale, offset circle", |s| {
        tangent_scale_test_offset(0.5, Point2::new(0.0, 0.2), &cfg(Method::Stick, n, s)).unwrap()
    });
    let cosine_fall = |rng: &mut RngStream| -> (f64, f64) {
        let psi = rng.uniform_in(0.0, TAU);
        (psi, psi + PI + (2.0 * rng.next_uniform() - 1.0).asin())
    };
    all_violated("tangent translation, arcsine fall", |s| {
        tangent_translation_test_with(&cosine_fall, 0.3, &cfg(Method::Stick, n, s)).unwrap()
    });
    let half_beta = |rng: &mut RngStream| -> (f64, f64) { (rng.uniform_in(0.0, TAU), rng.uniform_in(0.0, PI)) };
    all_violated("spinner axis, half-range beta", |s| {
        spinner_axis_test_with(&half_beta, 1.0, 2.0, &cfg(Method::Spinner, n, s)).unwrap()
    });
}

#[test]
fn sanctioned_pairs_are_invariant_at_a_million() {
    let n = 1_000_000;
    let mut cases: Vec<(Method, GroupAction)> = Method::ALL
        .iter()
        .map(|&m| (m, GroupAction::Rotation { angle: 1.0 }))
        .collect();
    for m in [Method::Straw, Method::RadiusPoint, Method::Dart] {
        cases.push((m, GroupAction::ConcentricScale { a: 0.5 }));
    }
    cases.extend([
        (Method::Straw, GroupAction::TranslationSharedLines { b: 0.3 }),
        (Method::Dart, GroupAction::TranslationSharedPoints { b: 0.4 }),
        (Method::Stick, GroupAction::TangentScale { a: 0.5 }),
        (Method::Stick, GroupAction::TangentTranslation { phi: 0.3 }),
        (Method::Spinner, GroupAction::SpinnerAxis { theta_shift: 1.0, phi_shift: 2.0 }),
    ]);
    for (m, action) in cases {
        let r = run_action(m, action, &cfg(m, n, 77)).unwrap();
        assert_eq!(r.verdict, Verdict::Invariant, "{m} {action}: {r:?}");
    }
}

#[test]
fn false_alarms_are_rare_across_seeds() {
    let n = 100_000;
    for (m, action) in [
        (Method::Straw, GroupAction::Rotation { angle: 1.0 }),
        (Method::Dart, GroupAction::ConcentricScale { a: 0.7 }),
        (Method::Stick, GroupAction::TangentTranslation { phi: 0.3 }),
    ] {
        let alarms = (0..SEEDS)
            .filter(|&s| run_action(m, action, &cfg(m, n, 5_000 + s)).unwrap().verdict == Verdict::Violated)
            .count();
        assert!(alarms <= 1, "{m} {action}: {alarms} of {SEEDS} seeds flagged");
    }
}
