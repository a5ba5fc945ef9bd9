use std::f64::consts::{PI, TAU};

use bertrand_core::analytic::{long_chord_probability_from_q, QFamily};
use bertrand_core::geometry::{
    chord_from_endpoint_angle, chord_from_line, chord_from_midpoint, transform_circle, Circle,
    Line, Point2,
};
use bertrand_core::montecarlo::{run_estimate, run_histogram, uniform_edges, EngineConfig};
use bertrand_core::rng::RngStream;
use bertrand_core::samplers::Method;
use proptest::prelude::*;

fn circle() -> impl Strategy<Value = Circle<f64>> {
    (-5.0f64..5.0, -5.0f64..5.0, 0.1f64..10.0)
        .prop_map(|(x, y, r)| Circle::new(Point2::new(x, y), r).unwrap())
}

fn method() -> impl Strategy<Value = Method> {
    prop::sample::select(Method::ALL.to_vec())
}

proptest! {
    #[test]
    fn length_strictly_inside_diameter(c in circle(), rel in 1e-9f64..0.999_999, theta in 0.0f64..TAU) {
        let chord = chord_from_midpoint(c, rel * c.radius(), theta).unwrap();
        let len = chord.length();
        prop_assert!(len > 0.0 && len < 2.0 * c.radius());
    }

    #[test]
    fn three_way_side_consistency(c in circle(), rel in 0.001f64..0.999, theta in 0.0f64..TAU) {
        // skip a thin band where the length comparison is decided by rounding
        prop_assume!((rel - 0.5).abs() > 1e-9);
        let chord = chord_from_midpoint(c, rel * c.radius(), theta).unwrap();
        let by_length = chord.length() > 3f64.sqrt() * c.radius();
        let by_midpoint = chord.r() < c.radius() / 2.0;
        prop_assert_eq!(chord.is_longer_than_side(), by_length);
        prop_assert_eq!(chord.is_longer_than_side(), by_midpoint);
    }

    #[test]
    fn line_through_endpoints_round_trips(c in circle(), rel in 0.01f64..0.99, theta in 0.0f64..TAU) {
        let chord = chord_from_midpoint(c, rel * c.radius(), theta).unwrap();
        let (p, q) = chord.endpoints();
        let back = chord_from_line(c, Line::through(p, q)).unwrap();
        // 1e-12 relative to the circle scale
        prop_assert!((back.r() - chord.r()).abs() <= 1e-12 * c.radius().max(c.center().norm()));
        let dtheta = (back.theta() - chord.theta()).abs();
        prop_assert!(dtheta.min(TAU - dtheta) < 1e-9);
    }

    #[test]
    fn four_angle_pairs_share_a_chord(alpha in 0.0f64..TAU, beta in 0.05f64..(PI / 2.0 - 0.05)) {
        let c = Circle::unit();
        let base = chord_from_endpoint_angle(c, alpha, beta).unwrap();
        let pairs = [
            (alpha, beta + PI),
            (PI + alpha - 2.0 * beta, -beta),
            (PI + alpha - 2.0 * beta, PI - beta),
        ];
        for (a, b) in pairs {
            let other = chord_from_endpoint_angle(c, a, b).unwrap();
            prop_assert!((other.r() - base.r()).abs() < 1e-12);
            let d = (other.theta() - base.theta()).abs();
            prop_assert!(d.min(TAU - d) < 1e-9);
        }
    }

    #[test]
    fn rigid_motions_keep_length_and_scaling_scales_it(
        c in circle(), rel in 0.01f64..0.99, theta in 0.0f64..TAU,
        rot in -10.0f64..10.0, tx in -3.0f64..3.0, ty in -3.0f64..3.0, k in 0.1f64..10.0,
    ) {
        let chord = chord_from_midpoint(c, rel * c.radius(), theta).unwrap();
        let moved = chord.transformed(rot, 1.0, Point2::new(tx, ty)).unwrap();
        prop_assert!((moved.length() - chord.length()).abs() < 1e-9 * chord.length().max(1.0));
        let scaled = chord.transformed(0.0, k, Point2::origin()).unwrap();
        prop_assert!((scaled.length() - k * chord.length()).abs() < 1e-9 * k * chord.length().max(1.0));
        let moved_circle = transform_circle(c, rot, 1.0, Point2::new(tx, ty)).unwrap();
        prop_assert_eq!(moved_circle.radius(), c.radius());
    }

    #[test]
    fn samplers_are_reproducible(m in method(), seed in any::<u64>(), c in circle()) {
        let mut a = RngStream::new(seed);
        let mut b = RngStream::new(seed);
        for _ in 0..50 {
            prop_assert_eq!(m.sample(&c, &mut a), m.sample(&c, &mut b));
        }
    }

    #[test]
    fn accepted_chords_are_valid(m in method(), seed in any::<u64>(), c in circle()) {
        let mut rng = RngStream::new(seed);
        for _ in 0..200 {
            if let Some(ch) = m.sample(&c, &mut rng).chord() {
                prop_assert!(ch.r() > 0.0 && ch.r() < c.radius());
            }
        }
    }

    #[test]
    fn length_cdf_is_a_cdf(q in 0.2f64..5.0, radius in 0.1f64..10.0) {
        let f = QFamily::new(q, radius).unwrap();
        prop_assert_eq!(f.chord_length_cdf(0.0).unwrap(), 0.0);
        prop_assert!((f.chord_length_cdf(2.0 * radius).unwrap() - 1.0).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 0..=200 {
            let v = f.chord_length_cdf((2.0 * radius * i as f64 / 200.0).min(2.0 * radius)).unwrap();
            prop_assert!(v >= prev);
            prev = v;
        }
        let complement = 1.0 - f.chord_length_cdf(3f64.sqrt() * radius).unwrap();
        prop_assert!((complement - long_chord_probability_from_q(q)).abs() < 1e-12);
    }

    #[test]
    fn estimates_ignore_worker_count(m in method(), seed in any::<u64>(), n in 1u64..20_000, w in 2usize..9) {
        let one = EngineConfig::<f64>::new(m, n, seed);
        let many = one.with_workers(w);
        let longer = |c: &bertrand_core::Chord<f64>| c.is_longer_than_side();
        prop_assert_eq!(run_estimate(&one, longer).ok(), run_estimate(&many, longer).ok());
    }

    #[test]
    fn histogram_conserves_trials(m in method(), seed in any::<u64>(), n in 1u64..10_000, bins in 1usize..40) {
        let config = EngineConfig::<f64>::new(m, n, seed).with_workers(3);
        let h = run_histogram(&config, |c| c.length(), &uniform_edges(0.0, 2.0, bins)).unwrap();
        prop_assert_eq!(h.counts.iter().sum::<u64>() + h.rejected + h.out_of_range, n);
        prop_assert_eq!(h.out_of_range, 0);
    }
}
