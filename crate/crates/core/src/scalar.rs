//! Scalar abstraction shared by the geometry, density and sampling code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the library computes in: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Infallible for the supported float types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Wraps an angle into `[0, 2π)`.
///
/// Exact multiples of 2π map to 0. Rounding can push a tiny negative input to
/// exactly 2π; that case is folded back to 0 so the half-open range holds.
pub fn wrap_two_pi<T: Scalar>(angle: T) -> T {
    let tau = T::TAU();
    let mut a = angle % tau;
    if a < T::zero() {
        a = a + tau;
    }
    if a >= tau {
        a = T::zero();
    }
    a
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_signed_pi<T: Scalar>(angle: T) -> T {
    let pi = T::PI();
    let a = wrap_two_pi(angle);
    if a > pi {
        a - T::TAU()
    } else {
        a
    }
}

/// Folds a line direction into `(-π/2, π/2]`, identifying `x` with `x + π`.
pub fn fold_half_turn<T: Scalar>(angle: T) -> T {
    let pi = T::PI();
    let half = T::FRAC_PI_2();
    let mut a = angle - pi * (angle / pi).round();
    if a <= -half {
        a = a + pi;
    } else if a > half {
        a = a - pi;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn wrap_two_pi_range() {
        assert_eq!(wrap_two_pi(0.0_f64), 0.0);
        assert_eq!(wrap_two_pi(TAU), 0.0);
        assert_eq!(wrap_two_pi(-TAU), 0.0);
        assert!((wrap_two_pi(-0.5_f64) - (TAU - 0.5)).abs() < 1e-15);
        assert!((wrap_two_pi(7.0_f64) - (7.0 - TAU)).abs() < 1e-15);
        let tiny = wrap_two_pi(-1e-300_f64);
        assert!((0.0..TAU).contains(&tiny));
    }

    #[test]
    fn wrap_signed_pi_range() {
        assert_eq!(wrap_signed_pi(PI), PI);
        assert!((wrap_signed_pi(-PI) - PI).abs() < 1e-15);
        assert!((wrap_signed_pi(1.5 * PI) + 0.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn fold_half_turn_identifies_opposite_directions() {
        assert_eq!(fold_half_turn(PI), 0.0);
        assert_eq!(fold_half_turn(0.0_f64), 0.0);
        assert!((fold_half_turn(PI + 0.3) - 0.3).abs() < 1e-15);
        assert!((fold_half_turn(3.0 * FRAC_PI_2).abs() - FRAC_PI_2).abs() < 1e-15);
        for k in 0..100 {
            let x = -10.0 + 0.2 * k as f64;
            let f = fold_half_turn(x);
            assert!(f > -FRAC_PI_2 - 1e-15 && f <= FRAC_PI_2 + 1e-15);
        }
    }

    #[test]
    fn f32_works() {
        assert!((wrap_two_pi(-1.0_f32) - (std::f32::consts::TAU - 1.0)).abs() < 1e-6);
    }
}
