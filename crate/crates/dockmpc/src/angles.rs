//! Angle normalization helpers.
//!
//! Headings are stored in `[0, 2π)`; angle *differences* are reduced with
//! [`wrap_to_pm_pi`] (signed) or [`map_to_0_pi`] (magnitude) at the point of
//! use. Optimizer-facing code uses [`wrap_angle_smooth`], which produces the
//! same principal value through `atan2(sin, cos)` and therefore stays
//! differentiable for dual-number arguments.

use crate::ad::Scalar;
use std::f64::consts::{PI, TAU};

/// Wraps an angle into `[0, 2π)`. Panics on non-finite input.
#[inline]
pub fn wrap_to_2pi(a: f64) -> f64 {
    assert!(a.is_finite(), "cannot wrap non-finite angle {a}");
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Wraps an angle into `[-π, π)`. Panics on non-finite input.
#[inline]
pub fn wrap_to_pm_pi(a: f64) -> f64 {
    wrap_to_2pi(a + PI) - PI
}

/// Reduces an angle difference to its magnitude in `[0, π]`.
#[inline]
pub fn map_to_0_pi(a: f64) -> f64 {
    wrap_to_pm_pi(a).abs()
}

/// Principal value of an angle via `atan2(sin a, cos a)`, in `[-π, π]`.
///
/// Agrees with [`wrap_to_pm_pi`] except exactly on the branch cut (where it
/// may return +π instead of -π) and keeps a well-defined unit derivative,
/// which the discontinuous euclidean-remainder form cannot offer.
#[inline]
pub fn wrap_angle_smooth<S: Scalar>(a: S) -> S {
    a.sin().atan2(a.cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ad::Dual;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn wrap_to_2pi_range_and_identities() {
        assert_relative_eq!(wrap_to_2pi(-0.1), TAU - 0.1, epsilon = 1e-12);
        assert_relative_eq!(wrap_to_2pi(7.0), 7.0 - TAU, epsilon = 1e-12);
        assert_eq!(wrap_to_2pi(TAU), 0.0);
        assert_eq!(wrap_to_2pi(0.0), 0.0);
        assert_eq!(wrap_to_2pi(-1e-20), 0.0);
    }

    #[test]
    fn wrap_to_pm_pi_examples() {
        assert_relative_eq!(wrap_to_pm_pi(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-12);
        assert_relative_eq!(wrap_to_pm_pi(-3.0 * PI), -PI, epsilon = 1e-12);
        assert_relative_eq!(wrap_to_pm_pi(PI), -PI, epsilon = 1e-12);
        assert_relative_eq!(wrap_to_pm_pi(0.25), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn map_to_0_pi_examples() {
        assert_relative_eq!(map_to_0_pi(PI), PI, epsilon = 1e-12);
        assert_relative_eq!(map_to_0_pi(TAU), 0.0, epsilon = 1e-12);
        assert_relative_eq!(map_to_0_pi(-PI / 2.0), PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    #[should_panic(expected = "non-finite")]
    fn non_finite_rejected() {
        wrap_to_2pi(f64::NAN);
    }

    #[test]
    fn smooth_wrap_has_unit_derivative() {
        for &a in &[-2.9, -1.0, 0.0, 0.7, 3.0] {
            let d = wrap_angle_smooth(Dual::variable(a));
            assert_relative_eq!(d.re, wrap_to_pm_pi(a), epsilon = 1e-12);
            assert_relative_eq!(d.eps, 1.0, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn wrap_is_periodic_and_in_range(a in -50.0..50.0f64, k in -4i32..=4) {
            let w = wrap_to_2pi(a);
            prop_assert!((0.0..TAU).contains(&w));
            let shifted = wrap_to_2pi(a + f64::from(k) * TAU);
            prop_assert!((w - shifted).abs() < 1e-9 || (TAU - (w - shifted).abs()) < 1e-9);
        }

        #[test]
        fn signed_and_unsigned_forms_agree(a in -50.0..50.0f64) {
            let s = wrap_to_pm_pi(a);
            prop_assert!((-PI..PI).contains(&s));
            prop_assert!((map_to_0_pi(a) - s.abs()).abs() < 1e-12);
        }

        #[test]
        fn smooth_matches_exact_away_from_cut(a in -50.0..50.0f64) {
            // Branch-cut disagreement is confined to a hair around ±π.
            let s = wrap_to_pm_pi(a);
            prop_assume!((s.abs() - PI).abs() > 0.01);
            prop_assert!((wrap_angle_smooth(a) - s).abs() < 1e-6);
        }
    }
}
