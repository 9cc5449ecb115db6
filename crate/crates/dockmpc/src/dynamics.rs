//! Discrete-time kinematics of the omnidirectional platforms.
//!
//! The plant is a pure integrator under Euler-forward discretization:
//! `x_{k+1} = x_k + ΔT·u_k`, applied componentwise to `(px, py, theta)`.
//! Position updates are exact for piecewise-constant world-frame velocity
//! commands; the heading is wrapped on the plant side only. The optimizer
//! works on [`rollout_unwrapped`], which keeps headings as unwrapped reals so
//! trajectories stay smooth across the `0/2π` seam.

use crate::ad::Scalar;
use crate::types::{CentralInput, CentralState, ControlInput, RobotState, TimeStep};

/// Advances one robot by one control period.
#[inline]
pub fn step_single(s: &RobotState, u: &ControlInput, dt: TimeStep) -> RobotState {
    RobotState::new(
        s.px + dt * u.vx,
        s.py + dt * u.vy,
        s.theta + dt * u.omega,
    )
}

/// Advances the stacked two-robot system by one control period.
#[inline]
pub fn step_central(z: &CentralState, nu: &CentralInput, dt: TimeStep) -> CentralState {
    CentralState::new(step_single(&z.r1, &nu.u1, dt), step_single(&z.r2, &nu.u2, dt))
}

/// Plant-side rollout: element `k` is `step_central` applied `k+1` times.
pub fn rollout(z0: &CentralState, inputs: &[CentralInput], dt: TimeStep) -> Vec<CentralState> {
    let mut out = Vec::with_capacity(inputs.len());
    let mut z = *z0;
    for nu in inputs {
        z = step_central(&z, nu, dt);
        out.push(z);
    }
    out
}

/// Optimizer-side rollout over raw stacked vectors.
///
/// `inputs` is the flat decision vector, six entries per step in the order
/// `[v1x, v1y, w1, v2x, v2y, w2]`. Headings accumulate without wrapping; all
/// downstream residual and cost evaluators reduce angle differences
/// themselves, so the unwrapped representation never leaks into results.
pub fn rollout_unwrapped<S: Scalar>(z0: [S; 6], inputs: &[S], dt: TimeStep) -> Vec<[S; 6]> {
    assert_eq!(inputs.len() % 6, 0, "inputs must stack 6 entries per step");
    let n = inputs.len() / 6;
    let mut out = Vec::with_capacity(n);
    let mut z = z0;
    for k in 0..n {
        for i in 0..6 {
            z[i] = z[i] + inputs[6 * k + i] * dt;
        }
        out.push(z);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::angles::wrap_to_2pi;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn single_step_integrates_each_axis() {
        let s = RobotState::new(0.0, 0.0, 0.0);
        let u = ControlInput::new(1.0, -0.5, PI);
        let next = step_single(&s, &u, 0.25);
        assert_relative_eq!(next.px, 0.25);
        assert_relative_eq!(next.py, -0.125);
        assert_relative_eq!(next.theta, 0.25 * PI);
    }

    #[test]
    fn zero_input_is_a_fixed_point() {
        let s = RobotState::new(1.5, -2.0, 4.0);
        assert_eq!(step_single(&s, &ControlInput::default(), 0.25), s);
    }

    #[test]
    fn heading_wraps_on_the_plant_side() {
        let s = RobotState::new(0.0, 0.0, 6.2);
        let u = ControlInput::new(0.0, 0.0, 1.0);
        let next = step_single(&s, &u, 0.25);
        assert!((0.0..0.4).contains(&next.theta));
        assert_relative_eq!(next.theta, wrap_to_2pi(6.45), epsilon = 1e-12);
    }

    #[test]
    fn central_step_is_two_independent_singles() {
        let z = CentralState::new(
            RobotState::new(0.0, -2.0, 0.0),
            RobotState::new(0.0, 2.0, 0.0),
        );
        let nu = CentralInput::new(
            ControlInput::new(0.3, 0.6, 0.1),
            ControlInput::new(-0.3, -0.6, -0.1),
        );
        let next = step_central(&z, &nu, 0.25);
        assert_eq!(next.r1, step_single(&z.r1, &nu.u1, 0.25));
        assert_eq!(next.r2, step_single(&z.r2, &nu.u2, 0.25));
    }

    #[test]
    fn rollout_matches_repeated_stepping_exactly() {
        // Headings chosen so no wrap boundary is crossed: both paths then
        // perform the identical float operations.
        let z0 = CentralState::new(
            RobotState::new(0.2, -1.0, 3.0),
            RobotState::new(-0.4, 1.2, 2.5),
        );
        let inputs: Vec<CentralInput> = (0..10)
            .map(|k| {
                let a = k as f64 * 0.07;
                CentralInput::new(
                    ControlInput::new(a.sin(), a.cos(), 0.05 * a.sin()),
                    ControlInput::new(-a.cos(), 0.3, -0.05 * a.cos()),
                )
            })
            .collect();
        let traj = rollout(&z0, &inputs, 0.25);
        let mut z = z0;
        for (k, nu) in inputs.iter().enumerate() {
            z = step_central(&z, nu, 0.25);
            assert_eq!(traj[k], z);
        }
    }

    #[test]
    fn unwrapped_rollout_is_linear_in_inputs() {
        let inputs: Vec<f64> = (0..24).map(|i| (i as f64 * 0.37).sin()).collect();
        let scaled: Vec<f64> = inputs.iter().map(|v| v * 3.0).collect();
        let base = rollout_unwrapped([0.0; 6], &inputs, 0.25);
        let tripled = rollout_unwrapped([0.0; 6], &scaled, 0.25);
        for (zb, zt) in base.iter().zip(&tripled) {
            for i in 0..6 {
                assert_relative_eq!(zt[i], 3.0 * zb[i], epsilon = 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn unwrapped_and_plant_rollouts_agree_modulo_2pi(
            seed in 0u64..1000,
            n in 1usize..15,
        ) {
            let mut s = seed;
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) as f64 / (1u64 << 31) as f64) - 1.0
            };
            let z0 = CentralState::new(
                RobotState::new(next(), next(), next() * 3.0),
                RobotState::new(next(), next(), next() * 3.0),
            );
            let flat: Vec<f64> = (0..6 * n).map(|_| next()).collect();
            let inputs: Vec<CentralInput> = flat
                .chunks(6)
                .map(|c| CentralInput::from_array([c[0], c[1], c[2], c[3], c[4], c[5]]))
                .collect();
            let plant = rollout(&z0, &inputs, 0.25);
            let raw = rollout_unwrapped(z0.as_array(), &flat, 0.25);
            for (zp, zr) in plant.iter().zip(&raw) {
                let a = zp.as_array();
                for i in [0usize, 1, 3, 4] {
                    prop_assert!((a[i] - zr[i]).abs() < 1e-12);
                }
                for i in [2usize, 5] {
                    prop_assert!((a[i] - wrap_to_2pi(zr[i])).abs() < 1e-9);
                }
            }
        }
    }
}
