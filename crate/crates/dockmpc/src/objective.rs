//! Cost terms of the coupling controller.
//!
//! The stage objective has three parts:
//!
//! * **coupling cost** — weighted squared coupling residuals over the
//!   predicted states (the slack variables of the docking formulation bind
//!   tightly to the residuals, so the cost is evaluated on the residuals
//!   themselves),
//! * **input smoothing** — squared discrete jerk of the translational
//!   commands and squared angular acceleration of the rotational commands,
//!   seeded with the two previously applied inputs so the measure is
//!   continuous across controller periods,
//! * **terminal cost** — weighted squared deviation of the final predicted
//!   state from the goal pose, with heading errors reduced to `[-π, π)`.

use crate::ad::Scalar;
use crate::angles::{wrap_angle_smooth, wrap_to_pm_pi};
use crate::coupling::ResidualVector;
use crate::types::{CentralInput, CentralState, TimeStep};
use serde::Serialize;

/// Goal pose of the stacked system.
pub type GoalState = CentralState;

/// Weights `(λ_δr, λ_δθ, λ_δv, λ_δφ, λ_j, λ_ω)` of the stage cost.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightVector {
    /// Distance residual weight, `λ_δr`.
    pub dist: f64,
    /// Alignment residual weight, `λ_δθ`.
    pub align: f64,
    /// Soft-docking residual weight, `λ_δv`.
    pub soft: f64,
    /// Docking-axis residual weight, `λ_δφ`.
    pub axis: f64,
    /// Translational jerk weight, `λ_j`.
    pub jerk: f64,
    /// Angular acceleration weight, `λ_ω`.
    pub omega_accel: f64,
}

impl Default for WeightVector {
    fn default() -> Self {
        WeightVector {
            dist: 30.0,
            align: 1000.0,
            soft: 1.0,
            axis: 200.0,
            jerk: 0.1,
            omega_accel: 1.0,
        }
    }
}

impl WeightVector {
    /// Zeroes the four coupling-residual weights, keeping the smoothing
    /// terms: the configuration of a controller with coupling disabled.
    pub fn without_coupling(mut self) -> Self {
        self.dist = 0.0;
        self.align = 0.0;
        self.soft = 0.0;
        self.axis = 0.0;
        self
    }
}

/// Per-component terminal weights in state order
/// `[p1x, p1y, th1, p2x, p2y, th2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TerminalWeights(pub [f64; 6]);

impl Default for TerminalWeights {
    fn default() -> Self {
        TerminalWeights([1.0, 1.0, 200.0, 1.0, 1.0, 200.0])
    }
}

/// Weighted residual cost over a predicted trajectory.
///
/// Distance, soft-docking and axis residuals enter squared. Alignment enters
/// through its smooth surrogate `2·sin²(r/2) = 1 + cos(Δ)`, which shares the
/// zero set with the squared residual, grows quadratically near it, and stays
/// differentiable at the fold of the unsigned angle difference.
pub fn coupling_cost(residuals: &[ResidualVector], w: &WeightVector) -> f64 {
    residuals
        .iter()
        .map(|r| {
            w.dist * r.dist * r.dist
                + w.align * 2.0 * (0.5 * r.align).sin().powi(2)
                + w.soft * r.soft * r.soft
                + w.axis * r.axis * r.axis
        })
        .sum()
}

/// Smoothing cost over a planned input sequence.
///
/// `history` carries the two previously applied inputs, oldest first; a cold
/// start passes zeros. Translational axes pay for the squared second
/// difference scaled to a jerk estimate, rotational axes for the squared
/// first difference scaled to an angular acceleration estimate.
pub fn input_smoothing_cost(
    inputs: &[CentralInput],
    history: &[CentralInput; 2],
    w: &WeightVector,
    dt: TimeStep,
) -> f64 {
    let flat: Vec<f64> = inputs.iter().flat_map(|u| u.as_array()).collect();
    raw_smoothing_cost(
        &flat,
        &history[0].as_array(),
        &history[1].as_array(),
        w,
        dt,
    )
}

/// Terminal deviation cost; heading errors are wrapped before squaring, so a
/// full-turn error costs nothing.
pub fn terminal_cost(z_n: &CentralState, goal: &GoalState, tw: &TerminalWeights) -> f64 {
    let z = z_n.as_array();
    let g = goal.as_array();
    let mut acc = 0.0;
    for i in 0..6 {
        let err = if i == 2 || i == 5 {
            wrap_to_pm_pi(z[i] - g[i])
        } else {
            z[i] - g[i]
        };
        acc += tw.0[i] * err * err;
    }
    acc
}

/// Full stage objective: coupling + smoothing + terminal.
#[allow(clippy::too_many_arguments)]
pub fn total_cost(
    residuals: &[ResidualVector],
    inputs: &[CentralInput],
    history: &[CentralInput; 2],
    z_n: &CentralState,
    goal: &GoalState,
    w: &WeightVector,
    tw: &TerminalWeights,
    dt: TimeStep,
) -> f64 {
    coupling_cost(residuals, w)
        + input_smoothing_cost(inputs, history, w, dt)
        + terminal_cost(z_n, goal, tw)
}

// ---------------------------------------------------------------------------
// Raw evaluators over flat vectors, shared with the optimizer.
// ---------------------------------------------------------------------------

/// Smoothing cost on the flat input vector (six entries per step).
pub fn raw_smoothing_cost<S: Scalar>(
    inputs: &[S],
    hist_older: &[f64; 6],
    hist_newer: &[f64; 6],
    w: &WeightVector,
    dt: TimeStep,
) -> S {
    assert_eq!(inputs.len() % 6, 0);
    let n = inputs.len() / 6;
    let jerk_scale = w.jerk / dt.powi(4);
    let rot_scale = w.omega_accel / (dt * dt);
    let mut acc = S::from_f64(0.0);
    for axis in 0..6 {
        let rotational = axis == 2 || axis == 5;
        let mut prev2 = S::from_f64(hist_older[axis]);
        let mut prev1 = S::from_f64(hist_newer[axis]);
        for k in 0..n {
            let cur = inputs[6 * k + axis];
            if rotational {
                let d1 = cur - prev1;
                acc = acc + d1 * d1 * rot_scale;
            } else {
                let d2 = cur - prev1 * 2.0 + prev2;
                acc = acc + d2 * d2 * jerk_scale;
            }
            prev2 = prev1;
            prev1 = cur;
        }
    }
    acc
}

/// Terminal cost on a raw final state, smooth in the heading entries.
pub fn raw_terminal_cost<S: Scalar>(z_n: &[S; 6], goal: &[f64; 6], tw: &TerminalWeights) -> S {
    let mut acc = S::from_f64(0.0);
    for i in 0..6 {
        let diff = z_n[i] - goal[i];
        let err = if i == 2 || i == 5 {
            wrap_angle_smooth(diff)
        } else {
            diff
        };
        acc = acc + err * err * tw.0[i];
    }
    acc
}
