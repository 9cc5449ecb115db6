//! Docking geometry: coupling residuals and the approach-corridor gate.
//!
//! Two robots are docked when four residuals vanish simultaneously:
//!
//! * **axis** — robot 1's interface heading points at robot 2's center,
//! * **alignment** — the two interface headings are anti-parallel,
//! * **distance** — the centers sit at the contact distance `δ_r`,
//! * **soft docking** — the translational velocities match.
//!
//! Each residual comes in an exact form (used for latching, phase logic and
//! logging) and a smooth form (used inside the optimizer). The smooth forms
//! share the exact zero sets; tests pin the correspondence.
//!
//! The corridor gate `α_ca·½·α_ce ≥ 0` keeps the robots outside a keep-out
//! disk of radius `r_ca` unless the partner approaches inside a cone around
//! the docking axis: `α_ca = d² - r_ca²` and
//! `α_ce = 1 + tanh(l·(Δθ_φ - Δ_φ))` with `Δθ_φ` the off-axis angle.

use crate::ad::Scalar;
use crate::angles::{map_to_0_pi, wrap_to_2pi, wrap_to_pm_pi};
use crate::types::{CentralInput, CentralState, DockingInterface, RobotState};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Geometry and gating parameters of the coupling pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CouplingParams {
    pub iface1: DockingInterface,
    pub iface2: DockingInterface,
    /// Center distance at physical contact, `δ_r` (m).
    pub contact_distance: f64,
    /// Collision keep-out radius `r_ca` (m), larger than `contact_distance`.
    pub keep_out_radius: f64,
    /// Half-aperture `Δ_φ` of the approach cone (rad).
    pub approach_half_cone: f64,
    /// Sharpness `l` of the tanh gate between cone and keep-out disk.
    pub gate_sharpness: f64,
    /// Feasibility slack: the corridor inequality is enforced as
    /// `corridor_value ≥ -corridor_margin` so the contact pose itself
    /// (marginally inside the disk, exactly on-axis) stays admissible.
    pub corridor_margin: f64,
    /// Use the legacy distance residual `d² - δ_r` instead of the
    /// dimensionally consistent `d² - δ_r²`. Off by default; the legacy form
    /// mixes m² and m and its zero set is not the contact distance.
    pub legacy_distance_form: bool,
}

impl Default for CouplingParams {
    fn default() -> Self {
        CouplingParams {
            iface1: DockingInterface::new(FRAC_PI_2, 0.1),
            iface2: DockingInterface::new(-FRAC_PI_2, 0.1),
            contact_distance: 0.2,
            keep_out_radius: 0.4,
            approach_half_cone: 15f64.to_radians(),
            gate_sharpness: 20.0,
            corridor_margin: 2e-4,
            legacy_distance_form: false,
        }
    }
}

impl CouplingParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.contact_distance > 0.0) {
            return Err("contact_distance must be positive".into());
        }
        if !(self.keep_out_radius > self.contact_distance) {
            return Err("keep_out_radius must exceed contact_distance".into());
        }
        if !(self.approach_half_cone > 0.0 && self.approach_half_cone < PI) {
            return Err("approach_half_cone must lie in (0, π)".into());
        }
        if !(self.gate_sharpness > 0.0) {
            return Err("gate_sharpness must be positive".into());
        }
        if !(self.corridor_margin >= 0.0) {
            return Err("corridor_margin must be nonnegative".into());
        }
        Ok(())
    }
}

/// Exact coupling residuals at one instant. `axis` and `align` are radians,
/// `dist` is m², `soft` is m²/s².
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualVector {
    pub axis: f64,
    pub align: f64,
    pub dist: f64,
    pub soft: f64,
}

/// Bearing from robot 1's center to robot 2's center, in `[0, 2π)`.
///
/// Panics for coincident centers (separation below 1e-9 m), where the
/// bearing is undefined.
pub fn bearing_angle(z: &CentralState) -> f64 {
    let dx = z.r2.px - z.r1.px;
    let dy = z.r2.py - z.r1.py;
    assert!(
        dx.hypot(dy) > 1e-9,
        "bearing undefined for coincident robot centers"
    );
    wrap_to_2pi(dy.atan2(dx))
}

/// Signed angle between robot 1's interface heading and the bearing to
/// robot 2, in `[-π, π)`. Zero means robot 2 sits exactly on the docking axis.
pub fn residual_docking_axis(z: &CentralState, p: &CouplingParams) -> f64 {
    wrap_to_pm_pi(z.r1.docking_heading(&p.iface1) - bearing_angle(z))
}

/// Exact alignment residual `map_to_0_pi(θ¹_d - θ²_d) - π`, in `[-π, 0]`.
/// Zero means the interface headings are anti-parallel.
pub fn residual_alignment(z: &CentralState, p: &CouplingParams) -> f64 {
    map_to_0_pi(z.r1.docking_heading(&p.iface1) - z.r2.docking_heading(&p.iface2)) - PI
}

/// Smooth alignment surrogate `1 + cos(θ¹_d - θ²_d)`, in `[0, 2]`.
///
/// Relates to the exact residual `r` by `2·sin²(r/2)`, so both vanish on the
/// same configurations.
pub fn alignment_surrogate(z: &CentralState, p: &CouplingParams) -> f64 {
    raw_alignment_smooth(&z.as_array(), p)
}

/// Distance residual `d² - δ_r²` (m²); positive outside contact, negative
/// inside. With `legacy_distance_form` the historical `d² - δ_r` is used.
pub fn residual_distance(z: &CentralState, p: &CouplingParams) -> f64 {
    raw_distance_residual(&z.as_array(), p)
}

/// Soft-docking residual: squared relative translational speed (m²/s²).
pub fn residual_soft_docking(nu: &CentralInput) -> f64 {
    let [dvx, dvy] = nu.relative_velocity();
    dvx * dvx + dvy * dvy
}

/// All four exact residuals at one instant.
pub fn residual_vector(z: &CentralState, nu: &CentralInput, p: &CouplingParams) -> ResidualVector {
    ResidualVector {
        axis: residual_docking_axis(z, p),
        align: residual_alignment(z, p),
        dist: residual_distance(z, p),
        soft: residual_soft_docking(nu),
    }
}

/// Unsigned off-axis angle `Δθ_φ = map_to_0_pi(θ¹_d - φ_12)`, in `[0, π]`.
pub fn off_axis_angle(z: &CentralState, p: &CouplingParams) -> f64 {
    map_to_0_pi(z.r1.docking_heading(&p.iface1) - bearing_angle(z))
}

/// Corridor gate value `α_ca·½·α_ce`; nonnegative values are collision-safe.
pub fn corridor_value(z: &CentralState, p: &CouplingParams) -> f64 {
    raw_corridor(&z.as_array(), p)
}

/// Pose of robot 2 rigidly attached to a given robot-1 pose: centers at the
/// contact distance along robot 1's interface heading, interfaces
/// anti-parallel.
pub fn docked_partner_pose(leader: &RobotState, p: &CouplingParams) -> RobotState {
    let hd = leader.docking_heading(&p.iface1);
    RobotState::new(
        leader.px + p.contact_distance * hd.cos(),
        leader.py + p.contact_distance * hd.sin(),
        hd + PI - p.iface2.delta_phi,
    )
}

// ---------------------------------------------------------------------------
// Raw evaluators over stacked `[p1x, p1y, th1, p2x, p2y, th2]` vectors.
// These are the optimizer-facing forms: generic over the scalar type and
// smooth in their arguments (the axis residual goes through atan2 of sine and
// cosine differences rather than a euclidean remainder).
// ---------------------------------------------------------------------------

/// Smooth signed axis residual. Equals the exact form everywhere except on
/// the ±π branch cut, and is differentiable away from coincident centers.
pub fn raw_axis_residual<S: Scalar>(z: &[S; 6], p: &CouplingParams) -> S {
    let th1d = z[2] + p.iface1.delta_phi;
    let (sin_d, cos_d) = (th1d.sin(), th1d.cos());
    let dx = z[3] - z[0];
    let dy = z[4] - z[1];
    // sin/cos of (θ¹_d - φ_12), scaled by the positive separation, which
    // cancels inside atan2.
    (sin_d * dx - cos_d * dy).atan2(cos_d * dx + sin_d * dy)
}

/// Smooth alignment surrogate `1 + cos(θ¹_d - θ²_d)`.
pub fn raw_alignment_smooth<S: Scalar>(z: &[S; 6], p: &CouplingParams) -> S {
    let diff = z[2] + p.iface1.delta_phi - (z[5] + p.iface2.delta_phi);
    diff.cos() + 1.0
}

/// Distance residual on raw states.
pub fn raw_distance_residual<S: Scalar>(z: &[S; 6], p: &CouplingParams) -> S {
    let dx = z[3] - z[0];
    let dy = z[4] - z[1];
    let d2 = dx * dx + dy * dy;
    if p.legacy_distance_form {
        d2 - p.contact_distance
    } else {
        d2 - p.contact_distance * p.contact_distance
    }
}

/// Soft-docking residual on one raw input block `[v1x, v1y, w1, v2x, v2y, w2]`.
pub fn raw_soft_docking<S: Scalar>(nu: &[S]) -> S {
    let dvx = nu[0] - nu[3];
    let dvy = nu[1] - nu[4];
    dvx * dvx + dvy * dvy
}

/// Keep-out disk value `α_ca = d² - r_ca²`.
pub fn raw_keep_out<S: Scalar>(z: &[S; 6], p: &CouplingParams) -> S {
    let dx = z[3] - z[0];
    let dy = z[4] - z[1];
    dx * dx + dy * dy - p.keep_out_radius * p.keep_out_radius
}

/// Corridor gate value on raw states.
pub fn raw_corridor<S: Scalar>(z: &[S; 6], p: &CouplingParams) -> S {
    let off_axis = raw_axis_residual(z, p).abs();
    let gate = ((off_axis - p.approach_half_cone) * p.gate_sharpness).tanh() + 1.0;
    raw_keep_out(z, p) * gate * 0.5
}
