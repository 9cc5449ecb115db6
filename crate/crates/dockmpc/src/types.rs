//! Plant-level state and input types for the two-robot system.
//!
//! Each robot is an omnidirectional platform whose pose lives in
//! `(px, py, theta)` with the heading kept in `[0, 2π)`. A rigid docking
//! interface sits on the robot body at angle `delta_phi` relative to the
//! heading, `radius` metres from the center.

use crate::angles::wrap_to_2pi;
use serde::Serialize;

/// Controller period in seconds.
pub type TimeStep = f64;

/// Pose of a single robot. Constructors wrap the heading into `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RobotState {
    pub px: f64,
    pub py: f64,
    pub theta: f64,
}

impl RobotState {
    pub fn new(px: f64, py: f64, theta: f64) -> Self {
        assert!(px.is_finite() && py.is_finite(), "non-finite position");
        RobotState {
            px,
            py,
            theta: wrap_to_2pi(theta),
        }
    }

    #[inline]
    pub fn position(&self) -> [f64; 2] {
        [self.px, self.py]
    }

    /// Absolute heading of the docking interface, in `[0, 2π)`.
    #[inline]
    pub fn docking_heading(&self, iface: &DockingInterface) -> f64 {
        wrap_to_2pi(self.theta + iface.delta_phi)
    }

    /// World position of the docking interface point.
    #[inline]
    pub fn docking_point(&self, iface: &DockingInterface) -> [f64; 2] {
        let h = self.docking_heading(iface);
        [
            self.px + iface.radius * h.cos(),
            self.py + iface.radius * h.sin(),
        ]
    }
}

/// Velocity command `(vx, vy, omega)` in the world frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ControlInput {
    pub vx: f64,
    pub vy: f64,
    pub omega: f64,
}

impl ControlInput {
    pub fn new(vx: f64, vy: f64, omega: f64) -> Self {
        ControlInput { vx, vy, omega }
    }

    /// Translational speed, ignoring rotation.
    #[inline]
    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }
}

/// Rigid docking hardware mounted on a robot body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DockingInterface {
    /// Angle of the interface relative to the robot heading, radians.
    pub delta_phi: f64,
    /// Distance from robot center to the interface point, metres.
    pub radius: f64,
}

impl DockingInterface {
    pub fn new(delta_phi: f64, radius: f64) -> Self {
        assert!(delta_phi.is_finite(), "non-finite interface angle");
        assert!(radius > 0.0, "interface radius must be positive");
        DockingInterface { delta_phi, radius }
    }
}

/// Stacked state of both robots, robot 1 first.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CentralState {
    pub r1: RobotState,
    pub r2: RobotState,
}

impl CentralState {
    pub fn new(r1: RobotState, r2: RobotState) -> Self {
        CentralState { r1, r2 }
    }

    #[inline]
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.r1.px, self.r1.py, self.r1.theta, self.r2.px, self.r2.py, self.r2.theta,
        ]
    }

    /// Rebuilds a state from a raw vector, wrapping headings.
    pub fn from_array(z: [f64; 6]) -> Self {
        CentralState {
            r1: RobotState::new(z[0], z[1], z[2]),
            r2: RobotState::new(z[3], z[4], z[5]),
        }
    }

    /// Center-to-center distance between the robots.
    #[inline]
    pub fn separation(&self) -> f64 {
        (self.r2.px - self.r1.px).hypot(self.r2.py - self.r1.py)
    }
}

/// Stacked input of both robots, robot 1 first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CentralInput {
    pub u1: ControlInput,
    pub u2: ControlInput,
}

impl CentralInput {
    pub fn new(u1: ControlInput, u2: ControlInput) -> Self {
        CentralInput { u1, u2 }
    }

    #[inline]
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.u1.vx, self.u1.vy, self.u1.omega, self.u2.vx, self.u2.vy, self.u2.omega,
        ]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        CentralInput {
            u1: ControlInput::new(v[0], v[1], v[2]),
            u2: ControlInput::new(v[3], v[4], v[5]),
        }
    }

    /// Velocity difference `u1 - u2`, the quantity damped during soft docking.
    #[inline]
    pub fn relative_velocity(&self) -> [f64; 2] {
        [self.u1.vx - self.u2.vx, self.u1.vy - self.u2.vy]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn constructor_wraps_heading() {
        let s = RobotState::new(0.0, 0.0, TAU + 0.3);
        assert_relative_eq!(s.theta, 0.3, epsilon = 1e-12);
        let s = RobotState::new(0.0, 0.0, -0.3);
        assert_relative_eq!(s.theta, TAU - 0.3, epsilon = 1e-12);
    }

    #[test]
    fn docking_heading_wraps() {
        let iface = DockingInterface::new(FRAC_PI_2, 0.1);
        let s = RobotState::new(0.0, 0.0, 0.0);
        assert_relative_eq!(s.docking_heading(&iface), FRAC_PI_2);
        let s = RobotState::new(0.0, 0.0, 3.0 * PI / 2.0);
        assert_relative_eq!(s.docking_heading(&iface), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn docking_point_offsets_from_center() {
        let up = DockingInterface::new(FRAC_PI_2, 0.1);
        let p = RobotState::new(0.0, 0.0, 0.0).docking_point(&up);
        assert_relative_eq!(p[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(p[1], 0.1, epsilon = 1e-12);

        let down = DockingInterface::new(-FRAC_PI_2, 0.1);
        let p = RobotState::new(1.0, 1.0, FRAC_PI_2).docking_point(&down);
        assert_relative_eq!(p[0], 1.1, epsilon = 1e-12);
        assert_relative_eq!(p[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn central_round_trip() {
        let z = CentralState::new(
            RobotState::new(1.0, 2.0, 0.5),
            RobotState::new(-1.0, 0.25, 5.9),
        );
        assert_eq!(CentralState::from_array(z.as_array()), z);
        assert_relative_eq!(z.separation(), (4.0f64 + 1.75f64.powi(2)).sqrt());

        let u = CentralInput::new(
            ControlInput::new(0.1, -0.2, 0.3),
            ControlInput::new(0.4, 0.5, -0.6),
        );
        assert_eq!(CentralInput::from_array(u.as_array()), u);
        assert_relative_eq!(u.relative_velocity()[0], -0.3, epsilon = 1e-15);
        assert_relative_eq!(u.relative_velocity()[1], -0.7, epsilon = 1e-15);
    }

    #[test]
    #[should_panic(expected = "radius")]
    fn zero_radius_rejected() {
        DockingInterface::new(0.0, 0.0);
    }
}
