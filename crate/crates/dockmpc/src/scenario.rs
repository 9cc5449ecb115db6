//! Scenario documents: strict, versioned JSON configuration and the built-in
//! experiment presets.
//!
//! A document is plain data — angles in degrees, every section optional with
//! library defaults — and converts to a runnable [`Scenario`] via
//! [`ScenarioConfig::to_scenario`]. Unknown fields are rejected so typos fail
//! loudly, and `load_config(save_config(c)) == c` holds exactly.

use crate::nlp::{ControllerConfig, InputLimits, SlackCaps};
use crate::objective::{TerminalWeights, WeightVector};
use crate::simulation::{LatchThresholds, Scenario, ScriptEvent, SimOptions};
use crate::solver::SolverSettings;
use crate::types::{CentralState, DockingInterface, RobotState};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Version of the document layout this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Errors raised while loading or interpreting a configuration document.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

// ---------------------------------------------------------------------------
// Document layout.
// ---------------------------------------------------------------------------

/// A robot pose with the heading in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseConfig {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub theta_deg: f64,
}

impl PoseConfig {
    pub fn new(x: f64, y: f64, theta_deg: f64) -> Self {
        PoseConfig { x, y, theta_deg }
    }

    fn to_state(self) -> RobotState {
        RobotState::new(self.x, self.y, self.theta_deg.to_radians())
    }
}

/// Initial poses of the pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub robot1: PoseConfig,
    pub robot2: PoseConfig,
}

/// One scripted mission event.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventConfig {
    /// Send one robot (1 or 2) to a pose once its current goal is reached.
    /// With `pass_through` the pose is a route shaping point that is visited
    /// at speed (waypoint radius, heading free) instead of settled on.
    Goto {
        robot: u8,
        pose: PoseConfig,
        #[serde(default)]
        pass_through: bool,
    },
    /// Engage coupling: robot 2's goal derives from the leader goal via the
    /// docking geometry.
    Couple { leader_goal: PoseConfig },
    /// Hold the coupled configuration for `duration` seconds after the latch.
    Transfer { duration: f64 },
    /// Release the coupling and separate.
    Uncouple,
}

/// Stage-cost weights section.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsConfig {
    pub dist: f64,
    pub align: f64,
    pub soft: f64,
    pub axis: f64,
    pub jerk: f64,
    pub omega_accel: f64,
}

impl Default for WeightsConfig {
    fn default() -> Self {
        let w = WeightVector::default();
        WeightsConfig {
            dist: w.dist,
            align: w.align,
            soft: w.soft,
            axis: w.axis,
            jerk: w.jerk,
            omega_accel: w.omega_accel,
        }
    }
}

/// Docking geometry section; angles in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingConfig {
    /// Interface angle of robot 1 relative to its heading.
    pub delta_phi1_deg: f64,
    /// Interface angle of robot 2 relative to its heading.
    pub delta_phi2_deg: f64,
    /// Distance from a robot center to its interface point, metres.
    pub interface_radius: f64,
    /// Center distance at contact, metres.
    pub delta_r: f64,
    /// Keep-out disk radius, metres.
    pub r_ca: f64,
    /// Half-aperture of the approach cone, degrees.
    pub corridor_half_angle_deg: f64,
    /// Sharpness of the gate between cone and keep-out disk.
    pub gate_sharpness: f64,
    /// Feasibility slack on the corridor inequality.
    pub corridor_margin: f64,
    /// Use the legacy `d² - δ_r` distance residual.
    pub legacy_distance_form: bool,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        let p = crate::coupling::CouplingParams::default();
        CouplingConfig {
            delta_phi1_deg: p.iface1.delta_phi.to_degrees(),
            delta_phi2_deg: p.iface2.delta_phi.to_degrees(),
            interface_radius: p.iface1.radius,
            delta_r: p.contact_distance,
            r_ca: p.keep_out_radius,
            corridor_half_angle_deg: p.approach_half_cone.to_degrees(),
            gate_sharpness: p.gate_sharpness,
            corridor_margin: p.corridor_margin,
            legacy_distance_form: p.legacy_distance_form,
        }
    }
}

/// Input bound section; the angular bound is in degrees per second.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsConfig {
    pub nu_max: f64,
    pub omega_max_deg: f64,
}

impl Default for LimitsConfig {
    fn default() -> Self {
        let l = InputLimits::default();
        LimitsConfig {
            nu_max: l.nu_max,
            omega_max_deg: l.omega_max.to_degrees(),
        }
    }
}

/// Solver settings section (plain mirror of the solver's knobs).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub max_outer: usize,
    pub max_inner: usize,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub max_penalty: f64,
    pub constraint_tol: f64,
    pub gradient_tol: f64,
    pub step_tol: f64,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub lbfgs_memory: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = ControllerConfig::default().solver;
        SolverConfig {
            max_outer: s.max_outer,
            max_inner: s.max_inner,
            initial_penalty: s.initial_penalty,
            penalty_growth: s.penalty_growth,
            max_penalty: s.max_penalty,
            constraint_tol: s.constraint_tol,
            gradient_tol: s.gradient_tol,
            step_tol: s.step_tol,
            armijo_c: s.armijo_c,
            backtrack_factor: s.backtrack_factor,
            lbfgs_memory: s.lbfgs_memory,
        }
    }
}

/// Controller section of a document.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerSection {
    pub horizon: usize,
    pub dt: f64,
    pub weights: WeightsConfig,
    pub terminal: [f64; 6],
    pub coupling: CouplingConfig,
    pub limits: LimitsConfig,
    pub solver: SolverConfig,
}

impl Default for ControllerSection {
    fn default() -> Self {
        let c = ControllerConfig::default();
        ControllerSection {
            horizon: c.horizon,
            dt: c.dt,
            weights: WeightsConfig::default(),
            terminal: c.terminal.0,
            coupling: CouplingConfig::default(),
            limits: LimitsConfig::default(),
            solver: SolverConfig::default(),
        }
    }
}

/// Latch thresholds section; angular bounds in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatchConfig {
    pub axis_deg: f64,
    pub align_deg: f64,
    pub gap: f64,
    pub speed: f64,
}

impl Default for LatchConfig {
    fn default() -> Self {
        let l = LatchThresholds::default();
        LatchConfig {
            axis_deg: l.axis.to_degrees(),
            align_deg: l.align.to_degrees(),
            gap: l.gap,
            speed: l.speed,
        }
    }
}

/// Residual cap section (one tier).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapsConfig {
    pub dist: f64,
    pub align: f64,
    pub soft: f64,
    pub axis: f64,
}

impl Default for CapsConfig {
    fn default() -> Self {
        CapsConfig::from(SlackCaps::default())
    }
}

impl From<SlackCaps> for CapsConfig {
    fn from(c: SlackCaps) -> Self {
        CapsConfig {
            dist: c.dist,
            align: c.align,
            soft: c.soft,
            axis: c.axis,
        }
    }
}

impl CapsConfig {
    fn to_caps(self) -> SlackCaps {
        SlackCaps {
            dist: self.dist,
            align: self.align,
            soft: self.soft,
            axis: self.axis,
        }
    }
}

/// Execution options section.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptionsSection {
    pub close_range_d: f64,
    pub goal_pos_tol: f64,
    pub goal_heading_tol_deg: f64,
    pub goal_speed_tol: f64,
    pub waypoint_pos_tol: f64,
    pub brake_decel: f64,
    pub latch: LatchConfig,
    pub max_sim_time: f64,
    pub energy_rot_weight: f64,
    pub approach_caps: CapsConfig,
    pub final_caps: CapsConfig,
    pub docked_caps: CapsConfig,
    pub disturbance: f64,
    pub seed: u64,
}

impl Default for OptionsSection {
    fn default() -> Self {
        let o = SimOptions::default();
        OptionsSection {
            close_range_d: o.close_range_d,
            goal_pos_tol: o.goal_pos_tol,
            goal_heading_tol_deg: o.goal_heading_tol.to_degrees(),
            goal_speed_tol: o.goal_speed_tol,
            waypoint_pos_tol: o.waypoint_pos_tol,
            brake_decel: o.brake_decel,
            latch: LatchConfig::default(),
            max_sim_time: o.max_sim_time,
            energy_rot_weight: o.energy_rot_weight,
            approach_caps: o.approach_caps.into(),
            final_caps: o.final_caps.into(),
            docked_caps: o.docked_caps.into(),
            disturbance: o.disturbance,
            seed: o.seed,
        }
    }
}

/// One complete scenario document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Must equal [`SCHEMA_VERSION`].
    pub schema: u32,
    #[serde(default)]
    pub name: String,
    pub initial: InitialConfig,
    #[serde(default)]
    pub controller: ControllerSection,
    #[serde(default)]
    pub script: Vec<EventConfig>,
    #[serde(default)]
    pub options: OptionsSection,
}

impl ScenarioConfig {
    /// Interprets the document: degrees become radians, defaults become
    /// concrete types, and the result is validated end to end.
    pub fn to_scenario(&self) -> Result<Scenario, ConfigError> {
        if self.schema != SCHEMA_VERSION {
            return Err(ConfigError::Invalid(format!(
                "schema {} not supported (expected {})",
                self.schema, SCHEMA_VERSION
            )));
        }
        let c = &self.controller;
        if !(c.coupling.interface_radius > 0.0) {
            return Err(ConfigError::Invalid(
                "coupling.interface_radius must be positive".into(),
            ));
        }
        let controller = ControllerConfig {
            horizon: c.horizon,
            dt: c.dt,
            weights: WeightVector {
                dist: c.weights.dist,
                align: c.weights.align,
                soft: c.weights.soft,
                axis: c.weights.axis,
                jerk: c.weights.jerk,
                omega_accel: c.weights.omega_accel,
            },
            terminal: TerminalWeights(c.terminal),
            coupling: crate::coupling::CouplingParams {
                iface1: DockingInterface::new(
                    c.coupling.delta_phi1_deg.to_radians(),
                    c.coupling.interface_radius,
                ),
                iface2: DockingInterface::new(
                    c.coupling.delta_phi2_deg.to_radians(),
                    c.coupling.interface_radius,
                ),
                contact_distance: c.coupling.delta_r,
                keep_out_radius: c.coupling.r_ca,
                approach_half_cone: c.coupling.corridor_half_angle_deg.to_radians(),
                gate_sharpness: c.coupling.gate_sharpness,
                corridor_margin: c.coupling.corridor_margin,
                legacy_distance_form: c.coupling.legacy_distance_form,
            },
            limits: InputLimits {
                nu_max: c.limits.nu_max,
                omega_max: c.limits.omega_max_deg.to_radians(),
            },
            solver: SolverSettings {
                max_outer: c.solver.max_outer,
                max_inner: c.solver.max_inner,
                initial_penalty: c.solver.initial_penalty,
                penalty_growth: c.solver.penalty_growth,
                max_penalty: c.solver.max_penalty,
                constraint_tol: c.solver.constraint_tol,
                gradient_tol: c.solver.gradient_tol,
                step_tol: c.solver.step_tol,
                armijo_c: c.solver.armijo_c,
                backtrack_factor: c.solver.backtrack_factor,
                lbfgs_memory: c.solver.lbfgs_memory,
            },
        };
        let script = self
            .script
            .iter()
            .map(|ev| {
                Ok(match *ev {
                    EventConfig::Goto {
                        robot,
                        pose,
                        pass_through,
                    } => ScriptEvent::Goto {
                        robot: match robot {
                            1 => crate::simulation::RobotId::One,
                            2 => crate::simulation::RobotId::Two,
                            other => {
                                return Err(ConfigError::Invalid(format!(
                                    "goto.robot must be 1 or 2, got {other}"
                                )))
                            }
                        },
                        pose: pose.to_state(),
                        pass_through,
                    },
                    EventConfig::Couple { leader_goal } => ScriptEvent::Couple {
                        leader_goal: leader_goal.to_state(),
                    },
                    EventConfig::Transfer { duration } => ScriptEvent::Transfer { duration },
                    EventConfig::Uncouple => ScriptEvent::Uncouple,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let o = &self.options;
        let scenario = Scenario {
            initial: CentralState::new(
                self.initial.robot1.to_state(),
                self.initial.robot2.to_state(),
            ),
            controller,
            script,
            options: SimOptions {
                close_range_d: o.close_range_d,
                goal_pos_tol: o.goal_pos_tol,
                goal_heading_tol: o.goal_heading_tol_deg.to_radians(),
                goal_speed_tol: o.goal_speed_tol,
                waypoint_pos_tol: o.waypoint_pos_tol,
                brake_decel: o.brake_decel,
                latch: LatchThresholds {
                    axis: o.latch.axis_deg.to_radians(),
                    align: o.latch.align_deg.to_radians(),
                    gap: o.latch.gap,
                    speed: o.latch.speed,
                },
                max_sim_time: o.max_sim_time,
                energy_rot_weight: o.energy_rot_weight,
                approach_caps: o.approach_caps.to_caps(),
                final_caps: o.final_caps.to_caps(),
                docked_caps: o.docked_caps.to_caps(),
                disturbance: o.disturbance,
                seed: o.seed,
            },
        };
        scenario
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(scenario)
    }
}

// ---------------------------------------------------------------------------
// File I/O.
// ---------------------------------------------------------------------------

/// Reads, parses and validates a document; defaults are filled in.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let config: ScenarioConfig =
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    config.to_scenario()?;
    Ok(config)
}

/// Writes a document as pretty-printed JSON.
pub fn save_config(path: impl AsRef<Path>, config: &ScenarioConfig) -> Result<(), ConfigError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(config).expect("document serialization is infallible");
    std::fs::write(path, text + "\n").map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })
}

// ---------------------------------------------------------------------------
// Presets.
// ---------------------------------------------------------------------------

/// Velocity bound used by the two docking studies.
const DOCKING_NU_MAX: f64 = 1.0;
/// Velocity bound used by the logistics comparison pair.
const LOGISTICS_NU_MAX: f64 = 0.65;

fn docking_preset(name: &str, r1: PoseConfig, r2: PoseConfig) -> ScenarioConfig {
    ScenarioConfig {
        schema: SCHEMA_VERSION,
        name: name.into(),
        initial: InitialConfig { robot1: r1, robot2: r2 },
        controller: ControllerSection {
            limits: LimitsConfig {
                nu_max: DOCKING_NU_MAX,
                ..LimitsConfig::default()
            },
            ..ControllerSection::default()
        },
        script: vec![EventConfig::Couple {
            leader_goal: PoseConfig::new(4.0, 0.0, 0.0),
        }],
        options: OptionsSection {
            max_sim_time: 60.0,
            ..OptionsSection::default()
        },
    }
}

fn logistics_preset(name: &str, script: Vec<EventConfig>) -> ScenarioConfig {
    ScenarioConfig {
        schema: SCHEMA_VERSION,
        name: name.into(),
        initial: InitialConfig {
            robot1: PoseConfig::new(0.0, -2.0, 0.0),
            robot2: PoseConfig::new(0.0, 2.0, 0.0),
        },
        controller: ControllerSection {
            limits: LimitsConfig {
                nu_max: LOGISTICS_NU_MAX,
                ..LimitsConfig::default()
            },
            ..ControllerSection::default()
        },
        script,
        options: OptionsSection {
            max_sim_time: 120.0,
            // Delivery counts on entering the drop bay, not on a millimetre
            // park: the terminal goal cost decays speed with distance, so a
            // tight radius would spend most of each leg crawling.
            goal_pos_tol: 0.3,
            ..OptionsSection::default()
        },
    }
}

/// Returns a built-in experiment configuration by name.
///
/// `exp1` and `exp2` are the head-on and swapped-start docking studies;
/// `exp3_coupled` / `exp3_baseline` are the logistics comparison pair.
pub fn preset(name: &str) -> Result<ScenarioConfig, ConfigError> {
    let shelf1 = PoseConfig::new(2.0, 0.0, 0.0);
    let shelf2 = PoseConfig::new(2.0, 1.0, 0.0);
    let drop_a = PoseConfig::new(8.0, 2.0, 0.0);
    let drop_b = PoseConfig::new(8.0, -2.0, 0.0);
    match name {
        "exp1" => Ok(docking_preset(
            "exp1",
            PoseConfig::new(0.0, -2.0, 0.0),
            PoseConfig::new(0.0, 2.0, 0.0),
        )),
        "exp2" => Ok(docking_preset(
            "exp2",
            PoseConfig::new(0.0, 2.0, 0.0),
            PoseConfig::new(0.0, -2.0, 0.0),
        )),
        "exp3_coupled" => Ok(logistics_preset(
            "exp3_coupled",
            vec![
                // Out of the shelf row at speed, then dock while cruising;
                // the leader goal shapes the shared lane. The transfer timer
                // fires mid-ride and the pair splits to its two drops.
                EventConfig::Goto { robot: 1, pose: shelf1, pass_through: true },
                EventConfig::Goto { robot: 2, pose: shelf2, pass_through: true },
                EventConfig::Couple {
                    leader_goal: PoseConfig::new(8.75, -0.55, 0.0),
                },
                EventConfig::Transfer { duration: 7.0 },
                EventConfig::Uncouple,
                EventConfig::Goto { robot: 2, pose: drop_a, pass_through: false },
                EventConfig::Goto { robot: 1, pose: drop_b, pass_through: false },
            ],
        )),
        "exp3_baseline" => Ok(logistics_preset(
            "exp3_baseline",
            vec![
                // No transfer: robot 2 must deliver at both drops itself, and
                // each delivery is a full stop. Its second drop parks beside
                // robot 1, which already occupies the lower drop point.
                EventConfig::Goto { robot: 1, pose: shelf1, pass_through: true },
                EventConfig::Goto { robot: 2, pose: shelf2, pass_through: true },
                EventConfig::Goto { robot: 2, pose: drop_a, pass_through: false },
                EventConfig::Goto { robot: 1, pose: drop_b, pass_through: false },
                EventConfig::Goto { robot: 2, pose: PoseConfig::new(8.0, -1.75, 0.0), pass_through: false },
            ],
        )),
        other => Err(ConfigError::Invalid(format!(
            "unknown preset '{other}' (expected exp1, exp2, exp3_coupled or exp3_baseline)"
        ))),
    }
}

/// All preset names, in presentation order.
pub const PRESET_NAMES: [&str; 4] = ["exp1", "exp2", "exp3_coupled", "exp3_baseline"];
