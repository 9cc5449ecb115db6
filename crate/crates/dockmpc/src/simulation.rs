//! Closed-loop execution: a scripted two-robot mission driven by the
//! receding-horizon controller, with the plant advanced by the same
//! integrator the controller predicts with.
//!
//! A scenario is a start state plus an ordered event script. Events are
//! consumed front-to-back each control period:
//!
//! * `goto` waits until its robot's current goal is reached (the tolerance
//!   may be hit at speed — robots are not required to stop), then assigns
//!   the new goal; a goal marked `pass_through` counts as reached anywhere
//!   inside the wider waypoint radius, heading free, so routes flow through
//!   intermediate waypoints without braking,
//! * `couple` waits for both robots, then switches the controller into the
//!   docking mode with a rigid-pair goal derived from the leader pose,
//! * `transfer` holds until the dock latch has been set for the given
//!   duration,
//! * `uncouple` releases the latch immediately and enters a departure grace
//!   in which the keep-out disk stays off until the robots have separated.
//!
//! The run terminates when the script is drained and both robots sit within
//! the goal tolerance; exceeding `max_sim_time` is reported as a distinct
//! [`RunOutcome::TimedOut`], not an error.

use crate::coupling::{
    docked_partner_pose, residual_alignment, residual_docking_axis, residual_vector,
    CouplingParams, ResidualVector,
};
use crate::dynamics::{rollout, step_central};
use crate::metrics::{compute_metrics, MetricsReport};
use crate::nlp::{ControllerConfig, CorridorMode, MpcProblem, SlackCaps};
use crate::solver::{solve, SolveResult, SolveStatus, WarmStart};
use crate::types::{CentralInput, CentralState, RobotState};
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::collections::VecDeque;

/// Identifies one robot of the pair in scripts and reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RobotId {
    One,
    Two,
}

impl RobotId {
    #[inline]
    pub fn index(self) -> usize {
        match self {
            RobotId::One => 0,
            RobotId::Two => 1,
        }
    }
}

/// One mission event. Scripts are processed strictly in order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptEvent {
    /// Assign a new goal pose once the robot's current goal is reached.
    /// A `pass_through` goal is a route shaping point: it counts as reached
    /// within the waypoint radius regardless of heading, so the robot carries
    /// its speed through it instead of settling.
    Goto {
        robot: RobotId,
        pose: RobotState,
        pass_through: bool,
    },
    /// Enter docking mode; robot 2's goal is derived rigidly from the leader
    /// goal via the coupling geometry.
    Couple { leader_goal: RobotState },
    /// Hold the coupled mode until the latch has been set for `duration`
    /// seconds.
    Transfer { duration: f64 },
    /// Release the latch and separate.
    Uncouple,
}

/// Mission phase, ordered by progress toward the docked condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    FarRangeRendezvous,
    Closing,
    FinalApproach,
    Docked,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::FarRangeRendezvous => "far_range_rendezvous",
            Phase::Closing => "closing",
            Phase::FinalApproach => "final_approach",
            Phase::Docked => "docked",
        }
    }
}

/// Geometric phase of the approach. `close_range_d` separates the closing
/// leg from the final approach; the latch overrides everything.
pub fn classify_phase(
    z: &CentralState,
    p: &CouplingParams,
    close_range_d: f64,
    docked: bool,
) -> Phase {
    if docked {
        return Phase::Docked;
    }
    if residual_docking_axis(z, p).abs() > p.approach_half_cone {
        Phase::FarRangeRendezvous
    } else if z.separation() > close_range_d {
        Phase::Closing
    } else {
        Phase::FinalApproach
    }
}

/// Thresholds under which the physical latch engages. All comparisons are
/// closed: a state exactly on a threshold latches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LatchThresholds {
    /// Axis residual bound, radians.
    pub axis: f64,
    /// Alignment residual bound, radians.
    pub align: f64,
    /// Bound on `|d - contact_distance|`, metres.
    pub gap: f64,
    /// Bound on the relative translational speed, m/s.
    pub speed: f64,
}

impl Default for LatchThresholds {
    fn default() -> Self {
        LatchThresholds {
            axis: 2f64.to_radians(),
            align: 2f64.to_radians(),
            gap: 0.01,
            speed: 0.05,
        }
    }
}

/// Sticky dock latch: once set it stays set until an uncouple event clears
/// it, mirroring a mechanical interlock.
#[derive(Clone, Copy, Debug)]
pub struct DockLatch {
    pub thresholds: LatchThresholds,
    pub docked: bool,
    pub dock_time: Option<f64>,
}

impl DockLatch {
    pub fn new(thresholds: LatchThresholds) -> Self {
        DockLatch {
            thresholds,
            docked: false,
            dock_time: None,
        }
    }

    /// True when the pose and velocity satisfy every latch threshold.
    pub fn conditions_met(
        z: &CentralState,
        nu: &CentralInput,
        p: &CouplingParams,
        th: &LatchThresholds,
    ) -> bool {
        let [dvx, dvy] = nu.relative_velocity();
        residual_docking_axis(z, p).abs() <= th.axis
            && residual_alignment(z, p).abs() <= th.align
            && (z.separation() - p.contact_distance).abs() <= th.gap
            && dvx.hypot(dvy) <= th.speed
    }

    /// Latches if the conditions hold at time `t`; never unlatches.
    pub fn update(&mut self, z: &CentralState, nu: &CentralInput, p: &CouplingParams, t: f64) {
        if !self.docked && Self::conditions_met(z, nu, p, &self.thresholds) {
            self.docked = true;
            self.dock_time = Some(t);
        }
    }

    pub fn clear(&mut self) {
        self.docked = false;
        self.dock_time = None;
    }
}

/// True when `actual` lies within the position and heading tolerances of
/// `goal`. Both comparisons are closed.
pub fn pose_reached(actual: &RobotState, goal: &RobotState, pos_tol: f64, heading_tol: f64) -> bool {
    let pos_err = (actual.px - goal.px).hypot(actual.py - goal.py);
    let heading_err = crate::angles::wrap_to_pm_pi(actual.theta - goal.theta).abs();
    pos_err <= pos_tol && heading_err <= heading_tol
}

/// Execution options independent of the controller tuning.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimOptions {
    /// Separation below which the approach counts as final, metres.
    pub close_range_d: f64,
    /// Goal position tolerance, metres.
    pub goal_pos_tol: f64,
    /// Goal heading tolerance, radians.
    pub goal_heading_tol: f64,
    /// Commanded-speed bound below which a stop goal counts as reached, m/s.
    /// A delivery needs an effective standstill; pass-through waypoints
    /// ignore it.
    pub goal_speed_tol: f64,
    /// Radius within which a pass-through waypoint counts as visited, metres.
    pub waypoint_pos_tol: f64,
    /// Deceleration bound used to schedule the relative-speed cap on the
    /// final approach, m/s². The cap follows a constant-deceleration profile
    /// toward the contact gap so the pair settles instead of punching
    /// through contact and rebounding.
    pub brake_decel: f64,
    pub latch: LatchThresholds,
    /// Wall of simulated seconds after which the run times out.
    pub max_sim_time: f64,
    /// Weight of the `ω²` term in the energy metric (0 excludes rotation).
    pub energy_rot_weight: f64,
    /// Residual caps while approaching from beyond `close_range_d`.
    pub approach_caps: SlackCaps,
    /// Residual caps once the separation drops below `close_range_d`; the
    /// tighter relative-speed cap damps the arrival so the pair settles at
    /// contact distance instead of rebounding through it.
    pub final_caps: SlackCaps,
    /// Residual caps once latched.
    pub docked_caps: SlackCaps,
    /// Half-width of uniform position noise added to the plant each step.
    /// Zero (the default) keeps the plant identical to the model.
    pub disturbance: f64,
    /// Seed for the disturbance stream.
    pub seed: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            close_range_d: 1.0,
            goal_pos_tol: 0.05,
            goal_heading_tol: 5f64.to_radians(),
            goal_speed_tol: 0.05,
            waypoint_pos_tol: 0.3,
            brake_decel: 0.9,
            latch: LatchThresholds::default(),
            max_sim_time: 120.0,
            energy_rot_weight: 0.0,
            approach_caps: SlackCaps::default(),
            final_caps: SlackCaps::final_approach(),
            docked_caps: SlackCaps::post_dock(),
            disturbance: 0.0,
            seed: 0,
        }
    }
}

/// A complete closed-loop mission specification.
#[derive(Clone, Debug, Serialize)]
pub struct Scenario {
    pub initial: CentralState,
    pub controller: ControllerConfig,
    pub script: Vec<ScriptEvent>,
    pub options: SimOptions,
}

impl Scenario {
    /// Checks script well-formedness and basic state sanity.
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: &str| Err(SimError::InvalidScenario(msg.into()));
        if let Err(msg) = self.controller.try_validate() {
            return bad(&msg);
        }
        if self.initial.separation() <= 1e-6 {
            return bad("initial robot centers coincide");
        }
        if !(self.options.max_sim_time > 0.0) {
            return bad("max_sim_time must be positive");
        }
        if !(self.options.goal_pos_tol > 0.0 && self.options.goal_heading_tol > 0.0) {
            return bad("goal tolerances must be positive");
        }
        if !(self.options.goal_speed_tol > 0.0) {
            return bad("goal_speed_tol must be positive");
        }
        if !(self.options.waypoint_pos_tol > 0.0) {
            return bad("waypoint_pos_tol must be positive");
        }
        if !(self.options.brake_decel > 0.0) {
            return bad("brake_decel must be positive");
        }
        let mut coupled = false;
        let mut couple_seen = false;
        for ev in &self.script {
            match ev {
                ScriptEvent::Goto { .. } => {
                    if coupled {
                        return bad("goto is not allowed while the robots are coupled");
                    }
                }
                ScriptEvent::Couple { .. } => {
                    if couple_seen {
                        return bad("at most one couple segment per scenario");
                    }
                    coupled = true;
                    couple_seen = true;
                }
                ScriptEvent::Transfer { duration } => {
                    if !coupled {
                        return bad("transfer requires an active couple segment");
                    }
                    if !(duration.is_finite() && *duration > 0.0) {
                        return bad("transfer duration must be positive and finite");
                    }
                }
                ScriptEvent::Uncouple => {
                    if !coupled {
                        return bad("uncouple requires an active couple segment");
                    }
                    coupled = false;
                }
            }
        }
        Ok(())
    }
}

/// Closed-loop failures that abort a run.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("solver numeric failure at t = {time:.2} s")]
    Numeric { time: f64 },
}

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    Completed,
    TimedOut,
}

/// One logged control period: the state at `t`, the input applied over
/// `[t, t+dt)` and the diagnostics evaluated at that instant. The final row
/// of a log carries the terminal state with a zero input.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogRow {
    pub t: f64,
    pub state: CentralState,
    pub input: CentralInput,
    pub residuals: ResidualVector,
    pub phase: Phase,
    pub status: SolveStatus,
    pub inner_iterations: usize,
}

/// Uniformly sampled closed-loop trace plus the mission milestones.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryLog {
    pub dt: f64,
    pub rows: Vec<LogRow>,
    pub dock_time: Option<f64>,
    pub undock_time: Option<f64>,
    /// Instant each robot first satisfied its final scripted goal.
    pub completion: [Option<f64>; 2],
}

/// Result of a full scenario run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub log: TrajectoryLog,
    pub metrics: MetricsReport,
    pub outcome: RunOutcome,
}

/// One controller invocation: the input to apply now, the predicted state
/// sequence behind it and the raw solver result.
#[derive(Clone, Debug)]
pub struct MpcStep {
    pub input: CentralInput,
    pub predicted: Vec<CentralState>,
    pub result: SolveResult,
}

/// Solves one receding-horizon problem and extracts the first input, clamped
/// to the configured bounds. `predicted` holds the successor states of the
/// full optimized plan.
pub fn mpc_step(
    cfg: &ControllerConfig,
    z0: &CentralState,
    goal: &CentralState,
    history: &[CentralInput; 2],
    corridor: CorridorMode,
    caps: Option<SlackCaps>,
    warm: &WarmStart,
) -> MpcStep {
    let problem = MpcProblem::new(cfg, z0, goal, history, corridor, caps);
    let n = 6 * cfg.horizon;
    let x0 = match &warm.x0 {
        Some(x) if x.len() == n => x.clone(),
        _ => vec![0.0; n],
    };
    let result = solve(&problem, &x0, warm.multipliers.as_deref(), &cfg.solver);
    let input = clamp_input(
        CentralInput::from_array(result.x[..6].try_into().expect("horizon ≥ 1")),
        cfg,
    );
    let inputs: Vec<CentralInput> = result
        .x
        .chunks_exact(6)
        .map(|b| CentralInput::from_array(b.try_into().unwrap()))
        .collect();
    let predicted = rollout(z0, &inputs, cfg.dt);
    MpcStep {
        input,
        predicted,
        result,
    }
}

fn clamp_input(u: CentralInput, cfg: &ControllerConfig) -> CentralInput {
    let nu = cfg.limits.nu_max;
    let om = cfg.limits.omega_max;
    let c = |v: f64, b: f64| v.clamp(-b, b);
    CentralInput::from_array([
        c(u.u1.vx, nu),
        c(u.u1.vy, nu),
        c(u.u1.omega, om),
        c(u.u2.vx, nu),
        c(u.u2.vy, nu),
        c(u.u2.omega, om),
    ])
}

/// Shifts a decision vector one control period forward: drop the first input
/// block, repeat the last.
fn shift_decision(x: &[f64]) -> Vec<f64> {
    debug_assert!(x.len() >= 6 && x.len() % 6 == 0);
    let mut out = Vec::with_capacity(x.len());
    out.extend_from_slice(&x[6..]);
    out.extend_from_slice(&x[x.len() - 6..]);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Independent,
    Approach,
    Docked,
    Departure,
}

impl Mode {
    fn tag(self) -> u8 {
        match self {
            Mode::Independent => 0,
            Mode::Approach => 1,
            Mode::Docked => 2,
            Mode::Departure => 3,
        }
    }
}

#[inline]
fn robot_pose(z: &CentralState, i: usize) -> &RobotState {
    match i {
        0 => &z.r1,
        _ => &z.r2,
    }
}

/// Final-approach slack caps with the relative-speed bound tightened to a
/// constant-deceleration profile toward the contact gap. Each step may close
/// at most 80% of the remaining gap, so the pair settles onto the interface
/// instead of punching through contact and rebounding. The floor keeps the
/// latch speed threshold reachable at zero gap.
fn braked_final_caps(
    base: SlackCaps,
    separation: f64,
    contact: f64,
    brake_decel: f64,
    dt: f64,
    floor_speed: f64,
) -> SlackCaps {
    let gap = (separation - contact).max(0.0);
    let v_cap = (2.0 * brake_decel * gap)
        .sqrt()
        .min(0.8 * gap / dt)
        .max(floor_speed);
    let mut caps = base;
    caps.soft = caps.soft.min(v_cap * v_cap);
    caps
}

/// Runs the scripted mission to completion or timeout.
pub fn run_scenario(sc: &Scenario) -> Result<RunResult, SimError> {
    sc.validate()?;
    let opt = sc.options;
    let p = sc.controller.coupling;
    let dt = sc.controller.dt;
    let cfg_coupled = sc.controller.clone();
    let mut cfg_free = sc.controller.clone();
    cfg_free.weights = cfg_free.weights.without_coupling();

    let mut z = sc.initial;
    let mut goals = [z.r1, z.r2];
    let mut passing = [false; 2];
    let mut queue: VecDeque<ScriptEvent> = sc.script.iter().copied().collect();
    let mut mode = Mode::Independent;
    let mut latch = DockLatch::new(opt.latch);
    let mut history = [CentralInput::default(); 2];
    let mut warm = WarmStart::default();
    let mut last_shape: Option<(u8, usize)> = None;
    let mut consecutive_failures = 0usize;
    let mut phase_floor = Phase::FarRangeRendezvous;
    let mut rows: Vec<LogRow> = Vec::new();
    let mut dock_time = None;
    let mut undock_time = None;
    let mut completion: [Option<f64>; 2] = [None, None];
    let mut rng = if opt.disturbance > 0.0 {
        Some(rand_chacha::ChaCha8Rng::seed_from_u64(opt.seed))
    } else {
        None
    };

    let reached_now = |z: &CentralState,
                       goals: &[RobotState; 2],
                       passing: &[bool; 2],
                       nu: &CentralInput,
                       i: usize| {
        let pose = robot_pose(z, i);
        if passing[i] {
            let pos_err = (pose.px - goals[i].px).hypot(pose.py - goals[i].py);
            pos_err <= opt.waypoint_pos_tol
        } else {
            let u = if i == 0 { &nu.u1 } else { &nu.u2 };
            pose_reached(pose, &goals[i], opt.goal_pos_tol, opt.goal_heading_tol)
                && u.vx.hypot(u.vy) <= opt.goal_speed_tol
        }
    };

    let mut step = 0usize;
    let (t_end, outcome) = loop {
        let t = step as f64 * dt;
        let mut reached = [
            reached_now(&z, &goals, &passing, &history[1], 0),
            reached_now(&z, &goals, &passing, &history[1], 1),
        ];
        for i in 0..2 {
            if reached[i] && completion[i].is_none() {
                completion[i] = Some(t);
            }
        }

        while let Some(ev) = queue.front().copied() {
            match ev {
                ScriptEvent::Goto {
                    robot,
                    pose,
                    pass_through,
                } => {
                    let i = robot.index();
                    if !reached[i] {
                        break;
                    }
                    goals[i] = pose;
                    passing[i] = pass_through;
                    completion[i] = None;
                    reached[i] = reached_now(&z, &goals, &passing, &history[1], i);
                    if reached[i] {
                        completion[i] = Some(t);
                    }
                }
                ScriptEvent::Couple { leader_goal } => {
                    if !(reached[0] && reached[1]) {
                        break;
                    }
                    goals = [leader_goal, docked_partner_pose(&leader_goal, &p)];
                    passing = [false; 2];
                    completion = [None, None];
                    latch.update(&z, &history[1], &p, t);
                    mode = if latch.docked {
                        dock_time = latch.dock_time;
                        Mode::Docked
                    } else {
                        Mode::Approach
                    };
                    for i in 0..2 {
                        reached[i] = reached_now(&z, &goals, &passing, &history[1], i);
                        if reached[i] {
                            completion[i] = Some(t);
                        }
                    }
                }
                ScriptEvent::Transfer { duration } => match latch.dock_time {
                    Some(t0) if t >= t0 + duration - 1e-9 => {}
                    _ => break,
                },
                ScriptEvent::Uncouple => {
                    if latch.docked {
                        undock_time = Some(t);
                    }
                    latch.clear();
                    mode = Mode::Departure;
                    phase_floor = Phase::FarRangeRendezvous;
                    goals = [z.r1, z.r2];
                    passing = [false; 2];
                    reached = [true, true];
                    completion = [Some(t), Some(t)];
                }
            }
            queue.pop_front();
        }

        if queue.is_empty() && reached[0] && reached[1] {
            break (t, RunOutcome::Completed);
        }
        if t >= opt.max_sim_time {
            break (t, RunOutcome::TimedOut);
        }

        if mode == Mode::Departure && z.separation() >= p.keep_out_radius {
            mode = Mode::Independent;
        }
        let (cfg, corridor, caps) = match mode {
            Mode::Independent => (&cfg_free, CorridorMode::FullDisk, None),
            Mode::Approach => {
                let caps = if z.separation() < opt.close_range_d {
                    braked_final_caps(
                        opt.final_caps,
                        z.separation(),
                        p.contact_distance,
                        opt.brake_decel,
                        dt,
                        latch.thresholds.speed,
                    )
                } else {
                    opt.approach_caps
                };
                (&cfg_coupled, CorridorMode::Gated, Some(caps))
            }
            Mode::Docked => (&cfg_coupled, CorridorMode::Gated, Some(opt.docked_caps)),
            Mode::Departure => (&cfg_free, CorridorMode::Disabled, None),
        };

        let goal_state = CentralState::new(goals[0], goals[1]);
        let mut solved = mpc_step(cfg, &z, &goal_state, &history, corridor, caps, &warm);
        if solved.result.status == SolveStatus::NumericError {
            // One cold retry; a second numeric failure aborts the run.
            solved = mpc_step(
                cfg,
                &z,
                &goal_state,
                &history,
                corridor,
                caps,
                &WarmStart::default(),
            );
            if solved.result.status == SolveStatus::NumericError {
                return Err(SimError::Numeric { time: t });
            }
        }
        let shape = (mode.tag(), solved.result.multipliers.len());

        let raw_phase = classify_phase(&z, &p, opt.close_range_d, latch.docked);
        let phase = raw_phase.max(phase_floor);
        phase_floor = phase;
        let u = solved.input;
        rows.push(LogRow {
            t,
            state: z,
            input: u,
            residuals: residual_vector(&z, &u, &p),
            phase,
            status: solved.result.status,
            inner_iterations: solved.result.inner_iterations,
        });

        let mut z_next = step_central(&z, &u, dt);
        if let Some(rng) = rng.as_mut() {
            let a = opt.disturbance;
            let mut arr = z_next.as_array();
            for idx in [0, 1, 3, 4] {
                arr[idx] += rng.gen_range(-a..=a);
            }
            z_next = CentralState::from_array(arr);
        }
        history = [history[1], u];

        if mode == Mode::Approach {
            latch.update(&z_next, &u, &p, t + dt);
            if latch.docked {
                mode = Mode::Docked;
                dock_time = latch.dock_time;
            }
        }

        // A budget-limited solve that still produced a feasible plan is usable;
        // only infeasible outcomes count toward the cold-restart trigger.
        let failed = solved.result.status == SolveStatus::InfeasibleStall
            || solved.result.max_violation > cfg.solver.constraint_tol;
        if failed {
            consecutive_failures += 1;
        } else {
            consecutive_failures = 0;
        }
        if consecutive_failures >= 2 {
            warm = WarmStart::default();
            consecutive_failures = 0;
        } else {
            let carry_multipliers = last_shape == Some(shape);
            warm = WarmStart {
                x0: Some(shift_decision(&solved.result.x)),
                multipliers: carry_multipliers.then(|| solved.result.multipliers.clone()),
            };
        }
        last_shape = Some(shape);

        z = z_next;
        step += 1;
    };

    let raw_phase = classify_phase(&z, &p, opt.close_range_d, latch.docked);
    let phase = raw_phase.max(phase_floor);
    let last_status = rows
        .last()
        .map(|r| r.status)
        .unwrap_or(SolveStatus::Converged);
    rows.push(LogRow {
        t: t_end,
        state: z,
        input: CentralInput::default(),
        residuals: residual_vector(&z, &CentralInput::default(), &p),
        phase,
        status: last_status,
        inner_iterations: 0,
    });

    let log = TrajectoryLog {
        dt,
        rows,
        dock_time,
        undock_time,
        completion,
    };
    let metrics = compute_metrics(&log, opt.energy_rot_weight);
    Ok(RunResult {
        log,
        metrics,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::ControlInput;
    use approx::assert_relative_eq;

    fn state(p1: [f64; 3], p2: [f64; 3]) -> CentralState {
        CentralState::new(
            RobotState::new(p1[0], p1[1], p1[2]),
            RobotState::new(p2[0], p2[1], p2[2]),
        )
    }

    fn docked_pair_at(x: f64, y: f64) -> CentralState {
        state([x, y, 0.0], [x, y + 0.2, 0.0])
    }

    #[test]
    fn phase_classification_examples() {
        let p = CouplingParams::default();
        // Head-on far start: exactly on axis, 4 m out.
        let z = state([0.0, -2.0, 0.0], [0.0, 2.0, 0.0]);
        assert_eq!(classify_phase(&z, &p, 1.0, false), Phase::Closing);
        // Inside the cone and inside close range.
        let z = state([0.0, 0.0, 0.0], [0.0, 0.5, 0.0]);
        assert_eq!(classify_phase(&z, &p, 1.0, false), Phase::FinalApproach);
        // Partner 90° off the docking axis.
        let z = state([0.0, 0.0, 0.0], [2.0, 0.0, 0.0]);
        assert_eq!(classify_phase(&z, &p, 1.0, false), Phase::FarRangeRendezvous);
        // Latch overrides geometry.
        assert_eq!(classify_phase(&z, &p, 1.0, true), Phase::Docked);
        // Phases order by progress.
        assert!(Phase::FarRangeRendezvous < Phase::Closing);
        assert!(Phase::Closing < Phase::FinalApproach);
        assert!(Phase::FinalApproach < Phase::Docked);
    }

    #[test]
    fn latch_thresholds_are_closed() {
        let p = CouplingParams::default();
        let th = LatchThresholds::default();
        let nu = CentralInput::new(
            ControlInput::new(0.5, 0.0, 0.0),
            ControlInput::new(0.5 - 0.05, 0.0, 0.0),
        );
        // Separation exactly gap above contact, relative speed exactly at the
        // bound: still latches.
        let z = state([0.0, 0.0, 0.0], [0.0, 0.21, 0.0]);
        assert!(DockLatch::conditions_met(&z, &nu, &p, &th));
        let mut latch = DockLatch::new(th);
        latch.update(&z, &nu, &p, 1.25);
        assert!(latch.docked);
        assert_eq!(latch.dock_time, Some(1.25));
        // Sticky: worse conditions do not unlatch.
        let far = state([0.0, 0.0, 0.0], [0.0, 3.0, 0.0]);
        latch.update(&far, &nu, &p, 1.5);
        assert!(latch.docked && latch.dock_time == Some(1.25));
        latch.clear();
        assert!(!latch.docked && latch.dock_time.is_none());
    }

    #[test]
    fn latch_rejects_each_violated_threshold() {
        let p = CouplingParams::default();
        let th = LatchThresholds::default();
        let still = CentralInput::default();
        // Gap too large.
        let z = state([0.0, 0.0, 0.0], [0.0, 0.2101, 0.0]);
        assert!(!DockLatch::conditions_met(&z, &still, &p, &th));
        // Misaligned heading beyond 2°.
        let z = state([0.0, 0.0, 0.0], [0.0, 0.2, 0.1]);
        assert!(!DockLatch::conditions_met(&z, &still, &p, &th));
        // Off axis: partner sideways.
        let z = state([0.0, 0.0, 0.0], [0.2, 0.0, 0.0]);
        assert!(!DockLatch::conditions_met(&z, &still, &p, &th));
        // Relative speed above the bound.
        let z = state([0.0, 0.0, 0.0], [0.0, 0.2, 0.0]);
        let fast = CentralInput::new(ControlInput::new(0.1, 0.0, 0.0), ControlInput::default());
        assert!(!DockLatch::conditions_met(&z, &fast, &p, &th));
    }

    #[test]
    fn pose_tolerance_is_closed() {
        let goal = RobotState::new(0.0, 0.0, 0.0);
        let tol_p = 0.05;
        let tol_h = 5f64.to_radians();
        // Exactly on the position boundary: reached.
        assert!(pose_reached(
            &RobotState::new(tol_p, 0.0, 0.0),
            &goal,
            tol_p,
            tol_h
        ));
        assert!(!pose_reached(
            &RobotState::new(0.0501, 0.0, 0.0),
            &goal,
            tol_p,
            tol_h
        ));
        // Exactly on the heading boundary: reached.
        assert!(pose_reached(
            &RobotState::new(0.0, 0.0, tol_h),
            &goal,
            tol_p,
            tol_h
        ));
        // Wrapped heading within tolerance on the other side.
        assert!(pose_reached(
            &RobotState::new(0.0, 0.0, -4.9f64.to_radians()),
            &goal,
            tol_p,
            tol_h
        ));
        assert!(!pose_reached(
            &RobotState::new(0.0, 0.0, 6f64.to_radians()),
            &goal,
            tol_p,
            tol_h
        ));
    }

    #[test]
    fn script_validation_rules() {
        let base = Scenario {
            initial: state([0.0, -2.0, 0.0], [0.0, 2.0, 0.0]),
            controller: ControllerConfig::default(),
            script: vec![],
            options: SimOptions::default(),
        };
        let with = |script: Vec<ScriptEvent>| Scenario {
            script,
            ..base.clone()
        };
        let goal = RobotState::new(1.0, 0.0, 0.0);
        assert!(base.validate().is_ok());
        assert!(with(vec![ScriptEvent::Transfer { duration: 7.0 }])
            .validate()
            .is_err());
        assert!(with(vec![ScriptEvent::Uncouple]).validate().is_err());
        assert!(with(vec![
            ScriptEvent::Couple { leader_goal: goal },
            ScriptEvent::Goto {
                robot: RobotId::One,
                pose: goal,
                pass_through: false
            },
        ])
        .validate()
        .is_err());
        assert!(with(vec![
            ScriptEvent::Couple { leader_goal: goal },
            ScriptEvent::Uncouple,
            ScriptEvent::Couple { leader_goal: goal },
        ])
        .validate()
        .is_err());
        assert!(with(vec![
            ScriptEvent::Couple { leader_goal: goal },
            ScriptEvent::Transfer { duration: 7.0 },
            ScriptEvent::Uncouple,
            ScriptEvent::Goto {
                robot: RobotId::Two,
                pose: goal,
                pass_through: false
            },
        ])
        .validate()
        .is_ok());
        let coincident = Scenario {
            initial: state([0.0, 0.0, 0.0], [0.0, 0.0, 0.0]),
            ..base
        };
        assert!(coincident.validate().is_err());
    }

    #[test]
    fn trivial_scenario_terminates_immediately() {
        let sc = Scenario {
            initial: state([0.0, 0.0, 0.0], [3.0, 0.0, 0.0]),
            controller: ControllerConfig::default(),
            script: vec![],
            options: SimOptions::default(),
        };
        let run = run_scenario(&sc).unwrap();
        assert_eq!(run.outcome, RunOutcome::Completed);
        assert_eq!(run.log.rows.len(), 1);
        assert_eq!(run.log.rows[0].t, 0.0);
        assert_eq!(run.metrics.total.distance, 0.0);
        assert_eq!(run.metrics.total.energy, 0.0);
        assert_eq!(run.metrics.total.time, 0.0);
        assert_eq!(run.log.completion, [Some(0.0), Some(0.0)]);
    }

    #[test]
    fn docked_pair_moves_rigidly() {
        // Latched pair already cruising, commanded 2 m ahead: the first input
        // must keep both robots at near-identical velocities. (A cold start
        // from rest also stays rigid but ramps up slowly under the
        // acceleration smoothing, so the cruise history is the telling case.)
        let cfg = ControllerConfig::default();
        let z = docked_pair_at(0.0, 0.0);
        let goal = docked_pair_at(2.0, 0.0);
        let cruise = CentralInput::new(
            ControlInput::new(0.5, 0.0, 0.0),
            ControlInput::new(0.5, 0.0, 0.0),
        );
        let step = mpc_step(
            &cfg,
            &z,
            &goal,
            &[cruise; 2],
            CorridorMode::Gated,
            Some(SlackCaps::post_dock()),
            &WarmStart::default(),
        );
        let [dvx, dvy] = step.input.relative_velocity();
        assert!(
            dvx.hypot(dvy) < 1e-3,
            "relative speed {} too large",
            dvx.hypot(dvy)
        );
        assert!(step.input.u1.vx > 0.3, "pair should move toward the goal");
        assert!((step.input.u1.omega).abs() < 0.05);
    }

    #[test]
    fn approach_plan_closes_contact_gap() {
        // Head-on start: the optimized plan must shrink the distance residual
        // across the horizon while respecting the corridor.
        let cfg = ControllerConfig::default();
        let z = state([0.0, -2.0, 0.0], [0.0, 2.0, 0.0]);
        let goal = docked_pair_at(4.0, -0.1);
        let step = mpc_step(
            &cfg,
            &z,
            &goal,
            &[CentralInput::default(); 2],
            CorridorMode::Gated,
            Some(SlackCaps::default()),
            &WarmStart::default(),
        );
        let p = cfg.coupling;
        let first = crate::coupling::residual_distance(&step.predicted[0], &p);
        let last = crate::coupling::residual_distance(step.predicted.last().unwrap(), &p);
        assert!(
            last < 0.5 * first,
            "distance residual should shrink: {first} -> {last}"
        );
        for z in &step.predicted {
            assert!(
                crate::coupling::corridor_value(z, &p) >= -p.corridor_margin - 1e-6,
                "corridor violated in prediction"
            );
        }
    }

    #[test]
    fn plant_follows_model_exactly() {
        // Short independent hop; verify the logged closed loop is exactly the
        // Euler model and the time grid is uniform.
        let sc = Scenario {
            initial: state([0.0, 0.0, 0.0], [5.0, 0.0, 0.0]),
            controller: ControllerConfig::default(),
            script: vec![ScriptEvent::Goto {
                robot: RobotId::One,
                pose: RobotState::new(0.5, 0.0, 0.0),
                pass_through: false,
            }],
            options: SimOptions {
                max_sim_time: 20.0,
                ..SimOptions::default()
            },
        };
        let run = run_scenario(&sc).unwrap();
        assert_eq!(run.outcome, RunOutcome::Completed);
        let rows = &run.log.rows;
        assert!(rows.len() >= 3);
        for k in 0..rows.len() - 1 {
            assert_relative_eq!(rows[k].t, k as f64 * sc.controller.dt, epsilon = 1e-12);
            let predicted = step_central(&rows[k].state, &rows[k].input, sc.controller.dt);
            assert_eq!(predicted, rows[k + 1].state, "plant diverged at step {k}");
        }
        // Robot 2 never had a goal change: completed at t = 0, no motion.
        assert_eq!(run.log.completion[1], Some(0.0));
        assert!(run.metrics.robot2.distance < 1e-12);
        assert!(run.metrics.robot1.distance >= 0.45);
        // Phases never regress without dock events.
        for w in rows.windows(2) {
            assert!(w[0].phase <= w[1].phase);
        }
    }

    #[test]
    fn pass_through_waypoint_keeps_speed() {
        // Same two-leg route once with a braking waypoint and once with a
        // pass-through one: the pass-through run must carry speed through the
        // midpoint and finish sooner.
        let route = |pass_through: bool| Scenario {
            initial: state([0.0, 0.0, 0.0], [6.0, 3.0, 0.0]),
            controller: ControllerConfig::default(),
            script: vec![
                ScriptEvent::Goto {
                    robot: RobotId::One,
                    pose: RobotState::new(1.5, 0.0, 0.0),
                    pass_through,
                },
                ScriptEvent::Goto {
                    robot: RobotId::One,
                    pose: RobotState::new(3.0, 0.0, 0.0),
                    pass_through: false,
                },
            ],
            options: SimOptions {
                max_sim_time: 60.0,
                ..SimOptions::default()
            },
        };
        let speed_near_midpoint = |run: &RunResult| {
            run.log
                .rows
                .iter()
                .filter(|r| (r.state.r1.px - 1.5).abs() < 0.2)
                .map(|r| r.input.u1.vx.hypot(r.input.u1.vy))
                .fold(f64::INFINITY, f64::min)
        };
        let braking = run_scenario(&route(false)).unwrap();
        let flowing = run_scenario(&route(true)).unwrap();
        assert_eq!(braking.outcome, RunOutcome::Completed);
        assert_eq!(flowing.outcome, RunOutcome::Completed);
        assert!(speed_near_midpoint(&braking) < 0.1);
        assert!(speed_near_midpoint(&flowing) > 0.25);
        assert!(flowing.metrics.total.time < braking.metrics.total.time);
    }

    #[test]
    fn warm_start_shift_repeats_last_block() {
        let x: Vec<f64> = (0..18).map(f64::from).collect();
        let s = shift_decision(&x);
        assert_eq!(&s[..6], &x[6..12]);
        assert_eq!(&s[6..12], &x[12..18]);
        assert_eq!(&s[12..], &x[12..18]);
    }
}
