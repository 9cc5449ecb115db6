//! Assembly of the coupling controller's optimization problem.
//!
//! The decision vector stacks both robots' velocity commands over the
//! horizon, six entries per step, so an `N`-step problem has `6N` variables
//! bounded by the component-wise velocity limits. States are recovered by a
//! single forward rollout inside every evaluation (single shooting), with
//! headings left unwrapped so the whole map stays differentiable.
//!
//! Constraint rows, all written as `c(x) ≥ 0`, come in two groups:
//!
//! 1. one spatial-separation row per predicted state — either the gated
//!    approach corridor or the plain keep-out disk, depending on mode,
//! 2. optionally two cap rows per coupling residual per predicted state,
//!    bounding each residual's magnitude. Tightening the caps after latch
//!    turns the coupling from an attracting cost into a hard invariant.

use crate::ad::{Dual, Scalar};
use crate::coupling::{
    raw_alignment_smooth, raw_axis_residual, raw_corridor, raw_distance_residual, raw_keep_out,
    raw_soft_docking, CouplingParams,
};
use crate::dynamics::rollout_unwrapped;
use crate::objective::{raw_smoothing_cost, raw_terminal_cost, TerminalWeights, WeightVector};
use crate::solver::{ConstrainedProblem, SolverSettings};
use crate::types::{CentralInput, CentralState, TimeStep};
use serde::Serialize;

/// Spatial-separation constraint applied to every predicted state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorridorMode {
    /// Keep-out disk gated open inside the approach cone (docking operation).
    Gated,
    /// Plain keep-out disk (independent operation).
    FullDisk,
    /// No separation row (departure grace while still inside the disk).
    Disabled,
}

/// Magnitude bounds on the four coupling residuals, in the residuals' own
/// units (m² for distance, radians for the angles, m²/s² for soft docking).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlackCaps {
    pub dist: f64,
    pub align: f64,
    pub soft: f64,
    pub axis: f64,
}

impl Default for SlackCaps {
    fn default() -> Self {
        SlackCaps {
            dist: 20.0,
            align: 2.1,
            soft: 10.0,
            axis: 3.2,
        }
    }
}

impl SlackCaps {
    /// Caps for the last metre of an approach. The relative-speed cap forces
    /// the plan to brake before contact, which settles the pair at docking
    /// distance instead of letting it punch through and rebound.
    pub fn final_approach() -> Self {
        SlackCaps {
            soft: 0.8,
            ..SlackCaps::default()
        }
    }

    /// Tight caps engaged once the dock has latched: the residuals may no
    /// longer leave a small neighbourhood of zero, which keeps the pair
    /// rigidly coupled while the goal cost drags it across the floor.
    pub fn post_dock() -> Self {
        SlackCaps {
            dist: 0.01,
            align: 0.05,
            soft: 0.01,
            axis: 0.05,
        }
    }

    /// Alignment cap translated into surrogate units: `|r| ≤ ε` on the exact
    /// residual is `2·sin²(r/2) ≤ 2·sin²(ε/2)` for `ε ≤ π`.
    fn align_surrogate_cap(&self) -> f64 {
        2.0 * (0.5 * self.align.min(std::f64::consts::PI)).sin().powi(2)
    }
}

/// Component-wise input box: `|v_x|, |v_y| ≤ nu_max`, `|ω| ≤ omega_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InputLimits {
    pub nu_max: f64,
    pub omega_max: f64,
}

impl Default for InputLimits {
    fn default() -> Self {
        InputLimits {
            nu_max: 0.65,
            omega_max: std::f64::consts::FRAC_PI_2,
        }
    }
}

/// Static controller configuration shared by every solve.
#[derive(Clone, Debug, Serialize)]
pub struct ControllerConfig {
    pub horizon: usize,
    pub dt: TimeStep,
    pub weights: WeightVector,
    pub terminal: TerminalWeights,
    pub coupling: CouplingParams,
    pub limits: InputLimits,
    pub solver: SolverSettings,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            horizon: 20,
            dt: 0.25,
            weights: WeightVector::default(),
            terminal: TerminalWeights::default(),
            coupling: CouplingParams::default(),
            limits: InputLimits::default(),
            // Receding-horizon solves tolerate a looser stationarity tolerance
            // than one-shot solves; the larger memory and budget pay for
            // themselves many times over on the stiff docked-mode problems.
            solver: SolverSettings {
                gradient_tol: 1e-4,
                max_inner: 400,
                lbfgs_memory: 60,
                ..SolverSettings::default()
            },
        }
    }
}

impl ControllerConfig {
    /// Panics on parameters the problem assembly cannot represent.
    /// Graceful validation for configuration paths.
    pub fn try_validate(&self) -> Result<(), String> {
        if self.horizon < 2 {
            return Err("horizon must cover at least two steps for the jerk window".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err("time step must be positive and finite".into());
        }
        if !(self.limits.nu_max > 0.0 && self.limits.omega_max > 0.0) {
            return Err("velocity limits must be positive".into());
        }
        self.coupling.validate()
    }

    pub fn validate(&self) {
        self.try_validate().expect("invalid controller configuration");
    }
}

/// One fully specified instance of the receding-horizon problem.
#[derive(Clone, Debug)]
pub struct MpcProblem {
    z0: [f64; 6],
    goal: [f64; 6],
    horizon: usize,
    dt: TimeStep,
    weights: WeightVector,
    terminal: TerminalWeights,
    coupling: CouplingParams,
    corridor: CorridorMode,
    caps: Option<SlackCaps>,
    history: [[f64; 6]; 2],
    limits: InputLimits,
}

impl MpcProblem {
    /// Builds the problem for the current state and goal. `history` holds the
    /// two previously applied inputs, oldest first.
    pub fn new(
        cfg: &ControllerConfig,
        z0: &CentralState,
        goal: &CentralState,
        history: &[CentralInput; 2],
        corridor: CorridorMode,
        caps: Option<SlackCaps>,
    ) -> Self {
        cfg.validate();
        MpcProblem {
            z0: z0.as_array(),
            goal: goal.as_array(),
            horizon: cfg.horizon,
            dt: cfg.dt,
            weights: cfg.weights,
            terminal: cfg.terminal,
            coupling: cfg.coupling,
            corridor,
            caps,
            history: [history[0].as_array(), history[1].as_array()],
            limits: cfg.limits,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    fn corridor_rows(&self) -> usize {
        match self.corridor {
            CorridorMode::Disabled => 0,
            _ => self.horizon,
        }
    }

    fn cap_rows(&self) -> usize {
        if self.caps.is_some() {
            8 * self.horizon
        } else {
            0
        }
    }

    fn coupling_active(&self) -> bool {
        let w = &self.weights;
        w.dist != 0.0 || w.align != 0.0 || w.soft != 0.0 || w.axis != 0.0
    }

    /// Machine-readable description for diagnostics output.
    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "variables": self.dim(),
            "constraints": self.num_constraints(),
            "horizon": self.horizon,
            "dt": self.dt,
            "corridor": self.corridor,
            "caps": self.caps,
            "weights": self.weights,
            "limits": self.limits,
        })
    }
}

impl ConstrainedProblem for MpcProblem {
    fn dim(&self) -> usize {
        6 * self.horizon
    }

    fn num_constraints(&self) -> usize {
        self.corridor_rows() + self.cap_rows()
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let step = [
            self.limits.nu_max,
            self.limits.nu_max,
            self.limits.omega_max,
            self.limits.nu_max,
            self.limits.nu_max,
            self.limits.omega_max,
        ];
        let mut ub = Vec::with_capacity(6 * self.horizon);
        for _ in 0..self.horizon {
            ub.extend_from_slice(&step);
        }
        let lb = ub.iter().map(|v| -v).collect();
        (lb, ub)
    }

    fn objective<S: Scalar>(&self, x: &[S]) -> S {
        let z0 = self.z0.map(S::from_f64);
        let states = rollout_unwrapped(z0, x, self.dt);
        let w = &self.weights;
        let mut acc = raw_smoothing_cost(x, &self.history[0], &self.history[1], w, self.dt);
        if self.coupling_active() {
            for (k, z) in states.iter().enumerate() {
                let u = &x[6 * k..6 * k + 6];
                let ra = raw_axis_residual(z, &self.coupling);
                let rs = raw_alignment_smooth(z, &self.coupling);
                let rd = raw_distance_residual(z, &self.coupling);
                let rv = raw_soft_docking(u);
                acc = acc
                    + ra * ra * w.axis
                    + rs * w.align
                    + rd * rd * w.dist
                    + rv * rv * w.soft;
            }
        }
        acc + raw_terminal_cost(states.last().expect("horizon ≥ 2"), &self.goal, &self.terminal)
    }

    fn constraints<S: Scalar>(&self, x: &[S], out: &mut Vec<S>) {
        if self.num_constraints() == 0 {
            return;
        }
        let z0 = self.z0.map(S::from_f64);
        let states = rollout_unwrapped(z0, x, self.dt);
        match self.corridor {
            CorridorMode::Gated => {
                for z in &states {
                    out.push(raw_corridor(z, &self.coupling) + self.coupling.corridor_margin);
                }
            }
            CorridorMode::FullDisk => {
                for z in &states {
                    out.push(raw_keep_out(z, &self.coupling));
                }
            }
            CorridorMode::Disabled => {}
        }
        if let Some(caps) = &self.caps {
            let align_cap = caps.align_surrogate_cap();
            for (k, z) in states.iter().enumerate() {
                let u = &x[6 * k..6 * k + 6];
                let ra = raw_axis_residual(z, &self.coupling);
                out.push(-(ra - caps.axis));
                out.push(ra + caps.axis);
                let rs = raw_alignment_smooth(z, &self.coupling);
                out.push(-(rs - align_cap));
                out.push(rs + align_cap);
                let rd = raw_distance_residual(z, &self.coupling);
                out.push(-(rd - caps.dist));
                out.push(rd + caps.dist);
                let rv = raw_soft_docking(u);
                out.push(-(rv - caps.soft));
                out.push(rv + caps.soft);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Derivative verification.
// ---------------------------------------------------------------------------

/// Worst relative disagreement between forward-mode and central-difference
/// derivatives over the objective gradient and the full constraint Jacobian.
#[derive(Clone, Debug, Serialize)]
pub struct GradientCheck {
    pub objective_max_rel: f64,
    pub constraint_max_rel: f64,
    pub entries: usize,
}

impl GradientCheck {
    pub fn worst(&self) -> f64 {
        self.objective_max_rel.max(self.constraint_max_rel)
    }
}

/// Compares every AD derivative against a central difference with step `h`,
/// using the error measure `|ad - fd| / (1 + |fd|)`.
pub fn check_gradient<P: ConstrainedProblem>(p: &P, x: &[f64], h: f64) -> GradientCheck {
    let n = p.dim();
    let m = p.num_constraints();
    assert_eq!(x.len(), n);
    let rel = |ad: f64, fd: f64| (ad - fd).abs() / (1.0 + fd.abs());

    let mut duals: Vec<Dual> = x.iter().map(|&v| Dual::constant(v)).collect();
    let mut c_dual: Vec<Dual> = Vec::with_capacity(m);
    let mut xp = x.to_vec();
    let mut c_plus: Vec<f64> = Vec::with_capacity(m);
    let mut c_minus: Vec<f64> = Vec::with_capacity(m);

    let mut objective_max_rel = 0.0f64;
    let mut constraint_max_rel = 0.0f64;
    for i in 0..n {
        duals[i].eps = 1.0;
        let f_dual = p.objective(&duals);
        c_dual.clear();
        p.constraints(&duals, &mut c_dual);
        duals[i].eps = 0.0;

        xp[i] = x[i] + h;
        let f_plus = p.objective(&xp);
        c_plus.clear();
        p.constraints(&xp, &mut c_plus);
        xp[i] = x[i] - h;
        let f_minus = p.objective(&xp);
        c_minus.clear();
        p.constraints(&xp, &mut c_minus);
        xp[i] = x[i];

        objective_max_rel = objective_max_rel.max(rel(f_dual.eps, (f_plus - f_minus) / (2.0 * h)));
        for j in 0..m {
            let fd = (c_plus[j] - c_minus[j]) / (2.0 * h);
            constraint_max_rel = constraint_max_rel.max(rel(c_dual[j].eps, fd));
        }
    }
    GradientCheck {
        objective_max_rel,
        constraint_max_rel,
        entries: n * (m + 1),
    }
}
