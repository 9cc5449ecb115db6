//! Derivative self-check: forward-mode AD against central finite differences
//! on randomized receding-horizon instances.
//!
//! Instances are rejection-sampled so no predicted trajectory brings the two
//! centers close enough to graze the bearing singularity — central
//! differences straddle kinks there while the analytic convention takes one
//! side, which would flag a false mismatch.

use crate::ad::Dual;
use crate::nlp::{ControllerConfig, CorridorMode, MpcProblem, SlackCaps};
use crate::solver::ConstrainedProblem;
use crate::types::{CentralState, ControlInput, RobotState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

/// Parameters of one self-check sweep.
#[derive(Clone, Copy, Debug)]
pub struct CheckSettings {
    /// Number of randomized instances.
    pub trials: usize,
    pub seed: u64,
    /// Central-difference step.
    pub step: f64,
    /// Maximum admissible relative error.
    pub tolerance: f64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        CheckSettings {
            trials: 100,
            seed: 7,
            step: 1e-6,
            tolerance: 1e-6,
        }
    }
}

/// Result of a sweep.
#[derive(Clone, Copy, Debug)]
pub struct CheckOutcome {
    pub instances: usize,
    /// Worst relative error across all objective-gradient and Jacobian
    /// entries, relative to `max(|ad|, |fd|, 1)`.
    pub max_rel_error: f64,
    /// Zero-based index of the instance holding the worst entry.
    pub worst_instance: usize,
    pub elapsed: Duration,
    pub pass: bool,
}

fn random_pose(rng: &mut ChaCha8Rng) -> RobotState {
    RobotState::new(
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
}

struct Instance {
    problem: MpcProblem,
    x: Vec<f64>,
}

fn sample_instance(rng: &mut ChaCha8Rng, trial: usize) -> Instance {
    let mut cfg = ControllerConfig::default();
    cfg.horizon = if trial % 2 == 0 { 5 } else { 20 };
    loop {
        let r1 = random_pose(rng);
        let mut r2 = random_pose(rng);
        // Keep the initial separation moderate.
        let mut d = ((r2.px - r1.px).powi(2) + (r2.py - r1.py).powi(2)).sqrt();
        if d < 1.2 {
            r2.px = r1.px + (r2.px - r1.px) / d.max(1e-9) * 1.2;
            r2.py = r1.py + (r2.py - r1.py) / d.max(1e-9) * 1.2;
            d = 1.2;
        }
        let z0 = CentralState::new(r1, r2);
        let goal = CentralState::new(random_pose(rng), random_pose(rng));
        let hist_input = |rng: &mut ChaCha8Rng| {
            crate::types::CentralInput::new(
                ControlInput::new(
                    rng.gen_range(-0.4..0.4),
                    rng.gen_range(-0.4..0.4),
                    rng.gen_range(-0.4..0.4),
                ),
                ControlInput::new(
                    rng.gen_range(-0.4..0.4),
                    rng.gen_range(-0.4..0.4),
                    rng.gen_range(-0.4..0.4),
                ),
            )
        };
        let history = [hist_input(rng), hist_input(rng)];
        let corridor = match trial % 3 {
            0 => CorridorMode::FullDisk,
            1 => CorridorMode::Gated,
            _ => CorridorMode::Disabled,
        };
        let caps = match trial % 4 {
            0 => None,
            1 => Some(SlackCaps::default()),
            2 => Some(SlackCaps::final_approach()),
            _ => Some(SlackCaps::post_dock()),
        };
        let problem = MpcProblem::new(&cfg, &z0, &goal, &history, corridor, caps);
        let n = problem.dim();
        // Modest inputs keep the predicted paths short.
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.35..0.35)).collect();

        // Reject plans whose predicted centers come close to coincidence.
        let mut z = z0.as_array();
        let dt = cfg.dt;
        let mut min_d = ((z[3] - z[0]).powi(2) + (z[4] - z[1]).powi(2)).sqrt();
        for k in 0..cfg.horizon {
            for i in 0..6 {
                z[i] += dt * x[6 * k + i];
            }
            min_d = min_d.min(((z[3] - z[0]).powi(2) + (z[4] - z[1]).powi(2)).sqrt());
        }
        if min_d >= 0.3 {
            return Instance { problem, x };
        }
    }
}

/// Worst entry deviation between two gradients of one scalar function,
/// relative to the gradient magnitude (floored at 1 to keep near-zero rows
/// absolute). Row-wise normalization is what bounds the finite-difference
/// roundoff floor `ε·|f|/h`, which scales with the function value and hence
/// with the gradient norm — per-entry ratios would flag healthy small entries
/// inside large gradients.
fn row_rel_error(ad: &[f64], fd: &[f64]) -> f64 {
    let scale = ad
        .iter()
        .chain(fd)
        .fold(1.0f64, |m, v| m.max(v.abs()));
    ad.iter()
        .zip(fd)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        / scale
}

/// Runs the sweep and reports the worst derivative mismatch.
pub fn run_gradient_check(settings: &CheckSettings) -> CheckOutcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut max_rel_error = 0.0f64;
    let mut worst_instance = 0;
    let h = settings.step;

    for trial in 0..settings.trials {
        let Instance { problem, x } = sample_instance(&mut rng, trial);
        let n = problem.dim();
        let m = problem.num_constraints();

        // One AD pass per coordinate: objective gradient plus full Jacobian.
        let mut duals: Vec<Dual> = x.iter().map(|&v| Dual::constant(v)).collect();
        let mut ad_grad = vec![0.0; n];
        let mut ad_jac = vec![0.0; m * n];
        let mut c_duals: Vec<Dual> = Vec::with_capacity(m);
        for i in 0..n {
            duals[i].eps = 1.0;
            ad_grad[i] = problem.objective(&duals).eps;
            c_duals.clear();
            problem.constraints(&duals, &mut c_duals);
            for (j, c) in c_duals.iter().enumerate() {
                ad_jac[j * n + i] = c.eps;
            }
            duals[i].eps = 0.0;
        }

        // Central differences on the same quantities.
        let mut xp = x.clone();
        let mut c_plus: Vec<f64> = Vec::with_capacity(m);
        let mut c_minus: Vec<f64> = Vec::with_capacity(m);
        let mut fd_grad = vec![0.0; n];
        let mut fd_jac = vec![0.0; m * n];
        for i in 0..n {
            xp[i] = x[i] + h;
            let f_plus = problem.objective(&xp);
            c_plus.clear();
            problem.constraints(&xp, &mut c_plus);
            xp[i] = x[i] - h;
            let f_minus = problem.objective(&xp);
            c_minus.clear();
            problem.constraints(&xp, &mut c_minus);
            xp[i] = x[i];

            fd_grad[i] = (f_plus - f_minus) / (2.0 * h);
            for j in 0..m {
                fd_jac[j * n + i] = (c_plus[j] - c_minus[j]) / (2.0 * h);
            }
        }

        let mut e = row_rel_error(&ad_grad, &fd_grad);
        for j in 0..m {
            e = e.max(row_rel_error(
                &ad_jac[j * n..(j + 1) * n],
                &fd_jac[j * n..(j + 1) * n],
            ));
        }
        if e > max_rel_error {
            max_rel_error = e;
            worst_instance = trial;
        }
    }

    CheckOutcome {
        instances: settings.trials,
        max_rel_error,
        worst_instance,
        elapsed: start.elapsed(),
        pass: max_rel_error < settings.tolerance,
    }
}
