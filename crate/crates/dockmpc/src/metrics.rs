//! Mission statistics extracted from closed-loop trajectory logs.
//!
//! Energy is the time integral of the squared translational speed,
//! `Σ (vx² + vy²)·Δt`, optionally extended with a weighted `ω²` term
//! (weight zero by default, so rotation is excluded). Distance integrates
//! the actual path length of each robot. Per-robot time is the instant the
//! robot first satisfied its final scripted goal; the total time is the
//! scenario makespan. Total energy and distance are exact sums of the
//! per-robot parts.

use crate::simulation::{TrajectoryLog};
use crate::solver::SolveStatus;
use serde::Serialize;

/// Time, energy and path length attributed to one robot (or the pair).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct RobotMetrics {
    /// Seconds until the final goal was first satisfied.
    pub time: f64,
    /// Integrated squared speed, J·s/kg-normalized (treated as joules).
    pub energy: f64,
    /// Path length, metres.
    pub distance: f64,
}

/// Aggregate solver behaviour over a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SolverStats {
    pub solves: usize,
    pub converged: usize,
    pub max_iterations: usize,
    pub infeasible_stalls: usize,
    pub numeric_errors: usize,
    pub mean_inner_iterations: f64,
}

/// Full per-run report. `total.energy` and `total.distance` are sums of the
/// per-robot values; `total.time` is the makespan of the whole mission.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MetricsReport {
    pub robot1: RobotMetrics,
    pub robot2: RobotMetrics,
    pub total: RobotMetrics,
    pub dock_time: Option<f64>,
    pub undock_time: Option<f64>,
    pub solver: SolverStats,
}

/// Percentage improvements of one report over a baseline,
/// `(baseline - ours) / baseline · 100` per metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImprovementSummary {
    pub time_pct: f64,
    pub energy_pct: f64,
    pub distance_pct: f64,
}

impl MetricsReport {
    /// Relative savings of `self` against `baseline` on the run totals.
    pub fn improvement_over(&self, baseline: &MetricsReport) -> ImprovementSummary {
        let pct = |ours: f64, base: f64| {
            if base == 0.0 {
                0.0
            } else {
                (base - ours) / base * 100.0
            }
        };
        ImprovementSummary {
            time_pct: pct(self.total.time, baseline.total.time),
            energy_pct: pct(self.total.energy, baseline.total.energy),
            distance_pct: pct(self.total.distance, baseline.total.distance),
        }
    }
}

/// Reduces a trajectory log to the mission metrics. `rot_weight` scales the
/// `ω²` contribution to energy; zero excludes rotation entirely.
pub fn compute_metrics(log: &TrajectoryLog, rot_weight: f64) -> MetricsReport {
    let rows = &log.rows;
    let duration = rows.last().map(|r| r.t).unwrap_or(0.0);
    let steps = rows.len().saturating_sub(1);

    let mut energy = [0.0f64; 2];
    let mut distance = [0.0f64; 2];
    let mut stats = SolverStats::default();
    let mut inner_total = 0usize;
    for k in 0..steps {
        let row = &rows[k];
        let u = [row.input.u1, row.input.u2];
        for r in 0..2 {
            energy[r] += (u[r].vx * u[r].vx + u[r].vy * u[r].vy
                + rot_weight * u[r].omega * u[r].omega)
                * log.dt;
        }
        let (a, b) = (&row.state, &rows[k + 1].state);
        distance[0] += (b.r1.px - a.r1.px).hypot(b.r1.py - a.r1.py);
        distance[1] += (b.r2.px - a.r2.px).hypot(b.r2.py - a.r2.py);

        stats.solves += 1;
        inner_total += row.inner_iterations;
        match row.status {
            SolveStatus::Converged => stats.converged += 1,
            SolveStatus::MaxIterations => stats.max_iterations += 1,
            SolveStatus::InfeasibleStall => stats.infeasible_stalls += 1,
            SolveStatus::NumericError => stats.numeric_errors += 1,
        }
    }
    if stats.solves > 0 {
        stats.mean_inner_iterations = inner_total as f64 / stats.solves as f64;
    }

    let time = [
        log.completion[0].unwrap_or(duration),
        log.completion[1].unwrap_or(duration),
    ];
    let robot = |r: usize| RobotMetrics {
        time: time[r],
        energy: energy[r],
        distance: distance[r],
    };
    MetricsReport {
        robot1: robot(0),
        robot2: robot(1),
        total: RobotMetrics {
            time: duration,
            energy: energy[0] + energy[1],
            distance: distance[0] + distance[1],
        },
        dock_time: log.dock_time,
        undock_time: log.undock_time,
        solver: stats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::ResidualVector;
    use crate::simulation::{LogRow, Phase};
    use crate::types::{CentralInput, CentralState, ControlInput, RobotState};
    use approx::assert_relative_eq;

    /// Robot 1 cruising +x at `v`, robot 2 parked 5 m away.
    fn cruise_log(v: f64, seconds: f64, dt: f64) -> TrajectoryLog {
        let steps = (seconds / dt).round() as usize;
        let mut rows = Vec::new();
        for k in 0..=steps {
            let t = k as f64 * dt;
            let state = CentralState::new(
                RobotState::new(v * t, 0.0, 0.0),
                RobotState::new(0.0, 5.0, 0.0),
            );
            let moving = k < steps;
            let input = CentralInput::new(
                ControlInput::new(if moving { v } else { 0.0 }, 0.0, 0.0),
                ControlInput::default(),
            );
            rows.push(LogRow {
                t,
                state,
                input,
                residuals: ResidualVector {
                    axis: 0.0,
                    align: 0.0,
                    dist: 0.0,
                    soft: 0.0,
                },
                phase: Phase::FarRangeRendezvous,
                status: if k % 3 == 0 {
                    crate::solver::SolveStatus::Converged
                } else {
                    crate::solver::SolveStatus::MaxIterations
                },
                inner_iterations: 10,
            });
        }
        TrajectoryLog {
            dt,
            rows,
            dock_time: Some(1.5),
            undock_time: None,
            completion: [Some(seconds), Some(0.0)],
        }
    }

    #[test]
    fn unit_cruise_integrates_to_ten() {
        // 1 m/s for 10 s: 10 m travelled, 10 J spent, all by robot 1.
        let m = compute_metrics(&cruise_log(1.0, 10.0, 0.25), 0.0);
        assert_relative_eq!(m.robot1.distance, 10.0, epsilon = 1e-9);
        assert_relative_eq!(m.robot1.energy, 10.0, epsilon = 1e-9);
        assert_relative_eq!(m.robot1.time, 10.0);
        assert_eq!(m.robot2.distance, 0.0);
        assert_eq!(m.robot2.energy, 0.0);
        assert_eq!(m.robot2.time, 0.0);
        assert_relative_eq!(m.total.time, 10.0);
        assert_eq!(m.dock_time, Some(1.5));
    }

    #[test]
    fn totals_are_sums_of_parts() {
        let m = compute_metrics(&cruise_log(0.8, 7.5, 0.25), 0.0);
        assert!((m.total.energy - (m.robot1.energy + m.robot2.energy)).abs() < 1e-9);
        assert!((m.total.distance - (m.robot1.distance + m.robot2.distance)).abs() < 1e-9);
    }

    #[test]
    fn stationary_log_reports_zeros() {
        let mut log = cruise_log(0.0, 5.0, 0.25);
        log.completion = [None, None];
        let m = compute_metrics(&log, 0.0);
        assert_eq!(m.total.distance, 0.0);
        assert_eq!(m.total.energy, 0.0);
        assert_relative_eq!(m.total.time, 5.0);
        // No completion recorded: per-robot time falls back to the makespan.
        assert_relative_eq!(m.robot1.time, 5.0);
    }

    #[test]
    fn rotation_excluded_unless_weighted() {
        let mut log = cruise_log(1.0, 2.0, 0.25);
        for row in &mut log.rows {
            row.input.u1.omega = 2.0;
        }
        let without = compute_metrics(&log, 0.0);
        let with = compute_metrics(&log, 1.0);
        assert_relative_eq!(without.robot1.energy, 2.0, epsilon = 1e-9);
        // ω² = 4 over 2 s adds 8 J.
        assert_relative_eq!(with.robot1.energy, 10.0, epsilon = 1e-9);
    }

    #[test]
    fn solver_stats_count_rows() {
        let m = compute_metrics(&cruise_log(1.0, 10.0, 0.25), 0.0);
        assert_eq!(m.solver.solves, 40);
        assert_eq!(m.solver.converged + m.solver.max_iterations, 40);
        assert_eq!(m.solver.converged, 14);
        assert_relative_eq!(m.solver.mean_inner_iterations, 10.0);
    }

    #[test]
    fn improvement_percentages() {
        let mk = |t: f64, e: f64, d: f64| MetricsReport {
            total: RobotMetrics {
                time: t,
                energy: e,
                distance: d,
            },
            ..MetricsReport::default()
        };
        let base = mk(10.0, 10.0, 10.0);
        let ours = mk(8.0, 9.0, 7.5);
        let imp = ours.improvement_over(&base);
        assert_relative_eq!(imp.time_pct, 20.0);
        assert_relative_eq!(imp.energy_pct, 10.0);
        assert_relative_eq!(imp.distance_pct, 25.0);
        // Degenerate baseline: reported as zero improvement, not NaN.
        let imp = ours.improvement_over(&mk(0.0, 0.0, 0.0));
        assert_eq!(imp.time_pct, 0.0);
    }
}
