//! Constrained nonlinear solver: augmented Lagrangian outer loop around a
//! projected limited-memory quasi-Newton inner minimizer.
//!
//! Problems expose a box-bounded decision vector, a smooth objective and
//! smooth inequality rows `c_i(x) ≥ 0`, all generic over the AD scalar, so
//! the solver differentiates the augmented Lagrangian exactly by forward
//! seeding — no user-supplied derivatives, no finite differencing.
//!
//! Inequalities enter through the standard shifted-penalty term
//! `ψ(c) = (max(0, λ - μ·c)² - λ²) / (2μ)`, multipliers update as
//! `λ ← max(0, λ - μ·c)`, and the penalty grows when the worst violation
//! stops contracting. The inner loop is L-BFGS with gradient projection on
//! the input box and monotone Armijo backtracking, so accepted iterates never
//! increase the merit value.

use crate::ad::{Dual, Scalar};
use std::collections::VecDeque;
use std::time::{Duration, Instant};

/// Box-bounded, inequality-constrained problem with AD-generic evaluators.
pub trait ConstrainedProblem {
    fn dim(&self) -> usize;
    fn num_constraints(&self) -> usize;
    /// Elementwise decision bounds `(lower, upper)`, both of length `dim()`.
    fn bounds(&self) -> (Vec<f64>, Vec<f64>);
    fn objective<S: Scalar>(&self, x: &[S]) -> S;
    /// Writes all constraint rows (feasible when `≥ 0`) into `out`.
    fn constraints<S: Scalar>(&self, x: &[S], out: &mut Vec<S>);
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SolverSettings {
    pub max_outer: usize,
    pub max_inner: usize,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub max_penalty: f64,
    /// Feasibility tolerance on the worst constraint violation.
    pub constraint_tol: f64,
    /// Convergence tolerance on the projected-gradient infinity norm.
    pub gradient_tol: f64,
    /// Inner termination on relative step size.
    pub step_tol: f64,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub lbfgs_memory: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            max_outer: 30,
            max_inner: 200,
            initial_penalty: 10.0,
            penalty_growth: 5.0,
            max_penalty: 1e8,
            constraint_tol: 1e-4,
            gradient_tol: 1e-5,
            step_tol: 1e-9,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            lbfgs_memory: 30,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Worst violation within `constraint_tol` and projected gradient within
    /// `gradient_tol`.
    Converged,
    /// Iteration budget exhausted; the best iterate found is returned.
    MaxIterations,
    /// Penalty saturated without the violation contracting.
    InfeasibleStall,
    /// An evaluation at an accepted iterate went non-finite.
    NumericError,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max_iter",
            SolveStatus::InfeasibleStall => "infeasible_stall",
            SolveStatus::NumericError => "numeric_error",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub max_violation: f64,
    pub status: SolveStatus,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    /// Final inequality multipliers, reusable as a warm start.
    pub multipliers: Vec<f64>,
    /// Worst violation after each outer iteration.
    pub violation_history: Vec<f64>,
    /// Exempt from the determinism guarantee; everything else is
    /// bit-reproducible for identical inputs.
    pub wall_time: Duration,
}

/// Warm-start data carried between consecutive solves.
#[derive(Clone, Debug, Default)]
pub struct WarmStart {
    pub x0: Option<Vec<f64>>,
    pub multipliers: Option<Vec<f64>>,
}

// ---------------------------------------------------------------------------
// Augmented Lagrangian merit evaluation.
// ---------------------------------------------------------------------------

struct AugLag<'a, P: ConstrainedProblem> {
    problem: &'a P,
    lambda: &'a [f64],
    mu: f64,
    dual_x: Vec<Dual>,
    dual_c: Vec<Dual>,
    c_buf: Vec<f64>,
}

impl<'a, P: ConstrainedProblem> AugLag<'a, P> {
    fn new(problem: &'a P, lambda: &'a [f64], mu: f64, n: usize) -> Self {
        AugLag {
            problem,
            lambda,
            mu,
            dual_x: vec![Dual::constant(0.0); n],
            dual_c: Vec::new(),
            c_buf: Vec::new(),
        }
    }

    /// Shifted quadratic penalty for one inequality row.
    #[inline]
    fn penalty<S: Scalar>(c: S, lambda: f64, mu: f64) -> S {
        let t = (-c * mu + lambda).max_zero();
        (t * t - lambda * lambda) / (2.0 * mu)
    }

    fn value(&mut self, x: &[f64]) -> Option<f64> {
        let mut v = self.problem.objective(x);
        if !self.lambda.is_empty() {
            self.c_buf.clear();
            self.problem.constraints(x, &mut self.c_buf);
            for (i, &c) in self.c_buf.iter().enumerate() {
                v += Self::penalty(c, self.lambda[i], self.mu);
            }
        }
        v.is_finite().then_some(v)
    }

    /// Merit value and full gradient by one forward-AD pass per coordinate.
    fn value_grad(&mut self, x: &[f64], grad: &mut Vec<f64>) -> Option<f64> {
        let n = x.len();
        grad.resize(n, 0.0);
        for (xd, &v) in self.dual_x.iter_mut().zip(x) {
            *xd = Dual::constant(v);
        }
        let mut value = 0.0;
        for i in 0..n {
            self.dual_x[i].eps = 1.0;
            let mut v = self.problem.objective(&self.dual_x);
            if !self.lambda.is_empty() {
                self.dual_c.clear();
                self.problem.constraints(&self.dual_x, &mut self.dual_c);
                for (j, &c) in self.dual_c.iter().enumerate() {
                    v = v + Self::penalty(c, self.lambda[j], self.mu);
                }
            }
            self.dual_x[i].eps = 0.0;
            if !(v.re.is_finite() && v.eps.is_finite()) {
                return None;
            }
            if i == 0 {
                value = v.re;
            }
            grad[i] = v.eps;
        }
        Some(value)
    }
}

// ---------------------------------------------------------------------------
// Projected L-BFGS inner loop.
// ---------------------------------------------------------------------------

#[inline]
fn project(x: &mut [f64], lb: &[f64], ub: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lb[i], ub[i]);
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Infinity norm of the projected gradient step `P(x - g) - x`.
fn projected_gradient_norm(x: &[f64], g: &[f64], lb: &[f64], ub: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for i in 0..x.len() {
        let moved = (x[i] - g[i]).clamp(lb[i], ub[i]) - x[i];
        m = m.max(moved.abs());
    }
    m
}

struct InnerOutcome {
    x: Vec<f64>,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
    numeric_error: bool,
}

type LbfgsPairs = VecDeque<(Vec<f64>, Vec<f64>, f64)>;

fn inner_minimize<P: ConstrainedProblem>(
    al: &mut AugLag<'_, P>,
    lb: &[f64],
    ub: &[f64],
    x0: &[f64],
    pairs: &mut LbfgsPairs,
    s: &SolverSettings,
) -> InnerOutcome {
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lb, ub);
    let mut grad = Vec::with_capacity(n);
    let mut f = match al.value_grad(&x, &mut grad) {
        Some(v) => v,
        None => {
            return InnerOutcome {
                x,
                grad_norm: f64::INFINITY,
                iterations: 0,
                converged: false,
                numeric_error: true,
            }
        }
    };

    let mut alpha_buf = vec![0.0; s.lbfgs_memory.max(pairs.len())];
    let mut converged = false;
    let mut iterations = 0;
    let mut grad_norm = projected_gradient_norm(&x, &grad, lb, ub);

    for iter in 0..s.max_inner {
        if grad_norm <= s.gradient_tol {
            converged = true;
            break;
        }
        iterations = iter + 1;

        // Two-loop recursion for d = -H·g.
        let mut d: Vec<f64> = grad.iter().map(|v| -v).collect();
        if !pairs.is_empty() {
            for (idx, (sv, yv, rho)) in pairs.iter().enumerate().rev() {
                let a = rho * dot(sv, &d);
                alpha_buf[idx] = a;
                for i in 0..n {
                    d[i] -= a * yv[i];
                }
            }
            let (s_last, y_last, _) = pairs.back().unwrap();
            let gamma = dot(s_last, y_last) / dot(y_last, y_last);
            for v in d.iter_mut() {
                *v *= gamma;
            }
            for (idx, (sv, yv, rho)) in pairs.iter().enumerate() {
                let b = rho * dot(yv, &d);
                let a = alpha_buf[idx];
                for i in 0..n {
                    d[i] += (a - b) * sv[i];
                }
            }
        }
        if dot(&d, &grad) >= 0.0 {
            // Quasi-Newton model lost descent; restart from steepest descent.
            pairs.clear();
            for i in 0..n {
                d[i] = -grad[i];
            }
        }

        // Monotone Armijo backtracking along the projected arc. Quasi-Newton
        // directions are tried at unit step; raw gradient steps are scaled so
        // the first trial moves O(1) in the decision variables even when the
        // penalty term inflates the gradient by many orders of magnitude.
        let mut alpha = if pairs.is_empty() {
            1.0 / norm_inf(&d).max(1.0)
        } else {
            1.0f64
        };
        let mut accepted: Option<(Vec<f64>, f64)> = None;
        while alpha >= 1e-16 {
            let mut xn = x.clone();
            for i in 0..n {
                xn[i] = (x[i] + alpha * d[i]).clamp(lb[i], ub[i]);
            }
            let gdx = {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += grad[i] * (xn[i] - x[i]);
                }
                acc
            };
            if let Some(fn_) = al.value(&xn) {
                if fn_ <= f + s.armijo_c * gdx.min(0.0) {
                    accepted = Some((xn, fn_));
                    break;
                }
            }
            alpha *= s.backtrack_factor;
        }
        let Some((xn, fn_)) = accepted else {
            if !pairs.is_empty() {
                // The quasi-Newton direction failed outright; drop the stale
                // curvature model and retry along the gradient.
                pairs.clear();
                continue;
            }
            // Even the scaled gradient step found no decrease: the iterate is
            // as good as the model gets at this penalty level.
            break;
        };

        let mut grad_new = Vec::with_capacity(n);
        let Some(fn_check) = al.value_grad(&xn, &mut grad_new) else {
            return InnerOutcome {
                x,
                grad_norm,
                iterations,
                converged: false,
                numeric_error: true,
            };
        };
        debug_assert!(fn_ <= f + 1e-9, "merit must not increase");
        let _ = fn_check;

        let sv: Vec<f64> = (0..n).map(|i| xn[i] - x[i]).collect();
        let yv: Vec<f64> = (0..n).map(|i| grad_new[i] - grad[i]).collect();
        let sy = dot(&sv, &yv);
        let step_inf = norm_inf(&sv);
        if sy > 1e-10 * dot(&sv, &sv).sqrt() * dot(&yv, &yv).sqrt() {
            while pairs.len() >= s.lbfgs_memory {
                pairs.pop_front();
            }
            pairs.push_back((sv, yv, 1.0 / sy));
        } else if sy < 0.0 {
            // Negative curvature along the step: the stored pairs no longer
            // model the local Hessian, and keeping them stalls progress.
            // (Tiny nonnegative curvature — e.g. crossing a penalty kink —
            // merely skips the update and keeps the memory.)
            pairs.clear();
        }
        x = xn;
        f = fn_;
        grad = grad_new;
        grad_norm = projected_gradient_norm(&x, &grad, lb, ub);
        log::trace!(
            "inner iter={iter} f={f:.9e} pg={grad_norm:.3e} alpha={alpha:.2e}"
        );
        if step_inf <= s.step_tol * (1.0 + norm_inf(&x)) {
            converged = grad_norm <= s.gradient_tol;
            break;
        }
    }
    if grad_norm <= s.gradient_tol {
        converged = true;
    }
    InnerOutcome {
        x,
        grad_norm,
        iterations,
        converged,
        numeric_error: false,
    }
}

// ---------------------------------------------------------------------------
// Outer loop.
// ---------------------------------------------------------------------------

/// Solves the problem from `x0`, optionally warm-starting the multipliers.
///
/// Never panics on numeric trouble: non-finite evaluations at accepted
/// iterates surface as [`SolveStatus::NumericError`] with the best iterate
/// found so far.
pub fn solve<P: ConstrainedProblem>(
    problem: &P,
    x0: &[f64],
    warm_multipliers: Option<&[f64]>,
    settings: &SolverSettings,
) -> SolveResult {
    let start = Instant::now();
    let n = problem.dim();
    let m = problem.num_constraints();
    assert_eq!(x0.len(), n, "initial guess dimension mismatch");
    let (lb, ub) = problem.bounds();
    assert!(lb.len() == n && ub.len() == n, "bounds dimension mismatch");

    let mut lambda = match warm_multipliers {
        Some(w) if w.len() == m => w.to_vec(),
        _ => vec![0.0; m],
    };
    let mut mu = settings.initial_penalty;
    let mut x = x0.to_vec();
    project(&mut x, &lb, &ub);

    let mut c_buf: Vec<f64> = Vec::with_capacity(m);
    let eval_state = |x: &[f64], c_buf: &mut Vec<f64>| -> Option<(f64, f64)> {
        let f = problem.objective(x);
        c_buf.clear();
        problem.constraints(x, c_buf);
        let mut viol = 0.0f64;
        for &c in c_buf.iter() {
            if !c.is_finite() {
                return None;
            }
            viol = viol.max(-c);
        }
        viol = viol.max(0.0);
        f.is_finite().then_some((f, viol))
    };

    // Best iterate: feasible-with-lowest-objective wins, otherwise the
    // smallest violation.
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    let ctol = settings.constraint_tol;
    let consider = |best: &mut Option<(Vec<f64>, f64, f64)>, x: &[f64], f: f64, v: f64| {
        let better = match best.as_ref() {
            None => true,
            Some((_, bf, bv)) => {
                if v <= ctol && *bv <= ctol {
                    f < *bf
                } else if v <= ctol {
                    true
                } else if *bv <= ctol {
                    false
                } else {
                    v < *bv
                }
            }
        };
        if better {
            *best = Some((x.to_vec(), f, v));
        }
    };

    let mut status = SolveStatus::MaxIterations;
    let mut outer_iterations = 0;
    let mut inner_iterations = 0;
    let mut violation_history = Vec::new();
    let mut prev_viol = f64::INFINITY;
    let mut prev_f = f64::INFINITY;
    let mut stall_count = 0usize;
    // Inner curvature memory, carried across outer rounds while the
    // subproblem (multipliers and penalty) is unchanged: restarting the
    // quasi-Newton model from scratch on an identical merit function was
    // measured to inflate stiff solves by an order of magnitude.
    let mut pairs = LbfgsPairs::new();

    match eval_state(&x, &mut c_buf) {
        Some((f, v)) => consider(&mut best, &x, f, v),
        None => {
            return SolveResult {
                x,
                objective: f64::NAN,
                max_violation: f64::NAN,
                status: SolveStatus::NumericError,
                outer_iterations: 0,
                inner_iterations: 0,
                multipliers: lambda,
                violation_history,
                wall_time: start.elapsed(),
            }
        }
    }

    for outer in 0..settings.max_outer {
        outer_iterations = outer + 1;
        let mut al = AugLag::new(problem, &lambda, mu, n);
        let inner = inner_minimize(&mut al, &lb, &ub, &x, &mut pairs, settings);
        inner_iterations += inner.iterations;
        if inner.numeric_error {
            status = SolveStatus::NumericError;
            break;
        }
        x = inner.x;

        let Some((f, viol)) = eval_state(&x, &mut c_buf) else {
            status = SolveStatus::NumericError;
            break;
        };
        violation_history.push(viol);
        consider(&mut best, &x, f, viol);
        log::trace!(
            "outer={outer} f={f:.9e} viol={viol:.3e} mu={mu:.1e} pg={:.3e} inner={}",
            inner.grad_norm,
            inner.iterations
        );

        if viol <= ctol && inner.converged {
            status = SolveStatus::Converged;
            for (i, &c) in c_buf.iter().enumerate() {
                lambda[i] = (lambda[i] - mu * c).max(0.0);
            }
            break;
        }

        let mut lambda_changed = false;
        for (i, &c) in c_buf.iter().enumerate() {
            let next = (lambda[i] - mu * c).max(0.0);
            if next != lambda[i] {
                lambda_changed = true;
            }
            lambda[i] = next;
        }
        let mu_before = mu;
        if viol > 0.25 * prev_viol {
            if mu >= settings.max_penalty {
                stall_count += 1;
                if stall_count >= 3 && viol > ctol {
                    status = SolveStatus::InfeasibleStall;
                    break;
                }
            } else {
                mu = (mu * settings.penalty_growth).min(settings.max_penalty);
            }
        } else {
            stall_count = 0;
        }
        if lambda_changed || mu != mu_before {
            pairs.clear();
        } else if viol <= ctol && (prev_f - f).abs() <= 1e-10 * (1.0 + f.abs()) {
            // Feasible, same subproblem, objective unmoved for a full round:
            // further rounds cannot change anything.
            break;
        }
        prev_f = f;
        prev_viol = viol;
    }

    let (bx, bf, bv) = best.expect("at least the initial iterate is recorded");
    SolveResult {
        x: bx,
        objective: bf,
        max_violation: bv,
        status,
        outer_iterations,
        inner_iterations,
        multipliers: lambda,
        violation_history,
        wall_time: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Separable quadratic `Σ w_i (x_i - b_i)²`, optionally with rows
    /// `x_i - lo_i ≥ 0`.
    struct Quadratic {
        w: Vec<f64>,
        b: Vec<f64>,
        lo_rows: Vec<(usize, f64)>,
        bounds: (Vec<f64>, Vec<f64>),
    }

    impl Quadratic {
        fn unconstrained(w: Vec<f64>, b: Vec<f64>) -> Self {
            let n = w.len();
            Quadratic {
                w,
                b,
                lo_rows: vec![],
                bounds: (vec![-1e6; n], vec![1e6; n]),
            }
        }
    }

    impl ConstrainedProblem for Quadratic {
        fn dim(&self) -> usize {
            self.w.len()
        }
        fn num_constraints(&self) -> usize {
            self.lo_rows.len()
        }
        fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
            self.bounds.clone()
        }
        fn objective<S: Scalar>(&self, x: &[S]) -> S {
            let mut acc = S::from_f64(0.0);
            for i in 0..x.len() {
                let d = x[i] - self.b[i];
                acc = acc + d * d * self.w[i];
            }
            acc
        }
        fn constraints<S: Scalar>(&self, x: &[S], out: &mut Vec<S>) {
            for &(i, lo) in &self.lo_rows {
                out.push(x[i] - lo);
            }
        }
    }

    struct Rosenbrock;

    impl ConstrainedProblem for Rosenbrock {
        fn dim(&self) -> usize {
            2
        }
        fn num_constraints(&self) -> usize {
            0
        }
        fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
            (vec![-10.0, -10.0], vec![10.0, 10.0])
        }
        fn objective<S: Scalar>(&self, x: &[S]) -> S {
            let a = x[1] - x[0] * x[0];
            let b = -x[0] + 1.0;
            a * a * 100.0 + b * b
        }
        fn constraints<S: Scalar>(&self, _x: &[S], _out: &mut Vec<S>) {}
    }

    #[test]
    fn weighted_quadratic_reaches_closed_form_minimizer() {
        let p = Quadratic::unconstrained(
            vec![1.0, 4.0, 30.0, 200.0, 0.5],
            vec![0.3, -1.2, 2.0, 0.05, -4.0],
        );
        let s = SolverSettings {
            gradient_tol: 1e-9,
            ..SolverSettings::default()
        };
        let r = solve(&p, &[0.0; 5], None, &s);
        assert_eq!(r.status, SolveStatus::Converged);
        for i in 0..5 {
            assert_relative_eq!(r.x[i], p.b[i], epsilon = 1e-6);
        }
        assert!(r.inner_iterations < 50);
    }

    #[test]
    fn active_inequality_lands_on_the_boundary() {
        // min x₁² + x₂²  s.t.  x₁ ≥ 1: optimum (1, 0) with λ = 2.
        let p = Quadratic {
            w: vec![1.0, 1.0],
            b: vec![0.0, 0.0],
            lo_rows: vec![(0, 1.0)],
            bounds: (vec![-10.0, -10.0], vec![10.0, 10.0]),
        };
        let s = SolverSettings {
            constraint_tol: 1e-7,
            gradient_tol: 1e-8,
            ..SolverSettings::default()
        };
        let r = solve(&p, &[5.0, 3.0], None, &s);
        assert_eq!(r.status, SolveStatus::Converged);
        assert_relative_eq!(r.x[0], 1.0, epsilon = 1e-5);
        assert_relative_eq!(r.x[1], 0.0, epsilon = 1e-5);
        // Complementarity: multiplier times slack vanishes.
        assert!((r.multipliers[0] * (r.x[0] - 1.0)).abs() <= 1e-3);
        assert_relative_eq!(r.multipliers[0], 2.0, epsilon = 1e-2);
    }

    #[test]
    fn inactive_inequality_multiplier_vanishes() {
        let p = Quadratic {
            w: vec![1.0, 1.0],
            b: vec![3.0, 0.0],
            lo_rows: vec![(0, 1.0)],
            bounds: (vec![-10.0, -10.0], vec![10.0, 10.0]),
        };
        let r = solve(&p, &[0.0, 0.0], None, &SolverSettings::default());
        assert_eq!(r.status, SolveStatus::Converged);
        assert_relative_eq!(r.x[0], 3.0, epsilon = 1e-5);
        assert!(r.multipliers[0].abs() < 1e-6);
    }

    #[test]
    fn box_bound_is_respected() {
        // Unconstrained minimizer at -2 but the box starts at 1.
        let p = Quadratic {
            w: vec![1.0],
            b: vec![-2.0],
            lo_rows: vec![],
            bounds: (vec![1.0], vec![3.0]),
        };
        let r = solve(&p, &[2.5], None, &SolverSettings::default());
        assert_eq!(r.status, SolveStatus::Converged);
        assert_relative_eq!(r.x[0], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn rosenbrock_within_inner_budget() {
        let r = solve(&Rosenbrock, &[-1.2, 1.0], None, &SolverSettings::default());
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.objective < 1e-6, "objective {}", r.objective);
        assert!(r.inner_iterations <= 200);
        assert_relative_eq!(r.x[0], 1.0, epsilon = 1e-4);
        assert_relative_eq!(r.x[1], 1.0, epsilon = 1e-4);
    }

    #[test]
    fn identical_inputs_give_identical_results() {
        let p = Quadratic {
            w: vec![2.0, 1.0, 5.0],
            b: vec![1.0, -0.5, 0.25],
            lo_rows: vec![(1, 0.0)],
            bounds: (vec![-4.0; 3], vec![4.0; 3]),
        };
        let a = solve(&p, &[0.3, 0.3, 0.3], None, &SolverSettings::default());
        let b = solve(&p, &[0.3, 0.3, 0.3], None, &SolverSettings::default());
        assert_eq!(a.x, b.x);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.max_violation, b.max_violation);
        assert_eq!(a.status, b.status);
        assert_eq!(a.inner_iterations, b.inner_iterations);
        assert_eq!(a.multipliers, b.multipliers);
    }

    #[test]
    fn non_finite_objective_reports_numeric_error() {
        struct Bad;
        impl ConstrainedProblem for Bad {
            fn dim(&self) -> usize {
                1
            }
            fn num_constraints(&self) -> usize {
                0
            }
            fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
                (vec![-1.0], vec![1.0])
            }
            fn objective<S: Scalar>(&self, x: &[S]) -> S {
                x[0] / 0.0
            }
            fn constraints<S: Scalar>(&self, _x: &[S], _out: &mut Vec<S>) {}
        }
        let r = solve(&Bad, &[0.5], None, &SolverSettings::default());
        assert_eq!(r.status, SolveStatus::NumericError);
    }

    #[test]
    fn converged_implies_tolerances() {
        let p = Quadratic {
            w: vec![1.0, 1.0],
            b: vec![0.0, 0.0],
            lo_rows: vec![(0, 1.0), (1, -2.0)],
            bounds: (vec![-10.0; 2], vec![10.0; 2]),
        };
        let s = SolverSettings::default();
        let r = solve(&p, &[-3.0, 4.0], None, &s);
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.max_violation <= s.constraint_tol);
    }
}
