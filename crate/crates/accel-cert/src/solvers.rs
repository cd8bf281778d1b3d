//! GD, NAG, NAG-sc, and APG drivers with full trajectory recording.
//!
//! All methods share one update core: x_{k+1} = y_k - s * m_k where m_k is
//! the gradient (smooth problems) or the gradient mapping G_s (composite
//! problems), followed by the method's extrapolation. Recording x_{k+1} from
//! exactly this expression keeps the trace invariants bit-exact.

use crate::error::{Error, Result};
use crate::linalg;
use crate::problems::ProblemOracle;
use crate::schedules::{nag_sc_beta, RateParams, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Gd,
    Nag,
    NagSc,
    Apg,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Gd => "gd",
            Method::Nag => "nag",
            Method::NagSc => "nag-sc",
            Method::Apg => "apg",
        }
    }

    fn uses_schedule(&self) -> bool {
        matches!(self, Method::Nag | Method::Apg)
    }
}

/// Gradient mapping G_s(y); equals the gradient exactly when g = 0.
pub fn gradient_mapping(problem: &dyn ProblemOracle, s: f64, y: &[f64]) -> Result<Vec<f64>> {
    if !(s > 0.0) {
        return Err(Error::ParamDomain(format!("mapping step must be positive, got {s}")));
    }
    Ok(problem.mapping(s, y))
}

/// Solver state after k iterations.
#[derive(Debug, Clone)]
pub struct State {
    pub k: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl State {
    pub fn initial(x0: Vec<f64>) -> Self {
        State { k: 0, y: x0.clone(), x: x0 }
    }
}

struct StepOutcome {
    state: State,
    map: Vec<f64>,
    beta_next: f64,
    t_next: f64,
}

fn advance(
    method: Method,
    problem: &dyn ProblemOracle,
    schedule: Option<&Schedule>,
    params: &RateParams,
    state: &State,
) -> Result<StepOutcome> {
    let s = params.step();
    let map = problem.mapping(s, &state.y);
    let x_next = linalg::axpy(&state.y, -s, &map);
    if !x_next.iter().all(|v| v.is_finite()) {
        return Err(Error::Divergence {
            iteration: state.k + 1,
            context: format!("non-finite iterate under method {}", method.name()),
        });
    }
    let (beta_next, t_next) = match method {
        Method::Gd => (0.0, 0.0),
        Method::NagSc => {
            if !(params.mu() > 0.0) {
                return Err(Error::ParamDomain("nag-sc requires both mu > 0 and L".into()));
            }
            (nag_sc_beta(params.mu(), params.lipschitz())?, 0.0)
        }
        Method::Nag | Method::Apg => {
            let sched = schedule
                .ok_or_else(|| Error::ParamDomain(format!("method {} needs a schedule", method.name())))?;
            (sched.beta_at(state.k + 1), sched.t_at(state.k + 2))
        }
    };
    let diff = linalg::sub(&x_next, &state.x);
    let y_next = linalg::axpy(&x_next, beta_next, &diff);
    Ok(StepOutcome { state: State { k: state.k + 1, y: y_next, x: x_next }, map, beta_next, t_next })
}

/// One full iteration (gradient/prox-gradient step, then extrapolation).
pub fn step(
    method: Method,
    problem: &dyn ProblemOracle,
    schedule: Option<&Schedule>,
    params: &RateParams,
    state: &State,
) -> Result<State> {
    Ok(advance(method, problem, schedule, params, state)?.state)
}

/// Complete trajectory of one run: iterates, extrapolated points, gaps,
/// mapping norms, and the schedule values actually used per step.
pub struct RunTrace {
    method: Method,
    params: RateParams,
    xs: Vec<Vec<f64>>,
    ys: Vec<Vec<f64>>,
    map_norms: Vec<f64>,
    gaps: Vec<f64>,
    t_used: Vec<f64>,
    beta_used: Vec<f64>,
}

impl RunTrace {
    /// Number of iterations K (iterate indices run 0..=K).
    pub fn len(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn params(&self) -> &RateParams {
        &self.params
    }

    pub fn x(&self, k: usize) -> &[f64] {
        &self.xs[k]
    }

    pub fn y(&self, k: usize) -> &[f64] {
        &self.ys[k]
    }

    /// x_k - x_{k-1}, with the convention x_{-1} = x_0.
    pub fn delta_x(&self, k: usize) -> Vec<f64> {
        if k == 0 {
            vec![0.0; self.xs[0].len()]
        } else {
            linalg::sub(&self.xs[k], &self.xs[k - 1])
        }
    }

    /// Objective gap f(x_k) - f* (or F(x_k) - F*).
    pub fn gap(&self, k: usize) -> f64 {
        self.gaps[k]
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// ||grad f(y_k)|| or ||G_s(y_k)||.
    pub fn map_norm(&self, k: usize) -> f64 {
        self.map_norms[k]
    }

    /// t_{k+1} as used when forming iterate k+1 (0.0 for gd / nag-sc).
    pub fn t_used(&self, k: usize) -> f64 {
        self.t_used[k]
    }

    /// beta_k as used when forming y_k (beta_0 = 0).
    pub fn beta_used(&self, k: usize) -> f64 {
        self.beta_used[k]
    }

    /// Overwrite one iterate; for negative-control experiments only.
    pub fn corrupt_x(&mut self, k: usize, delta: f64) {
        for v in &mut self.xs[k] {
            *v += delta;
        }
    }
}

/// Run `iters` iterations from x0 and record the full trajectory.
pub fn run(
    method: Method,
    problem: &dyn ProblemOracle,
    schedule: Option<&Schedule>,
    params: &RateParams,
    x0: &[f64],
    iters: usize,
) -> Result<RunTrace> {
    if iters == 0 {
        return Err(Error::ParamDomain("iteration count must be >= 1".into()));
    }
    if x0.len() != problem.dim() {
        return Err(Error::ParamDomain(format!(
            "x0 has dim {}, problem has dim {}",
            x0.len(),
            problem.dim()
        )));
    }
    if method.uses_schedule() && schedule.is_none() {
        return Err(Error::ParamDomain(format!("method {} needs a schedule", method.name())));
    }
    let s = params.step();
    let f_star = problem.objective_star();
    let mut state = State::initial(x0.to_vec());
    let mut trace = RunTrace {
        method,
        params: *params,
        xs: Vec::with_capacity(iters + 1),
        ys: Vec::with_capacity(iters + 1),
        map_norms: Vec::with_capacity(iters + 1),
        gaps: Vec::with_capacity(iters + 1),
        t_used: Vec::with_capacity(iters + 1),
        beta_used: Vec::with_capacity(iters + 1),
    };
    trace.xs.push(state.x.clone());
    trace.ys.push(state.y.clone());
    trace.gaps.push(problem.objective(&state.x) - f_star);
    trace.beta_used.push(0.0);
    trace.t_used.push(match (method.uses_schedule(), schedule) {
        (true, Some(sc)) => sc.t_at(1),
        _ => 0.0,
    });
    for _ in 0..iters {
        let out = advance(method, problem, schedule, params, &state)?;
        trace.map_norms.push(linalg::norm(&out.map));
        state = out.state;
        let gap = problem.objective(&state.x) - f_star;
        if !gap.is_finite() {
            return Err(Error::Divergence { iteration: state.k, context: "non-finite objective".into() });
        }
        trace.xs.push(state.x.clone());
        trace.ys.push(state.y.clone());
        trace.gaps.push(gap);
        trace.beta_used.push(out.beta_next);
        trace.t_used.push(if method.uses_schedule() { out.t_next } else { 0.0 });
    }
    // Mapping norm at the final extrapolated point, so every row is complete.
    trace.map_norms.push(linalg::norm(&problem.mapping(s, &state.y)));
    Ok(trace)
}

/// Scalar-only trace for long horizons: keeps the per-k series but no vector
/// histories beyond the final iterate.
pub struct ScalarTrace {
    pub gaps: Vec<f64>,
    pub map_norms: Vec<f64>,
    pub t_used: Vec<f64>,
    pub beta_used: Vec<f64>,
    pub final_x: Vec<f64>,
}

/// Streaming variant of [`run`] holding only two iterates at a time.
pub fn run_streaming(
    method: Method,
    problem: &dyn ProblemOracle,
    schedule: Option<&Schedule>,
    params: &RateParams,
    x0: &[f64],
    iters: usize,
) -> Result<ScalarTrace> {
    if iters == 0 {
        return Err(Error::ParamDomain("iteration count must be >= 1".into()));
    }
    let s = params.step();
    let f_star = problem.objective_star();
    let mut state = State::initial(x0.to_vec());
    let mut out = ScalarTrace {
        gaps: vec![problem.objective(&state.x) - f_star],
        map_norms: Vec::with_capacity(iters + 1),
        t_used: vec![match (method.uses_schedule(), schedule) {
            (true, Some(sc)) => sc.t_at(1),
            _ => 0.0,
        }],
        beta_used: vec![0.0],
        final_x: Vec::new(),
    };
    for _ in 0..iters {
        let step_out = advance(method, problem, schedule, params, &state)?;
        out.map_norms.push(linalg::norm(&step_out.map));
        state = step_out.state;
        out.gaps.push(problem.objective(&state.x) - f_star);
        out.beta_used.push(step_out.beta_next);
        out.t_used.push(if method.uses_schedule() { step_out.t_next } else { 0.0 });
    }
    out.map_norms.push(linalg::norm(&problem.mapping(s, &state.y)));
    out.final_x = state.x;
    Ok(out)
}

/// Reproducible default start: x* shifted by 10 along the normalized all-ones
/// direction, so ||x0 - x*|| = 10.
pub fn default_x0(problem: &dyn ProblemOracle) -> Vec<f64> {
    let n = problem.dim();
    let shift = 10.0 / (n as f64).sqrt();
    problem.x_star().iter().map(|&v| v + shift).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{composite_lasso, quadratic_problem, random_lasso, random_quadratic};
    use crate::linalg::{dist, norm, sub};
    use crate::linalg::Matrix;

    #[test]
    fn gd_step_componentwise() {
        let p = quadratic_problem(&[1.0, 2.0], &[0.0, 0.0]).unwrap();
        let params = RateParams::critical(1.0, 2.0).unwrap();
        let state = State::initial(vec![1.0, 1.0]);
        let next = step(Method::Gd, &p, None, &params, &state).unwrap();
        assert_eq!(next.x, vec![0.5, 0.0]);
        assert_eq!(next.y, next.x);
    }

    #[test]
    fn first_nag_extrapolation_is_trivial() {
        // beta_1 = (t_1 - 1)/t_2 = 0, so y_1 = x_1 for any rule.
        let p = quadratic_problem(&[1.0, 2.0], &[1.0, 0.5]).unwrap();
        let params = RateParams::new(1.0, 2.0, 0.25).unwrap();
        let sched = Schedule::recurrence();
        let state = State::initial(default_x0(&p));
        let next = step(Method::Nag, &p, Some(&sched), &params, &state).unwrap();
        assert_eq!(next.x, next.y);
    }

    #[test]
    fn fixed_point_stays_fixed() {
        let p = quadratic_problem(&[1.0, 3.0], &[2.0, -1.0]).unwrap();
        let params = RateParams::new(1.0, 3.0, 1.0 / 6.0).unwrap();
        let sched = Schedule::linear(2.0).unwrap();
        let trace = run(Method::Nag, &p, Some(&sched), &params, p.x_star(), 50).unwrap();
        for k in 0..=50 {
            assert!(trace.gap(k).abs() < 1e-14);
            assert!(dist(trace.x(k), p.x_star()) < 1e-12);
        }
    }

    #[test]
    fn nag_and_apg_identical_when_g_is_zero() {
        let a = Matrix::from_rows(vec![vec![1.0, 0.2], vec![0.1, 1.5]]);
        let p = composite_lasso(a, &[1.0, -1.0], 1.0, 0.0).unwrap();
        let params = RateParams::new(p.mu(), p.lipschitz(), 0.5 / p.lipschitz()).unwrap();
        let sched = Schedule::recurrence();
        let x0 = default_x0(&p);
        let nag = run(Method::Nag, &p, Some(&sched), &params, &x0, 100).unwrap();
        let apg = run(Method::Apg, &p, Some(&sched), &params, &x0, 100).unwrap();
        for k in 0..=100 {
            assert_eq!(nag.x(k), apg.x(k));
            assert_eq!(nag.y(k), apg.y(k));
            assert_eq!(nag.gap(k).to_bits(), apg.gap(k).to_bits());
        }
    }

    #[test]
    fn trace_invariants_hold() {
        let p = random_quadratic(50.0, 10, 42).unwrap();
        let params = RateParams::new(1.0, 50.0, 0.5 / 50.0).unwrap();
        let sched = Schedule::recurrence();
        let x0 = default_x0(&p);
        let trace = run(Method::Nag, &p, Some(&sched), &params, &x0, 300).unwrap();
        assert_eq!(trace.x(0), trace.y(0));
        for k in 0..300usize {
            // x_{k+1} = y_k - s * map(y_k), bit-exact on recomputation
            let m = p.mapping(params.step(), trace.y(k));
            let rebuilt = linalg::axpy(trace.y(k), -params.step(), &m);
            assert_eq!(rebuilt, trace.x(k + 1));
            // y_{k+1} = x_{k+1} + beta_{k+1} (x_{k+1} - x_k), bit-exact as recorded
            let beta = trace.beta_used(k + 1);
            let diff = sub(trace.x(k + 1), trace.x(k));
            let y_rebuilt = linalg::axpy(trace.x(k + 1), beta, &diff);
            assert_eq!(y_rebuilt, trace.y(k + 1));
            // extrapolation identity t_{k+2}(y_{k+1}-x_{k+1}) = (t_{k+1}-1)(x_{k+1}-x_k)
            let t1 = sched.t_at(k + 2);
            let t0 = sched.t_at(k + 1);
            let lhs: Vec<f64> = sub(trace.y(k + 1), trace.x(k + 1)).iter().map(|v| v * t1).collect();
            let rhs: Vec<f64> = diff.iter().map(|v| v * (t0 - 1.0)).collect();
            let scale = norm(&rhs).max(1e-300);
            assert!(dist(&lhs, &rhs) <= 1e-10 * scale.max(1.0));
            // ||x_k - y_k|| <= ||x_k - x_{k-1}|| for k >= 1
            if k >= 1 {
                assert!(dist(trace.x(k), trace.y(k)) <= dist(trace.x(k), trace.x(k - 1)) * (1.0 + 1e-12));
            }
            assert!(trace.gap(k) >= -1e-12);
        }
    }

    #[test]
    fn gd_contracts_per_step() {
        let p = random_quadratic(8.0, 6, 7).unwrap();
        let params = RateParams::new(1.0, 8.0, 1.0 / 16.0).unwrap();
        let trace = run(Method::Gd, &p, None, &params, &default_x0(&p), 100).unwrap();
        let contraction = (1.0 - params.mu() * params.step()).powi(2);
        for k in 0..100 {
            if trace.gap(k) > 1e-280 {
                assert!(trace.gap(k + 1) / trace.gap(k) <= contraction + 1e-12);
                // monotone gaps for gd
                assert!(trace.gap(k + 1) <= trace.gap(k) * (1.0 + 1e-15));
            }
        }
    }

    #[test]
    fn streaming_matches_full_run() {
        let p = random_lasso(8, 1.0, 0.3, 21).unwrap();
        let params = RateParams::new(p.mu(), p.lipschitz(), 0.5 / p.lipschitz()).unwrap();
        let sched = Schedule::linear(3.0).unwrap();
        let x0 = default_x0(&p);
        let full = run(Method::Apg, &p, Some(&sched), &params, &x0, 200).unwrap();
        let slim = run_streaming(Method::Apg, &p, Some(&sched), &params, &x0, 200).unwrap();
        for k in 0..=200usize {
            assert_eq!(full.gap(k).to_bits(), slim.gaps[k].to_bits());
            assert_eq!(full.map_norm(k).to_bits(), slim.map_norms[k].to_bits());
        }
        assert_eq!(full.x(200), &slim.final_x[..]);
    }

    #[test]
    fn nag_sc_needs_strong_convexity() {
        let p = quadratic_problem(&[1.0, 2.0], &[0.0, 0.0]).unwrap();
        let params = RateParams::convex_only(2.0, 0.25).unwrap();
        let err = run(Method::NagSc, &p, None, &params, &[1.0, 1.0], 5);
        assert!(matches!(err, Err(Error::ParamDomain(_))));
    }

    #[test]
    fn missing_schedule_is_rejected() {
        let p = quadratic_problem(&[1.0, 2.0], &[0.0, 0.0]).unwrap();
        let params = RateParams::new(1.0, 2.0, 0.25).unwrap();
        assert!(run(Method::Nag, &p, None, &params, &[1.0, 1.0], 5).is_err());
    }

    #[test]
    fn default_start_distance() {
        let p = random_quadratic(4.0, 50, 3).unwrap();
        let x0 = default_x0(&p);
        assert!((dist(&x0, p.x_star()) - 10.0).abs() < 1e-9);
    }
}
