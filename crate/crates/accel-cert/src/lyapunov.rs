//! Lyapunov energies along recorded traces and the per-iteration audits.
//!
//! Two energy kinds mirror the two step regimes. Subcritical (s < 1/L):
//! E_k = s (t_{k+1}-1) t_{k+1} gap_k + 1/2 ||(t_{k+1}-1)(y_k-x_k) + (y_k-x*)||^2.
//! Critical (s = 1/L): E_k = lambda gap_k + 1/2 ||x_k - x_{k-1}||^2 with
//! x_{-1} = x_0. Energies are always recomputed from stored iterates so the
//! audits stay independent of solver bookkeeping.

use crate::certificates::{Certificates, FixedStepCertificate, RhoMode};
use crate::error::{Error, Result};
use crate::linalg::{self, KahanSum};
use crate::problems::ProblemOracle;
use crate::schedules::{RateParams, Schedule};
use crate::solvers::{Method, RunTrace};

/// Additive-multiplicative audit slack at the given reference scale.
fn slack_at(scale: f64, problem: &dyn ProblemOracle) -> f64 {
    1e-9 * (1.0 + scale.abs()) + problem.objective_star_slack()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralEnergy {
    pub potential: f64,
    pub mixed: f64,
    pub total: f64,
}

fn check_schedule_trace(trace: &RunTrace) -> Result<()> {
    if !matches!(trace.method(), Method::Nag | Method::Apg) {
        return Err(Error::AuditSetup(format!(
            "general-kind energy needs a nag/apg trace, got {}",
            trace.method().name()
        )));
    }
    Ok(())
}

/// Potential + mixed energy of the subcritical Lyapunov sequence at index k.
pub fn energy_general(
    problem: &dyn ProblemOracle,
    trace: &RunTrace,
    k: usize,
    schedule: &Schedule,
    params: &RateParams,
) -> Result<GeneralEnergy> {
    check_schedule_trace(trace)?;
    if trace.params() != params {
        return Err(Error::AuditSetup("trace was produced under different parameters".into()));
    }
    if !params.is_subcritical() {
        return Err(Error::AuditSetup("general-kind energy needs s < 1/L".into()));
    }
    let s = params.step();
    let t = schedule.t_at(k + 1);
    let gap = problem.objective(trace.x(k)) - problem.objective_star();
    let potential = s * (t - 1.0) * t * gap;
    let mixed = 0.5 * mixed_vector(trace, k, t, problem).iter().map(|v| v * v).sum::<f64>();
    Ok(GeneralEnergy { potential, mixed, total: potential + mixed })
}

/// (t_{k+1}-1)(y_k - x_k) + (y_k - x*)
fn mixed_vector(trace: &RunTrace, k: usize, t: f64, problem: &dyn ProblemOracle) -> Vec<f64> {
    let y = trace.y(k);
    let x = trace.x(k);
    let xs = problem.x_star();
    y.iter()
        .zip(x)
        .zip(xs)
        .map(|((yi, xi), si)| (t - 1.0) * (yi - xi) + (yi - si))
        .collect()
}

/// Critical-step energy lambda gap_k + 1/2 ||x_k - x_{k-1}||^2.
pub fn energy_fixed(problem: &dyn ProblemOracle, trace: &RunTrace, k: usize, lambda: f64) -> Result<f64> {
    if trace.params().is_subcritical() {
        return Err(Error::AuditSetup("fixed-kind energy needs a trace run at s = 1/L".into()));
    }
    let gap = problem.objective(trace.x(k)) - problem.objective_star();
    let dx = trace.delta_x(k);
    Ok(lambda * gap + 0.5 * linalg::dot(&dx, &dx))
}

#[derive(Debug, Clone)]
pub struct AuditEntry {
    pub k: usize,
    pub ineq: &'static str,
    pub residual: f64,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    fn push(&mut self, k: usize, ineq: &'static str, residual: f64, slack: f64) {
        self.entries.push(AuditEntry { k, ineq, residual, slack, pass: residual <= slack });
    }

    pub fn violations(&self) -> usize {
        self.entries.iter().filter(|e| !e.pass).count()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    pub fn merge(&mut self, other: AuditReport) {
        self.entries.extend(other.entries);
    }
}

fn general_energies(
    problem: &dyn ProblemOracle,
    trace: &RunTrace,
    schedule: &Schedule,
    params: &RateParams,
) -> Result<Vec<GeneralEnergy>> {
    (0..=trace.len()).map(|k| energy_general(problem, trace, k, schedule, params)).collect()
}

fn fixed_energies(problem: &dyn ProblemOracle, trace: &RunTrace, lambda: f64) -> Result<Vec<f64>> {
    (0..=trace.len()).map(|k| energy_fixed(problem, trace, k, lambda)).collect()
}

/// Per-step decrement audit. Subcritical traces are checked against
/// E_{k+1} - E_k <= -(s^2 t^2 (1-sL)/2)||m_k||^2 - (mu s (t-1) t / 2)||y_k-x_k||^2
///                 - (mu s t / 2)||y_k-x*||^2,
/// critical traces against the kinetic decrement with the lambda weights.
pub fn audit_decrement(
    problem: &dyn ProblemOracle,
    trace: &RunTrace,
    schedule: Option<&Schedule>,
    params: &RateParams,
) -> Result<AuditReport> {
    let mut report = AuditReport::default();
    let s = params.step();
    if params.is_subcritical() {
        let schedule = schedule.ok_or_else(|| Error::AuditSetup("subcritical decrement audit needs the schedule".into()))?;
        let energies = general_energies(problem, trace, schedule, params)?;
        let (mu, l) = (params.mu(), params.lipschitz());
        for k in 0..trace.len() {
            let t = schedule.t_at(k + 1);
            let m = problem.mapping(s, trace.y(k));
            let m2 = linalg::dot(&m, &m);
            let yx = linalg::dist(trace.y(k), trace.x(k)).powi(2);
            let ys = linalg::dist(trace.y(k), problem.x_star()).powi(2);
            let rhs = -(s * s * t * t * (1.0 - s * l) / 2.0) * m2
                - (mu * s * (t - 1.0) * t / 2.0) * yx
                - (mu * s * t / 2.0) * ys;
            let residual = (energies[k + 1].total - energies[k].total) - rhs;
            report.push(k, "decrement_general", residual, slack_at(energies[k].total, problem));
        }
    } else {
        let cert = crate::certificates::rho_fixed(params.mu(), params.lipschitz())?;
        let energies = fixed_energies(problem, trace, cert.lambda)?;
        let (mu, l, lambda) = (params.mu(), params.lipschitz(), cert.lambda);
        for k in 0..trace.len() {
            let dx1 = linalg::dist(trace.x(k + 1), trace.x(k)).powi(2);
            let xy = linalg::dist(trace.x(k), trace.y(k)).powi(2);
            let rhs = -(lambda * l - 1.0) / 2.0 * dx1 - (1.0 - lambda * (l - mu)) / 2.0 * xy;
            let residual = (energies[k + 1] - energies[k]) - rhs;
            report.push(k, "decrement_fixed", residual, slack_at(energies[k], problem));
        }
    }
    Ok(report)
}

/// Which certificate backs a ratio/gap-bound audit.
pub enum RatioCertSource<'a> {
    Series(&'a Certificates, RhoMode),
    Fixed(&'a FixedStepCertificate),
}

/// Q-linear ratio audit: flags k where E_{k+1} > rho_k E_k + slack.
pub fn audit_ratio(
    problem: &dyn ProblemOracle,
    trace: &RunTrace,
    source: &RatioCertSource,
) -> Result<AuditReport> {
    let mut report = AuditReport::default();
    let params = trace.params();
    match source {
        RatioCertSource::Series(certs, mode) => {
            if !params.is_subcritical() {
                return Err(Error::AuditSetup("certificate-series ratio audit needs s < 1/L".into()));
            }
            if certs.params() != params {
                return Err(Error::AuditSetup("certificates built for different parameters".into()));
            }
            if problem.is_composite() && *mode == RhoMode::MinCd {
                return Err(Error::AuditSetup("composite objectives certify the ratio through D_k only".into()));
            }
            let energies = general_energies(problem, trace, certs.schedule(), params)?;
            for k in 0..trace.len() {
                let rho = certs.rho_at_mode(k, *mode)?;
                let residual = energies[k + 1].total - rho * energies[k].total;
                report.push(k, "ratio_general", residual, slack_at(energies[k].total, problem));
            }
        }
        RatioCertSource::Fixed(cert) => {
            if params.is_subcritical() {
                return Err(Error::AuditSetup("fixed-step ratio audit needs s = 1/L".into()));
            }
            let energies = fixed_energies(problem, trace, cert.lambda)?;
            for k in 0..trace.len() {
                let residual = energies[k + 1] - cert.rho * energies[k];
                report.push(k, "ratio_fixed", residual, slack_at(energies[k], problem));
            }
        }
    }
    Ok(report)
}

/// Closed-form objective-gap bound audit, for k >= 1.
pub fn audit_gap_bound(
    problem: &dyn ProblemOracle,
    trace: &RunTrace,
    source: &RatioCertSource,
) -> Result<AuditReport> {
    let mut report = AuditReport::default();
    let params = trace.params();
    let dist0 = linalg::dist(trace.x(0), problem.x_star()).powi(2);
    match source {
        RatioCertSource::Series(certs, mode) => {
            if !params.is_subcritical() {
                return Err(Error::AuditSetup("certificate-series gap audit needs s < 1/L".into()));
            }
            let s = params.step();
            for k in 1..=trace.len() {
                let t = certs.schedule().t_at(k + 1);
                let bound = certs.log_rho_prefix_mode(k, *mode)?.exp() * dist0 / (2.0 * s * (t - 1.0) * t);
                let gap = problem.objective(trace.x(k)) - problem.objective_star();
                report.push(k, "gap_bound_general", gap - bound, slack_at(bound, problem));
            }
        }
        RatioCertSource::Fixed(cert) => {
            if params.is_subcritical() {
                return Err(Error::AuditSetup("fixed-step gap audit needs s = 1/L".into()));
            }
            let gap0 = problem.objective(trace.x(0)) - problem.objective_star();
            for k in 1..=trace.len() {
                let bound = cert.rho.powi(k as i32) * gap0;
                let gap = problem.objective(trace.x(k)) - problem.objective_star();
                report.push(k, "gap_bound_fixed", gap - bound, slack_at(bound, problem));
            }
        }
    }
    Ok(report)
}

/// Convex-only (mu = 0) gap bound: gap_k <= ||x0 - x*||^2 / (2 s t_{k+1}(t_{k+1}-1)).
pub fn audit_gap_bound_convex(
    problem: &dyn ProblemOracle,
    trace: &RunTrace,
    schedule: &Schedule,
) -> Result<AuditReport> {
    check_schedule_trace(trace)?;
    let params = trace.params();
    if !params.is_subcritical() {
        return Err(Error::AuditSetup("convex gap audit needs s < 1/L".into()));
    }
    let s = params.step();
    let dist0 = linalg::dist(trace.x(0), problem.x_star()).powi(2);
    let mut report = AuditReport::default();
    for k in 1..=trace.len() {
        let t = schedule.t_at(k + 1);
        let bound = dist0 / (2.0 * s * t * (t - 1.0));
        let gap = problem.objective(trace.x(k)) - problem.objective_star();
        report.push(k, "gap_bound_convex", gap - bound, slack_at(bound, problem));
    }
    Ok(report)
}

/// Monotonicity of the general-kind energy (the mu = 0 descent statement).
pub fn audit_energy_monotone(
    problem: &dyn ProblemOracle,
    trace: &RunTrace,
    schedule: &Schedule,
    params: &RateParams,
) -> Result<AuditReport> {
    let energies = general_energies(problem, trace, schedule, params)?;
    let mut report = AuditReport::default();
    for k in 0..trace.len() {
        let residual = energies[k + 1].total - energies[k].total;
        report.push(k, "energy_monotone", residual, slack_at(energies[k].total, problem));
    }
    Ok(report)
}

fn clamp_witness(w: f64) -> f64 {
    w.clamp(1e-6, 1e6)
}

/// Upper-envelope audit: with the certificate witnesses substituted, the two
/// explicit bounds on E_k and E_{k+1} must dominate the directly computed
/// energies. These bounds are the ingredients of the rho_k derivation, so
/// checking them isolates faults.
pub fn audit_upper_envelopes(
    problem: &dyn ProblemOracle,
    trace: &RunTrace,
    schedule: &Schedule,
    certs: &Certificates,
) -> Result<AuditReport> {
    let params = trace.params();
    if certs.params() != params {
        return Err(Error::AuditSetup("certificates built for different parameters".into()));
    }
    let energies = general_energies(problem, trace, schedule, params)?;
    let (mu, l, s) = (params.mu(), params.lipschitz(), params.step());
    let mut report = AuditReport::default();
    for k in 0..trace.len() {
        let t1 = schedule.t_at(k + 1);
        let t2 = schedule.t_at(k + 2);
        let m = problem.mapping(s, trace.y(k));
        let m2 = linalg::dot(&m, &m);
        let yx = linalg::dist(trace.y(k), trace.x(k)).powi(2);
        let ys = linalg::dist(trace.y(k), problem.x_star()).powi(2);

        let cw = certs.c_witness(k)?;
        let (a, b) = (clamp_witness(cw.a), clamp_witness(cw.b));
        let env_k = s * (t1 - 1.0) * t1 * (1.0 + mu / a) / (2.0 * mu) * m2
            + (1.0 + 1.0 / b) / 2.0 * ys
            + ((1.0 + b) * (t1 - 1.0).powi(2) + s * (t1 - 1.0) * t1 * (a + l)) / 2.0 * yx;
        report.push(k, "envelope_energy_k", energies[k].total - env_k, slack_at(env_k, problem));

        let dw = certs.d_witness(k)?;
        let (u, v, w) = (clamp_witness(dw.u), clamp_witness(dw.v), clamp_witness(dw.w));
        let env_k1 = ((t2 - 1.0) * t2 * (1.0 / (2.0 * mu * s) - 1.0 + l * s / 2.0)
            + (1.0 + u + 1.0 / v) * t1 * t1 / 2.0)
            * (s * s * m2)
            + (1.0 + v + w) * (t1 - 1.0).powi(2) / 2.0 * yx
            + (1.0 + 1.0 / w + 1.0 / u) / 2.0 * ys;
        report.push(k, "envelope_energy_k1", energies[k + 1].total - env_k1, slack_at(env_k1, problem));
    }
    Ok(report)
}

/// Telescoping identity: E_K - E_0 equals the compensated sum of increments.
pub fn telescoping_defect(
    problem: &dyn ProblemOracle,
    trace: &RunTrace,
    schedule: &Schedule,
    params: &RateParams,
) -> Result<f64> {
    let energies = general_energies(problem, trace, schedule, params)?;
    let mut acc = KahanSum::new();
    for k in 0..trace.len() {
        acc.add(energies[k + 1].total - energies[k].total);
    }
    let direct = energies[trace.len()].total - energies[0].total;
    Ok((acc.value() - direct).abs() / direct.abs().max(1.0))
}

/// Mixed-term update identity: the mixed vector at k+1 minus at k equals
/// -t_{k+1} s m_k. Returns the worst relative defect over the trace.
pub fn mixed_update_defect(
    problem: &dyn ProblemOracle,
    trace: &RunTrace,
    schedule: &Schedule,
    params: &RateParams,
) -> Result<f64> {
    check_schedule_trace(trace)?;
    let s = params.step();
    let mut worst = 0.0f64;
    for k in 0..trace.len() {
        let t1 = schedule.t_at(k + 1);
        let t2 = schedule.t_at(k + 2);
        let before = mixed_vector(trace, k, t1, problem);
        let after = mixed_vector(trace, k + 1, t2, problem);
        let m = problem.mapping(s, trace.y(k));
        let expect: Vec<f64> = m.iter().map(|mi| -t1 * s * mi).collect();
        let got = linalg::sub(&after, &before);
        let scale = linalg::norm(&expect).max(linalg::norm(&before)).max(1e-12);
        worst = worst.max(linalg::dist(&got, &expect) / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::rho_fixed;
    use crate::problems::{convex_quadratic, random_lasso, random_quadratic};
    use crate::solvers::{default_x0, run};
    use std::sync::Arc;

    fn nag_setup(kappa: f64, s_frac: f64, iters: usize) -> (impl ProblemOracle, Arc<Schedule>, RateParams, RunTrace) {
        let p = random_quadratic(kappa, 12, 99).unwrap();
        let params = RateParams::new(1.0, kappa, s_frac / kappa).unwrap();
        let sched = Arc::new(Schedule::recurrence());
        let trace = run(Method::Nag, &p, Some(&sched), &params, &default_x0(&p), iters).unwrap();
        (p, sched, params, trace)
    }

    #[test]
    fn energy_at_k0_is_half_squared_distance() {
        let (p, sched, params, trace) = nag_setup(4.0, 0.5, 5);
        let e0 = energy_general(&p, &trace, 0, &sched, &params).unwrap();
        let expect = 0.5 * linalg::dist(trace.x(0), p.x_star()).powi(2);
        assert!((e0.total - expect).abs() <= 1e-12 * expect);
        assert_eq!(e0.potential, 0.0); // t_1 = 1
    }

    #[test]
    fn energy_zero_at_fixed_point() {
        let p = random_quadratic(4.0, 8, 5).unwrap();
        let params = RateParams::new(1.0, 4.0, 0.125).unwrap();
        let sched = Schedule::recurrence();
        let trace = run(Method::Nag, &p, Some(&sched), &params, p.x_star(), 10).unwrap();
        for k in 0..=10 {
            let e = energy_general(&p, &trace, k, &sched, &params).unwrap();
            assert!(e.total.abs() < 1e-20);
        }
    }

    #[test]
    fn decrement_and_ratio_hold_on_quadratic() {
        let (p, sched, params, trace) = nag_setup(4.0, 0.5, 400);
        let dec = audit_decrement(&p, &trace, Some(&sched), &params).unwrap();
        assert_eq!(dec.violations(), 0);
        let certs = Certificates::new(Arc::clone(&sched), params).unwrap();
        let ratio = audit_ratio(&p, &trace, &RatioCertSource::Series(&certs, RhoMode::MinCd)).unwrap();
        assert_eq!(ratio.violations(), 0);
        let gaps = audit_gap_bound(&p, &trace, &RatioCertSource::Series(&certs, RhoMode::MinCd)).unwrap();
        assert_eq!(gaps.violations(), 0);
        let env = audit_upper_envelopes(&p, &trace, &sched, &certs).unwrap();
        assert_eq!(env.violations(), 0);
    }

    #[test]
    fn fixed_step_audits_hold() {
        let p = random_quadratic(2.0, 10, 31).unwrap();
        let params = RateParams::critical(1.0, 2.0).unwrap();
        let trace = run(Method::Nag, &p, Some(&Schedule::recurrence()), &params, &default_x0(&p), 500).unwrap();
        let dec = audit_decrement(&p, &trace, None, &params).unwrap();
        assert_eq!(dec.violations(), 0);
        let cert = rho_fixed(1.0, 2.0).unwrap();
        let ratio = audit_ratio(&p, &trace, &RatioCertSource::Fixed(&cert)).unwrap();
        assert_eq!(ratio.violations(), 0);
        let gaps = audit_gap_bound(&p, &trace, &RatioCertSource::Fixed(&cert)).unwrap();
        assert_eq!(gaps.violations(), 0);
        // fixed-kind energy is nonincreasing
        let energies = fixed_energies(&p, &trace, cert.lambda).unwrap();
        for k in 0..trace.len() {
            assert!(energies[k + 1] <= energies[k] + 1e-12 * (1.0 + energies[k]));
        }
        // energy ratio matches the example rate at kappa = 2
        for k in 0..trace.len() {
            if energies[k] > 1e-280 {
                assert!(energies[k + 1] / energies[k] <= cert.rho + 1e-9);
            }
        }
    }

    #[test]
    fn composite_audits_use_d_only() {
        let p = random_lasso(12, 1.0, 0.2, 77).unwrap();
        let params = RateParams::new(p.mu(), p.lipschitz(), 0.5 / p.lipschitz()).unwrap();
        let sched = Arc::new(Schedule::recurrence());
        let trace = run(Method::Apg, &p, Some(&sched), &params, &default_x0(&p), 300).unwrap();
        let certs = Certificates::new(Arc::clone(&sched), params).unwrap();
        // MinCd is rejected for composite objectives
        assert!(audit_ratio(&p, &trace, &RatioCertSource::Series(&certs, RhoMode::MinCd)).is_err());
        let ratio = audit_ratio(&p, &trace, &RatioCertSource::Series(&certs, RhoMode::DOnly)).unwrap();
        assert_eq!(ratio.violations(), 0);
        let dec = audit_decrement(&p, &trace, Some(&sched), &params).unwrap();
        assert_eq!(dec.violations(), 0);
        let gaps = audit_gap_bound(&p, &trace, &RatioCertSource::Series(&certs, RhoMode::DOnly)).unwrap();
        assert_eq!(gaps.violations(), 0);
    }

    #[test]
    fn corrupted_trace_fails() {
        let (p, sched, params, mut trace) = nag_setup(4.0, 0.5, 200);
        trace.corrupt_x(100, 0.05);
        let dec = audit_decrement(&p, &trace, Some(&sched), &params).unwrap();
        assert!(dec.violations() > 0);
    }

    #[test]
    fn regime_mismatch_is_rejected() {
        let (p, sched, params, trace) = nag_setup(4.0, 0.5, 10);
        let cert = rho_fixed(1.0, 4.0).unwrap();
        assert!(audit_ratio(&p, &trace, &RatioCertSource::Fixed(&cert)).is_err());
        assert!(energy_fixed(&p, &trace, 0, cert.lambda).is_err());
        // and a fixed trace rejects the general energy
        let params_crit = RateParams::critical(1.0, 4.0).unwrap();
        let tr_crit = run(Method::Nag, &p, Some(&sched), &params_crit, &default_x0(&p), 10).unwrap();
        assert!(energy_general(&p, &tr_crit, 0, &sched, &params_crit).is_err());
        assert!(energy_general(&p, &trace, 0, &sched, &params_crit).is_err());
    }

    #[test]
    fn envelope_holds_for_any_positive_witnesses() {
        // perturbing the witnesses keeps the bounds valid
        let (p, sched, params, trace) = nag_setup(4.0, 0.5, 50);
        let certs = Certificates::new(Arc::clone(&sched), params).unwrap();
        let energies = general_energies(&p, &trace, &sched, &params).unwrap();
        let (mu, l, s) = (params.mu(), params.lipschitz(), params.step());
        for k in [0usize, 3, 20] {
            let t1 = sched.t_at(k + 1);
            let cw = certs.c_witness(k).unwrap();
            let (a, b) = (2.0 * clamp_witness(cw.a), 2.0 * clamp_witness(cw.b));
            let m = p.mapping(s, trace.y(k));
            let m2 = linalg::dot(&m, &m);
            let yx = linalg::dist(trace.y(k), trace.x(k)).powi(2);
            let ys = linalg::dist(trace.y(k), p.x_star()).powi(2);
            let env = s * (t1 - 1.0) * t1 * (1.0 + mu / a) / (2.0 * mu) * m2
                + (1.0 + 1.0 / b) / 2.0 * ys
                + ((1.0 + b) * (t1 - 1.0).powi(2) + s * (t1 - 1.0) * t1 * (a + l)) / 2.0 * yx;
            assert!(energies[k].total <= env + 1e-9 * (1.0 + env));
        }
    }

    #[test]
    fn telescoping_and_mixed_update() {
        let (p, sched, params, trace) = nag_setup(50.0, 0.5, 800);
        assert!(telescoping_defect(&p, &trace, &sched, &params).unwrap() <= 1e-8);
        assert!(mixed_update_defect(&p, &trace, &sched, &params).unwrap() <= 1e-8);
    }

    #[test]
    fn mu_zero_energy_monotone_and_gap_bound() {
        let mut diag = vec![0.0; 10];
        let mut b = vec![0.0; 10];
        for i in 1..10 {
            diag[i] = i as f64 / 3.0;
            b[i] = (i % 3) as f64 - 1.0;
        }
        let p = convex_quadratic(&diag, &b).unwrap();
        let params = RateParams::convex_only(p.lipschitz(), 0.5 / p.lipschitz()).unwrap();
        let sched = Schedule::recurrence();
        let trace = run(Method::Nag, &p, Some(&sched), &params, &default_x0(&p), 500).unwrap();
        let mono = audit_energy_monotone(&p, &trace, &sched, &params).unwrap();
        assert_eq!(mono.violations(), 0);
        let gaps = audit_gap_bound_convex(&p, &trace, &sched).unwrap();
        assert_eq!(gaps.violations(), 0);
    }
}
