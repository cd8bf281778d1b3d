//! Extrapolation parameter sequences {t_k} and {beta_k}.
//!
//! Two production rules are provided: the square-root recurrence
//! `t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2` (which makes the defining
//! inequality `t_{k+1}^2 - t_{k+1} <= t_k^2` an equality) and the linear rule
//! `t_{k+1} = (k + r) / r` with `r >= 2`. Custom tables are accepted for
//! validation purposes but never silently corrected.

use std::sync::RwLock;

use crate::error::{Error, Result};

/// Relative floating tolerance used by the validator.
pub const VALIDATE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleRule {
    /// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2, starting from t_1 = 1.
    Recurrence,
    /// t_{k+1} = (k + r) / r with r >= 2.
    Linear { r: f64 },
    /// User-supplied table of t values (indexed from k = 1).
    Custom,
}

/// Step-size regime parameters: strong convexity mu, smoothness L, step s.
///
/// Invariants enforced at construction: `0 < mu < L` and `0 < s <= 1/L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    mu: f64,
    l: f64,
    s: f64,
}

impl RateParams {
    pub fn new(mu: f64, l: f64, s: f64) -> Result<Self> {
        if !(mu > 0.0 && l > mu) {
            return Err(Error::ParamDomain(format!("need 0 < mu < L, got mu={mu}, L={l}")));
        }
        if !(s > 0.0 && s <= 1.0 / l) {
            return Err(Error::ParamDomain(format!("need 0 < s <= 1/L, got s={s}, 1/L={}", 1.0 / l)));
        }
        Ok(RateParams { mu, l, s })
    }

    /// Parameters at the critical step s = 1/L.
    pub fn critical(mu: f64, l: f64) -> Result<Self> {
        Self::new(mu, l, 1.0 / l)
    }

    /// Convex-only parameters with mu = 0. Solvers accept these; certificate
    /// computations reject them. Exists for the mu = 0 regression path.
    pub fn convex_only(l: f64, s: f64) -> Result<Self> {
        if !(l > 0.0) {
            return Err(Error::ParamDomain(format!("need L > 0, got {l}")));
        }
        if !(s > 0.0 && s <= 1.0 / l) {
            return Err(Error::ParamDomain(format!("need 0 < s <= 1/L, got s={s}")));
        }
        Ok(RateParams { mu: 0.0, l, s })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lipschitz(&self) -> f64 {
        self.l
    }

    pub fn step(&self) -> f64 {
        self.s
    }

    pub fn kappa(&self) -> f64 {
        self.l / self.mu
    }

    /// True when s is strictly below the critical step 1/L.
    pub fn is_subcritical(&self) -> bool {
        self.s < 1.0 / self.l
    }
}

/// Generator of the {t_k} sequence for one rule, with an append-only cache.
///
/// Entries are indexed from k = 1 and extended on demand, so repeated queries
/// return bit-identical values. Concurrent readers observe a consistent
/// prefix; extension is serialized behind a write lock.
#[derive(Debug)]
pub struct Schedule {
    rule: ScheduleRule,
    cache: RwLock<Vec<f64>>,
}

impl Schedule {
    pub fn recurrence() -> Self {
        Schedule { rule: ScheduleRule::Recurrence, cache: RwLock::new(vec![1.0]) }
    }

    pub fn linear(r: f64) -> Result<Self> {
        if !(r >= 2.0) {
            return Err(Error::ParamDomain(format!("linear rule needs r >= 2, got {r}")));
        }
        Ok(Schedule { rule: ScheduleRule::Linear { r }, cache: RwLock::new(vec![1.0]) })
    }

    /// Wrap a user-provided table (t_1, t_2, ...). The table is kept as-is;
    /// use [`Schedule::validate`] to diagnose rule violations.
    pub fn from_table(values: Vec<f64>) -> Self {
        Schedule { rule: ScheduleRule::Custom, cache: RwLock::new(values) }
    }

    pub fn rule(&self) -> &ScheduleRule {
        &self.rule
    }

    /// Number of currently materialized entries.
    pub fn cached_len(&self) -> usize {
        self.cache.read().unwrap().len()
    }

    /// t_k for k >= 1.
    ///
    /// # Panics
    /// Panics when `k == 0`, or for a custom table when k exceeds the table.
    pub fn t_at(&self, k: usize) -> f64 {
        assert!(k >= 1, "t_k is indexed from k = 1");
        {
            let cache = self.cache.read().unwrap();
            if k <= cache.len() {
                return cache[k - 1];
            }
            if self.rule == ScheduleRule::Custom {
                panic!("custom schedule table has {} entries, asked for t_{k}", cache.len());
            }
        }
        let mut cache = self.cache.write().unwrap();
        while cache.len() < k {
            let next = match self.rule {
                ScheduleRule::Recurrence => {
                    let t = *cache.last().expect("cache seeded with t_1");
                    (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
                }
                // Closed form keeps entries exact: t_{j} = (j - 1 + r) / r.
                ScheduleRule::Linear { r } => (cache.len() as f64 + r) / r,
                ScheduleRule::Custom => unreachable!(),
            };
            cache.push(next);
        }
        cache[k - 1]
    }

    /// beta_k = (t_k - 1) / t_{k+1} for k >= 1; beta_0 = 0 by convention.
    pub fn beta_at(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        (self.t_at(k) - 1.0) / self.t_at(k + 1)
    }

    /// Check the rule conditions for every k <= horizon: t_1 = 1, strict
    /// increase, the defining inequality, the gap bound 0 < t_{k+1} - t_k < 1,
    /// and beta_k inside [(t_k-1)/t_{k+1}, (t_{k+1}-1)/t_{k+1}].
    pub fn validate(&self, horizon: usize) -> ValidationReport {
        let horizon = match self.rule {
            ScheduleRule::Custom => horizon.min(self.cached_len().saturating_sub(1)),
            _ => horizon,
        };
        let mut failures = Vec::new();
        let t1 = if self.cached_len() >= 1 { self.t_at(1) } else { f64::NAN };
        if t1 != 1.0 {
            failures.push(Violation { k: 1, check: CheckKind::FirstEntry, detail: format!("t_1 = {t1}") });
        }
        for k in 1..=horizon {
            let t = self.t_at(k);
            let tn = self.t_at(k + 1);
            if !(tn > t) {
                failures.push(Violation { k, check: CheckKind::Monotone, detail: format!("t_{} = {tn} <= t_{k} = {t}", k + 1) });
            }
            let slack = VALIDATE_RTOL * t * t;
            if tn * tn - tn > t * t + slack {
                failures.push(Violation {
                    k,
                    check: CheckKind::NesterovInequality,
                    detail: format!("t_{0}^2 - t_{0} - t_{1}^2 = {2:.3e}", k + 1, k, tn * tn - tn - t * t),
                });
            }
            let gap = tn - t;
            if !(gap > 0.0 && gap < 1.0) {
                failures.push(Violation { k, check: CheckKind::GapBound, detail: format!("t_{} - t_{k} = {gap}", k + 1) });
            }
            let beta = self.beta_at(k);
            let lo = (t - 1.0) / tn;
            let hi = (tn - 1.0) / tn;
            if !(beta >= lo - VALIDATE_RTOL && beta <= hi + VALIDATE_RTOL) {
                failures.push(Violation { k, check: CheckKind::BetaInterval, detail: format!("beta_{k} = {beta} not in [{lo}, {hi}]") });
            }
        }
        ValidationReport { horizon, failures }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    FirstEntry,
    Monotone,
    NesterovInequality,
    GapBound,
    BetaInterval,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub k: usize,
    pub check: CheckKind,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub horizon: usize,
    pub failures: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Build a schedule by rule name ("recurrence" or "linear").
pub fn make_schedule(rule: &str, r: Option<f64>) -> Result<Schedule> {
    match rule {
        "recurrence" => Ok(Schedule::recurrence()),
        "linear" => Schedule::linear(r.unwrap_or(2.0)),
        other => Err(Error::ParamDomain(format!("unknown schedule rule '{other}'"))),
    }
}

/// Constant extrapolation coefficient (sqrt(L) - sqrt(mu)) / (sqrt(L) + sqrt(mu))
/// used when the strong convexity modulus is known.
pub fn nag_sc_beta(mu: f64, l: f64) -> Result<f64> {
    if !(mu > 0.0 && l > mu) {
        return Err(Error::ParamDomain(format!("need 0 < mu < L, got mu={mu}, L={l}")));
    }
    let (sl, sm) = (l.sqrt(), mu.sqrt());
    Ok((sl - sm) / (sl + sm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_rule_closed_form() {
        let s = Schedule::linear(2.0).unwrap();
        assert_eq!(s.t_at(1), 1.0);
        assert_eq!(s.t_at(2), 1.5);
        assert_eq!(s.t_at(3), 2.0);
        assert_eq!(s.beta_at(2), 0.25);
        assert_eq!(s.beta_at(1), 0.0);
        // beta_{k+1} = k / (k + r + 1)
        for k in 1..200usize {
            let beta = s.beta_at(k + 1);
            let expect = k as f64 / (k as f64 + 3.0);
            assert!((beta - expect).abs() <= 1e-12 * expect.max(1.0));
        }
    }

    #[test]
    fn linear_rule_rejects_small_r() {
        assert!(Schedule::linear(1.99).is_err());
        assert!(make_schedule("linear", Some(1.0)).is_err());
    }

    #[test]
    fn recurrence_early_values() {
        let s = Schedule::recurrence();
        assert_eq!(s.t_at(1), 1.0);
        let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((s.t_at(2) - golden).abs() < 1e-15);
        // t_3 from one more application of the recurrence.
        let t3 = (1.0 + (1.0 + 4.0 * golden * golden).sqrt()) / 2.0;
        assert!((s.t_at(3) - t3).abs() < 1e-15);
        assert!((s.t_at(3) - 2.193_526_8).abs() < 1e-7);
        assert!((s.beta_at(2) - (golden - 1.0) / t3).abs() < 1e-15);
        assert!((s.beta_at(2) - 0.281_752_9).abs() < 1e-7);
    }

    #[test]
    fn recurrence_is_tight_at_k10() {
        let s = Schedule::recurrence();
        let (t9, t10) = (s.t_at(9), s.t_at(10));
        assert!(t10 > t9);
        assert!(t10 * t10 - t10 <= t9 * t9 * (1.0 + 1e-14));
        assert!((t10 * t10 - t10 - t9 * t9).abs() <= 1e-12 * t9 * t9);
    }

    #[test]
    fn queries_are_cache_backed_and_reproducible() {
        let s = Schedule::recurrence();
        let a = s.t_at(500);
        let b = s.t_at(500);
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(s.cached_len(), 500);
    }

    #[test]
    fn validate_both_rules_long_horizon() {
        for s in [Schedule::recurrence(), Schedule::linear(2.0).unwrap()] {
            let report = s.validate(100_000);
            assert!(report.passed(), "failures: {:?}", &report.failures[..report.failures.len().min(3)]);
        }
    }

    #[test]
    fn validate_flags_bad_custom_table() {
        let s = Schedule::from_table(vec![1.0, 3.0, 4.0]);
        let report = s.validate(10);
        assert!(!report.passed());
        assert!(report
            .failures
            .iter()
            .any(|v| v.k == 1 && matches!(v.check, CheckKind::GapBound | CheckKind::NesterovInequality)));
    }

    #[test]
    fn validate_flags_bad_first_entry() {
        let s = Schedule::from_table(vec![2.0, 2.5]);
        let report = s.validate(1);
        assert!(report.failures.iter().any(|v| v.check == CheckKind::FirstEntry));
    }

    #[test]
    fn nag_sc_beta_values() {
        assert!((nag_sc_beta(1.0, 4.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((nag_sc_beta(1.0, 100.0).unwrap() - 9.0 / 11.0).abs() < 1e-15);
        assert!(nag_sc_beta(1.0, 1.0 + 1e-12).unwrap() < 1e-6);
        assert!(nag_sc_beta(2.0, 1.0).is_err());
        assert!(nag_sc_beta(1.0, 1.0).is_err());
    }

    #[test]
    fn theta_form_matches_recurrence() {
        // Historical form: theta_0 = 1, theta_{k+1} = (sqrt(theta^4 + 4 theta^2) - theta^2)/2,
        // related by t_{k+1} = 1/theta_k.
        let s = Schedule::recurrence();
        let mut theta = 1.0f64;
        for k in 0..1000usize {
            let t = s.t_at(k + 1);
            let err = (1.0 / theta - t).abs() / t;
            assert!(err <= 1e-12, "k={k}, err={err:.3e}");
            theta = ((theta.powi(4) + 4.0 * theta * theta).sqrt() - theta * theta) / 2.0;
        }
    }

    #[test]
    fn rate_params_domain() {
        assert!(RateParams::new(1.0, 2.0, 0.25).is_ok());
        assert!(RateParams::new(1.0, 2.0, 0.5).is_ok());
        assert!(RateParams::new(1.0, 2.0, 0.6).is_err());
        assert!(RateParams::new(1.0, 1.0, 0.1).is_err());
        assert!(RateParams::new(0.0, 1.0, 0.1).is_err());
        let p = RateParams::critical(1.0, 2.0).unwrap();
        assert!(!p.is_subcritical());
        assert!(RateParams::new(1.0, 2.0, 0.25).unwrap().is_subcritical());
    }

    #[test]
    fn concurrent_reads_and_extension() {
        use std::sync::Arc;
        let s = Arc::new(Schedule::recurrence());
        let mut handles = Vec::new();
        for i in 0..8usize {
            let s = Arc::clone(&s);
            handles.push(std::thread::spawn(move || {
                let k = 1 + (i * 137) % 3000;
                s.t_at(k)
            }));
        }
        let got: Vec<f64> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        let fresh = Schedule::recurrence();
        for (i, v) in got.iter().enumerate() {
            let k = 1 + (i * 137) % 3000;
            assert_eq!(v.to_bits(), fresh.t_at(k).to_bits());
        }
    }

    proptest! {
        #[test]
        fn prop_gap_and_beta_interval(k in 1usize..2000, r in 2.0f64..16.0) {
            for s in [Schedule::recurrence(), Schedule::linear(r).unwrap()] {
                let (t, tn) = (s.t_at(k), s.t_at(k + 1));
                prop_assert!(tn - t > 0.0 && tn - t < 1.0);
                let beta = s.beta_at(k);
                prop_assert!((0.0..1.0).contains(&beta));
                prop_assert!(beta >= (t - 1.0) / tn - 1e-15);
                prop_assert!(beta <= (tn - 1.0) / tn + 1e-15);
            }
        }
    }
}
