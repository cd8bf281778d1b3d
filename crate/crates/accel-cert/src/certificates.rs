//! Explicit linear-rate certificates.
//!
//! For the subcritical step s < 1/L the per-iteration contraction factor is
//! rho_k = 1 - 1/min{C_k, D_k}, where C_k and D_k are infima of explicit
//! max-of-three expressions over positive witnesses. C_k reduces to a scalar
//! equal-value system solved by bisection; D_k is solved by bisection on the
//! candidate max value with an inner golden-section feasibility check. Both
//! have closed-form limits. For the critical step s = 1/L a single constant
//! rho comes from the positive root of a quadratic.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::linalg::KahanSum;
use crate::schedules::{RateParams, Schedule};

/// Tolerance of the scalar bisection for C (relative, on the common value E).
const C_BISECT_RTOL: f64 = 1e-12;
/// Tolerance of the outer bisection for D (absolute, on the max value).
const D_BISECT_ATOL: f64 = 1e-8;
/// Tolerance of the inner golden-section search (relative interval width).
const D_GOLDEN_RTOL: f64 = 1e-10;

fn require_strong(params: &RateParams) -> Result<()> {
    if !(params.mu() > 0.0) {
        return Err(Error::ParamDomain("certificates need mu > 0".into()));
    }
    Ok(())
}

fn require_subcritical(params: &RateParams) -> Result<()> {
    require_strong(params)?;
    if !params.is_subcritical() {
        return Err(Error::ParamDomain("certificate series needs s < 1/L (use the fixed-step certificate at s = 1/L)".into()));
    }
    Ok(())
}

/* ------------------------------ C side ------------------------------ */

/// Witness (a, b) attached to a C value. `boundary` marks the t = 1 case
/// where the infimum is only approached (a -> 0, b -> inf).
#[derive(Debug, Clone, Copy)]
pub struct CWitness {
    pub a: f64,
    pub b: f64,
    pub boundary: bool,
}

/// Explicit certificate value C_k(a, b) at t = t_{k+1} for arbitrary
/// positive witnesses; dominates the infimum.
pub fn c_value(t: f64, a: f64, b: f64, params: &RateParams) -> Result<f64> {
    require_subcritical(params)?;
    if !(t >= 1.0 && a > 0.0 && b > 0.0) {
        return Err(Error::ParamDomain(format!("need t >= 1 and a, b > 0; got t={t}, a={a}, b={b}")));
    }
    let (mu, l, s) = (params.mu(), params.lipschitz(), params.step());
    let t1 = (t - 1.0) * (1.0 + mu / a) / (t * (1.0 - s * l));
    let t2 = (1.0 + b) * (t - 1.0) / t + s * (a + l);
    let t3 = (1.0 + 1.0 / b) / t;
    Ok(t1.max(t2).max(t3) / (mu * s))
}

/// Infimum of C_k(a, b) over positive witnesses, at t = t_{k+1}.
///
/// For t > 1 the minimizer is the unique point where the three terms are
/// equal; eliminating a and b in favor of the common value E leaves one
/// scalar equation solved by bisection over (1, 3/(1-Ls)).
pub fn c_inf_at(t: f64, params: &RateParams) -> Result<(f64, CWitness)> {
    require_subcritical(params)?;
    if !(t >= 1.0) {
        return Err(Error::ParamDomain(format!("need t >= 1, got {t}")));
    }
    let (mu, l, s) = (params.mu(), params.lipschitz(), params.step());
    let ls = s * l;
    if t == 1.0 {
        // Boundary infimum: the (t-1) terms vanish and (1+1/b)/t -> 1.
        return Ok((1.0 / (mu * s), CWitness { a: 0.0, b: f64::INFINITY, boundary: true }));
    }
    // Witnesses in terms of the candidate common value E.
    let a_of = |e: f64| -> f64 {
        let denom = t * (1.0 - ls) * e / (t - 1.0) - 1.0;
        if denom <= 0.0 {
            f64::INFINITY
        } else {
            mu / denom
        }
    };
    let b_of = |e: f64| -> f64 {
        let denom = t * e - 1.0;
        if denom <= 0.0 {
            f64::INFINITY
        } else {
            1.0 / denom
        }
    };
    // Residual of the middle term; strictly decreasing in E.
    let g = |e: f64| -> f64 {
        let a = a_of(e);
        if !a.is_finite() {
            return f64::INFINITY;
        }
        let b = b_of(e);
        (1.0 + b) * (t - 1.0) / t + s * (a + l) - e
    };
    let mut lo = (1.0f64).max((t - 1.0) / (t * (1.0 - ls)));
    let mut hi = 3.0 / (1.0 - ls);
    if !(g(hi) < 0.0) {
        return Err(Error::CertificateSolve(format!("C bracket failed at t={t}")));
    }
    for _ in 0..200 {
        if hi - lo <= C_BISECT_RTOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e = hi;
    Ok((e / (mu * s), CWitness { a: a_of(e), b: b_of(e), boundary: false }))
}

/// Limit witness a_inf of the C infimum as t -> inf.
pub fn a_inf(params: &RateParams) -> f64 {
    let (mu, l, s) = (params.mu(), params.lipschitz(), params.step());
    let ls = s * l;
    (ls * ls + (ls.powi(4) + 4.0 * (1.0 - ls) * mu * s).sqrt()) / (2.0 * s * (1.0 - ls))
}

/// Closed-form limit C_inf of C_k as k -> inf.
pub fn c_limit(params: &RateParams) -> Result<f64> {
    require_subcritical(params)?;
    let (mu, l, s) = (params.mu(), params.lipschitz(), params.step());
    let ls = s * l;
    Ok((1.0 + ls) / (mu * s)
        + (ls * ls + (ls.powi(4) + 4.0 * (1.0 - ls) * mu * s).sqrt()) / (2.0 * (1.0 - ls) * mu * s))
}

/* ------------------------------ D side ------------------------------ */

/// Witness (u, v, w) attached to a D value. `boundary` marks the k = 0 case
/// (t_{k+1} = 1) where v and w are unbounded above.
#[derive(Debug, Clone, Copy)]
pub struct DWitness {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub boundary: bool,
}

fn d_terms(t1: f64, t2: f64, params: &RateParams) -> (f64, f64, f64, f64) {
    let (mu, l, s) = (params.mu(), params.lipschitz(), params.step());
    let ls = s * l;
    // Constant part of the first term.
    let q = (t2 - 1.0) * t2 / (t1 * t1 * (1.0 - ls)) * (1.0 / (s * mu) - 2.0 + ls);
    (q, ls, mu * s, t1)
}

/// Explicit certificate value D_k(u, v, w) + 1 at (t_{k+1}, t_{k+2}) = (t1, t2)
/// for arbitrary positive witnesses; dominates the infimum.
pub fn d_value(t1: f64, t2: f64, u: f64, v: f64, w: f64, params: &RateParams) -> Result<f64> {
    require_subcritical(params)?;
    if !(t1 >= 1.0 && t2 > t1 && u > 0.0 && v > 0.0 && w > 0.0) {
        return Err(Error::ParamDomain(format!(
            "need t2 > t1 >= 1 and u, v, w > 0; got t1={t1}, t2={t2}, u={u}, v={v}, w={w}"
        )));
    }
    let (q, ls, mus, _) = d_terms(t1, t2, params);
    let term1 = q + (1.0 + u + 1.0 / v) / (1.0 - ls);
    let term2 = (1.0 + v + w) * (t1 - 1.0) / (mus * t1);
    let term3 = (1.0 + 1.0 / w + 1.0 / u) / (mus * t1);
    Ok(term1.max(term2).max(term3) + 1.0)
}

struct DFeasibility {
    feasible: bool,
    witness: Option<(f64, f64, f64)>,
}

/// Can max{T1, T2, T3} <= m be met by positive witnesses? Solving T1 for
/// u + 1/v and T2 for v + w leaves a one-dimensional minimization over v.
fn d_feasible(m: f64, t1: f64, q: f64, ls: f64, mus: f64) -> DFeasibility {
    let p = (m - q) * (1.0 - ls) - 1.0; // u + 1/v <= p
    let s_cap = m * mus * t1 - 1.0; // 1/w + 1/u <= s_cap
    if p <= 0.0 || s_cap <= 0.0 {
        return DFeasibility { feasible: false, witness: None };
    }
    if t1 == 1.0 {
        // T2 vanishes; push v, w -> inf, leaving 1/u <= s_cap with u <= p.
        let feasible = p * s_cap >= 1.0;
        return DFeasibility { feasible, witness: feasible.then_some((p, 1e9, 1e9)) };
    }
    let r = m * mus * t1 / (t1 - 1.0) - 1.0; // v + w <= r
    let lo = 1.0 / p;
    if !(r > lo) {
        return DFeasibility { feasible: false, witness: None };
    }
    // h(v) = 1/(r - v) + 1/(p - 1/v) is unimodal on (1/p, r).
    let h = |v: f64| -> f64 {
        let du = p - 1.0 / v;
        let dw = r - v;
        if du <= 0.0 || dw <= 0.0 {
            f64::INFINITY
        } else {
            1.0 / dw + 1.0 / du
        }
    };
    let inv_phi = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, r);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut hc, mut hd) = (h(c), h(d));
    for _ in 0..300 {
        if b - a <= D_GOLDEN_RTOL * b.abs().max(1.0) {
            break;
        }
        if hc < hd {
            b = d;
            d = c;
            hd = hc;
            c = b - inv_phi * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + inv_phi * (b - a);
            hd = h(d);
        }
    }
    let v = 0.5 * (a + b);
    let hv = h(v).min(hc).min(hd);
    if hv <= s_cap {
        let v_best = if h(v) <= hc.min(hd) {
            v
        } else if hc <= hd {
            c
        } else {
            d
        };
        DFeasibility { feasible: true, witness: Some((p - 1.0 / v_best, v_best, r - v_best)) }
    } else {
        DFeasibility { feasible: false, witness: None }
    }
}

/// Infimum of D_k(u, v, w) over positive witnesses, by bisection on the
/// candidate max value with the golden-section feasibility check inside.
pub fn d_inf_at(k: usize, schedule: &Schedule, params: &RateParams) -> Result<(f64, DWitness)> {
    require_subcritical(params)?;
    let t1 = schedule.t_at(k + 1);
    let t2 = schedule.t_at(k + 2);
    let (q, ls, mus, _) = d_terms(t1, t2, params);
    let mut lo = 1.0 / (1.0 - ls);
    let mut hi = 3.0 / ((1.0 - ls) * mus);
    // The bracket is guaranteed; expand defensively before giving up.
    let mut expand = 0;
    while !d_feasible(hi, t1, q, ls, mus).feasible {
        hi *= 2.0;
        expand += 1;
        if expand > 8 {
            return Err(Error::CertificateSolve(format!("D bracket failed at k={k}")));
        }
    }
    if d_feasible(lo, t1, q, ls, mus).feasible {
        return Err(Error::CertificateSolve(format!("D lower bracket unexpectedly feasible at k={k}")));
    }
    for _ in 0..300 {
        if hi - lo <= D_BISECT_ATOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if d_feasible(mid, t1, q, ls, mus).feasible {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let feas = d_feasible(hi, t1, q, ls, mus);
    let (u, v, w) = feas.witness.ok_or_else(|| Error::CertificateSolve(format!("no witness at k={k}")))?;
    Ok((hi + 1.0, DWitness { u, v, w, boundary: t1 == 1.0 }))
}

/// Limit witness v_inf of the D infimum (the optimal v in the scalar limit
/// problem); D_inf = 1 + (1 + v_inf) / (mu s).
pub fn v_inf(params: &RateParams) -> f64 {
    let (mu, l, s) = (params.mu(), params.lipschitz(), params.step());
    let ls = s * l;
    let n = (l - mu) * s + l * mu * s * s;
    (n + (n * n + 4.0 * (1.0 - ls) * mu * s).sqrt()) / (2.0 * (1.0 - ls))
}

/// Closed-form limit D_inf of D_k as k -> inf.
pub fn d_limit(params: &RateParams) -> Result<f64> {
    require_subcritical(params)?;
    let (mu, l, s) = (params.mu(), params.lipschitz(), params.step());
    let ls = s * l;
    let n = (l - mu) * s + l * mu * s * s;
    Ok((1.0 + mu * s) / (mu * s) + (n + (n * n + 4.0 * (1.0 - ls) * mu * s).sqrt()) / (2.0 * (1.0 - ls) * mu * s))
}

/// Sandwich around D_k used to establish its limit, valid for k >= 1:
/// sigma_k (1 + v_inf)/(mu s) <= D_k - 1 <= (1 + v_inf)/(mu s) + 2/(t_{k+1}-1) max{1/(1-sL), 1/(mu s)}.
pub fn d_sandwich_bounds(k: usize, schedule: &Schedule, params: &RateParams) -> Result<(f64, f64)> {
    require_subcritical(params)?;
    if k == 0 {
        return Err(Error::ParamDomain("sandwich bounds need k >= 1".into()));
    }
    let (mu, l, s) = (params.mu(), params.lipschitz(), params.step());
    let ls = s * l;
    let t1 = schedule.t_at(k + 1);
    let t2 = schedule.t_at(k + 2);
    let sigma = ((t2 - 1.0) * t2 / (t1 * t1)).min((t1 - 1.0) / t1);
    let core = (1.0 + v_inf(params)) / (mu * s);
    let upper = core + 2.0 / (t1 - 1.0) * (1.0 / (1.0 - ls)).max(1.0 / (mu * s));
    Ok((1.0 + sigma * core, 1.0 + upper))
}

/* --------------------------- rho machinery --------------------------- */

/// How the per-k contraction factor combines the two certificate families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoMode {
    /// rho_k = 1 - 1/min{C_k, D_k} (smooth objectives).
    MinCd,
    /// rho_k = 1 - 1/D_k (composite objectives; C_k needs smoothness of F).
    DOnly,
}

#[derive(Clone)]
struct CachedPoint {
    c: f64,
    d: f64,
    c_witness: CWitness,
    d_witness: DWitness,
}

/// Memoized certificate evaluator bound to one (schedule, params) pair.
///
/// All queries are pure functions of (k); the internal cache is insert-only
/// and idempotent, so concurrent access is safe.
struct PrefixCache {
    // prefix[k] = sum_{i<k} log rho_i, for both rho modes.
    min_cd: Vec<f64>,
    d_only: Vec<f64>,
    acc_min: KahanSum,
    acc_d: KahanSum,
}

pub struct Certificates {
    schedule: Arc<Schedule>,
    params: RateParams,
    cache: RwLock<HashMap<usize, CachedPoint>>,
    log_prefix: RwLock<PrefixCache>,
}

impl Certificates {
    pub fn new(schedule: Arc<Schedule>, params: RateParams) -> Result<Self> {
        require_subcritical(&params)?;
        Ok(Certificates {
            schedule,
            params,
            cache: RwLock::new(HashMap::new()),
            log_prefix: RwLock::new(PrefixCache {
                min_cd: vec![0.0],
                d_only: vec![0.0],
                acc_min: KahanSum::new(),
                acc_d: KahanSum::new(),
            }),
        })
    }

    pub fn params(&self) -> &RateParams {
        &self.params
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    fn point(&self, k: usize) -> Result<CachedPoint> {
        if let Some(p) = self.cache.read().unwrap().get(&k) {
            return Ok(p.clone());
        }
        let (c, cw) = c_inf_at(self.schedule.t_at(k + 1), &self.params)?;
        let (d, dw) = d_inf_at(k, &self.schedule, &self.params)?;
        let p = CachedPoint { c, d, c_witness: cw, d_witness: dw };
        self.cache.write().unwrap().entry(k).or_insert_with(|| p.clone());
        Ok(self.cache.read().unwrap()[&k].clone())
    }

    pub fn c_at(&self, k: usize) -> Result<f64> {
        Ok(self.point(k)?.c)
    }

    pub fn d_at(&self, k: usize) -> Result<f64> {
        Ok(self.point(k)?.d)
    }

    pub fn c_witness(&self, k: usize) -> Result<CWitness> {
        Ok(self.point(k)?.c_witness)
    }

    pub fn d_witness(&self, k: usize) -> Result<DWitness> {
        Ok(self.point(k)?.d_witness)
    }

    /// Per-k contraction factor, in (0, 1).
    pub fn rho_at(&self, k: usize) -> Result<f64> {
        self.rho_at_mode(k, RhoMode::MinCd)
    }

    pub fn rho_at_mode(&self, k: usize, mode: RhoMode) -> Result<f64> {
        let p = self.point(k)?;
        let denom = match mode {
            RhoMode::MinCd => p.c.min(p.d),
            RhoMode::DOnly => p.d,
        };
        Ok(1.0 - 1.0 / denom)
    }

    /// sum_{i=0}^{k-1} log rho_i with compensated accumulation (MinCd mode).
    pub fn log_rho_prefix(&self, k: usize) -> Result<f64> {
        self.log_rho_prefix_mode(k, RhoMode::MinCd)
    }

    /// Prefix log-sum of the contraction factors for either rho mode.
    pub fn log_rho_prefix_mode(&self, k: usize, mode: RhoMode) -> Result<f64> {
        let pick = |pre: &PrefixCache| match mode {
            RhoMode::MinCd => pre.min_cd.get(k).copied(),
            RhoMode::DOnly => pre.d_only.get(k).copied(),
        };
        if let Some(v) = pick(&self.log_prefix.read().unwrap()) {
            return Ok(v);
        }
        let mut pre = self.log_prefix.write().unwrap();
        while pre.min_cd.len() <= k {
            let i = pre.min_cd.len() - 1;
            drop(pre);
            let rho_min = self.rho_at_mode(i, RhoMode::MinCd)?;
            let rho_d = self.rho_at_mode(i, RhoMode::DOnly)?;
            pre = self.log_prefix.write().unwrap();
            // Another thread may have advanced the prefix meanwhile.
            if pre.min_cd.len() == i + 1 {
                pre.acc_min.add(rho_min.ln());
                pre.acc_d.add(rho_d.ln());
                let (vm, vd) = (pre.acc_min.value(), pre.acc_d.value());
                pre.min_cd.push(vm);
                pre.d_only.push(vd);
            }
        }
        Ok(pick(&pre).expect("prefix extended through k"))
    }

    /// Materialize the per-k series up to and including k_max.
    pub fn series(&self, k_max: usize) -> Result<CertificateSeries> {
        let mut c = Vec::with_capacity(k_max + 1);
        let mut d = Vec::with_capacity(k_max + 1);
        let mut rho = Vec::with_capacity(k_max + 1);
        let mut rho_product = Vec::with_capacity(k_max + 1);
        let mut c_witness = Vec::with_capacity(k_max + 1);
        let mut d_witness = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let p = self.point(k)?;
            c.push(p.c);
            d.push(p.d);
            rho.push(1.0 - 1.0 / p.c.min(p.d));
            rho_product.push(self.log_rho_prefix(k)?.exp());
            c_witness.push(p.c_witness);
            d_witness.push(p.d_witness);
        }
        Ok(CertificateSeries {
            params: self.params,
            c,
            d,
            rho,
            rho_product,
            c_witness,
            d_witness,
            c_inf: c_limit(&self.params)?,
            d_inf: d_limit(&self.params)?,
            a_inf: a_inf(&self.params),
            v_inf: v_inf(&self.params),
        })
    }
}

/// Convenience one-shot evaluation of rho_k.
pub fn rho_at(k: usize, schedule: &Schedule, params: &RateParams) -> Result<f64> {
    let (c, _) = c_inf_at(schedule.t_at(k + 1), params)?;
    let (d, _) = d_inf_at(k, schedule, params)?;
    Ok(1.0 - 1.0 / c.min(d))
}

/// Fully materialized certificate series with witnesses and limits.
pub struct CertificateSeries {
    pub params: RateParams,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub rho: Vec<f64>,
    /// rho_product[k] = prod_{i=0}^{k-1} rho_i (empty product = 1).
    pub rho_product: Vec<f64>,
    pub c_witness: Vec<CWitness>,
    pub d_witness: Vec<DWitness>,
    pub c_inf: f64,
    pub d_inf: f64,
    pub a_inf: f64,
    pub v_inf: f64,
}

impl CertificateSeries {
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }
}

/* ----------------------------- fixed step ----------------------------- */

/// Constants of the critical-step (s = 1/L) certificate.
#[derive(Debug, Clone, Copy)]
pub struct FixedStepCertificate {
    pub lambda: f64,
    pub theta: f64,
    pub rho: f64,
    pub mu: f64,
    pub l: f64,
}

/// The energy weight lambda: reciprocal of the unique positive root of
/// tau^2 + ((L-mu)/mu)(4L-mu) tau - 2L(2L-mu)(L-mu)/mu = 0,
/// evaluated in the cancellation-free conjugate form.
pub fn lambda_of(mu: f64, l: f64) -> Result<f64> {
    if !(mu > 0.0 && l > mu) {
        return Err(Error::ParamDomain(format!("need 0 < mu < L, got mu={mu}, L={l}")));
    }
    let b = (l - mu) * (4.0 * l - mu) / mu;
    let c = 2.0 * l * (2.0 * l - mu) * (l - mu) / mu;
    let tau = 2.0 * c / (b + (b * b + 4.0 * c).sqrt());
    Ok(1.0 / tau)
}

/// Relative residual of the defining quadratic at tau = 1/lambda.
pub fn lambda_residual(mu: f64, l: f64, lambda: f64) -> f64 {
    let b = (l - mu) * (4.0 * l - mu) / mu;
    let c = 2.0 * l * (2.0 * l - mu) * (l - mu) / mu;
    let tau = 1.0 / lambda;
    let res = tau * tau + b * tau - c;
    res.abs() / (tau * tau).max(b * tau).max(c)
}

/// The two sides of the equal-value characterization of lambda:
/// phi(t) = 2/(Lt-1) (Lt + mu/(2(L-mu))), psi(t) = 2Lt/(1-(L-mu)t),
/// on the open interval 1/L < t < 1/(L-mu).
pub fn eval_phi_psi(t: f64, mu: f64, l: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0 && l > mu) {
        return Err(Error::ParamDomain(format!("need 0 < mu < L, got mu={mu}, L={l}")));
    }
    if !(t > 1.0 / l && t < 1.0 / (l - mu)) {
        return Err(Error::ParamDomain(format!("t={t} outside (1/L, 1/(L-mu)) = ({}, {})", 1.0 / l, 1.0 / (l - mu))));
    }
    let phi = 2.0 / (l * t - 1.0) * (l * t + 0.5 * mu / (l - mu));
    let psi = 2.0 * l * t / (1.0 - (l - mu) * t);
    Ok((phi, psi))
}

/// Full critical-step certificate: lambda, theta, and the rate rho = theta/(theta+1).
pub fn rho_fixed(mu: f64, l: f64) -> Result<FixedStepCertificate> {
    let lambda = lambda_of(mu, l)?;
    let theta = (l - mu) / mu * 2.0 * lambda * l / (1.0 - lambda * (l - mu));
    Ok(FixedStepCertificate { lambda, theta, rho: theta / (theta + 1.0), mu, l })
}

impl FixedStepCertificate {
    /// Strict upper bound (4L^2 - 3L mu)/(4L^2 - 3L mu + mu^2) on rho.
    pub fn rho_upper_bound(&self) -> f64 {
        let n = 4.0 * self.l * self.l - 3.0 * self.l * self.mu;
        n / (n + self.mu * self.mu)
    }

    /// Large-kappa approximation (4L^2-4Lmu)/(4L^2-4Lmu+mu^2) of rho.
    pub fn rho_large_kappa_approx(&self) -> f64 {
        let n = 4.0 * self.l * self.l - 4.0 * self.l * self.mu;
        n / (n + self.mu * self.mu)
    }
}

/* ----------------------------- comparisons ----------------------------- */

/// Per-k decreasing-ratio table for the method comparison, in log space
/// (the raw ratios underflow f64 on long horizons).
pub struct RateTable {
    /// log of 2 prod rho_i / ((t_{k+1}-1) t_{k+1}); entry 0 is +inf (the
    /// bound is vacuous at k = 0).
    pub log_nag: Vec<f64>,
    /// log of (1 - mu/(2L))^k.
    pub log_gd_half: Vec<f64>,
    /// log of (1 - mu/L)^k.
    pub log_gd_full: Vec<f64>,
    /// log of (1 - sqrt(mu/L))^k.
    pub log_nagsc: Vec<f64>,
    /// Comparison constant 1/(1 + mu s (1-Ls)/4) at the table's s.
    pub varrho: f64,
    /// 1 - mu/L.
    pub gd_rate: f64,
    pub rho_bar_lower: f64,
    pub rho_bar_upper: f64,
    pub rho_inf_upper: f64,
    /// max over computed rho_k.
    pub rho_bar_computed: f64,
    /// rho at the table horizon.
    pub rho_inf_estimate: f64,
}

/// Build the comparison table out to iteration k_max (inclusive).
pub fn comparison_rates(certs: &Certificates, k_max: usize) -> Result<RateTable> {
    let params = *certs.params();
    let (mu, l, s) = (params.mu(), params.lipschitz(), params.step());
    let ls = s * l;
    let mut log_nag = Vec::with_capacity(k_max + 1);
    log_nag.push(f64::INFINITY);
    let mut rho_bar = 0.0f64;
    for k in 1..=k_max {
        let t = certs.schedule().t_at(k + 1);
        log_nag.push(2.0f64.ln() + certs.log_rho_prefix(k)? - ((t - 1.0) * t).ln());
        rho_bar = rho_bar.max(certs.rho_at(k - 1)?);
    }
    let gd_half = (1.0 - mu / (2.0 * l)).ln();
    let gd_full = (1.0 - mu / l).ln();
    let nagsc = (1.0 - (mu / l).sqrt()).ln();
    let geometric = |r: f64| (0..=k_max).map(|k| k as f64 * r).collect::<Vec<f64>>();
    Ok(RateTable {
        log_nag,
        log_gd_half: geometric(gd_half),
        log_gd_full: geometric(gd_full),
        log_nagsc: geometric(nagsc),
        varrho: 1.0 / (1.0 + mu * s * (1.0 - ls) / 4.0),
        gd_rate: 1.0 - mu / l,
        rho_bar_lower: 1.0 - (1.0 - ls) * mu * s,
        rho_bar_upper: 1.0 - (1.0 - ls) * mu * s / (1.0 + (mu / l).max(0.125)),
        rho_inf_upper: 1.0 - (1.0 - ls) * mu * s / (1.0 + mu / l),
        rho_bar_computed: rho_bar,
        rho_inf_estimate: certs.rho_at(k_max.max(1) - 1)?,
    })
}

/* --------------------------- brute-force oracle --------------------------- */

pub mod bruteforce {
    //! Log-spaced grid oracles cross-checking the infimum solvers.
    //!
    //! A coarse global sweep locates the basin; nested grid passes then zoom
    //! on the incumbent cell. When the incumbent sits on a box edge the box
    //! expands outward instead, which handles infima attained only in the
    //! limit (t = 1 boundary witnesses).

    use super::*;

    /// Minimize f over [lo, hi]^dim with a log-spaced grid of
    /// `coarse` points per axis, followed by `refines` zoom/expand passes of
    /// `fine` points per axis. Returns (min value, argmin).
    pub fn grid_minimize(
        f: &dyn Fn(&[f64]) -> f64,
        dim: usize,
        lo: f64,
        hi: f64,
        coarse: usize,
        fine: usize,
        refines: usize,
    ) -> (f64, Vec<f64>) {
        assert!(lo > 0.0 && hi > lo && dim >= 1 && coarse >= 2 && fine >= 3);
        let mut lo_v = vec![lo; dim];
        let mut hi_v = vec![hi; dim];
        let mut best_val = f64::INFINITY;
        let mut best_x = vec![lo; dim];
        for pass in 0..=refines {
            let n = if pass == 0 { coarse } else { fine };
            let axes: Vec<Vec<f64>> = (0..dim)
                .map(|i| {
                    let step = (hi_v[i] / lo_v[i]).ln() / (n - 1) as f64;
                    (0..n).map(|j| lo_v[i] * (step * j as f64).exp()).collect()
                })
                .collect();
            let mut idx = vec![0usize; dim];
            let mut best_idx = vec![0usize; dim];
            let mut x = vec![0.0f64; dim];
            loop {
                for i in 0..dim {
                    x[i] = axes[i][idx[i]];
                }
                let v = f(&x);
                if v < best_val {
                    best_val = v;
                    best_x.copy_from_slice(&x);
                    best_idx.copy_from_slice(&idx);
                }
                // odometer increment
                let mut carry = true;
                for i in 0..dim {
                    if carry {
                        idx[i] += 1;
                        if idx[i] == n {
                            idx[i] = 0;
                        } else {
                            carry = false;
                        }
                    }
                }
                if carry {
                    break;
                }
            }
            // Zoom on the incumbent cell; expand outward at the box edges.
            for i in 0..dim {
                let step = (hi_v[i] / lo_v[i]).powf(1.0 / (n - 1) as f64);
                let p = best_x[i];
                if best_idx[i] == 0 {
                    lo_v[i] = (lo_v[i] / 8.0).max(1e-300);
                    hi_v[i] = p * step;
                } else if best_idx[i] == n - 1 {
                    lo_v[i] = p / step;
                    hi_v[i] = hi_v[i] * 8.0;
                } else {
                    lo_v[i] = p / step;
                    hi_v[i] = p * step;
                }
            }
        }
        (best_val, best_x)
    }

    /// Grid infimum of the C certificate at extrapolation value t.
    pub fn c_grid(t: f64, params: &RateParams) -> Result<f64> {
        let params = *params;
        let f = move |x: &[f64]| c_value(t, x[0], x[1], &params).unwrap_or(f64::INFINITY);
        Ok(grid_minimize(&f, 2, 1e-3, 1e3, 96, 17, 10).0)
    }

    /// Grid infimum of the D certificate at iteration k.
    pub fn d_grid(k: usize, schedule: &Schedule, params: &RateParams) -> Result<f64> {
        let t1 = schedule.t_at(k + 1);
        let t2 = schedule.t_at(k + 2);
        let params = *params;
        let f = move |x: &[f64]| d_value(t1, t2, x[0], x[1], x[2], &params).unwrap_or(f64::INFINITY);
        Ok(grid_minimize(&f, 3, 1e-3, 1e3, 64, 17, 10).0)
    }
}
