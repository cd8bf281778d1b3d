//! Strongly convex smooth and composite test problems.
//!
//! Every oracle carries exact (or certified upper/lower) moduli mu and L, a
//! reference minimizer, and the reference minimum. Nonanalytic references are
//! produced by a plain proximal-gradient pre-solve at s = 1/L, which is
//! monotone and independent of the accelerated methods under test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Target residual of the reference pre-solve: ||G_s(x)|| <= RTOL * L * (1 + ||x||).
pub const REFERENCE_RTOL: f64 = 1e-13;
const REFERENCE_CAP: usize = 10_000_000;

/// Common oracle surface consumed by solvers, certificates, and audits.
pub trait ProblemOracle: Send + Sync {
    fn dim(&self) -> usize;
    /// Strong convexity modulus of the full objective (lower bound).
    fn mu(&self) -> f64;
    /// Smoothness modulus of the smooth part (upper bound).
    fn lipschitz(&self) -> f64;
    /// Full objective: f(x) for smooth problems, F(x) = f(x) + g(x) for composite.
    fn objective(&self, x: &[f64]) -> f64;
    /// Smooth part value f(x).
    fn smooth_value(&self, x: &[f64]) -> f64;
    fn smooth_gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Gradient mapping at step s: grad f(y) for smooth problems (exactly),
    /// G_s(y) = (y - prox_{sg}(y - s grad f(y))) / s for composite ones.
    fn mapping(&self, s: f64, y: &[f64]) -> Vec<f64>;
    fn x_star(&self) -> &[f64];
    /// Reference minimum of the full objective.
    fn objective_star(&self) -> f64;
    /// Gradient(-mapping) norm achieved by the reference solve (0 for analytic).
    fn reference_residual(&self) -> f64;
    /// Certified upper bound on objective_star() - true minimum.
    fn objective_star_slack(&self) -> f64;
    fn is_composite(&self) -> bool {
        false
    }
}

/// Reference optimum of a problem, as stored on the oracle.
pub fn reference_optimum(problem: &dyn ProblemOracle) -> (&[f64], f64) {
    (problem.x_star(), problem.objective_star())
}

type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Smooth problem with exact moduli and a stored reference optimum.
/// Immutable after construction and safe to share across runs.
pub struct SmoothOracle {
    value: ValueFn,
    gradient: GradFn,
    mu: f64,
    l: f64,
    dim: usize,
    x_star: Vec<f64>,
    f_star: f64,
    reference_residual: f64,
    f_star_slack: f64,
}

impl SmoothOracle {
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
}

impl ProblemOracle for SmoothOracle {
    fn dim(&self) -> usize {
        self.dim
    }
    fn mu(&self) -> f64 {
        self.mu
    }
    fn lipschitz(&self) -> f64 {
        self.l
    }
    fn objective(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn smooth_value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn smooth_gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
    fn mapping(&self, _s: f64, y: &[f64]) -> Vec<f64> {
        (self.gradient)(y)
    }
    fn x_star(&self) -> &[f64] {
        &self.x_star
    }
    fn objective_star(&self) -> f64 {
        self.f_star
    }
    fn reference_residual(&self) -> f64 {
        self.reference_residual
    }
    fn objective_star_slack(&self) -> f64 {
        self.f_star_slack
    }
}

/// Nonsmooth part of a composite objective, with its proximal rule.
pub enum NonsmoothPart {
    Zero,
    /// weight * ||x||_1
    L1 { weight: f64 },
    /// Indicator of the nonnegative orthant.
    NonnegProjection,
    /// Value handle without a proximal rule; prox_apply reports Unsupported.
    Custom { value: ValueFn },
}

impl NonsmoothPart {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            NonsmoothPart::Zero => 0.0,
            NonsmoothPart::L1 { weight } => weight * x.iter().map(|v| v.abs()).sum::<f64>(),
            NonsmoothPart::NonnegProjection => {
                if x.iter().all(|&v| v >= 0.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            NonsmoothPart::Custom { value } => value(x),
        }
    }

    /// prox_{s g}(y), exact closed form.
    pub fn prox(&self, s: f64, y: &[f64]) -> Result<Vec<f64>> {
        match self {
            NonsmoothPart::Zero => Ok(y.to_vec()),
            NonsmoothPart::L1 { weight } => {
                let tau = s * weight;
                Ok(y.iter().map(|&v| soft_threshold(v, tau)).collect())
            }
            NonsmoothPart::NonnegProjection => Ok(y.iter().map(|&v| v.max(0.0)).collect()),
            NonsmoothPart::Custom { .. } => {
                Err(Error::Unsupported("no proximal rule for custom nonsmooth part".into()))
            }
        }
    }
}

fn soft_threshold(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

/// Composite problem F = f + g with a proximable g.
pub struct CompositeOracle {
    smooth: SmoothOracle,
    nonsmooth: NonsmoothPart,
    x_star: Vec<f64>,
    big_f_star: f64,
    reference_residual: f64,
    f_star_slack: f64,
}

impl CompositeOracle {
    pub fn smooth(&self) -> &SmoothOracle {
        &self.smooth
    }

    pub fn nonsmooth(&self) -> &NonsmoothPart {
        &self.nonsmooth
    }

    pub fn nonsmooth_value(&self, x: &[f64]) -> f64 {
        self.nonsmooth.value(x)
    }
}

impl ProblemOracle for CompositeOracle {
    fn dim(&self) -> usize {
        self.smooth.dim
    }
    fn mu(&self) -> f64 {
        self.smooth.mu
    }
    fn lipschitz(&self) -> f64 {
        self.smooth.l
    }
    fn objective(&self, x: &[f64]) -> f64 {
        self.smooth.value(x) + self.nonsmooth.value(x)
    }
    fn smooth_value(&self, x: &[f64]) -> f64 {
        self.smooth.value(x)
    }
    fn smooth_gradient(&self, x: &[f64]) -> Vec<f64> {
        self.smooth.gradient(x)
    }
    fn mapping(&self, s: f64, y: &[f64]) -> Vec<f64> {
        match self.nonsmooth {
            // Exact reduction: the mapping of g = 0 is the gradient itself.
            NonsmoothPart::Zero => self.smooth.gradient(y),
            _ => {
                let grad = self.smooth.gradient(y);
                let inner = linalg::axpy(y, -s, &grad);
                let p = self.nonsmooth.prox(s, &inner).expect("constructed with a proximal rule");
                y.iter().zip(&p).map(|(yi, pi)| (yi - pi) / s).collect()
            }
        }
    }
    fn x_star(&self) -> &[f64] {
        &self.x_star
    }
    fn objective_star(&self) -> f64 {
        self.big_f_star
    }
    fn reference_residual(&self) -> f64 {
        self.reference_residual
    }
    fn objective_star_slack(&self) -> f64 {
        self.f_star_slack
    }
    fn is_composite(&self) -> bool {
        true
    }
}

/// prox_{s g}(y) for the oracle's nonsmooth part.
pub fn prox_apply(oracle: &CompositeOracle, s: f64, y: &[f64]) -> Result<Vec<f64>> {
    if !(s > 0.0) {
        return Err(Error::ParamDomain(format!("prox scale must be positive, got {s}")));
    }
    oracle.nonsmooth.prox(s, y)
}

/// f(x) = 1/2 sum d_i x_i^2 - b^T x with positive, non-uniform diagonal.
pub fn quadratic_problem(diag: &[f64], b: &[f64]) -> Result<SmoothOracle> {
    if diag.is_empty() || diag.len() != b.len() {
        return Err(Error::ParamDomain("diag and b must be nonempty and of equal length".into()));
    }
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::ParamDomain("diagonal entries must be positive".into()));
    }
    let mu = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let l = diag.iter().cloned().fold(0.0f64, f64::max);
    if !(l > mu) {
        return Err(Error::ParamDomain("uniform diagonal: need min < max so that L > mu".into()));
    }
    Ok(build_diag_quadratic(diag.to_vec(), b.to_vec(), mu, l))
}

/// Convex-only variant that admits zero diagonal entries (mu may be 0).
/// Coordinates with d_i = 0 must have b_i = 0 so a minimizer exists; the
/// reference takes 0 in those coordinates.
pub fn convex_quadratic(diag: &[f64], b: &[f64]) -> Result<SmoothOracle> {
    if diag.is_empty() || diag.len() != b.len() {
        return Err(Error::ParamDomain("diag and b must be nonempty and of equal length".into()));
    }
    if diag.iter().any(|&d| d < 0.0) {
        return Err(Error::ParamDomain("diagonal entries must be nonnegative".into()));
    }
    if diag.iter().zip(b).any(|(&d, &bi)| d == 0.0 && bi != 0.0) {
        return Err(Error::ParamDomain("zero-curvature coordinate with nonzero linear term is unbounded below".into()));
    }
    let mu = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let l = diag.iter().cloned().fold(0.0f64, f64::max);
    if !(l > 0.0) {
        return Err(Error::ParamDomain("need at least one positive diagonal entry".into()));
    }
    Ok(build_diag_quadratic(diag.to_vec(), b.to_vec(), mu, l))
}

fn build_diag_quadratic(diag: Vec<f64>, b: Vec<f64>, mu: f64, l: f64) -> SmoothOracle {
    let x_star: Vec<f64> = diag.iter().zip(&b).map(|(&d, &bi)| if d > 0.0 { bi / d } else { 0.0 }).collect();
    let f_star = -0.5 * diag.iter().zip(&b).filter(|(d, _)| **d > 0.0).map(|(&d, &bi)| bi * bi / d).sum::<f64>();
    let dim = diag.len();
    let d1 = diag.clone();
    let d2 = diag;
    let b1 = b.clone();
    let b2 = b;
    SmoothOracle {
        value: Box::new(move |x| {
            x.iter().zip(&d1).zip(&b1).map(|((&xi, &di), &bi)| 0.5 * di * xi * xi - bi * xi).sum()
        }),
        gradient: Box::new(move |x| x.iter().zip(&d2).zip(&b2).map(|((&xi, &di), &bi)| di * xi - bi).collect()),
        mu,
        l,
        dim,
        x_star,
        f_star,
        reference_residual: 0.0,
        f_star_slack: 0.0,
    }
}

/// Regularized logistic regression:
/// f(x) = (1/m) sum log(1 + exp(-y_i a_i^T x)) + (mu_reg/2) ||x||^2.
///
/// mu = mu_reg (exact lower bound); L = mu_reg + sum ||a_i||^2 / (4m)
/// (row-norm bound on the loss Hessian). The reference optimum comes from the
/// pre-solve.
pub fn logistic_problem(features: Matrix, labels: &[f64], mu_reg: f64) -> Result<SmoothOracle> {
    if features.rows() == 0 || features.cols() == 0 {
        return Err(Error::ParamDomain("empty data".into()));
    }
    if labels.len() != features.rows() {
        return Err(Error::ParamDomain("labels/rows mismatch".into()));
    }
    if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(Error::ParamDomain("labels must be +1 or -1".into()));
    }
    if !(mu_reg > 0.0) {
        return Err(Error::ParamDomain("mu_reg must be positive".into()));
    }
    let m = features.rows() as f64;
    let row_norm_total: f64 = (0..features.rows()).map(|i| features.row_norm_sq(i)).sum();
    let l = mu_reg + row_norm_total / (4.0 * m);
    let mu = mu_reg;
    let dim = features.cols();
    let labels: Vec<f64> = labels.to_vec();

    let feat_v = features.clone();
    let lab_v = labels.clone();
    let value: ValueFn = Box::new(move |x| {
        let mut acc = 0.0;
        for i in 0..feat_v.rows() {
            let z = lab_v[i] * linalg::dot(feat_v.row(i), x);
            acc += log1p_exp_neg(z);
        }
        acc / m + 0.5 * mu_reg * linalg::dot(x, x)
    });
    let gradient: GradFn = Box::new(move |x| {
        let mut g: Vec<f64> = x.iter().map(|&xi| mu_reg * xi).collect();
        for i in 0..features.rows() {
            let z = labels[i] * linalg::dot(features.row(i), x);
            // d/dz log(1+e^{-z}) = -1/(1+e^{z})
            let coeff = -labels[i] / ((1.0 + z.exp()) * m);
            for (gj, aij) in g.iter_mut().zip(features.row(i)) {
                *gj += coeff * aij;
            }
        }
        g
    });

    let (x_star, f_star, residual, slack) =
        presolve_reference(&value, &gradient, &NonsmoothPart::Zero, dim, mu, l)?;
    Ok(SmoothOracle {
        value,
        gradient,
        mu,
        l,
        dim,
        x_star,
        f_star,
        reference_residual: residual,
        f_star_slack: slack,
    })
}

fn log1p_exp_neg(z: f64) -> f64 {
    if z >= 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// LASSO with a ridge term:
/// F(x) = 1/2 ||Ax - b||^2 + (mu_reg/2) ||x||^2 + l1 ||x||_1.
///
/// mu = mu_reg + sigma_min(A)^2 and L = mu_reg + sigma_max(A)^2 via power
/// iteration on A^T A.
pub fn composite_lasso(a: Matrix, b: &[f64], mu_reg: f64, l1: f64) -> Result<CompositeOracle> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::ParamDomain("empty matrix".into()));
    }
    if b.len() != a.rows() {
        return Err(Error::ParamDomain("rhs length must match rows".into()));
    }
    if !(mu_reg > 0.0) {
        return Err(Error::ParamDomain("mu_reg must be positive (smooth part must be strongly convex)".into()));
    }
    if l1 < 0.0 {
        return Err(Error::ParamDomain("l1 weight must be nonnegative".into()));
    }
    let (lam_max, lam_min) = a.gram_extreme_eigenvalues();
    let mu = mu_reg + lam_min;
    let l = mu_reg + lam_max;
    let dim = a.cols();
    let b_owned: Vec<f64> = b.to_vec();

    let a_v = a.clone();
    let b_v = b_owned.clone();
    let value: ValueFn = Box::new(move |x| {
        let r = a_v.matvec(x);
        let res: f64 = r.iter().zip(&b_v).map(|(ri, bi)| (ri - bi) * (ri - bi)).sum();
        0.5 * res + 0.5 * mu_reg * linalg::dot(x, x)
    });
    let gradient: GradFn = Box::new(move |x| {
        let r = a.matvec(x);
        let diff: Vec<f64> = r.iter().zip(&b_owned).map(|(ri, bi)| ri - bi).collect();
        let mut g = a.matvec_t(&diff);
        for (gi, xi) in g.iter_mut().zip(x) {
            *gi += mu_reg * xi;
        }
        g
    });

    let nonsmooth = if l1 == 0.0 { NonsmoothPart::Zero } else { NonsmoothPart::L1 { weight: l1 } };

    // Reference for the smooth part alone (contract of the inner oracle).
    let (sx, sf, sres, sslack) = presolve_reference(&value, &gradient, &NonsmoothPart::Zero, dim, mu, l)?;
    // Reference for the full composite objective.
    let (x_star, big_f_star, residual, slack) = presolve_reference(&value, &gradient, &nonsmooth, dim, mu, l)?;

    let smooth = SmoothOracle {
        value,
        gradient,
        mu,
        l,
        dim,
        x_star: sx,
        f_star: sf,
        reference_residual: sres,
        f_star_slack: sslack,
    };
    Ok(CompositeOracle { smooth, nonsmooth, x_star, big_f_star, reference_residual: residual, f_star_slack: slack })
}

/// Composite with a custom nonsmooth value handle and no proximal rule.
/// Exists to exercise the unsupported-prox error path.
pub fn composite_custom(smooth: SmoothOracle, value: ValueFn) -> CompositeOracle {
    let x_star = smooth.x_star.clone();
    let f_star = smooth.f_star + value(&x_star);
    let residual = smooth.reference_residual;
    let slack = smooth.f_star_slack;
    CompositeOracle {
        smooth,
        nonsmooth: NonsmoothPart::Custom { value },
        x_star,
        big_f_star: f_star,
        reference_residual: residual,
        f_star_slack: slack,
    }
}

/// Plain proximal-gradient iteration at s = 1/L from the origin, run until
/// ||G_s(x)|| <= REFERENCE_RTOL * L * (1 + ||x||).
fn presolve_reference(
    value: &ValueFn,
    gradient: &GradFn,
    nonsmooth: &NonsmoothPart,
    dim: usize,
    mu: f64,
    l: f64,
) -> Result<(Vec<f64>, f64, f64, f64)> {
    let s = 1.0 / l;
    let mut x = vec![0.0; dim];
    let mut residual = f64::INFINITY;
    for _ in 0..REFERENCE_CAP {
        let g = gradient(&x);
        let inner = linalg::axpy(&x, -s, &g);
        let next = nonsmooth.prox(s, &inner)?;
        let map_norm = linalg::dist(&x, &next) / s;
        residual = map_norm;
        let target = REFERENCE_RTOL * l * (1.0 + linalg::norm(&x));
        x = next;
        if map_norm <= target {
            let f_star = value(&x) + nonsmooth.value(&x);
            // F(x+) - F* <= ||G||^2 / (2 mu) for mu-strongly convex composites.
            let slack = map_norm * map_norm / (2.0 * mu);
            return Ok((x, f_star, map_norm, slack));
        }
    }
    Err(Error::ReferenceSolve { achieved: residual, target: REFERENCE_RTOL * l * (1.0 + linalg::norm(&x)) })
}

/* ---------------- seeded random instances ---------------- */

/// Random diagonal quadratic with exact extreme eigenvalues mu = 1, L = kappa.
pub fn random_quadratic(kappa: f64, dim: usize, seed: u64) -> Result<SmoothOracle> {
    if !(kappa > 1.0) || dim < 2 {
        return Err(Error::ParamDomain("need kappa > 1 and dim >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut diag = vec![0.0; dim];
    diag[0] = 1.0;
    diag[1] = kappa;
    for d in diag.iter_mut().skip(2) {
        *d = 1.0 + (kappa - 1.0) * rng.gen::<f64>();
    }
    let b: Vec<f64> = (0..dim).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
    quadratic_problem(&diag, &b)
}

/// Random two-class logistic instance with mu_reg = 1.
pub fn random_logistic(dim: usize, samples: usize, mu_reg: f64, seed: u64) -> Result<SmoothOracle> {
    if dim == 0 || samples == 0 {
        return Err(Error::ParamDomain("empty data".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(samples);
    let mut labels = Vec::with_capacity(samples);
    for _ in 0..samples {
        rows.push((0..dim).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect::<Vec<f64>>());
        labels.push(if rng.gen::<bool>() { 1.0 } else { -1.0 });
    }
    logistic_problem(Matrix::from_rows(rows), &labels, mu_reg)
}

/// Random LASSO + ridge instance (square A with uniform entries).
pub fn random_lasso(dim: usize, mu_reg: f64, l1: f64, seed: u64) -> Result<CompositeOracle> {
    if dim == 0 {
        return Err(Error::ParamDomain("empty data".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| (2.0 * rng.gen::<f64>() - 1.0) / (dim as f64).sqrt()).collect())
        .collect();
    let b: Vec<f64> = (0..dim).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
    composite_lasso(Matrix::from_rows(rows), &b, mu_reg, l1)
}
