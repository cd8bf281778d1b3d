//! Dense vector/matrix helpers sized for desk-scale problems (dim <= 1e3).

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        let data = rows.into_iter().flatten().collect();
        Matrix { rows: nrows, cols: ncols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// y = A^T x
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for (yj, aij) in y.iter_mut().zip(self.row(i)) {
                *yj += aij * xi;
            }
        }
        y
    }

    /// Sum of squared entries of row i.
    pub fn row_norm_sq(&self, i: usize) -> f64 {
        dot(self.row(i), self.row(i))
    }

    /// Largest and smallest eigenvalue of A^T A by (shifted) power iteration,
    /// converged to relative 1e-10 on the Rayleigh quotient.
    pub fn gram_extreme_eigenvalues(&self) -> (f64, f64) {
        let n = self.cols;
        let apply = |x: &[f64]| self.matvec_t(&self.matvec(x));
        let lam_max = power_iteration(n, apply, None);
        // Largest eigenvalue of (lam_max I - A^T A) recovers the smallest of A^T A.
        let shifted = |x: &[f64]| {
            let ax = apply(x);
            x.iter().zip(&ax).map(|(xi, axi)| lam_max * xi - axi).collect::<Vec<f64>>()
        };
        let lam_min = (lam_max - power_iteration(n, shifted, None)).max(0.0);
        (lam_max, lam_min)
    }
}

fn power_iteration(n: usize, apply: impl Fn(&[f64]) -> Vec<f64>, start: Option<Vec<f64>>) -> f64 {
    // Deterministic non-degenerate start vector.
    let mut v = start.unwrap_or_else(|| (0..n).map(|i| 1.0 + (i as f64) / (n as f64 + 1.0)).collect());
    let inv = 1.0 / norm(&v);
    scale(&mut v, inv);
    let mut lam = 0.0;
    for _ in 0..200_000 {
        let w = apply(&v);
        let lam_new = dot(&v, &w);
        let wn = norm(&w);
        if wn == 0.0 {
            return 0.0;
        }
        v = w;
        scale(&mut v, 1.0 / wn);
        if (lam_new - lam).abs() <= 1e-10 * lam_new.abs().max(1e-300) {
            return lam_new;
        }
        lam = lam_new;
    }
    lam
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn scale(a: &mut [f64], s: f64) {
    for x in a {
        *x *= s;
    }
}

/// a + s*b
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// Compensated (Kahan) accumulator for long scalar sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
