//! Differentiable convex objectives with known generalized-smoothness constants.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::domain::{SmoothnessParams, Vector};
use crate::error::{check_dim, Error, Result};

pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &Vector) -> Result<f64>;

    fn gradient(&self, x: &Vector) -> Result<Vector>;

    /// `(L0, L1)` and, where it exists, the classical `L`.
    fn smoothness(&self) -> Result<SmoothnessParams>;

    /// PL constant `mu`, when known in closed form.
    fn pl_constant(&self) -> Option<f64> {
        None
    }

    /// Known optimal value, when known in closed form.
    fn reference_optimum(&self) -> Option<f64> {
        None
    }

    fn name(&self) -> &'static str;
}

/// `log(1 + exp(-m))` without overflow for large `|m|`.
pub fn softplus_neg(m: f64) -> f64 {
    (-m.abs()).exp().ln_1p() + (-m).max(0.0)
}

/// `1 / (1 + exp(m))`, stable on both tails.
fn sigmoid_neg(m: f64) -> f64 {
    if m >= 0.0 {
        let e = (-m).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + m.exp())
    }
}

/// Averaged logistic loss `(1/n) sum_i log(1 + exp(-y_i (A x)_i))` with samples
/// as the rows of `A`.
#[derive(Debug, Clone)]
pub struct LogisticRegression {
    matrix: DMatrix<f64>,
    labels: Vector,
}

impl LogisticRegression {
    pub fn new(matrix: DMatrix<f64>, labels: Vector) -> Result<Self> {
        check_dim(matrix.nrows(), labels.len())?;
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::invalid("logistic regression needs a non-empty matrix"));
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::invalid(format!("labels must be +1 or -1, found {bad}")));
        }
        Ok(Self { matrix, labels })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn labels(&self) -> &Vector {
        &self.labels
    }

    fn margins(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.matrix.ncols(), x.len())?;
        Ok((&self.matrix * x).component_mul(&self.labels))
    }

    /// Largest row norm `max_i ||A_i||`.
    pub fn max_row_norm(&self) -> f64 {
        self.matrix.row_iter().map(|r| r.norm()).fold(0.0, f64::max)
    }
}

impl Objective for LogisticRegression {
    fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        let m = self.margins(x)?;
        let n = m.len() as f64;
        Ok(m.iter().map(|&mi| softplus_neg(mi)).sum::<f64>() / n)
    }

    fn gradient(&self, x: &Vector) -> Result<Vector> {
        let m = self.margins(x)?;
        let n = m.len() as f64;
        let weights = Vector::from_iterator(
            m.len(),
            m.iter()
                .zip(self.labels.iter())
                .map(|(&mi, &yi)| -yi * sigmoid_neg(mi) / n),
        );
        Ok(self.matrix.tr_mul(&weights))
    }

    /// `L0 = 0`, `L1 = max_i ||A_i||`, `L = max_i ||A_i||^2`.
    fn smoothness(&self) -> Result<SmoothnessParams> {
        let l1 = self.max_row_norm();
        if l1 == 0.0 {
            return Err(Error::invalid("all-zero design matrix has no smoothness constant"));
        }
        SmoothnessParams::new(0.0, l1, Some(l1 * l1))
    }

    fn name(&self) -> &'static str {
        "logistic"
    }
}

/// `f(x) = exp(a^T x)`: `(0, ||a||)`-smooth but not globally `L`-smooth.
#[derive(Debug, Clone)]
pub struct ExpLinear {
    a: Vector,
}

impl ExpLinear {
    pub fn new(a: Vector) -> Result<Self> {
        if a.iter().all(|&v| v == 0.0) {
            return Err(Error::invalid("exp(a^T x) with a = 0 is constant"));
        }
        Ok(Self { a })
    }
}

impl Objective for ExpLinear {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        check_dim(self.a.len(), x.len())?;
        Ok(self.a.dot(x).exp())
    }

    fn gradient(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.a.len(), x.len())?;
        Ok(&self.a * self.a.dot(x).exp())
    }

    fn smoothness(&self) -> Result<SmoothnessParams> {
        SmoothnessParams::new(0.0, self.a.norm(), None)
    }

    fn name(&self) -> &'static str {
        "exp_linear"
    }
}

/// `f(x) = ||x||^n` for `n >= 2`, `(2n, 2n - 1)`-smooth.
#[derive(Debug, Clone)]
pub struct PowerNorm {
    dim: usize,
    exponent: u32,
}

impl PowerNorm {
    pub fn new(dim: usize, exponent: u32) -> Result<Self> {
        if exponent < 2 {
            return Err(Error::invalid(format!(
                "power norm exponent must be >= 2, got {exponent}"
            )));
        }
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(Self { dim, exponent })
    }
}

impl Objective for PowerNorm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(x.norm().powi(self.exponent as i32))
    }

    fn gradient(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim, x.len())?;
        let r = x.norm();
        if r == 0.0 {
            return Ok(Vector::zeros(self.dim));
        }
        let n = self.exponent as i32;
        Ok(x * (n as f64 * r.powi(n - 2)))
    }

    fn smoothness(&self) -> Result<SmoothnessParams> {
        let n = self.exponent as f64;
        SmoothnessParams::new(2.0 * n, 2.0 * n - 1.0, None)
    }

    fn name(&self) -> &'static str {
        "power_norm"
    }
}

/// `f(x) = 1/2 x^T Q x - b^T x` with `Q` symmetric positive definite.
#[derive(Debug, Clone)]
pub struct Quadratic {
    q: DMatrix<f64>,
    b: Vector,
    lambda_min: f64,
    lambda_max: f64,
    minimizer: Vector,
    l1: f64,
}

impl Quadratic {
    pub fn new(q: DMatrix<f64>, b: Vector) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::NotPositiveDefinite);
        }
        check_dim(q.nrows(), b.len())?;
        let (lambda_min, lambda_max) = spd_extreme_eigenvalues(&q)?;
        let minimizer = q.clone().cholesky().ok_or(Error::NotPositiveDefinite)?.solve(&b);
        Ok(Self {
            q,
            b,
            lambda_min,
            lambda_max,
            minimizer,
            l1: 0.0,
        })
    }

    /// Declares a nonzero `L1`. Any `L1 >= 0` is valid since `L0 = lambda_max`
    /// already bounds the constant Hessian.
    pub fn with_l1(mut self, l1: f64) -> Result<Self> {
        if !(l1 >= 0.0) || !l1.is_finite() {
            return Err(Error::invalid(format!("L1 must be finite and >= 0, got {l1}")));
        }
        self.l1 = l1;
        Ok(self)
    }

    /// `Q^{-1} b`.
    pub fn unconstrained_minimizer(&self) -> &Vector {
        &self.minimizer
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn linear_term(&self) -> &Vector {
        &self.b
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        check_dim(self.b.len(), x.len())?;
        Ok(0.5 * x.dot(&(&self.q * x)) - self.b.dot(x))
    }

    fn gradient(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.b.len(), x.len())?;
        Ok(&self.q * x - &self.b)
    }

    fn smoothness(&self) -> Result<SmoothnessParams> {
        SmoothnessParams::new(self.lambda_max, self.l1, Some(self.lambda_max))
    }

    fn pl_constant(&self) -> Option<f64> {
        Some(self.lambda_min)
    }

    /// Unconstrained optimum `-1/2 b^T Q^{-1} b`.
    fn reference_optimum(&self) -> Option<f64> {
        Some(-0.5 * self.b.dot(&self.minimizer))
    }

    fn name(&self) -> &'static str {
        "quadratic"
    }
}

/// Smallest and largest eigenvalue of a symmetric positive definite matrix.
pub(crate) fn spd_extreme_eigenvalues(m: &DMatrix<f64>) -> Result<(f64, f64)> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::NotPositiveDefinite);
    }
    let scale = m.amax().max(1.0);
    if (m - m.transpose()).amax() > 1e-12 * scale {
        return Err(Error::NotPositiveDefinite);
    }
    let eig = SymmetricEigen::new(m.clone());
    let lo = eig.eigenvalues.min();
    let hi = eig.eigenvalues.max();
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok((lo, hi))
}
