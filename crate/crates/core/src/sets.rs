//! Compact convex feasible sets exposed through their linear minimization oracle.

use nalgebra::DMatrix;

use crate::domain::Vector;
use crate::error::{check_dim, Error, Result};
use crate::objectives::spd_extreme_eigenvalues;

pub trait FeasibleSet: Send + Sync {
    fn dim(&self) -> usize;

    /// `argmin_{z in Q} g^T z`.
    fn lmo(&self, g: &Vector) -> Result<Vector>;

    /// `max_{x, y in Q} ||x - y||`.
    fn diameter(&self) -> f64;

    fn contains(&self, x: &Vector, tol: f64) -> bool;

    /// Strong-convexity constant `lambda`: every `z` with
    /// `||z - (x+y)/2|| <= lambda ||x - y||^2` lies in the set.
    fn strong_convexity(&self) -> Option<f64> {
        None
    }

    /// A deterministic feasible starting point.
    fn default_start(&self) -> Vector;

    fn name(&self) -> &'static str;
}

fn nonzero(g: &Vector) -> Result<()> {
    if g.iter().all(|&v| v == 0.0) {
        Err(Error::ZeroGradient)
    } else {
        Ok(())
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be positive and finite, got {v}")))
    }
}

#[derive(Debug, Clone)]
pub struct L2Ball {
    center: Vector,
    radius: f64,
}

impl L2Ball {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(Self { center, radius })
    }

    pub fn centered(dim: usize, radius: f64) -> Result<Self> {
        Self::new(Vector::zeros(dim), radius)
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl FeasibleSet for L2Ball {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn lmo(&self, g: &Vector) -> Result<Vector> {
        check_dim(self.dim(), g.len())?;
        nonzero(g)?;
        Ok(&self.center - g * (self.radius / g.norm()))
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    fn contains(&self, x: &Vector, tol: f64) -> bool {
        x.len() == self.dim() && (x - &self.center).norm() <= self.radius + tol * self.radius.max(1.0)
    }

    /// `1/(8r)`: the midpoint of a chord of length `delta` sits at depth
    /// `r - sqrt(r^2 - delta^2/4) >= delta^2 / (8r)` below the sphere.
    fn strong_convexity(&self) -> Option<f64> {
        Some(1.0 / (8.0 * self.radius))
    }

    fn default_start(&self) -> Vector {
        self.center.clone()
    }

    fn name(&self) -> &'static str {
        "l2ball"
    }
}

/// `{x >= 0, sum x = scale}`.
#[derive(Debug, Clone)]
pub struct Simplex {
    dim: usize,
    scale: f64,
}

impl Simplex {
    pub fn new(dim: usize, scale: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid(format!("simplex dimension must be >= 2, got {dim}")));
        }
        positive("simplex scale", scale)?;
        Ok(Self { dim, scale })
    }

    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(dim, 1.0)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl FeasibleSet for Simplex {
    fn dim(&self) -> usize {
        self.dim
    }

    /// Scaled vertex at the first index attaining `min_j g_j`.
    fn lmo(&self, g: &Vector) -> Result<Vector> {
        check_dim(self.dim, g.len())?;
        let mut best = 0;
        for (j, &gj) in g.iter().enumerate().skip(1) {
            if gj < g[best] {
                best = j;
            }
        }
        let mut s = Vector::zeros(self.dim);
        s[best] = self.scale;
        Ok(s)
    }

    fn diameter(&self) -> f64 {
        self.scale * std::f64::consts::SQRT_2
    }

    fn contains(&self, x: &Vector, tol: f64) -> bool {
        let t = tol * self.scale.max(1.0);
        x.len() == self.dim && x.iter().all(|&v| v >= -t) && (x.sum() - self.scale).abs() <= t
    }

    fn default_start(&self) -> Vector {
        Vector::from_element(self.dim, self.scale / self.dim as f64)
    }

    fn name(&self) -> &'static str {
        "simplex"
    }
}

/// Axis-aligned box `{x : |x_j - c_j| <= radius}`.
#[derive(Debug, Clone)]
pub struct LInfBall {
    center: Vector,
    radius: f64,
}

impl LInfBall {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(Self { center, radius })
    }

    pub fn centered(dim: usize, radius: f64) -> Result<Self> {
        Self::new(Vector::zeros(dim), radius)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl FeasibleSet for LInfBall {
    fn dim(&self) -> usize {
        self.center.len()
    }

    /// Zero gradient coordinates go to `c_j - radius`.
    fn lmo(&self, g: &Vector) -> Result<Vector> {
        check_dim(self.dim(), g.len())?;
        Ok(Vector::from_iterator(
            self.dim(),
            g.iter().zip(self.center.iter()).map(
                |(&gj, &cj)| {
                    if gj < 0.0 {
                        cj + self.radius
                    } else {
                        cj - self.radius
                    }
                },
            ),
        ))
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius * (self.dim() as f64).sqrt()
    }

    fn contains(&self, x: &Vector, tol: f64) -> bool {
        let bound = self.radius + tol * self.radius.max(1.0);
        x.len() == self.dim() && x.iter().zip(self.center.iter()).all(|(&v, &c)| (v - c).abs() <= bound)
    }

    fn default_start(&self) -> Vector {
        self.center.clone()
    }

    fn name(&self) -> &'static str {
        "linf_ball"
    }
}

/// `{x : (x - c)^T M (x - c) <= 1}` with `M` symmetric positive definite.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    center: Vector,
    shape: DMatrix<f64>,
    shape_inv: DMatrix<f64>,
    lambda_min: f64,
    lambda_max: f64,
}

impl Ellipsoid {
    pub fn new(center: Vector, shape: DMatrix<f64>) -> Result<Self> {
        check_dim(center.len(), shape.nrows())?;
        let (lambda_min, lambda_max) = spd_extreme_eigenvalues(&shape)?;
        let shape_inv = shape.clone().cholesky().ok_or(Error::NotPositiveDefinite)?.inverse();
        Ok(Self {
            center,
            shape,
            shape_inv,
            lambda_min,
            lambda_max,
        })
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }
}

impl FeasibleSet for Ellipsoid {
    fn dim(&self) -> usize {
        self.center.len()
    }

    /// `c - M^{-1} g / sqrt(g^T M^{-1} g)`.
    fn lmo(&self, g: &Vector) -> Result<Vector> {
        check_dim(self.dim(), g.len())?;
        nonzero(g)?;
        let w = &self.shape_inv * g;
        let denom = g.dot(&w).sqrt();
        Ok(&self.center - w / denom)
    }

    fn diameter(&self) -> f64 {
        2.0 / self.lambda_min.sqrt()
    }

    fn contains(&self, x: &Vector, tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let u = x - &self.center;
        u.dot(&(&self.shape * &u)) <= 1.0 + tol
    }

    /// Conservative `lambda_min / (8 sqrt(lambda_max))`, from mapping the
    /// unit-ball constant `1/8` through `M^{1/2}`.
    fn strong_convexity(&self) -> Option<f64> {
        Some(self.lambda_min / (8.0 * self.lambda_max.sqrt()))
    }

    fn default_start(&self) -> Vector {
        self.center.clone()
    }

    fn name(&self) -> &'static str {
        "ellipsoid"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_row_slice(xs)
    }

    #[test]
    fn l2ball_lmo_examples() {
        let ball = L2Ball::centered(2, 25.0).unwrap();
        assert_relative_eq!(ball.lmo(&v(&[1.0, 0.0])).unwrap(), v(&[-25.0, 0.0]));
        assert_relative_eq!(ball.lmo(&v(&[3.0, 4.0])).unwrap(), v(&[-15.0, -20.0]), epsilon = 1e-12);
        assert!(matches!(ball.lmo(&Vector::zeros(2)), Err(Error::ZeroGradient)));
        assert_eq!(ball.diameter(), 50.0);
        assert_relative_eq!(ball.strong_convexity().unwrap(), 1.0 / 200.0);
    }

    #[test]
    fn simplex_lmo_examples() {
        let s = Simplex::unit(3).unwrap();
        assert_eq!(s.lmo(&v(&[3.0, 1.0, 2.0])).unwrap(), v(&[0.0, 1.0, 0.0]));
        let s2 = Simplex::unit(2).unwrap();
        assert_eq!(s2.lmo(&v(&[1.0, 1.0])).unwrap(), v(&[1.0, 0.0]));
        assert_relative_eq!(s.diameter(), 2f64.sqrt());
        assert!(s.strong_convexity().is_none());
        assert!(Simplex::unit(1).is_err());
    }

    #[test]
    fn box_lmo_examples() {
        let b = LInfBall::centered(2, 1.0).unwrap();
        assert_eq!(b.lmo(&v(&[2.0, -3.0])).unwrap(), v(&[-1.0, 1.0]));
        assert_eq!(b.lmo(&v(&[0.0, 0.0])).unwrap(), v(&[-1.0, -1.0]));
        assert_relative_eq!(LInfBall::centered(4, 1.0).unwrap().diameter(), 4.0);
        assert!(b.strong_convexity().is_none());
    }

    #[test]
    fn ellipsoid_lmo_examples() {
        let unit = Ellipsoid::new(Vector::zeros(3), DMatrix::identity(3, 3)).unwrap();
        let g = v(&[1.0, -2.0, 2.0]);
        assert_relative_eq!(unit.lmo(&g).unwrap(), -&g / 3.0, epsilon = 1e-15);

        let e = Ellipsoid::new(Vector::zeros(2), DMatrix::from_diagonal(&v(&[1.0, 4.0]))).unwrap();
        assert_relative_eq!(e.lmo(&v(&[0.0, 1.0])).unwrap(), v(&[0.0, -0.5]), epsilon = 1e-15);
        assert_relative_eq!(e.diameter(), 2.0, epsilon = 1e-12);
        assert!(e.lmo(&Vector::zeros(2)).is_err());
        assert!(Ellipsoid::new(Vector::zeros(2), DMatrix::from_diagonal(&v(&[1.0, 0.0]))).is_err());
    }

    #[test]
    fn lmo_output_is_feasible() {
        let g = v(&[0.3, -1.2, 0.7]);
        let sets: Vec<Box<dyn FeasibleSet>> = vec![
            Box::new(L2Ball::new(v(&[1.0, 2.0, 3.0]), 2.5).unwrap()),
            Box::new(Simplex::new(3, 2.0).unwrap()),
            Box::new(LInfBall::new(v(&[0.5, 0.5, 0.5]), 0.25).unwrap()),
            Box::new(Ellipsoid::new(v(&[0.0, 1.0, 0.0]), DMatrix::from_diagonal(&v(&[1.0, 2.0, 9.0]))).unwrap()),
        ];
        for s in &sets {
            assert!(s.contains(&s.lmo(&g).unwrap(), 1e-9), "{}", s.name());
            assert!(s.contains(&s.default_start(), 1e-12), "{}", s.name());
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let ball = L2Ball::centered(2, 1.0).unwrap();
        assert!(matches!(ball.lmo(&v(&[1.0])), Err(Error::DimensionMismatch { .. })));
    }
}
