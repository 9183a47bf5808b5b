#![allow(dead_code)]

use genfw::Vector;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    Vector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

pub fn unit_vec(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    let v = normal_vec(rng, d);
    let n = v.norm();
    v / n
}

/// Uniform point in the ball of radius `r` around `c`.
pub fn in_ball(rng: &mut ChaCha8Rng, c: &Vector, r: f64) -> Vector {
    let d = c.len();
    let u: f64 = rng.random();
    c + unit_vec(rng, d) * (r * u.powf(1.0 / d as f64))
}

/// `U diag(eigs) U^T` with a random orthogonal `U`.
pub fn spd_with_eigs(rng: &mut ChaCha8Rng, eigs: &[f64]) -> DMatrix<f64> {
    let d = eigs.len();
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    &q * DMatrix::from_diagonal(&Vector::from_row_slice(eigs)) * q.transpose()
}

/// Central differences with step `h`.
pub fn fd_gradient(f: impl Fn(&Vector) -> f64, x: &Vector, h: f64) -> Vector {
    Vector::from_fn(x.len(), |i, _| {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    })
}

pub fn rel_err(a: &Vector, b: &Vector) -> f64 {
    (a - b).norm() / b.norm()
}

/// Minimizer of `x^T Q x / 2 - b^T x` over `||x|| <= radius` when the
/// unconstrained minimizer lies outside: bisection on `nu` in
/// `(Q + nu I) x = b` until `||x|| = radius`.
pub fn ball_constrained_quadratic_min(q: &DMatrix<f64>, b: &Vector, radius: f64) -> Vector {
    let d = b.len();
    let solve = |nu: f64| {
        (q + DMatrix::identity(d, d) * nu)
            .lu()
            .solve(b)
            .expect("shifted matrix is nonsingular")
    };
    assert!(solve(0.0).norm() > radius, "optimum must be exterior");
    let (mut lo, mut hi) = (0.0, 1.0);
    while solve(hi).norm() > radius {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if solve(mid).norm() > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    solve(hi)
}

pub fn quad_value(q: &DMatrix<f64>, b: &Vector, x: &Vector) -> f64 {
    0.5 * x.dot(&(q * x)) - b.dot(x)
}

pub struct QuadCase {
    pub q: DMatrix<f64>,
    pub b: Vector,
    pub radius: f64,
    pub f_star: f64,
}

/// Quadratic whose unconstrained minimizer sits at distance `3 * radius`
/// from the center of a ball of radius `radius`.
pub fn exterior_case(seed: u64, d: usize, radius: f64) -> QuadCase {
    exterior_case_at(seed, d, radius, 3.0)
}

/// As [`exterior_case`] with the minimizer at `factor * radius`.
pub fn exterior_case_at(seed: u64, d: usize, radius: f64, factor: f64) -> QuadCase {
    let mut r = rng(seed);
    let eigs: Vec<f64> = (0..d).map(|i| 1.0 + 2.0 * i as f64).collect();
    let q = spd_with_eigs(&mut r, &eigs);
    let target = unit_vec(&mut r, d) * (factor * radius);
    let b = &q * &target;
    let x_star = ball_constrained_quadratic_min(&q, &b, radius);
    let f_star = quad_value(&q, &b, &x_star);
    QuadCase { q, b, radius, f_star }
}
