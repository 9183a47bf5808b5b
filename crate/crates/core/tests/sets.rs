mod common;

use common::*;
use genfw::domain::directional_gap;
use genfw::sets::{Ellipsoid, L2Ball, LInfBall, Simplex};
use genfw::{FeasibleSet, Vector};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

fn corners(c: &Vector, r: f64) -> Vec<Vector> {
    let d = c.len();
    (0..1usize << d)
        .map(|mask| Vector::from_fn(d, |i, _| c[i] + if mask >> i & 1 == 1 { r } else { -r }))
        .collect()
}

fn vertices(d: usize, scale: f64) -> Vec<Vector> {
    (0..d)
        .map(|i| {
            let mut v = Vector::zeros(d);
            v[i] = scale;
            v
        })
        .collect()
}

/// Points `c + M^{-1/2} u` on the ellipsoid boundary for unit `u`.
fn ellipsoid_boundary(m: &DMatrix<f64>, c: &Vector, u: &Vector) -> Vector {
    let eig = SymmetricEigen::new(m.clone());
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    c + &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose() * u
}

fn min_dot(g: &Vector, pts: &[Vector]) -> f64 {
    pts.iter().map(|v| g.dot(v)).fold(f64::INFINITY, f64::min)
}

#[test]
fn finite_sets_match_vertex_enumeration() {
    let mut r = rng(20);
    let simplex = Simplex::new(5, 2.0).unwrap();
    let verts = vertices(5, 2.0);
    let c = Vector::from_row_slice(&[0.5, -1.0, 0.0, 2.0]);
    let cube = LInfBall::new(c.clone(), 1.5).unwrap();
    let cube_corners = corners(&c, 1.5);
    for _ in 0..1000 {
        let g = normal_vec(&mut r, 5);
        let s = simplex.lmo(&g).unwrap();
        let brute = min_dot(&g, &verts);
        assert!((g.dot(&s) - brute).abs() <= 1e-6 * brute.abs().max(1.0));
        assert!(simplex.contains(&s, 1e-9));

        let g = normal_vec(&mut r, 4);
        let s = cube.lmo(&g).unwrap();
        let brute = min_dot(&g, &cube_corners);
        assert!((g.dot(&s) - brute).abs() <= 1e-6 * brute.abs().max(1.0));
        assert!(cube.contains(&s, 1e-9));
    }
}

#[test]
fn ball_lmo_beats_dense_sphere_samples() {
    let mut r = rng(21);
    let c = Vector::from_row_slice(&[1.0, -2.0, 0.5]);
    let ball = L2Ball::new(c.clone(), 25.0).unwrap();
    let samples: Vec<Vector> = (0..100_000).map(|_| &c + unit_vec(&mut r, 3) * 25.0).collect();
    for _ in 0..1000 {
        let g = normal_vec(&mut r, 3);
        let s = ball.lmo(&g).unwrap();
        let tol = 1e-6 * g.norm() * 25.0;
        let brute = min_dot(&g, &samples);
        assert!(g.dot(&s) <= brute + tol);
        // the sampler does come close, so the comparison is not vacuous
        assert!(brute - g.dot(&s) <= 1e-3 * g.norm() * 25.0);
        assert!(ball.contains(&s, 1e-9));
    }
}

#[test]
fn ball_lmo_matches_circle_sweep_in_the_plane() {
    let mut r = rng(22);
    let ball = L2Ball::centered(2, 3.0).unwrap();
    let n = 100_000;
    let sweep: Vec<Vector> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            Vector::from_row_slice(&[3.0 * t.cos(), 3.0 * t.sin()])
        })
        .collect();
    for _ in 0..1000 {
        let g = normal_vec(&mut r, 2);
        let s = ball.lmo(&g).unwrap();
        let brute = min_dot(&g, &sweep);
        assert!((g.dot(&s) - brute).abs() <= 1e-6 * g.norm() * 3.0);
    }
}

#[test]
fn ellipsoid_lmo_beats_boundary_samples() {
    let mut r = rng(23);
    let m = spd_with_eigs(&mut r, &[0.5, 2.0, 6.0]);
    let c = normal_vec(&mut r, 3);
    let e = Ellipsoid::new(c.clone(), m.clone()).unwrap();
    let samples: Vec<Vector> = (0..100_000)
        .map(|_| ellipsoid_boundary(&m, &c, &unit_vec(&mut r, 3)))
        .collect();
    for _ in 0..1000 {
        let g = normal_vec(&mut r, 3);
        let s = e.lmo(&g).unwrap();
        let brute = min_dot(&g, &samples);
        let scale = brute.abs().max(g.norm() * e.diameter());
        assert!(g.dot(&s) <= brute + 1e-6 * scale);
        assert!(e.contains(&s, 1e-9));
        // s sits on the boundary
        let q = (&s - &c).dot(&(&m * (&s - &c)));
        assert!((q - 1.0).abs() < 1e-9);
    }
}

#[test]
fn diameters_match_brute_force() {
    let cube = corners(&Vector::zeros(4), 1.0);
    let far = cube
        .iter()
        .flat_map(|a| cube.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    assert!((LInfBall::centered(4, 1.0).unwrap().diameter() - far).abs() < 1e-12);
    let verts = vertices(3, 1.0);
    let far = verts
        .iter()
        .flat_map(|a| verts.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    assert!((Simplex::unit(3).unwrap().diameter() - far).abs() < 1e-12);
    assert_eq!(L2Ball::centered(3, 25.0).unwrap().diameter(), 50.0);

    let mut r = rng(24);
    let m = spd_with_eigs(&mut r, &[0.25, 1.0, 4.0]);
    let e = Ellipsoid::new(Vector::zeros(3), m.clone()).unwrap();
    let mut widest: f64 = 0.0;
    for _ in 0..20_000 {
        let p = ellipsoid_boundary(&m, &Vector::zeros(3), &unit_vec(&mut r, 3));
        widest = widest.max(2.0 * p.norm());
    }
    assert!(widest <= e.diameter() + 1e-9);
    assert!(widest > 0.99 * e.diameter());
}

#[test]
fn midpoint_depth_bound_for_balls() {
    // depth of the chord midpoint: r - sqrt(r^2 - delta^2/4) >= delta^2 / (8 r)
    let mut r = rng(25);
    let radius = 25.0;
    let lambda = L2Ball::centered(3, radius).unwrap().strong_convexity().unwrap();
    assert!((lambda - 1.0 / 200.0).abs() < 1e-18);
    for _ in 0..10_000 {
        let x = unit_vec(&mut r, 3) * radius;
        let y = unit_vec(&mut r, 3) * radius;
        let delta = (&x - &y).norm();
        let depth = radius - ((&x + &y) * 0.5).norm();
        assert!(depth >= lambda * delta * delta - 1e-9);
    }
}

fn check_definition(set: &dyn FeasibleSet, center: &Vector, reach: f64, seed: u64) {
    let mut r = rng(seed);
    let lambda = set.strong_convexity().unwrap();
    let d = set.dim();
    let inside = |r: &mut rand_chacha::ChaCha8Rng| loop {
        let p = center + unit_vec(r, d) * (reach * r.random::<f64>().sqrt());
        if set.contains(&p, 0.0) {
            return p;
        }
    };
    for _ in 0..10_000 {
        let x = inside(&mut r);
        let y = inside(&mut r);
        let z = (&x + &y) * 0.5 + unit_vec(&mut r, d) * (lambda * (&x - &y).norm_squared());
        assert!(set.contains(&z, 1e-9), "{}: {z}", set.name());
    }
}

#[test]
fn strong_convexity_constants_satisfy_the_definition() {
    let c = Vector::from_row_slice(&[1.0, 2.0, 3.0]);
    check_definition(&L2Ball::new(c.clone(), 25.0).unwrap(), &c, 25.0, 26);
    check_definition(&L2Ball::new(c.clone(), 0.3).unwrap(), &c, 0.3, 27);
    let mut r = rng(28);
    let m = spd_with_eigs(&mut r, &[0.5, 1.0, 8.0]);
    let e = Ellipsoid::new(c.clone(), m).unwrap();
    check_definition(&e, &c, e.diameter() / 2.0, 29);
    assert!(Simplex::unit(3).unwrap().strong_convexity().is_none());
    assert!(LInfBall::centered(3, 1.0).unwrap().strong_convexity().is_none());
}

fn check_scaling(set: &dyn FeasibleSet, center: &Vector, reach: f64, seed: u64) {
    let mut r = rng(seed);
    let lambda = set.strong_convexity().unwrap();
    let d = set.dim();
    let mut n = 0;
    while n < 1000 {
        let x = center + unit_vec(&mut r, d) * (reach * r.random::<f64>());
        if !set.contains(&x, 0.0) {
            continue;
        }
        n += 1;
        let psi = normal_vec(&mut r, d) * r.random_range(0.01..100.0);
        let s = set.lmo(&psi).unwrap();
        let lhs = -psi.dot(&(&s - &x));
        let rhs = 2.0 * lambda * psi.norm() * (&s - &x).norm_squared();
        assert!(lhs >= rhs - 1e-9, "{}: {lhs} < {rhs}", set.name());
    }
}

#[test]
fn scaling_condition_on_strongly_convex_sets() {
    let c = Vector::from_row_slice(&[0.0, -1.0, 4.0, 2.0]);
    check_scaling(&L2Ball::new(c.clone(), 25.0).unwrap(), &c, 25.0, 30);
    check_scaling(&L2Ball::new(c.clone(), 1.0).unwrap(), &c, 1.0, 31);
    let mut r = rng(32);
    let m = spd_with_eigs(&mut r, &[0.3, 1.0, 2.0, 5.0]);
    let e = Ellipsoid::new(c.clone(), m).unwrap();
    check_scaling(&e, &c, e.diameter() / 2.0, 33);
}

#[test]
fn simplex_gap_equals_best_vertex() {
    let mut r = rng(34);
    let simplex = Simplex::unit(3).unwrap();
    for _ in 0..200 {
        let g = normal_vec(&mut r, 3);
        let w = Vector::from_fn(3, |_, _| r.random::<f64>());
        let x = &w / w.sum();
        let s = simplex.lmo(&g).unwrap();
        let gap = directional_gap(&g, &(&s - &x)).unwrap();
        let brute = vertices(3, 1.0)
            .iter()
            .map(|v| -g.dot(&(v - &x)))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((gap - brute).abs() < 1e-12);
        assert!(gap >= 0.0);
    }
}
