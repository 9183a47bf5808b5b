//! Per-iteration verification of the convergence guarantees on a recorded trace.
//!
//! Every check reads only the columns of the trace CSV plus the instance
//! metadata in [`RateMeta`], so a report can be recomputed from the emitted
//! files alone.

use std::f64::consts::E;
use std::fmt::Write as _;

use crate::domain::{slack, IterateRecord, Regime};

/// Absolute allowance for the linear-contraction checks.
pub const CONTRACTION_TOL: f64 = 1e-10;
/// Absolute allowance for the interior scaling condition.
pub const SCALING_TOL: f64 = 1e-9;

/// Initial values and caps of an adaptive `(L0, L1)` run, plus the true
/// constants the adaptation-count bound is stated against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptationMeta {
    pub rho: f64,
    pub l0_init: f64,
    pub l1_init: f64,
    pub l0_max: f64,
    pub l1_max: f64,
    pub true_l0: f64,
    pub true_l1: f64,
}

impl AdaptationMeta {
    /// `N (1 + log(rho+1)/log(rho-1)) + log((min{rho L0, L0max} + min{rho L1, L1max}) / (L0(0) + L1(0))) / log(rho-1)`.
    /// Only meaningful for `rho > 2`.
    pub fn check_budget(&self, iterations: usize) -> f64 {
        let lr = (self.rho - 1.0).ln();
        let top = (self.rho * self.true_l0).min(self.l0_max) + (self.rho * self.true_l1).min(self.l1_max);
        iterations as f64 * (1.0 + (self.rho + 1.0).ln() / lr) + (top / (self.l0_init + self.l1_init)).ln() / lr
    }
}

/// What is known about the instance a trace was produced on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RateMeta {
    pub diameter: f64,
    /// Optimal value or a valid lower bound on it.
    pub f_star: f64,
    /// Strong-convexity constant of the set.
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub interior_radius: Option<f64>,
    pub adaptation: Option<AdaptationMeta>,
    /// Total surrogate checks when the records were thinned.
    pub total_inner_checks: Option<u64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub applicable: bool,
    pub checked: usize,
    pub violations: usize,
    /// Smallest `rhs - lhs` seen (negative means violated).
    pub worst_slack: f64,
}

impl BoundCheck {
    fn new(name: &'static str, applicable: bool) -> Self {
        Self {
            name,
            applicable,
            checked: 0,
            violations: 0,
            worst_slack: f64::INFINITY,
        }
    }

    /// Records `lhs <= rhs + tol`.
    fn observe(&mut self, lhs: f64, rhs: f64, tol: f64) {
        self.checked += 1;
        let s = rhs - lhs;
        if s < self.worst_slack || s.is_nan() {
            self.worst_slack = s;
        }
        if !(lhs <= rhs + tol) {
            self.violations += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// `f(x_{k+1}) - f(x_k) <= (alpha_k / 2) g^T d_k`.
    pub descent: BoundCheck,
    /// Strongly convex set contraction.
    pub strongly_convex: BoundCheck,
    /// PL with interior optimum contraction.
    pub pl_interior: BoundCheck,
    /// `gap_k >= r ||g_k||`.
    pub interior_scaling: BoundCheck,
    /// `f(x_k) - f* <= 2e (L0 + L1 sup ||g||) D^2 / (k + 3)`.
    pub sublinear: BoundCheck,
    pub adaptation: BoundCheck,
    /// `(f(x_{k+1}) - f*) / (f(x_k) - f*)` for consecutive records.
    pub contraction: Vec<f64>,
    pub total_inner_checks: u64,
    pub inner_check_budget: Option<f64>,
    pub min_grad_norm: f64,
}

impl Diagnostics {
    pub fn checks(&self) -> [&BoundCheck; 6] {
        [
            &self.descent,
            &self.strongly_convex,
            &self.pl_interior,
            &self.interior_scaling,
            &self.sublinear,
            &self.adaptation,
        ]
    }

    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|c| !c.applicable || c.passed())
    }

    /// `key=value` lines under `prefix`.
    pub fn to_kv_lines(&self, prefix: &str) -> String {
        let mut out = String::new();
        for c in self.checks() {
            let _ = writeln!(out, "{prefix}.{}.applicable={}", c.name, c.applicable);
            if c.applicable {
                let _ = writeln!(out, "{prefix}.{}.checked={}", c.name, c.checked);
                let _ = writeln!(out, "{prefix}.{}.violations={}", c.name, c.violations);
                let _ = writeln!(out, "{prefix}.{}.worst_slack={:.16e}", c.name, c.worst_slack);
                let _ = writeln!(out, "{prefix}.{}.pass={}", c.name, c.passed());
            }
        }
        let _ = writeln!(out, "{prefix}.total_inner_checks={}", self.total_inner_checks);
        if let Some(b) = self.inner_check_budget {
            let _ = writeln!(out, "{prefix}.inner_check_budget={b:.16e}");
        }
        let _ = writeln!(out, "{prefix}.min_grad_norm={:.16e}", self.min_grad_norm);
        let series: Vec<String> = self.contraction.iter().map(|r| format!("{r:.6e}")).collect();
        let _ = writeln!(out, "{prefix}.contraction={}", series.join(","));
        out
    }
}

/// Contraction factor of one step on a strongly convex set:
/// `1/2` for a full step, else `1 - (lambda / e) ||g|| / a_k`.
pub fn strongly_convex_factor(alpha: f64, lambda: f64, grad_norm: f64, a_k: f64) -> f64 {
    if alpha >= 1.0 {
        0.5
    } else {
        1.0 - lambda / E * grad_norm / a_k
    }
}

/// Contraction factor of one step under PL with `B(x*, r)` inside the set:
/// `1/2` for a full step, else `1 - r / (4 e L1 D^2)` in the `T` regime and
/// `1 - r^2 mu / (2 e L0 D^2)` in the `K` regime.
pub fn pl_interior_factor(alpha: f64, regime: Regime, l0: f64, l1: f64, r: f64, mu: f64, diameter: f64) -> f64 {
    if alpha >= 1.0 {
        return 0.5;
    }
    let d2 = diameter * diameter;
    match regime {
        Regime::T => 1.0 - r / (4.0 * E * l1 * d2),
        Regime::K => 1.0 - r * r * mu / (2.0 * E * l0 * d2),
    }
}

/// `2e (L0 + L1 G) D^2 / (k + 3)`.
pub fn sublinear_envelope(k: usize, l0: f64, l1: f64, sup_grad: f64, diameter: f64) -> f64 {
    2.0 * E * (l0 + l1 * sup_grad) * diameter * diameter / (k as f64 + 3.0)
}

/// Evaluates every applicable bound on `records`.
pub fn rate_diagnostics(records: &[IterateRecord], meta: &RateMeta) -> Diagnostics {
    let pairs = || {
        records
            .windows(2)
            .filter(|w| w[1].iter == w[0].iter + 1)
            .map(|w| (&w[0], &w[1]))
    };
    let min_grad_norm = records.iter().map(|r| r.grad_norm).fold(f64::INFINITY, f64::min);

    let mut descent = BoundCheck::new("descent", true);
    let mut contraction = Vec::new();
    for (cur, next) in pairs() {
        descent.observe(
            next.f_value - cur.f_value,
            -0.5 * cur.alpha * cur.fw_gap,
            slack(cur.f_value),
        );
        let h = cur.f_value - meta.f_star;
        contraction.push((next.f_value - meta.f_star) / h);
    }

    let mut strongly_convex = BoundCheck::new("strongly_convex", meta.lambda.is_some() && min_grad_norm > 0.0);
    if let (true, Some(lambda)) = (strongly_convex.applicable, meta.lambda) {
        for (cur, next) in pairs() {
            let c = strongly_convex_factor(cur.alpha, lambda, cur.grad_norm, cur.a_k);
            strongly_convex.observe(
                next.f_value - meta.f_star,
                c * (cur.f_value - meta.f_star),
                CONTRACTION_TOL,
            );
        }
    }

    let pl = meta.mu.zip(meta.interior_radius);
    let mut pl_interior = BoundCheck::new("pl_interior", pl.is_some());
    let mut interior_scaling = BoundCheck::new("interior_scaling", meta.interior_radius.is_some());
    if let Some((mu, r)) = pl {
        for (cur, next) in pairs() {
            let c = pl_interior_factor(cur.alpha, cur.regime, cur.l0_k, cur.l1_k, r, mu, meta.diameter);
            pl_interior.observe(
                next.f_value - meta.f_star,
                c * (cur.f_value - meta.f_star),
                CONTRACTION_TOL,
            );
        }
    }
    if let Some(r) = meta.interior_radius {
        for rec in records {
            interior_scaling.observe(r * rec.grad_norm, rec.fw_gap, SCALING_TOL);
        }
    }

    let mut sublinear = BoundCheck::new("sublinear", true);
    let (mut l0_max, mut l1_max, mut g_max) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (expected_iter, rec) in records.iter().enumerate() {
        // running maxima are only exact when no records were thinned out
        if rec.iter != expected_iter {
            break;
        }
        l0_max = l0_max.max(rec.l0_k);
        l1_max = l1_max.max(rec.l1_k);
        g_max = g_max.max(rec.grad_norm);
        if rec.iter >= 1 {
            let bound = sublinear_envelope(rec.iter, l0_max, l1_max, g_max, meta.diameter);
            sublinear.observe(rec.f_value - meta.f_star, bound, slack(rec.f_value));
        }
    }

    let total_inner_checks = meta
        .total_inner_checks
        .unwrap_or_else(|| records.iter().map(|r| u64::from(r.inner_checks)).sum());
    let steps = meta
        .steps
        .unwrap_or_else(|| records.iter().filter(|r| r.inner_checks > 0 || r.alpha > 0.0).count());
    let adapt = meta.adaptation.filter(|a| a.rho > 2.0);
    let mut adaptation = BoundCheck::new("adaptation", adapt.is_some());
    let inner_check_budget = adapt.map(|a| a.check_budget(steps));
    if let Some(budget) = inner_check_budget {
        adaptation.observe(total_inner_checks as f64, budget, 0.0);
    }

    Diagnostics {
        descent,
        strongly_convex,
        pl_interior,
        interior_scaling,
        sublinear,
        adaptation,
        contraction,
        total_inner_checks,
        inner_check_budget,
        min_grad_norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(iter: usize, f: f64, gap: f64, alpha: f64) -> IterateRecord {
        IterateRecord {
            iter,
            f_value: f,
            fw_gap: gap,
            alpha,
            a_k: 1.0,
            l0_k: 1.0,
            l1_k: 0.0,
            grad_norm: 1.0,
            inner_checks: 1,
            regime: Regime::K,
            d_norm: f64::NAN,
        }
    }

    #[test]
    fn descent_violation_is_counted() {
        let good = [rec(0, 1.0, 1.0, 1.0), rec(1, 0.5, 0.1, 0.0)];
        let meta = RateMeta {
            diameter: 1.0,
            ..RateMeta::default()
        };
        let d = rate_diagnostics(&good, &meta);
        assert_eq!(d.descent.checked, 1);
        assert!(d.descent.passed());

        let bad = [rec(0, 1.0, 1.0, 1.0), rec(1, 0.6, 0.1, 0.0)];
        let d = rate_diagnostics(&bad, &meta);
        assert_eq!(d.descent.violations, 1);
        assert!(d.descent.worst_slack < 0.0);
    }

    #[test]
    fn metadata_routes_checks() {
        let recs = [rec(0, 1.0, 1.0, 0.5), rec(1, 0.7, 0.5, 0.0)];
        let ball = RateMeta {
            diameter: 2.0,
            lambda: Some(0.125),
            ..RateMeta::default()
        };
        let d = rate_diagnostics(&recs, &ball);
        assert!(d.strongly_convex.applicable);
        assert!(!d.pl_interior.applicable);
        assert!(!d.adaptation.applicable);
        assert!(d.sublinear.applicable);
        assert_eq!(d.sublinear.checked, 1);
    }

    #[test]
    fn adaptation_needs_rho_above_two() {
        let a = AdaptationMeta {
            rho: 2.0,
            l0_init: 1.0,
            l1_init: 1.0,
            l0_max: 1e12,
            l1_max: 1e12,
            true_l0: 0.0,
            true_l1: 4.0,
        };
        let last = IterateRecord {
            inner_checks: 0,
            ..rec(1, 0.7, 0.5, 0.0)
        };
        let recs = [rec(0, 1.0, 1.0, 0.5), last];
        let meta = RateMeta {
            diameter: 1.0,
            adaptation: Some(a),
            ..RateMeta::default()
        };
        assert!(!rate_diagnostics(&recs, &meta).adaptation.applicable);
        let meta = RateMeta {
            adaptation: Some(AdaptationMeta { rho: 3.0, ..a }),
            ..meta
        };
        let d = rate_diagnostics(&recs, &meta);
        assert!(d.adaptation.applicable);
        // N = 1: 1 * (1 + log 4 / log 2) + log2(12 / 2)
        let expected = 3.0 + 6f64.log2();
        assert!((d.inner_check_budget.unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn factor_formulas() {
        assert_eq!(strongly_convex_factor(1.0, 0.1, 1.0, 1.0), 0.5);
        assert!((strongly_convex_factor(0.5, 0.1, 2.0, 4.0) - (1.0 - 0.05 / E)).abs() < 1e-15);
        assert_eq!(pl_interior_factor(1.0, Regime::T, 1.0, 1.0, 1.0, 1.0, 1.0), 0.5);
        let t = pl_interior_factor(0.3, Regime::T, 1.0, 2.0, 0.5, 0.1, 3.0);
        assert!((t - (1.0 - 0.5 / (8.0 * E * 9.0))).abs() < 1e-15);
        let k = pl_interior_factor(0.3, Regime::K, 2.0, 0.0, 0.5, 0.1, 3.0);
        assert!((k - (1.0 - 0.025 / (4.0 * E * 9.0))).abs() < 1e-15);
    }
}
