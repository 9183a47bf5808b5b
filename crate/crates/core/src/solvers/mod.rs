//! Frank-Wolfe variants sharing one iteration skeleton.
//!
//! Every solver computes `s_k = lmo(grad f(x_k))`, `d_k = s_k - x_k` and moves
//! to `x_k + alpha_k d_k`; they differ only in how `alpha_k` (and the
//! smoothness estimate behind it) is chosen:
//!
//! * [`run_classic_fw`]: shortest step `gap / (L ||d||^2)` with a fixed `L`.
//! * [`run_adaptive_classic_fw`]: the same step, with `L` halved before each
//!   iteration and doubled until the quadratic upper bound holds.
//! * [`run_l0l1_fw`]: shortest step of the exponential-factored surrogate,
//!   `gap / ((L0 + L1 ||g||) ||d||^2 e)`, with fixed `(L0, L1)`.
//! * [`run_adapt_l0l1_fw`]: the same step with `(L0, L1)` divided jointly and
//!   multiplied alternately until the surrogate check passes.

mod adaptive;
mod classic;
mod l0l1;

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

pub use adaptive::run_adapt_l0l1_fw;
pub use classic::{run_adaptive_classic_fw, run_classic_fw};
pub use l0l1::run_l0l1_fw;

use crate::domain::{
    directional_gap, slack, IterateRecord, Regime, SmoothnessParams, TerminationReason, Trace, Vector,
};
use crate::error::{Error, Result};
use crate::problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Classic,
    AdaptiveClassic,
    L0l1,
    AdaptL0l1,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::Classic,
        SolverKind::AdaptiveClassic,
        SolverKind::L0l1,
        SolverKind::AdaptL0l1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Classic => "classic",
            SolverKind::AdaptiveClassic => "adaptive_classic",
            SolverKind::L0l1 => "l0l1",
            SolverKind::AdaptL0l1 => "adapt_l0l1",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == name)
            .ok_or_else(|| Error::Unknown {
                kind: "solver",
                name: name.to_string(),
            })
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Initial values and caps of the adaptive `(L0, L1)` estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptiveInit {
    pub l0_0: f64,
    pub l1_0: f64,
    pub l0_max: f64,
    pub l1_max: f64,
    pub rho: f64,
    /// Accept with `exp(alpha L1 ||d||)` in place of the constant `e`.
    pub exp_check: bool,
}

impl Default for AdaptiveInit {
    fn default() -> Self {
        Self {
            l0_0: 1.0,
            l1_0: 1.0,
            l0_max: 1e12,
            l1_max: 1e12,
            rho: 2.0,
            exp_check: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iter: usize,
    pub gap_tol: f64,
    /// Keep every `record_stride`-th record (the final one is always kept).
    pub record_stride: usize,
    /// `L` for the classic solver.
    pub classic_l: Option<f64>,
    /// Starting `L` for the adaptive classic solver.
    pub l_init: Option<f64>,
    /// Fixed `(L0, L1)` for the `(L0, L1)` solver.
    pub smoothness: Option<SmoothnessParams>,
    pub adaptive: AdaptiveInit,
    /// Surrogate checks allowed per iteration of the adaptive `(L0, L1)` solver.
    pub inner_cap: usize,
    /// Doublings allowed per iteration of the adaptive classic solver.
    pub doubling_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            gap_tol: 1e-6,
            record_stride: 1,
            classic_l: None,
            l_init: None,
            smoothness: None,
            adaptive: AdaptiveInit::default(),
            inner_cap: 500,
            doubling_cap: 200,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be >= 1"));
        }
        if !(self.gap_tol >= 0.0) {
            return Err(Error::invalid(format!("gap_tol must be >= 0, got {}", self.gap_tol)));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("record_stride must be >= 1"));
        }
        if !(self.adaptive.rho >= 1.0) {
            return Err(Error::invalid(format!("rho must be >= 1, got {}", self.adaptive.rho)));
        }
        Ok(())
    }

    /// Fills every solver's parameters from the objective's known constants.
    pub fn with_problem_constants(mut self, problem: &Problem) -> Result<Self> {
        let s = problem.objective.smoothness()?;
        self.smoothness = Some(s);
        if let Some(l) = s.classic_l {
            self.classic_l = Some(l);
            self.l_init = Some(l);
        }
        Ok(self)
    }
}

/// Runs the named solver.
pub fn run(kind: SolverKind, problem: &Problem, config: &SolverConfig) -> Result<Trace> {
    match kind {
        SolverKind::Classic => run_classic_fw(problem, config),
        SolverKind::AdaptiveClassic => run_adaptive_classic_fw(problem, config),
        SolverKind::L0l1 => run_l0l1_fw(problem, config),
        SolverKind::AdaptL0l1 => run_adapt_l0l1_fw(problem, config),
    }
}

/// `min{1, -g^T d / ((L0 + L1 ||g||) ||d||^2 e)}`.
///
/// For `L1 > 0` the result always satisfies `alpha ||d|| <= 1 / L1`.
pub fn step_size_l0l1(g: &Vector, d: &Vector, l0: f64, l1: f64) -> Result<f64> {
    let a = l0 + l1 * g.norm();
    let gap = directional_gap(g, d)?;
    surrogate_step(gap, d.norm(), a * E)
}

/// `min{1, -g^T d / (L ||d||^2)}`.
pub fn classic_step(g: &Vector, d: &Vector, l: f64) -> Result<f64> {
    let gap = directional_gap(g, d)?;
    surrogate_step(gap, d.norm(), l)
}

/// Minimizer over `[0, 1]` of `-alpha * gap + (curvature / 2) alpha^2 d_norm^2`.
pub(crate) fn surrogate_step(gap: f64, d_norm: f64, curvature: f64) -> Result<f64> {
    if d_norm == 0.0 {
        return Err(Error::invalid("step size undefined for a zero direction"));
    }
    if !(curvature > 0.0) {
        return Err(Error::DegenerateConstant);
    }
    Ok((gap / (curvature * d_norm * d_norm)).clamp(0.0, 1.0))
}

/// Acceptance test of the adaptive `(L0, L1)` solver:
/// `f_next <= f_curr + alpha g^T d + (a_k e / 2) alpha^2 ||d||^2`, with a
/// `1e-12 * max(1, |f_curr|)` rounding allowance.
pub fn surrogate_check(f_curr: f64, f_next: f64, g: &Vector, d: &Vector, alpha: f64, a_k: f64) -> bool {
    surrogate_holds(f_curr, f_next, -g.dot(d), d.norm(), alpha, a_k * E)
}

/// Stricter form using `exp(alpha L1 ||d||)` in place of `e`.
pub fn surrogate_check_exp(f_curr: f64, f_next: f64, g: &Vector, d: &Vector, alpha: f64, a_k: f64, l1: f64) -> bool {
    let dn = d.norm();
    surrogate_holds(f_curr, f_next, -g.dot(d), dn, alpha, a_k * (alpha * l1 * dn).exp())
}

pub(crate) fn surrogate_holds(f_curr: f64, f_next: f64, gap: f64, d_norm: f64, alpha: f64, curvature: f64) -> bool {
    let rhs = f_curr - alpha * gap + 0.5 * curvature * alpha * alpha * d_norm * d_norm;
    // NaN f_next fails the comparison
    f_next <= rhs + slack(f_curr)
}

/// Stop reason for a record, checked in the order zero direction, gap, budget.
pub fn should_stop(record: &IterateRecord, config: &SolverConfig) -> Option<TerminationReason> {
    if record.d_norm == 0.0 {
        Some(TerminationReason::ZeroDirection)
    } else if record.fw_gap <= config.gap_tol {
        Some(TerminationReason::GapTol)
    } else if record.iter >= config.max_iter {
        Some(TerminationReason::MaxIter)
    } else {
        None
    }
}

/// Everything a step rule sees at iterate `x_k`.
pub(crate) struct IterContext<'a> {
    pub iter: usize,
    pub x: &'a Vector,
    pub f: f64,
    pub grad_norm: f64,
    pub d: &'a Vector,
    pub d_norm: f64,
    pub gap: f64,
}

pub(crate) struct Step {
    pub alpha: f64,
    pub x_next: Vector,
    pub f_next: f64,
    pub a_k: f64,
    pub l0: f64,
    pub l1: f64,
    pub inner_checks: u32,
}

pub(crate) trait StepRule {
    /// Current `(L0, L1)` as reported on records without a step.
    fn params(&self) -> (f64, f64);

    fn step(&mut self, problem: &Problem, ctx: &IterContext<'_>) -> Result<Step>;
}

pub(crate) fn take_step(problem: &Problem, ctx: &IterContext<'_>, alpha: f64) -> Result<(Vector, f64)> {
    let x_next = ctx.x + ctx.d * alpha;
    let f_next = problem.objective.value(&x_next)?;
    Ok((x_next, f_next))
}

/// The shared Frank-Wolfe loop.
pub(crate) fn drive(problem: &Problem, config: &SolverConfig, rule: &mut dyn StepRule) -> Result<Trace> {
    config.validate()?;
    let objective = problem.objective.as_ref();
    let mut x = problem.x0.clone();
    let mut f = objective.value(&x)?;
    let mut records = Vec::new();
    let mut total_inner_checks = 0u64;

    for iter in 0.. {
        let g = objective.gradient(&x)?;
        let grad_norm = g.norm();
        let (d, gap) = if grad_norm == 0.0 {
            (Vector::zeros(x.len()), 0.0)
        } else {
            let s = problem.set.lmo(&g)?;
            let d = s - &x;
            let gap = directional_gap(&g, &d)?.max(0.0);
            (d, gap)
        };
        let d_norm = d.norm();
        let (l0, l1) = rule.params();
        let mut record = IterateRecord {
            iter,
            f_value: f,
            fw_gap: gap,
            alpha: 0.0,
            a_k: l0 + l1 * grad_norm,
            l0_k: l0,
            l1_k: l1,
            grad_norm,
            inner_checks: 0,
            regime: Regime::classify(l0, l1, grad_norm),
            d_norm,
        };
        if let Some(reason) = should_stop(&record, config) {
            records.push(record);
            return Ok(Trace {
                records,
                termination: reason,
                steps: iter,
                total_inner_checks,
                final_point: x,
            });
        }

        let ctx = IterContext {
            iter,
            x: &x,
            f,
            grad_norm,
            d: &d,
            d_norm,
            gap,
        };
        let step = rule.step(problem, &ctx)?;
        record.alpha = step.alpha;
        record.a_k = step.a_k;
        record.l0_k = step.l0;
        record.l1_k = step.l1;
        record.inner_checks = step.inner_checks;
        record.regime = Regime::classify(step.l0, step.l1, grad_norm);
        if iter % config.record_stride == 0 {
            records.push(record);
        }
        total_inner_checks += u64::from(step.inner_checks);
        x = step.x_next;
        f = step.f_next;
    }
    unreachable!("the loop exits through should_stop at max_iter")
}
