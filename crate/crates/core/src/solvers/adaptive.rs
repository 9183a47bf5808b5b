use std::f64::consts::E;

use crate::domain::{AdaptiveState, Trace};
use crate::error::{Error, Result};
use crate::problem::Problem;

use super::{drive, surrogate_holds, surrogate_step, take_step, IterContext, SolverConfig, Step, StepRule};

struct AdaptivePair {
    state: AdaptiveState,
    inner_cap: usize,
    exp_check: bool,
}

impl AdaptivePair {
    /// Shrinks both estimates in proportion to their share of `a_k`.
    fn divide(&mut self, grad_norm: f64) {
        let s = &mut self.state;
        let a = s.l0 + s.l1 * grad_norm;
        if !(a > 0.0) {
            return;
        }
        let l1_part = s.l1 * grad_norm;
        s.l0 = (s.l0 / (s.rho + s.l0 / a)).max(f64::MIN_POSITIVE);
        s.l1 = (s.l1 / (s.rho + l1_part / a)).max(f64::MIN_POSITIVE);
    }

    /// Grows one estimate, alternating between `L0` and `L1` across calls.
    fn multiply(&mut self, grad_norm: f64, a: f64) {
        let s = &mut self.state;
        if !s.toggle {
            s.l0 = (s.l0 * (s.rho - s.l0 / a)).min(s.l0_max);
        } else {
            s.l1 = (s.l1 * (s.rho - s.l1 * grad_norm / a)).min(s.l1_max);
        }
        s.toggle = !s.toggle;
    }
}

impl StepRule for AdaptivePair {
    fn params(&self) -> (f64, f64) {
        (self.state.l0, self.state.l1)
    }

    fn step(&mut self, problem: &Problem, ctx: &IterContext<'_>) -> Result<Step> {
        self.divide(ctx.grad_norm);
        let mut checks = 0u32;
        loop {
            let a_k = self.state.l0 + self.state.l1 * ctx.grad_norm;
            let alpha = surrogate_step(ctx.gap, ctx.d_norm, a_k * E)?;
            let (x_next, f_next) = take_step(problem, ctx, alpha)?;
            checks += 1;
            let growth = if self.exp_check {
                (alpha * self.state.l1 * ctx.d_norm).exp()
            } else {
                E
            };
            if surrogate_holds(ctx.f, f_next, ctx.gap, ctx.d_norm, alpha, a_k * growth) {
                return Ok(Step {
                    alpha,
                    x_next,
                    f_next,
                    a_k,
                    l0: self.state.l0,
                    l1: self.state.l1,
                    inner_checks: checks,
                });
            }
            if checks as usize >= self.inner_cap {
                return Err(Error::InnerLoopCap {
                    iter: ctx.iter,
                    cap: self.inner_cap,
                });
            }
            self.multiply(ctx.grad_norm, a_k);
        }
    }
}

/// Frank-Wolfe with adaptively estimated `(L0, L1)`.
///
/// Before each iteration both estimates are divided by `rho + share`, where
/// `share` is the estimate's fraction of `a_k = L0 + L1 ||g||`. Until the
/// surrogate check passes, `L0` and `L1` are multiplied in turn by
/// `rho - share` and clamped to their caps. The toggle selecting which one
/// grows persists across iterations, and the accepted pair carries over.
pub fn run_adapt_l0l1_fw(problem: &Problem, config: &SolverConfig) -> Result<Trace> {
    let init = config.adaptive;
    let state = AdaptiveState::new(init.l0_0, init.l1_0, init.l0_max, init.l1_max, init.rho)?;
    if config.inner_cap == 0 {
        return Err(Error::invalid("inner_cap must be >= 1"));
    }
    drive(
        problem,
        config,
        &mut AdaptivePair {
            state,
            inner_cap: config.inner_cap,
            exp_check: init.exp_check,
        },
    )
}
