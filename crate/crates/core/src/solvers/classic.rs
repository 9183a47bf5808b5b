use crate::domain::Trace;
use crate::error::{Error, Result};
use crate::problem::Problem;

use super::{drive, surrogate_holds, surrogate_step, take_step, IterContext, SolverConfig, Step, StepRule};

struct FixedL {
    l: f64,
}

impl StepRule for FixedL {
    fn params(&self) -> (f64, f64) {
        (self.l, 0.0)
    }

    fn step(&mut self, problem: &Problem, ctx: &IterContext<'_>) -> Result<Step> {
        let alpha = surrogate_step(ctx.gap, ctx.d_norm, self.l)?;
        let (x_next, f_next) = take_step(problem, ctx, alpha)?;
        Ok(Step {
            alpha,
            x_next,
            f_next,
            a_k: self.l,
            l0: self.l,
            l1: 0.0,
            inner_checks: 0,
        })
    }
}

/// Frank-Wolfe with the classical shortest step and a fixed Lipschitz constant.
pub fn run_classic_fw(problem: &Problem, config: &SolverConfig) -> Result<Trace> {
    let l = config.classic_l.ok_or(Error::MissingParameter("classic_l"))?;
    if !(l > 0.0) {
        return Err(Error::invalid(format!("classic L must be positive, got {l}")));
    }
    drive(problem, config, &mut FixedL { l })
}

struct HalveDouble {
    l: f64,
    doubling_cap: usize,
}

impl StepRule for HalveDouble {
    fn params(&self) -> (f64, f64) {
        (self.l, 0.0)
    }

    fn step(&mut self, problem: &Problem, ctx: &IterContext<'_>) -> Result<Step> {
        self.l /= 2.0;
        let mut checks = 0u32;
        loop {
            let alpha = surrogate_step(ctx.gap, ctx.d_norm, self.l)?;
            let (x_next, f_next) = take_step(problem, ctx, alpha)?;
            checks += 1;
            if surrogate_holds(ctx.f, f_next, ctx.gap, ctx.d_norm, alpha, self.l) {
                return Ok(Step {
                    alpha,
                    x_next,
                    f_next,
                    a_k: self.l,
                    l0: self.l,
                    l1: 0.0,
                    inner_checks: checks,
                });
            }
            if checks as usize > self.doubling_cap {
                return Err(Error::InnerLoopCap {
                    iter: ctx.iter,
                    cap: self.doubling_cap,
                });
            }
            self.l *= 2.0;
        }
    }
}

/// Classic shortest-step Frank-Wolfe with `L` halved before every iteration
/// and doubled until `f(x+) <= f(x) + alpha g^T d + (L/2) alpha^2 ||d||^2`.
pub fn run_adaptive_classic_fw(problem: &Problem, config: &SolverConfig) -> Result<Trace> {
    let l = config.l_init.ok_or(Error::MissingParameter("l_init"))?;
    if !(l > 0.0) {
        return Err(Error::invalid(format!("initial L must be positive, got {l}")));
    }
    drive(
        problem,
        config,
        &mut HalveDouble {
            l,
            doubling_cap: config.doubling_cap,
        },
    )
}
