use std::f64::consts::E;

use crate::domain::{SmoothnessParams, Trace};
use crate::error::{Error, Result};
use crate::problem::Problem;

use super::{drive, surrogate_step, take_step, IterContext, SolverConfig, Step, StepRule};

struct FixedPair {
    params: SmoothnessParams,
}

impl StepRule for FixedPair {
    fn params(&self) -> (f64, f64) {
        (self.params.l0, self.params.l1)
    }

    fn step(&mut self, problem: &Problem, ctx: &IterContext<'_>) -> Result<Step> {
        let a_k = self.params.l0 + self.params.l1 * ctx.grad_norm;
        let alpha = surrogate_step(ctx.gap, ctx.d_norm, a_k * E)?;
        let (x_next, f_next) = take_step(problem, ctx, alpha)?;
        Ok(Step {
            alpha,
            x_next,
            f_next,
            a_k,
            l0: self.params.l0,
            l1: self.params.l1,
            inner_checks: 0,
        })
    }
}

/// Frank-Wolfe for `(L0, L1)`-smooth objectives with fixed, known constants.
pub fn run_l0l1_fw(problem: &Problem, config: &SolverConfig) -> Result<Trace> {
    let params = config.smoothness.ok_or(Error::MissingParameter("smoothness"))?;
    drive(problem, config, &mut FixedPair { params })
}
