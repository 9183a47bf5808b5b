use std::sync::Arc;

use crate::domain::Vector;
use crate::error::{check_dim, Error, Result};
use crate::objectives::Objective;
use crate::sets::FeasibleSet;

/// Objective, feasible set, starting point and whatever rate metadata is
/// known for the instance.
#[derive(Clone)]
pub struct Problem {
    pub objective: Arc<dyn Objective>,
    pub set: Arc<dyn FeasibleSet>,
    pub x0: Vector,
    pub meta: ProblemMeta,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProblemMeta {
    /// PL constant of the objective.
    pub mu: Option<f64>,
    /// Radius `r` of a ball `B(x*, r)` contained in the feasible set.
    pub interior_radius: Option<f64>,
    /// The minimizer, when known.
    pub optimum: Option<Vector>,
    /// Optimal value over the feasible set, when known exactly.
    pub f_star: Option<f64>,
}

impl Problem {
    /// Starts from the set's default point; `mu` is taken from the objective.
    pub fn new(objective: Arc<dyn Objective>, set: Arc<dyn FeasibleSet>) -> Result<Self> {
        check_dim(objective.dim(), set.dim())?;
        let x0 = set.default_start();
        let meta = ProblemMeta {
            mu: objective.pl_constant(),
            ..ProblemMeta::default()
        };
        Ok(Self {
            objective,
            set,
            x0,
            meta,
        })
    }

    pub fn with_start(mut self, x0: Vector) -> Result<Self> {
        check_dim(self.set.dim(), x0.len())?;
        if !self.set.contains(&x0, 1e-9) {
            return Err(Error::invalid("starting point lies outside the feasible set"));
        }
        self.x0 = x0;
        Ok(self)
    }

    /// Declares `B(optimum, radius)` inside the set; `f*` becomes `f(optimum)`.
    pub fn with_interior_optimum(mut self, optimum: Vector, radius: f64) -> Result<Self> {
        check_dim(self.set.dim(), optimum.len())?;
        if !(radius > 0.0) {
            return Err(Error::invalid(format!(
                "interior radius must be positive, got {radius}"
            )));
        }
        self.meta.f_star = Some(self.objective.value(&optimum)?);
        self.meta.optimum = Some(optimum);
        self.meta.interior_radius = Some(radius);
        Ok(self)
    }

    pub fn with_f_star(mut self, f_star: f64) -> Self {
        self.meta.f_star = Some(f_star);
        self
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("objective", &self.objective.name())
            .field("set", &self.set.name())
            .field("dim", &self.dim())
            .field("meta", &self.meta)
            .finish()
    }
}
