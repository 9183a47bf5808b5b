//! Shared numeric types: smoothness parameters, adaptive state, per-iteration
//! records and traces, plus the two scalar quantities every solver needs
//! (the combined constant `a_k` and the directional Frank-Wolfe gap).

use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Dense point, gradient or direction in R^d.
pub type Vector = DVector<f64>;

/// Relative slack used for every monotonicity / descent comparison.
pub const REL_SLACK: f64 = 1e-12;

/// `REL_SLACK` scaled to the magnitude of `reference`, never below the
/// absolute floor `REL_SLACK`.
pub fn slack(reference: f64) -> f64 {
    REL_SLACK * reference.abs().max(1.0)
}

/// Anything exposing an `(L0, L1)` pair.
pub trait SmoothnessPair {
    fn l0(&self) -> f64;
    fn l1(&self) -> f64;
}

/// `a = L0 + L1 * ||g||`.
///
/// A zero result is rejected: it only happens with `L0 = 0` at a stationary
/// point, where the step size is undefined.
pub fn combined_constant(params: &impl SmoothnessPair, grad_norm: f64) -> Result<f64> {
    if !(grad_norm >= 0.0) {
        return Err(Error::invalid(format!("gradient norm must be >= 0, got {grad_norm}")));
    }
    let a = params.l0() + params.l1() * grad_norm;
    if a > 0.0 {
        Ok(a)
    } else {
        Err(Error::DegenerateConstant)
    }
}

/// `-g^T d`. For `d = lmo(g) - x` this is the Frank-Wolfe gap at `x`.
pub fn directional_gap(g: &Vector, d: &Vector) -> Result<f64> {
    check_dim(g.len(), d.len())?;
    Ok(-g.dot(d))
}

/// Generalized smoothness constants of an objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessParams {
    pub l0: f64,
    pub l1: f64,
    /// Classical Lipschitz constant of the gradient, when the function has one.
    pub classic_l: Option<f64>,
}

impl SmoothnessParams {
    pub fn new(l0: f64, l1: f64, classic_l: Option<f64>) -> Result<Self> {
        if !(l0 >= 0.0 && l1 >= 0.0) || !l0.is_finite() || !l1.is_finite() {
            return Err(Error::invalid(format!("L0={l0}, L1={l1} must be finite and >= 0")));
        }
        if l0 == 0.0 && l1 == 0.0 {
            return Err(Error::invalid("L0 and L1 cannot both be zero"));
        }
        if let Some(l) = classic_l {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::invalid(format!("classic L must be positive, got {l}")));
            }
        }
        Ok(Self { l0, l1, classic_l })
    }

    /// Plain `L`-smoothness seen as `(L, 0)`.
    pub fn classic(l: f64) -> Result<Self> {
        Self::new(l, 0.0, Some(l))
    }
}

impl SmoothnessPair for SmoothnessParams {
    fn l0(&self) -> f64 {
        self.l0
    }
    fn l1(&self) -> f64 {
        self.l1
    }
}

/// Running estimates of the adaptive solver. Owned by a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveState {
    pub l0: f64,
    pub l1: f64,
    pub l0_max: f64,
    pub l1_max: f64,
    pub rho: f64,
    /// `false` multiplies `L0` next, `true` multiplies `L1` next.
    pub toggle: bool,
}

impl AdaptiveState {
    pub fn new(l0: f64, l1: f64, l0_max: f64, l1_max: f64, rho: f64) -> Result<Self> {
        if !(l0 > 0.0 && l1 > 0.0) {
            return Err(Error::invalid(format!("initial L0={l0}, L1={l1} must be positive")));
        }
        if !(l0_max.is_finite() && l1_max.is_finite()) || l0 > l0_max || l1 > l1_max {
            return Err(Error::invalid(format!(
                "caps L0_max={l0_max}, L1_max={l1_max} must be finite and dominate the initial values"
            )));
        }
        if !(rho >= 1.0) || !rho.is_finite() {
            return Err(Error::invalid(format!("rho must be >= 1, got {rho}")));
        }
        Ok(Self {
            l0,
            l1,
            l0_max,
            l1_max,
            rho,
            toggle: false,
        })
    }
}

impl SmoothnessPair for AdaptiveState {
    fn l0(&self) -> f64 {
        self.l0
    }
    fn l1(&self) -> f64 {
        self.l1
    }
}

/// Which contraction constant governs an iteration: `T` when
/// `L0 <= L1 * ||g||`, `K` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    T,
    K,
}

impl Regime {
    pub fn classify(l0: f64, l1: f64, grad_norm: f64) -> Self {
        if l0 <= l1 * grad_norm {
            Regime::T
        } else {
            Regime::K
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::T => "T",
            Regime::K => "K",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// State at iterate `x_k` together with the step taken from it.
///
/// The last record of a trace describes the iterate the run stopped at; its
/// `alpha` is 0 and `inner_checks` is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub iter: usize,
    pub f_value: f64,
    pub fw_gap: f64,
    pub alpha: f64,
    pub a_k: f64,
    pub l0_k: f64,
    pub l1_k: f64,
    pub grad_norm: f64,
    pub inner_checks: u32,
    pub regime: Regime,
    /// `||d_k||`; not part of the CSV schema.
    pub d_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    GapTol,
    MaxIter,
    ZeroDirection,
}

impl TerminationReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminationReason::GapTol => "gap_tol",
            TerminationReason::MaxIter => "max_iter",
            TerminationReason::ZeroDirection => "zero_direction",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub records: Vec<IterateRecord>,
    pub termination: TerminationReason,
    /// Number of Frank-Wolfe steps actually taken.
    pub steps: usize,
    /// Sum of surrogate checks over the whole run, including thinned-out records.
    pub total_inner_checks: u64,
    pub final_point: Vector,
}

impl Trace {
    pub fn last(&self) -> &IterateRecord {
        self.records.last().expect("trace always holds the final record")
    }

    /// First recorded iteration whose gap is `<= tol`.
    pub fn iters_to_gap(&self, tol: f64) -> Option<usize> {
        self.records.iter().find(|r| r.fw_gap <= tol).map(|r| r.iter)
    }

    /// Consecutive record pairs `(k, k+1)`; pairs broken by thinning are skipped.
    pub fn steps_pairs(&self) -> impl Iterator<Item = (&IterateRecord, &IterateRecord)> {
        self.records
            .windows(2)
            .filter(|w| w[1].iter == w[0].iter + 1)
            .map(|w| (&w[0], &w[1]))
    }

    pub fn best_f(&self) -> f64 {
        self.records.iter().map(|r| r.f_value).fold(f64::INFINITY, f64::min)
    }
}
