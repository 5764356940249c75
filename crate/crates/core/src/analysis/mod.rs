//! Checks of recorded traces against the convergence theory.
//!
//! - [`check_h1`], [`check_h3`]: per-iteration basic inequality and step bound,
//! - [`complexity_budget`], [`check_complexity`]: iteration budgets `K1`–`K3`
//!   and the value bounds they guarantee,
//! - [`envelope_check`]: linear and sublinear distance envelopes under weak
//!   sharp minima,
//! - [`fit_geometric`], [`fit_power`]: log-linear rate regression,
//! - [`lemma22_bound`], [`lemma23_bound`]: closed-form bounds for scalar
//!   recursions and randomized sweeps over them,
//! - [`budget_sweep`]: scaling of the best gap with the iteration budget.

mod complexity;
mod envelope;
mod fit;
mod framework;
mod recursion;
mod sweeps;

pub use complexity::{check_complexity, complexity_budget, ComplexityKind, ComplexityReport};
pub use envelope::{envelope_check, EnvelopeKind, EnvelopeParams, EnvelopeReport, EnvelopeStatus};
pub use fit::{fit_geometric, fit_power, fit_power_at, RateFit, RateModel};
pub use framework::{check_h1, check_h3, default_burn_in, ConditionCheck};
pub use recursion::{
    diminishing_recursion_bound, diminishing_recursion_exponent, diminishing_recursion_sweep,
    lemma22_bound, lemma23_bound, power_recursion_sweep, DiminishingRecursionExponent,
    DiminishingRecursionSweep, RecursionBound, SweepOutcome,
};
pub use sweeps::{budget_sweep, constant_rule_gap_bound, BudgetSweep};

/// Default absolute tolerance for residual checks.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Tolerance for the step-length bound.
pub const STEP_TOL: f64 = 1e-10;
