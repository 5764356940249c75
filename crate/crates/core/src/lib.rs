//! Projected quasi-subgradient methods for constrained quasi-convex programs
//!
//! ```text
//! min f(x)  s.t.  x ∈ X
//! ```
//!
//! with `f` quasi-convex and continuous and `X` closed and convex. The crate
//! provides:
//!
//! - [`sets`]: feasible sets with exact projection and normal-cone oracles,
//! - [`problems`]: a catalog of certified quasi-convex objectives with exact and
//!   ε-inexact quasi-subgradient oracles,
//! - [`stepsizes`]: constant, diminishing and dynamic (Polyak-type) stepsize rules,
//! - [`solvers`]: the standard, inexact and conditional subgradient iterations,
//! - [`analysis`]: checkers for the basic inequality, iteration-complexity
//!   budgets, convergence-rate envelopes and scalar recursion bounds.
//!
//! ```
//! use qsub::prelude::*;
//!
//! let set = FeasibleSet::boxed(vec![-10.0, -10.0], vec![10.0, 10.0]).unwrap();
//! let problem = ProblemInstance::power_norm(vec![0.0, 0.0], 1.0, 1.0, set).unwrap();
//! let kind = SolverKind::Standard;
//! let rule = StepsizeRule::dynamic(LambdaSchedule::constant(0.5), problem.optimal_value()).unwrap();
//! let config = RunConfig::new(vec![3.0, 4.0], 40);
//! let trace = run(&kind, &problem, &rule, &config).unwrap();
//! assert_eq!(trace.records.len(), 40);
//! assert!(trace.records[39].dist < 1e-9);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
mod error;
pub mod problems;
pub mod sets;
pub mod solvers;
pub mod stepsizes;
pub mod vector;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{
        check_complexity, check_h1, check_h3, complexity_budget, envelope_check, fit_geometric,
        fit_power, lemma22_bound, lemma23_bound, ComplexityKind, ComplexityReport, ConditionCheck,
        EnvelopeKind, EnvelopeParams, EnvelopeReport, RateFit, RateModel,
    };
    pub use crate::problems::{
        HolderCertificate, ObjectiveSpec, ProblemInstance, SharpCertificate,
    };
    pub use crate::sets::FeasibleSet;
    pub use crate::solvers::{
        framework_constants, run, step, IterationRecord, IterationTrace, RunConfig, SolverKind,
        Termination,
    };
    pub use crate::stepsizes::{stepsize, FrameworkConstants, LambdaSchedule, StepsizeRule};
    pub use crate::Error;
}
