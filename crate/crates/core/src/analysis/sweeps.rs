use serde::Serialize;

use super::fit::{fit_power_at, RateFit};
use crate::problems::ProblemInstance;
use crate::solvers::{run, RunConfig, SolverKind};
use crate::stepsizes::{FrameworkConstants, StepsizeRule};
use crate::Result;

/// Value-gap bound after `budget` constant steps of size `v`:
/// `(β v/α + δ)^p + ε` with `δ = dist²(x_1, X*)/(α v budget)`.
pub fn constant_rule_gap_bound(
    constants: &FrameworkConstants,
    v: f64,
    dist_sq: f64,
    budget: usize,
) -> f64 {
    let FrameworkConstants {
        alpha_inf,
        beta_sup,
        epsilon,
        p,
        ..
    } = *constants;
    let delta = dist_sq / (alpha_inf * v * budget as f64);
    (beta_sup * v / alpha_inf + delta).powf(p) + epsilon
}

/// Best gap `min_{k ≤ K} f(x_k) − f*` for a range of budgets `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetSweep {
    pub budgets: Vec<usize>,
    pub min_gaps: Vec<f64>,
    /// Power fit of the best gap against the budget; `exponent` is the decay
    /// rate.
    pub fit: Option<RateFit>,
}

/// Run one experiment per budget with the rule chosen by `rule_for(K)` and
/// record the best gap within the budget.
pub fn budget_sweep<F>(
    kind: &SolverKind,
    problem: &ProblemInstance,
    x1: &[f64],
    budgets: &[usize],
    mut rule_for: F,
) -> Result<BudgetSweep>
where
    F: FnMut(usize) -> Result<StepsizeRule>,
{
    let mut min_gaps = Vec::with_capacity(budgets.len());
    for &budget in budgets {
        let rule = rule_for(budget)?;
        let trace = run(kind, problem, &rule, &RunConfig::new(x1.to_vec(), budget))?;
        min_gaps.push(trace.min_gap(budget));
    }
    let xs: Vec<f64> = budgets.iter().map(|&k| k as f64).collect();
    let fit = fit_power_at(&xs, &min_gaps).ok();
    Ok(BudgetSweep {
        budgets: budgets.to_vec(),
        min_gaps,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::FeasibleSet;
    use crate::solvers::framework_constants;

    #[test]
    fn constant_rule_scaling() {
        let set = FeasibleSet::boxed(vec![-10.0], vec![10.0]).unwrap();
        let p = ProblemInstance::power_norm(vec![0.0], 1.0, 1.0, set).unwrap();
        let sweep = budget_sweep(
            &SolverKind::Standard,
            &p,
            &[5.0],
            &[100, 1000, 10000],
            |k| StepsizeRule::constant(5.0 / k as f64),
        )
        .unwrap();
        let e = sweep.fit.unwrap().exponent().unwrap();
        assert!((e - 1.0).abs() < 0.05, "{e}");
        let c = framework_constants(&SolverKind::Standard, &p.holder());
        for (&k, &g) in sweep.budgets.iter().zip(&sweep.min_gaps) {
            assert!(g <= constant_rule_gap_bound(&c, 5.0 / k as f64, 25.0, k) + 1e-9);
        }
    }
}
