use serde::Serialize;

use super::{RESIDUAL_TOL, STEP_TOL};
use crate::solvers::IterationTrace;
use crate::stepsizes::FrameworkConstants;

/// Outcome of a per-iteration inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionCheck {
    /// Largest residual, `−∞` when no iteration is covered.
    pub max_residual: f64,
    /// Iteration attaining the largest residual.
    pub worst_k: Option<usize>,
    pub tolerance: f64,
    pub holds: bool,
    /// True when the quantifier is empty (every gap is at most ε).
    pub vacuous: bool,
}

impl ConditionCheck {
    fn from_residuals(residuals: impl Iterator<Item = (usize, f64)>, tolerance: f64) -> Self {
        let mut max_residual = f64::NEG_INFINITY;
        let mut worst_k = None;
        for (k, r) in residuals {
            if r > max_residual || r.is_nan() {
                max_residual = r;
                worst_k = Some(k);
                if r.is_nan() {
                    break;
                }
            }
        }
        Self {
            max_residual,
            worst_k,
            tolerance,
            holds: max_residual <= tolerance,
            vacuous: worst_k.is_none(),
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.holds = self.max_residual <= tolerance;
        self
    }
}

/// Basic inequality `dist²_{k+1} − dist²_k ≤ −α v_k (gap_k − ε)^{1/p} + β v_k²`
/// over all `k` with `gap_k > ε`, recomputed from the recorded distances.
pub fn check_h1(trace: &IterationTrace, constants: &FrameworkConstants) -> ConditionCheck {
    let FrameworkConstants {
        alpha,
        beta,
        epsilon,
        p,
        ..
    } = *constants;
    let residuals = trace
        .records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.gap > epsilon)
        .map(|(i, r)| {
            let next = trace.next_dist(i);
            let v = r.stepsize;
            let residual = next * next - r.dist * r.dist
                + alpha * v * (r.gap - epsilon).powf(1.0 / p)
                - beta * v * v;
            (r.k, residual)
        });
    ConditionCheck::from_residuals(residuals, RESIDUAL_TOL)
}

/// Step bound `‖x_{k+1} − x_k‖ ≤ γ v_k` over all recorded iterations.
pub fn check_h3(trace: &IterationTrace, constants: &FrameworkConstants) -> ConditionCheck {
    let residuals = trace
        .records
        .iter()
        .map(|r| (r.k, r.step_length - constants.gamma * r.stepsize));
    ConditionCheck::from_residuals(residuals, STEP_TOL)
}

/// Default offset `N` (1-based) for envelope checks: for dynamic stepsizes the
/// first iteration from which `dist²` never increases again, otherwise a
/// tenth of the trace.
pub fn default_burn_in(trace: &IterationTrace) -> usize {
    let n = trace.len();
    if trace.rule.is_dynamic() {
        let d = trace.dist_sq();
        let mut start = n.max(1);
        for i in (1..n).rev() {
            if d[i] <= d[i - 1] * (1.0 + 1e-12) {
                start = i;
            } else {
                break;
            }
        }
        start.max(1)
    } else {
        (n / 10).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemInstance;
    use crate::sets::FeasibleSet;
    use crate::solvers::{run, RunConfig, SolverKind};
    use crate::stepsizes::{LambdaSchedule, StepsizeRule};

    fn line_trace(rule: StepsizeRule, kind: SolverKind, n: usize) -> IterationTrace {
        let set = FeasibleSet::boxed(vec![-10.0], vec![10.0]).unwrap();
        let p = ProblemInstance::power_norm(vec![0.0], 1.0, 1.0, set).unwrap();
        run(&kind, &p, &rule, &RunConfig::new(vec![5.0], n)).unwrap()
    }

    #[test]
    fn standard_run_satisfies_both_conditions() {
        let t = line_trace(
            StepsizeRule::constant(0.3).unwrap(),
            SolverKind::Standard,
            200,
        );
        let h1 = check_h1(&t, &t.constants);
        assert!(h1.holds && !h1.vacuous, "{h1:?}");
        assert!(check_h3(&t, &t.constants).holds);
    }

    #[test]
    fn perturbed_distance_breaks_h1() {
        let mut t = line_trace(
            StepsizeRule::constant(0.3).unwrap(),
            SolverKind::Standard,
            50,
        );
        let d = t.records[10].dist;
        t.records[10].dist = (d * d + 1.0).sqrt();
        let h1 = check_h1(&t, &t.constants);
        assert!(!h1.holds);
        assert_eq!(h1.worst_k, Some(10));
    }

    #[test]
    fn all_gaps_within_epsilon_is_vacuous() {
        let rule = StepsizeRule::constant(0.1).unwrap();
        let set = FeasibleSet::boxed(vec![-10.0], vec![10.0]).unwrap();
        let p = ProblemInstance::power_norm(vec![0.0], 1.0, 1.0, set).unwrap();
        let kind = SolverKind::inexact(1.0, 0.0).unwrap();
        let t = run(&kind, &p, &rule, &RunConfig::new(vec![0.5], 20)).unwrap();
        let h1 = check_h1(&t, &t.constants);
        assert!(h1.vacuous && h1.holds);
        assert_eq!(h1.max_residual, f64::NEG_INFINITY);
    }

    #[test]
    fn burn_in_defaults() {
        let rule = StepsizeRule::dynamic(LambdaSchedule::constant(0.5), 0.0).unwrap();
        let t = line_trace(rule, SolverKind::Standard, 30);
        assert_eq!(default_burn_in(&t), 1);
        let t = line_trace(
            StepsizeRule::constant(0.1).unwrap(),
            SolverKind::Standard,
            300,
        );
        assert_eq!(default_burn_in(&t), 30);
    }
}
