use serde::Serialize;

use super::RESIDUAL_TOL;
use crate::problems::ProblemInstance;
use crate::solvers::{IterationTrace, Termination};
use crate::stepsizes::{FrameworkConstants, StepsizeRule};
use crate::vector::Vector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexityKind {
    /// Constant stepsize.
    K1,
    /// Diminishing stepsize.
    K2,
    /// Dynamic stepsize.
    K3,
}

impl ComplexityKind {
    pub fn id(self) -> &'static str {
        match self {
            ComplexityKind::K1 => "k1",
            ComplexityKind::K2 => "k2",
            ComplexityKind::K3 => "k3",
        }
    }
}

/// Iteration budget `K` with the value bound it guarantees for
/// `min_{k ≤ K} f(x_k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub kind: ComplexityKind,
    pub delta: f64,
    /// Unrounded budget.
    pub raw_budget: f64,
    pub budget: usize,
    /// `f* + (β v/α + δ)^p + ε` for K1, `f* + δ^p + ε` for K3. For K2 the
    /// bound depends on `k`; `value_bound` is `f* + ε` and `achieved_min` is
    /// `min_k f(x_k) − (β c k^{-s}/α + δ)^p`.
    pub value_bound: f64,
    pub achieved_min: Option<f64>,
    /// Iteration attaining `achieved_min`.
    pub achieved_at: Option<usize>,
    pub holds: Option<bool>,
    #[serde(skip)]
    pub(crate) f_star: f64,
    #[serde(skip)]
    pub(crate) k2_shift: Option<(f64, f64, f64, f64)>,
}

/// Round a budget up, ignoring floating-point noise just above an integer.
fn round_budget(raw: f64) -> usize {
    let slack = 1e-9 * raw.abs().max(1.0);
    ((raw - slack).ceil()).max(1.0) as usize
}

/// Budget and value bound for the rule matching `kind`, started from
/// `P_X(x1)`.
pub fn complexity_budget(
    kind: ComplexityKind,
    problem: &ProblemInstance,
    rule: &StepsizeRule,
    constants: &FrameworkConstants,
    x1: &Vector,
    delta: f64,
) -> Result<ComplexityReport> {
    if !(delta > 0.0) {
        return Err(Error::param(
            "delta",
            format!("must be positive, got {delta}"),
        ));
    }
    let start = problem.feasible().project(x1)?;
    let d2 = problem.distance_to_optimum(&start)?.powi(2);
    let FrameworkConstants {
        alpha_inf,
        beta_sup,
        epsilon,
        p,
        ..
    } = *constants;
    let f_star = problem.optimal_value();
    let (raw, value_bound, k2_shift) = match (kind, rule) {
        (ComplexityKind::K1, StepsizeRule::Constant { v }) => (
            d2 / (alpha_inf * v * delta),
            f_star + (beta_sup * v / alpha_inf + delta).powf(p) + epsilon,
            None,
        ),
        (ComplexityKind::K2, StepsizeRule::Diminishing { c, s }) => (
            ((1.0 - s) * d2 / (alpha_inf * c * delta)).powf(1.0 / (1.0 - s)),
            f_star + epsilon,
            Some((beta_sup * c / alpha_inf, *s, delta, p)),
        ),
        (ComplexityKind::K3, StepsizeRule::Dynamic { schedule, .. }) => {
            let (lo, hi) = (schedule.lower(), schedule.upper());
            (
                4.0 * beta_sup * d2 / (alpha_inf * alpha_inf * lo * (2.0 - hi) * delta * delta),
                f_star + delta.powf(p) + epsilon,
                None,
            )
        }
        _ => {
            let needed = match kind {
                ComplexityKind::K1 => "constant",
                ComplexityKind::K2 => "diminishing",
                ComplexityKind::K3 => "dynamic",
            };
            return Err(Error::Mismatch(format!(
                "{} requires {needed} rule",
                kind.id()
            )));
        }
    };
    Ok(ComplexityReport {
        kind,
        delta,
        raw_budget: raw,
        budget: round_budget(raw),
        value_bound,
        achieved_min: None,
        achieved_at: None,
        holds: None,
        f_star,
        k2_shift,
    })
}

/// Evaluate the budget against a trace.
///
/// The trace must cover the budget unless it stopped early because the gap
/// threshold or the optimal set was reached.
pub fn check_complexity(
    trace: &IterationTrace,
    report: &ComplexityReport,
) -> Result<ComplexityReport> {
    let stopped_early = trace.termination != Termination::MaxIter;
    if trace.len() < report.budget && !stopped_early {
        return Err(Error::TraceTooShort {
            needed: report.budget,
            available: trace.len(),
        });
    }
    let shifted = trace.records.iter().take(report.budget).map(|r| {
        let shift = match report.k2_shift {
            Some((scale, s, delta, p)) => (scale * (r.k as f64).powf(-s) + delta).powf(p),
            None => 0.0,
        };
        (r.k, r.f_value - shift)
    });
    let (k, best) = shifted.fold(
        (0, f64::INFINITY),
        |acc, (k, v)| if v < acc.1 { (k, v) } else { acc },
    );
    let mut out = report.clone();
    out.achieved_min = Some(best);
    out.achieved_at = Some(k);
    out.holds = Some(best <= report.value_bound + RESIDUAL_TOL);
    Ok(out)
}

impl ComplexityReport {
    /// `min_{k ≤ K} f(x_k) − f*` once checked.
    pub fn achieved_gap(&self) -> Option<f64> {
        self.achieved_min.map(|m| m - self.f_star)
    }
}
