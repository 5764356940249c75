//! Constant, diminishing and dynamic stepsize rules.

use serde::Serialize;

use crate::{Error, Result};

/// Relaxation parameters `λ_k` of the dynamic rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaSchedule {
    Constant {
        lambda: f64,
    },
    /// `first` on odd `k`, `second` on even `k`.
    Alternating {
        first: f64,
        second: f64,
    },
}

impl LambdaSchedule {
    pub fn constant(lambda: f64) -> Self {
        LambdaSchedule::Constant { lambda }
    }

    pub fn alternating(first: f64, second: f64) -> Self {
        LambdaSchedule::Alternating { first, second }
    }

    pub fn at(&self, k: usize) -> f64 {
        match *self {
            LambdaSchedule::Constant { lambda } => lambda,
            LambdaSchedule::Alternating { first, second } => {
                if k % 2 == 1 {
                    first
                } else {
                    second
                }
            }
        }
    }

    /// Smallest value the schedule takes.
    pub fn lower(&self) -> f64 {
        match *self {
            LambdaSchedule::Constant { lambda } => lambda,
            LambdaSchedule::Alternating { first, second } => first.min(second),
        }
    }

    /// Largest value the schedule takes.
    pub fn upper(&self) -> f64 {
        match *self {
            LambdaSchedule::Constant { lambda } => lambda,
            LambdaSchedule::Alternating { first, second } => first.max(second),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum StepsizeRule {
    /// `v_k = v`
    Constant { v: f64 },
    /// `v_k = c k^{-s}`
    Diminishing { c: f64, s: f64 },
    /// `v_k = (α λ_k / 2β) [f(x_k) − target]_+^{1/p}` with `target = f* + ε`.
    Dynamic {
        schedule: LambdaSchedule,
        target: f64,
    },
}

impl StepsizeRule {
    pub fn constant(v: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param("v", format!("must be positive, got {v}")));
        }
        Ok(StepsizeRule::Constant { v })
    }

    pub fn diminishing(c: f64, s: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::param("c", format!("must be positive, got {c}")));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::param("s", format!("must lie in (0,1), got {s}")));
        }
        Ok(StepsizeRule::Diminishing { c, s })
    }

    pub fn dynamic(schedule: LambdaSchedule, target: f64) -> Result<Self> {
        let (lo, hi) = (schedule.lower(), schedule.upper());
        if !(lo > 0.0 && hi < 2.0) {
            return Err(Error::param(
                "lambda",
                format!("schedule must stay in (0,2), got range [{lo}, {hi}]"),
            ));
        }
        if !target.is_finite() {
            return Err(Error::param("target", "must be finite"));
        }
        Ok(StepsizeRule::Dynamic { schedule, target })
    }

    pub fn is_dynamic(&self) -> bool {
        matches!(self, StepsizeRule::Dynamic { .. })
    }
}

/// Limits of the sequences `α_k, β_k, γ_k` in the basic inequality
/// `dist²(x_{k+1}) ≤ dist²(x_k) − α_k v_k (f(x_k) − f* − ε)^{1/p} + β_k v_k²`
/// and the step bound `‖x_{k+1} − x_k‖ ≤ γ_k v_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameworkConstants {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub alpha_inf: f64,
    pub beta_sup: f64,
    pub epsilon: f64,
    pub p: f64,
}

impl FrameworkConstants {
    /// Constants whose sequences are constant, so limits and extremes agree.
    pub fn new(alpha: f64, beta: f64, gamma: f64, epsilon: f64, p: f64) -> Result<Self> {
        Self::with_bounds(alpha, beta, gamma, alpha, beta, epsilon, p)
    }

    pub fn with_bounds(
        alpha: f64,
        beta: f64,
        gamma: f64,
        alpha_inf: f64,
        beta_sup: f64,
        epsilon: f64,
        p: f64,
    ) -> Result<Self> {
        for (name, value) in [
            ("alpha", alpha),
            ("beta", beta),
            ("gamma", gamma),
            ("alpha_inf", alpha_inf),
            ("beta_sup", beta_sup),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::param(name, format!("must be positive, got {value}")));
            }
        }
        if alpha_inf > alpha || beta > beta_sup {
            return Err(Error::param(
                "alpha_inf",
                "require alpha_inf ≤ alpha and beta ≤ beta_sup",
            ));
        }
        if !(epsilon >= 0.0) {
            return Err(Error::param(
                "epsilon",
                format!("must be nonnegative, got {epsilon}"),
            ));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::param("p", format!("must lie in (0,1], got {p}")));
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            alpha_inf,
            beta_sup,
            epsilon,
            p,
        })
    }
}

/// Stepsize `v_k` at iteration `k ≥ 1` given `f(x_k)`.
pub fn stepsize(
    rule: &StepsizeRule,
    k: usize,
    f_xk: f64,
    constants: &FrameworkConstants,
) -> Result<f64> {
    if k < 1 {
        return Err(Error::param("k", "iteration index starts at 1"));
    }
    Ok(match *rule {
        StepsizeRule::Constant { v } => v,
        StepsizeRule::Diminishing { c, s } => c * (k as f64).powf(-s),
        StepsizeRule::Dynamic { schedule, target } => {
            let p = constants.p;
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::param("p", format!("must lie in (0,1], got {p}")));
            }
            let excess = (f_xk - target).max(0.0);
            constants.alpha * schedule.at(k) / (2.0 * constants.beta) * excess.powf(1.0 / p)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn standard(l: f64, p: f64) -> FrameworkConstants {
        FrameworkConstants::new(2.0 * l.powf(-1.0 / p), 1.0, 1.0, 0.0, p).unwrap()
    }

    #[test]
    fn diminishing_example() {
        let rule = StepsizeRule::diminishing(1.0, 0.5).unwrap();
        assert_eq!(stepsize(&rule, 4, 0.0, &standard(1.0, 1.0)).unwrap(), 0.5);
        assert!(stepsize(&rule, 0, 0.0, &standard(1.0, 1.0)).is_err());
    }

    #[test]
    fn dynamic_examples() {
        let rule = StepsizeRule::dynamic(LambdaSchedule::constant(1.0), 0.0).unwrap();
        let c = standard(1.0, 1.0);
        assert_eq!(stepsize(&rule, 1, -0.5, &c).unwrap(), 0.0);
        assert_eq!(stepsize(&rule, 1, 0.0, &c).unwrap(), 0.0);
        assert_eq!(stepsize(&rule, 3, 2.0, &c).unwrap(), 2.0);
        // conditional constants give a quarter of the standard step
        let cond = FrameworkConstants::new(2.0, 4.0, 2.0, 0.0, 1.0).unwrap();
        assert_eq!(stepsize(&rule, 3, 2.0, &cond).unwrap(), 0.5);
        // L = 4, p = 1/2: λ ((f − f*)/L)^{1/p} = (2/4)² = 0.25
        assert!((stepsize(&rule, 1, 2.0, &standard(4.0, 0.5)).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rule_validation() {
        assert!(StepsizeRule::constant(0.0).is_err());
        assert!(StepsizeRule::diminishing(1.0, 1.5).is_err());
        assert!(StepsizeRule::diminishing(1.0, 0.0).is_err());
        assert!(StepsizeRule::dynamic(LambdaSchedule::constant(2.0), 0.0).is_err());
        assert!(StepsizeRule::dynamic(LambdaSchedule::alternating(0.0, 1.0), 0.0).is_err());
        assert!(StepsizeRule::dynamic(LambdaSchedule::alternating(0.5, 1.5), 0.0).is_ok());
        assert!(FrameworkConstants::new(2.0, 1.0, 1.0, 0.0, 1.5).is_err());
        assert!(FrameworkConstants::with_bounds(2.0, 1.0, 1.0, 3.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn alternating_schedule() {
        let s = LambdaSchedule::alternating(0.5, 1.5);
        assert_eq!(s.at(1), 0.5);
        assert_eq!(s.at(2), 1.5);
        assert_eq!((s.lower(), s.upper()), (0.5, 1.5));
    }

    proptest! {
        #[test]
        fn diminishing_partial_sums_diverge(c in 0.01f64..10.0, s in 0.01f64..0.99, big_k in 1usize..5000) {
            let rule = StepsizeRule::diminishing(c, s).unwrap();
            let consts = standard(1.0, 1.0);
            let steps: Vec<f64> = (1..=big_k).map(|k| stepsize(&rule, k, 0.0, &consts).unwrap()).collect();
            let total: f64 = steps.iter().sum();
            let integral = c * (((big_k + 1) as f64).powf(1.0 - s) - 1.0) / (1.0 - s);
            prop_assert!(total >= integral * (1.0 - 1e-12));
            prop_assert!(steps.iter().all(|&v| v > 0.0));
            prop_assert!(steps.windows(2).all(|w| w[1] < w[0]));
        }

        #[test]
        fn dynamic_is_zero_exactly_below_target(
            f in -10.0f64..10.0,
            target in -5.0f64..5.0,
            lambda in 0.01f64..1.99,
            p in 0.05f64..=1.0,
            l in 0.1f64..10.0,
        ) {
            let rule = StepsizeRule::dynamic(LambdaSchedule::constant(lambda), target).unwrap();
            let v = stepsize(&rule, 1, f, &standard(l, p)).unwrap();
            prop_assert!(v >= 0.0);
            if f <= target {
                prop_assert_eq!(v, 0.0);
            } else {
                let expected = lambda * ((f - target) / l).powf(1.0 / p);
                prop_assert!((v - expected).abs() <= 1e-12 * expected.max(1e-300) || expected < 1e-300);
            }
        }
    }
}
