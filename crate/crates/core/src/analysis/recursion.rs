//! Closed-form bounds for the scalar recursions
//! `u_{k+1} ≤ u_k − a u_k^{1+r} + b` and `u_{k+1} ≤ (1 − a k^{-s}) u_k + b k^{-t}`,
//! with randomized sweeps that compare them against the equality recursions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fit::{fit_power, RateFit};
use super::RESIDUAL_TOL;
use crate::{Error, Result};

/// Bound on `u_{k+1}` for `u_{k+1} ≤ u_k − a u_k^{1+r} + b`.
///
/// With `b = 0`: `u_1 (1 + r a u_1^r k)^{-1/r}`. With
/// `0 < b < a^{-1/r} (1+r)^{-(1+r)/r}`: `u_1 τ^k + (b/a)^{1/(1+r)}` where
/// `τ = 1 − a (1+r) (b/a)^{r/(1+r)}`.
pub fn lemma22_bound(u1: f64, a: f64, b: f64, r: f64, k: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::param("r", format!("must be positive, got {r}")));
    }
    if !(a > 0.0) {
        return Err(Error::param("a", format!("must be positive, got {a}")));
    }
    if !(u1 >= 0.0) {
        return Err(Error::param("u1", format!("must be nonnegative, got {u1}")));
    }
    let k = k as f64;
    if b == 0.0 {
        return Ok(u1 * (1.0 + r * a * u1.powf(r) * k).powf(-1.0 / r));
    }
    let threshold = power_recursion_threshold(a, r);
    if !(b > 0.0 && b < threshold) {
        return Err(Error::param(
            "b",
            format!(
                "must be 0 or lie in (0, a^(-1/r)(1+r)^(-(1+r)/r)) = (0, {threshold:e}), got {b}"
            ),
        ));
    }
    let u = (b / a).powf(1.0 / (1.0 + r));
    let tau = 1.0 - a * (1.0 + r) * u.powf(r);
    Ok(u1 * tau.powf(k) + u)
}

fn power_recursion_threshold(a: f64, r: f64) -> f64 {
    a.powf(-1.0 / r) * (1.0 + r).powf(-(1.0 + r) / r)
}

/// Value of a recursion bound, flagged when it is only a leading-order term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecursionBound {
    pub value: f64,
    /// The bound omits a lower-order term and is not a pointwise bound.
    pub asymptotic: bool,
}

/// Bound on `u_{k+1}` for `u_{k+1} ≤ (1 − a k^{-s}) u_k + b k^{-t}`.
///
/// With `t = s`: `u_1 e^{as/(1−s)} e^{-ak} + b/a`. With `t > s` only the
/// leading term `(b/a) k^{s−t}` is returned, flagged as asymptotic.
pub fn lemma23_bound(u1: f64, a: f64, b: f64, s: f64, t: f64, k: usize) -> Result<RecursionBound> {
    check_diminishing_params(a, b, s)?;
    if !(t >= s) {
        return Err(Error::param(
            "t",
            format!("must be at least s = {s}, got {t}"),
        ));
    }
    let kf = k as f64;
    if t == s {
        let value = u1 * (a * s / (1.0 - s)).exp() * (-a * kf).exp() + b / a;
        Ok(RecursionBound {
            value,
            asymptotic: false,
        })
    } else {
        Ok(RecursionBound {
            value: b / a * kf.powf(s - t),
            asymptotic: true,
        })
    }
}

fn check_diminishing_params(a: f64, b: f64, s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::param("s", format!("must lie in (0,1), got {s}")));
    }
    if !(a > 0.0) {
        return Err(Error::param("a", format!("must be positive, got {a}")));
    }
    if !(b > 0.0) {
        return Err(Error::param("b", format!("must be positive, got {b}")));
    }
    Ok(())
}

/// Bound on `u_{k+1}` for `u_{k+1} ≤ (1 − a k^{-s}) u_k + b k^{-s}` with `a ≤ 1`,
/// from `∏_{i≤k} (1 − a i^{-s}) ≤ exp(−a ((k+1)^{1−s} − 1)/(1−s))`:
/// `(u_1 − b/a)_+ exp(−a ((k+1)^{1−s} − 1)/(1−s)) + b/a`.
pub fn diminishing_recursion_bound(u1: f64, a: f64, b: f64, s: f64, k: usize) -> Result<f64> {
    check_diminishing_params(a, b, s)?;
    if a > 1.0 {
        return Err(Error::param("a", format!("must be at most 1, got {a}")));
    }
    let decay = (-a * (((k + 1) as f64).powf(1.0 - s) - 1.0) / (1.0 - s)).exp();
    Ok((u1 - b / a).max(0.0) * decay + b / a)
}

/// Result of a randomized sweep over recursion parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutcome {
    pub draws: usize,
    pub steps: usize,
    /// Number of draws with at least one violation.
    pub failures: usize,
    /// Largest `u_{k+1} − bound(k)` seen.
    pub worst_excess: f64,
    pub worst_k: usize,
    pub worst_params: Vec<(String, f64)>,
}

impl SweepOutcome {
    fn new(draws: usize, steps: usize) -> Self {
        Self {
            draws,
            steps,
            failures: 0,
            worst_excess: f64::NEG_INFINITY,
            worst_k: 0,
            worst_params: Vec::new(),
        }
    }

    fn record(&mut self, excess: f64, k: usize, params: &[(&str, f64)]) {
        if excess > self.worst_excess {
            self.worst_excess = excess;
            self.worst_k = k;
            self.worst_params = params.iter().map(|&(n, v)| (n.to_string(), v)).collect();
        }
    }

    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

/// Run `u_{k+1} = max(0, u_k − a u_k^{1+r} + b)` for random parameters and
/// compare with [`lemma22_bound`] for `k = 1..=steps`. Half of the draws use
/// `b = 0`; the rest draw `b` inside the admissible interval.
pub fn power_recursion_sweep(draws: usize, steps: usize, seed: u64) -> SweepOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SweepOutcome::new(draws, steps);
    for draw in 0..draws {
        let u1 = rng.random_range(0.0..10.0);
        let a = rng.random_range(0.01..1.0);
        let r = rng.random_range(0.1..3.0);
        let b = if draw % 2 == 0 {
            0.0
        } else {
            power_recursion_threshold(a, r) * rng.random_range(0.01..0.99)
        };
        let params = [("u1", u1), ("a", a), ("b", b), ("r", r)];
        let mut u = u1;
        let mut failed = false;
        for k in 1..=steps {
            u = (u - a * u.powf(1.0 + r) + b).max(0.0);
            let bound = lemma22_bound(u1, a, b, r, k).expect("parameters drawn in range");
            let excess = u - bound;
            out.record(excess, k, &params);
            failed |= excess > RESIDUAL_TOL;
        }
        out.failures += usize::from(failed);
    }
    out
}

/// Sweep of `u_{k+1} = (1 − a k^{-s}) u_k + b k^{-s}` with `u_1 ∈ (0,10)`,
/// `a, b, s ∈ (0,1)` against the closed form of [`lemma23_bound`] and the
/// integral-form [`diminishing_recursion_bound`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiminishingRecursionSweep {
    pub closed_form: SweepOutcome,
    pub integral_form: SweepOutcome,
}

pub fn diminishing_recursion_sweep(
    draws: usize,
    steps: usize,
    seed: u64,
) -> DiminishingRecursionSweep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut closed = SweepOutcome::new(draws, steps);
    let mut integral = SweepOutcome::new(draws, steps);
    for _ in 0..draws {
        let u1 = rng.random_range(0.0..10.0);
        let a = rng.random_range(0.01..1.0);
        let b = rng.random_range(0.01..1.0);
        let s = rng.random_range(0.05..0.95);
        let params = [("u1", u1), ("a", a), ("b", b), ("s", s)];
        let mut u = u1;
        let (mut closed_failed, mut integral_failed) = (false, false);
        for k in 1..=steps {
            let w = (k as f64).powf(-s);
            u = (1.0 - a * w) * u + b * w;
            let c = lemma23_bound(u1, a, b, s, s, k)
                .expect("parameters drawn in range")
                .value;
            let i = diminishing_recursion_bound(u1, a, b, s, k).expect("parameters drawn in range");
            closed.record(u - c, k, &params);
            integral.record(u - i, k, &params);
            closed_failed |= u - c > RESIDUAL_TOL;
            integral_failed |= u - i > RESIDUAL_TOL;
        }
        closed.failures += usize::from(closed_failed);
        integral.failures += usize::from(integral_failed);
    }
    DiminishingRecursionSweep {
        closed_form: closed,
        integral_form: integral,
    }
}

/// Power-law decay of `u_{k+1} = (1 − a k^{-s}) u_k + b k^{-t}` for `t > s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiminishingRecursionExponent {
    pub fit: RateFit,
    /// `t − s`
    pub expected_exponent: f64,
    /// `u_K / ((b/a) K^{s−t})` at the last step.
    pub constant_ratio: f64,
}

/// Simulate the `t > s` recursion from `u_1 = 1` for `steps` iterations and
/// fit the decay exponent over the last 90% of the run.
pub fn diminishing_recursion_exponent(
    a: f64,
    b: f64,
    s: f64,
    t: f64,
    steps: usize,
) -> Result<DiminishingRecursionExponent> {
    check_diminishing_params(a, b, s)?;
    if !(t > s) {
        return Err(Error::param("t", format!("must exceed s = {s}, got {t}")));
    }
    if a > 1.0 {
        return Err(Error::param("a", format!("must be at most 1, got {a}")));
    }
    let mut u = 1.0;
    let mut series = Vec::with_capacity(steps);
    for k in 1..=steps {
        let kf = k as f64;
        u = (1.0 - a * kf.powf(-s)) * u + b * kf.powf(-t);
        series.push(u);
    }
    // series[k - 1] holds u_{k+1}, matching the indexing of the bound
    let fit = fit_power(&series, (steps / 10).max(1))?;
    let last = steps as f64;
    Ok(DiminishingRecursionExponent {
        fit,
        expected_exponent: t - s,
        constant_ratio: series[steps - 1] / (b / a * last.powf(s - t)),
    })
}
