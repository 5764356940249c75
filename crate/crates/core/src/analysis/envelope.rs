//! Distance envelopes under weak sharp minima of order `q`.
//!
//! Each envelope bounds `dist²(x_{k+N}, X*)` by a geometric or power-law
//! decay toward a floor. Where the constants of the decay are explicit, the
//! closed form is checked pointwise; the existence of some geometric rate is
//! checked empirically from the trace.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::fit::{fit_geometric, fit_power, RateFit};
use super::framework::default_burn_in;
use super::RESIDUAL_TOL;
use crate::problems::{ProblemInstance, SharpCertificate};
use crate::solvers::IterationTrace;
use crate::stepsizes::StepsizeRule;
use crate::{Error, Result};

/// Relative slack on the diminishing-rule power envelope.
const POWER_ENVELOPE_SLACK: f64 = 1e-6;

/// Points enter the geometric fit while their excess over the floor is above
/// this multiple of the tolerance.
const FIT_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EnvelopeKind {
    /// Constant rule, `q = 2p`: geometric decay to
    /// `2^{1/p−1} η^{-1/p} (ε^{1/p} + βv/α)`.
    ConstantLinear,
    /// Constant rule, `q > 2p`: geometric decay to
    /// `2^{2/q−2p/q} η^{-2/q} (ε^{1/p} + βv/α)^{2p/q}`.
    ConstantHighOrder,
    /// Dynamic rule, `q = p`: geometric decay to `2^{2/p−1} η^{-2/p} ε^{2/p}`.
    DynamicLinear,
    /// Dynamic rule, `q > p`, `ε = 0`: `dist²_N / (1 + γk)^{p/(q−p)}`.
    DynamicSublinear,
    /// Dynamic rule, `q > p`, small `ε > 0`: geometric decay to
    /// `2^{2/q−p/q} η^{-2/q} ε^{2/q}`.
    DynamicHighOrder,
    /// Diminishing rule, `q = 2p`, `ε = 0`: `(βc/α)(2/η)^{1/p} k^{-s}` for
    /// all large `k`.
    DiminishingSublinear,
    /// Diminishing rule, `q = 2p`, `ε > 0`: geometric decay to `(2ε/η)^{1/p}`.
    DiminishingInexact,
}

impl EnvelopeKind {
    pub const ALL: [EnvelopeKind; 7] = [
        EnvelopeKind::ConstantLinear,
        EnvelopeKind::ConstantHighOrder,
        EnvelopeKind::DynamicLinear,
        EnvelopeKind::DynamicSublinear,
        EnvelopeKind::DynamicHighOrder,
        EnvelopeKind::DiminishingSublinear,
        EnvelopeKind::DiminishingInexact,
    ];

    /// Identifier used in experiment configurations and reports.
    pub fn id(self) -> &'static str {
        match self {
            EnvelopeKind::ConstantLinear => "t3.3i",
            EnvelopeKind::ConstantHighOrder => "t3.3ii",
            EnvelopeKind::DynamicLinear => "t3.4i",
            EnvelopeKind::DynamicSublinear => "t3.4ii",
            EnvelopeKind::DynamicHighOrder => "t3.4iii",
            EnvelopeKind::DiminishingSublinear => "t3.5i",
            EnvelopeKind::DiminishingInexact => "t3.5ii",
        }
    }

    /// Name of the stepsize rule the envelope applies to.
    pub fn rule_name(self) -> &'static str {
        match self {
            EnvelopeKind::ConstantLinear | EnvelopeKind::ConstantHighOrder => "constant",
            EnvelopeKind::DynamicLinear
            | EnvelopeKind::DynamicSublinear
            | EnvelopeKind::DynamicHighOrder => "dynamic",
            EnvelopeKind::DiminishingSublinear | EnvelopeKind::DiminishingInexact => "diminishing",
        }
    }
}

impl fmt::Display for EnvelopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for EnvelopeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnvelopeKind::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::param("envelope", format!("unknown envelope id `{s}`")))
    }
}

fn rule_name(rule: &StepsizeRule) -> &'static str {
    match rule {
        StepsizeRule::Constant { .. } => "constant",
        StepsizeRule::Diminishing { .. } => "diminishing",
        StepsizeRule::Dynamic { .. } => "dynamic",
    }
}

/// Sharpness data and options for [`envelope_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeParams {
    pub q: f64,
    pub eta: f64,
    /// Radius of the ball on which the sharpness bound is certified.
    pub radius: f64,
    pub epsilon: f64,
    /// Offset `N` (1-based); defaults to [`default_burn_in`].
    pub burn_in: Option<usize>,
    pub tolerance: f64,
}

impl EnvelopeParams {
    pub fn new(cert: SharpCertificate, epsilon: f64) -> Self {
        Self {
            q: cert.order,
            eta: cert.modulus,
            radius: cert.radius,
            epsilon,
            burn_in: None,
            tolerance: RESIDUAL_TOL,
        }
    }

    /// Parameters from the problem's certificate. The noise level is the
    /// solver's ε, raised to `target − f*` for dynamic rules aiming higher.
    pub fn for_trace(problem: &ProblemInstance, trace: &IterationTrace) -> Option<Self> {
        let cert = problem.sharp()?;
        let mut eps = trace.constants.epsilon;
        if let StepsizeRule::Dynamic { target, .. } = trace.rule {
            eps = eps.max(target - problem.optimal_value());
        }
        Some(Self::new(cert, eps))
    }

    pub fn with_burn_in(mut self, n: usize) -> Self {
        self.burn_in = Some(n);
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeStatus {
    Holds,
    Fails,
    /// The hypotheses on `q` or `ε` are not met; nothing is asserted.
    Inapplicable,
    /// Iterates left the ball on which the sharpness certificate holds.
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub envelope: EnvelopeKind,
    pub status: EnvelopeStatus,
    pub reason: Option<String>,
    pub burn_in: usize,
    pub floor: Option<f64>,
    /// Rate from the explicit constants, where available.
    pub closed_form_tau: Option<f64>,
    /// `γ` of the power-law envelope.
    pub envelope_rate: Option<f64>,
    /// Largest excess of `dist²` over the explicit envelope.
    pub closed_form_violation: Option<f64>,
    /// Smallest `τ` with `dist²_{N+k} − floor ≤ τ^k dist²_N` on the trace.
    pub empirical_tau: Option<f64>,
    pub fit: Option<RateFit>,
    /// Some iterate reached `f(x_k) ≤ f* + ε`.
    pub entered_optimal_set: bool,
    /// Smallest `N` from which the diminishing-rule envelope holds.
    pub empirical_n: Option<usize>,
}

impl EnvelopeReport {
    fn blank(
        envelope: EnvelopeKind,
        status: EnvelopeStatus,
        reason: String,
        burn_in: usize,
    ) -> Self {
        Self {
            envelope,
            status,
            reason: Some(reason),
            burn_in,
            floor: None,
            closed_form_tau: None,
            envelope_rate: None,
            closed_form_violation: None,
            empirical_tau: None,
            fit: None,
            entered_optimal_set: false,
            empirical_n: None,
        }
    }

    pub fn holds(&self) -> bool {
        self.status == EnvelopeStatus::Holds
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// `max_k (u_{N+k} − τ^k u_N − floor)` for `k ≥ 1`.
fn geometric_violation(u: &[f64], n: usize, tau: f64, floor: f64) -> f64 {
    let base = u[n - 1];
    u[n..]
        .iter()
        .enumerate()
        .map(|(i, &x)| x - tau.powi(i as i32 + 1) * base - floor)
        .fold(f64::NEG_INFINITY, f64::max)
}

struct Existence {
    tau_sup: f64,
    fit: Option<RateFit>,
}

/// Empirical rate `sup_k ((u_{N+k} − floor)_+ / u_N)^{1/k}` and a geometric
/// fit over the leading run of points clearly above the floor.
fn geometric_existence(u: &[f64], n: usize, floor: f64, tol: f64) -> Existence {
    let base = u[n - 1];
    let mut tau_sup: f64 = 0.0;
    for (i, &x) in u[n..].iter().enumerate() {
        let excess = (x - floor - tol).max(0.0);
        if excess > 0.0 {
            let ratio = if base > 0.0 {
                excess / base
            } else {
                f64::INFINITY
            };
            tau_sup = tau_sup.max(ratio.powf(1.0 / (i + 1) as f64));
        }
    }
    let run = u[n - 1..]
        .iter()
        .take_while(|&&x| x - floor > FIT_MARGIN * tol)
        .count();
    let fit = fit_geometric(&u[..n - 1 + run], floor, n).ok();
    Existence { tau_sup, fit }
}

/// Closed-form rate of the recursion `u⁺ ≤ u − a u^{1+r} + b`, when `b` is in
/// the admissible range.
fn recursion_tau(a: f64, b: f64, r: f64) -> Option<f64> {
    let threshold = a.powf(-1.0 / r) * (1.0 + r).powf(-(1.0 + r) / r);
    (b > 0.0 && b < threshold).then(|| 1.0 - a * (1.0 + r) * (b / a).powf(r / (1.0 + r)))
}

/// Check one envelope against a trace.
///
/// Returns an error if the trace's stepsize rule does not match the envelope
/// or the trace is shorter than the offset `N`.
pub fn envelope_check(
    trace: &IterationTrace,
    envelope: EnvelopeKind,
    params: &EnvelopeParams,
) -> Result<EnvelopeReport> {
    if rule_name(&trace.rule) != envelope.rule_name() {
        return Err(Error::Mismatch(format!(
            "{} requires {} rule, trace uses {}",
            envelope.id(),
            envelope.rule_name(),
            rule_name(&trace.rule)
        )));
    }
    let n = params.burn_in.unwrap_or_else(|| default_burn_in(trace));
    if n < 1 || n > trace.len() {
        return Err(Error::TraceTooShort {
            needed: n.max(1),
            available: trace.len(),
        });
    }
    let c = trace.constants;
    let (alpha, beta, p) = (c.alpha, c.beta, c.p);
    let EnvelopeParams {
        q,
        eta,
        radius,
        epsilon: eps,
        tolerance: tol,
        ..
    } = *params;
    let inapplicable = |why: String| {
        Ok(EnvelopeReport::blank(
            envelope,
            EnvelopeStatus::Inapplicable,
            why,
            n,
        ))
    };

    let (lam_lo, lam_hi) = match trace.rule {
        StepsizeRule::Dynamic { schedule, .. } => (schedule.lower(), schedule.upper()),
        _ => (f64::NAN, f64::NAN),
    };
    let dyn_scale = alpha * alpha / (4.0 * beta) * lam_lo * (2.0 - lam_hi);

    match envelope {
        EnvelopeKind::ConstantLinear
        | EnvelopeKind::DiminishingSublinear
        | EnvelopeKind::DiminishingInexact
            if !same(q, 2.0 * p) =>
        {
            return inapplicable(format!(
                "requires sharpness order q = 2p = {}, certificate has q = {q}",
                2.0 * p
            ));
        }
        EnvelopeKind::ConstantHighOrder if !(q > 2.0 * p) => {
            return inapplicable(format!(
                "requires q > 2p = {}, certificate has q = {q}",
                2.0 * p
            ));
        }
        EnvelopeKind::DynamicLinear if !same(q, p) => {
            return inapplicable(format!("requires q = p = {p}, certificate has q = {q}"));
        }
        EnvelopeKind::DynamicSublinear | EnvelopeKind::DynamicHighOrder
            if !(q > p) || same(q, p) =>
        {
            return inapplicable(format!("requires q > p = {p}, certificate has q = {q}"));
        }
        EnvelopeKind::DynamicSublinear | EnvelopeKind::DiminishingSublinear if eps != 0.0 => {
            return inapplicable(format!("requires ε = 0, got {eps}"));
        }
        EnvelopeKind::DiminishingInexact if !(eps > 0.0) => {
            return inapplicable("requires ε > 0".to_string());
        }
        EnvelopeKind::ConstantHighOrder => {
            let StepsizeRule::Constant { v } = trace.rule else {
                unreachable!()
            };
            let lhs = eps.powf(1.0 / p) + beta * v / alpha;
            let rhs = eta.powf(-2.0 / (q - 2.0 * p))
                * (2.0 * p / (alpha * v * q)).powf(q / (q - 2.0 * p));
            if !(lhs < rhs) {
                return inapplicable(format!(
                    "ε^(1/p) + βv/α = {lhs:e} is not below the threshold {rhs:e}"
                ));
            }
        }
        EnvelopeKind::DynamicHighOrder => {
            let threshold = (alpha * alpha * q * lam_lo * (2.0 - lam_hi) / (4.0 * beta * p))
                .powf(-p * q / (2.0 * (q - p)))
                * eta.powf(-p / (q - p));
            if !(eps > 0.0 && eps < threshold) {
                return inapplicable(format!("requires 0 < ε < {threshold:e}, got {eps}"));
            }
        }
        _ => {}
    }

    if trace.max_iterate_norm > radius * (1.0 + 1e-12) {
        return Ok(EnvelopeReport::blank(
            envelope,
            EnvelopeStatus::Aborted,
            format!(
                "certificate radius exceeded: iterates reach norm {:e}, certificate covers {radius:e}",
                trace.max_iterate_norm
            ),
            n,
        ));
    }

    let u = trace.dist_sq();
    let entered = trace.records.iter().any(|r| r.gap <= eps);
    let mut report = EnvelopeReport {
        envelope,
        status: EnvelopeStatus::Fails,
        reason: None,
        burn_in: n,
        floor: None,
        closed_form_tau: None,
        envelope_rate: None,
        closed_form_violation: None,
        empirical_tau: None,
        fit: None,
        entered_optimal_set: entered,
        empirical_n: None,
    };

    let mut closed_ok = true;
    let mut geometric = |report: &mut EnvelopeReport, floor: f64, tau: Option<f64>| {
        report.floor = Some(floor);
        report.closed_form_tau = tau;
        if let Some(tau) = tau {
            let violation = geometric_violation(&u, n, tau, floor);
            report.closed_form_violation = Some(violation);
            closed_ok = violation <= tol;
        }
        let e = geometric_existence(&u, n, floor, tol);
        report.empirical_tau = Some(e.tau_sup);
        report.fit = e.fit;
        e.tau_sup < 1.0
    };

    let empirical_ok = match envelope {
        EnvelopeKind::ConstantLinear => {
            let StepsizeRule::Constant { v } = trace.rule else {
                unreachable!()
            };
            let a = 2f64.powf(1.0 - 1.0 / p) * alpha * v * eta.powf(1.0 / p);
            let floor = 2f64.powf(1.0 / p - 1.0)
                * eta.powf(-1.0 / p)
                * (eps.powf(1.0 / p) + beta * v / alpha);
            geometric(&mut report, floor, Some((1.0 - a).max(0.0)))
        }
        EnvelopeKind::ConstantHighOrder => {
            let StepsizeRule::Constant { v } = trace.rule else {
                unreachable!()
            };
            let a = 2f64.powf(1.0 - 1.0 / p) * alpha * v * eta.powf(1.0 / p);
            let b = alpha * v * eps.powf(1.0 / p) + beta * v * v;
            let floor = 2f64.powf(2.0 / q - 2.0 * p / q)
                * eta.powf(-2.0 / q)
                * (eps.powf(1.0 / p) + beta * v / alpha).powf(2.0 * p / q);
            geometric(&mut report, floor, recursion_tau(a, b, q / (2.0 * p) - 1.0))
        }
        EnvelopeKind::DynamicLinear => {
            let a = 2f64.powf(1.0 - 2.0 / p) * dyn_scale * eta.powf(2.0 / p);
            let floor = 2f64.powf(2.0 / p - 1.0) * eta.powf(-2.0 / p) * eps.powf(2.0 / p);
            geometric(&mut report, floor, Some((1.0 - a).max(0.0)))
        }
        EnvelopeKind::DynamicHighOrder => {
            let a = 2f64.powf(1.0 - 2.0 / p) * dyn_scale * eta.powf(2.0 / p);
            let b = dyn_scale * eps.powf(2.0 / p);
            let floor = 2f64.powf(2.0 / q - p / q) * eta.powf(-2.0 / q) * eps.powf(2.0 / q);
            geometric(&mut report, floor, recursion_tau(a, b, q / p - 1.0))
        }
        EnvelopeKind::DiminishingInexact => {
            let floor = (2.0 * eps / eta).powf(1.0 / p);
            geometric(&mut report, floor, None)
        }
        EnvelopeKind::DynamicSublinear => {
            let d_n = u[n - 1].sqrt();
            let gamma = 2f64.powf(1.0 - 2.0 / p) * dyn_scale * (q - p) / p
                * eta.powf(2.0 / p)
                * d_n.powf(2.0 * q / p - 2.0);
            let exponent = p / (q - p);
            let violation = u[n..]
                .iter()
                .enumerate()
                .map(|(i, &x)| x - u[n - 1] / (1.0 + gamma * (i + 1) as f64).powf(exponent))
                .fold(f64::NEG_INFINITY, f64::max);
            report.floor = Some(0.0);
            report.envelope_rate = Some(gamma);
            report.closed_form_violation = Some(violation);
            report.fit = fit_power(&u, n).ok();
            closed_ok = violation <= tol;
            true
        }
        EnvelopeKind::DiminishingSublinear => {
            let StepsizeRule::Diminishing { c: step_c, s } = trace.rule else {
                unreachable!()
            };
            let scale = beta * step_c / alpha * (2.0 / eta).powf(1.0 / p);
            let above =
                |k: usize| u[k - 1] > scale * (k as f64).powf(-s) * (1.0 + POWER_ENVELOPE_SLACK);
            let last_bad = (1..=u.len()).rev().find(|&k| above(k));
            let first_good = last_bad.map_or(1, |k| k + 1);
            report.floor = Some(0.0);
            report.envelope_rate = Some(scale);
            report.fit = fit_power(&u, n).ok();
            if first_good <= u.len() / 2 {
                report.empirical_n = Some(first_good);
                true
            } else {
                report.reason = Some(format!(
                    "envelope only holds from k = {first_good} of {} iterations",
                    u.len()
                ));
                false
            }
        }
    };

    let ok = closed_ok && empirical_ok;
    report.status = if ok || entered {
        EnvelopeStatus::Holds
    } else {
        EnvelopeStatus::Fails
    };
    if report.status == EnvelopeStatus::Fails && report.reason.is_none() {
        report.reason = Some(if !closed_ok {
            format!(
                "dist² exceeds the closed-form envelope by {:e}",
                report.closed_form_violation.unwrap_or(f64::NAN)
            )
        } else {
            format!(
                "no geometric rate below one toward floor {:e} (empirical τ {:e})",
                report.floor.unwrap_or(f64::NAN),
                report.empirical_tau.unwrap_or(f64::NAN)
            )
        });
    }
    Ok(report)
}
