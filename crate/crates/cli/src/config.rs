//! TOML experiment configuration and its validation.

use std::fmt;
use std::str::FromStr;

use qsub::analysis::ComplexityKind;
use qsub::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: ProblemConfig,
    pub solver: SolverConfig,
    pub stepsize: StepsizeConfig,
    pub run: RunSection,
    #[serde(default)]
    pub checks: Vec<CheckConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    /// `power_norm`, `piecewise_power` or `linear_fractional`.
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numer: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numer_offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denom: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denom_offset: Option<f64>,
    pub feasible: FeasibleConfig,
    /// Replaces the derived weak-sharp-minima certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharp: Option<SharpConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeasibleConfig {
    /// `whole_space`, `box`, `ball` or `halfspace`.
    pub shape: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpConfig {
    pub q: f64,
    pub eta: f64,
    /// Omitted for a global certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// `standard`, `inexact` or `conditional`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tilt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepsizeConfig {
    /// `constant`, `diminishing` or `dynamic`.
    pub rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Second value of an alternating schedule, used on even iterations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_even: Option<f64>,
    /// Defaults to the optimal value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub x1: Vec<f64>,
    pub max_iter: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_points: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CheckConfig {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            delta: None,
            burn_in: None,
            tolerance: None,
            draws: None,
            steps: None,
            seed: None,
        }
    }
}

impl ExperimentConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub reason: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<FieldError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "invalid configuration ({} error{}):",
            self.0.len(),
            if self.0.len() == 1 { "" } else { "s" }
        )?;
        for e in &self.0 {
            writeln!(f, "  {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

impl ConfigErrors {
    pub fn mentions(&self, needle: &str) -> bool {
        self.0.iter().any(|e| e.to_string().contains(needle))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckSpec {
    H1 {
        tolerance: Option<f64>,
    },
    H3 {
        tolerance: Option<f64>,
    },
    Complexity {
        kind: ComplexityKind,
        delta: f64,
    },
    Envelope {
        envelope: EnvelopeKind,
        burn_in: Option<usize>,
        tolerance: Option<f64>,
    },
    LemmaSweeps {
        draws: usize,
        steps: usize,
        seed: u64,
    },
}

impl CheckSpec {
    pub fn id(&self) -> &'static str {
        match self {
            CheckSpec::H1 { .. } => "h1",
            CheckSpec::H3 { .. } => "h3",
            CheckSpec::Complexity { kind, .. } => kind.id(),
            CheckSpec::Envelope { envelope, .. } => envelope.id(),
            CheckSpec::LemmaSweeps { .. } => "lemma_sweeps",
        }
    }
}

/// A validated configuration with its problem, solver, rule and checks built.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub problem: ProblemInstance,
    pub kind: SolverKind,
    pub rule: StepsizeRule,
    pub checks: Vec<CheckSpec>,
}

struct Collector(Vec<FieldError>);

impl Collector {
    fn push(&mut self, path: impl Into<String>, reason: impl Into<String>) {
        self.0.push(FieldError {
            path: path.into(),
            reason: reason.into(),
        });
    }

    fn need<T: Clone>(&mut self, path: &str, value: &Option<T>, context: &str) -> Option<T> {
        if value.is_none() {
            self.push(path, format!("required for {context}"));
        }
        value.clone()
    }

    fn core<T>(&mut self, path: &str, result: qsub::Result<T>) -> Option<T> {
        match result {
            Ok(v) => Some(v),
            Err(qsub::Error::InvalidParameter { name, reason }) => {
                self.push(path, format!("{name} {reason}"));
                None
            }
            Err(e) => {
                self.push(path, e.to_string());
                None
            }
        }
    }
}

fn build_feasible(c: &FeasibleConfig, errs: &mut Collector) -> Option<FeasibleSet> {
    let path = "problem.feasible";
    let ctx = |s: &str| format!("shape = \"{s}\"");
    match c.shape.as_str() {
        "whole_space" => {
            let dim = errs.need("problem.feasible.dim", &c.dim, &ctx("whole_space"))?;
            errs.core(path, FeasibleSet::whole_space(dim))
        }
        "box" => {
            let lower = errs.need("problem.feasible.lower", &c.lower, &ctx("box"));
            let upper = errs.need("problem.feasible.upper", &c.upper, &ctx("box"));
            errs.core(path, FeasibleSet::boxed(lower?, upper?))
        }
        "ball" => {
            let center = errs.need("problem.feasible.center", &c.center, &ctx("ball"));
            let radius = errs.need("problem.feasible.radius", &c.radius, &ctx("ball"));
            errs.core(path, FeasibleSet::ball(center?, radius?))
        }
        "halfspace" => {
            let normal = errs.need("problem.feasible.normal", &c.normal, &ctx("halfspace"));
            let offset = errs.need("problem.feasible.offset", &c.offset, &ctx("halfspace"));
            errs.core(path, FeasibleSet::halfspace(normal?, offset?))
        }
        other => {
            errs.push(
                "problem.feasible.shape",
                format!("unknown shape `{other}` (expected whole_space, box, ball or halfspace)"),
            );
            None
        }
    }
}

fn build_problem(c: &ProblemConfig, errs: &mut Collector) -> Option<ProblemInstance> {
    let feasible = build_feasible(&c.feasible, errs);
    let ctx = format!("family = \"{}\"", c.family);
    let problem = match c.family.as_str() {
        "power_norm" => {
            let center = errs.need("problem.center", &c.center, &ctx);
            let p = errs.need("problem.p", &c.p, &ctx);
            let modulus = errs.need("problem.modulus", &c.modulus, &ctx);
            let result = ProblemInstance::power_norm(center?, p?, modulus?, feasible?);
            errs.core("problem", result)
        }
        "piecewise_power" => {
            let center = errs.need("problem.center", &c.center, &ctx);
            let p = errs.need("problem.p", &c.p, &ctx);
            let q = errs.need("problem.q", &c.q, &ctx);
            let result = ProblemInstance::piecewise_power(center?, p?, q?, feasible?);
            errs.core("problem", result)
        }
        "linear_fractional" => {
            let numer = errs.need("problem.numer", &c.numer, &ctx);
            let numer_offset = errs.need("problem.numer_offset", &c.numer_offset, &ctx);
            let denom = errs.need("problem.denom", &c.denom, &ctx);
            let denom_offset = errs.need("problem.denom_offset", &c.denom_offset, &ctx);
            let result = ProblemInstance::linear_fractional(
                numer?,
                numer_offset?,
                denom?,
                denom_offset?,
                feasible?,
            );
            errs.core("problem", result)
        }
        other => {
            errs.push(
                "problem.family",
                format!("unknown family `{other}` (expected power_norm, piecewise_power or linear_fractional)"),
            );
            None
        }
    }?;
    let problem = problem.with_name(c.family.clone());
    match &c.sharp {
        None => Some(problem),
        Some(s) => {
            let cert = match s.radius {
                Some(r) => SharpCertificate::new(s.q, s.eta, r),
                None => SharpCertificate::global(s.q, s.eta),
            };
            let cert = errs.core("problem.sharp", cert)?;
            Some(problem.with_sharp(Some(cert)))
        }
    }
}

fn build_kind(c: &SolverConfig, errs: &mut Collector) -> Option<SolverKind> {
    match c.kind.as_str() {
        "standard" => Some(SolverKind::Standard),
        "conditional" => Some(SolverKind::Conditional),
        "inexact" => {
            let eps = errs.need("solver.epsilon", &c.epsilon, "kind = \"inexact\"")?;
            errs.core("solver", SolverKind::inexact(eps, c.tilt.unwrap_or(0.0)))
        }
        other => {
            errs.push(
                "solver.kind",
                format!("unknown solver `{other}` (expected standard, inexact or conditional)"),
            );
            None
        }
    }
}

fn build_rule(
    c: &StepsizeConfig,
    problem: Option<&ProblemInstance>,
    errs: &mut Collector,
) -> Option<StepsizeRule> {
    let ctx = format!("rule = \"{}\"", c.rule);
    match c.rule.as_str() {
        "constant" => {
            let v = errs.need("stepsize.v", &c.v, &ctx)?;
            errs.core("stepsize.v", StepsizeRule::constant(v))
        }
        "diminishing" => {
            let step_c = errs.need("stepsize.c", &c.c, &ctx);
            let s = errs.need("stepsize.s", &c.s, &ctx);
            let (step_c, s) = (step_c?, s?);
            if !(s > 0.0 && s < 1.0) {
                errs.push("stepsize.s", format!("s must lie in (0,1), got {s}"));
                return None;
            }
            errs.core("stepsize.c", StepsizeRule::diminishing(step_c, s))
        }
        "dynamic" => {
            let lambda = errs.need("stepsize.lambda", &c.lambda, &ctx)?;
            let schedule = match c.lambda_even {
                Some(even) => LambdaSchedule::alternating(lambda, even),
                None => LambdaSchedule::constant(lambda),
            };
            let target = match (c.target, problem) {
                (Some(t), _) => t,
                (None, Some(p)) => p.optimal_value(),
                (None, None) => return None,
            };
            errs.core("stepsize.lambda", StepsizeRule::dynamic(schedule, target))
        }
        other => {
            errs.push(
                "stepsize.rule",
                format!("unknown rule `{other}` (expected constant, diminishing or dynamic)"),
            );
            None
        }
    }
}

fn build_check(
    i: usize,
    c: &CheckConfig,
    rule: &str,
    problem: Option<&ProblemInstance>,
    errs: &mut Collector,
) -> Option<CheckSpec> {
    let path = format!("checks[{i}]");
    if let Some(tol) = c.tolerance {
        if !(tol >= 0.0) {
            errs.push(
                format!("{path}.tolerance"),
                format!("must be nonnegative, got {tol}"),
            );
        }
    }
    let complexity = |kind: ComplexityKind, needed: &str, errs: &mut Collector| {
        if rule != needed {
            errs.push(&path, format!("{} requires {needed} rule", kind.id()));
            return None;
        }
        let delta = errs.need(&format!("{path}.delta"), &c.delta, kind.id())?;
        if !(delta > 0.0) {
            errs.push(
                format!("{path}.delta"),
                format!("must be positive, got {delta}"),
            );
            return None;
        }
        Some(CheckSpec::Complexity { kind, delta })
    };
    match c.id.as_str() {
        "h1" => Some(CheckSpec::H1 {
            tolerance: c.tolerance,
        }),
        "h3" => Some(CheckSpec::H3 {
            tolerance: c.tolerance,
        }),
        "k1" => complexity(ComplexityKind::K1, "constant", errs),
        "k2" => complexity(ComplexityKind::K2, "diminishing", errs),
        "k3" => complexity(ComplexityKind::K3, "dynamic", errs),
        "lemma_sweeps" => Some(CheckSpec::LemmaSweeps {
            draws: c.draws.unwrap_or(100),
            steps: c.steps.unwrap_or(10_000),
            seed: c.seed.unwrap_or(0),
        }),
        id => match EnvelopeKind::from_str(id) {
            Ok(envelope) => {
                if envelope.rule_name() != rule {
                    errs.push(
                        &path,
                        format!("{id} requires {} rule", envelope.rule_name()),
                    );
                    return None;
                }
                if problem.is_some_and(|p| p.sharp().is_none()) {
                    errs.push(
                        &path,
                        format!("{id} needs a sharpness certificate; add [problem.sharp]"),
                    );
                    return None;
                }
                if c.burn_in == Some(0) {
                    errs.push(format!("{path}.burn_in"), "must be at least 1");
                    return None;
                }
                Some(CheckSpec::Envelope {
                    envelope,
                    burn_in: c.burn_in,
                    tolerance: c.tolerance,
                })
            }
            Err(_) => {
                errs.push(format!("{path}.id"), format!("unknown check `{id}`"));
                None
            }
        },
    }
}

/// Validate a parsed configuration, reporting every field-level problem.
pub fn validate(config: ExperimentConfig) -> Result<Experiment, ConfigErrors> {
    let mut errs = Collector(Vec::new());
    if config.name.is_empty() || config.name.contains(['/', '\\']) {
        errs.push(
            "name",
            "must be a non-empty file name without path separators",
        );
    }
    let problem = build_problem(&config.problem, &mut errs);
    let kind = build_kind(&config.solver, &mut errs);
    let rule = build_rule(&config.stepsize, problem.as_ref(), &mut errs);
    if let Some(p) = &problem {
        if config.run.x1.len() != p.dim() {
            errs.push(
                "run.x1",
                format!(
                    "has {} coordinates, problem dimension is {}",
                    config.run.x1.len(),
                    p.dim()
                ),
            );
        }
    }
    if config.run.max_iter == 0 {
        errs.push("run.max_iter", "must be at least 1");
    }
    if let Some(g) = config.run.gap_stop {
        if !(g >= 0.0) {
            errs.push("run.gap_stop", format!("must be nonnegative, got {g}"));
        }
    }
    let checks: Vec<Option<CheckSpec>> = config
        .checks
        .iter()
        .enumerate()
        .map(|(i, c)| build_check(i, c, &config.stepsize.rule, problem.as_ref(), &mut errs))
        .collect();
    if !errs.0.is_empty() {
        return Err(ConfigErrors(errs.0));
    }
    Ok(Experiment {
        problem: problem.expect("no errors"),
        kind: kind.expect("no errors"),
        rule: rule.expect("no errors"),
        checks: checks.into_iter().map(|c| c.expect("no errors")).collect(),
        config,
    })
}

/// Parse TOML text into a configuration without semantic validation.
pub fn parse_toml(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    toml::from_str(text).map_err(|e| {
        ConfigErrors(vec![FieldError {
            path: "document".into(),
            reason: e.message().to_string(),
        }])
    })
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<Experiment, ConfigErrors> {
    validate(parse_toml(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "minimal"

[problem]
family = "power_norm"
center = [0.0, 0.0]
p = 1.0
modulus = 1.0
feasible = { shape = "box", lower = [-10.0, -10.0], upper = [10.0, 10.0] }

[solver]
kind = "standard"

[stepsize]
rule = "constant"
v = 0.1

[run]
x1 = [3.0, 4.0]
max_iter = 1000
"#;

    #[test]
    fn minimal_config_parses() {
        let exp = parse_config(MINIMAL).unwrap();
        assert_eq!(exp.rule, StepsizeRule::Constant { v: 0.1 });
        assert_eq!(exp.problem.dim(), 2);
        assert!(exp.checks.is_empty());
    }

    #[test]
    fn out_of_range_exponent_is_reported() {
        let text = MINIMAL.replace(
            "rule = \"constant\"\nv = 0.1",
            "rule = \"diminishing\"\nc = 1.0\ns = 1.5",
        );
        let errs = parse_config(&text).unwrap_err();
        assert!(errs.mentions("s must lie in (0,1)"), "{errs}");
        assert_eq!(errs.0[0].path, "stepsize.s");
    }

    #[test]
    fn incompatible_check_is_reported() {
        let text = format!("{MINIMAL}\n[[checks]]\nid = \"k3\"\ndelta = 0.5\n");
        let errs = parse_config(&text).unwrap_err();
        assert!(errs.mentions("k3 requires dynamic rule"), "{errs}");
    }

    #[test]
    fn every_problem_is_listed() {
        let text = MINIMAL
            .replace("max_iter = 1000", "max_iter = 0\nbogus = 1")
            .replace("family = \"power_norm\"", "family = \"nope\"");
        let errs = parse_config(&text).unwrap_err();
        assert!(errs.mentions("unknown field `bogus`"), "{errs}");
        let text = MINIMAL
            .replace("max_iter = 1000", "max_iter = 0")
            .replace("family = \"power_norm\"", "family = \"nope\"")
            .replace("kind = \"standard\"", "kind = \"inexact\"");
        let errs = parse_config(&text).unwrap_err();
        assert_eq!(errs.0.len(), 3, "{errs}");
        assert!(errs.mentions("problem.family"));
        assert!(errs.mentions("solver.epsilon"));
        assert!(errs.mentions("run.max_iter"));
    }

    #[test]
    fn printed_config_parses_back() {
        let config = parse_toml(MINIMAL).unwrap();
        assert_eq!(parse_toml(&config.to_toml()).unwrap(), config);
    }
}
