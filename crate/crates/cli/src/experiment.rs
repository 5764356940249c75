//! Executing validated experiments and evaluating their checks.

use std::path::{Path, PathBuf};

use qsub::analysis::{
    diminishing_recursion_exponent, diminishing_recursion_sweep, fit_power_at,
    power_recursion_sweep, EnvelopeStatus,
};
use qsub::prelude::*;
use qsub::vector::Vector;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{parse_toml, validate, CheckSpec, Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::output::{write_json, write_trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inapplicable,
    Aborted,
}

impl Status {
    fn from_holds(holds: bool) -> Self {
        if holds {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_failure(self) -> bool {
        matches!(self, Status::Fail | Status::Aborted)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckVerdict {
    pub id: String,
    pub status: Status,
    /// `null` when the check is inapplicable or aborted.
    pub holds: Option<bool>,
    pub params: Value,
    pub details: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub iterations: usize,
    pub termination: Termination,
    pub final_gap: f64,
    pub min_gap: f64,
    pub final_dist: f64,
    pub max_iterate_norm: f64,
    pub constants: FrameworkConstants,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub run: RunSummary,
    pub checks: Vec<CheckVerdict>,
    /// `pass` when no check failed or aborted.
    pub summary: &'static str,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary == "pass"
    }
}

fn verdict(id: &str, status: Status, params: Value, details: Value) -> CheckVerdict {
    let holds = match status {
        Status::Pass => Some(true),
        Status::Fail => Some(false),
        Status::Inapplicable | Status::Aborted => None,
    };
    CheckVerdict {
        id: id.to_string(),
        status,
        holds,
        params,
        details,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn evaluate(
    check: &CheckSpec,
    exp: &Experiment,
    trace: &IterationTrace,
) -> qsub::Result<CheckVerdict> {
    let id = check.id();
    Ok(match *check {
        CheckSpec::H1 { tolerance } | CheckSpec::H3 { tolerance } => {
            let mut c = if matches!(check, CheckSpec::H1 { .. }) {
                check_h1(trace, &trace.constants)
            } else {
                check_h3(trace, &trace.constants)
            };
            if let Some(tol) = tolerance {
                c = c.with_tolerance(tol);
            }
            verdict(
                id,
                Status::from_holds(c.holds),
                json!({ "tolerance": c.tolerance }),
                to_value(&c),
            )
        }
        CheckSpec::Complexity { kind, delta } => {
            let x1 = Vector::from_vec(exp.config.run.x1.clone());
            let budget = complexity_budget(
                kind,
                &exp.problem,
                &trace.rule,
                &trace.constants,
                &x1,
                delta,
            )?;
            let params = json!({ "delta": delta });
            match check_complexity(trace, &budget) {
                Ok(done) => verdict(
                    id,
                    Status::from_holds(done.holds == Some(true)),
                    params,
                    to_value(&done),
                ),
                Err(e @ qsub::Error::TraceTooShort { .. }) => {
                    let mut details = to_value(&budget);
                    details["error"] = Value::String(e.to_string());
                    verdict(id, Status::Fail, params, details)
                }
                Err(e) => return Err(e),
            }
        }
        CheckSpec::Envelope {
            envelope,
            burn_in,
            tolerance,
        } => {
            let mut params = EnvelopeParams::for_trace(&exp.problem, trace).ok_or_else(|| {
                qsub::Error::Mismatch(format!("{id} needs a sharpness certificate"))
            })?;
            if let Some(n) = burn_in {
                params = params.with_burn_in(n);
            }
            if let Some(tol) = tolerance {
                params = params.with_tolerance(tol);
            }
            let report = envelope_check(trace, envelope, &params)?;
            let status = match report.status {
                EnvelopeStatus::Holds => Status::Pass,
                EnvelopeStatus::Fails => Status::Fail,
                EnvelopeStatus::Inapplicable => Status::Inapplicable,
                EnvelopeStatus::Aborted => Status::Aborted,
            };
            verdict(id, status, to_value(&params), to_value(&report))
        }
        CheckSpec::LemmaSweeps { draws, steps, seed } => {
            let power = power_recursion_sweep(draws, steps, seed);
            let diminishing = diminishing_recursion_sweep(draws, steps, seed.wrapping_add(1));
            let exponent = diminishing_recursion_exponent(0.5, 1.0, 0.5, 1.0, steps.max(1000))?;
            let fitted = exponent.fit.exponent().unwrap_or(f64::NAN);
            let exponent_ok =
                (fitted - exponent.expected_exponent).abs() <= 0.05 * exponent.expected_exponent;
            let holds = power.holds() && diminishing.closed_form.holds() && exponent_ok;
            verdict(
                id,
                Status::from_holds(holds),
                json!({ "draws": draws, "steps": steps, "seed": seed }),
                json!({
                    "power_recursion": power,
                    "diminishing_closed_form": diminishing.closed_form,
                    "diminishing_integral_form": diminishing.integral_form,
                    "decay_exponent": exponent,
                    "decay_exponent_within_5pct": exponent_ok,
                }),
            )
        }
    })
}

/// Run the solver and evaluate every check, without touching the filesystem.
pub fn execute(exp: &Experiment, seed: Option<u64>) -> Result<(IterationTrace, Report), CliError> {
    let section = &exp.config.run;
    let seed = seed.or(section.seed).unwrap_or(0);
    let mut run_config = RunConfig::new(section.x1.clone(), section.max_iter).with_seed(seed);
    if let Some(g) = section.gap_stop {
        run_config = run_config.with_gap_stop(g);
    }
    if section.record_points == Some(true) {
        run_config = run_config.with_points();
    }
    let trace = run(&exp.kind, &exp.problem, &exp.rule, &run_config)?;
    let checks = exp
        .checks
        .iter()
        .map(|c| evaluate(c, exp, &trace))
        .collect::<qsub::Result<Vec<_>>>()?;
    let failed = checks.iter().any(|c| c.status.is_failure());
    let last = trace
        .records
        .last()
        .expect("runs record at least one iteration");
    let report = Report {
        experiment: exp.config.name.clone(),
        seed,
        config: exp.config.clone(),
        run: RunSummary {
            iterations: trace.len(),
            termination: trace.termination,
            final_gap: last.gap,
            min_gap: trace.min_gap(trace.len()),
            final_dist: trace.final_dist,
            max_iterate_norm: trace.max_iterate_norm,
            constants: trace.constants,
        },
        checks,
        summary: if failed { "fail" } else { "pass" },
    };
    Ok((trace, report))
}

pub fn trace_path(out_dir: &Path, name: &str) -> PathBuf {
    out_dir.join(format!("{name}.trace.csv"))
}

pub fn report_path(out_dir: &Path, name: &str) -> PathBuf {
    out_dir.join(format!("{name}.report.json"))
}

fn require_dir(out_dir: &Path) -> Result<(), CliError> {
    if out_dir.is_dir() {
        Ok(())
    } else {
        Err(CliError::MissingOutDir(out_dir.to_path_buf()))
    }
}

/// Run an experiment and write `<out>/<name>.trace.csv` and
/// `<out>/<name>.report.json`.
pub fn run_experiment(
    exp: &Experiment,
    out_dir: &Path,
    seed: Option<u64>,
) -> Result<Report, CliError> {
    require_dir(out_dir)?;
    let (trace, report) = execute(exp, seed)?;
    write_trace(&trace, &trace_path(out_dir, &report.experiment))?;
    write_json(&report, &report_path(out_dir, &report.experiment))?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepMember {
    pub value: String,
    pub experiment: String,
    pub summary: &'static str,
    pub iterations: usize,
    pub min_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub experiment: String,
    pub param: String,
    pub members: Vec<SweepMember>,
    /// Power fit of the best gap against the swept value, when every value is
    /// a positive number.
    pub min_gap_fit: Option<RateFit>,
    pub summary: &'static str,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.summary == "pass"
    }
}

fn literal(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    toml::from_str::<toml::Table>(&doc)
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(table: &mut toml::Table, param: &str, raw: &str) -> Result<(), String> {
    let mut parts: Vec<&str> = param.split('.').collect();
    let leaf = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or("empty parameter path")?;
    let mut cursor = table;
    for part in parts {
        cursor = cursor
            .entry(part)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| format!("`{part}` in `{param}` is not a table"))?;
    }
    let mut value = literal(raw);
    if let (Some(toml::Value::Float(_)), toml::Value::Integer(i)) = (cursor.get(leaf), &value) {
        value = toml::Value::Float(*i as f64);
    }
    cursor.insert(leaf.to_string(), value);
    Ok(())
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Build one validated experiment per value of `param`, a dotted key such
/// as `stepsize.v` or `run.max_iter`.
pub fn sweep_members(
    text: &str,
    param: &str,
    values: &[String],
) -> Result<Vec<(String, Experiment)>, CliError> {
    let base = parse_toml(text)?;
    let table: toml::Table =
        toml::from_str(text).map_err(|e| CliError::Sweep(e.message().to_string()))?;
    values
        .iter()
        .map(|raw| {
            let mut t = table.clone();
            set_path(&mut t, param, raw.trim()).map_err(CliError::Sweep)?;
            let name = format!(
                "{}_{}",
                base.name,
                file_safe(&format!("{param}={}", raw.trim()))
            );
            t.insert("name".into(), toml::Value::String(name));
            let config: ExperimentConfig =
                toml::from_str(&toml::to_string(&t).expect("table serializes"))
                    .map_err(|e| CliError::Sweep(format!("{param} = {raw}: {}", e.message())))?;
            Ok((raw.trim().to_string(), validate(config)?))
        })
        .collect()
}

/// Run a one-parameter sweep concurrently and write each member's files plus
/// `<out>/<name>.sweep.json`.
pub fn run_sweep(
    text: &str,
    param: &str,
    values: &[String],
    out_dir: &Path,
    seed: Option<u64>,
) -> Result<SweepReport, CliError> {
    require_dir(out_dir)?;
    let members = sweep_members(text, param, values)?;
    let reports: Vec<Report> = members
        .par_iter()
        .map(|(_, exp)| run_experiment(exp, out_dir, seed))
        .collect::<Result<_, _>>()?;
    let members: Vec<SweepMember> = members
        .iter()
        .zip(&reports)
        .map(|((value, _), r)| SweepMember {
            value: value.clone(),
            experiment: r.experiment.clone(),
            summary: r.summary,
            iterations: r.run.iterations,
            min_gap: r.run.min_gap,
        })
        .collect();
    let xs: Option<Vec<f64>> = members
        .iter()
        .map(|m| m.value.parse::<f64>().ok())
        .collect();
    let min_gap_fit = xs.and_then(|xs| {
        let gaps: Vec<f64> = members.iter().map(|m| m.min_gap).collect();
        fit_power_at(&xs, &gaps).ok()
    });
    let name = parse_toml(text)?.name;
    let report = SweepReport {
        experiment: name.clone(),
        param: param.to_string(),
        summary: if reports.iter().all(Report::passed) {
            "pass"
        } else {
            "fail"
        },
        members,
        min_gap_fit,
    };
    write_json(&report, &out_dir.join(format!("{name}.sweep.json")))?;
    Ok(report)
}
