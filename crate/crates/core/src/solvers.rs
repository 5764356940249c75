//! Standard, inexact and conditional projected quasi-subgradient iterations.
//!
//! All three share one run loop that records values, distances to the
//! optimal set, stepsizes, step lengths and basic-inequality residuals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::problems::{HolderCertificate, ProblemInstance};
use crate::sets::DEFAULT_TOL;
use crate::stepsizes::{stepsize, FrameworkConstants, StepsizeRule};
use crate::vector::{check_dim, Vector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverKind {
    /// `x_{k+1} = P_X(x_k − v_k g_k)` with `g_k` a unit quasi-subgradient.
    Standard,
    /// As `Standard` with `g_k` a unit ε-quasi-subgradient from the tilted oracle.
    Inexact { epsilon: f64, tilt: f64 },
    /// `x_{k+1} = P_X(x_k − v_k (g_k + µ_k))` with `µ_k` a unit normal of `X`
    /// at boundary points and zero in the interior.
    Conditional,
}

impl SolverKind {
    pub fn inexact(epsilon: f64, tilt: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::param(
                "epsilon",
                format!("must be positive, got {epsilon}"),
            ));
        }
        if !(0.0..=1.0).contains(&tilt) {
            return Err(Error::param(
                "tilt",
                format!("must lie in [0,1], got {tilt}"),
            ));
        }
        Ok(SolverKind::Inexact { epsilon, tilt })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Standard => "standard",
            SolverKind::Inexact { .. } => "inexact",
            SolverKind::Conditional => "conditional",
        }
    }

    pub fn epsilon(&self) -> f64 {
        match *self {
            SolverKind::Inexact { epsilon, .. } => epsilon,
            _ => 0.0,
        }
    }
}

/// Constants of the basic inequality satisfied by each iteration.
///
/// Standard and inexact: `α = 2L^{-1/p}`, `β = 1`, `γ = 1`. Conditional:
/// `α = 2L^{-1/p}`, `β = 4`, `γ = 2`.
pub fn framework_constants(kind: &SolverKind, holder: &HolderCertificate) -> FrameworkConstants {
    let alpha = 2.0 * holder.modulus.powf(-1.0 / holder.order);
    let (beta, gamma) = match kind {
        SolverKind::Conditional => (4.0, 2.0),
        _ => (1.0, 1.0),
    };
    FrameworkConstants::new(alpha, beta, gamma, kind.epsilon(), holder.order)
        .expect("certificate constants are positive")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Initial point; projected onto `X` before the first step.
    pub x1: Vec<f64>,
    pub max_iter: usize,
    /// Stop once `f(x_k) − f* ≤ gap_stop`.
    pub gap_stop: Option<f64>,
    pub record_points: bool,
    pub seed: u64,
    /// Boundary band for the interior test of the conditional iteration.
    pub boundary_tol: f64,
}

impl RunConfig {
    pub fn new(x1: impl Into<Vec<f64>>, max_iter: usize) -> Self {
        Self {
            x1: x1.into(),
            max_iter,
            gap_stop: None,
            record_points: false,
            seed: 0,
            boundary_tol: DEFAULT_TOL,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_gap_stop(mut self, gap: f64) -> Self {
        self.gap_stop = Some(gap);
        self
    }

    pub fn with_points(mut self) -> Self {
        self.record_points = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    pub f_value: f64,
    /// `f(x_k) − f*`
    pub gap: f64,
    /// `dist(x_k, X*)`
    pub dist: f64,
    pub stepsize: f64,
    /// `‖x_{k+1} − x_k‖`
    pub step_length: f64,
    /// `dist²(x_{k+1}) − dist²(x_k) + α v_k (gap − ε)^{1/p} − β v_k²`, NaN when
    /// `gap ≤ ε`.
    pub h1_residual: f64,
    #[serde(skip)]
    pub point: Option<Vector>,
}

impl IterationRecord {
    pub fn dist_sq(&self) -> f64 {
        self.dist * self.dist
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxIter,
    GapStop,
    EnteredOptimalSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    /// Records for `k = 1, 2, …` in order.
    pub records: Vec<IterationRecord>,
    pub problem: String,
    pub kind: SolverKind,
    pub rule: StepsizeRule,
    pub constants: FrameworkConstants,
    pub termination: Termination,
    /// Iterate following the last record (equal to the last recorded iterate
    /// when the run stopped without stepping).
    pub final_point: Vector,
    pub final_dist: f64,
    /// Largest `‖x_k‖` over all iterates, including the final point.
    pub max_iterate_norm: f64,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dist_sq(&self) -> Vec<f64> {
        self.records.iter().map(IterationRecord::dist_sq).collect()
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.gap).collect()
    }

    /// `min_{k ≤ upto} f(x_k) − f*`.
    pub fn min_gap(&self, upto: usize) -> f64 {
        self.records
            .iter()
            .take(upto)
            .map(|r| r.gap)
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance of `x_{k+1}` to the optimal set, for the record at position `i`.
    pub fn next_dist(&self, i: usize) -> f64 {
        self.records.get(i + 1).map_or(self.final_dist, |r| r.dist)
    }
}

/// One iteration from the feasible point `x` with stepsize `v`.
pub fn step<R: Rng + ?Sized>(
    kind: &SolverKind,
    problem: &ProblemInstance,
    x: &Vector,
    v: f64,
    rng: &mut R,
) -> Result<Vector> {
    step_with_tol(kind, problem, x, v, DEFAULT_TOL, rng)
}

fn step_with_tol<R: Rng + ?Sized>(
    kind: &SolverKind,
    problem: &ProblemInstance,
    x: &Vector,
    v: f64,
    tol: f64,
    rng: &mut R,
) -> Result<Vector> {
    check_dim(problem.dim(), x)?;
    if !(v >= 0.0) {
        return Err(Error::param(
            "v",
            format!("stepsize must be nonnegative, got {v}"),
        ));
    }
    let feasible = problem.feasible();
    let distance = feasible.distance(x)?;
    if distance > tol {
        return Err(Error::Infeasible { distance, tol });
    }
    let direction = match *kind {
        SolverKind::Standard => problem.quasi_subgradient(x)?,
        SolverKind::Inexact { epsilon, tilt } => {
            problem.eps_quasi_subgradient(x, epsilon, tilt, rng)?
        }
        SolverKind::Conditional => problem.quasi_subgradient(x)? + feasible.unit_normal(x, tol)?,
    };
    feasible.project(&(x - direction * v))
}

/// Run the iteration from `config.x1` until `max_iter` records, the gap
/// threshold, or (dynamic rule only) a zero stepsize at `f(x_k) ≤ target`.
pub fn run(
    kind: &SolverKind,
    problem: &ProblemInstance,
    rule: &StepsizeRule,
    config: &RunConfig,
) -> Result<IterationTrace> {
    if config.max_iter < 1 {
        return Err(Error::param("max_iter", "must be at least 1"));
    }
    if let Some(g) = config.gap_stop {
        if !(g >= 0.0) {
            return Err(Error::param(
                "gap_stop",
                format!("must be nonnegative, got {g}"),
            ));
        }
    }
    let constants = framework_constants(kind, &problem.holder());
    let f_star = problem.optimal_value();
    let eps = constants.epsilon;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut x = problem
        .feasible()
        .project(&Vector::from_column_slice(&config.x1))?;
    let mut dist = problem.distance_to_optimum(&x)?;
    let mut max_norm = x.norm();
    let mut records = Vec::with_capacity(config.max_iter.min(1 << 20));
    let mut termination = Termination::MaxIter;

    for k in 1..=config.max_iter {
        let f_value = problem.value(&x)?;
        let gap = f_value - f_star;
        let point = config.record_points.then(|| x.clone());
        let idle = || IterationRecord {
            k,
            f_value,
            gap,
            dist,
            stepsize: 0.0,
            step_length: 0.0,
            h1_residual: f64::NAN,
            point: point.clone(),
        };
        if config.gap_stop.is_some_and(|g| gap <= g) {
            records.push(idle());
            termination = Termination::GapStop;
            break;
        }
        let v = stepsize(rule, k, f_value, &constants)?;
        if let StepsizeRule::Dynamic { target, .. } = rule {
            if v == 0.0 && f_value <= *target {
                records.push(idle());
                termination = Termination::EnteredOptimalSet;
                break;
            }
        }
        let next = step_with_tol(kind, problem, &x, v, config.boundary_tol, &mut rng)?;
        let next_dist = problem.distance_to_optimum(&next)?;
        let h1_residual = if gap > eps {
            next_dist * next_dist - dist * dist
                + constants.alpha * v * (gap - eps).powf(1.0 / constants.p)
                - constants.beta * v * v
        } else {
            f64::NAN
        };
        records.push(IterationRecord {
            k,
            f_value,
            gap,
            dist,
            stepsize: v,
            step_length: (&next - &x).norm(),
            h1_residual,
            point,
        });
        x = next;
        dist = next_dist;
        max_norm = max_norm.max(x.norm());
    }

    Ok(IterationTrace {
        records,
        problem: problem.name().to_string(),
        kind: *kind,
        rule: *rule,
        constants,
        termination,
        final_point: x,
        final_dist: dist,
        max_iterate_norm: max_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::FeasibleSet;
    use crate::stepsizes::LambdaSchedule;

    fn line() -> ProblemInstance {
        let set = FeasibleSet::boxed(vec![-10.0], vec![10.0]).unwrap();
        ProblemInstance::power_norm(vec![0.0], 1.0, 1.0, set).unwrap()
    }

    fn square() -> ProblemInstance {
        let set = FeasibleSet::boxed(vec![-10.0; 2], vec![10.0; 2]).unwrap();
        ProblemInstance::power_norm(vec![0.0, 0.0], 1.0, 1.0, set).unwrap()
    }

    fn dynamic(lambda: f64) -> StepsizeRule {
        StepsizeRule::dynamic(LambdaSchedule::constant(lambda), 0.0).unwrap()
    }

    #[test]
    fn framework_constant_examples() {
        let unit = HolderCertificate::new(1.0, 1.0).unwrap();
        let c = framework_constants(&SolverKind::Standard, &unit);
        assert_eq!((c.alpha, c.beta, c.gamma, c.epsilon), (2.0, 1.0, 1.0, 0.0));
        let c = framework_constants(&SolverKind::Conditional, &unit);
        assert_eq!((c.alpha, c.beta, c.gamma, c.epsilon), (2.0, 4.0, 2.0, 0.0));
        let c = framework_constants(&SolverKind::inexact(0.3, 1.0).unwrap(), &unit);
        assert_eq!(c.epsilon, 0.3);
        let c = framework_constants(
            &SolverKind::Standard,
            &HolderCertificate::new(0.5, 4.0).unwrap(),
        );
        assert_eq!(c.alpha, 0.125);
    }

    #[test]
    fn step_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = square();
        let x = Vector::from_column_slice(&[3.0, 4.0]);
        let next = step(&SolverKind::Standard, &p, &x, 1.0, &mut rng).unwrap();
        assert!((next - Vector::from_column_slice(&[2.4, 3.2])).norm() < 1e-15);
        let a = step(&SolverKind::Standard, &p, &x, 0.7, &mut rng).unwrap();
        let b = step(&SolverKind::Conditional, &p, &x, 0.7, &mut rng).unwrap();
        assert_eq!(a, b);
        let outside = Vector::from_column_slice(&[11.0, 0.0]);
        assert!(matches!(
            step(&SolverKind::Standard, &p, &outside, 1.0, &mut rng),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn one_dynamic_step_by_hand() {
        let trace = run(
            &SolverKind::Standard,
            &line(),
            &dynamic(0.5),
            &RunConfig::new(vec![5.0], 2),
        )
        .unwrap();
        assert_eq!(trace.records[0].stepsize, 2.5);
        assert_eq!(trace.records[1].f_value, 2.5);
    }

    #[test]
    fn exact_polyak_step_enters_optimum() {
        let trace = run(
            &SolverKind::Standard,
            &line(),
            &dynamic(1.0),
            &RunConfig::new(vec![5.0], 50),
        )
        .unwrap();
        assert_eq!(trace.termination, Termination::EnteredOptimalSet);
        assert_eq!(trace.len(), 2);
        assert_eq!(trace.records[1].k, 2);
        assert_eq!(trace.records[1].f_value, 0.0);
    }

    #[test]
    fn constant_step_sign_iteration() {
        let rule = StepsizeRule::constant(1.0).unwrap();
        let trace = run(
            &SolverKind::Standard,
            &line(),
            &rule,
            &RunConfig::new(vec![5.0], 10),
        )
        .unwrap();
        let f: Vec<f64> = trace.records.iter().map(|r| r.f_value).collect();
        // 5, 4, …, 1, 0, then x = 0 steps along the basis vector to −1 and back
        assert_eq!(f, vec![5.0, 4.0, 3.0, 2.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(trace.termination, Termination::MaxIter);
    }

    #[test]
    fn dynamic_half_step_halves_distance() {
        let trace = run(
            &SolverKind::Standard,
            &line(),
            &dynamic(0.5),
            &RunConfig::new(vec![5.0], 30),
        )
        .unwrap();
        for w in trace.records.windows(2) {
            assert_eq!(w[1].dist, 0.5 * w[0].dist);
        }
    }

    #[test]
    fn gap_stop_wins_over_max_iter() {
        let config = RunConfig::new(vec![5.0], 3).with_gap_stop(1.25);
        let trace = run(&SolverKind::Standard, &line(), &dynamic(0.5), &config).unwrap();
        assert_eq!(trace.termination, Termination::GapStop);
        assert_eq!(trace.len(), 3);
    }

    #[test]
    fn infeasible_start_is_projected() {
        let config = RunConfig::new(vec![50.0], 1).with_points();
        let trace = run(&SolverKind::Standard, &line(), &dynamic(0.5), &config).unwrap();
        assert_eq!(trace.records[0].point.as_ref().unwrap()[0], 10.0);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let plane = FeasibleSet::whole_space(2).unwrap();
        let p = ProblemInstance::power_norm(vec![0.0, 0.0], 1.0, 1.0, plane).unwrap();
        let kind = SolverKind::inexact(0.2, 1.0).unwrap();
        let rule = StepsizeRule::constant(0.05).unwrap();
        let config = RunConfig::new(vec![3.0, -1.0], 200).with_seed(42);
        let a = run(&kind, &p, &rule, &config).unwrap();
        let b = run(&kind, &p, &rule, &config).unwrap();
        assert_eq!(format!("{:?}", a.records), format!("{:?}", b.records));
        let c = run(&kind, &p, &rule, &config.clone().with_seed(43)).unwrap();
        assert_ne!(format!("{:?}", a.records), format!("{:?}", c.records));
    }
}
