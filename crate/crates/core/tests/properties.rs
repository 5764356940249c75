use proptest::prelude::*;
use qsub::prelude::*;
use qsub::problems::catalog;
use qsub::vector::Vector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-8.0..8.0f64, dim)
}

fn problem_index() -> impl Strategy<Value = usize> {
    0..catalog().len()
}

/// A catalog problem with a feasible point derived from raw coordinates.
fn feasible_point(problem: &ProblemInstance, raw: &[f64]) -> Vector {
    let x = Vector::from_iterator(problem.dim(), raw.iter().copied().take(problem.dim()));
    problem.feasible().project(&x).unwrap()
}

fn sets() -> Vec<FeasibleSet> {
    vec![
        FeasibleSet::boxed(vec![-1.0, 0.0, 2.0], vec![1.0, 3.0, 2.5]).unwrap(),
        FeasibleSet::ball(vec![1.0, -2.0, 0.5], 2.5).unwrap(),
        FeasibleSet::halfspace(vec![1.0, -1.0, 2.0], 0.7).unwrap(),
        FeasibleSet::whole_space(3).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objectives_are_quasi_convex(i in problem_index(), a in coords(3), b in coords(3), t in 0.0..=1.0f64) {
        let problem = &catalog()[i];
        let x = feasible_point(problem, &a);
        let y = feasible_point(problem, &b);
        let z = &x * (1.0 - t) + &y * t;
        let fz = problem.value(&z).unwrap();
        let fmax = problem.value(&x).unwrap().max(problem.value(&y).unwrap());
        prop_assert!(fz <= fmax + 1e-10);
    }

    #[test]
    fn oracles_return_unit_vectors(i in problem_index(), a in coords(3), eps in 0.001..2.0f64, tilt in 0.0..=1.0f64, seed in any::<u64>()) {
        let problem = &catalog()[i];
        let x = feasible_point(problem, &a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = problem.quasi_subgradient(&x).unwrap();
        prop_assert!((g.norm() - 1.0).abs() <= 1e-12);
        let g = problem.eps_quasi_subgradient(&x, eps, tilt, &mut rng).unwrap();
        prop_assert!((g.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn inner_product_lower_bound_holds(i in problem_index(), a in coords(3), frac in 0.01..0.99f64, seed in any::<u64>()) {
        let problem = &catalog()[i];
        let x = feasible_point(problem, &a);
        let gap = problem.value(&x).unwrap() - problem.optimal_value();
        prop_assume!(gap > 1e-6);
        let eps = gap * frac;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = problem.eps_quasi_subgradient(&x, eps, 1.0, &mut rng).unwrap();
        let x_star = problem.optimal_set().project(&x).unwrap();
        let lower = problem.inner_product_lower_bound(&x, eps).unwrap().unwrap();
        prop_assert!(g.dot(&(&x - &x_star)) >= lower - TOL);
    }

    #[test]
    fn projection_is_nonexpansive_and_idempotent(a in coords(3), b in coords(3)) {
        let x = Vector::from_vec(a);
        let y = Vector::from_vec(b);
        for set in sets() {
            let px = set.project(&x).unwrap();
            let py = set.project(&y).unwrap();
            prop_assert!(set.contains(&px, TOL).unwrap());
            prop_assert!((&px - &py).norm() <= (&x - &y).norm() + 1e-12);
            prop_assert!((set.project(&px).unwrap() - &px).norm() <= 1e-12);
            prop_assert!((set.distance(&x).unwrap() - (&x - &px).norm()).abs() <= 1e-12);
        }
    }

    #[test]
    fn iterates_stay_feasible_and_steps_are_bounded(i in problem_index(), a in coords(3), v in 0.01..1.0f64, seed in any::<u64>()) {
        let problem = &catalog()[i];
        let x1 = &a[..problem.dim()];
        let rule = StepsizeRule::constant(v).unwrap();
        for kind in [SolverKind::Standard, SolverKind::inexact(0.1, 1.0).unwrap(), SolverKind::Conditional] {
            let config = RunConfig::new(x1.to_vec(), 200).with_seed(seed).with_points();
            let trace = run(&kind, problem, &rule, &config).unwrap();
            for r in &trace.records {
                prop_assert!(problem.feasible().contains(r.point.as_ref().unwrap(), TOL).unwrap());
            }
            prop_assert!(check_h3(&trace, &trace.constants).holds);
            prop_assert!(check_h1(&trace, &trace.constants).holds);
        }
    }

    #[test]
    fn seeded_runs_are_reproducible(i in problem_index(), a in coords(3), seed in any::<u64>()) {
        let problem = &catalog()[i];
        let kind = SolverKind::inexact(0.05, 0.7).unwrap();
        let rule = StepsizeRule::diminishing(0.5, 0.6).unwrap();
        let config = RunConfig::new(a[..problem.dim()].to_vec(), 100).with_seed(seed);
        let first = run(&kind, problem, &rule, &config).unwrap();
        let second = run(&kind, problem, &rule, &config).unwrap();
        prop_assert_eq!(format!("{first:?}"), format!("{second:?}"));
    }

    #[test]
    fn constant_rule_reaches_its_value_bound(i in problem_index(), a in coords(3), v in 0.05..0.5f64) {
        let problem = &catalog()[i];
        let budget = 2000;
        let x1 = &a[..problem.dim()];
        let trace = run(&SolverKind::Standard, problem, &StepsizeRule::constant(v).unwrap(), &RunConfig::new(x1.to_vec(), budget)).unwrap();
        let start = problem.feasible().project(&Vector::from_row_slice(x1)).unwrap();
        let d2 = problem.distance_to_optimum(&start).unwrap().powi(2);
        let bound = qsub::analysis::constant_rule_gap_bound(&trace.constants, v, d2, budget);
        prop_assert!(trace.min_gap(budget) <= bound + TOL);
    }

    #[test]
    fn dynamic_rule_never_increases_distance(i in problem_index(), a in coords(3), lambda in 0.05..1.95f64) {
        let problem = &catalog()[i];
        let rule = StepsizeRule::dynamic(LambdaSchedule::constant(lambda), problem.optimal_value()).unwrap();
        let trace = run(&SolverKind::Standard, problem, &rule, &RunConfig::new(a[..problem.dim()].to_vec(), 300)).unwrap();
        for (i, r) in trace.records.iter().enumerate() {
            if r.gap > 0.0 {
                prop_assert!(trace.next_dist(i).powi(2) <= r.dist_sq() + TOL);
            }
        }
    }
}

#[test]
fn diminishing_rule_drives_gap_below_threshold() {
    for problem in catalog() {
        let x1 = vec![3.0; problem.dim()];
        let rule = StepsizeRule::diminishing(1.0, 0.5).unwrap();
        let trace = run(
            &SolverKind::Standard,
            &problem,
            &rule,
            &RunConfig::new(x1, 20_000),
        )
        .unwrap();
        assert!(
            trace.min_gap(20_000) < 0.05,
            "{}: {}",
            problem.name(),
            trace.min_gap(20_000)
        );
    }
}
