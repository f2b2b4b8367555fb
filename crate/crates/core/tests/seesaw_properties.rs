//! Ascent, feasibility, determinism and the qubit ceiling of the see-saw.

use porec::quantum::{self, parity_deviation, success_probability};
use porec::seesaw::{
    hierarchy_scan, run_seesaw, SeesawConfig, FEASIBILITY_TOL, MONOTONE_SLACK,
    QUBIT_CEILING_SLACK,
};
use porec::linalg;
use porec::Task;

fn config(m: u32, d: usize, restarts: usize, seed: u64) -> SeesawConfig {
    let mut cfg = SeesawConfig::new(m, d);
    cfg.restarts = restarts;
    cfg.rng_seed = seed;
    cfg
}

#[test]
fn every_sweep_ascends() {
    for (m, d, task, constrained) in [
        (3, 3, Task::Exclusion, true),
        (5, 2, Task::Exclusion, true),
        (3, 2, Task::Retrieval, true),
        (3, 3, Task::Retrieval, false),
    ] {
        let mut cfg = config(m, d, 4, 17);
        cfg.task = task;
        cfg.parity_constrained = constrained;
        let result = run_seesaw(&cfg).unwrap();
        for t in &result.traces {
            assert!(
                t.history.windows(2).all(|w| w[1] >= w[0] - MONOTONE_SLACK),
                "restart {} of {cfg:?}",
                t.restart
            );
            assert_eq!(*t.history.last().unwrap(), t.final_value);
        }
    }
}

#[test]
fn reported_strategy_is_feasible_and_consistent() {
    for (m, d) in [(3, 2), (3, 4), (5, 3)] {
        let result = run_seesaw(&config(m, d, 3, 5)).unwrap();
        assert!(result.parity_deviation <= FEASIBILITY_TOL);
        assert!(parity_deviation(&result.states).unwrap() <= FEASIBILITY_TOL);
        let v = success_probability(&result.states, &result.measurements, Task::Exclusion).unwrap();
        assert!((v - result.best_value).abs() <= 1e-10);
        let best_trace = &result.traces[result.best_restart];
        assert!((best_trace.final_value - result.best_value).abs() <= 1e-10);
        for povm in result.measurements.povms() {
            let mut sum = linalg::zeros(d);
            for e in povm.effects() {
                assert!(linalg::eigvalsh(e)[0] >= -1e-10);
                sum += e;
            }
            assert!(linalg::max_abs_entry(&(sum - linalg::identity(d))) <= 1e-10);
        }
    }
}

#[test]
fn identical_configs_give_identical_traces() {
    let mut cfg = config(3, 3, 4, 99);
    cfg.jobs = Some(1);
    let a = run_seesaw(&cfg).unwrap();
    cfg.jobs = Some(3);
    let b = run_seesaw(&cfg).unwrap();
    assert_eq!(a.traces, b.traces);
    assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
    let other = run_seesaw(&config(3, 3, 4, 100)).unwrap();
    assert_ne!(a.traces, other.traces);
}

#[test]
fn qubit_runs_stay_under_the_exact_optimum() {
    let ceiling = 2.0 / 3.0 + 1.0 / (3.0 * 2f64.sqrt());
    let result = run_seesaw(&config(3, 2, 20, 3)).unwrap();
    for t in &result.traces {
        assert!(t.history.iter().all(|&v| v <= ceiling + QUBIT_CEILING_SLACK));
    }
    assert!((result.best_value - ceiling).abs() < 1e-7);
}

#[test]
fn unconstrained_retrieval_is_complementary_per_strategy() {
    let mut cfg = config(3, 2, 3, 8);
    cfg.parity_constrained = false;
    cfg.task = Task::Retrieval;
    let r = run_seesaw(&cfg).unwrap();
    let ex = success_probability(&r.states, &r.measurements, Task::Exclusion).unwrap();
    assert!((ex + r.best_value - 1.0).abs() < 1e-14);
}

#[test]
fn small_hierarchy_scan() {
    let scan = hierarchy_scan(&config(3, 2, 10, 7), &[2, 3]).unwrap();
    assert_eq!(scan.points.len(), 2);
    assert!(scan.strictly_increasing);
    let (_, meas) = quantum::optimal_qubit_construction();
    assert_eq!(meas.dim(), 2);
}
