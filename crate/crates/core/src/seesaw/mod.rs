//! Alternating optimisation of states and measurements at fixed dimension,
//! with or without the parity-obliviousness constraint on the states.

mod steps;

use std::f64::consts::SQRT_2;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{self, CMat};
use crate::quantum::{
    self, DensityMatrix, MeasurementFamily, Povm, PreparationFamily, QuantumError,
};
use crate::zmod::{InputSpace, ZmodError};
use crate::Task;

/// Slack allowed on each half-step before ascent counts as violated.
pub const MONOTONE_SLACK: f64 = 1e-10;

/// Slack above the exact qubit optimum at `(2, 3)`.
pub const QUBIT_CEILING_SLACK: f64 = 1e-7;

/// Parity deviation tolerated in a reported constrained strategy.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Iteration cap for the initial parity projection.
pub const DYKSTRA_MAX_ITERS: usize = 10_000;

/// Largest ADMM residual at which a stalled sweep counts as converged.
const ADMM_SETTLED: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum SeesawError {
    #[error(transparent)]
    Zmod(#[from] ZmodError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("unsupported size n = {n}, m = {m}, d = {d}: need n = 2, m in {{3, 5, 7}}, 2 <= d <= 8")]
    Unsupported { n: usize, m: u32, d: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("restart {restart} lost {drop:e} in one half-step")]
    NotMonotone { restart: usize, drop: f64 },
    #[error("restart {restart} reached {value}, above the qubit optimum {ceiling}")]
    QubitCeiling {
        restart: usize,
        value: f64,
        ceiling: f64,
    },
    #[error("reported strategy has parity deviation {0:e}")]
    Infeasible(f64),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SeesawError>;

#[derive(Clone, Debug, PartialEq)]
pub struct SeesawConfig {
    pub n: usize,
    pub m: u32,
    pub d: usize,
    pub task: Task,
    pub parity_constrained: bool,
    pub restarts: usize,
    pub max_iters: usize,
    pub convergence_tol: f64,
    pub projection_tol: f64,
    pub rng_seed: u64,
    /// ADMM iterations per state half-step.
    pub admm_iters: usize,
    pub admm_penalty: f64,
    /// Worker threads for restarts; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
}

impl SeesawConfig {
    /// Defaults for a constrained exclusion run at `(2, m)` in dimension `d`.
    pub fn new(m: u32, d: usize) -> Self {
        Self {
            n: 2,
            m,
            d,
            task: Task::Exclusion,
            parity_constrained: true,
            restarts: 100,
            max_iters: 500,
            convergence_tol: 1e-10,
            projection_tol: 1e-11,
            rng_seed: 0,
            admm_iters: 50,
            admm_penalty: 1.0,
            jobs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != 2 || ![3, 5, 7].contains(&self.m) || !(2..=8).contains(&self.d) {
            return Err(SeesawError::Unsupported {
                n: self.n,
                m: self.m,
                d: self.d,
            });
        }
        if self.restarts == 0 || self.max_iters == 0 || self.admm_iters == 0 {
            return Err(SeesawError::InvalidConfig(
                "restarts, max_iters and admm_iters must be positive".into(),
            ));
        }
        if !(self.convergence_tol > 0.0 && self.projection_tol > 0.0 && self.admm_penalty > 0.0) {
            return Err(SeesawError::InvalidConfig(
                "tolerances and penalty must be positive".into(),
            ));
        }
        if self.jobs == Some(0) {
            return Err(SeesawError::InvalidConfig("jobs must be positive".into()));
        }
        Ok(())
    }

    fn qubit_ceiling(&self) -> Option<f64> {
        (self.parity_constrained && self.task == Task::Exclusion && self.m == 3 && self.d == 2)
            .then(|| 2.0 / 3.0 + 1.0 / (3.0 * SQRT_2))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartTrace {
    pub restart: usize,
    pub final_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every sweep, starting with the initial point.
    pub history: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub config: SeesawConfig,
    pub best_value: f64,
    pub best_restart: usize,
    pub states: PreparationFamily,
    pub measurements: MeasurementFamily,
    pub traces: Vec<RestartTrace>,
    pub parity_deviation: f64,
}

impl SeesawResult {
    pub fn converged_restarts(&self) -> usize {
        self.traces.iter().filter(|t| t.converged).count()
    }

    /// One line per restart: `restart_index,final_value,iterations,converged`.
    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "restart_index,final_value,iterations,converged")?;
        for t in &self.traces {
            writeln!(
                out,
                "{},{:.17e},{},{}",
                t.restart, t.final_value, t.iterations, t.converged
            )?;
        }
        Ok(())
    }
}

struct RestartOutcome {
    trace: RestartTrace,
    states: Vec<CMat>,
    povms: Vec<Vec<CMat>>,
}

fn random_povm<R: Rng + ?Sized>(rng: &mut R, d: usize, outcomes: usize) -> Vec<CMat> {
    let draws: Vec<CMat> = (0..outcomes).map(|_| linalg::random_wishart(rng, d)).collect();
    let mut total = linalg::zeros(d);
    for w in &draws {
        total += w;
    }
    let inv = linalg::psd_inv_sqrt(&total, 1e-300);
    draws
        .iter()
        .map(|w| linalg::hermitian_part(&(&inv * w * &inv)))
        .collect()
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn run_restart(cfg: &SeesawConfig, space: InputSpace, restart: usize) -> Result<RestartOutcome> {
    let mut rng = restart_rng(cfg.rng_seed, restart);
    let raw: Vec<CMat> = (0..space.size())
        .map(|_| linalg::random_pure_state(&mut rng, cfg.d))
        .collect();
    let mut povms: Vec<Vec<CMat>> = (0..cfg.n)
        .map(|_| random_povm(&mut rng, cfg.d, cfg.m as usize))
        .collect();

    let mut projection_ok = true;
    let mut states = if cfg.parity_constrained {
        let (projected, ok) =
            steps::dykstra_parity_projection(space, &raw, cfg.projection_tol, DYKSTRA_MAX_ITERS);
        projection_ok = ok;
        steps::restore_feasibility(space, &projected)
    } else {
        raw
    };
    let mut admm = steps::AdmmState::new(&states, cfg.admm_penalty);

    let mut value = steps::objective(space, &states, &povms, cfg.task);
    let mut history = vec![value];
    let mut converged = false;
    let mut iterations = 0;
    let check = |before: f64, after: f64| -> Result<()> {
        if after < before - MONOTONE_SLACK {
            return Err(SeesawError::NotMonotone {
                restart,
                drop: before - after,
            });
        }
        Ok(())
    };

    while iterations < cfg.max_iters {
        iterations += 1;
        steps::measurement_step(space, &states, &mut povms, cfg.task);
        let after_meas = steps::objective(space, &states, &povms, cfg.task);
        check(value, after_meas)?;

        let costs = steps::state_costs(space, &povms, cfg.task);
        let mut after_states = after_meas;
        let mut settled = true;
        if cfg.parity_constrained {
            admm.iterate(space, &costs, cfg.admm_iters);
            settled = admm.residual < ADMM_SETTLED;
            let candidate = admm.feasible_point(space);
            let v = steps::objective(space, &candidate, &povms, cfg.task);
            if v > after_meas {
                states = candidate;
                after_states = v;
            }
        } else {
            let candidate = steps::pure_state_step(&costs);
            let v = steps::objective(space, &candidate, &povms, cfg.task);
            if v > after_meas {
                states = candidate;
                after_states = v;
            }
        }
        check(after_meas, after_states)?;
        if let Some(ceiling) = cfg.qubit_ceiling() {
            if after_states > ceiling + QUBIT_CEILING_SLACK {
                return Err(SeesawError::QubitCeiling {
                    restart,
                    value: after_states,
                    ceiling,
                });
            }
        }

        let change = (after_states - value).abs();
        value = after_states;
        history.push(value);
        if change < cfg.convergence_tol && settled {
            converged = true;
            break;
        }
    }

    Ok(RestartOutcome {
        trace: RestartTrace {
            restart,
            final_value: value,
            iterations,
            converged: converged && projection_ok,
            history,
        },
        states,
        povms,
    })
}

fn build_strategy(
    space: InputSpace,
    states: &[CMat],
    povms: &[Vec<CMat>],
) -> Result<(PreparationFamily, MeasurementFamily)> {
    let family = PreparationFamily::new(
        space,
        states
            .iter()
            .map(|s| DensityMatrix::new(linalg::hermitian_part(s)))
            .collect::<std::result::Result<Vec<_>, _>>()?,
    )?;
    let meas = MeasurementFamily::new(
        space.n(),
        space.m(),
        povms
            .iter()
            .map(|p| Povm::new(p.clone()))
            .collect::<std::result::Result<Vec<_>, _>>()?,
    )?;
    Ok((family, meas))
}

/// Runs every restart and keeps the best one; ties go to the lowest restart.
pub fn run_seesaw(cfg: &SeesawConfig) -> Result<SeesawResult> {
    cfg.validate()?;
    let space = InputSpace::new(cfg.n, cfg.m)?;
    let work = || -> Vec<Result<RestartOutcome>> {
        (0..cfg.restarts)
            .into_par_iter()
            .map(|r| run_restart(cfg, space, r))
            .collect()
    };
    let outcomes = match cfg.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| SeesawError::ThreadPool(e.to_string()))?
            .install(work),
        None => work(),
    };
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.trace.final_value > outcomes[best].trace.final_value {
            best = i;
        }
    }
    let (states, measurements) =
        build_strategy(space, &outcomes[best].states, &outcomes[best].povms)?;
    let parity_deviation = quantum::parity_deviation(&states)?;
    if cfg.parity_constrained && parity_deviation > FEASIBILITY_TOL {
        return Err(SeesawError::Infeasible(parity_deviation));
    }
    let best_value = quantum::success_probability(&states, &measurements, cfg.task)?;
    Ok(SeesawResult {
        config: cfg.clone(),
        best_value,
        best_restart: best,
        states,
        measurements,
        traces: outcomes.into_iter().map(|o| o.trace).collect(),
        parity_deviation,
    })
}

/// Exactly optimal-per-pair measurement update for fixed states. `start`
/// warm-starts the exchange; without it every POVM starts from the identity
/// on outcome 0 and is split from there.
pub fn optimize_measurements(
    states: &PreparationFamily,
    task: Task,
    start: Option<&MeasurementFamily>,
) -> Result<MeasurementFamily> {
    let space = states.space();
    let d = states.dim();
    let mats: Vec<CMat> = states.states().iter().map(|s| s.matrix().clone()).collect();
    let mut povms: Vec<Vec<CMat>> = match start {
        Some(meas) => meas.povms().iter().map(|p| p.effects().to_vec()).collect(),
        None => (0..space.n())
            .map(|_| {
                let mut e = vec![linalg::zeros(d); space.m() as usize];
                e[0] = linalg::identity(d);
                e
            })
            .collect(),
    };
    steps::measurement_step(space, &mats, &mut povms, task);
    Ok(build_strategy(space, &mats, &povms)?.1)
}

/// State update for fixed measurements. Unconstrained: lowest eigenvectors
/// of each cost operator. Constrained: ADMM to `projection_tol`, then an
/// exact feasibility restoration; never worse than `start` when given.
pub fn optimize_states(
    meas: &MeasurementFamily,
    task: Task,
    parity_constrained: bool,
    start: Option<&PreparationFamily>,
    projection_tol: f64,
) -> Result<PreparationFamily> {
    let space = InputSpace::new(meas.n(), meas.m())?;
    let d = meas.dim();
    let povms: Vec<Vec<CMat>> = meas.povms().iter().map(|p| p.effects().to_vec()).collect();
    let costs = steps::state_costs(space, &povms, task);
    let initial: Vec<CMat> = match start {
        Some(p) => p.states().iter().map(|s| s.matrix().clone()).collect(),
        None => vec![linalg::scaled(&linalg::identity(d), 1.0 / d as f64); space.size()],
    };
    let candidate = if parity_constrained {
        let mut admm = steps::AdmmState::new(&initial, 1.0);
        let mut previous = f64::NEG_INFINITY;
        for _ in 0..DYKSTRA_MAX_ITERS / 50 {
            admm.iterate(space, &costs, 50);
            let v = steps::objective(space, &admm.z, &povms, task);
            if admm.residual < projection_tol && (v - previous).abs() < projection_tol {
                break;
            }
            previous = v;
        }
        admm.feasible_point(space)
    } else {
        steps::pure_state_step(&costs)
    };
    let keep_start = start.is_some()
        && steps::objective(space, &initial, &povms, task)
            >= steps::objective(space, &candidate, &povms, task);
    let best = if keep_start { initial } else { candidate };
    Ok(build_strategy(space, &best, &povms)?.0)
}

#[derive(Clone, Debug)]
pub struct HierarchyScan {
    pub points: Vec<(usize, f64)>,
    /// Whether values strictly increase with `d`. Reported, not enforced:
    /// the see-saw only gives lower bounds.
    pub strictly_increasing: bool,
}

/// One see-saw run per dimension in `dims`, sharing every other setting.
pub fn hierarchy_scan(base: &SeesawConfig, dims: &[usize]) -> Result<HierarchyScan> {
    let mut points = Vec::with_capacity(dims.len());
    for &d in dims {
        let cfg = SeesawConfig { d, ..base.clone() };
        points.push((d, run_seesaw(&cfg)?.best_value));
    }
    let strictly_increasing = points.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(HierarchyScan {
        points,
        strictly_increasing,
    })
}
