//! The two half-steps of the see-saw and the parity-feasibility machinery.
//!
//! Objectives are written as minimisation of `Σ Tr(ρ C)` for a cost
//! operator `C`: hits for exclusion, minus hits for retrieval.

use crate::linalg::{self, CMat};
use crate::zmod::{self, InputSpace};
use crate::Task;

/// Sign that turns "hits" into a cost to be minimised.
pub(crate) fn cost_sign(task: Task) -> f64 {
    match task {
        Task::Exclusion => 1.0,
        Task::Retrieval => -1.0,
    }
}

/// `Σ_x Σ_y Tr(ρ_x M_{x_y|y}) / (n m^n)`.
pub(crate) fn hit_rate(space: InputSpace, states: &[CMat], povms: &[Vec<CMat>]) -> f64 {
    let mut total = 0.0;
    for (x, rho) in states.iter().enumerate() {
        for (y, povm) in povms.iter().enumerate() {
            total += linalg::trace_product(rho, &povm[space.digit(x, y) as usize]).re;
        }
    }
    total / (space.n() * space.size()) as f64
}

pub(crate) fn objective(space: InputSpace, states: &[CMat], povms: &[Vec<CMat>], task: Task) -> f64 {
    let h = hit_rate(space, states, povms);
    match task {
        Task::Exclusion => 1.0 - h,
        Task::Retrieval => h,
    }
}

/// Cost operators `C_{b|y} = ±Σ_{x: x_y = b} ρ_x` for one question.
fn outcome_costs(space: InputSpace, states: &[CMat], y: usize, sign: f64) -> Vec<CMat> {
    let d = states[0].nrows();
    let mut costs = vec![linalg::zeros(d); space.m() as usize];
    for (x, rho) in states.iter().enumerate() {
        costs[space.digit(x, y) as usize] += rho;
    }
    costs.iter().map(|c| linalg::scaled(c, sign)).collect()
}

fn pair_cost(e: &CMat, c: &CMat) -> f64 {
    linalg::trace_product(e, c).re
}

/// Improves one POVM against fixed costs by pairwise Helstrom exchanges:
/// the combined effect `T = E_b + E_c` of every outcome pair is re-split
/// optimally as `√T P √T`, with `P` the projector onto the positive part of
/// `√T (C_c − C_b) √T`. Exchanges are only accepted when they lower the cost.
pub(crate) fn refine_povm(effects: &mut [CMat], costs: &[CMat], max_sweeps: usize) {
    let m = effects.len();
    for _ in 0..max_sweeps {
        let mut gained = 0.0;
        for b in 0..m {
            for c in b + 1..m {
                let total = &effects[b] + &effects[c];
                if linalg::max_abs_entry(&total) == 0.0 {
                    continue;
                }
                let s = linalg::psd_sqrt(&total);
                let diff = &s * (&costs[c] - &costs[b]) * &s;
                let p = linalg::positive_projector(&diff);
                let new_b = linalg::hermitian_part(&(&s * p * &s));
                let new_c = &total - &new_b;
                let old = pair_cost(&effects[b], &costs[b]) + pair_cost(&effects[c], &costs[c]);
                let new = pair_cost(&new_b, &costs[b]) + pair_cost(&new_c, &costs[c]);
                if new < old - 1e-15 {
                    gained += old - new;
                    effects[b] = new_b;
                    effects[c] = new_c;
                }
            }
        }
        if gained < 1e-14 {
            return;
        }
    }
}

/// Measurement half-step: refines every POVM against the current states.
pub(crate) fn measurement_step(
    space: InputSpace,
    states: &[CMat],
    povms: &mut [Vec<CMat>],
    task: Task,
) {
    let sign = cost_sign(task);
    for (y, povm) in povms.iter_mut().enumerate() {
        let costs = outcome_costs(space, states, y, sign);
        refine_povm(povm, &costs, 200);
    }
}

/// Per-state cost operators `G_x = ±Σ_y M_{x_y|y}`.
pub(crate) fn state_costs(space: InputSpace, povms: &[Vec<CMat>], task: Task) -> Vec<CMat> {
    let sign = cost_sign(task);
    (0..space.size())
        .map(|x| {
            let mut g = linalg::zeros(povms[0][0].nrows());
            for (y, povm) in povms.iter().enumerate() {
                g += &povm[space.digit(x, y) as usize];
            }
            linalg::scaled(&g, sign)
        })
        .collect()
}

/// Unconstrained state step: each state becomes the projector onto a lowest
/// eigenvector of its cost operator.
pub(crate) fn pure_state_step(costs: &[CMat]) -> Vec<CMat> {
    costs
        .iter()
        .map(|g| {
            let (_, vectors) = linalg::eigh(g);
            linalg::outer(&vectors.column(0).into_owned())
        })
        .collect()
}

/// Euclidean projection onto additive families (`c + Σ_i g_i(x_i)`), which
/// for prime `m` is the parity-oblivious affine subspace.
pub(crate) fn project_additive(space: InputSpace, states: &[CMat]) -> Vec<CMat> {
    let d = states[0].nrows();
    let width = d * d;
    let mut flat: Vec<_> = states.iter().flat_map(|s| s.iter().copied()).collect();
    zmod::project_additive(space, &mut flat, width);
    flat.chunks(width)
        .map(|c| CMat::from_column_slice(d, d, c))
        .collect()
}

fn project_states(states: &[CMat]) -> Vec<CMat> {
    states.iter().map(linalg::project_density).collect()
}

fn max_distance(a: &[CMat], b: &[CMat]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| linalg::max_abs_entry(&(p - q)))
        .fold(0.0, f64::max)
}

/// Turns an additive Hermitian family into a valid one by mixing every
/// state with `I/d` by the smallest common weight that clears all negative
/// eigenvalues. Mixing keeps the family additive, unlike eigenvalue clipping.
pub(crate) fn restore_feasibility(space: InputSpace, states: &[CMat]) -> Vec<CMat> {
    let d = states[0].nrows();
    let additive: Vec<CMat> = project_additive(space, states)
        .iter()
        .map(linalg::hermitian_part)
        .collect();
    let lowest = additive
        .iter()
        .map(|s| linalg::eigvalsh(s)[0])
        .fold(f64::INFINITY, f64::min);
    if lowest >= 0.0 {
        return additive;
    }
    let inv_d = 1.0 / d as f64;
    let t = -lowest / (inv_d - lowest);
    let mixed = linalg::scaled(&linalg::identity(d), t * inv_d);
    additive
        .iter()
        .map(|s| linalg::scaled(s, 1.0 - t) + &mixed)
        .collect()
}

/// Dykstra's alternating projections between the product of density-matrix
/// sets and the additive subspace, started from `states`. Returns the limit
/// point and whether successive iterates settled below `tol`.
pub(crate) fn dykstra_parity_projection(
    space: InputSpace,
    states: &[CMat],
    tol: f64,
    max_iters: usize,
) -> (Vec<CMat>, bool) {
    let d = states[0].nrows();
    let zero = vec![linalg::zeros(d); states.len()];
    let mut x = states.to_vec();
    let mut p = zero.clone();
    let mut q = zero;
    for _ in 0..max_iters {
        let shifted: Vec<CMat> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
        let y = project_states(&shifted);
        p = shifted.iter().zip(&y).map(|(a, b)| a - b).collect();
        let shifted: Vec<CMat> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
        let next = project_additive(space, &shifted);
        q = shifted.iter().zip(&next).map(|(a, b)| a - b).collect();
        let moved = max_distance(&next, &x);
        let gap = max_distance(&next, &y);
        x = next;
        if moved < tol && gap < tol.sqrt() {
            return (x, true);
        }
    }
    (x, false)
}

/// ADMM on `min Σ_x Tr(ρ_x G_x)` over density matrices in the additive
/// subspace, with split variables `r` (density side) and `z` (affine side)
/// and scaled dual `u`. The pair `(z, u)` is kept across calls as a warm start.
#[derive(Clone, Debug)]
pub(crate) struct AdmmState {
    pub z: Vec<CMat>,
    pub u: Vec<CMat>,
    pub penalty: f64,
    /// Largest entry of `r − z` after the last iteration.
    pub residual: f64,
}

impl AdmmState {
    pub fn new(start: &[CMat], penalty: f64) -> Self {
        let d = start[0].nrows();
        Self {
            z: start.to_vec(),
            u: vec![linalg::zeros(d); start.len()],
            penalty,
            residual: f64::INFINITY,
        }
    }

    pub fn iterate(&mut self, space: InputSpace, costs: &[CMat], iters: usize) {
        let step = 1.0 / self.penalty;
        for _ in 0..iters {
            let r: Vec<CMat> = self
                .z
                .iter()
                .zip(&self.u)
                .zip(costs)
                .map(|((z, u), g)| linalg::project_density(&(z - u - linalg::scaled(g, step))))
                .collect();
            let shifted: Vec<CMat> = r.iter().zip(&self.u).map(|(a, b)| a + b).collect();
            self.z = project_additive(space, &shifted);
            let mut residual: f64 = 0.0;
            for ((u, r), z) in self.u.iter_mut().zip(&r).zip(&self.z) {
                let diff = r - z;
                residual = residual.max(linalg::max_abs_entry(&diff));
                *u += diff;
            }
            self.residual = residual;
        }
    }

    /// Exactly feasible family closest in spirit to the current iterate.
    pub fn feasible_point(&self, space: InputSpace) -> Vec<CMat> {
        restore_feasibility(space, &self.z)
    }
}
