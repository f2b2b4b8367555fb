//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Problems are in equality form: maximize `c·x` subject to `A x = b`,
//! `x ≥ 0`. Bland's rule (lowest-index entering column, lowest-index basic
//! variable among tied ratios) rules out cycling, so termination does not
//! depend on degeneracy, which is pervasive in the parity-constrained LPs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Q, x: Vec<Q> },
    Infeasible,
    Unbounded,
}

/// A feasible basis for `A x = b, x ≥ 0`, reusable across objectives.
#[derive(Clone, Debug)]
pub struct FeasibleTableau {
    num_vars: usize,
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
}

impl FeasibleTableau {
    /// Runs phase one. Returns `None` when the constraints are infeasible.
    /// Redundant equality rows are dropped.
    pub fn new(a: &[Vec<Q>], b: &[Q], num_vars: usize) -> Option<Self> {
        let num_rows = a.len();
        let width = num_vars + num_rows + 1;
        let rhs = width - 1;
        let mut rows: Vec<Vec<Q>> = Vec::with_capacity(num_rows);
        for (i, (row, bi)) in a.iter().zip(b).enumerate() {
            let flip = bi.is_negative();
            let mut t = vec![Q::zero(); width];
            for (j, v) in row.iter().enumerate() {
                t[j] = if flip { -v.clone() } else { v.clone() };
            }
            t[num_vars + i] = Q::one();
            t[rhs] = if flip { -bi.clone() } else { bi.clone() };
            rows.push(t);
        }
        let mut basis: Vec<usize> = (num_vars..num_vars + num_rows).collect();

        let mut cost = vec![Q::zero(); width];
        for c in cost.iter_mut().skip(num_vars).take(num_rows) {
            *c = -Q::one();
        }
        let mut z = reduced_costs(&cost, &rows, &basis);
        if !run_phase(&mut rows, &mut basis, &mut z, width - 1) {
            unreachable!("phase one objective is bounded above by zero");
        }
        // z[rhs] holds minus the objective, i.e. the total artificial mass.
        if !z[rhs].is_zero() {
            return None;
        }

        // Drive zero-level artificials out of the basis; drop rows that can't be.
        let mut r = 0;
        while r < rows.len() {
            if basis[r] >= num_vars {
                if let Some(col) = (0..num_vars).find(|&j| !rows[r][j].is_zero()) {
                    pivot(&mut rows, &mut basis, None, r, col);
                } else {
                    rows.remove(r);
                    basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }
        for row in &mut rows {
            let last = row[rhs].clone();
            row.truncate(num_vars);
            row.push(last);
        }
        Some(Self {
            num_vars,
            rows,
            basis,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Phase two for objective `c`, starting from this feasible basis.
    pub fn maximize(&self, c: &[Q]) -> LpOutcome {
        let mut rows = self.rows.clone();
        let mut basis = self.basis.clone();
        let mut cost = c.to_vec();
        cost.push(Q::zero());
        let mut z = reduced_costs(&cost, &rows, &basis);
        if !run_phase(&mut rows, &mut basis, &mut z, self.num_vars) {
            return LpOutcome::Unbounded;
        }
        let rhs = self.num_vars;
        let mut x = vec![Q::zero(); self.num_vars];
        for (row, &var) in rows.iter().zip(&basis) {
            x[var] = row[rhs].clone();
        }
        LpOutcome::Optimal {
            value: -z[rhs].clone(),
            x,
        }
    }
}

/// Solves `max c·x, A x = b, x ≥ 0` from scratch.
pub fn solve(c: &[Q], a: &[Vec<Q>], b: &[Q]) -> LpOutcome {
    match FeasibleTableau::new(a, b, c.len()) {
        Some(t) => t.maximize(c),
        None => LpOutcome::Infeasible,
    }
}

fn reduced_costs(cost: &[Q], rows: &[Vec<Q>], basis: &[usize]) -> Vec<Q> {
    let mut z = cost.to_vec();
    for (row, &var) in rows.iter().zip(basis) {
        let cb = &cost[var];
        if cb.is_zero() {
            continue;
        }
        for (zj, t) in z.iter_mut().zip(row) {
            if !t.is_zero() {
                *zj -= cb * t;
            }
        }
    }
    z
}

// Iterates to optimality over the first `cols` columns; false if unbounded.
fn run_phase(rows: &mut [Vec<Q>], basis: &mut [usize], z: &mut Vec<Q>, cols: usize) -> bool {
    let rhs = z.len() - 1;
    loop {
        let Some(enter) = (0..cols).find(|&j| z[j].is_positive()) else {
            return true;
        };
        let mut leave: Option<(usize, Q)> = None;
        for (i, row) in rows.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[rhs] / &row[enter];
            let better = match &leave {
                None => true,
                Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, _)) = leave else {
            return false;
        };
        pivot(rows, basis, Some(z), r, enter);
    }
}

fn pivot(rows: &mut [Vec<Q>], basis: &mut [usize], z: Option<&mut Vec<Q>>, r: usize, c: usize) {
    let inv = rows[r][c].recip();
    for v in rows[r].iter_mut() {
        if !v.is_zero() {
            *v *= &inv;
        }
    }
    let pivot_row = rows[r].clone();
    let support: Vec<usize> = (0..pivot_row.len())
        .filter(|&j| !pivot_row[j].is_zero())
        .collect();
    let eliminate = |row: &mut Vec<Q>| {
        let f = row[c].clone();
        if f.is_zero() {
            return;
        }
        for &j in &support {
            row[j] -= &f * &pivot_row[j];
        }
    };
    for (i, row) in rows.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    if let Some(z) = z {
        eliminate(z);
    }
    basis[r] = c;
}
