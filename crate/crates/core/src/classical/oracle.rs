//! Exact oracle for the best parity-oblivious classical strategy.
//!
//! Outer loop over deterministic decoders, inner exact LP over encodings.
//! The feasible region does not depend on the decoder, so phase one runs
//! once. Relabelling messages maps feasible encodings to feasible encodings,
//! so only decoders whose rows are nondecreasing need to be solved; the
//! smallest decoder in each relabelling orbit is exactly that sorted one,
//! which keeps the lowest-index tie-break intact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::simplex::{q, FeasibleTableau, LpOutcome, Q};
use super::{ClassicalError, ClassicalStrategy, Encoding, Result, MAX_DECODERS};
use crate::zmod::{self, InputSpace, ZmodError};
use crate::Task;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMethod {
    Formula,
    LpOracle,
}

impl BoundMethod {
    pub fn tag(self) -> &'static str {
        match self {
            BoundMethod::Formula => "formula",
            BoundMethod::LpOracle => "lp-oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub value: BigRational,
    pub certificate: Option<ClassicalStrategy>,
    pub method: BoundMethod,
    /// Decoders whose LP was actually solved.
    pub decoders_solved: u64,
}

impl BoundReport {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

/// Number of nondecreasing length-`k` sequences over `rows` symbols.
fn multiset_count(rows: u128, k: u128) -> u128 {
    // C(rows + k - 1, k), computed incrementally; exact at every step.
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(rows + i) / (i + 1);
    }
    acc
}

fn canonical_decoders(rows: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    loop {
        out.push(cur.clone());
        // Next nondecreasing sequence in lexicographic order.
        let Some(pos) = (0..k).rev().find(|&i| cur[i] + 1 < rows) else {
            return out;
        };
        let v = cur[pos] + 1;
        for c in cur.iter_mut().skip(pos) {
            *c = v;
        }
    }
}

/// Exact optimum over parity-oblivious classical strategies with a `k`-letter
/// message alphabet.
pub fn classical_bound_oracle(n: usize, m: u32, k: usize, task: Task) -> Result<BoundReport> {
    oracle(n, m, k, task, true)
}

/// Same optimisation without the parity constraints: the plain classical
/// value of a `k`-letter message.
pub fn classical_unconstrained_oracle(
    n: usize,
    m: u32,
    k: usize,
    task: Task,
) -> Result<BoundReport> {
    oracle(n, m, k, task, false)
}

fn oracle(n: usize, m: u32, k: usize, task: Task, parity: bool) -> Result<BoundReport> {
    if !zmod::is_prime(m) {
        return Err(ZmodError::NotPrime(m).into());
    }
    let max_k = (m as usize) * (m as usize);
    if k == 0 || k > max_k {
        return Err(ClassicalError::AlphabetSize { k, max: max_k });
    }
    let space = InputSpace::new(n, m)?;
    let size = space.size();
    let rows = size; // one decoder row (b(M,1..n)) per element of Z_m^n
    let count = multiset_count(rows as u128, k as u128);
    if count > MAX_DECODERS as u128 {
        return Err(ClassicalError::DecoderSpaceOverflow { count });
    }

    let num_vars = size * k;
    let mut a: Vec<Vec<Q>> = Vec::new();
    let mut b: Vec<Q> = Vec::new();
    for x in 0..size {
        let mut row = vec![Q::zero(); num_vars];
        for msg in 0..k {
            row[x * k + msg] = q(1);
        }
        a.push(row);
        b.push(q(1));
    }
    let masks = if parity {
        zmod::enumerate_parity_masks(n, m, true)?
    } else {
        Vec::new()
    };
    for mask in masks {
        let table = zmod::parity_classes(&mask)?;
        for msg in 0..k {
            for class in 1..m {
                let mut row = vec![Q::zero(); num_vars];
                for &x in table.class_indices(class) {
                    row[x * k + msg] = q(1);
                }
                for &x in table.class_indices(0) {
                    row[x * k + msg] = q(-1);
                }
                a.push(row);
                b.push(q(0));
            }
        }
    }
    let tableau = FeasibleTableau::new(&a, &b, num_vars).ok_or(ClassicalError::Infeasible)?;

    // wins[row][x]: number of questions y on which decoder row `row` wins on x.
    let wins: Vec<Vec<i64>> = (0..rows)
        .map(|r| {
            let outputs = space.digits(r);
            (0..size)
                .map(|x| {
                    (0..n)
                        .filter(|&y| task.succeeds(outputs[y], space.digit(x, y)))
                        .count() as i64
                })
                .collect()
        })
        .collect();

    let decoders = canonical_decoders(rows, k);
    let solved = decoders.len() as u64;
    let best = decoders
        .par_iter()
        .enumerate()
        .map(|(idx, dec)| {
            let mut c = vec![Q::zero(); num_vars];
            for x in 0..size {
                for (msg, &r) in dec.iter().enumerate() {
                    c[x * k + msg] = q(wins[r][x]);
                }
            }
            match tableau.maximize(&c) {
                LpOutcome::Optimal { value, x } => Ok((value, idx, x)),
                LpOutcome::Unbounded => Err(ClassicalError::Unbounded),
                LpOutcome::Infeasible => Err(ClassicalError::Infeasible),
            }
        })
        .try_reduce_with(|l, r| {
            // Canonical decoders are generated in increasing index order.
            let keep_left = l.0 > r.0 || (l.0 == r.0 && l.1 < r.1);
            Ok(if keep_left { l } else { r })
        })
        .expect("at least one decoder")?;

    let (total, idx, x) = best;
    let value = total / BigRational::from_integer(BigInt::from(n * size));
    let decoder: Vec<u32> = decoders[idx]
        .iter()
        .flat_map(|&r| space.digits(r))
        .collect();
    let certificate = ClassicalStrategy::new(space, k, Encoding::Exact(x), decoder)?;
    Ok(BoundReport {
        value,
        certificate: Some(certificate),
        method: BoundMethod::LpOracle,
        decoders_solved: solved,
    })
}
