//! Quantum strategies: density matrices, POVMs, state and measurement
//! families, their figure of merit, parity-obliviousness checks, white
//! noise and the dimension witness.

mod qubit;
mod surd;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use crate::classical;
use crate::linalg::{self, CMat};
use crate::zmod::{self, InputSpace, Mask, ZmodError};
use crate::Task;

pub use qubit::{
    additive_decomposition, additive_family, f_functional, povm_bloch, qubit_bloch,
    success_from_f, optimal_qubit_construction, optimal_qubit_retrieval_construction, projective_qubit_construction,
    AdditiveDecomposition, BlochVector,
};
pub use surd::Surd2;

/// Entrywise and spectral tolerance used when validating states and effects.
pub const STATE_TOL: f64 = 1e-10;

/// Residual allowed when reconstructing a family from its additive part.
pub const ADDITIVE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error(transparent)]
    Zmod(#[from] ZmodError),
    #[error(transparent)]
    Classical(#[from] classical::ClassicalError),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operation requires a qubit, got d = {0}")]
    NotQubit(usize),
    #[error("noise weight {0} outside [0, 1]")]
    NoiseOutOfRange(f64),
    #[error("value {value} does not exceed the noncontextual bound {bound}: no quantum advantage to protect")]
    NoAdvantage { value: f64, bound: f64 },
    #[error("family is not additive: reconstruction residual {residual:e}")]
    NotAdditive { residual: f64 },
    #[error("trace Tr(ρM) has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
}

pub type Result<T> = std::result::Result<T, QuantumError>;

fn check_square(a: &CMat, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(QuantumError::DimensionMismatch(format!(
            "{what} is {}x{}, expected a nonempty square matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    pub fn new(mat: CMat) -> Result<Self> {
        check_square(&mat, "state").map_err(|e| QuantumError::InvalidState(e.to_string()))?;
        let herm = linalg::hermiticity_error(&mat);
        if herm > STATE_TOL {
            return Err(QuantumError::InvalidState(format!("not Hermitian (error {herm:e})")));
        }
        let tr = linalg::trace(&mat);
        if (tr - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(QuantumError::InvalidState(format!("trace {tr} is not 1")));
        }
        let low = linalg::eigvalsh(&mat)[0];
        if low < -STATE_TOL {
            return Err(QuantumError::InvalidState(format!("negative eigenvalue {low:e}")));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix the caller has already validated.
    pub(crate) fn new_unchecked(mat: CMat) -> Self {
        Self { mat }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: linalg::scaled(&linalg::identity(d), 1.0 / d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    effects: Vec<CMat>,
}

impl Povm {
    pub fn new(effects: Vec<CMat>) -> Result<Self> {
        let Some(first) = effects.first() else {
            return Err(QuantumError::InvalidPovm("no effects".into()));
        };
        check_square(first, "effect").map_err(|e| QuantumError::InvalidPovm(e.to_string()))?;
        let d = first.nrows();
        let mut sum = linalg::zeros(d);
        for (b, e) in effects.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(QuantumError::InvalidPovm(format!("effect {b} has wrong shape")));
            }
            let herm = linalg::hermiticity_error(e);
            if herm > STATE_TOL {
                return Err(QuantumError::InvalidPovm(format!(
                    "effect {b} not Hermitian (error {herm:e})"
                )));
            }
            let low = linalg::eigvalsh(e)[0];
            if low < -STATE_TOL {
                return Err(QuantumError::InvalidPovm(format!(
                    "effect {b} has negative eigenvalue {low:e}"
                )));
            }
            sum += e;
        }
        let err = linalg::max_abs_entry(&(sum - linalg::identity(d)));
        if err > STATE_TOL {
            return Err(QuantumError::InvalidPovm(format!(
                "effects sum to identity only within {err:e}"
            )));
        }
        Ok(Self { effects })
    }

    pub(crate) fn new_unchecked(effects: Vec<CMat>) -> Self {
        Self { effects }
    }

    pub fn dim(&self) -> usize {
        self.effects[0].nrows()
    }

    pub fn num_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effect(&self, b: usize) -> &CMat {
        &self.effects[b]
    }

    pub fn effects(&self) -> &[CMat] {
        &self.effects
    }
}

/// One state per input string, indexed as in [`InputSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct PreparationFamily {
    space: InputSpace,
    states: Vec<DensityMatrix>,
}

impl PreparationFamily {
    pub fn new(space: InputSpace, states: Vec<DensityMatrix>) -> Result<Self> {
        if states.len() != space.size() {
            return Err(ZmodError::PartialDomain {
                expected: space.size(),
                got: states.len(),
            }
            .into());
        }
        let d = states[0].dim();
        if states.iter().any(|s| s.dim() != d) {
            return Err(QuantumError::DimensionMismatch(
                "states of different dimensions in one family".into(),
            ));
        }
        Ok(Self { space, states })
    }

    pub fn maximally_mixed(space: InputSpace, d: usize) -> Self {
        Self {
            space,
            states: vec![DensityMatrix::maximally_mixed(d); space.size()],
        }
    }

    pub fn space(&self) -> InputSpace {
        self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn m(&self) -> u32 {
        self.space.m()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn state(&self, x: usize) -> &DensityMatrix {
        &self.states[x]
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// Conjugates every state by `u`.
    pub fn rotated(&self, u: &CMat) -> Self {
        let states = self
            .states
            .iter()
            .map(|s| DensityMatrix::new_unchecked(u * s.matrix() * u.adjoint()))
            .collect();
        Self {
            space: self.space,
            states,
        }
    }
}

/// One `m`-outcome POVM per question `y = 1..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementFamily {
    n: usize,
    m: u32,
    povms: Vec<Povm>,
}

impl MeasurementFamily {
    pub fn new(n: usize, m: u32, povms: Vec<Povm>) -> Result<Self> {
        if povms.len() != n {
            return Err(QuantumError::DimensionMismatch(format!(
                "{} POVMs for {n} questions",
                povms.len()
            )));
        }
        let d = povms[0].dim();
        for (y, p) in povms.iter().enumerate() {
            if p.num_outcomes() != m as usize {
                return Err(QuantumError::InvalidPovm(format!(
                    "POVM {} has {} outcomes, expected {m}",
                    y + 1,
                    p.num_outcomes()
                )));
            }
            if p.dim() != d {
                return Err(QuantumError::DimensionMismatch(
                    "POVMs of different dimensions in one family".into(),
                ));
            }
        }
        Ok(Self { n, m, povms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.povms[0].dim()
    }

    /// POVM for the one-based question `y`.
    pub fn povm(&self, y: usize) -> &Povm {
        &self.povms[y - 1]
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    pub fn rotated(&self, u: &CMat) -> Self {
        let povms = self
            .povms
            .iter()
            .map(|p| {
                Povm::new_unchecked(
                    p.effects()
                        .iter()
                        .map(|e| u * e * u.adjoint())
                        .collect(),
                )
            })
            .collect();
        Self {
            n: self.n,
            m: self.m,
            povms,
        }
    }
}

fn check_compatible(p: &PreparationFamily, meas: &MeasurementFamily) -> Result<()> {
    if p.n() != meas.n() || p.m() != meas.m() {
        return Err(QuantumError::DimensionMismatch(format!(
            "states for (n={}, m={}) with measurements for (n={}, m={})",
            p.n(),
            p.m(),
            meas.n(),
            meas.m()
        )));
    }
    if p.dim() != meas.dim() {
        return Err(QuantumError::DimensionMismatch(format!(
            "states of dimension {} with measurements of dimension {}",
            p.dim(),
            meas.dim()
        )));
    }
    Ok(())
}

/// Average probability that the output equals the queried digit.
pub fn hit_rate(p: &PreparationFamily, meas: &MeasurementFamily) -> Result<f64> {
    check_compatible(p, meas)?;
    let space = p.space();
    let mut total = Complex64::new(0.0, 0.0);
    for x in 0..space.size() {
        let rho = p.state(x).matrix();
        for y in 1..=space.n() {
            let target = space.digit(x, y - 1) as usize;
            total += linalg::trace_product(rho, meas.povm(y).effect(target));
        }
    }
    let norm = (space.n() * space.size()) as f64;
    if total.im.abs() > STATE_TOL * norm {
        return Err(QuantumError::ImaginaryResidue(total.im / norm));
    }
    Ok(total.re / norm)
}

/// Figure of merit of the strategy for the given task.
pub fn success_probability(
    p: &PreparationFamily,
    meas: &MeasurementFamily,
    task: Task,
) -> Result<f64> {
    let hits = hit_rate(p, meas)?;
    Ok(match task {
        Task::Exclusion => 1.0 - hits,
        Task::Retrieval => hits,
    })
}

/// Uniform mixture of the states in parity class `k` of `mask`.
pub fn class_average(p: &PreparationFamily, mask: &Mask, k: u32) -> Result<DensityMatrix> {
    let table = zmod::parity_classes(mask)?;
    if table.space() != p.space() {
        return Err(QuantumError::DimensionMismatch("mask length differs from n".into()));
    }
    Ok(class_average_from(p, table.class_indices(k)))
}

fn class_average_from(p: &PreparationFamily, indices: &[usize]) -> DensityMatrix {
    let mut acc = linalg::zeros(p.dim());
    for &x in indices {
        acc += p.state(x).matrix();
    }
    DensityMatrix::new_unchecked(linalg::scaled(&acc, 1.0 / indices.len() as f64))
}

/// Largest trace distance `‖ρ_k − ρ_k'‖₁` between class averages over all
/// reduced masks of weight at least two. Zero certifies parity-obliviousness.
pub fn parity_deviation(p: &PreparationFamily) -> Result<f64> {
    let space = p.space();
    let mut worst: f64 = 0.0;
    for mask in zmod::enumerate_parity_masks(space.n(), space.m(), true)? {
        let table = zmod::parity_classes(&mask)?;
        let averages: Vec<DensityMatrix> = (0..space.m())
            .map(|k| class_average_from(p, table.class_indices(k)))
            .collect();
        for (i, a) in averages.iter().enumerate() {
            for b in &averages[i + 1..] {
                worst = worst.max(linalg::trace_norm(&(a.matrix() - b.matrix())));
            }
        }
    }
    Ok(worst)
}

/// Optimal probability of guessing which of the classes `k`, `k'` an average
/// state came from: `½ + ¼‖ρ_k − ρ_k'‖₁`.
pub fn distinguishability_witness(
    p: &PreparationFamily,
    mask: &Mask,
    k: u32,
    k2: u32,
) -> Result<f64> {
    if k == k2 {
        return Err(ZmodError::InvalidSize {
            n: p.n(),
            m: p.m(),
        }
        .into());
    }
    let a = class_average(p, mask, k)?;
    let b = class_average(p, mask, k2)?;
    Ok(0.5 + 0.25 * linalg::trace_norm(&(a.matrix() - b.matrix())))
}

/// `ρ ↦ (1−ω)ρ + ω I/d` on every state.
pub fn depolarize(p: &PreparationFamily, omega: f64) -> Result<PreparationFamily> {
    if !(0.0..=1.0).contains(&omega) {
        return Err(QuantumError::NoiseOutOfRange(omega));
    }
    let d = p.dim();
    let mixed = linalg::scaled(&linalg::identity(d), omega / d as f64);
    let states = p
        .states()
        .iter()
        .map(|s| DensityMatrix::new_unchecked(linalg::scaled(s.matrix(), 1.0 - omega) + &mixed))
        .collect();
    Ok(PreparationFamily {
        space: p.space(),
        states,
    })
}

/// Largest white-noise weight at which `value` still beats the noncontextual
/// exclusion bound: `(P − P_NC)/(P − (1 − 1/m))`.
pub fn noise_threshold(value: f64, n: usize, m: u32) -> Result<f64> {
    let bound = classical::noncontextual_bound(n, m, Task::Exclusion)?;
    let bound = num_traits::ToPrimitive::to_f64(&bound).unwrap_or(f64::NAN);
    if value.partial_cmp(&bound) != Some(std::cmp::Ordering::Greater) {
        return Err(QuantumError::NoAdvantage { value, bound });
    }
    Ok((value - bound) / (value - (1.0 - 1.0 / m as f64)))
}

/// Qubit bound from binary projective measurements, `(m−1)/m + 1/(m√2)`.
pub fn projective_qubit_bound(m: u32) -> Result<f64> {
    if !zmod::is_prime(m) || m < 3 {
        return Err(ZmodError::NotPrime(m).into());
    }
    let m = m as f64;
    Ok((m - 1.0) / m + 1.0 / (m * std::f64::consts::SQRT_2))
}

/// Exclusion advantage of the qubit projective value over the classical
/// bound at `n = 2`: `(√2 − 1)/(2m)`.
pub fn delta_porec(m: u32) -> Result<Surd2> {
    if !zmod::is_prime(m) || m < 3 {
        return Err(ZmodError::NotPrime(m).into());
    }
    let quantum = Surd2::rational(frac(m as i64 - 1, m as i64)) + Surd2::new(frac(0, 1), frac(1, 2 * m as i64));
    let classical = Surd2::rational(classical::noncontextual_bound(2, m, Task::Exclusion)?);
    Ok(quantum - classical)
}

/// Same gap without parity constraints: `(1 − (2−√2)/m²) − (1 − 1/m²)`.
pub fn delta_rec(m: u32) -> Result<Surd2> {
    if !zmod::is_prime(m) || m < 3 {
        return Err(ZmodError::NotPrime(m).into());
    }
    let m2 = (m as i64) * (m as i64);
    let one = Surd2::rational(frac(1, 1));
    let quantum = one.clone() - Surd2::new(frac(2, m2), frac(-1, m2));
    let classical = one - Surd2::rational(frac(1, m2));
    Ok(quantum - classical)
}

/// `Δ_POREC / Δ_REC`, exact.
pub fn gap_ratio(m: u32) -> Result<Surd2> {
    Ok(delta_porec(m)? / delta_rec(m)?)
}

fn frac(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Certified lower bound on the dimension for `(n, m) = (2, 3)` exclusion.
///
/// Returns 3 above the qubit optimum `2/3 + 1/(3√2)`, 2 above the
/// noncontextual bound `5/6`, else 1. Both comparisons are exact in the
/// binary value of `p`.
pub fn dimension_witness(p: f64) -> u32 {
    let Some(p) = BigRational::from_float(p) else {
        return 1;
    };
    // p > 2/3 + 1/(3√2)  ⇔  s = 3p − 2 > 0 and 2 s² > 1.
    let s = &p * frac(3, 1) - frac(2, 1);
    if s.is_positive() && &s * &s * frac(2, 1) > frac(1, 1) {
        return 3;
    }
    if p > frac(5, 6) {
        return 2;
    }
    1
}

#[cfg(test)]
mod tests;
