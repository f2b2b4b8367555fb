//! Qubit-specific tools: Bloch coordinates, the additive decomposition of
//! parity-oblivious families and the analytic optimal constructions.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{
    DensityMatrix, MeasurementFamily, Povm, PreparationFamily, QuantumError, Result, ADDITIVE_TOL,
};
use crate::linalg::{self, CMat};
use crate::zmod::{self, InputSpace};

/// Tolerance on `|n| ≤ 1` for Bloch vectors of states.
const BLOCH_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn to_matrix(&self) -> CMat {
        linalg::bloch_operator(1.0, self.0)
    }
}

fn require_qubit(d: usize) -> Result<()> {
    if d != 2 {
        return Err(QuantumError::NotQubit(d));
    }
    Ok(())
}

fn pauli_components(a: &CMat) -> [f64; 3] {
    let s = linalg::paulis();
    [0, 1, 2].map(|i| linalg::trace_product(a, &s[i]).re)
}

/// `ρ = ½(I + n·σ)`.
pub fn qubit_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    require_qubit(rho.dim())?;
    Ok(BlochVector(pauli_components(rho.matrix())))
}

/// `E = (t/2)(I + m̂·σ)` with `t = Tr E`; `m̂` is zero when `t` vanishes.
pub fn povm_bloch(effect: &CMat) -> Result<(f64, [f64; 3])> {
    require_qubit(effect.nrows())?;
    let t = linalg::trace(effect).re;
    let v = pauli_components(effect);
    if t.abs() < 1e-15 {
        return Ok((t, [0.0; 3]));
    }
    Ok((t, v.map(|c| c / t)))
}

fn add(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [u[0] + v[0], u[1] + v[1], u[2] + v[2]]
}

fn dot(u: [f64; 3], v: [f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// Qubit family on `Z_m^2` with Bloch vectors `a_{x1} + b_{x2}`.
pub fn additive_family(m: u32, a: &[[f64; 3]], b: &[[f64; 3]]) -> Result<PreparationFamily> {
    let space = InputSpace::new(2, m)?;
    if a.len() != m as usize || b.len() != m as usize {
        return Err(QuantumError::DimensionMismatch(format!(
            "need {m} vectors per digit, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let states = (0..space.size())
        .map(|x| {
            let v = BlochVector(add(
                a[space.digit(x, 0) as usize],
                b[space.digit(x, 1) as usize],
            ));
            if v.norm() > 1.0 + BLOCH_TOL {
                return Err(QuantumError::InvalidState(format!(
                    "Bloch vector of {} has length {}",
                    space.string(x),
                    v.norm()
                )));
            }
            Ok(DensityMatrix::new_unchecked(v.to_matrix()))
        })
        .collect::<Result<Vec<_>>>()?;
    PreparationFamily::new(space, states)
}

/// Zero-sum decomposition `n_{x1x2} = c + a_{x1} + b_{x2}` of a two-digit
/// qubit family, with `c` the global Bloch centroid.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditiveDecomposition {
    pub centroid: [f64; 3],
    pub a: Vec<[f64; 3]>,
    pub b: Vec<[f64; 3]>,
    /// Largest Bloch-component mismatch between the family and `c + a + b`.
    pub residual: f64,
}

/// Reads the single-digit Fourier modes of the recentred Bloch-vector
/// function and rebuilds the family from them. Fails with the residual when
/// the mixed modes carry more than [`ADDITIVE_TOL`].
pub fn additive_decomposition(p: &PreparationFamily) -> Result<AdditiveDecomposition> {
    require_qubit(p.dim())?;
    if p.n() != 2 {
        return Err(zmod::ZmodError::InvalidSize { n: p.n(), m: p.m() }.into());
    }
    let space = p.space();
    let m = space.m() as usize;
    let bloch: Vec<[f64; 3]> = p
        .states()
        .iter()
        .map(|s| pauli_components(s.matrix()))
        .collect();
    let mut centroid = [0.0; 3];
    for v in &bloch {
        centroid = add(centroid, *v);
    }
    centroid = centroid.map(|c| c / space.size() as f64);
    let flat: Vec<Complex64> = bloch
        .iter()
        .flat_map(|v| (0..3).map(move |i| Complex64::new(v[i] - centroid[i], 0.0)))
        .collect();
    let spectrum = zmod::fourier_transform_flat(space, &flat, 3)?;

    // g(l) = Σ_{s≠0} ĝ(s) ω^{s l} along one axis.
    let axis_function = |axis: usize| -> Vec<[f64; 3]> {
        (0..m)
            .map(|l| {
                let mut out = [0.0; 3];
                for s in 1..m {
                    let mut mask = [0u32; 2];
                    mask[axis] = s as u32;
                    let c = spectrum.coefficient(space.index(&mask));
                    let phase = Complex64::from_polar(
                        1.0,
                        2.0 * std::f64::consts::PI * ((s * l) % m) as f64 / m as f64,
                    );
                    for i in 0..3 {
                        out[i] += (c[i] * phase).re;
                    }
                }
                out
            })
            .collect()
    };
    let a = axis_function(0);
    let b = axis_function(1);

    let mut residual: f64 = 0.0;
    for (x, v) in bloch.iter().enumerate() {
        let rebuilt = add(
            centroid,
            add(a[space.digit(x, 0) as usize], b[space.digit(x, 1) as usize]),
        );
        for i in 0..3 {
            residual = residual.max((rebuilt[i] - v[i]).abs());
        }
    }
    if residual > ADDITIVE_TOL {
        return Err(QuantumError::NotAdditive { residual });
    }
    Ok(AdditiveDecomposition {
        centroid,
        a,
        b,
        residual,
    })
}

/// `F = Σ_k t_{k|1} a_k·m̂_{k|1} + Σ_k t_{k|2} b_k·m̂_{k|2}` for an additive
/// qubit family centred at `I/2` and measurements in Bloch form.
pub fn f_functional(a: &[[f64; 3]], b: &[[f64; 3]], meas: &MeasurementFamily) -> Result<f64> {
    require_qubit(meas.dim())?;
    if meas.n() != 2 || a.len() != meas.m() as usize || b.len() != meas.m() as usize {
        return Err(QuantumError::DimensionMismatch(
            "F is defined for two digits with one vector per symbol".into(),
        ));
    }
    let mut f = 0.0;
    for (y, vectors) in [(1, a), (2, b)] {
        for (k, v) in vectors.iter().enumerate() {
            let (t, dir) = povm_bloch(meas.povm(y).effect(k))?;
            f += t * dot(*v, dir);
        }
    }
    Ok(f)
}

/// Exclusion value `(m−1)/m − F/(4m)` implied by [`f_functional`] for a
/// zero-sum additive family; `2/3 − F/12` at `m = 3`.
pub fn success_from_f(f: f64, m: u32) -> f64 {
    let m = m as f64;
    (m - 1.0) / m - f / (4.0 * m)
}

fn binary_projective(m: u32, axis: [f64; 3], plus_outcome: usize, minus_outcome: usize) -> Povm {
    let mut effects = vec![linalg::zeros(2); m as usize];
    effects[plus_outcome] = linalg::bloch_operator(1.0, axis);
    effects[minus_outcome] = linalg::bloch_operator(1.0, axis.map(|c| -c));
    Povm::new_unchecked(effects)
}

const X: [f64; 3] = [1.0, 0.0, 0.0];
const Z: [f64; 3] = [0.0, 0.0, 1.0];

/// Optimal qubit exclusion strategy at `(n, m) = (2, 3)`:
/// `ρ_{x1x2} = ½(I + f(x2)/√2 σ_x + f(x1)/√2 σ_z)` with `f = (−1, 1, 0)`,
/// measured along `z` for the first digit and `x` for the second, the third
/// outcome never occurring.
pub fn optimal_qubit_construction() -> (PreparationFamily, MeasurementFamily) {
    let f = |k: u32| match k {
        0 => -1.0,
        1 => 1.0,
        _ => 0.0,
    };
    let space = InputSpace::new(2, 3).expect("valid size");
    let states = (0..space.size())
        .map(|x| {
            let (x1, x2) = (space.digit(x, 0), space.digit(x, 1));
            DensityMatrix::new_unchecked(linalg::bloch_operator(
                1.0,
                [f(x2) * FRAC_1_SQRT_2, 0.0, f(x1) * FRAC_1_SQRT_2],
            ))
        })
        .collect();
    let family = PreparationFamily::new(space, states).expect("total family");
    let meas = MeasurementFamily::new(
        2,
        3,
        vec![binary_projective(3, Z, 0, 1), binary_projective(3, X, 0, 1)],
    )
    .expect("well-formed measurements");
    (family, meas)
}

/// The same states with outcomes 0 and 1 exchanged, so that the projector
/// aligned with each state's digit reports that digit. This is the
/// retrieval-oriented use of the construction.
pub fn optimal_qubit_retrieval_construction() -> (PreparationFamily, MeasurementFamily) {
    let (family, _) = optimal_qubit_construction();
    let meas = MeasurementFamily::new(
        2,
        3,
        vec![binary_projective(3, Z, 1, 0), binary_projective(3, X, 1, 0)],
    )
    .expect("well-formed measurements");
    (family, meas)
}

/// Qubit strategy attaining `(m−1)/m + 1/(m√2)` for prime `m ≥ 3`.
pub fn projective_qubit_construction(m: u32) -> Result<(PreparationFamily, MeasurementFamily)> {
    if !zmod::is_prime(m) || m < 3 {
        return Err(zmod::ZmodError::NotPrime(m).into());
    }
    let s = FRAC_1_SQRT_2;
    let mut a = vec![[0.0; 3]; m as usize];
    let mut b = vec![[0.0; 3]; m as usize];
    a[0] = [0.0, 0.0, -s];
    a[1] = [0.0, 0.0, s];
    b[0] = [-s, 0.0, 0.0];
    b[1] = [s, 0.0, 0.0];
    let family = additive_family(m, &a, &b)?;
    let meas = MeasurementFamily::new(
        2,
        m,
        vec![binary_projective(m, Z, 0, 1), binary_projective(m, X, 0, 1)],
    )?;
    Ok((family, meas))
}
