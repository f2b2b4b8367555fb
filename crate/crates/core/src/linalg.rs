//! Small dense complex-matrix helpers shared by the quantum and see-saw code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMat = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn zeros(d: usize) -> CMat {
    CMat::zeros(d, d)
}

pub fn scaled(a: &CMat, s: f64) -> CMat {
    a.map(|z| z * s)
}

/// Pauli matrices `σ_x, σ_y, σ_z`.
pub fn paulis() -> [CMat; 3] {
    let i = Complex64::new(0.0, 1.0);
    [
        CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMat::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

/// `½(s I + v · σ)`.
pub fn bloch_operator(s: f64, v: [f64; 3]) -> CMat {
    let [sx, sy, sz] = paulis();
    let mut out = scaled(&identity(2), 0.5 * s);
    out += scaled(&sx, 0.5 * v[0]);
    out += scaled(&sy, 0.5 * v[1]);
    out += scaled(&sz, 0.5 * v[2]);
    out
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diagonal().iter().sum()
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    let d = a.nrows();
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).map(|z| z * 0.5)
}

pub fn max_abs_entry(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_error(a: &CMat) -> f64 {
    max_abs_entry(&(a - a.adjoint()))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(a));
    let d = a.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(d, d);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn eigvalsh(a: &CMat) -> Vec<f64> {
    eigh(a).0
}

/// `V diag(f(λ)) V†`.
pub fn spectral_map(values: &[f64], vectors: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let d = vectors.nrows();
    let mut out = CMat::zeros(d, d);
    for (k, &lam) in values.iter().enumerate() {
        let w = f(lam);
        if w == 0.0 {
            continue;
        }
        let v = vectors.column(k);
        for i in 0..d {
            let vi = v[i] * w;
            for j in 0..d {
                out[(i, j)] += vi * v[j].conj();
            }
        }
    }
    out
}

pub fn trace_norm(a: &CMat) -> f64 {
    eigvalsh(a).iter().map(|l| l.abs()).sum()
}

pub fn psd_sqrt(a: &CMat) -> CMat {
    let (values, vectors) = eigh(a);
    spectral_map(&values, &vectors, |l| l.max(0.0).sqrt())
}

/// Inverse square root on the support; eigenvalues below `floor` map to zero.
pub fn psd_inv_sqrt(a: &CMat, floor: f64) -> CMat {
    let (values, vectors) = eigh(a);
    spectral_map(&values, &vectors, |l| if l > floor { 1.0 / l.sqrt() } else { 0.0 })
}

/// Projector onto the span of eigenvectors whose eigenvalue is positive.
pub fn positive_projector(a: &CMat) -> CMat {
    let (values, vectors) = eigh(a);
    spectral_map(&values, &vectors, |l| if l > 0.0 { 1.0 } else { 0.0 })
}

/// Euclidean projection of `v` onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        css += uk;
        let t = (css - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Frobenius-nearest density matrix to the Hermitian part of `a`.
pub fn project_density(a: &CMat) -> CMat {
    let (values, vectors) = eigh(a);
    let projected = project_simplex(&values);
    let d = a.nrows();
    let mut out = CMat::zeros(d, d);
    for (k, &w) in projected.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let v = vectors.column(k);
        for i in 0..d {
            let vi = v[i] * w;
            for j in 0..d {
                out[(i, j)] += vi * v[j].conj();
            }
        }
    }
    out
}

pub fn outer(v: &DVector<Complex64>) -> CMat {
    v * v.adjoint()
}

/// Haar-random pure state as a density matrix.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let v = DVector::from_fn(d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.norm();
    outer(&(v / Complex64::new(norm, 0.0)))
}

/// `G G†` for a complex Gaussian `G`.
pub fn random_wishart<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    &g * g.adjoint()
}

/// Haar-ish random unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    g.qr().q()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection_sums_to_one() {
        let p = project_simplex(&[0.9, 0.5, -0.3]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((p[0] - 0.7).abs() < 1e-15 && (p[1] - 0.3).abs() < 1e-15 && p[2] == 0.0);
    }

    #[test]
    fn eigh_is_sorted_and_reconstructs() {
        let a = bloch_operator(1.0, [0.3, -0.2, 0.5]);
        let (vals, vecs) = eigh(&a);
        assert!(vals[0] <= vals[1]);
        let back = spectral_map(&vals, &vecs, |l| l);
        assert!(max_abs_entry(&(back - a)) < 1e-14);
    }

    #[test]
    fn trace_norm_of_pauli_difference() {
        let [_, _, sz] = paulis();
        assert!((trace_norm(&sz) - 2.0).abs() < 1e-14);
    }
}
