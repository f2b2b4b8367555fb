use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use super::*;
use crate::linalg::bloch_operator;

const QUBIT_OPTIMUM: f64 = 2.0 / 3.0 + 1.0 / (3.0 * SQRT_2);

fn space23() -> InputSpace {
    InputSpace::new(2, 3).unwrap()
}

fn mask(c: &[u32], m: u32) -> Mask {
    Mask::new(c.to_vec(), m).unwrap()
}

/// `|0⟩⟨0|` at input (0,0), `I/2` elsewhere.
fn single_pure_family() -> PreparationFamily {
    let space = space23();
    let states = (0..space.size())
        .map(|x| {
            if x == 0 {
                DensityMatrix::new(bloch_operator(1.0, [0.0, 0.0, 1.0])).unwrap()
            } else {
                DensityMatrix::maximally_mixed(2)
            }
        })
        .collect();
    PreparationFamily::new(space, states).unwrap()
}

// Trace norm of a 2x2 Hermitian matrix from its closed-form eigenvalues.
fn trace_norm_2x2(a: &CMat) -> f64 {
    let (p, q) = (a[(0, 0)].re, a[(1, 1)].re);
    let r = ((p - q) * (p - q) / 4.0 + a[(0, 1)].norm_sqr()).sqrt();
    ((p + q) / 2.0 + r).abs() + ((p + q) / 2.0 - r).abs()
}

#[test]
fn validation_rejects_bad_states_and_povms() {
    assert!(DensityMatrix::new(bloch_operator(1.0, [0.0, 0.0, 1.2])).is_err());
    assert!(DensityMatrix::new(bloch_operator(1.1, [0.0, 0.0, 0.0])).is_err());
    let mut nonherm = bloch_operator(1.0, [0.1, 0.0, 0.0]);
    nonherm[(0, 1)] += Complex64::new(0.0, 1e-6);
    assert!(DensityMatrix::new(nonherm).is_err());
    let half = bloch_operator(1.0, [0.0, 0.0, 0.0]);
    assert!(Povm::new(vec![half.clone(), half.clone(), linalg::zeros(2)]).is_ok());
    assert!(Povm::new(vec![half.clone(), half.clone(), half]).is_err());
}

#[test]
fn maximally_mixed_states_give_random_guessing() {
    let p = PreparationFamily::maximally_mixed(space23(), 2);
    let (_, meas) = optimal_qubit_construction();
    let v = success_probability(&p, &meas, Task::Exclusion).unwrap();
    assert!((v - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn optimal_qubit_values() {
    let (p, meas) = optimal_qubit_construction();
    let ex = success_probability(&p, &meas, Task::Exclusion).unwrap();
    assert!((ex - QUBIT_OPTIMUM).abs() < 1e-12);
    assert!(parity_deviation(&p).unwrap() < 1e-12);
    let (pr, mr) = optimal_qubit_retrieval_construction();
    let re = success_probability(&pr, &mr, Task::Retrieval).unwrap();
    assert!((re - (1.0 / 3.0 + 1.0 / (3.0 * SQRT_2))).abs() < 1e-12);
    // The exclusion-oriented measurements score the anti-aligned value.
    let anti = success_probability(&p, &meas, Task::Retrieval).unwrap();
    assert!((anti - (1.0 / 3.0 - 1.0 / (3.0 * SQRT_2))).abs() < 1e-12);
}

#[test]
fn optimal_qubit_bloch_vectors() {
    let (p, _) = optimal_qubit_construction();
    let space = p.space();
    let n00 = qubit_bloch(p.state(space.index(&[0, 0]))).unwrap().0;
    let n11 = qubit_bloch(p.state(space.index(&[1, 1]))).unwrap().0;
    let s = FRAC_1_SQRT_2;
    for (got, want) in n00.iter().zip([-s, 0.0, -s]) {
        assert!((got - want).abs() < 1e-15);
    }
    for (got, want) in n11.iter().zip([s, 0.0, s]) {
        assert!((got - want).abs() < 1e-15);
    }
}

#[test]
fn optimal_qubit_class_averages_are_maximally_mixed() {
    let (p, _) = optimal_qubit_construction();
    let half = linalg::scaled(&linalg::identity(2), 0.5);
    for r in [[1, 1], [1, 2]] {
        for k in 0..3 {
            let avg = class_average(&p, &mask(&r, 3), k).unwrap();
            assert!(linalg::max_abs_entry(&(avg.matrix() - &half)) < 1e-15);
        }
    }
}

#[test]
fn identical_states_average_to_themselves() {
    let rho = DensityMatrix::new(bloch_operator(1.0, [0.3, 0.4, 0.1])).unwrap();
    let p = PreparationFamily::new(space23(), vec![rho.clone(); 9]).unwrap();
    let avg = class_average(&p, &mask(&[1, 2], 3), 2).unwrap();
    assert!(linalg::max_abs_entry(&(avg.matrix() - rho.matrix())) < 1e-15);
    assert!(parity_deviation(&p).unwrap() < 1e-15);
}

#[test]
fn deviation_and_witness_of_a_single_pure_state() {
    let p = single_pure_family();
    let space = p.space();
    // Independent oracle: class averages by hand, 2x2 eigenvalues in closed form.
    let mut worst: f64 = 0.0;
    for r in [[1u32, 1], [1, 2]] {
        let avgs: Vec<CMat> = (0..3)
            .map(|k| {
                let members: Vec<usize> = (0..9)
                    .filter(|&x| (r[0] * space.digit(x, 0) + r[1] * space.digit(x, 1)) % 3 == k)
                    .collect();
                let mut acc = linalg::zeros(2);
                for &x in &members {
                    acc += p.state(x).matrix();
                }
                linalg::scaled(&acc, 1.0 / members.len() as f64)
            })
            .collect();
        for i in 0..3 {
            for j in i + 1..3 {
                worst = worst.max(trace_norm_2x2(&(&avgs[i] - &avgs[j])));
            }
        }
    }
    assert!((worst - 1.0 / 3.0).abs() < 1e-15);
    let dev = parity_deviation(&p).unwrap();
    assert!((dev - worst).abs() < 1e-12);
    let w = distinguishability_witness(&p, &mask(&[1, 1], 3), 0, 1).unwrap();
    assert!((w - 7.0 / 12.0).abs() < 1e-12);
}

#[test]
fn witness_extremes() {
    let (p, _) = optimal_qubit_construction();
    let w = distinguishability_witness(&p, &mask(&[1, 1], 3), 0, 2).unwrap();
    assert!((w - 0.5).abs() < 1e-12);
    // Orthogonal pure class averages at m = 2 would be the natural example;
    // with m = 3 make every class-0 state |0⟩ and every other state |1⟩ for one mask.
    let space = space23();
    let r = mask(&[1, 1], 3);
    let states = (0..9)
        .map(|x| {
            let z = if space.dot(&r, x) == 0 { 1.0 } else { -1.0 };
            DensityMatrix::new(bloch_operator(1.0, [0.0, 0.0, z])).unwrap()
        })
        .collect();
    let q = PreparationFamily::new(space, states).unwrap();
    let w = distinguishability_witness(&q, &r, 0, 1).unwrap();
    assert!((w - 1.0).abs() < 1e-12);
    assert!(distinguishability_witness(&q, &r, 1, 1).is_err());
}

#[test]
fn bloch_coordinates() {
    let mixed = DensityMatrix::maximally_mixed(2);
    assert_eq!(qubit_bloch(&mixed).unwrap().0, [0.0; 3]);
    let up = DensityMatrix::new(bloch_operator(1.0, [0.0, 0.0, 1.0])).unwrap();
    assert_eq!(qubit_bloch(&up).unwrap().0, [0.0, 0.0, 1.0]);
    let (t, dir) = povm_bloch(&bloch_operator(1.0, [1.0, 0.0, 0.0])).unwrap();
    assert_eq!((t, dir), (1.0, [1.0, 0.0, 0.0]));
    assert!(qubit_bloch(&DensityMatrix::maximally_mixed(3)).is_err());
    let v = BlochVector([0.2, -0.3, 0.5]);
    let back = qubit_bloch(&DensityMatrix::new(v.to_matrix()).unwrap()).unwrap();
    for i in 0..3 {
        assert!((back.0[i] - v.0[i]).abs() < 1e-12);
    }
}

#[test]
fn optimal_qubit_decomposition() {
    let (p, _) = optimal_qubit_construction();
    let dec = additive_decomposition(&p).unwrap();
    let s = FRAC_1_SQRT_2;
    let want_a = [[0.0, 0.0, -s], [0.0, 0.0, s], [0.0; 3]];
    let want_b = [[-s, 0.0, 0.0], [s, 0.0, 0.0], [0.0; 3]];
    for k in 0..3 {
        for i in 0..3 {
            assert!((dec.a[k][i] - want_a[k][i]).abs() < 1e-12);
            assert!((dec.b[k][i] - want_b[k][i]).abs() < 1e-12);
        }
    }
    assert!(dec.residual < 1e-12);
}

#[test]
fn mixed_family_decomposes_to_zero() {
    let dec = additive_decomposition(&PreparationFamily::maximally_mixed(space23(), 2)).unwrap();
    assert!(dec.a.iter().chain(&dec.b).flatten().all(|c| c.abs() < 1e-15));
}

#[test]
fn non_additive_family_is_reported() {
    match additive_decomposition(&single_pure_family()) {
        Err(QuantumError::NotAdditive { residual }) => assert!(residual > 0.1),
        other => panic!("expected a failure report, got {other:?}"),
    }
}

#[test]
fn projective_sweep() {
    for (m, table) in [(3, 0.902369), (5, 0.941421), (7, 0.958158)] {
        let (p, meas) = projective_qubit_construction(m).unwrap();
        let v = success_probability(&p, &meas, Task::Exclusion).unwrap();
        let bound = projective_qubit_bound(m).unwrap();
        assert!((v - bound).abs() < 1e-12);
        assert!((v - table).abs() < 5e-7);
        assert!(parity_deviation(&p).unwrap() < 1e-12);
    }
    assert!(projective_qubit_construction(9).is_err());
    let (p2, m2) = optimal_qubit_construction();
    let (p3, m3) = projective_qubit_construction(3).unwrap();
    assert_eq!(p2.states().len(), p3.states().len());
    for (a, b) in p2.states().iter().zip(p3.states()) {
        assert!(linalg::max_abs_entry(&(a.matrix() - b.matrix())) < 1e-15);
    }
    assert_eq!(m2, m3);
}

#[test]
fn gap_ratio_is_half_the_symbol_size() {
    for m in [3u32, 5, 7, 11] {
        let r = gap_ratio(m).unwrap();
        assert!(r.is_rational());
        assert_eq!(r.a, BigRational::new(BigInt::from(m), BigInt::from(2)));
    }
    let d = delta_porec(3).unwrap().to_f64();
    assert!((d - 0.0690).abs() < 5e-5);
    assert!((d - (SQRT_2 - 1.0) / 6.0).abs() < 1e-15);
    assert!(gap_ratio(4).is_err());
}

#[test]
fn depolarizing_endpoints() {
    let (p, meas) = optimal_qubit_construction();
    assert_eq!(depolarize(&p, 0.0).unwrap(), p);
    let full = depolarize(&p, 1.0).unwrap();
    assert!(full
        .states()
        .iter()
        .all(|s| linalg::max_abs_entry(&(s.matrix() - DensityMatrix::maximally_mixed(2).matrix())) < 1e-16));
    let at_threshold = depolarize(&p, 0.2929).unwrap();
    let v = success_probability(&at_threshold, &meas, Task::Exclusion).unwrap();
    assert!((v - 5.0 / 6.0).abs() < 1e-4);
    let noisy = depolarize(&p, 0.35).unwrap();
    let v = success_probability(&noisy, &meas, Task::Exclusion).unwrap();
    assert!((v - (QUBIT_OPTIMUM - 0.35 * (QUBIT_OPTIMUM - 2.0 / 3.0))).abs() < 1e-12);
    assert!((v - 0.819873).abs() < 1e-6);
    assert!(depolarize(&p, 1.5).is_err());
    assert!(depolarize(&p, -0.1).is_err());
}

#[test]
fn noise_thresholds() {
    for (v, m, want) in [(0.902369, 3, 0.2929), (0.911306, 3, 0.3188), (0.958579, 5, 0.3694)] {
        let w = noise_threshold(v, 2, m).unwrap();
        // Reference cells are four-decimal roundings from unrounded values.
        assert!((w - want).abs() < 1e-4, "{v} {m}: {w}");
    }
    assert!(matches!(
        noise_threshold(0.8, 2, 3),
        Err(QuantumError::NoAdvantage { .. })
    ));
}

#[test]
fn dimension_witness_thresholds() {
    assert_eq!(dimension_witness(0.91), 3);
    assert_eq!(dimension_witness(0.85), 2);
    assert_eq!(dimension_witness(0.80), 1);
    assert_eq!(dimension_witness(5.0 / 6.0 - 1e-12), 1);
    // The six-digit display value rounds up past the exact qubit optimum.
    assert_eq!(dimension_witness(0.902369), 3);
    assert_eq!(dimension_witness(0.9023689), 2);
    assert_eq!(dimension_witness(QUBIT_OPTIMUM + 1e-12), 3);
    assert_eq!(dimension_witness(QUBIT_OPTIMUM - 1e-12), 2);
}

#[test]
fn f_functional_matches_optimal_qubit() {
    let (p, meas) = optimal_qubit_construction();
    let dec = additive_decomposition(&p).unwrap();
    let f = f_functional(&dec.a, &dec.b, &meas).unwrap();
    // Each digit contributes −2·(1/√2): anti-aligned unit-weight projectors.
    assert!((f + 2.0 * SQRT_2).abs() < 1e-12);
    assert!((success_from_f(f, 3) - QUBIT_OPTIMUM).abs() < 1e-12);
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let p = PreparationFamily::maximally_mixed(space23(), 3);
    let (_, meas) = optimal_qubit_construction();
    assert!(matches!(
        success_probability(&p, &meas, Task::Exclusion),
        Err(QuantumError::DimensionMismatch(_))
    ));
}
