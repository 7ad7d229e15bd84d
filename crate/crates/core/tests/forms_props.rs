//! Standard-form extraction on twirled random channels: round trips, fidelity and parameter counts.
#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use noiseforms::channel::{jamiolkowski_fidelity, ChoiState};
use noiseforms::forms::{
    census, cnot_to_phase_frame, extract_cnot_form, extract_pauli_channel, extract_phase_gate_form,
    extract_swap_form, extract_white_noise,
};
use noiseforms::linalg::ComplexMatrix;
use noiseforms::pauli::{gate, phase_gate, GateKind};
use noiseforms::twirl::{
    cnot_frame_set, depolarizing_set, pauli_set, phase_gate_set, swap_set, twirl,
};
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_4;

fn two_qubit(seed: u64, rank: usize) -> ChoiState {
    let mut r = rng(seed);
    two_qubit_channel(&random_kraus(&mut r, 4, 4, rank))
}

/// Affine dimension of a point cloud: rank of the differences by Gaussian elimination.
fn affine_dimension(points: &[Vec<f64>], tol: f64) -> usize {
    let mut rows: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect())
        .collect();
    let cols = points[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) =
            (rank..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
        else {
            break;
        };
        if rows[pivot][col].abs() <= tol {
            continue;
        }
        rows.swap(rank, pivot);
        for i in 0..rows.len() {
            if i != rank {
                let f = rows[i][col] / rows[rank][col];
                for j in col..cols {
                    rows[i][j] -= f * rows[rank][j];
                }
            }
        }
        rank += 1;
    }
    rank
}

fn entries(m: &ComplexMatrix) -> Vec<f64> {
    m.data().iter().flat_map(|z| [z.re, z.im]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pauli_form_round_trip(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let (e, _) = random_channel(&mut r, d, 3);
        let t = twirl(&e, &pauli_set(d, 1).unwrap()).unwrap();
        let form = extract_pauli_channel(&t).unwrap();
        prop_assert!(form.reconstruct().unwrap().matrix().max_abs_diff(t.matrix()) < 1e-10);
        prop_assert_eq!(form.weights.len(), d * d);
        prop_assert!((form.weights[0] - identity_fidelity(e.matrix(), d)).abs() < 1e-12);
        let rho = random_density(&mut r, d);
        let via_twirl = noiseforms::channel::apply(&t, &rho).unwrap();
        prop_assert!(form.apply(&rho).unwrap().max_abs_diff(&via_twirl) < 1e-10);
    }

    #[test]
    fn white_noise_round_trip(seed in any::<u64>()) {
        let e = two_qubit(seed, 3);
        let t = twirl(&e, &depolarizing_set(2, 2).unwrap()).unwrap();
        let form = extract_white_noise(&t).unwrap();
        prop_assert_eq!(form.alphas.len(), 4);
        prop_assert!(form.reconstruct().unwrap().matrix().max_abs_diff(t.matrix()) < 1e-10);
        prop_assert!((jamiolkowski_fidelity(&t, &ComplexMatrix::identity(4)).unwrap() - identity_fidelity(e.matrix(), 4)).abs() < 1e-12);
    }

    #[test]
    fn swap_form_round_trip(seed in any::<u64>()) {
        let e = two_qubit(seed, 3);
        let t = twirl(&e, &swap_set(2).unwrap()).unwrap();
        let form = extract_swap_form(&t).unwrap();
        let swap = gate(GateKind::Swap).matrix;
        prop_assert!((form.f - expect(e.matrix(), &choi_vector_oracle(&swap)).re).abs() < 1e-12);
        prop_assert!(form.reconstruct(2).unwrap().matrix().max_abs_diff(t.matrix()) < 1e-10);
    }

    #[test]
    fn phase_form_round_trip(seed in any::<u64>(), alpha in 0.05f64..1.5) {
        let mut r = rng(seed);
        let f0 = uniform(&mut r, 0.3, 0.95);
        let u = phase_gate(alpha);
        let e = noisy_gate(&mut r, &u, f0, 4);
        let t = twirl(&e, &phase_gate_set()).unwrap();
        let form = extract_phase_gate_form(&t, alpha).unwrap();
        prop_assert!((form.f - expect(e.matrix(), &choi_vector_oracle(&u)).re).abs() < 1e-12);
        let back = form.reconstruct().unwrap();
        prop_assert!(back.matrix().max_abs_diff(t.matrix()) < 1e-10);
        let again = extract_phase_gate_form(&back, alpha).unwrap();
        let (p, q) = (form.parameter_vector(), again.parameter_vector());
        prop_assert!(p.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn cnot_form_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f0 = uniform(&mut r, 0.3, 0.95);
        let u = phase_gate(FRAC_PI_4);
        let e = noisy_gate(&mut r, &u, f0, 4);
        let t = twirl(&e, &cnot_frame_set()).unwrap();
        let form = extract_cnot_form(&t).unwrap();
        prop_assert!((form.f - expect(e.matrix(), &choi_vector_oracle(&u)).re).abs() < 1e-12);
        prop_assert!(form.reconstruct().unwrap().matrix().max_abs_diff(t.matrix()) < 1e-10);
        // The frame change is a local unitary, so it cannot move the frame-form fidelity.
        let cnot = gate(GateKind::Cnot).matrix;
        let in_cnot = noiseforms::forms::phase_frame_to_cnot(&t).unwrap();
        prop_assert!((jamiolkowski_fidelity(&in_cnot, &cnot).unwrap() - form.f).abs() < 1e-12);
        prop_assert!(cnot_to_phase_frame(&in_cnot).unwrap().matrix().max_abs_diff(t.matrix()) < 1e-12);
    }

    #[test]
    fn untwirled_channels_fail_pattern_checks(seed in any::<u64>()) {
        let e = two_qubit(seed, 4);
        prop_assert!(extract_phase_gate_form(&e, 0.4).is_err());
        prop_assert!(extract_cnot_form(&e).is_err());
        prop_assert!(extract_white_noise(&e).is_err());
    }
}

#[test]
fn twirled_families_span_the_declared_dimensions() {
    let mut r = rng(2024);
    let qubit: Vec<Vec<f64>> = (0..20)
        .map(|_| {
            let (e, _) = random_channel(&mut r, 2, 4);
            entries(twirl(&e, &pauli_set(2, 1).unwrap()).unwrap().matrix())
        })
        .collect();
    assert_eq!(affine_dimension(&qubit, 1e-9), census::pauli_channel(2, 1));

    let qutrit: Vec<Vec<f64>> = (0..30)
        .map(|_| {
            let (e, _) = random_channel(&mut r, 3, 9);
            entries(twirl(&e, &pauli_set(3, 1).unwrap()).unwrap().matrix())
        })
        .collect();
    assert_eq!(affine_dimension(&qutrit, 1e-9), census::pauli_channel(3, 1));

    let white: Vec<Vec<f64>> = (0..12)
        .map(|i| {
            entries(
                twirl(&two_qubit(900 + i, 4), &depolarizing_set(2, 2).unwrap())
                    .unwrap()
                    .matrix(),
            )
        })
        .collect();
    assert_eq!(affine_dimension(&white, 1e-9), census::white_noise(2));

    let cnot: Vec<Vec<f64>> = (0..24)
        .map(|i| {
            entries(
                twirl(&two_qubit(1000 + i, 6), &cnot_frame_set())
                    .unwrap()
                    .matrix(),
            )
        })
        .collect();
    assert_eq!(affine_dimension(&cnot, 1e-9), census::CNOT);

    // Phase-gate twirls of channels span one less than the trace-one count: trace preservation
    // adds a single linear relation among the 17 state parameters.
    let phase: Vec<Vec<f64>> = (0..40)
        .map(|i| {
            entries(
                twirl(&two_qubit(2000 + i, 8), &phase_gate_set())
                    .unwrap()
                    .matrix(),
            )
        })
        .collect();
    assert_eq!(affine_dimension(&phase, 1e-9), census::PHASE_GATE - 1);
}
