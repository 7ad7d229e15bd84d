//! Deterministic fixtures shared by unit tests.

use crate::channel::{choi_from_kraus, ChoiState, KrausSet};
use crate::linalg::{c, vec_norm, ComplexMatrix, TensorShape, C64};

/// Deterministic random channel from a random isometry (Gram–Schmidt on LCG columns).
pub fn random_channel(d: usize, rank: usize, seed: u64) -> ChoiState {
    let mut s = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = || {
        s = s
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let n = d * rank;
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for _ in 0..d {
        let mut v: Vec<C64> = (0..n).map(|_| c(next(), next())).collect();
        for b in &cols {
            let ov: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= ov * y);
        }
        let nv = vec_norm(&v);
        cols.push(v.iter().map(|x| x / nv).collect());
    }
    let ops = (0..rank)
        .map(|k| ComplexMatrix::from_fn(d, d, |a, j| cols[j][k * d + a]))
        .collect();
    let shape = TensorShape::new(vec![d]).unwrap();
    choi_from_kraus(&KrausSet { operators: ops }, &shape, &shape).unwrap()
}

/// f₀·(ideal U) + (1−f₀)·(random two-qubit channel of the given Kraus rank).
pub fn noisy_two_qubit(u: &ComplexMatrix, f0: f64, rank: usize, seed: u64) -> ChoiState {
    let shape = TensorShape::uniform(2, 2).unwrap();
    let noise = random_channel(4, rank, seed);
    let noise = ChoiState::square(noise.into_matrix(), shape.clone()).unwrap();
    let ideal = crate::channel::choi_of_unitary(u, &shape).unwrap();
    ChoiState::mix(&[(f0, &ideal), (1.0 - f0, &noise)]).unwrap()
}
