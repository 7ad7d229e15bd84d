//! Test-side oracles built from first principles, independent of the library's channel algebra.
#![allow(dead_code)]

use noiseforms::channel::ChoiState;
use noiseforms::linalg::{ComplexMatrix, TensorShape, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn gaussian(r: &mut ChaCha8Rng) -> f64 {
    // Box–Muller
    let u1: f64 = r.gen_range(f64::EPSILON..1.0);
    let u2: f64 = r.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
}

/// Orthonormal columns (modified Gram–Schmidt on complex Gaussian vectors).
pub fn random_isometry(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while basis.len() < cols {
        let mut v: Vec<C64> = (0..rows).map(|_| cx(gaussian(r), gaussian(r))).collect();
        for b in &basis {
            let ov: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= ov * y);
        }
        if v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-10 {
            normalize(&mut v);
            basis.push(v);
        }
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| basis[j][i])
}

pub fn random_unitary(r: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    random_isometry(r, d, d)
}

/// Kraus operators of a random CPTP map: blocks of a random isometry C^{d_in} → C^{rank·d_out}.
pub fn random_kraus(
    r: &mut ChaCha8Rng,
    d_in: usize,
    d_out: usize,
    rank: usize,
) -> Vec<ComplexMatrix> {
    let v = random_isometry(r, rank * d_out, d_in);
    (0..rank)
        .map(|k| ComplexMatrix::from_fn(d_out, d_in, |a, j| v[(k * d_out + a, j)]))
        .collect()
}

pub fn kraus_apply(kraus: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(kraus[0].rows(), kraus[0].rows());
    for k in kraus {
        out += &(&(k * rho) * &k.adjoint());
    }
    out
}

pub fn unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, j)] = cx(1.0, 0.0);
    m
}

/// E = (𝓔 ⊗ Id)(P_Φ) = (1/d) Σ_ij 𝓔(|i⟩⟨j|) ⊗ |i⟩⟨j|, output factor first.
pub fn choi_oracle(
    map: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    d_in: usize,
    d_out: usize,
) -> ComplexMatrix {
    let n = d_in * d_out;
    let mut e = ComplexMatrix::zeros(n, n);
    for i in 0..d_in {
        for j in 0..d_in {
            let img = map(&unit(d_in, i, j));
            for a in 0..d_out {
                for b in 0..d_out {
                    e[(a * d_in + i, b * d_in + j)] += img[(a, b)] / d_in as f64;
                }
            }
        }
    }
    e
}

pub fn random_channel(
    r: &mut ChaCha8Rng,
    d: usize,
    rank: usize,
) -> (ChoiState, Vec<ComplexMatrix>) {
    let kraus = random_kraus(r, d, d, rank);
    let m = choi_oracle(|x| kraus_apply(&kraus, x), d, d);
    let shape = TensorShape::new(vec![d]).unwrap();
    (ChoiState::square(m, shape).unwrap(), kraus)
}

/// Two-qubit channel in (out₁,out₂,in₁,in₂) order from Kraus operators on C⁴.
pub fn two_qubit_channel(kraus: &[ComplexMatrix]) -> ChoiState {
    ChoiState::square(
        choi_oracle(|x| kraus_apply(kraus, x), 4, 4),
        TensorShape::uniform(2, 2).unwrap(),
    )
    .unwrap()
}

/// f₀·𝒰 + (1−f₀)·(random channel), with 𝒰 the conjugation by `u`.
pub fn noisy_gate(r: &mut ChaCha8Rng, u: &ComplexMatrix, f0: f64, rank: usize) -> ChoiState {
    let mut kraus = random_kraus(r, 4, 4, rank);
    kraus
        .iter_mut()
        .for_each(|k| *k = k.scale_re((1.0 - f0).sqrt()));
    kraus.push(u.scale_re(f0.sqrt()));
    two_qubit_channel(&kraus)
}

pub fn omega(d: usize, k: usize) -> C64 {
    let t = 2.0 * std::f64::consts::PI * (k % d) as f64 / d as f64;
    cx(t.cos(), t.sin())
}

/// U_kl|m⟩ = ω^{km}|m+l⟩.
pub fn weyl(d: usize, k: usize, l: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(d, d);
    for m in 0..d {
        u[((m + l) % d, m)] = omega(d, k * m);
    }
    u
}

/// |ψ_kl⟩ = (U_kl ⊗ 𝟙)|Φ⟩ in (out, in) order.
pub fn bell(d: usize, k: usize, l: usize) -> Vec<C64> {
    let u = weyl(d, k, l);
    let s = 1.0 / (d as f64).sqrt();
    let mut v = vec![cx(0.0, 0.0); d * d];
    for a in 0..d {
        for i in 0..d {
            v[a * d + i] = u[(a, i)] * s;
        }
    }
    v
}

/// Two-party Bell product in (out₁,out₂,in₁,in₂) order from per-party (out, in) vectors.
pub fn bell_pair(d: usize, first: &[C64], second: &[C64]) -> Vec<C64> {
    let mut v = vec![cx(0.0, 0.0); d.pow(4)];
    for a1 in 0..d {
        for i1 in 0..d {
            for a2 in 0..d {
                for i2 in 0..d {
                    v[((a1 * d + a2) * d + i1) * d + i2] = first[a1 * d + i1] * second[a2 * d + i2];
                }
            }
        }
    }
    v
}

pub fn expect(m: &ComplexMatrix, v: &[C64]) -> C64 {
    m.sandwich_vec(v, v)
}

pub fn projector(v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::outer(v, v)
}

/// ⟨Φ|E|Φ⟩ for the normalized maximally entangled vector on the full input.
pub fn identity_fidelity(e: &ComplexMatrix, d: usize) -> f64 {
    let mut s = cx(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += e[(i * d + i, j * d + j)];
        }
    }
    s.re / d as f64
}

/// Partial transpose of a multi-qubit matrix over the listed qubit positions.
pub fn partial_transpose_qubits(m: &ComplexMatrix, n: usize, positions: &[usize]) -> ComplexMatrix {
    let dim = 1 << n;
    let mask: usize = positions.iter().map(|p| 1 << (n - 1 - p)).sum();
    ComplexMatrix::from_fn(dim, dim, |r, c| {
        // swap the bits of r and c at masked positions
        let r2 = (r & !mask) | (c & mask);
        let c2 = (c & !mask) | (r & mask);
        m[(r2, c2)]
    })
}

/// ½‖A − B‖₁ for Hermitian matrices via the eigenvalues of the difference.
pub fn trace_norm_half(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let eig = noiseforms::linalg::herm_eig(&(a - b)).unwrap();
    0.5 * eig.values.iter().map(|x| x.abs()).sum::<f64>()
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn pauli(i: usize) -> ComplexMatrix {
    let (o, z) = (cx(1.0, 0.0), cx(0.0, 0.0));
    let rows = match i {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, cx(0.0, -1.0)], [cx(0.0, 1.0), z]],
        _ => [[o, z], [z, -o]],
    };
    ComplexMatrix::from_fn(2, 2, |r, c| rows[r][c])
}

pub fn kron2(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Pauli products without the identity, lexicographic in their labels.
pub fn gks_operators(qubits: usize) -> Vec<ComplexMatrix> {
    match qubits {
        1 => (1..4).map(pauli).collect(),
        _ => (1..16)
            .map(|k| kron2(&pauli(k / 4), &pauli(k % 4)))
            .collect(),
    }
}

/// 𝒵ρ = −i[H + H_l, ρ] + Σ L_kl([σ_k ρ, σ_l] + [σ_k, ρ σ_l]).
pub fn lindblad_oracle(
    h: &ComplexMatrix,
    gks: &ComplexMatrix,
    qubits: usize,
    rho: &ComplexMatrix,
) -> ComplexMatrix {
    let comm = |a: &ComplexMatrix, b: &ComplexMatrix| &(a * b) - &(b * a);
    let mut out = comm(h, rho).scale(cx(0.0, -1.0));
    let ops = gks_operators(qubits);
    for (k, sk) in ops.iter().enumerate() {
        for (l, sl) in ops.iter().enumerate() {
            let w = gks[(k, l)];
            if w.norm() == 0.0 {
                continue;
            }
            let t = &comm(&(sk * rho), sl) + &comm(sk, &(rho * sl));
            out += &t.scale(w);
        }
    }
    out
}

/// Matrix of a linear map on row-major vec(ρ), built column by column from matrix units.
pub fn superoperator_oracle(
    d: usize,
    map: impl Fn(&ComplexMatrix) -> ComplexMatrix,
) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let img = map(&unit(d, i, j));
            for a in 0..d {
                for b in 0..d {
                    s[(a * d + b, i * d + j)] = img[(a, b)];
                }
            }
        }
    }
    s
}

pub fn apply_superoperator(s: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let d = rho.rows();
    let v = s.matvec(rho.data());
    ComplexMatrix::from_fn(d, d, |a, b| v[a * d + b])
}

/// Scaling and squaring with a truncated Taylor series.
pub fn expm_oracle(m: &ComplexMatrix) -> ComplexMatrix {
    let norm = m.norm_one();
    let mut s = 0;
    while norm / f64::powi(2.0, s) > 0.25 {
        s += 1;
    }
    let a = m.scale_re(f64::powi(2.0, -s));
    let n = m.rows();
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..=24 {
        term = (&term * &a).scale_re(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Choi state of the superoperator `s` on a d-dimensional system.
pub fn choi_of_superoperator(s: &ComplexMatrix, d: usize) -> ComplexMatrix {
    choi_oracle(|x| apply_superoperator(s, x), d, d)
}

/// |Ψ_U⟩ = (U ⊗ 𝟙)|Φ⟩ in (out, in) order.
pub fn choi_vector_oracle(u: &ComplexMatrix) -> Vec<C64> {
    let d = u.rows();
    let s = 1.0 / (d as f64).sqrt();
    let mut v = vec![cx(0.0, 0.0); d * d];
    for a in 0..d {
        for i in 0..d {
            v[a * d + i] = u[(a, i)] * s;
        }
    }
    v
}

/// q·|Ψ_U⟩⟨Ψ_U| + (1−q)·𝟙/d².
pub fn white_oracle(u: &ComplexMatrix, q: f64) -> ComplexMatrix {
    let v = choi_vector_oracle(u);
    let n = v.len();
    &projector(&v).scale_re(q) + &ComplexMatrix::identity(n).scale_re((1.0 - q) / n as f64)
}

/// Partial transpose of the second factor of a (d_a·d_b)-dimensional bipartite matrix.
pub fn partial_transpose_second(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(da * db, da * db, |r, c| {
        let (a, i) = (r / db, r % db);
        let (b, j) = (c / db, c % db);
        m[(a * db + j, b * db + i)]
    })
}

pub fn min_eig(m: &ComplexMatrix) -> f64 {
    noiseforms::linalg::herm_eig(&m.hermitian_part())
        .unwrap()
        .values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Isotropic state f·P_Φ + (1−f)(𝟙−P_Φ)/(d²−1).
pub fn isotropic_oracle(d: usize, f: f64) -> ComplexMatrix {
    let p = projector(&choi_vector_oracle(&ComplexMatrix::identity(d)));
    let n = (d * d) as f64;
    let q = &ComplexMatrix::identity(d * d) - &p;
    &p.scale_re(f) + &q.scale_re((1.0 - f) / (n - 1.0))
}

/// X on pair (out₁,in₁) and Y on pair (out₂,in₂), laid out in (out₁,out₂,in₁,in₂) order.
pub fn pair_kron(x: &ComplexMatrix, y: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let n = d.pow(4);
    let split = |r: usize| (r / (d * d * d), (r / (d * d)) % d, (r / d) % d, r % d);
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (a1, a2, i1, i2) = split(r);
        let (b1, b2, j1, j2) = split(c);
        x[(a1 * d + i1, b1 * d + j1)] * y[(a2 * d + i2, b2 * d + j2)]
    })
}

/// Σᵢ λᵢ|xᵢ⟩⟨xᵢ| from a random complex Gaussian matrix G: GG†/tr.
pub fn random_density(r: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| cx(gaussian(r), gaussian(r)));
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    m.scale_re(1.0 / t)
}

pub fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo..hi)
}

pub fn random_hermitian(r: &mut ChaCha8Rng, d: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| cx(gaussian(r), gaussian(r)))
        .hermitian_part()
        .scale_re(scale)
}

/// Random positive matrix with trace `rate·n`.
pub fn random_gks(r: &mut ChaCha8Rng, n: usize, rate: f64) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| cx(gaussian(r), gaussian(r)));
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    m.scale_re(rate * n as f64 / t)
}
