//! Generalized Pauli operators, Bell bases, symplectic Cliffords and the
//! two-qubit gates the protocols are built around.

use crate::error::{Error, Result};
use crate::linalg::{c, kron, permute_vector, ComplexMatrix, TensorShape, C64, I, ONE, ZERO};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// ω^k with ω = e^{2πi/d}.
pub fn root_of_unity(d: usize, k: i64) -> C64 {
    let k = k.rem_euclid(d as i64) as f64;
    C64::from_polar(1.0, 2.0 * PI * k / d as f64)
}

/// U_{kl} on a d-level system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneralizedPauli {
    pub d: usize,
    pub k: usize,
    pub l: usize,
}

impl GeneralizedPauli {
    pub fn new(d: usize, k: usize, l: usize) -> Result<Self> {
        if d < 2 || k >= d || l >= d {
            return Err(Error::Validation(format!(
                "Pauli indices ({k},{l}) out of range for d={d}"
            )));
        }
        Ok(GeneralizedPauli { d, k, l })
    }

    /// U_{kl}|m⟩ = ω^{km}|m+l⟩.
    pub fn matrix(&self) -> ComplexMatrix {
        let d = self.d;
        let mut u = ComplexMatrix::zeros(d, d);
        for m in 0..d {
            u[((m + self.l) % d, m)] = root_of_unity(d, (self.k * m) as i64);
        }
        u
    }
}

pub fn gen_pauli(d: usize, k: usize, l: usize) -> Result<ComplexMatrix> {
    Ok(GeneralizedPauli::new(d, k, l)?.matrix())
}

/// σ_0 = 𝟙, σ_1 = σ_x, σ_2 = σ_y, σ_3 = σ_z.
pub fn sigma(i: usize) -> ComplexMatrix {
    match i {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]),
        2 => ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]),
        3 => ComplexMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]),
        _ => panic!("sigma index {i} out of range"),
    }
}

/// Qubit Pauli index σ_i as generalized-Pauli labels (k,l): σ_x = U_{01}, σ_y ∝ U_{11}, σ_z = U_{10}.
pub fn sigma_to_kl(i: usize) -> (usize, usize) {
    [(0, 0), (0, 1), (1, 1), (1, 0)][i]
}

pub fn kl_to_sigma(k: usize, l: usize) -> usize {
    match (k, l) {
        (0, 0) => 0,
        (0, 1) => 1,
        (1, 1) => 2,
        (1, 0) => 3,
        _ => panic!("({k},{l}) is not a qubit Pauli label"),
    }
}

/// Bit encoding (x,z) of σ_i; products of Paulis xor these up to phase.
pub fn sigma_bits(i: usize) -> (u8, u8) {
    [(0, 0), (1, 0), (1, 1), (0, 1)][i]
}

pub fn sigma_from_bits(x: u8, z: u8) -> usize {
    match (x & 1, z & 1) {
        (0, 0) => 0,
        (1, 0) => 1,
        (1, 1) => 2,
        _ => 3,
    }
}

/// Product of multi-qubit Pauli labels (phase dropped).
pub fn sigma_label_product(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter()
        .zip(b)
        .map(|(&p, &q)| {
            let (x1, z1) = sigma_bits(p);
            let (x2, z2) = sigma_bits(q);
            sigma_from_bits(x1 ^ x2, z1 ^ z2)
        })
        .collect()
}

/// Element of the generalized Bell basis |ψ_{kl}⟩ = (U_{kl}⊗𝟙)|Φ⟩, output factor first.
#[derive(Clone, Debug, PartialEq)]
pub struct BellVector {
    pub d: usize,
    pub k: usize,
    pub l: usize,
    pub amplitudes: Vec<C64>,
}

pub fn bell_state(d: usize, k: usize, l: usize) -> Result<BellVector> {
    let p = GeneralizedPauli::new(d, k, l)?;
    let u = p.matrix();
    let s = 1.0 / (d as f64).sqrt();
    let mut amp = vec![ZERO; d * d];
    for m in 0..d {
        for a in 0..d {
            amp[a * d + m] += u[(a, m)] * s;
        }
    }
    Ok(BellVector {
        d,
        k,
        l,
        amplitudes: amp,
    })
}

/// Maximally entangled |Φ⟩ = Σ_j |j⟩|j⟩/√D over a D-dimensional output ⊗ input.
pub fn phi_vector(dim: usize) -> Vec<C64> {
    let s = 1.0 / (dim as f64).sqrt();
    let mut v = vec![ZERO; dim * dim];
    for j in 0..dim {
        v[j * dim + j] = c(s, 0.0);
    }
    v
}

/// Product of per-party pair states, reordered from (out₁,in₁,out₂,in₂,…) into the
/// Choi ordering (out₁,out₂,…,in₁,in₂,…).
pub fn pairs_to_choi_order(pair_states: &[Vec<C64>], d: usize) -> Vec<C64> {
    let n = pair_states.len();
    let mut v = vec![ONE];
    for s in pair_states {
        let mut next = Vec::with_capacity(v.len() * s.len());
        for a in &v {
            for b in s {
                next.push(a * b);
            }
        }
        v = next;
    }
    let shape = TensorShape::uniform(d, 2 * n).expect("d >= 2");
    // new factor k: out_k for k < n, in_{k-n} otherwise
    let perm: Vec<usize> = (0..2 * n)
        .map(|k| if k < n { 2 * k } else { 2 * (k - n) + 1 })
        .collect();
    permute_vector(&v, &shape, &perm)
}

/// Multi-party generalized Bell product Ψ_{(k₁l₁)(k₂l₂)…} in Choi ordering.
pub fn bell_product(d: usize, labels: &[(usize, usize)]) -> Result<Vec<C64>> {
    let states = labels
        .iter()
        .map(|&(k, l)| bell_state(d, k, l).map(|b| b.amplitudes))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairs_to_choi_order(&states, d))
}

/// Qubit Bell state ψ_i = (σ_i ⊗ 𝟙)|Φ⟩.
pub fn qubit_bell(i: usize) -> Vec<C64> {
    let s = sigma(i);
    let phi = phi_vector(2);
    kron(&s, &ComplexMatrix::identity(2)).matvec(&phi)
}

/// Qubit Bell product Ψ_{i₁i₂…} (σ labels) in Choi ordering.
pub fn sigma_bell_product(labels: &[usize]) -> Vec<C64> {
    let states: Vec<Vec<C64>> = labels.iter().map(|&i| qubit_bell(i)).collect();
    pairs_to_choi_order(&states, 2)
}

/// Two-qubit Bell-product basis order used for every Γ-block display.
pub const BASIS_ORDERING: [(usize, usize); 16] = [
    (0, 0),
    (0, 2),
    (2, 0),
    (2, 2),
    (0, 1),
    (0, 3),
    (2, 1),
    (2, 3),
    (1, 0),
    (3, 0),
    (1, 2),
    (3, 2),
    (1, 1),
    (1, 3),
    (3, 1),
    (3, 3),
];

/// Columns are Ψ_ij in [`BASIS_ORDERING`] order.
pub fn basis_ordering_matrix() -> ComplexMatrix {
    let cols: Vec<Vec<C64>> = BASIS_ORDERING
        .iter()
        .map(|&(i, j)| sigma_bell_product(&[i, j]))
        .collect();
    ComplexMatrix::from_fn(16, 16, |r, k| cols[k][r])
}

/// Position of Ψ_ij inside [`BASIS_ORDERING`].
pub fn basis_position(i: usize, j: usize) -> usize {
    BASIS_ORDERING
        .iter()
        .position(|&p| p == (i, j))
        .expect("valid label")
}

/// 2×2 matrix [[a,b],[c,e]] over ℤ_d with unit determinant, acting on Pauli labels (k,l).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticMap {
    pub d: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub e: usize,
}

impl SymplecticMap {
    pub fn apply(&self, k: usize, l: usize) -> (usize, usize) {
        let d = self.d;
        ((self.a * k + self.b * l) % d, (self.c * k + self.e * l) % d)
    }

    pub fn determinant(&self) -> usize {
        let d = self.d;
        (self.a * self.e + d * d - (self.b * self.c) % d) % d
    }
}

pub fn is_prime(d: usize) -> bool {
    d >= 2
        && (2..d)
            .take_while(|p| p * p <= d)
            .all(|p| !d.is_multiple_of(p))
}

/// One Clifford unitary per symplectic matrix over ℤ_d (d prime, d ≤ 5).
pub fn clifford_group(d: usize) -> Result<Vec<(SymplecticMap, ComplexMatrix)>> {
    if !is_prime(d) || d > 5 {
        return Err(Error::Validation(format!(
            "Clifford enumeration needs a prime d <= 5, got {d}"
        )));
    }
    let mut out = Vec::new();
    for a in 0..d {
        for b in 0..d {
            for cc in 0..d {
                for e in 0..d {
                    let map = SymplecticMap { d, a, b, c: cc, e };
                    if map.determinant() == 1 {
                        out.push((map, clifford_unitary(&map)?));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Proportionality constant z with a = z·b, if the matrices are parallel.
fn proportionality(a: &ComplexMatrix, b: &ComplexMatrix) -> Option<C64> {
    let denom = b.hs_inner(b);
    if denom.norm() == 0.0 {
        return None;
    }
    let z = b.hs_inner(a) / denom;
    (a.max_abs_diff(&b.scale(z)) < 1e-10).then_some(z)
}

/// Builds Q with Q U₁₀ Q† ∝ U_{(a,c)} and Q U₀₁ Q† ∝ U_{(b,e)}.
fn clifford_unitary(map: &SymplecticMap) -> Result<ComplexMatrix> {
    let d = map.d;
    let zp = gen_pauli(d, map.a, map.c)?;
    let xp = gen_pauli(d, map.b, map.e)?;

    let power =
        |m: &ComplexMatrix, p: usize| (0..p).fold(ComplexMatrix::identity(d), |acc, _| &acc * m);
    let root = |m: &ComplexMatrix| -> C64 {
        // m^d = κ𝟙; pick one d-th root of κ.
        let kappa = power(m, d)[(0, 0)];
        C64::from_polar(kappa.norm().powf(1.0 / d as f64), kappa.arg() / d as f64)
    };

    // Projector onto one eigenspace of Z′.
    let lam = root(&zp);
    let zn = zp.scale(lam.inv());
    let mut proj = ComplexMatrix::zeros(d, d);
    let mut pw = ComplexMatrix::identity(d);
    for _ in 0..d {
        proj += &pw;
        pw = &pw * &zn;
    }
    let proj = proj.scale_re(1.0 / d as f64);
    let mut v0 = None;
    for j in 0..d {
        let col = proj.col(j);
        let n = crate::linalg::vec_norm(&col);
        if n > 1e-8 {
            v0 = Some(col.iter().map(|z| z / n).collect::<Vec<_>>());
            break;
        }
    }
    let mut v0 = v0.ok_or_else(|| {
        Error::Validation("no eigenvector found for Clifford construction".into())
    })?;
    if let Some(first) = v0.iter().find(|z| z.norm() > 1e-12).copied() {
        let ph = first.conj() / first.norm();
        v0.iter_mut().for_each(|z| *z *= ph);
    }

    let mu = root(&xp).inv();
    let xs = xp.scale(mu);
    let mut cols = vec![v0];
    for m in 1..d {
        let next = xs.matvec(&cols[m - 1]);
        cols.push(next);
    }
    let q = ComplexMatrix::from_fn(d, d, |r, k| cols[k][r]);

    if !q.is_unitary(1e-10) {
        return Err(Error::Validation(
            "Clifford construction produced a non-unitary".into(),
        ));
    }
    let z_img = gen_pauli(d, 1, 0)?.conjugate_by(&q);
    let x_img = gen_pauli(d, 0, 1)?.conjugate_by(&q);
    if proportionality(&z_img, &zp).is_none() || proportionality(&x_img, &xp).is_none() {
        return Err(Error::Validation(format!(
            "Clifford conjugation check failed for {map:?}"
        )));
    }
    Ok(q)
}

/// Checks Q U_{kl} Q† ∝ U_{C(k,l)} for every label and returns the phases.
pub fn clifford_action_phases(map: &SymplecticMap, q: &ComplexMatrix) -> Option<Vec<C64>> {
    let d = map.d;
    let mut phases = Vec::new();
    for k in 0..d {
        for l in 0..d {
            let (k2, l2) = map.apply(k, l);
            let img = gen_pauli(d, k, l).ok()?.conjugate_by(q);
            phases.push(proportionality(&img, &gen_pauli(d, k2, l2).ok()?)?);
        }
    }
    Some(phases)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    Swap,
    Cnot,
    /// U(α) = e^{−iα σ_y⊗σ_y}.
    Phase(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitGate {
    pub kind: GateKind,
    pub matrix: ComplexMatrix,
}

pub fn phase_gate(alpha: f64) -> ComplexMatrix {
    let yy = kron(&sigma(2), &sigma(2));
    &ComplexMatrix::identity(4).scale_re(alpha.cos()) - &yy.scale(c(0.0, alpha.sin()))
}

pub fn gate(kind: GateKind) -> TwoQubitGate {
    let matrix = match kind {
        GateKind::Swap => ComplexMatrix::from_fn(4, 4, |i, j| {
            let (i1, i2) = (i / 2, i % 2);
            if j == i2 * 2 + i1 {
                ONE
            } else {
                ZERO
            }
        }),
        GateKind::Cnot => ComplexMatrix::from_fn(4, 4, |i, j| {
            let target = if j >= 2 { j ^ 1 } else { j };
            if i == target {
                ONE
            } else {
                ZERO
            }
        }),
        GateKind::Phase(alpha) => phase_gate(alpha),
    };
    TwoQubitGate { kind, matrix }
}

/// Local unitaries (U₁,U₂,V₁,V₂) with CNOT = (U₁⊗U₂)·U(π/4)·(V₁⊗V₂).
pub fn lu_cnot_unitaries() -> [ComplexMatrix; 4] {
    let s = 1.0 / 2f64.sqrt();
    let u1 = ComplexMatrix::from_rows(&[vec![c(s, 0.0), c(0.0, -s)], vec![c(-s, 0.0), c(0.0, -s)]]);
    let u2 = ComplexMatrix::diag(&[ONE, -I]);
    let v1 = ComplexMatrix::from_rows(&[vec![c(s, 0.0), c(0.0, s)], vec![c(0.0, s), c(s, 0.0)]]);
    let v2 = ComplexMatrix::from_rows(&[vec![c(s, 0.0), c(0.0, s)], vec![c(-s, 0.0), c(0.0, s)]]);
    [u1, u2, v1, v2]
}

/// Pauli products σ_𝐤 over `n` qubits in lexicographic label order, identity excluded.
pub fn pauli_product_basis(n: usize) -> Vec<(Vec<usize>, ComplexMatrix)> {
    let count = 4usize.pow(n as u32);
    (1..count)
        .map(|idx| {
            let labels: Vec<usize> = (0..n)
                .map(|p| (idx / 4usize.pow((n - 1 - p) as u32)) % 4)
                .collect();
            let m = labels
                .iter()
                .fold(ComplexMatrix::identity(1), |acc, &i| kron(&acc, &sigma(i)));
            (labels, m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;

    #[test]
    fn qubit_paulis_from_generalized() {
        assert_eq!(gen_pauli(2, 0, 0).unwrap(), ComplexMatrix::identity(2));
        assert!(gen_pauli(2, 1, 0).unwrap().max_abs_diff(&sigma(3)) < 1e-15);
        assert!(gen_pauli(2, 0, 1).unwrap().max_abs_diff(&sigma(1)) < 1e-15);
        assert!(
            gen_pauli(2, 1, 1)
                .unwrap()
                .max_abs_diff(&sigma(2).scale(-I))
                < 1e-15
        );
        assert!(gen_pauli(2, 2, 0).is_err());
    }

    #[test]
    fn qutrit_product_rule() {
        // U_{k'l'} U_{kl} = ω^{k'l} U_{(k+k')(l+l')}
        let u02 = gen_pauli(3, 0, 2).unwrap();
        let lhs = &gen_pauli(3, 1, 1).unwrap() * &gen_pauli(3, 2, 1).unwrap();
        assert!(lhs.max_abs_diff(&u02.scale(root_of_unity(3, 1))) < 1e-14);
        let rev = &gen_pauli(3, 2, 1).unwrap() * &gen_pauli(3, 1, 1).unwrap();
        assert!(rev.max_abs_diff(&u02.scale(root_of_unity(3, 2))) < 1e-14);
    }

    #[test]
    fn pauli_trace_orthogonality_and_conjugation_relations() {
        for d in [2, 3, 5] {
            for k in 0..d {
                for l in 0..d {
                    let u = gen_pauli(d, k, l).unwrap();
                    assert!(u.is_unitary(1e-13));
                    // U* = U_{(−k)l}
                    assert!(
                        u.conj()
                            .max_abs_diff(&gen_pauli(d, (d - k) % d, l).unwrap())
                            < 1e-13
                    );
                    // Uᵀ = ω^{−kl} U_{k(−l)}
                    let t = gen_pauli(d, k, (d - l) % d)
                        .unwrap()
                        .scale(root_of_unity(d, -((k * l) as i64)));
                    assert!(u.transpose().max_abs_diff(&t) < 1e-13);
                    for k2 in 0..d {
                        for l2 in 0..d {
                            let ip = u.hs_inner(&gen_pauli(d, k2, l2).unwrap());
                            let want = if (k, l) == (k2, l2) { d as f64 } else { 0.0 };
                            assert!((ip - c(want, 0.0)).norm() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bell_basis_orthonormal_qutrit() {
        let states: Vec<BellVector> = (0..9)
            .map(|i| bell_state(3, i / 3, i % 3).unwrap())
            .collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let ip = inner(&a.amplitudes, &b.amplitudes);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(want, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn bell_zero_is_phi() {
        let b = bell_state(2, 0, 0).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert_eq!(b.amplitudes.len(), 4);
        assert!((b.amplitudes[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((b.amplitudes[3] - c(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn local_pauli_shifts_bell_labels() {
        let d = 3;
        for (k, l, k2, l2) in [(0, 1, 2, 2), (1, 2, 1, 1), (2, 0, 0, 2)] {
            let u = kron(&gen_pauli(d, k2, l2).unwrap(), &ComplexMatrix::identity(d));
            let v = u.matvec(&bell_state(d, k, l).unwrap().amplitudes);
            let target = bell_state(d, (k + k2) % d, (l + l2) % d)
                .unwrap()
                .amplitudes;
            let ov = inner(&target, &v);
            assert!((ov.norm() - 1.0).abs() < 1e-12);
            // phase is ω^{k′l}
            assert!((ov - root_of_unity(d, (k2 * l) as i64)).norm() < 1e-12);
        }
    }

    #[test]
    fn symplectic_group_sizes_and_orbits() {
        for d in [2usize, 3, 5] {
            let group = clifford_group(d).unwrap();
            assert_eq!(group.len(), d * (d * d - 1));
            let mut counts = vec![0usize; d * d];
            for (map, q) in &group {
                assert!(clifford_action_phases(map, q).is_some());
                for k in 0..d {
                    for l in 0..d {
                        if (k, l) != (0, 0) {
                            let (k2, l2) = map.apply(k, l);
                            counts[k2 * d + l2] += 1;
                        }
                    }
                }
            }
            assert_eq!(counts[0], 0);
            assert!(counts[1..].iter().all(|&n| n == counts[1]));
        }
        assert!(clifford_group(4).is_err());
        assert!(clifford_group(7).is_err());
    }

    #[test]
    fn qubit_symplectic_generators_present() {
        let group = clifford_group(2).unwrap();
        for (a, b, cc, e) in [(1, 1, 0, 1), (0, 1, 1, 0), (1, 0, 1, 1)] {
            assert!(group
                .iter()
                .any(|(m, _)| (m.a, m.b, m.c, m.e) == (a, b, cc, e)));
        }
    }

    #[test]
    fn identity_map_gives_scalar_clifford() {
        for d in [2, 3, 5] {
            let group = clifford_group(d).unwrap();
            let (_, q) = group
                .iter()
                .find(|(m, _)| (m.a, m.b, m.c, m.e) == (1, 0, 0, 1))
                .unwrap();
            for k in 0..d {
                for l in 0..d {
                    let u = gen_pauli(d, k, l).unwrap();
                    assert!(u.conjugate_by(q).max_abs_diff(&u) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn gates_act_as_defined() {
        let swap = gate(GateKind::Swap).matrix;
        assert_eq!(swap[(2, 1)], ONE); // |01⟩ → |10⟩
        assert_eq!(
            gate(GateKind::Phase(0.0)).matrix,
            ComplexMatrix::identity(4)
        );
        let cnot = gate(GateKind::Cnot).matrix;
        assert_eq!(cnot[(3, 2)], ONE);
        assert_eq!(cnot[(0, 0)], ONE);
        for g in [swap, cnot, phase_gate(0.3)] {
            assert!(g.is_unitary(1e-14));
        }
    }

    #[test]
    fn cnot_is_locally_equivalent_to_quarter_phase_gate() {
        let [u1, u2, v1, v2] = lu_cnot_unitaries();
        let built = &(&kron(&u1, &u2) * &phase_gate(PI / 4.0)) * &kron(&v1, &v2);
        assert!(built.max_abs_diff(&gate(GateKind::Cnot).matrix) < 1e-12);
    }

    #[test]
    fn basis_ordering_is_orthonormal() {
        let b = basis_ordering_matrix();
        assert!(b.is_unitary(1e-13));
    }

    #[test]
    fn pauli_product_basis_order() {
        let basis = pauli_product_basis(2);
        assert_eq!(basis.len(), 15);
        assert_eq!(basis[0].0, vec![0, 1]);
        assert_eq!(basis[3].0, vec![1, 0]);
        assert_eq!(basis[14].0, vec![3, 3]);
    }

    #[test]
    fn label_products() {
        assert_eq!(sigma_label_product(&[1, 2], &[3, 2]), vec![2, 0]);
    }
}
