//! Choi-state representation of completely positive maps.
//!
//! A channel 𝓔 on an input space of dimension d_A is stored as the trace-one
//! state E = (𝓔 ⊗ Id)(P_Φ), ordered output ⊗ input. For several parties the
//! order is out₁, out₂, …, in₁, in₂, … with row-major multi-indices.

use crate::error::{Error, Result};
use crate::linalg::{
    c, herm_eig, kron, partial_trace, partial_transpose, vec_norm, ComplexMatrix, TensorShape, C64,
    TAU_FORM, TAU_HERM, TAU_RANK, ZERO,
};
use crate::pauli::phi_vector;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiState {
    matrix: ComplexMatrix,
    in_shape: TensorShape,
    out_shape: TensorShape,
}

/// Outcome of the Hermitian/CP/TP checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermitian: bool,
    pub cp: bool,
    pub tp: bool,
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub tp_residual: f64,
}

impl ChoiState {
    /// Wraps a matrix over output ⊗ input. Requires Hermiticity and unit trace.
    pub fn new(
        matrix: ComplexMatrix,
        in_shape: TensorShape,
        out_shape: TensorShape,
    ) -> Result<Self> {
        let dim = in_shape.total() * out_shape.total();
        if !matrix.is_square() || matrix.rows() != dim {
            return Err(Error::Dimension(format!(
                "Choi matrix is {}x{}, expected {dim}x{dim}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_hermitian(TAU_HERM) {
            return Err(Error::Validation(format!(
                "Choi matrix is not Hermitian (residual {:e})",
                matrix.hermiticity_residual()
            )));
        }
        let tr = matrix.trace();
        if (tr - c(1.0, 0.0)).norm() > TAU_HERM {
            return Err(Error::Validation(format!(
                "Choi matrix has trace {tr}, expected 1"
            )));
        }
        Ok(ChoiState {
            matrix,
            in_shape,
            out_shape,
        })
    }

    /// Same as [`ChoiState::new`] with identical input and output party structure.
    pub fn square(matrix: ComplexMatrix, shape: TensorShape) -> Result<Self> {
        Self::new(matrix, shape.clone(), shape)
    }

    /// Internal constructor for matrices produced by exact algebra on valid states.
    pub(crate) fn from_parts(
        matrix: ComplexMatrix,
        in_shape: TensorShape,
        out_shape: TensorShape,
    ) -> Self {
        debug_assert_eq!(matrix.rows(), in_shape.total() * out_shape.total());
        ChoiState {
            matrix,
            in_shape,
            out_shape,
        }
    }

    /// Keeps the shapes of `self`, swapping in another matrix.
    pub(crate) fn with_matrix(&self, matrix: ComplexMatrix) -> Self {
        Self::from_parts(matrix, self.in_shape.clone(), self.out_shape.clone())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn in_shape(&self) -> &TensorShape {
        &self.in_shape
    }

    pub fn out_shape(&self) -> &TensorShape {
        &self.out_shape
    }

    pub fn d_in(&self) -> usize {
        self.in_shape.total()
    }

    pub fn d_out(&self) -> usize {
        self.out_shape.total()
    }

    /// Factor list out₁,…,out_N,in₁,…,in_N.
    pub fn full_shape(&self) -> TensorShape {
        self.out_shape.join(&self.in_shape)
    }

    /// Number of parties when input and output share one party structure.
    pub fn parties(&self) -> Option<usize> {
        (self.in_shape == self.out_shape).then(|| self.in_shape.len())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        herm_eig(&self.matrix)
            .map(|e| *e.values.last().unwrap())
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// max |tr_out E − 𝟙/d_A|.
    pub fn tp_residual(&self) -> f64 {
        let n_out = self.out_shape.len();
        let keep: Vec<usize> = (n_out..n_out + self.in_shape.len()).collect();
        let reduced =
            partial_trace(&self.matrix, &self.full_shape(), &keep).expect("consistent shape");
        let target = ComplexMatrix::identity(self.d_in()).scale_re(1.0 / self.d_in() as f64);
        reduced.max_abs_diff(&target)
    }

    pub fn is_cp(&self) -> bool {
        self.min_eigenvalue() >= -TAU_HERM
    }

    pub fn is_tp(&self) -> bool {
        self.tp_residual() <= TAU_HERM
    }

    pub fn validate(&self) -> ValidationReport {
        let min_eigenvalue = self.min_eigenvalue();
        let tp_residual = self.tp_residual();
        ValidationReport {
            hermitian: self.matrix.is_hermitian(TAU_HERM),
            cp: min_eigenvalue >= -TAU_HERM,
            tp: tp_residual <= TAU_HERM,
            trace: self.matrix.trace().re,
            min_eigenvalue,
            tp_residual,
        }
    }

    /// Errors unless the state is a CP, TP map.
    pub fn require_channel(&self) -> Result<()> {
        let r = self.validate();
        if !r.cp {
            return Err(Error::NotCp {
                min_eigenvalue: r.min_eigenvalue,
            });
        }
        if !r.tp {
            return Err(Error::NotTp {
                residual: r.tp_residual,
            });
        }
        Ok(())
    }

    /// State-side local operation (post ⊗ preᵀ)·E·(…)†: the circuit applies `pre` before
    /// the channel and `post` after it.
    pub fn conjugate_local(&self, post: &ComplexMatrix, pre: &ComplexMatrix) -> Result<ChoiState> {
        if post.rows() != self.d_out() || pre.rows() != self.d_in() {
            return Err(Error::Dimension(
                "local operation does not match channel dimensions".into(),
            ));
        }
        let o = kron(post, &pre.transpose());
        Ok(self.with_matrix(self.matrix.conjugate_by(&o)))
    }

    /// Convex combination Σ wᵢ Eᵢ of states with matching shapes.
    pub fn mix(terms: &[(f64, &ChoiState)]) -> Result<ChoiState> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Validation("empty mixture".into()))?
            .1;
        let mut acc = ComplexMatrix::zeros(first.matrix.rows(), first.matrix.cols());
        for (w, e) in terms {
            if e.in_shape != first.in_shape || e.out_shape != first.out_shape {
                return Err(Error::Dimension(
                    "mixture of differently shaped Choi states".into(),
                ));
            }
            acc += &e.matrix.scale_re(*w);
        }
        Ok(first.with_matrix(acc))
    }
}

/// 𝓔(ρ) via 𝓔(|j⟩⟨l|)_{ik} = d_A·E_{(i,j),(k,l)}.
pub fn apply(e: &ChoiState, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (din, dout) = (e.d_in(), e.d_out());
    if !rho.is_square() || rho.rows() != din {
        return Err(Error::Dimension(format!(
            "input matrix is {}x{}, channel expects {din}x{din}",
            rho.rows(),
            rho.cols()
        )));
    }
    let m = &e.matrix;
    let scale = din as f64;
    let mut out = ComplexMatrix::zeros(dout, dout);
    for i in 0..dout {
        for k in 0..dout {
            let mut acc = ZERO;
            for j in 0..din {
                for l in 0..din {
                    let r = rho[(j, l)];
                    if r != ZERO {
                        acc += m[(i * din + j, k * din + l)] * r;
                    }
                }
            }
            out[(i, k)] = acc * scale;
        }
    }
    Ok(out)
}

/// Pure Choi state of ρ ↦ UρU†.
pub fn choi_of_unitary(u: &ComplexMatrix, shape: &TensorShape) -> Result<ChoiState> {
    if !u.is_square() || u.rows() != shape.total() {
        return Err(Error::Dimension(
            "unitary does not match the tensor shape".into(),
        ));
    }
    if !u.is_unitary(1e-10) {
        return Err(Error::Validation("matrix is not unitary".into()));
    }
    let v = unnormalized_choi_vector(u);
    let m = ComplexMatrix::outer(&v, &v).scale_re(1.0 / u.cols() as f64);
    Ok(ChoiState::from_parts(m, shape.clone(), shape.clone()))
}

/// |Ψ_U⟩ = (U ⊗ 𝟙)|Φ⟩.
pub fn choi_vector(u: &ComplexMatrix) -> Vec<C64> {
    kron(u, &ComplexMatrix::identity(u.cols())).matvec(&phi_vector(u.cols()))
}

/// √d·|Ψ_U⟩, free of the 1/√d rounding.
fn unnormalized_choi_vector(u: &ComplexMatrix) -> Vec<C64> {
    let d = u.cols();
    let mut phi = vec![ZERO; d * d];
    (0..d).for_each(|j| phi[j * d + j] = c(1.0, 0.0));
    kron(u, &ComplexMatrix::identity(d)).matvec(&phi)
}

/// Kraus operators Kᵢ: d_out × d_in.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    pub operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.operators[0].rows(), self.operators[0].rows());
        for k in &self.operators {
            out += &(&(k * rho) * &k.adjoint());
        }
        out
    }

    /// Σ Kᵢ†Kᵢ.
    pub fn completeness(&self) -> ComplexMatrix {
        let n = self.operators[0].cols();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in &self.operators {
            out += &(&k.adjoint() * k);
        }
        out
    }
}

/// E = (1/d_A) Σ |Kᵢ⟩⟩⟨⟨Kᵢ| with |K⟩⟩ the row-major vectorization.
pub fn choi_from_kraus(
    kraus: &KrausSet,
    in_shape: &TensorShape,
    out_shape: &TensorShape,
) -> Result<ChoiState> {
    let (din, dout) = (in_shape.total(), out_shape.total());
    let mut m = ComplexMatrix::zeros(din * dout, din * dout);
    for k in &kraus.operators {
        if k.rows() != dout || k.cols() != din {
            return Err(Error::Dimension(
                "Kraus operator does not match the shapes".into(),
            ));
        }
        let v = k.data().to_vec();
        m += &ComplexMatrix::outer(&v, &v);
    }
    Ok(ChoiState::from_parts(
        m.scale_re(1.0 / din as f64),
        in_shape.clone(),
        out_shape.clone(),
    ))
}

/// Kᵢ = √d_A · √λᵢ · reshape(vᵢ) for every eigenvalue above τ_rank.
pub fn kraus_from_choi(e: &ChoiState) -> Result<KrausSet> {
    let eig = herm_eig(&e.matrix)?;
    let min = *eig.values.last().unwrap();
    if min < -TAU_HERM {
        return Err(Error::NotCp {
            min_eigenvalue: min,
        });
    }
    let (din, dout) = (e.d_in(), e.d_out());
    let mut ops = Vec::new();
    for (idx, &lam) in eig.values.iter().enumerate() {
        if lam <= TAU_RANK {
            continue;
        }
        let s = (din as f64 * lam).sqrt();
        let v = eig.vectors.col(idx);
        ops.push(ComplexMatrix::from_fn(dout, din, |a, b| v[a * din + b] * s));
    }
    Ok(KrausSet { operators: ops })
}

/// (B_out ⊗ B_in)·E·(C_out ⊗ C_in); the map becomes ρ ↦ B_out 𝓔(B_inᵀ ρ C_inᵀ) C_out.
pub fn sandwich(
    e: &ChoiState,
    b_out: &ComplexMatrix,
    c_out: &ComplexMatrix,
    b_in: &ComplexMatrix,
    c_in: &ComplexMatrix,
) -> Result<ChoiState> {
    let (din, dout) = (e.d_in(), e.d_out());
    for (m, d) in [(b_out, dout), (c_out, dout), (b_in, din), (c_in, din)] {
        if m.rows() != d || m.cols() != d {
            return Err(Error::Dimension(
                "sandwich operator does not match channel dimensions".into(),
            ));
        }
    }
    let left = kron(b_out, b_in);
    let right = kron(c_out, c_in);
    Ok(e.with_matrix(&(&left * &e.matrix) * &right))
}

/// f = ⟨Ψ_U|E|Ψ_U⟩.
pub fn jamiolkowski_fidelity(e: &ChoiState, u: &ComplexMatrix) -> Result<f64> {
    if !u.is_square() || u.rows() != e.d_out() || u.cols() != e.d_in() {
        return Err(Error::Dimension(
            "target unitary does not match channel dimensions".into(),
        ));
    }
    if !u.is_unitary(1e-10) {
        return Err(Error::Validation("target is not unitary".into()));
    }
    let v = unnormalized_choi_vector(u);
    Ok(e.matrix.sandwich_vec(&v, &v).re / u.cols() as f64)
}

/// F̄ = (f·d + 1)/(d + 1).
pub fn average_fidelity(f: f64, d: usize) -> f64 {
    (f * d as f64 + 1.0) / (d as f64 + 1.0)
}

/// ½‖E − F‖₁.
pub fn trace_distance(e: &ChoiState, f: &ChoiState) -> Result<f64> {
    if e.in_shape != f.in_shape || e.out_shape != f.out_shape {
        return Err(Error::Dimension(
            "trace distance between differently shaped states".into(),
        ));
    }
    let diff = &e.matrix - &f.matrix;
    Ok(0.5 * herm_eig(&diff)?.values.iter().map(|x| x.abs()).sum::<f64>())
}

/// f·P_Φ + (1−f)(𝟙−P_Φ)/(d²−1) on one d-level party.
pub fn isotropic_state(d: usize, f: f64) -> ChoiState {
    let phi = phi_vector(d);
    let p = ComplexMatrix::outer(&phi, &phi);
    let n = d * d;
    let rest = (&ComplexMatrix::identity(n) - &p).scale_re((1.0 - f) / (n as f64 - 1.0));
    let shape = TensorShape::new(vec![d]).expect("d >= 2");
    ChoiState::from_parts(&p.scale_re(f) + &rest, shape.clone(), shape)
}

/// Whether `m` is positive under partial transposition of the listed subsystems.
pub fn is_ppt(m: &ComplexMatrix, shape: &TensorShape, transposed: &[usize]) -> Result<bool> {
    let mut t = m.clone();
    for &s in transposed {
        t = partial_transpose(&t, shape, s)?;
    }
    Ok(herm_eig(&t)?.values.last().copied().unwrap_or(0.0) >= -1e-12)
}

/// Entanglement-breaking test for isotropic states (f ≤ 1/d) and qubit channels (PPT).
pub fn is_entanglement_breaking(e: &ChoiState) -> Result<bool> {
    if e.in_shape.len() == 1 && e.in_shape == e.out_shape {
        let d = e.d_in();
        let f = e.matrix.sandwich_vec(&phi_vector(d), &phi_vector(d)).re;
        if e.matrix.max_abs_diff(isotropic_state(d, f).matrix()) <= TAU_FORM {
            return Ok(f <= 1.0 / d as f64 + 1e-12);
        }
        if d == 2 {
            return is_ppt(&e.matrix, &e.full_shape(), &[1]);
        }
    }
    Err(Error::Validation(
        "entanglement-breaking test covers qubit channels and isotropic states only".into(),
    ))
}

/// Stinespring dilation: 𝓔(ρ) = tr_C[U (ρ ⊗ |0⟩⟨0|) U†].
#[derive(Clone, Debug)]
pub struct Purification {
    pub unitary: ComplexMatrix,
    pub env_dim: usize,
    kraus: KrausSet,
}

impl Purification {
    /// Reduced evolution of the system.
    pub fn reduced_channel(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let ds = rho.rows();
        let mut env0 = ComplexMatrix::zeros(self.env_dim, self.env_dim);
        env0[(0, 0)] = c(1.0, 0.0);
        let full = kron(rho, &env0).conjugate_by(&self.unitary);
        if self.env_dim == 1 {
            return full;
        }
        let shape = TensorShape::new(vec![ds, self.env_dim]).expect("dims >= 2");
        partial_trace(&full, &shape, &[0]).expect("shape")
    }

    /// W = √(d_A d_C) Σ ψ_{ijk} |i⟩⟨j|⟨k| from a purification |ψ⟩ of E; satisfies
    /// 𝓔(ρ) = W (ρ ⊗ 𝟙/d_C) W†.
    pub fn dilation_operator(&self) -> ComplexMatrix {
        let dc = self.env_dim;
        let k0 = &self.kraus.operators[0];
        let (dout, din) = (k0.rows(), k0.cols());
        let s = (dc as f64).sqrt();
        ComplexMatrix::from_fn(dout, din * dc, |i, col| {
            let (j, k) = (col / dc, col % dc);
            self.kraus.operators[k][(i, j)] * s
        })
    }
}

pub fn purify(e: &ChoiState) -> Result<Purification> {
    if !e.is_tp() {
        return Err(Error::NotTp {
            residual: e.tp_residual(),
        });
    }
    if e.d_in() != e.d_out() {
        return Err(Error::Dimension(
            "purification needs equal input and output dimensions".into(),
        ));
    }
    let kraus = kraus_from_choi(e)?;
    let d = e.d_in();
    let r = kraus.operators.len();
    let n = d * r;
    // Columns (j, 0) carry the isometry Σ_k K_k|j⟩|k⟩; the rest are completed by Gram–Schmidt.
    let mut cols: Vec<Option<Vec<C64>>> = vec![None; n];
    for j in 0..d {
        let mut v = vec![ZERO; n];
        for (k, op) in kraus.operators.iter().enumerate() {
            for a in 0..d {
                v[a * r + k] = op[(a, j)];
            }
        }
        cols[j * r] = Some(v);
    }
    let mut basis: Vec<Vec<C64>> = cols.iter().flatten().cloned().collect();
    let mut candidates = (0..n).map(|i| {
        let mut v = vec![ZERO; n];
        v[i] = c(1.0, 0.0);
        v
    });
    for slot in cols.iter_mut() {
        if slot.is_some() {
            continue;
        }
        loop {
            let mut v = candidates
                .next()
                .ok_or_else(|| Error::Validation("unitary completion failed".into()))?;
            for b in &basis {
                let ov: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= ov * y);
            }
            let nv = vec_norm(&v);
            if nv > 1e-8 {
                let v: Vec<C64> = v.iter().map(|x| x / nv).collect();
                basis.push(v.clone());
                *slot = Some(v);
                break;
            }
        }
    }
    let cols: Vec<Vec<C64>> = cols.into_iter().map(|c| c.unwrap()).collect();
    let unitary = ComplexMatrix::from_fn(n, n, |row, col| cols[col][row]);
    Ok(Purification {
        unitary,
        env_dim: r,
        kraus,
    })
}

/// JSON channel format: `{"in_dims","out_dims","choi_re","choi_im"}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChoiJson {
    pub in_dims: Vec<usize>,
    pub out_dims: Vec<usize>,
    pub choi_re: Vec<Vec<f64>>,
    pub choi_im: Vec<Vec<f64>>,
}

impl From<&ChoiState> for ChoiJson {
    fn from(e: &ChoiState) -> Self {
        let (re, im) = split_matrix(&e.matrix);
        ChoiJson {
            in_dims: e.in_shape.factors().to_vec(),
            out_dims: e.out_shape.factors().to_vec(),
            choi_re: re,
            choi_im: im,
        }
    }
}

impl TryFrom<ChoiJson> for ChoiState {
    type Error = Error;
    fn try_from(j: ChoiJson) -> Result<Self> {
        let m = join_matrix(&j.choi_re, &j.choi_im)?;
        ChoiState::new(
            m,
            TensorShape::new(j.in_dims)?,
            TensorShape::new(j.out_dims)?,
        )
    }
}

pub fn split_matrix(m: &ComplexMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let re = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].re).collect())
        .collect();
    let im = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].im).collect())
        .collect();
    (re, im)
}

pub fn join_matrix(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<ComplexMatrix> {
    let rows = re.len();
    let cols = re.first().map_or(0, |r| r.len());
    if im.len() != rows || re.iter().chain(im).any(|r| r.len() != cols) {
        return Err(Error::Dimension(
            "real and imaginary parts have inconsistent shapes".into(),
        ));
    }
    let data = re
        .iter()
        .zip(im)
        .flat_map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| c(a, b)))
        .collect();
    ComplexMatrix::from_vec(rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{gate, phase_gate, sigma, sigma_bell_product, GateKind};

    fn qubit() -> TensorShape {
        TensorShape::new(vec![2]).unwrap()
    }

    fn matrix_unit(d: usize, j: usize, l: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, l)] = c(1.0, 0.0);
        m
    }

    fn amplitude_damping(g: f64) -> KrausSet {
        let k0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - g).sqrt()]]);
        let k1 = ComplexMatrix::from_real_rows(&[&[0.0, g.sqrt()], &[0.0, 0.0]]);
        KrausSet {
            operators: vec![k0, k1],
        }
    }

    #[test]
    fn identity_channel_acts_trivially() {
        let e = choi_of_unitary(&ComplexMatrix::identity(2), &qubit()).unwrap();
        let rho = ComplexMatrix::from_rows(&[
            vec![c(0.7, 0.0), c(0.1, 0.2)],
            vec![c(0.1, -0.2), c(0.3, 0.0)],
        ]);
        assert!(apply(&e, &rho).unwrap().max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn kraus_round_trip_on_matrix_units() {
        let k = amplitude_damping(0.3);
        let e = choi_from_kraus(&k, &qubit(), &qubit()).unwrap();
        assert!(e.is_cp() && e.is_tp());
        for j in 0..2 {
            for l in 0..2 {
                let m = matrix_unit(2, j, l);
                assert!(apply(&e, &m).unwrap().max_abs_diff(&k.apply(&m)) < 1e-14);
            }
        }
        let k2 = kraus_from_choi(&e).unwrap();
        assert_eq!(k2.operators.len(), 2);
        assert!(k2.completeness().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        for j in 0..2 {
            for l in 0..2 {
                let m = matrix_unit(2, j, l);
                assert!(k2.apply(&m).max_abs_diff(&k.apply(&m)) < 1e-12);
            }
        }
    }

    #[test]
    fn depolarizing_action() {
        let alpha = 0.4;
        let f = (3.0 * alpha + 1.0) / 4.0;
        let e = isotropic_state(2, f);
        let rho = ComplexMatrix::from_rows(&[
            vec![c(0.6, 0.0), c(0.2, 0.1)],
            vec![c(0.2, -0.1), c(0.4, 0.0)],
        ]);
        let want = &rho.scale_re(alpha) + &ComplexMatrix::identity(2).scale_re((1.0 - alpha) / 2.0);
        assert!(apply(&e, &rho).unwrap().max_abs_diff(&want) < 1e-14);
        let k = kraus_from_choi(&isotropic_state(2, 0.25)).unwrap();
        assert_eq!(k.operators.len(), 4);
    }

    #[test]
    fn phase_gate_choi_is_bell_combination() {
        let a = 0.37;
        let e = choi_of_unitary(&phase_gate(a), &TensorShape::uniform(2, 2).unwrap()).unwrap();
        let p00 = sigma_bell_product(&[0, 0]);
        let p22 = sigma_bell_product(&[2, 2]);
        let want: Vec<C64> = p00
            .iter()
            .zip(&p22)
            .map(|(x, y)| x * a.cos() - y * c(0.0, a.sin()))
            .collect();
        assert!(e.matrix().max_abs_diff(&ComplexMatrix::outer(&want, &want)) < 1e-14);
    }

    #[test]
    fn swap_choi_pairs_crosswise() {
        let e = choi_of_unitary(
            &gate(GateKind::Swap).matrix,
            &TensorShape::uniform(2, 2).unwrap(),
        )
        .unwrap();
        // |Φ⟩ on (out2,in1) and on (out1,in2): amplitude 1/2 where out2=in1 and out1=in2.
        for idx in 0..16 {
            let (o1, o2, i1, i2) = (idx >> 3 & 1, idx >> 2 & 1, idx >> 1 & 1, idx & 1);
            let want = if o2 == i1 && o1 == i2 { 0.25 } else { 0.0 };
            assert!((e.matrix()[(idx, idx)].re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn sandwich_matches_composition() {
        let k = amplitude_damping(0.45);
        let e = choi_from_kraus(&k, &qubit(), &qubit()).unwrap();
        let v = crate::linalg::mat_exp(&sigma(1).scale(c(0.0, -0.4)));
        let conj = sandwich(&e, &v, &v.adjoint(), &v.conj(), &v.transpose()).unwrap();
        let rho = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.3, 0.1)],
            vec![c(0.3, -0.1), c(0.5, 0.0)],
        ]);
        let lhs = apply(&conj, &rho).unwrap();
        let rhs = apply(&e, &rho.conjugate_by(&v.adjoint()))
            .unwrap()
            .conjugate_by(&v);
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn fidelity_and_distance() {
        let e = isotropic_state(3, 0.8);
        let f = jamiolkowski_fidelity(&e, &ComplexMatrix::identity(3)).unwrap();
        assert!((f - 0.8).abs() < 1e-14);
        assert!((average_fidelity(f, 3) - (0.8 * 3.0 + 1.0) / 4.0).abs() < 1e-15);
        assert_eq!(trace_distance(&e, &e).unwrap(), 0.0);
        let p = choi_of_unitary(&ComplexMatrix::identity(2), &qubit()).unwrap();
        let mixed = isotropic_state(2, 0.25);
        assert!((trace_distance(&p, &mixed).unwrap() - 0.75).abs() < 1e-14);
    }

    #[test]
    fn entanglement_breaking_boundary() {
        assert!(!is_entanglement_breaking(&isotropic_state(2, 0.6)).unwrap());
        assert!(is_entanglement_breaking(&isotropic_state(2, 0.5)).unwrap());
        let p = choi_of_unitary(&ComplexMatrix::identity(2), &qubit()).unwrap();
        assert!(!is_entanglement_breaking(&p).unwrap());
        let ad = choi_from_kraus(&amplitude_damping(1.0), &qubit(), &qubit()).unwrap();
        assert!(is_entanglement_breaking(&ad).unwrap());
    }

    #[test]
    fn purification_reproduces_channel() {
        for g in [0.0, 0.3, 1.0] {
            let e = choi_from_kraus(&amplitude_damping(g), &qubit(), &qubit()).unwrap();
            let p = purify(&e).unwrap();
            assert!(p.unitary.is_unitary(1e-10));
            assert!(p.env_dim <= 4);
            let w = p.dilation_operator();
            let mix = ComplexMatrix::identity(p.env_dim).scale_re(1.0 / p.env_dim as f64);
            for j in 0..2 {
                for l in 0..2 {
                    let m = matrix_unit(2, j, l);
                    let want = apply(&e, &m).unwrap();
                    assert!(p.reduced_channel(&m).max_abs_diff(&want) < 1e-9);
                    let via_w = &(&w * &kron(&m, &mix)) * &w.adjoint();
                    assert!(via_w.max_abs_diff(&want) < 1e-9);
                }
            }
        }
        let id = choi_of_unitary(&ComplexMatrix::identity(2), &qubit()).unwrap();
        let p = purify(&id).unwrap();
        assert_eq!(p.env_dim, 1);
        assert!(p.unitary.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let e = isotropic_state(2, 0.9);
        let j = ChoiJson::from(&e);
        let back = ChoiState::try_from(j.clone()).unwrap();
        assert_eq!(back, e);
        let mut bad = j;
        bad.choi_im.pop();
        assert!(ChoiState::try_from(bad).is_err());
    }

    #[test]
    fn constructor_rejects_bad_states() {
        let shape = qubit();
        assert!(ChoiState::square(ComplexMatrix::identity(4), shape.clone()).is_err());
        assert!(ChoiState::square(ComplexMatrix::identity(3).scale_re(1.0 / 3.0), shape).is_err());
    }
}
