//! Standard-form parameter extraction, reconstruction and pattern certification.
//!
//! Gate forms are read in the two-qubit Bell-product basis [`BASIS_ORDERING`]. Their block
//! parameters describe the noise operator N = E − f·|Ψ_U⟩⟨Ψ_U| (unnormalized, tr N = 1 − f);
//! dividing by 1 − f gives the normalized noise coefficients.

use crate::channel::{choi_vector, ChoiState};
use crate::error::{Error, PatternViolation, Result};
use crate::linalg::{
    c, kron_all, permute_subsystems, ComplexMatrix, TensorShape, C64, I, ONE, TAU_FORM,
};
use crate::pauli::{
    basis_ordering_matrix, bell_product, gen_pauli, lu_cnot_unitaries, phase_gate, phi_vector,
    BASIS_ORDERING,
};
use serde::Serialize;
use std::f64::consts::FRAC_PI_4;

/// One real parameter spread over basis entries: M[r][c] += κ·value.
struct Slot {
    entries: Vec<(usize, usize, C64)>,
}

impl Slot {
    fn new(entries: Vec<(usize, usize, C64)>) -> Self {
        Slot { entries }
    }

    /// Orthogonal projection coefficient of `m` onto this slot.
    fn project(&self, m: &ComplexMatrix) -> f64 {
        let num: f64 = self
            .entries
            .iter()
            .map(|&(r, col, k)| (k.conj() * m[(r, col)]).re)
            .sum();
        let den: f64 = self.entries.iter().map(|&(_, _, k)| k.norm_sqr()).sum();
        num / den
    }
}

fn reconstruct_slots(slots: &[Slot], values: &[f64], dim: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (s, &v) in slots.iter().zip(values) {
        for &(r, col, k) in &s.entries {
            m[(r, col)] += k * v;
        }
    }
    m
}

/// Entries where `m` departs from `model` by more than τ_form.
fn violations(m: &ComplexMatrix, model: &ComplexMatrix) -> Vec<PatternViolation> {
    let mut out = Vec::new();
    for r in 0..m.rows() {
        for col in 0..m.cols() {
            let diff = (m[(r, col)] - model[(r, col)]).norm();
            if diff > TAU_FORM {
                let want = model[(r, col)];
                let expected = if want.norm() == 0.0 {
                    "0".to_string()
                } else {
                    format!("{:.6e}{:+.6e}i", want.re, want.im)
                };
                out.push(PatternViolation {
                    row: r,
                    col,
                    expected,
                    magnitude: diff,
                });
            }
        }
    }
    out
}

fn check_pattern(form: &str, m: &ComplexMatrix, model: &ComplexMatrix) -> Result<()> {
    let v = violations(m, model);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Pattern {
            form: form.to_string(),
            violations: v,
        })
    }
}

fn require_qubit_pair(e: &ChoiState) -> Result<()> {
    let two = TensorShape::uniform(2, 2)?;
    if e.in_shape() != &two || e.out_shape() != &two {
        return Err(Error::Dimension("two-qubit Choi state required".into()));
    }
    Ok(())
}

fn basis_labels() -> Vec<String> {
    BASIS_ORDERING
        .iter()
        .map(|(i, j)| format!("Psi{i}{j}"))
        .collect()
}

/// B†·E·B with B = columns of the [`BASIS_ORDERING`] basis.
pub fn to_gamma_basis(m: &ComplexMatrix) -> ComplexMatrix {
    let b = basis_ordering_matrix();
    &(&b.adjoint() * m) * &b
}

pub fn from_gamma_basis(m: &ComplexMatrix) -> ComplexMatrix {
    let b = basis_ordering_matrix();
    &(&b * m) * &b.adjoint()
}

/// Affine dimension of a family of real parameter vectors (numerical rank of differences).
pub fn affine_rank(samples: &[Vec<f64>], tol: f64) -> usize {
    if samples.len() < 2 {
        return 0;
    }
    let mut rows: Vec<Vec<f64>> = samples[1..]
        .iter()
        .map(|s| s.iter().zip(&samples[0]).map(|(a, b)| a - b).collect())
        .collect();
    let cols = rows[0].len();
    let scale = rows
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let mut rank = 0;
    for col in 0..cols {
        let pivot =
            (rank..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()));
        let Some(p) = pivot else { break };
        if rows[p][col].abs() <= tol * scale {
            continue;
        }
        rows.swap(rank, p);
        let pr = rows[rank].clone();
        for r in rows.iter_mut().skip(rank + 1) {
            let factor = r[col] / pr[col];
            r.iter_mut().zip(&pr).for_each(|(x, y)| *x -= factor * y);
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------------------------
// Pauli channel

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PauliChannelForm {
    pub d: usize,
    pub parties: usize,
    /// Per-party labels (k,l); weights[i] belongs to labels[i].
    pub labels: Vec<Vec<(usize, usize)>>,
    pub weights: Vec<f64>,
    pub basis_ordering: String,
}

fn pauli_labels(d: usize, parties: usize) -> Vec<Vec<(usize, usize)>> {
    let count = (d * d).pow(parties as u32);
    (0..count)
        .map(|idx| {
            (0..parties)
                .map(|p| {
                    let digit = (idx / (d * d).pow((parties - 1 - p) as u32)) % (d * d);
                    (digit / d, digit % d)
                })
                .collect()
        })
        .collect()
}

fn party_structure(e: &ChoiState) -> Result<(usize, usize)> {
    let n = e
        .parties()
        .ok_or_else(|| Error::Dimension("input and output parties differ".into()))?;
    let d = e.in_shape().factors()[0];
    if e.in_shape().factors().iter().any(|&x| x != d) {
        return Err(Error::Dimension(
            "all parties must share one dimension".into(),
        ));
    }
    Ok((d, n))
}

fn bell_matrix(d: usize, labels: &[Vec<(usize, usize)>]) -> Result<ComplexMatrix> {
    let cols = labels
        .iter()
        .map(|l| bell_product(d, l))
        .collect::<Result<Vec<_>>>()?;
    let n = cols.len();
    Ok(ComplexMatrix::from_fn(n, n, |r, k| cols[k][r]))
}

pub fn extract_pauli_channel(e: &ChoiState) -> Result<PauliChannelForm> {
    let (d, parties) = party_structure(e)?;
    let labels = pauli_labels(d, parties);
    let b = bell_matrix(d, &labels)?;
    let m = &(&b.adjoint() * e.matrix()) * &b;
    let weights: Vec<f64> = (0..labels.len()).map(|i| m[(i, i)].re).collect();
    let model = ComplexMatrix::diag(&weights.iter().map(|&w| c(w, 0.0)).collect::<Vec<_>>());
    check_pattern("pauli-channel", &m, &model)?;
    Ok(PauliChannelForm {
        d,
        parties,
        labels,
        weights,
        basis_ordering: "bell-product-lex".into(),
    })
}

impl PauliChannelForm {
    pub fn reconstruct(&self) -> Result<ChoiState> {
        let mut m = ComplexMatrix::zeros(self.weights.len(), self.weights.len());
        for (l, &w) in self.labels.iter().zip(&self.weights) {
            let v = bell_product(self.d, l)?;
            m += &ComplexMatrix::outer(&v, &v).scale_re(w);
        }
        let shape = TensorShape::uniform(self.d, self.parties)?;
        ChoiState::square(m, shape)
    }

    /// ρ ↦ Σ w_𝐤𝐥 U_𝐤𝐥 ρ U_𝐤𝐥†.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
        for (l, &w) in self.labels.iter().zip(&self.weights) {
            let ops = l
                .iter()
                .map(|&(k, ll)| gen_pauli(self.d, k, ll))
                .collect::<Result<Vec<_>>>()?;
            let u = kron_all(&ops.iter().collect::<Vec<_>>());
            out += &rho.conjugate_by(&u).scale_re(w);
        }
        Ok(out)
    }

    pub fn parameter_vector(&self) -> Vec<f64> {
        self.weights.clone()
    }
}

// ---------------------------------------------------------------------------------------------
// Multi-party white noise

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WhiteNoiseForm {
    pub d: usize,
    pub parties: usize,
    /// α_𝐤 for 𝐤 ∈ {0,1}^N, first party most significant; 0 ↦ P_Φ, 1 ↦ 𝟙/d².
    pub alphas: Vec<f64>,
    pub basis_ordering: String,
}

/// Per-pair operators (out_p, in_p) tensored and moved into Choi ordering.
fn pairs_operator(ops: &[&ComplexMatrix], d: usize) -> ComplexMatrix {
    let n = ops.len();
    let m = kron_all(ops);
    let shape = TensorShape::uniform(d, 2 * n).expect("d >= 2");
    let perm: Vec<usize> = (0..2 * n)
        .map(|k| if k < n { 2 * k } else { 2 * (k - n) + 1 })
        .collect();
    permute_subsystems(&m, &shape, &perm).expect("valid permutation")
}

fn isotropic_pair_ops(d: usize) -> ([ComplexMatrix; 2], [ComplexMatrix; 2]) {
    let phi = phi_vector(d);
    let p = ComplexMatrix::outer(&phi, &phi);
    let n = (d * d) as f64;
    let id = ComplexMatrix::identity(d * d);
    let gamma = (&id - &p).scale_re(1.0 / (n - 1.0));
    let basis = [p.clone(), id.scale_re(1.0 / n)];
    let dual = [&p - &gamma, gamma.scale_re(n)];
    (basis, dual)
}

fn white_noise_in_pairs(
    m: &ComplexMatrix,
    d: usize,
    parties: usize,
) -> Result<(Vec<f64>, ComplexMatrix)> {
    let (basis, dual) = isotropic_pair_ops(d);
    let count = 1usize << parties;
    let mut alphas = Vec::with_capacity(count);
    let mut model = ComplexMatrix::zeros(m.rows(), m.cols());
    for k in 0..count {
        let bits: Vec<usize> = (0..parties).map(|p| (k >> (parties - 1 - p)) & 1).collect();
        let delta = pairs_operator(&bits.iter().map(|&b| &dual[b]).collect::<Vec<_>>(), d);
        let alpha = delta.hs_inner(m).re;
        let g = pairs_operator(&bits.iter().map(|&b| &basis[b]).collect::<Vec<_>>(), d);
        model += &g.scale_re(alpha);
        alphas.push(alpha);
    }
    Ok((alphas, model))
}

pub fn extract_white_noise(e: &ChoiState) -> Result<WhiteNoiseForm> {
    let (d, parties) = party_structure(e)?;
    let (alphas, model) = white_noise_in_pairs(e.matrix(), d, parties)?;
    check_pattern("white-noise", e.matrix(), &model)?;
    Ok(WhiteNoiseForm {
        d,
        parties,
        alphas,
        basis_ordering: "isotropic-product".into(),
    })
}

impl WhiteNoiseForm {
    pub fn reconstruct(&self) -> Result<ChoiState> {
        let (basis, _) = isotropic_pair_ops(self.d);
        let dim = self.d.pow(2 * self.parties as u32);
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (k, &a) in self.alphas.iter().enumerate() {
            let ops: Vec<&ComplexMatrix> = (0..self.parties)
                .map(|p| &basis[(k >> (self.parties - 1 - p)) & 1])
                .collect();
            m += &pairs_operator(&ops, self.d).scale_re(a);
        }
        ChoiState::square(m, TensorShape::uniform(self.d, self.parties)?)
    }

    pub fn parameter_vector(&self) -> Vec<f64> {
        self.alphas.clone()
    }
}

// ---------------------------------------------------------------------------------------------
// SWAP

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwapForm {
    pub f: f64,
    /// α₀₀, α₀₁, α₁₀, α₁₁ in the crosswise pairing.
    pub alphas: [f64; 4],
    pub basis_ordering: String,
}

/// Swaps the two output factors so that (A′₂,A₁) and (A′₁,A₂) become ordinary pairs.
fn crosswise(m: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let shape = TensorShape::uniform(d, 4).expect("d >= 2");
    permute_subsystems(m, &shape, &[1, 0, 2, 3]).expect("valid permutation")
}

pub fn extract_swap_form(e: &ChoiState) -> Result<SwapForm> {
    let (d, parties) = party_structure(e)?;
    if parties != 2 {
        return Err(Error::Dimension("SWAP form needs two parties".into()));
    }
    let swapped = crosswise(e.matrix(), d);
    let (alphas, model) = white_noise_in_pairs(&swapped, d, 2)?;
    check_pattern("swap", &swapped, &model)?;
    let sw = crate::twirl::swap_matrix(d);
    let v = choi_vector(&sw);
    let f = e.matrix().sandwich_vec(&v, &v).re;
    Ok(SwapForm {
        f,
        alphas: [alphas[0], alphas[1], alphas[2], alphas[3]],
        basis_ordering: "crosswise-isotropic".into(),
    })
}

impl SwapForm {
    pub fn reconstruct(&self, d: usize) -> Result<ChoiState> {
        let w = WhiteNoiseForm {
            d,
            parties: 2,
            alphas: self.alphas.to_vec(),
            basis_ordering: String::new(),
        };
        let m = crosswise(w.reconstruct()?.matrix(), d);
        ChoiState::square(m, TensorShape::uniform(d, 2)?)
    }

    /// ρ ↦ SWAP·𝒟(ρ)·SWAP with 𝒟 the local/global white-noise map.
    pub fn apply(&self, rho: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
        let shape = TensorShape::uniform(d, 2)?;
        let id = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);
        let r1 = crate::linalg::partial_trace(rho, &shape, &[0])?;
        let r2 = crate::linalg::partial_trace(rho, &shape, &[1])?;
        let tr = rho.trace();
        let mut out = rho.scale_re(self.alphas[0]);
        out += &crate::linalg::kron(&r1, &id).scale_re(self.alphas[1]);
        out += &crate::linalg::kron(&id, &r2).scale_re(self.alphas[2]);
        out += &ComplexMatrix::identity(d * d).scale(tr * (self.alphas[3] / (d * d) as f64));
        Ok(out.conjugate_by(&crate::twirl::swap_matrix(d)))
    }

    pub fn parameter_vector(&self) -> Vec<f64> {
        let mut v = self.alphas.to_vec();
        v.push(self.f);
        v
    }
}

// ---------------------------------------------------------------------------------------------
// Phase gate

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Block00 {
    pub a: f64,
    pub a_tilde: f64,
    pub b: f64,
    pub b_tilde: f64,
    pub u: C64,
    pub v: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedBlock {
    pub diag: f64,
    pub diag_tilde: f64,
    pub off: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Block11 {
    pub e: f64,
    pub e_tilde: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseGateForm {
    pub alpha: f64,
    pub f: f64,
    pub block00: Block00,
    /// (c, c̃, w)
    pub block01: MixedBlock,
    /// (d, d̃, x)
    pub block10: MixedBlock,
    pub block11: Block11,
    pub basis_ordering: Vec<String>,
}

fn herm_pair(o: usize, r: usize, col: usize, k: C64) -> Vec<(usize, usize, C64)> {
    vec![(o + r, o + col, k), (o + col, o + r, k.conj())]
}

fn cat(parts: Vec<Vec<(usize, usize, C64)>>) -> Vec<(usize, usize, C64)> {
    parts.into_iter().flatten().collect()
}

/// Slots in order: a, ã, b, b̃, Re u, Im u, Re v, Im v, then (c, c̃, Re w, Im w), (d, d̃, Re x, Im x), e, ẽ.
fn phase_slots() -> Vec<Slot> {
    let mut s = vec![
        Slot::new(vec![(0, 0, ONE)]),
        Slot::new(vec![(3, 3, ONE)]),
        Slot::new(vec![(1, 1, ONE)]),
        Slot::new(vec![(2, 2, ONE)]),
        Slot::new(herm_pair(0, 0, 3, ONE)),
        Slot::new(herm_pair(0, 0, 3, I)),
        Slot::new(herm_pair(0, 1, 2, ONE)),
        Slot::new(herm_pair(0, 1, 2, I)),
    ];
    for o in [4, 8] {
        s.push(Slot::new(vec![(o, o, ONE), (o + 1, o + 1, ONE)]));
        s.push(Slot::new(vec![(o + 2, o + 2, ONE), (o + 3, o + 3, ONE)]));
        s.push(Slot::new(cat(vec![
            herm_pair(o, 0, 3, ONE),
            herm_pair(o, 1, 2, -ONE),
        ])));
        s.push(Slot::new(cat(vec![
            herm_pair(o, 0, 3, I),
            herm_pair(o, 1, 2, -I),
        ])));
    }
    s.push(Slot::new((12..16).map(|i| (i, i, ONE)).collect()));
    s.push(Slot::new(cat(vec![
        herm_pair(12, 0, 3, ONE),
        herm_pair(12, 1, 2, -ONE),
    ])));
    s
}

fn gate_noise_in_basis(e: &ChoiState, u: &ComplexMatrix) -> (f64, ComplexMatrix, ComplexMatrix) {
    let v = choi_vector(u);
    let f = e.matrix().sandwich_vec(&v, &v).re;
    let full = to_gamma_basis(e.matrix());
    let ideal = to_gamma_basis(&ComplexMatrix::outer(&v, &v));
    let noise = &full - &ideal.scale_re(f);
    (f, full, noise)
}

pub fn extract_phase_gate_form(e: &ChoiState, alpha: f64) -> Result<PhaseGateForm> {
    require_qubit_pair(e)?;
    let u = phase_gate(alpha);
    let (f, full, noise) = gate_noise_in_basis(e, &u);
    let slots = phase_slots();
    let vals: Vec<f64> = slots.iter().map(|s| s.project(&noise)).collect();
    let model = reconstruct_slots(&slots, &vals, 16);
    check_pattern("phase-gate", &full, &(&model + &(&full - &noise)))?;
    Ok(PhaseGateForm::from_values(alpha, f, &vals))
}

impl PhaseGateForm {
    fn from_values(alpha: f64, f: f64, v: &[f64]) -> Self {
        PhaseGateForm {
            alpha,
            f,
            block00: Block00 {
                a: v[0],
                a_tilde: v[1],
                b: v[2],
                b_tilde: v[3],
                u: c(v[4], v[5]),
                v: c(v[6], v[7]),
            },
            block01: MixedBlock {
                diag: v[8],
                diag_tilde: v[9],
                off: c(v[10], v[11]),
            },
            block10: MixedBlock {
                diag: v[12],
                diag_tilde: v[13],
                off: c(v[14], v[15]),
            },
            block11: Block11 {
                e: v[16],
                e_tilde: v[17],
            },
            basis_ordering: basis_labels(),
        }
    }

    /// The 18 block values in slot order.
    pub fn block_values(&self) -> Vec<f64> {
        let b = &self.block00;
        vec![
            b.a,
            b.a_tilde,
            b.b,
            b.b_tilde,
            b.u.re,
            b.u.im,
            b.v.re,
            b.v.im,
            self.block01.diag,
            self.block01.diag_tilde,
            self.block01.off.re,
            self.block01.off.im,
            self.block10.diag,
            self.block10.diag_tilde,
            self.block10.off.re,
            self.block10.off.im,
            self.block11.e,
            self.block11.e_tilde,
        ]
    }

    /// Noise operator N in the Γ basis.
    pub fn noise_in_basis(&self) -> ComplexMatrix {
        reconstruct_slots(&phase_slots(), &self.block_values(), 16)
    }

    pub fn reconstruct(&self) -> Result<ChoiState> {
        let v = choi_vector(&phase_gate(self.alpha));
        let m = &ComplexMatrix::outer(&v, &v).scale_re(self.f)
            + &from_gamma_basis(&self.noise_in_basis());
        ChoiState::square(m, TensorShape::uniform(2, 2)?)
    }

    /// f followed by the 18 block values.
    pub fn parameter_vector(&self) -> Vec<f64> {
        let mut v = vec![self.f];
        v.extend(self.block_values());
        v
    }
}

// ---------------------------------------------------------------------------------------------
// CNOT (in the U(π/4) frame)

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CnotForm {
    pub f: f64,
    pub a: f64,
    pub b: f64,
    pub u: f64,
    pub v: f64,
    pub c: f64,
    pub w: f64,
    pub d: f64,
    pub x: f64,
    pub e: f64,
    pub basis_ordering: Vec<String>,
}

/// Slots a, b, u, v, c, w, d, x, e.
fn cnot_slots() -> Vec<Slot> {
    let mut s = vec![
        Slot::new(vec![(0, 0, ONE), (3, 3, ONE)]),
        Slot::new(vec![(1, 1, ONE), (2, 2, ONE)]),
        Slot::new(herm_pair(0, 0, 3, I)),
        Slot::new(herm_pair(0, 1, 2, I)),
    ];
    for o in [4, 8] {
        s.push(Slot::new((o..o + 4).map(|i| (i, i, ONE)).collect()));
        s.push(Slot::new(cat(vec![
            herm_pair(o, 0, 3, ONE),
            herm_pair(o, 1, 2, -ONE),
        ])));
    }
    s.push(Slot::new((12..16).map(|i| (i, i, ONE)).collect()));
    s
}

pub fn extract_cnot_form(e: &ChoiState) -> Result<CnotForm> {
    require_qubit_pair(e)?;
    let (f, full, noise) = gate_noise_in_basis(e, &phase_gate(FRAC_PI_4));
    let slots = cnot_slots();
    let v: Vec<f64> = slots.iter().map(|s| s.project(&noise)).collect();
    let model = reconstruct_slots(&slots, &v, 16);
    check_pattern("cnot", &full, &(&model + &(&full - &noise)))?;
    Ok(CnotForm {
        f,
        a: v[0],
        b: v[1],
        u: v[2],
        v: v[3],
        c: v[4],
        w: v[5],
        d: v[6],
        x: v[7],
        e: v[8],
        basis_ordering: basis_labels(),
    })
}

impl CnotForm {
    pub fn values(&self) -> Vec<f64> {
        vec![
            self.a, self.b, self.u, self.v, self.c, self.w, self.d, self.x, self.e,
        ]
    }

    pub fn noise_in_basis(&self) -> ComplexMatrix {
        reconstruct_slots(&cnot_slots(), &self.values(), 16)
    }

    pub fn reconstruct(&self) -> Result<ChoiState> {
        let v = choi_vector(&phase_gate(FRAC_PI_4));
        let m = &ComplexMatrix::outer(&v, &v).scale_re(self.f)
            + &from_gamma_basis(&self.noise_in_basis());
        ChoiState::square(m, TensorShape::uniform(2, 2)?)
    }

    pub fn parameter_vector(&self) -> Vec<f64> {
        let mut v = vec![self.f];
        v.extend(self.values());
        v
    }
}

/// Moves a noisy CNOT channel into the U(π/4) frame using CNOT = (U₁⊗U₂)·U(π/4)·(V₁⊗V₂).
pub fn cnot_to_phase_frame(e: &ChoiState) -> Result<ChoiState> {
    require_qubit_pair(e)?;
    let [u1, u2, v1, v2] = lu_cnot_unitaries();
    let post = crate::linalg::kron(&u1, &u2).adjoint();
    let pre = crate::linalg::kron(&v1, &v2).adjoint();
    e.conjugate_local(&post, &pre)
}

/// Inverse of [`cnot_to_phase_frame`].
pub fn phase_frame_to_cnot(e: &ChoiState) -> Result<ChoiState> {
    require_qubit_pair(e)?;
    let [u1, u2, v1, v2] = lu_cnot_unitaries();
    e.conjugate_local(
        &crate::linalg::kron(&u1, &u2),
        &crate::linalg::kron(&v1, &v2),
    )
}

/// Number of independent real parameters of each standard form, counted on trace-one states.
pub mod census {
    pub const PHASE_GATE: usize = 17;
    pub const CNOT: usize = 8;
    pub const SWAP: usize = 3;

    pub fn white_noise(parties: usize) -> usize {
        (1 << parties) - 1
    }

    pub fn pauli_channel(d: usize, parties: usize) -> usize {
        d.pow(2 * parties as u32) - 1
    }
}
