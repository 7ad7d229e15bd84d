//! Markovian generators 𝒵ρ = −i[H,ρ] − i[H_l,ρ] + Σ L_𝐤𝐥([σ_𝐤ρ, σ_𝐥] + [σ_𝐤, ρσ_𝐥]) on one or
//! two qubits, their transformation under fast local control, and the standard forms reached
//! by stroboscopic twirling.
//!
//! Superoperators act on row-major vectorized density matrices: vec(AρB) = (A ⊗ Bᵀ)·vec(ρ).

use crate::channel::ChoiState;
use crate::error::{Error, Result};
use crate::forms::{affine_rank, extract_pauli_channel, PauliChannelForm};
use crate::linalg::{
    kron, mat_exp, min_eigenvalue, ComplexMatrix, TensorShape, C64, TAU_FORM, TAU_HERM,
};
use crate::pauli::{pauli_product_basis, qubit_bell, sigma};
use crate::twirl::{depolarizing_set, pauli_set, phase_gate_set, TwirlSet};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct LindbladGenerator {
    h: ComplexMatrix,
    lamb: ComplexMatrix,
    gks: ComplexMatrix,
    qubits: usize,
}

/// Pauli products in lexicographic label order, identity excluded: the GKS basis.
fn gks_basis(qubits: usize) -> Vec<ComplexMatrix> {
    pauli_product_basis(qubits)
        .into_iter()
        .map(|(_, m)| m)
        .collect()
}

impl LindbladGenerator {
    pub fn new(h: ComplexMatrix, lamb: ComplexMatrix, gks: ComplexMatrix) -> Result<Self> {
        let d = h.rows();
        let qubits = match d {
            2 => 1,
            4 => 2,
            _ => {
                return Err(Error::Dimension(format!(
                    "generators act on one or two qubits, got dimension {d}"
                )))
            }
        };
        let n = d * d - 1;
        if !h.is_square()
            || lamb.rows() != d
            || !lamb.is_square()
            || gks.rows() != n
            || !gks.is_square()
        {
            return Err(Error::Dimension(format!(
                "expected {d}x{d} Hamiltonians and a {n}x{n} GKS matrix"
            )));
        }
        for (name, m) in [("H", &h), ("H_l", &lamb), ("GKS", &gks)] {
            if !m.is_hermitian(TAU_HERM) {
                return Err(Error::Validation(format!("{name} is not Hermitian")));
            }
        }
        let g = LindbladGenerator {
            h: h.hermitian_part(),
            lamb: lamb.hermitian_part(),
            gks: gks.hermitian_part(),
            qubits,
        };
        let min = min_eigenvalue(&g.gks)?;
        if min < -TAU_HERM {
            return Err(Error::Validation(format!(
                "GKS matrix is not positive (min eigenvalue {min:e})"
            )));
        }
        Ok(g)
    }

    /// Pure dissipation with the given GKS matrix.
    pub fn dissipative(gks: ComplexMatrix) -> Result<Self> {
        let d = ((gks.rows() + 1) as f64).sqrt().round() as usize;
        Self::new(ComplexMatrix::zeros(d, d), ComplexMatrix::zeros(d, d), gks)
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn lamb_shift(&self) -> &ComplexMatrix {
        &self.lamb
    }

    pub fn gks(&self) -> &ComplexMatrix {
        &self.gks
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    /// Same generator with every part multiplied by `s` (time rescaling).
    pub fn scaled(&self, s: f64) -> Self {
        LindbladGenerator {
            h: self.h.scale_re(s),
            lamb: self.lamb.scale_re(s),
            gks: self.gks.scale_re(s),
            qubits: self.qubits,
        }
    }

    /// d²×d² matrix of 𝒵 on row-major vec(ρ).
    pub fn superoperator(&self) -> ComplexMatrix {
        let d = self.dim();
        let id = ComplexMatrix::identity(d);
        let minus_i = C64::new(0.0, -1.0);
        let hh = &self.h + &self.lamb;
        let mut s = (&kron(&hh, &id) - &kron(&id, &hh.transpose())).scale(minus_i);
        let basis = gks_basis(self.qubits);
        for (k, sk) in basis.iter().enumerate() {
            for (l, sl) in basis.iter().enumerate() {
                let w = self.gks[(k, l)];
                if w.norm() == 0.0 {
                    continue;
                }
                let lk = sl * sk;
                let term = &(&kron(sk, &sl.transpose()).scale_re(2.0) - &kron(&lk, &id))
                    - &kron(&id, &lk.transpose());
                s += &term.scale(w);
            }
        }
        s
    }

    /// 𝓔_t = e^{𝒵t} as a Choi state.
    pub fn evolve(&self, t: f64) -> Result<ChoiState> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Validation(
                "evolution time must be a finite nonnegative number".into(),
            ));
        }
        choi_from_superoperator(&mat_exp(&self.superoperator().scale_re(t)), self.qubits)
    }

    /// Applies the generator to a density matrix.
    pub fn act(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = self.dim();
        let v = self.superoperator().matvec(rho.data());
        ComplexMatrix::from_vec(d, d, v).expect("d² entries")
    }
}

/// Choi state E[(i,j),(k,l)] = S[(i,k),(j,l)]/d of a superoperator on row-major vec(ρ).
pub fn choi_from_superoperator(s: &ComplexMatrix, qubits: usize) -> Result<ChoiState> {
    let d = 1usize << qubits;
    if s.rows() != d * d || !s.is_square() {
        return Err(Error::Dimension(
            "superoperator does not match the qubit count".into(),
        ));
    }
    let m = ComplexMatrix::from_fn(d * d, d * d, |r, col| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (col / d, col % d);
        s[(i * d + k, j * d + l)] / d as f64
    });
    ChoiState::square(m.hermitian_part(), TensorShape::uniform(2, qubits)?)
}

/// Superoperator of ρ ↦ UρU†.
pub fn unitary_superoperator(u: &ComplexMatrix) -> ComplexMatrix {
    kron(u, &u.conj())
}

/// Real orthogonal O with Uσ_𝐤U† = Σ_𝐤′ O_𝐤′𝐤 σ_𝐤′ over the traceless Pauli products.
pub fn orthogonal_of(u: &ComplexMatrix) -> Result<Vec<Vec<f64>>> {
    let d = u.rows();
    let qubits = match d {
        2 => 1,
        4 => 2,
        _ => {
            return Err(Error::Dimension(
                "orthogonal matrices are built for one or two qubits".into(),
            ))
        }
    };
    if !u.is_unitary(1e-10) {
        return Err(Error::Validation(
            "conjugating matrix is not unitary".into(),
        ));
    }
    let basis = gks_basis(qubits);
    let n = basis.len();
    let mut o = vec![vec![0.0; n]; n];
    for (k, sk) in basis.iter().enumerate() {
        let rotated = sk.conjugate_by(u);
        for (kp, skp) in basis.iter().enumerate() {
            let v = skp.hs_inner(&rotated).re / d as f64;
            o[kp][k] = if v.abs() < 1e-14 { 0.0 } else { v };
        }
    }
    Ok(o)
}

fn congruence(o: &[Vec<f64>], l: &ComplexMatrix) -> ComplexMatrix {
    let n = o.len();
    let om = ComplexMatrix::from_fn(n, n, |i, j| C64::new(o[i][j], 0.0));
    &(&om * l) * &om.transpose()
}

/// The generator of 𝒰∘e^{𝒵t}∘𝒰†.
pub fn conjugate_generator(z: &LindbladGenerator, u: &ComplexMatrix) -> Result<LindbladGenerator> {
    if u.rows() != z.dim() {
        return Err(Error::Dimension(
            "unitary does not match the generator".into(),
        ));
    }
    let o = orthogonal_of(u)?;
    Ok(LindbladGenerator {
        h: z.h.conjugate_by(u).hermitian_part(),
        lamb: z.lamb.conjugate_by(u).hermitian_part(),
        gks: congruence(&o, &z.gks).hermitian_part(),
        qubits: z.qubits,
    })
}

/// Convex combination Σ pᵢ 𝒵ᵢ.
pub fn average_generator(terms: &[(f64, &LindbladGenerator)]) -> Result<LindbladGenerator> {
    let first = terms
        .first()
        .ok_or_else(|| Error::Validation("empty generator average".into()))?
        .1;
    let total: f64 = terms.iter().map(|t| t.0).sum();
    if terms.iter().any(|t| t.0.is_nan() || t.0 <= 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::Validation(
            "averaging weights must be positive and sum to 1".into(),
        ));
    }
    let d = first.dim();
    let n = first.gks.rows();
    let mut out = LindbladGenerator {
        h: ComplexMatrix::zeros(d, d),
        lamb: ComplexMatrix::zeros(d, d),
        gks: ComplexMatrix::zeros(n, n),
        qubits: first.qubits,
    };
    for (p, z) in terms {
        if z.qubits != first.qubits {
            return Err(Error::Dimension(
                "generators act on different systems".into(),
            ));
        }
        out.h += &z.h.scale_re(*p);
        out.lamb += &z.lamb.scale_re(*p);
        out.gks += &z.gks.scale_re(*p);
    }
    Ok(out)
}

/// Σₖ uₖ 𝒰ₖ𝒵𝒰ₖ† over a conjugation-type twirl set.
pub fn twirl_generator(z: &LindbladGenerator, set: &TwirlSet) -> Result<LindbladGenerator> {
    let els = set.elements();
    if els
        .iter()
        .any(|e| e.pre.max_abs_diff(&e.post.adjoint()) > 1e-12)
    {
        return Err(Error::Validation(
            "generator twirls need pre = post†".into(),
        ));
    }
    let conj = els
        .iter()
        .map(|e| conjugate_generator(z, &e.post))
        .collect::<Result<Vec<_>>>()?;
    average_generator(
        &els.iter()
            .zip(&conj)
            .map(|(e, g)| (e.probability, g))
            .collect::<Vec<_>>(),
    )
}

// ---------------------------------------------------------------------------------------------
// Stroboscopic control

#[derive(Clone, Debug, PartialEq)]
pub struct PulseSegment {
    pub fraction: f64,
    pub unitary: ComplexMatrix,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    pub segments: Vec<PulseSegment>,
    pub steps: usize,
    pub total_time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionMode {
    Sequential,
    Random,
}

impl PulseSchedule {
    /// Equal fractions over the elements of a conjugation-type twirl set, weighted by probability.
    pub fn from_set(set: &TwirlSet, steps: usize, total_time: f64) -> Result<Self> {
        let segments = set
            .elements()
            .into_iter()
            .map(|e| PulseSegment {
                fraction: e.probability,
                unitary: e.post,
                label: e.label,
            })
            .collect();
        let s = PulseSchedule {
            segments,
            steps,
            total_time,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Validation("schedule needs at least one step".into()));
        }
        if !self.total_time.is_finite() || self.total_time < 0.0 {
            return Err(Error::Validation(
                "total time must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = self.segments.iter().map(|s| s.fraction).sum();
        if self.segments.is_empty()
            || self.segments.iter().any(|s| s.fraction < 0.0)
            || (total - 1.0).abs() > 1e-12
        {
            return Err(Error::Validation(
                "segment fractions must be nonnegative and sum to 1".into(),
            ));
        }
        if self.segments.iter().any(|s| !s.unitary.is_unitary(1e-10)) {
            return Err(Error::Validation(
                "schedule contains a non-unitary control".into(),
            ));
        }
        Ok(())
    }
}

fn matrix_power(m: &ComplexMatrix, mut k: usize) -> ComplexMatrix {
    let mut result = ComplexMatrix::identity(m.rows());
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// M repetitions of one control period Δt = t/M.
///
/// Sequential: ∏ₖ 𝒰ₖ e^{𝒵uₖΔt} 𝒰ₖ† (first segment first). Random: Σₖ uₖ 𝒰ₖ e^{𝒵Δt} 𝒰ₖ†.
pub fn stroboscopic_evolve(
    z: &LindbladGenerator,
    schedule: &PulseSchedule,
    mode: EvolutionMode,
) -> Result<ChoiState> {
    schedule.validate()?;
    if schedule
        .segments
        .iter()
        .any(|s| s.unitary.rows() != z.dim())
    {
        return Err(Error::Dimension(
            "control unitaries do not match the generator".into(),
        ));
    }
    let dt = schedule.total_time / schedule.steps as f64;
    let s = z.superoperator();
    let n = s.rows();
    let step = match mode {
        EvolutionMode::Sequential => {
            let mut acc = ComplexMatrix::identity(n);
            for seg in &schedule.segments {
                if seg.fraction == 0.0 {
                    continue;
                }
                let u = unitary_superoperator(&seg.unitary);
                let piece = &(&u * &mat_exp(&s.scale_re(seg.fraction * dt))) * &u.adjoint();
                acc = &piece * &acc;
            }
            acc
        }
        EvolutionMode::Random => {
            let e = mat_exp(&s.scale_re(dt));
            let mut acc = ComplexMatrix::zeros(n, n);
            for seg in &schedule.segments {
                let u = unitary_superoperator(&seg.unitary);
                acc += &(&(&u * &e) * &u.adjoint()).scale_re(seg.fraction);
            }
            acc
        }
    };
    choi_from_superoperator(&matrix_power(&step, schedule.steps), z.qubits)
}

// ---------------------------------------------------------------------------------------------
// Decoherence standard forms

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoherenceLevel {
    Pauli,
    Depolarizing,
}

/// Twirls a pure-decoherence generator into the Pauli or depolarizing standard form.
pub fn decoherence_standard_form(
    z: &LindbladGenerator,
    level: DecoherenceLevel,
) -> Result<LindbladGenerator> {
    if z.h.max_abs() > TAU_HERM {
        return Err(Error::Validation(
            "decoherence standard forms apply to generators without an ideal Hamiltonian".into(),
        ));
    }
    let set = match level {
        DecoherenceLevel::Pauli => pauli_set(2, z.qubits)?,
        DecoherenceLevel::Depolarizing => depolarizing_set(2, z.qubits)?,
    };
    twirl_generator(z, &set)
}

/// Weights E₀..E₃ (σ order) of the Pauli channel generated by rates L₁, L₂, L₃ after time t.
pub fn closed_form_pauli_weights(l1: f64, l2: f64, l3: f64, t: f64) -> Result<[f64; 4]> {
    if [l1, l2, l3, t].iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Validation(
            "rates and time must be nonnegative".into(),
        ));
    }
    let a = (-4.0 * (l2 + l3) * t).exp();
    let b = (-4.0 * (l1 + l3) * t).exp();
    let c = (-4.0 * (l1 + l2) * t).exp();
    Ok([
        (1.0 + a + b + c) / 4.0,
        (1.0 + a - b - c) / 4.0,
        (1.0 - a + b - c) / 4.0,
        (1.0 - a - b + c) / 4.0,
    ])
}

pub fn closed_form_pauli_channel(l1: f64, l2: f64, l3: f64, t: f64) -> Result<PauliChannelForm> {
    let w = closed_form_pauli_weights(l1, l2, l3, t)?;
    let mut m = ComplexMatrix::zeros(4, 4);
    for (k, &wk) in w.iter().enumerate() {
        let v = qubit_bell(k);
        m += &ComplexMatrix::outer(&v, &v).scale_re(wk);
    }
    extract_pauli_channel(&ChoiState::square(m, TensorShape::uniform(2, 1)?)?)
}

/// Single-qubit GKS matrix diag(L₁, L₂, L₃).
pub fn pauli_rates_gks(l1: f64, l2: f64, l3: f64) -> ComplexMatrix {
    ComplexMatrix::diag(&[C64::new(l1, 0.0), C64::new(l2, 0.0), C64::new(l3, 0.0)])
}

// ---------------------------------------------------------------------------------------------
// Ising-type interactions

fn yy() -> ComplexMatrix {
    kron(&sigma(2), &sigma(2))
}

/// g with H = g·σ_y⊗σ_y, or an error if H has any other component.
pub fn ising_coupling(h: &ComplexMatrix) -> Result<f64> {
    if h.rows() != 4 {
        return Err(Error::Dimension("Ising form needs two qubits".into()));
    }
    let g = yy().hs_inner(h).re / 4.0;
    if (h - &yy().scale_re(g)).max_abs() > TAU_FORM {
        return Err(Error::Validation(
            "Hamiltonian is not proportional to σ_y⊗σ_y".into(),
        ));
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsingStandardForm {
    /// Generator averaged over the 32 phase-gate unitaries; H unchanged, Lamb shift kept.
    pub generator: LindbladGenerator,
    /// The same dynamics with the σ_y⊗σ_y Lamb component absorbed into the coupling and
    /// time rescaled by c_y, so that H = g·σ_y⊗σ_y again and H_l = 0.
    pub absorbed: LindbladGenerator,
    pub g: f64,
    pub g_prime: f64,
    pub time_cost: f64,
    /// Identity component of the twirled Lamb shift (a global phase).
    pub lamb_identity: f64,
}

pub fn ising_standard_form(z: &LindbladGenerator) -> Result<IsingStandardForm> {
    let g = ising_coupling(&z.h)?;
    if g == 0.0 {
        return Err(Error::Validation("Ising coupling must be nonzero".into()));
    }
    let generator = twirl_generator(z, &phase_gate_set())?;
    let lamb_identity = generator.lamb.trace().re / 4.0;
    let h22 = yy().hs_inner(&generator.lamb).re / 4.0;
    let g_prime = g + h22;
    if g_prime * g <= 0.0 {
        return Err(Error::Infeasible(format!(
            "Lamb shift reverses or cancels the coupling (g = {g}, g′ = {g_prime}); no time cost is defined"
        )));
    }
    let time_cost = g / g_prime;
    let absorbed = LindbladGenerator {
        h: z.h.clone(),
        lamb: ComplexMatrix::zeros(4, 4),
        gks: generator.gks.scale_re(time_cost),
        qubits: 2,
    };
    Ok(IsingStandardForm {
        generator,
        absorbed,
        g,
        g_prime,
        time_cost,
        lamb_identity,
    })
}

// ---------------------------------------------------------------------------------------------
// Arbitrary Hamiltonians

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// H ↦ H_y = c·Σ vᵢVᵢHVᵢ† + Q₁⊗𝟙 + 𝟙⊗Q₂.
    Forward,
    /// H_y ↦ H.
    Backward,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationDecomposition {
    pub direction: Direction,
    pub cost: f64,
    pub terms: Vec<(f64, ComplexMatrix)>,
    pub q1: ComplexMatrix,
    pub q2: ComplexMatrix,
}

impl SimulationDecomposition {
    /// Decomposition without local corrections.
    pub fn new(direction: Direction, cost: f64, terms: Vec<(f64, ComplexMatrix)>) -> Self {
        SimulationDecomposition {
            direction,
            cost,
            terms,
            q1: ComplexMatrix::zeros(2, 2),
            q2: ComplexMatrix::zeros(2, 2),
        }
    }

    /// Single-term decomposition by the product V⊗V of a rotation taking σ_from to ±σ_to.
    pub fn ising_axis(direction: Direction, from: usize, to: usize) -> Result<Self> {
        let r = axis_rotation(from, to)?;
        Ok(Self::new(direction, 1.0, vec![(1.0, kron(&r, &r))]))
    }

    /// c·Σ vᵢVᵢHVᵢ† + Q₁⊗𝟙 + 𝟙⊗Q₂.
    pub fn simulate(&self, h: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(h.rows(), h.cols());
        for (v, u) in &self.terms {
            acc += &h.conjugate_by(u).scale_re(*v);
        }
        let id = ComplexMatrix::identity(2);
        &(&acc.scale_re(self.cost) + &kron(&self.q1, &id)) + &kron(&id, &self.q2)
    }

    pub fn validate(&self, source: &ComplexMatrix, target: &ComplexMatrix) -> Result<()> {
        let total: f64 = self.terms.iter().map(|t| t.0).sum();
        if self.cost.is_nan()
            || self.cost <= 0.0
            || self.terms.is_empty()
            || self.terms.iter().any(|t| t.0.is_nan() || t.0 <= 0.0)
            || (total - 1.0).abs() > 1e-12
        {
            return Err(Error::Validation(
                "decomposition needs c > 0 and positive weights summing to 1".into(),
            ));
        }
        if self
            .terms
            .iter()
            .any(|t| t.1.rows() != 4 || !t.1.is_unitary(1e-10))
        {
            return Err(Error::Validation(
                "decomposition terms must be two-qubit unitaries".into(),
            ));
        }
        let residual = (&self.simulate(source) - target).max_abs();
        if residual > TAU_FORM {
            return Err(Error::Validation(format!(
                "decomposition misses its target by {residual:e}"
            )));
        }
        Ok(())
    }

    fn has_local_corrections(&self) -> bool {
        self.q1.max_abs() > TAU_FORM || self.q2.max_abs() > TAU_FORM
    }

    fn apply(&self, z: &LindbladGenerator) -> Result<LindbladGenerator> {
        let conj = self
            .terms
            .iter()
            .map(|(_, u)| conjugate_generator(z, u))
            .collect::<Result<Vec<_>>>()?;
        let avg = average_generator(
            &self
                .terms
                .iter()
                .zip(&conj)
                .map(|((v, _), g)| (*v, g))
                .collect::<Vec<_>>(),
        )?;
        Ok(avg.scaled(self.cost))
    }
}

/// e^{−iπ/4 σ_c} with c the third axis; maps σ_from to ±σ_to.
pub fn axis_rotation(from: usize, to: usize) -> Result<ComplexMatrix> {
    if !(1..=3).contains(&from) || !(1..=3).contains(&to) {
        return Err(Error::Validation("axes are 1, 2, 3".into()));
    }
    if from == to {
        return Ok(ComplexMatrix::identity(2));
    }
    let c = 6 - from - to;
    Ok(mat_exp(
        &sigma(c).scale(C64::new(0.0, -std::f64::consts::FRAC_PI_4)),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainResult {
    /// Standard-form generator per unit of simulated time: H exactly the input H.
    pub generator: LindbladGenerator,
    /// Generator after steps (1)–(2), before the backward mixing.
    pub ising: IsingStandardForm,
    pub cost_forward: f64,
    pub cost_ising: f64,
    pub cost_backward: f64,
    pub time_cost: f64,
}

/// H → σ_y⊗σ_y (forward simulation), 32-element twirl, σ_y⊗σ_y → H (backward simulation).
pub fn arbitrary_h_chain(
    z: &LindbladGenerator,
    fwd: &SimulationDecomposition,
    bwd: &SimulationDecomposition,
) -> Result<ChainResult> {
    if z.qubits != 2 {
        return Err(Error::Dimension("the chain works on two qubits".into()));
    }
    if fwd.direction != Direction::Forward || bwd.direction != Direction::Backward {
        return Err(Error::Validation(
            "expected a forward and a backward decomposition".into(),
        ));
    }
    if fwd.has_local_corrections() || bwd.has_local_corrections() {
        return Err(Error::Validation(
            "local correction Hamiltonians Q must vanish".into(),
        ));
    }
    let h_y = fwd.simulate(&z.h);
    ising_coupling(&h_y)?;
    fwd.validate(&z.h, &h_y)?;
    bwd.validate(&h_y, &z.h)?;
    let z_y = fwd.apply(z)?;
    let ising = ising_standard_form(&z_y)?;
    let generator = bwd.apply(&ising.absorbed)?;
    let time_cost = fwd.cost * ising.time_cost * bwd.cost;
    Ok(ChainResult {
        generator,
        cost_forward: fwd.cost,
        cost_ising: ising.time_cost,
        cost_backward: bwd.cost,
        time_cost,
        ising,
    })
}

/// Real parameter vector of the upper triangle of a Hermitian matrix.
fn hermitian_params(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        v.push(m[(i, i)].re);
        for j in i + 1..n {
            v.push(m[(i, j)].re);
            v.push(m[(i, j)].im);
        }
    }
    v
}

/// Number of independent real parameters of GKS matrices reachable through `map`, found as
/// the rank of the linear map on the Hermitian 15×15 matrices.
pub fn gks_parameter_count(
    map: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
    size: usize,
) -> Result<usize> {
    let mut samples = vec![vec![0.0; size * size]];
    for i in 0..size {
        for j in i..size {
            let unit = if i == j {
                [C64::new(1.0, 0.0)].to_vec()
            } else {
                vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]
            };
            for u in unit {
                let mut m = ComplexMatrix::zeros(size, size);
                m[(i, j)] = u;
                m[(j, i)] = u.conj();
                samples.push(hermitian_params(&map(&m)?));
            }
        }
    }
    Ok(affine_rank(&samples, 1e-10))
}

/// GKS-only version of the chain, for parameter counting.
pub fn chain_gks_map<'a>(
    fwd: &'a SimulationDecomposition,
    bwd: &'a SimulationDecomposition,
) -> impl Fn(&ComplexMatrix) -> Result<ComplexMatrix> + 'a {
    move |l: &ComplexMatrix| {
        let z = LindbladGenerator {
            h: ComplexMatrix::zeros(4, 4),
            lamb: ComplexMatrix::zeros(4, 4),
            gks: l.clone(),
            qubits: 2,
        };
        let z = fwd.apply(&z)?;
        let z = twirl_generator(&z, &phase_gate_set())?;
        Ok(bwd.apply(&z)?.gks)
    }
}

/// Separable-mixing check: whether p·𝒵′ + (1−p)·𝒵_D has a GKS matrix ∝ 𝟙. Returns the constant.
pub fn white_mixture_rate(z: &LindbladGenerator, z_d: &LindbladGenerator, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Validation("mixing weight must lie in [0, 1]".into()));
    }
    let l = &z.gks.scale_re(p) + &z_d.gks.scale_re(1.0 - p);
    let n = l.rows();
    let rate = l.trace().re / n as f64;
    let residual = (&l - &ComplexMatrix::identity(n).scale_re(rate)).max_abs();
    if residual > TAU_FORM {
        return Err(Error::Validation(format!(
            "mixed GKS matrix is not proportional to 𝟙 (residual {residual:e})"
        )));
    }
    Ok(rate)
}

// ---------------------------------------------------------------------------------------------
// JSON

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorJson {
    #[serde(rename = "H_re")]
    pub h_re: Vec<Vec<f64>>,
    #[serde(rename = "H_im")]
    pub h_im: Vec<Vec<f64>>,
    #[serde(rename = "Hl_re")]
    pub hl_re: Vec<Vec<f64>>,
    #[serde(rename = "Hl_im")]
    pub hl_im: Vec<Vec<f64>>,
    pub gks_re: Vec<Vec<f64>>,
    pub gks_im: Vec<Vec<f64>>,
    pub basis: String,
}

impl From<&LindbladGenerator> for GeneratorJson {
    fn from(z: &LindbladGenerator) -> Self {
        let (h_re, h_im) = crate::channel::split_matrix(&z.h);
        let (hl_re, hl_im) = crate::channel::split_matrix(&z.lamb);
        let (gks_re, gks_im) = crate::channel::split_matrix(&z.gks);
        GeneratorJson {
            h_re,
            h_im,
            hl_re,
            hl_im,
            gks_re,
            gks_im,
            basis: "pauli-lex".into(),
        }
    }
}

impl TryFrom<GeneratorJson> for LindbladGenerator {
    type Error = Error;

    fn try_from(j: GeneratorJson) -> Result<Self> {
        if j.basis != "pauli-lex" {
            return Err(Error::Validation(format!(
                "unsupported GKS basis '{}'",
                j.basis
            )));
        }
        let join = crate::channel::join_matrix;
        LindbladGenerator::new(
            join(&j.h_re, &j.h_im)?,
            join(&j.hl_re, &j.hl_im)?,
            join(&j.gks_re, &j.gks_im)?,
        )
    }
}
