//! Designed depolarization: mix a noisy two-qubit operation with locally modified copies of
//! itself (or with separable maps) until only global white noise remains.
//!
//! Every protocol reports the mixing schedule it used. Local branches are written as the
//! operations applied before and after the noisy gate, in time order.

use crate::channel::{choi_vector, ChoiState};
use crate::error::{Error, Result};
use crate::forms::{extract_cnot_form, extract_phase_gate_form};
use crate::linalg::{
    det_real, kron, permute_subsystems, solve_real, ComplexMatrix, TensorShape, C64,
};
use crate::pauli::{
    phase_gate, sigma, sigma_bell_product, sigma_bits, sigma_from_bits, BASIS_ORDERING,
};
use crate::twirl::{depolarizing_set, swap_set, twirl};
use serde::Serialize;
use std::f64::consts::FRAC_PI_4;

const SIGMA_NAMES: [&str; 4] = ["1", "X", "Y", "Z"];

/// Fidelity above which the identity/SWAP protocol is guaranteed to be feasible.
pub const SWAP_FIDELITY_THRESHOLD: f64 = 15.0 / 16.0;

// ---------------------------------------------------------------------------------------------
// Isotropic two-qubit vectors

/// Coefficients of E = E₀₀ P₀P₀ + E₀₁ Σⱼ P₀Pⱼ + E₁₀ Σᵢ PᵢP₀ + E₁₁ Σᵢⱼ PᵢPⱼ, one per Bell projector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsotropicVector {
    pub e00: f64,
    pub e01: f64,
    pub e10: f64,
    pub e11: f64,
}

impl IsotropicVector {
    /// Checked constructor: nonnegative entries with N(E) = 1.
    pub fn new(e00: f64, e01: f64, e10: f64, e11: f64) -> Result<Self> {
        let v = IsotropicVector { e00, e01, e10, e11 };
        if v.as_array().iter().any(|x| !x.is_finite() || *x < -1e-12) {
            return Err(Error::Validation(
                "isotropic coefficients must be nonnegative".into(),
            ));
        }
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!(
                "N(E) = {} instead of 1",
                v.norm()
            )));
        }
        Ok(v)
    }

    /// Global white noise of fidelity f: every non-ideal projector carries (1−f)/15.
    pub fn white(f: f64) -> Self {
        let w = (1.0 - f) / 15.0;
        IsotropicVector {
            e00: f,
            e01: w,
            e10: w,
            e11: w,
        }
    }

    /// Inverse of [`IsotropicVector::rst`] at unit norm. Entries may be negative.
    pub fn from_rst(r: f64, s: f64, t: f64) -> Self {
        IsotropicVector {
            e00: (1.0 + 3.0 * (r + s + 3.0 * t)) / 16.0,
            e01: (1.0 + 3.0 * s - r - 3.0 * t) / 16.0,
            e10: (1.0 + 3.0 * r - s - 3.0 * t) / 16.0,
            e11: (1.0 + t - r - s) / 16.0,
        }
    }

    /// Reads the projector weights of a two-qubit Choi state in the identity frame.
    pub fn from_choi(e: &ChoiState) -> Result<Self> {
        require_two_qubits(e)?;
        Ok(Self::from_matrix(e.matrix()))
    }

    fn from_matrix(m: &ComplexMatrix) -> Self {
        let w = |i: usize, j: usize| {
            let v = sigma_bell_product(&[i, j]);
            m.sandwich_vec(&v, &v).re
        };
        let mut v = IsotropicVector {
            e00: w(0, 0),
            e01: 0.0,
            e10: 0.0,
            e11: 0.0,
        };
        for k in 1..4 {
            v.e01 += w(0, k) / 3.0;
            v.e10 += w(k, 0) / 3.0;
            for l in 1..4 {
                v.e11 += w(k, l) / 9.0;
            }
        }
        v
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.e00, self.e01, self.e10, self.e11]
    }

    fn from_array(a: [f64; 4]) -> Self {
        IsotropicVector {
            e00: a[0],
            e01: a[1],
            e10: a[2],
            e11: a[3],
        }
    }

    /// N(E) = E₀₀ + 3(E₀₁ + E₁₀ + 3E₁₁).
    pub fn norm(&self) -> f64 {
        self.e00 + 3.0 * (self.e01 + self.e10 + 3.0 * self.e11)
    }

    pub fn fidelity(&self) -> f64 {
        self.e00
    }

    pub fn rst(&self) -> (f64, f64, f64) {
        (
            1.0 - 4.0 * (self.e01 + 3.0 * self.e11),
            1.0 - 4.0 * (self.e10 + 3.0 * self.e11),
            1.0 - 4.0 * (self.e01 + self.e10 + 2.0 * self.e11),
        )
    }

    /// The matrix D[E] with E′ = D[E]·p for mixing probabilities p.
    pub fn d_matrix(&self) -> [[f64; 4]; 4] {
        let IsotropicVector { e00, e01, e10, e11 } = *self;
        [
            [e00, 3.0 * e01, 3.0 * e10, 9.0 * e11],
            [e01, e00 + 2.0 * e01, 3.0 * e11, 3.0 * (e10 + 2.0 * e11)],
            [e10, 3.0 * e11, e00 + 2.0 * e10, 3.0 * (e01 + 2.0 * e11)],
            [
                e11,
                e10 + 2.0 * e11,
                e01 + 2.0 * e11,
                e00 + 2.0 * (e01 + e10 + 2.0 * e11),
            ],
        ]
    }

    pub fn determinant(&self) -> f64 {
        det_real(&rows(&self.d_matrix()))
    }

    /// E′ = D[E]·p.
    pub fn mixed(&self, p: &MixingProbabilities) -> IsotropicVector {
        let d = self.d_matrix();
        let pv = p.as_array();
        let mut out = [0.0; 4];
        for (o, row) in out.iter_mut().zip(&d) {
            *o = row.iter().zip(&pv).map(|(a, b)| a * b).sum();
        }
        Self::from_array(out)
    }

    /// Noiseless-part check used by the fixed-point test: E equals white noise of its own fidelity.
    pub fn is_white(&self, tol: f64) -> bool {
        let w = Self::white(self.e00).as_array();
        self.as_array()
            .iter()
            .zip(&w)
            .all(|(a, b)| (a - b).abs() <= tol)
    }
}

fn rows(m: &[[f64; 4]; 4]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.to_vec()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixingProbabilities {
    /// Untouched gate.
    pub p00: f64,
    /// Each σⱼ on the second output.
    pub p01: f64,
    /// Each σᵢ on the first output.
    pub p10: f64,
    /// Each σᵢ⊗σⱼ.
    pub p11: f64,
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

impl MixingProbabilities {
    pub fn as_array(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    /// N(p) = p₀₀ + 3(p₀₁ + p₁₀ + 3p₁₁), the total probability.
    pub fn norm(&self) -> f64 {
        self.p00 + 3.0 * (self.p01 + self.p10 + 3.0 * self.p11)
    }
}

/// Target family E′(f′) = f′·slope + offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IsotropicTarget {
    /// (f′, (1−f′)/15, (1−f′)/15, (1−f′)/15): the Choi state of global white noise.
    GlobalWhite,
    /// (f′, (1−f′)/9, (1−f′)/9, (1−f′)/27): equal total weight on the three noise classes.
    /// Not global white noise; kept for comparison with the closed-form coefficients.
    ClassBalanced,
}

impl IsotropicTarget {
    fn parts(self) -> ([f64; 4], [f64; 4]) {
        let k = match self {
            IsotropicTarget::GlobalWhite => [1.0 / 15.0; 3],
            IsotropicTarget::ClassBalanced => [1.0 / 9.0, 1.0 / 9.0, 1.0 / 27.0],
        };
        ([1.0, -k[0], -k[1], -k[2]], [0.0, k[0], k[1], k[2]])
    }

    pub fn vector(self, f: f64) -> IsotropicVector {
        let (a, b) = self.parts();
        IsotropicVector::from_array([0, 1, 2, 3].map(|i| f * a[i] + b[i]))
    }
}

/// Closed-form p(f′) = a·f′ + b for the class-balanced target, valid for rst ≠ 0.
pub fn class_balanced_coefficients(r: f64, s: f64, t: f64) -> ([f64; 4], [f64; 4]) {
    let (ir, is, it) = (1.0 / r, 1.0 / s, 1.0 / t);
    let a = [
        (ir + is + 4.0 * it) / 6.0,
        (3.0 * is - ir - 4.0 * it) / 18.0,
        (3.0 * ir - is - 4.0 * it) / 18.0,
        (4.0 * it - 3.0 * ir - 3.0 * is) / 54.0,
    ];
    let b = [
        (3.0 + ir + is - 5.0 * it) / 48.0,
        (9.0 + 3.0 * is + 5.0 * it - ir) / 144.0,
        (9.0 + 3.0 * ir + 5.0 * it - is) / 144.0,
        (27.0 - 3.0 * ir - 3.0 * is - 5.0 * it) / 432.0,
    ];
    (a, b)
}

/// Affine solution p(f′) = a·f′ + b of D[E]·p = E′(f′) and its feasible window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SacrificeLine {
    pub a: [f64; 4],
    pub b: [f64; 4],
    pub lower: f64,
    pub upper: f64,
}

impl SacrificeLine {
    pub fn probabilities(&self, f: f64) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.a[i] * f + self.b[i])
    }
}

fn in_restricted_cube(r: f64, s: f64, t: f64) -> bool {
    [r, s, t].iter().all(|&x| x > 2.0 / 3.0 && x <= 1.0)
}

/// Solves for p(f′) and the interval of f′ where p ≥ 0.
pub fn sacrifice_line(e: &IsotropicVector, target: IsotropicTarget) -> Result<SacrificeLine> {
    let d = rows(&e.d_matrix());
    let (r, s, t) = e.rst();
    if (r * s * t).abs() < 1e-14 {
        return Err(Error::Infeasible("D[E] is singular (r·s·t = 0)".into()));
    }
    let (ta, tb) = target.parts();
    let (a, b) = if target == IsotropicTarget::ClassBalanced && in_restricted_cube(r, s, t) {
        class_balanced_coefficients(r, s, t)
    } else {
        let singular = || Error::Infeasible("D[E] is singular".into());
        let a = solve_real(&d, &ta).ok_or_else(singular)?;
        let b = solve_real(&d, &tb).ok_or_else(singular)?;
        ([a[0], a[1], a[2], a[3]], [b[0], b[1], b[2], b[3]])
    };
    let (mut lower, mut upper) = (0.0f64, 1.0f64);
    for i in 0..4 {
        if a[i].abs() <= 1e-14 {
            if b[i] < -1e-12 {
                return Err(Error::Infeasible(format!(
                    "p component {i} is negative for every f′"
                )));
            }
        } else if a[i] > 0.0 {
            lower = lower.max(-b[i] / a[i]);
        } else {
            upper = upper.min(-b[i] / a[i]);
        }
    }
    if lower > upper + 1e-12 {
        return Err(Error::Infeasible(format!(
            "no f′ with p ≥ 0 (needs f′ ≥ {lower}, f′ ≤ {upper})"
        )));
    }
    Ok(SacrificeLine { a, b, lower, upper })
}

/// Largest f′ reachable for `e` under `target`.
pub fn max_sacrifice_fidelity(e: &IsotropicVector, target: IsotropicTarget) -> Result<f64> {
    sacrifice_line(e, target).map(|l| l.upper)
}

// ---------------------------------------------------------------------------------------------
// Results and schedules

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MixStep {
    /// Run the noisy gate with local operations around it.
    Local {
        weight: f64,
        before: Vec<String>,
        after: Vec<String>,
    },
    /// Replace the gate by a separable map with the given Choi state.
    Separable { weight: f64, description: String },
}

impl MixStep {
    pub fn weight(&self) -> f64 {
        match self {
            MixStep::Local { weight, .. } | MixStep::Separable { weight, .. } => *weight,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SacrificeResult {
    pub protocol: String,
    /// Twirl applied before the mixing schedule, if any.
    pub preprocessing: Option<String>,
    pub input_fidelity: f64,
    pub achieved_fidelity: f64,
    /// q in q·|Ψ_U⟩⟨Ψ_U| + (1−q)·𝟙/16, when the output is global white noise.
    pub white_weight: Option<f64>,
    /// (1−f′)/(1−f); 1 when the input is noiseless.
    pub noise_ratio: f64,
    pub probabilities: Option<MixingProbabilities>,
    pub schedule: Vec<MixStep>,
    pub output_vector: Option<IsotropicVector>,
    #[serde(skip)]
    pub output: Option<ChoiState>,
    /// Separable states mixed in with their unnormalized weights: output ∝ E + Σ wᵢ·Mᵢ.
    #[serde(skip)]
    pub mixers: Vec<(f64, ComplexMatrix)>,
}

fn noise_ratio(f: f64, f_new: f64) -> f64 {
    if 1.0 - f <= 1e-15 {
        1.0
    } else {
        (1.0 - f_new) / (1.0 - f)
    }
}

/// A local branch post ∘ E ∘ pre, tracked for the schedule.
#[derive(Clone, Debug)]
struct Branch {
    weight: f64,
    pre: ComplexMatrix,
    post: ComplexMatrix,
    before: Vec<String>,
    after: Vec<String>,
}

struct LocalOp {
    pre: ComplexMatrix,
    post: ComplexMatrix,
    before: Option<String>,
    after: Option<String>,
}

impl LocalOp {
    fn new(post_a: usize, post_b: usize, pre_a: usize, pre_b: usize) -> Self {
        let name = |a: usize, b: usize| {
            (a != 0 || b != 0).then(|| format!("{}⊗{}", SIGMA_NAMES[a], SIGMA_NAMES[b]))
        };
        LocalOp {
            pre: kron(&sigma(pre_a), &sigma(pre_b)),
            post: kron(&sigma(post_a), &sigma(post_b)),
            before: name(pre_a, pre_b),
            after: name(post_a, post_b),
        }
    }

    fn with_post(post: ComplexMatrix, label: &str) -> Self {
        LocalOp {
            pre: ComplexMatrix::identity(4),
            post,
            before: None,
            after: Some(label.to_string()),
        }
    }
}

fn identity_branch() -> Vec<Branch> {
    vec![Branch {
        weight: 1.0,
        pre: ComplexMatrix::identity(4),
        post: ComplexMatrix::identity(4),
        before: vec![],
        after: vec![],
    }]
}

/// Branches of `op ∘ (mixture) ∘ op_pre`, scaled.
fn then(mix: &[Branch], op: &LocalOp, scale: f64) -> Vec<Branch> {
    mix.iter()
        .map(|b| {
            let mut before = b.before.clone();
            let mut after = b.after.clone();
            if let Some(l) = &op.before {
                before.insert(0, l.clone());
            }
            if let Some(l) = &op.after {
                after.push(l.clone());
            }
            Branch {
                weight: b.weight * scale,
                pre: &b.pre * &op.pre,
                post: &op.post * &b.post,
                before,
                after,
            }
        })
        .collect()
}

fn scaled(mix: &[Branch], s: f64) -> Vec<Branch> {
    mix.iter()
        .map(|b| Branch {
            weight: b.weight * s,
            ..b.clone()
        })
        .collect()
}

fn local(m: &ComplexMatrix, post: &ComplexMatrix, pre: &ComplexMatrix) -> ComplexMatrix {
    m.conjugate_by(&kron(post, &pre.transpose()))
}

fn evaluate(m: &ComplexMatrix, mix: &[Branch]) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(m.rows(), m.cols());
    for b in mix {
        if b.weight != 0.0 {
            acc += &local(m, &b.post, &b.pre).scale_re(b.weight);
        }
    }
    acc
}

/// Merges branches with identical operation labels and drops zero weights.
fn schedule_of(mix: &[Branch]) -> Vec<MixStep> {
    let mut out: Vec<MixStep> = Vec::new();
    for b in mix.iter().filter(|b| b.weight > 0.0) {
        let existing = out.iter_mut().find(|s| {
            matches!(s, MixStep::Local { before, after, .. } if *before == b.before && *after == b.after)
        });
        match existing {
            Some(MixStep::Local { weight, .. }) => *weight += b.weight,
            _ => out.push(MixStep::Local {
                weight: b.weight,
                before: b.before.clone(),
                after: b.after.clone(),
            }),
        }
    }
    out
}

fn require_two_qubits(e: &ChoiState) -> Result<()> {
    if e.in_shape().factors() != [2, 2] || e.out_shape().factors() != [2, 2] {
        return Err(Error::Dimension(
            "protocol needs a two-qubit channel".into(),
        ));
    }
    Ok(())
}

/// q·|ψ⟩⟨ψ| + (1−q)·𝟙/16.
pub fn white_noise_target(u: &ComplexMatrix, q: f64) -> ComplexMatrix {
    let v = choi_vector(u);
    let n = v.len();
    &ComplexMatrix::outer(&v, &v).scale_re(q)
        + &ComplexMatrix::identity(n).scale_re((1.0 - q) / n as f64)
}

fn white_weight_of(f: f64) -> f64 {
    (16.0 * f - 1.0) / 15.0
}

// ---------------------------------------------------------------------------------------------
// Identity and SWAP

/// Mixing probabilities for an isotropic vector, driven to global white noise.
pub fn identity_sacrifice(e: &IsotropicVector) -> Result<SacrificeResult> {
    identity_sacrifice_with(e, IsotropicTarget::GlobalWhite)
}

pub fn identity_sacrifice_with(
    e: &IsotropicVector,
    target: IsotropicTarget,
) -> Result<SacrificeResult> {
    let line = sacrifice_line(e, target)?;
    let f_new = line.upper;
    let p = line
        .probabilities(f_new)
        .map(|x| if x < 0.0 && x > -1e-12 { 0.0 } else { x });
    let (r, s, t) = e.rst();
    let probs = MixingProbabilities {
        p00: p[0],
        p01: p[1],
        p10: p[2],
        p11: p[3],
        r,
        s,
        t,
    };
    let out = e.mixed(&probs);
    Ok(SacrificeResult {
        protocol: "identity".into(),
        preprocessing: None,
        input_fidelity: e.fidelity(),
        achieved_fidelity: out.e00,
        white_weight: (target == IsotropicTarget::GlobalWhite).then(|| white_weight_of(out.e00)),
        noise_ratio: noise_ratio(e.fidelity(), out.e00),
        probabilities: Some(probs),
        schedule: pauli_branches(&probs, false)
            .iter()
            .map(branch_step)
            .collect(),
        output_vector: Some(out),
        output: None,
        mixers: Vec::new(),
    })
}

fn branch_step(b: &Branch) -> MixStep {
    MixStep::Local {
        weight: b.weight,
        before: b.before.clone(),
        after: b.after.clone(),
    }
}

/// The 16 branches of the identity protocol. With `crosswise`, the roles of the two outputs
/// are exchanged (SWAP frame).
fn pauli_branches(p: &MixingProbabilities, crosswise: bool) -> Vec<Branch> {
    let base = identity_branch();
    let mut out = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            let w = match (i == 0, j == 0) {
                (true, true) => p.p00,
                (true, false) => p.p01,
                (false, true) => p.p10,
                (false, false) => p.p11,
            };
            if w <= 0.0 {
                continue;
            }
            let (a, b) = if crosswise { (j, i) } else { (i, j) };
            out.extend(then(&base, &LocalOp::new(a, b, 0, 0), w));
        }
    }
    out
}

/// Identity protocol on a two-qubit channel close to the identity. The channel is first
/// depolarized into isotropic form with the correlated local twirl.
pub fn identity_channel_sacrifice(e: &ChoiState) -> Result<SacrificeResult> {
    require_two_qubits(e)?;
    let twirled = twirl(e, &depolarizing_set(2, 2)?)?;
    let v = IsotropicVector::from_matrix(twirled.matrix());
    finish_pauli_protocol(
        "identity",
        "depolarizing",
        &twirled,
        &v,
        false,
        &ComplexMatrix::identity(4),
    )
}

/// SWAP protocol: the identity protocol in the (A B′), (B A′) pairing.
pub fn swap_sacrifice(e: &ChoiState) -> Result<SacrificeResult> {
    require_two_qubits(e)?;
    let twirled = twirl(e, &swap_set(2)?)?;
    let frame = permute_subsystems(
        twirled.matrix(),
        &TensorShape::uniform(2, 4)?,
        &[1, 0, 2, 3],
    )?;
    let v = IsotropicVector::from_matrix(&frame);
    if v.fidelity() <= SWAP_FIDELITY_THRESHOLD {
        return Err(Error::Infeasible(format!(
            "SWAP fidelity {} is not above 15/16",
            v.fidelity()
        )));
    }
    let swap = crate::twirl::swap_matrix(2);
    finish_pauli_protocol("swap", "swap", &twirled, &v, true, &swap)
}

fn finish_pauli_protocol(
    name: &str,
    set: &str,
    twirled: &ChoiState,
    v: &IsotropicVector,
    crosswise: bool,
    ideal: &ComplexMatrix,
) -> Result<SacrificeResult> {
    let mut res = identity_sacrifice(v)?;
    let probs = res.probabilities.expect("set by identity_sacrifice");
    let branches = pauli_branches(&probs, crosswise);
    let out = twirled.with_matrix(evaluate(twirled.matrix(), &branches).hermitian_part());
    let vv = choi_vector(ideal);
    let f_new = out.matrix().sandwich_vec(&vv, &vv).re;
    res.protocol = name.into();
    res.preprocessing = Some(format!("twirl: {set}"));
    res.achieved_fidelity = f_new;
    res.white_weight = Some(white_weight_of(f_new));
    res.noise_ratio = noise_ratio(v.fidelity(), f_new);
    res.schedule = schedule_of(&branches);
    res.output = Some(out);
    Ok(res)
}

// ---------------------------------------------------------------------------------------------
// CNOT class, in the U(π/4) frame

fn psi(i: usize, j: usize) -> Vec<C64> {
    sigma_bell_product(&[i, j])
}

fn entry(m: &ComplexMatrix, x: (usize, usize), y: (usize, usize)) -> C64 {
    m.sandwich_vec(&psi(x.0, x.1), &psi(y.0, y.1))
}

/// σ_z on the second output and the second input.
fn sign_flip() -> LocalOp {
    LocalOp::new(0, 3, 0, 3)
}

fn pauli_label(k: usize, l: usize) -> u8 {
    let (xk, zk) = sigma_bits(k);
    let (xl, zl) = sigma_bits(l);
    (xk << 3) | (zk << 2) | (xl << 1) | zl
}

fn label_sigmas(lab: u8) -> (usize, usize) {
    (
        sigma_from_bits((lab >> 3) & 1, (lab >> 2) & 1),
        sigma_from_bits((lab >> 1) & 1, lab & 1),
    )
}

/// Sacrifice for a gate in the 8-parameter CNOT form, expressed in the U(π/4) frame.
/// Use [`crate::forms::cnot_to_phase_frame`] to move an actual CNOT channel there first.
pub fn cnot_sacrifice(e: &ChoiState) -> Result<SacrificeResult> {
    let form = extract_cnot_form(e)?;
    let m = e.matrix();
    let f = form.f;

    // (1) kill the Γ₀₁ and Γ₁₀ coherences
    let base = identity_branch();
    let mut parts = [base.clone(), vec![], vec![]];
    let mut weights = [1.0, 0.0, 0.0];
    let stage_one = [
        (
            (0, 1),
            (2, 3),
            [LocalOp::new(0, 1, 0, 0), LocalOp::new(0, 3, 0, 0)],
        ),
        (
            (1, 0),
            (3, 2),
            [LocalOp::new(1, 0, 0, 0), LocalOp::new(3, 0, 0, 0)],
        ),
    ];
    for (k, (x, y, ops)) in stage_one.iter().enumerate() {
        let mut mix: Vec<Branch> = ops.iter().flat_map(|op| then(&base, op, 0.5)).collect();
        let o0 = entry(m, *x, *y);
        if o0.norm() < 1e-15 {
            continue;
        }
        let mut ok = entry(&evaluate(m, &mix), *x, *y);
        if (o0 * ok.conj()).re > 0.0 {
            mix = then(&mix, &sign_flip(), 1.0);
            ok = -ok;
        }
        if ok.norm() < 1e-15 {
            return Err(Error::Infeasible(
                "stage-one mixture cannot cancel the coherence".into(),
            ));
        }
        weights[k + 1] = o0.norm() / ok.norm();
        parts[k + 1] = mix;
    }
    let total: f64 = weights.iter().sum();
    let mut mix: Vec<Branch> = parts
        .iter()
        .zip(&weights)
        .flat_map(|(p, w)| scaled(p, w / total))
        .collect();

    // (2) kill the |Ψ₀₂⟩⟨Ψ₂₀| element with 𝒲 = iσ_y on the first output
    let e1 = evaluate(m, &mix);
    let w_op = LocalOp::with_post(kron(&sigma(2), &sigma(0)), "iY⊗1");
    let mut mix_w = then(&mix, &w_op, 1.0);
    let oa = entry(&e1, (0, 2), (2, 0));
    let mut ob = entry(&evaluate(m, &mix_w), (0, 2), (2, 0));
    if (oa * ob.conj()).re > 0.0 {
        mix_w = then(&mix_w, &sign_flip(), 1.0);
        ob = -ob;
    }
    let p = if oa.norm() > 0.0 {
        ob.norm() / (oa.norm() + ob.norm())
    } else {
        1.0
    };
    mix = [scaled(&mix, p), scaled(&mix_w, 1.0 - p)].concat();

    // (3) equalize the diagonal by Pauli shifts modulo the stabilizer Y⊗Y
    let e2 = evaluate(m, &mix);
    let fq = 2.0 * entry(&e2, (0, 0), (2, 2)).im;
    let g = pauli_label(2, 2);
    let rep = |lab: u8| lab.min(lab ^ g);
    let mut reps: Vec<u8> = (0..16u8).map(rep).collect();
    reps.sort_unstable();
    reps.dedup();
    let coset = |lab: u8| {
        reps.iter()
            .position(|&r| r == rep(lab))
            .expect("known coset")
    };
    let mut w = [0.0; 8];
    for k in 0..4 {
        for l in 0..4 {
            w[coset(pauli_label(k, l))] += entry(&e2, (k, l), (k, l)).re;
        }
    }
    let e_idx = coset(0);
    let mut conv = vec![vec![0.0; 8]; 8];
    for b in 0..8 {
        for cc in 0..8 {
            conv[coset(reps[cc] ^ reps[b])][b] += w[cc];
        }
    }
    let t0 = vec![2.0 / 16.0; 8];
    let mut t1 = vec![-fq * 2.0 / 16.0; 8];
    t1[e_idx] += fq;
    let singular = || Error::Infeasible("diagonal equalization system is singular".into());
    let ra = solve_real(&conv, &t0).ok_or_else(singular)?;
    let rb = solve_real(&conv, &t1).ok_or_else(singular)?;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for cc in 0..8 {
        let a = ra[cc];
        let b = rb[cc] - if cc == e_idx { 1.0 } else { 0.0 };
        if b.abs() < 1e-15 {
            if a < -1e-12 {
                return Err(Error::Infeasible(
                    "diagonal equalization needs a negative weight".into(),
                ));
            }
        } else if b > 0.0 {
            lo = lo.max(-a / b);
        } else {
            hi = hi.min(-a / b);
        }
    }
    if lo > hi + 1e-12 {
        return Err(Error::Infeasible(format!(
            "diagonal equalization infeasible: window [{lo}, {hi}] is empty"
        )));
    }
    let q0 = hi;
    let flip_a = LocalOp::new(1, 0, 1, 0);
    let mut out_mix = scaled(&mix, q0);
    for cc in 0..8 {
        let wgt = ra[cc] + q0 * rb[cc] - if cc == e_idx { q0 } else { 0.0 };
        if wgt <= 1e-14 {
            continue;
        }
        let (k, l) = label_sigmas(reps[cc]);
        let shifted = then(&mix, &LocalOp::new(k, l, 0, 0), wgt / 2.0);
        out_mix.extend(then(&shifted, &flip_a, 1.0));
        out_mix.extend(shifted);
    }

    let out = e.with_matrix(evaluate(m, &out_mix).hermitian_part());
    let q = q0 * fq;
    let f_new = q + (1.0 - q) / 16.0;
    Ok(SacrificeResult {
        protocol: "cnot".into(),
        preprocessing: None,
        input_fidelity: f,
        achieved_fidelity: f_new,
        white_weight: Some(q),
        noise_ratio: noise_ratio(f, f_new),
        probabilities: None,
        schedule: schedule_of(&out_mix),
        output_vector: None,
        output: Some(out),
        mixers: Vec::new(),
    })
}

// ---------------------------------------------------------------------------------------------
// Phase gate U(α)

/// ¼[[1,0,0,β],[0,1,α,0],[0,ᾱ,1,0],[β̄,0,0,1]] on one Bell block.
pub fn separable_mixer(alpha: C64, beta: C64) -> ComplexMatrix {
    let one = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    ComplexMatrix::from_rows(&[
        vec![one, z, z, beta],
        vec![z, one, alpha, z],
        vec![z, alpha.conj(), one, z],
        vec![beta.conj(), z, z, one],
    ])
    .scale_re(0.25)
}

/// Embeds a 4×4 matrix given on Bell block `block` (four consecutive basis states).
pub fn embed_block(a: &ComplexMatrix, block: usize) -> ComplexMatrix {
    let labels = &BASIS_ORDERING[4 * block..4 * block + 4];
    let vs: Vec<Vec<C64>> = labels.iter().map(|&(i, j)| psi(i, j)).collect();
    let v = ComplexMatrix::from_fn(16, 4, |r, k| vs[k][r]);
    &(&v * a) * &v.adjoint()
}

/// Positivity of `m` and of its partial transpose over the first party (out₁, in₁).
pub fn is_separable_two_qubit_pair(m: &ComplexMatrix) -> Result<bool> {
    let shape = TensorShape::uniform(2, 4)?;
    Ok(crate::linalg::min_eigenvalue(m)? >= -1e-12 && crate::channel::is_ppt(m, &shape, &[0, 2])?)
}

fn format_unit(z: C64) -> String {
    match (z.re.round() as i64, z.im.round() as i64) {
        (0, 0) => "0".into(),
        (r, 0) => format!("{r}"),
        (0, 1) => "i".into(),
        (0, -1) => "-i".into(),
        (r, i) => format!("{r}{i:+}i"),
    }
}

/// Sacrifice for a switchable phase gate in its 17-parameter standard form.
pub fn phase_gate_sacrifice(e: &ChoiState, alpha: f64) -> Result<SacrificeResult> {
    let form = extract_phase_gate_form(e, alpha)?;
    let f = form.f;
    if f <= 1.0 / 16.0 {
        return Err(Error::Infeasible(format!(
            "fidelity {f} leaves nothing to keep"
        )));
    }
    let u = phase_gate(alpha);
    let ideal = choi_vector(&u);
    let noise = e.matrix() - &ComplexMatrix::outer(&ideal, &ideal).scale_re(f);
    let mut acc = e.matrix().clone();
    let mut total = 1.0;
    let mut extra: Vec<(f64, String)> = Vec::new();
    let mut mixers: Vec<(f64, ComplexMatrix)> = Vec::new();

    let demands = |z: C64| -> Vec<(f64, C64)> {
        let sgn = |x: f64| if x > 0.0 { 1.0 } else { -1.0 };
        [
            (z.re.abs(), C64::new(-sgn(z.re), 0.0)),
            (z.im.abs(), C64::new(0.0, -sgn(z.im))),
        ]
        .into_iter()
        .filter(|d| d.0 > 1e-16)
        .collect()
    };
    for block in 0..4 {
        let b = &BASIS_ORDERING[4 * block..4 * block + 4];
        let z1 = entry(&noise, b[0], b[3]);
        let z2 = entry(&noise, b[1], b[2]);
        let mut d1 = demands(z1);
        let mut d2 = demands(z2);
        while !d1.is_empty() || !d2.is_empty() {
            let zero = C64::new(0.0, 0.0);
            let (m, a, bt) = match (d1.first().copied(), d2.first().copied()) {
                (Some(x), Some(y)) => {
                    let m = x.0.min(y.0);
                    d1[0].0 -= m;
                    d2[0].0 -= m;
                    (m, y.1, x.1)
                }
                (Some(x), None) => {
                    d1[0].0 = 0.0;
                    (x.0, zero, x.1)
                }
                (None, Some(y)) => {
                    d2[0].0 = 0.0;
                    (y.0, y.1, zero)
                }
                (None, None) => unreachable!(),
            };
            d1.retain(|d| d.0 > 1e-16);
            d2.retain(|d| d.0 > 1e-16);
            let mixer = embed_block(&separable_mixer(a, bt), block);
            if !is_separable_two_qubit_pair(&mixer)? {
                return Err(Error::Validation("mixer failed the PPT check".into()));
            }
            let w = 4.0 * m;
            acc += &mixer.scale_re(w);
            total += w;
            mixers.push((w, mixer));
            extra.push((
                w,
                format!(
                    "block {block}: A(α={}, β={})",
                    format_unit(a),
                    format_unit(bt)
                ),
            ));
        }
    }
    let mut diag = [0.0; 16];
    for (k, &(i, j)) in BASIS_ORDERING.iter().enumerate() {
        let v = psi(i, j);
        let overlap: C64 = v.iter().zip(&ideal).map(|(x, y)| x.conj() * y).sum();
        diag[k] = acc.sandwich_vec(&v, &v).re - f * overlap.norm_sqr();
    }
    let level = diag.iter().cloned().fold(f64::MIN, f64::max);
    for (k, &(i, j)) in BASIS_ORDERING.iter().enumerate() {
        let w = level - diag[k];
        if w > 0.0 {
            let v = psi(i, j);
            let projector = ComplexMatrix::outer(&v, &v);
            acc += &projector.scale_re(w);
            total += w;
            mixers.push((w, projector));
            extra.push((w, format!("Bell product Ψ{i}{j}")));
        }
    }
    let out = e.with_matrix(acc.scale_re(1.0 / total).hermitian_part());
    let q = f / total;
    let f_new = q + (1.0 - q) / 16.0;
    let mut schedule = vec![MixStep::Local {
        weight: 1.0 / total,
        before: vec![],
        after: vec![],
    }];
    schedule.extend(extra.into_iter().map(|(w, d)| MixStep::Separable {
        weight: w / total,
        description: d,
    }));
    Ok(SacrificeResult {
        protocol: "phase".into(),
        preprocessing: None,
        input_fidelity: f,
        achieved_fidelity: f_new,
        white_weight: Some(q),
        noise_ratio: noise_ratio(f, f_new),
        probabilities: None,
        schedule,
        output_vector: None,
        output: Some(out),
        mixers,
    })
}

/// The U(π/4) gate that the CNOT protocol targets in its frame.
pub fn cnot_frame_gate() -> ComplexMatrix {
    phase_gate(FRAC_PI_4)
}

/// Minimum of f′_max/f over a uniform grid on r, s, t ∈ (2/3, 1].
pub fn relative_fidelity_floor(target: IsotropicTarget, steps: usize) -> (f64, (f64, f64, f64)) {
    let mut best = (f64::INFINITY, (1.0, 1.0, 1.0));
    let grid: Vec<f64> = (1..=steps)
        .map(|k| 2.0 / 3.0 + k as f64 / (3.0 * steps as f64))
        .collect();
    for &r in &grid {
        for &s in &grid {
            for &t in &grid {
                let v = IsotropicVector::from_rst(r, s, t);
                if let Ok(fm) = max_sacrifice_fidelity(&v, target) {
                    let ratio = fm / v.fidelity();
                    if ratio < best.0 {
                        best = (ratio, (r, s, t));
                    }
                }
            }
        }
    }
    best
}
