//! Exact averaging of Choi states over finite sets of correlated local unitaries.
//!
//! An element applies `pre` before the channel and `post` after it. On the state side this is
//! conjugation by post ⊗ preᵀ; with pre = U† the input factor receives U*.

use crate::channel::choi_vector;
use crate::channel::ChoiState;
use crate::error::{Error, Result};
use crate::linalg::{c, kron, kron_all, mat_exp, ComplexMatrix, TensorShape, C64, TAU_EIG};
use crate::pauli::{clifford_group, gen_pauli, is_prime, lu_cnot_unitaries, sigma};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

#[derive(Clone, Debug, PartialEq)]
pub struct TwirlElement {
    pub probability: f64,
    pub pre: ComplexMatrix,
    pub post: ComplexMatrix,
    pub label: String,
}

impl TwirlElement {
    /// U† before, U after.
    pub fn conjugation(probability: f64, u: ComplexMatrix, label: impl Into<String>) -> Self {
        TwirlElement {
            probability,
            pre: u.adjoint(),
            post: u,
            label: label.into(),
        }
    }

    /// State-side operator post ⊗ preᵀ.
    pub fn state_operator(&self) -> ComplexMatrix {
        kron(&self.post, &self.pre.transpose())
    }

    /// Element `self` applied after `inner` (state operator O_self·O_inner).
    pub fn compose(&self, inner: &TwirlElement) -> TwirlElement {
        TwirlElement {
            probability: self.probability * inner.probability,
            pre: &inner.pre * &self.pre,
            post: &self.post * &inner.post,
            label: join_labels(&self.label, &inner.label),
        }
    }
}

fn join_labels(a: &str, b: &str) -> String {
    match (a.is_empty(), b.is_empty()) {
        (true, _) => b.to_string(),
        (_, true) => a.to_string(),
        _ => format!("{a}·{b}"),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Structure {
    Flat(Vec<TwirlElement>),
    /// Independent uniform choice from each factor; element = f₀·f₁·…, so the last factor acts first.
    Product(Vec<TwirlSet>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwirlSet {
    structure: Structure,
    pub label: String,
    preserves: Option<ComplexMatrix>,
}

impl TwirlSet {
    /// Validates unitarity and normalization of a flat element list.
    pub fn flat(elements: Vec<TwirlElement>, label: impl Into<String>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::Validation("empty twirl set".into()))?;
        let (din, dout) = (first.pre.rows(), first.post.rows());
        let mut total = 0.0;
        for e in &elements {
            if !(e.probability > 0.0 && e.probability <= 1.0) {
                return Err(Error::Validation(format!(
                    "element probability {} outside (0,1]",
                    e.probability
                )));
            }
            if e.pre.rows() != din || e.post.rows() != dout {
                return Err(Error::Dimension(
                    "twirl elements have inconsistent dimensions".into(),
                ));
            }
            if !e.pre.is_unitary(TAU_EIG) || !e.post.is_unitary(TAU_EIG) {
                return Err(Error::Validation(format!(
                    "element '{}' is not unitary",
                    e.label
                )));
            }
            total += e.probability;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("probabilities sum to {total}")));
        }
        Ok(TwirlSet {
            structure: Structure::Flat(elements),
            label: label.into(),
            preserves: None,
        })
    }

    /// Uniform set of conjugations U† · U.
    pub fn uniform(
        unitaries: Vec<(ComplexMatrix, String)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let p = 1.0 / unitaries.len().max(1) as f64;
        Self::flat(
            unitaries
                .into_iter()
                .map(|(u, l)| TwirlElement::conjugation(p, u, l))
                .collect(),
            label,
        )
    }

    /// Independent product of sets; the last factor is applied to the channel first.
    pub fn product(factors: Vec<TwirlSet>, label: impl Into<String>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::Validation("empty product".into()))?;
        let dims = first.dims();
        if factors.iter().any(|f| f.dims() != dims) {
            return Err(Error::Dimension(
                "product factors have inconsistent dimensions".into(),
            ));
        }
        Ok(TwirlSet {
            structure: Structure::Product(factors),
            label: label.into(),
            preserves: None,
        })
    }

    /// Declares and checks a unitary that every element must stabilize up to phase.
    pub fn with_preserves(mut self, u: ComplexMatrix) -> Result<Self> {
        let (din, dout) = self.dims();
        if u.rows() != dout || u.cols() != din {
            return Err(Error::Dimension(
                "preserved unitary does not match the set".into(),
            ));
        }
        if !self.stabilizes(&u) {
            return Err(Error::Validation(format!(
                "set '{}' does not stabilize the target",
                self.label
            )));
        }
        self.preserves = Some(u);
        Ok(self)
    }

    pub fn preserves(&self) -> Option<&ComplexMatrix> {
        self.preserves.as_ref()
    }

    /// (d_in, d_out) of the channels this set acts on.
    pub fn dims(&self) -> (usize, usize) {
        match &self.structure {
            Structure::Flat(els) => (els[0].pre.rows(), els[0].post.rows()),
            Structure::Product(fs) => fs[0].dims(),
        }
    }

    /// Number of flattened elements.
    pub fn len(&self) -> usize {
        match &self.structure {
            Structure::Flat(els) => els.len(),
            Structure::Product(fs) => fs.iter().map(|f| f.len()).product(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat list of composite elements.
    pub fn elements(&self) -> Vec<TwirlElement> {
        match &self.structure {
            Structure::Flat(els) => els.clone(),
            Structure::Product(fs) => {
                let mut acc: Vec<TwirlElement> = fs[0].elements();
                for f in &fs[1..] {
                    let inner = f.elements();
                    acc = acc
                        .iter()
                        .flat_map(|a| inner.iter().map(move |b| a.compose(b)))
                        .collect();
                }
                acc
            }
        }
    }

    /// Whether every element maps |Ψ_U⟩ to a phase multiple of itself.
    pub fn stabilizes(&self, u: &ComplexMatrix) -> bool {
        let v = choi_vector(u);
        let check = |els: &[TwirlElement]| {
            els.iter().all(|e| {
                let w = e.state_operator().matvec(&v);
                let overlap: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                (overlap.norm() - 1.0).abs() <= TAU_EIG
            })
        };
        match &self.structure {
            Structure::Flat(els) => check(els),
            Structure::Product(fs) => fs.iter().all(|f| f.stabilizes(u)) || check(&self.elements()),
        }
    }

    /// Same set with every element conjugated into the frame L·U·R of a target U.
    pub fn conjugated(&self, left: &ComplexMatrix, right: &ComplexMatrix) -> Result<TwirlSet> {
        let (din, dout) = self.dims();
        if left.rows() != dout || right.rows() != din {
            return Err(Error::Dimension(
                "conjugating unitaries do not match the set".into(),
            ));
        }
        let structure = match &self.structure {
            Structure::Flat(els) => Structure::Flat(
                els.iter()
                    .map(|e| TwirlElement {
                        probability: e.probability,
                        pre: &(&right.adjoint() * &e.pre) * right,
                        post: &(left * &e.post) * &left.adjoint(),
                        label: e.label.clone(),
                    })
                    .collect(),
            ),
            Structure::Product(fs) => Structure::Product(
                fs.iter()
                    .map(|f| f.conjugated(left, right))
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(TwirlSet {
            structure,
            label: self.label.clone(),
            preserves: self.preserves.as_ref().map(|u| &(left * u) * right),
        })
    }
}

/// E′ = Σ pₖ Oₖ E Oₖ† with Oₖ = postₖ ⊗ preₖᵀ.
pub fn twirl(e: &ChoiState, set: &TwirlSet) -> Result<ChoiState> {
    let (din, dout) = set.dims();
    if din != e.d_in() || dout != e.d_out() {
        return Err(Error::Dimension(format!(
            "twirl set acts on {din}->{dout}, channel is {}->{}",
            e.d_in(),
            e.d_out()
        )));
    }
    match &set.structure {
        Structure::Flat(els) => {
            let m = e.matrix();
            let mut acc = ComplexMatrix::zeros(m.rows(), m.cols());
            for el in els {
                acc += &m
                    .conjugate_by(&el.state_operator())
                    .scale_re(el.probability);
            }
            Ok(e.with_matrix(acc.hermitian_part()))
        }
        Structure::Product(fs) => fs.iter().rev().try_fold(e.clone(), |acc, f| twirl(&acc, f)),
    }
}

/// 𝟙^{⊗party} ⊗ u ⊗ 𝟙^{⊗rest} on `parties` factors of dimension d.
pub fn embed(u: &ComplexMatrix, party: usize, d: usize, parties: usize) -> ComplexMatrix {
    let left = ComplexMatrix::identity(d.pow(party as u32));
    let right = ComplexMatrix::identity(d.pow((parties - party - 1) as u32));
    kron_all(&[&left, u, &right])
}

fn embed_set(
    set: &TwirlSet,
    party: usize,
    d: usize,
    parties: usize,
    label: String,
) -> Result<TwirlSet> {
    let els = set
        .elements()
        .into_iter()
        .map(|e| TwirlElement {
            probability: e.probability,
            pre: embed(&e.pre, party, d, parties),
            post: embed(&e.post, party, d, parties),
            label: e.label,
        })
        .collect();
    TwirlSet::flat(els, label)
}

fn per_party(single: TwirlSet, d: usize, parties: usize, label: &str) -> Result<TwirlSet> {
    if parties == 0 {
        return Err(Error::Validation("at least one party is required".into()));
    }
    if parties == 1 {
        return Ok(TwirlSet {
            label: label.to_string(),
            ..single
        });
    }
    let factors = (0..parties)
        .map(|p| embed_set(&single, p, d, parties, format!("{label}[{p}]")))
        .collect::<Result<Vec<_>>>()?;
    TwirlSet::product(factors, label)
}

fn single_pauli_set(d: usize) -> Result<TwirlSet> {
    let mut us = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            us.push((gen_pauli(d, k, l)?, format!("U{k}{l}")));
        }
    }
    TwirlSet::uniform(us, "pauli")
}

/// Uniform U_𝐤𝐥† · U_𝐤𝐥 over all d^{2N} local Pauli products.
pub fn pauli_set(d: usize, parties: usize) -> Result<TwirlSet> {
    if d < 2 {
        return Err(Error::Validation("dimension must be at least 2".into()));
    }
    let set = per_party(single_pauli_set(d)?, d, parties, "pauli")?
        .with_preserves(ComplexMatrix::identity(d.pow(parties as u32)))?;
    Ok(set)
}

fn single_depolarizing_set(d: usize) -> Result<TwirlSet> {
    if !is_prime(d) {
        return Err(Error::Validation(format!(
            "depolarizing set needs a prime dimension, got {d}"
        )));
    }
    let mixer = if d == 2 {
        // Q_k = e^{iπ/4 σ_k}: cycles the three non-trivial Bell states.
        let qs = (1..=3)
            .map(|k| (mat_exp(&sigma(k).scale(c(0.0, FRAC_PI_4))), format!("Q{k}")))
            .collect();
        TwirlSet::uniform(qs, "clifford")?
    } else {
        let qs = clifford_group(d)?
            .into_iter()
            .map(|(m, q)| (q, format!("C[{},{},{},{}]", m.a, m.b, m.c, m.e)))
            .collect();
        TwirlSet::uniform(qs, "clifford")?
    };
    TwirlSet::product(vec![mixer, single_pauli_set(d)?], "depolarizing")
}

/// Pauli twirl followed by Clifford mixing, independently on every party.
pub fn depolarizing_set(d: usize, parties: usize) -> Result<TwirlSet> {
    let single = single_depolarizing_set(d)?;
    let set = if parties == 1 {
        single
    } else {
        if parties == 0 {
            return Err(Error::Validation("at least one party is required".into()));
        }
        let mut factors = Vec::new();
        for p in 0..parties {
            match &single.structure {
                Structure::Product(fs) => {
                    for f in fs {
                        factors.push(embed_set(f, p, d, parties, format!("{}[{p}]", f.label))?);
                    }
                }
                Structure::Flat(_) => unreachable!(),
            }
        }
        TwirlSet::product(factors, "depolarizing")?
    };
    set.with_preserves(ComplexMatrix::identity(d.pow(parties as u32)))
}

/// The 32 products 𝒰₁·𝒰₂·𝒰₃ stabilizing every |Ψ_α⟩.
pub fn phase_gate_set() -> TwirlSet {
    let id2 = ComplexMatrix::identity(2);
    let r = mat_exp(&sigma(2).scale(c(0.0, -FRAC_PI_4)));
    let u1 = vec![
        (ComplexMatrix::identity(4), "1".to_string()),
        (kron(&r, &id2), "Ry⊗1".to_string()),
        (kron(&id2, &r), "1⊗Ry".to_string()),
        (kron(&r, &r), "Ry⊗Ry".to_string()),
    ];
    let u2 = vec![
        (ComplexMatrix::identity(4), "1".to_string()),
        (kron(&sigma(1), &sigma(1)), "X⊗X".to_string()),
    ];
    let u3 = vec![
        (ComplexMatrix::identity(4), "1".to_string()),
        (kron(&sigma(2), &id2), "Y⊗1".to_string()),
        (kron(&id2, &sigma(2)), "1⊗Y".to_string()),
        (kron(&sigma(2), &sigma(2)), "Y⊗Y".to_string()),
    ];
    let mut us = Vec::with_capacity(32);
    for (a, la) in &u1 {
        for (b, lb) in &u2 {
            for (cc, lc) in &u3 {
                us.push((&(a * b) * cc, format!("{la}·{lb}·{lc}")));
            }
        }
    }
    TwirlSet::uniform(us, "phase-gate").expect("valid unitaries")
}

/// {𝟙, 𝒲_A 𝒲̃_B}: iσ_y on A′, σ_x on B′ and σ_z on B, each with probability ½.
pub fn cnot_extension_set() -> TwirlSet {
    let id = TwirlElement {
        probability: 0.5,
        pre: ComplexMatrix::identity(4),
        post: ComplexMatrix::identity(4),
        label: "1".into(),
    };
    let w = TwirlElement {
        probability: 0.5,
        pre: kron(&ComplexMatrix::identity(2), &sigma(3)),
        post: kron(&sigma(2).scale(c(0.0, 1.0)), &sigma(1)),
        label: "W_A·W~_B".into(),
    };
    TwirlSet::flat(vec![id, w], "cnot-extension")
        .and_then(|s| s.with_preserves(crate::pauli::phase_gate(FRAC_PI_4)))
        .expect("extension stabilizes U(π/4)")
}

/// Full depolarization for U(π/4): the phase-gate set followed by the CNOT extension.
pub fn cnot_frame_set() -> TwirlSet {
    TwirlSet::product(vec![cnot_extension_set(), phase_gate_set()], "cnot")
        .and_then(|s| s.with_preserves(crate::pauli::phase_gate(FRAC_PI_4)))
        .expect("stabilizes U(π/4)")
}

/// The CNOT-frame set moved onto the CNOT gate itself via its local-unitary relation to U(π/4).
pub fn cnot_set() -> TwirlSet {
    let [u1, u2, v1, v2] = lu_cnot_unitaries();
    conjugate_set(&cnot_frame_set(), &[u1, u2], &[v1, v2]).expect("consistent dimensions")
}

/// Depolarizing construction on the crosswise pairs (A′₂,A₁) and (A′₁,A₂).
pub fn swap_set(d: usize) -> Result<TwirlSet> {
    let single = single_depolarizing_set(d)?;
    let id = ComplexMatrix::identity(d);
    let mut factors = Vec::new();
    // U on output 2 with U* on input 1; V on output 1 with V* on input 2.
    for (out_first, tag) in [(false, "U"), (true, "V")] {
        if let Structure::Product(fs) = &single.structure {
            for f in fs {
                let els = f
                    .elements()
                    .into_iter()
                    .map(|e| {
                        let u = e.post.clone();
                        let (post, pre) = if out_first {
                            (kron(&u, &id), kron(&id, &u.adjoint()))
                        } else {
                            (kron(&id, &u), kron(&u.adjoint(), &id))
                        };
                        TwirlElement {
                            probability: e.probability,
                            pre,
                            post,
                            label: format!("{tag}:{}", e.label),
                        }
                    })
                    .collect();
                factors.push(TwirlSet::flat(els, format!("swap-{tag}"))?);
            }
        }
    }
    let swap = crate::pauli::gate(crate::pauli::GateKind::Swap).matrix;
    let set = TwirlSet::product(factors, "swap")?;
    if d == 2 {
        set.with_preserves(swap)
    } else {
        set.with_preserves(swap_matrix(d))
    }
}

/// SWAP on ℂ^d ⊗ ℂ^d.
pub fn swap_matrix(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |i, j| {
        if j == (i % d) * d + i / d {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Replaces every element W by its image in the frame L·U·R, where L = ⊗left and R = ⊗right.
pub fn conjugate_set(
    set: &TwirlSet,
    left: &[ComplexMatrix],
    right: &[ComplexMatrix],
) -> Result<TwirlSet> {
    let l = kron_all(&left.iter().collect::<Vec<_>>());
    let r = kron_all(&right.iter().collect::<Vec<_>>());
    if !l.is_unitary(TAU_EIG) || !r.is_unitary(TAU_EIG) {
        return Err(Error::Validation(
            "conjugating operators must be unitary".into(),
        ));
    }
    set.conjugated(&l, &r)
}

/// Custom set format: conjugations by listed unitaries, or explicit pre/post pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CustomSetJson {
    pub elements: Vec<CustomElementJson>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CustomElementJson {
    pub probability: f64,
    pub unitary_re: Vec<Vec<f64>>,
    pub unitary_im: Vec<Vec<f64>>,
    /// Optional operator applied before the channel; defaults to the adjoint of `unitary`.
    #[serde(default)]
    pub pre_re: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub pre_im: Option<Vec<Vec<f64>>>,
}

pub fn custom_set(spec: &CustomSetJson) -> Result<TwirlSet> {
    let mut els = Vec::with_capacity(spec.elements.len());
    for (idx, e) in spec.elements.iter().enumerate() {
        let post = crate::channel::join_matrix(&e.unitary_re, &e.unitary_im)?;
        let pre = match (&e.pre_re, &e.pre_im) {
            (Some(re), Some(im)) => crate::channel::join_matrix(re, im)?,
            (None, None) => post.adjoint(),
            _ => {
                return Err(Error::Validation(
                    "pre_re and pre_im must be given together".into(),
                ))
            }
        };
        els.push(TwirlElement {
            probability: e.probability,
            pre,
            post,
            label: format!("custom{idx}"),
        });
    }
    TwirlSet::flat(els, spec.label.clone().unwrap_or_else(|| "custom".into()))
}

/// Built-in set by name: `pauli`, `depolarizing`, `phase-gate`, `cnot`, `swap`.
pub fn named_set(name: &str, shape: &TensorShape) -> Result<TwirlSet> {
    let factors = shape.factors();
    let d = factors[0];
    if factors.iter().any(|&x| x != d) {
        return Err(Error::Dimension(
            "named twirl sets need parties of equal dimension".into(),
        ));
    }
    match name {
        "pauli" => pauli_set(d, factors.len()),
        "depolarizing" => depolarizing_set(d, factors.len()),
        "phase-gate" => Ok(phase_gate_set()),
        "cnot" => Ok(cnot_set()),
        "swap" => swap_set(d),
        other => Err(Error::Validation(format!("unknown twirl set '{other}'"))),
    }
}

/// Shape helper for n qubits.
pub fn qubits(n: usize) -> TensorShape {
    TensorShape::uniform(2, n).expect("n >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{choi_of_unitary, jamiolkowski_fidelity};
    use crate::pauli::{phase_gate, qubit_bell, sigma_bell_product};
    use crate::testutil::random_channel;

    #[test]
    fn pauli_twirl_diagonalizes() {
        let e = random_channel(2, 3, 7);
        let t = twirl(&e, &pauli_set(2, 1).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let z = t.matrix().sandwich_vec(&qubit_bell(i), &qubit_bell(j));
                if i == j {
                    let before = e.matrix().sandwich_vec(&qubit_bell(i), &qubit_bell(i));
                    assert!((z - before).norm() < 1e-12);
                } else {
                    assert!(z.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn depolarizing_qubit_is_isotropic() {
        let e = random_channel(2, 2, 11);
        let t = twirl(&e, &depolarizing_set(2, 1).unwrap()).unwrap();
        assert_eq!(depolarizing_set(2, 1).unwrap().len(), 12);
        let f = jamiolkowski_fidelity(&e, &ComplexMatrix::identity(2)).unwrap();
        let iso = crate::channel::isotropic_state(2, f);
        assert!(t.matrix().max_abs_diff(iso.matrix()) < 1e-12);
    }

    #[test]
    fn depolarizing_qutrit_is_isotropic() {
        let e = random_channel(3, 2, 5);
        let t = twirl(&e, &depolarizing_set(3, 1).unwrap()).unwrap();
        let f = jamiolkowski_fidelity(&e, &ComplexMatrix::identity(3)).unwrap();
        assert!(
            t.matrix()
                .max_abs_diff(crate::channel::isotropic_state(3, f).matrix())
                < 1e-12
        );
    }

    #[test]
    fn phase_set_stabilizes_all_angles() {
        let s = phase_gate_set();
        assert_eq!(s.len(), 32);
        for a in [0.1, FRAC_PI_4, 1.0, 0.7] {
            assert!(s.stabilizes(&phase_gate(a)));
            let e = choi_of_unitary(&phase_gate(a), &qubits(2)).unwrap();
            assert!(twirl(&e, &s).unwrap().matrix().max_abs_diff(e.matrix()) < 1e-13);
        }
    }

    #[test]
    fn y_conjugation_signs_on_bell_states() {
        // U = iσ_y before and after: ψ₀,ψ₂ fixed, ψ₁,ψ₃ negated.
        let el = TwirlElement::conjugation(1.0, sigma(2).scale(c(0.0, 1.0)), "");
        let o = el.state_operator();
        for (i, s) in [1.0, -1.0, 1.0, -1.0].iter().enumerate() {
            let v = qubit_bell(i);
            let w = o.matvec(&v);
            assert!(v.iter().zip(&w).all(|(a, b)| (a * *s - b).norm() < 1e-14));
        }
        let two = TwirlElement::conjugation(1.0, kron(&sigma(2), &sigma(2)), "");
        let v = sigma_bell_product(&[1, 2]);
        let w = two.state_operator().matvec(&v);
        assert!(v.iter().zip(&w).all(|(a, b)| (-a - b).norm() < 1e-14));
    }

    #[test]
    fn extension_rejects_other_angles() {
        let ext = cnot_extension_set();
        assert!(ext.stabilizes(&phase_gate(FRAC_PI_4)));
        assert!(!ext.stabilizes(&phase_gate(0.3)));
        assert!(ext.clone().with_preserves(phase_gate(0.3)).is_err());
    }

    #[test]
    fn cnot_set_stabilizes_cnot() {
        let s = cnot_set();
        let cn = crate::pauli::gate(crate::pauli::GateKind::Cnot).matrix;
        assert!(s.stabilizes(&cn));
        let e = choi_of_unitary(&cn, &qubits(2)).unwrap();
        assert!(twirl(&e, &s).unwrap().matrix().max_abs_diff(e.matrix()) < 1e-12);
    }

    #[test]
    fn swap_set_stabilizes_swap() {
        let s = swap_set(2).unwrap();
        assert_eq!(s.len(), 144);
        let sw = swap_matrix(2);
        let e = choi_of_unitary(&sw, &qubits(2)).unwrap();
        assert!(twirl(&e, &s).unwrap().matrix().max_abs_diff(e.matrix()) < 1e-12);
    }

    #[test]
    fn product_twirl_equals_flat_average() {
        let s = depolarizing_set(2, 1).unwrap();
        let e = random_channel(2, 4, 3);
        let flat = TwirlSet::flat(s.elements(), "flat").unwrap();
        let a = twirl(&e, &s).unwrap();
        let b = twirl(&e, &flat).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-14);
    }

    #[test]
    fn invalid_sets_are_rejected() {
        let bad = TwirlElement {
            probability: 0.5,
            pre: ComplexMatrix::identity(2),
            post: ComplexMatrix::identity(2),
            label: String::new(),
        };
        assert!(TwirlSet::flat(vec![bad.clone()], "x").is_err());
        assert!(depolarizing_set(4, 1).is_err());
        let nonunitary = TwirlElement {
            probability: 1.0,
            pre: ComplexMatrix::identity(2).scale_re(2.0),
            ..bad
        };
        assert!(TwirlSet::flat(vec![nonunitary], "x").is_err());
    }
}
