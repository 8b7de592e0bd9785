//! Statevector and density-matrix simulation of parameterized circuits.
//!
//! Provides the three hardware-efficient ansatz families, exact expectation
//! values against Pauli sums, exact parameter-shift-free state derivatives,
//! and a per-gate depolarizing noise channel. Everything is exact arithmetic
//! on 2^n amplitudes; shot sampling is out of scope.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::hamiltonian::{Pauli, PauliSumHamiltonian};
use crate::numerics::ComplexMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum SimulatorError {
    #[error("ansatz family {family} does not support {n} qubits")]
    UnsupportedFamily { family: String, n: usize },
    #[error("circuit needs at least 2 qubits, got {0}")]
    InvalidSize(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dense density-matrix simulation capped at 8 qubits, got {0}")]
    TooLarge(usize),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GateKind {
    RX,
    RY,
    RZ,
    H,
    CX,
    CRY,
}

impl GateKind {
    pub fn is_parameterized(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CRY)
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, GateKind::CX | GateKind::CRY)
    }
}

/// One gate in program order. `control` is set exactly for CX/CRY and
/// `param_slot` exactly for the parameterized kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    pub param_slot: Option<usize>,
}

impl GateOp {
    pub fn rotation(kind: GateKind, target: usize, slot: usize) -> Self {
        debug_assert!(kind.is_parameterized() && kind != GateKind::CRY);
        Self { kind, target, control: None, param_slot: Some(slot) }
    }

    pub fn hadamard(target: usize) -> Self {
        Self { kind: GateKind::H, target, control: None, param_slot: None }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self { kind: GateKind::CX, target, control: Some(control), param_slot: None }
    }

    pub fn cry(control: usize, target: usize, slot: usize) -> Self {
        Self { kind: GateKind::CRY, target, control: Some(control), param_slot: Some(slot) }
    }

    fn support(&self) -> (usize, Option<usize>) {
        (self.target, self.control)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum AnsatzFamily {
    C0,
    C0Hat,
    C1,
    Custom,
}

impl fmt::Display for AnsatzFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            AnsatzFamily::C0 => "c0",
            AnsatzFamily::C0Hat => "c0_hat",
            AnsatzFamily::C1 => "c1",
            AnsatzFamily::Custom => "custom",
        };
        write!(f, "{tag}")
    }
}

impl std::str::FromStr for AnsatzFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "c0" => Ok(AnsatzFamily::C0),
            "c0_hat" => Ok(AnsatzFamily::C0Hat),
            "c1" => Ok(AnsatzFamily::C1),
            "custom" => Ok(AnsatzFamily::Custom),
            other => Err(format!("unknown ansatz family {other:?}")),
        }
    }
}

/// An ordered gate list with a compact parameter vector: slots are exactly
/// 0..n_params-1 and every slot is referenced by at least one gate.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzCircuit {
    n_qubits: usize,
    gates: Vec<GateOp>,
    n_params: usize,
    family: AnsatzFamily,
    layers: usize,
}

impl AnsatzCircuit {
    /// Wraps an arbitrary gate list, checking the structural invariants.
    pub fn custom(n_qubits: usize, gates: Vec<GateOp>) -> Result<Self, SimulatorError> {
        Self::validated(n_qubits, gates, AnsatzFamily::Custom, 1)
    }

    fn validated(
        n_qubits: usize,
        gates: Vec<GateOp>,
        family: AnsatzFamily,
        layers: usize,
    ) -> Result<Self, SimulatorError> {
        let mut max_slot: Option<usize> = None;
        for (i, g) in gates.iter().enumerate() {
            let needs_control = g.kind.is_two_qubit();
            if g.control.is_some() != needs_control {
                return Err(SimulatorError::InvalidCircuit(format!(
                    "gate {i}: control presence inconsistent with kind {:?}",
                    g.kind
                )));
            }
            if g.param_slot.is_some() != g.kind.is_parameterized() {
                return Err(SimulatorError::InvalidCircuit(format!(
                    "gate {i}: slot presence inconsistent with kind {:?}",
                    g.kind
                )));
            }
            if g.target >= n_qubits || g.control.is_some_and(|c| c >= n_qubits) {
                return Err(SimulatorError::InvalidCircuit(format!(
                    "gate {i}: qubit index out of range"
                )));
            }
            if g.control == Some(g.target) {
                return Err(SimulatorError::InvalidCircuit(format!(
                    "gate {i}: control equals target"
                )));
            }
            if let Some(s) = g.param_slot {
                max_slot = Some(max_slot.map_or(s, |m: usize| m.max(s)));
            }
        }
        let n_params = max_slot.map_or(0, |m| m + 1);
        let mut seen = vec![false; n_params];
        for g in &gates {
            if let Some(s) = g.param_slot {
                seen[s] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(SimulatorError::InvalidCircuit(format!(
                "parameter slot {missing} is never referenced"
            )));
        }
        Ok(Self { n_qubits, gates, n_params, family, layers })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn family(&self) -> AnsatzFamily {
        self.family
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind.is_two_qubit()).count()
    }

    /// Circuit depth under greedy as-soon-as-possible scheduling: each gate
    /// starts one moment after the latest gate touching any of its qubits.
    pub fn depth(&self) -> usize {
        let mut busy_until = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let (t, c) = g.support();
            let start = busy_until[t].max(c.map_or(0, |c| busy_until[c]));
            let end = start + 1;
            busy_until[t] = end;
            if let Some(c) = c {
                busy_until[c] = end;
            }
            depth = depth.max(end);
        }
        depth
    }

    /// Stable single-line-per-gate listing for reproducibility artifacts.
    pub fn serialize(&self) -> String {
        let mut out = format!(
            "# family={} n_qubits={} layers={} n_params={}\n",
            self.family, self.n_qubits, self.layers, self.n_params
        );
        for g in &self.gates {
            out.push_str(&format!("{:?} target={}", g.kind, g.target));
            if let Some(c) = g.control {
                out.push_str(&format!(" control={c}"));
            }
            if let Some(s) = g.param_slot {
                out.push_str(&format!(" slot={s}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Builds one of the hardware-efficient families.
///
/// c0 repeats [RY all; RZ all; CX (0,1),(2,3),..; RY inner; RZ inner;
/// CX (1,2),(3,4),..] for 4(n-1) parameters and n-1 two-qubit gates per
/// layer. c0_hat is c0 without the RZ sublayers. c1 is the fixed 6-parameter
/// four-qubit circuit [RY x4; CRY(0->1); CRY(2->3)].
pub fn build_ansatz(
    family: AnsatzFamily,
    n: usize,
    layers: usize,
) -> Result<AnsatzCircuit, SimulatorError> {
    if n < 2 {
        return Err(SimulatorError::InvalidSize(n));
    }
    if layers == 0 {
        return Err(SimulatorError::InvalidCircuit("layers must be positive".into()));
    }
    let mut gates = Vec::new();
    let mut slot = 0usize;
    let rot = |kind: GateKind, q: usize, gates: &mut Vec<GateOp>, slot: &mut usize| {
        gates.push(GateOp::rotation(kind, q, *slot));
        *slot += 1;
    };
    match family {
        AnsatzFamily::C0 | AnsatzFamily::C0Hat => {
            let with_rz = family == AnsatzFamily::C0;
            for _ in 0..layers {
                for q in 0..n {
                    rot(GateKind::RY, q, &mut gates, &mut slot);
                }
                if with_rz {
                    for q in 0..n {
                        rot(GateKind::RZ, q, &mut gates, &mut slot);
                    }
                }
                for q in (0..n - 1).step_by(2) {
                    gates.push(GateOp::cx(q, q + 1));
                }
                for q in 1..n - 1 {
                    rot(GateKind::RY, q, &mut gates, &mut slot);
                }
                if with_rz {
                    for q in 1..n - 1 {
                        rot(GateKind::RZ, q, &mut gates, &mut slot);
                    }
                }
                for q in (1..n - 1).step_by(2) {
                    gates.push(GateOp::cx(q, q + 1));
                }
            }
        }
        AnsatzFamily::C1 => {
            if n != 4 {
                return Err(SimulatorError::UnsupportedFamily { family: "c1".into(), n });
            }
            for _ in 0..layers {
                for q in 0..4 {
                    rot(GateKind::RY, q, &mut gates, &mut slot);
                }
                gates.push(GateOp::cry(0, 1, slot));
                slot += 1;
                gates.push(GateOp::cry(2, 3, slot));
                slot += 1;
            }
        }
        AnsatzFamily::Custom => {
            return Err(SimulatorError::UnsupportedFamily { family: "custom".into(), n });
        }
    }
    AnsatzCircuit::validated(n, gates, family, layers)
}

/// Normalized pure state on n qubits; qubit q is bit q of the index.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::ZERO; 1 << n_qubits];
        amplitudes[0] = Complex64::ONE;
        Self { n_qubits, amplitudes }
    }

    pub fn uniform_state(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { n_qubits, amplitudes: vec![amp; dim] }
    }

    pub fn from_amplitudes(
        n_qubits: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self, SimulatorError> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(SimulatorError::ShapeMismatch(format!(
                "expected {} amplitudes, got {}",
                1 << n_qubits,
                amplitudes.len()
            )));
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(SimulatorError::ShapeMismatch(format!(
                "state norm {norm} is not 1"
            )));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// <self|other>.
    pub fn inner(&self, other: &Self) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }
}

pub fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// <a|b> with the conjugate on the left argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn gate_angle(gate: &GateOp, theta: &[f64]) -> f64 {
    gate.param_slot.map_or(0.0, |s| theta[s])
}

/// Applies one gate in place; `angle` is ignored for H/CX.
fn apply_gate(amps: &mut [Complex64], gate: &GateOp, angle: f64) {
    let dim = amps.len();
    let t_mask = 1usize << gate.target;
    match gate.kind {
        GateKind::RY => {
            let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            for i in 0..dim {
                if i & t_mask == 0 {
                    let a0 = amps[i];
                    let a1 = amps[i | t_mask];
                    amps[i] = a0 * c - a1 * s;
                    amps[i | t_mask] = a0 * s + a1 * c;
                }
            }
        }
        GateKind::RX => {
            let c = Complex64::new((angle / 2.0).cos(), 0.0);
            let ms = Complex64::new(0.0, -(angle / 2.0).sin());
            for i in 0..dim {
                if i & t_mask == 0 {
                    let a0 = amps[i];
                    let a1 = amps[i | t_mask];
                    amps[i] = a0 * c + a1 * ms;
                    amps[i | t_mask] = a0 * ms + a1 * c;
                }
            }
        }
        GateKind::RZ => {
            let e0 = Complex64::from_polar(1.0, -angle / 2.0);
            let e1 = Complex64::from_polar(1.0, angle / 2.0);
            for (i, amp) in amps.iter_mut().enumerate() {
                *amp *= if i & t_mask == 0 { e0 } else { e1 };
            }
        }
        GateKind::H => {
            let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..dim {
                if i & t_mask == 0 {
                    let a0 = amps[i];
                    let a1 = amps[i | t_mask];
                    amps[i] = (a0 + a1) * inv_sqrt2;
                    amps[i | t_mask] = (a0 - a1) * inv_sqrt2;
                }
            }
        }
        GateKind::CX => {
            let c_mask = 1usize << gate.control.expect("CX has control");
            for i in 0..dim {
                if i & c_mask != 0 && i & t_mask == 0 {
                    amps.swap(i, i | t_mask);
                }
            }
        }
        GateKind::CRY => {
            let c_mask = 1usize << gate.control.expect("CRY has control");
            let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            for i in 0..dim {
                if i & c_mask != 0 && i & t_mask == 0 {
                    let a0 = amps[i];
                    let a1 = amps[i | t_mask];
                    amps[i] = a0 * c - a1 * s;
                    amps[i | t_mask] = a0 * s + a1 * c;
                }
            }
        }
    }
}

fn check_circuit_inputs(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    initial: &Statevector,
) -> Result<(), SimulatorError> {
    if theta.len() != ansatz.n_params() {
        return Err(SimulatorError::ShapeMismatch(format!(
            "theta length {} != n_params {}",
            theta.len(),
            ansatz.n_params()
        )));
    }
    if initial.n_qubits() != ansatz.n_qubits() {
        return Err(SimulatorError::ShapeMismatch(format!(
            "state has {} qubits, circuit has {}",
            initial.n_qubits(),
            ansatz.n_qubits()
        )));
    }
    Ok(())
}

/// Runs the circuit on `initial`. Rotations follow exp(-i theta G / 2);
/// CRY rotates the target only in the control=1 subspace.
pub fn apply_circuit(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    initial: &Statevector,
) -> Result<Statevector, SimulatorError> {
    check_circuit_inputs(ansatz, theta, initial)?;
    let mut amps = initial.amplitudes().to_vec();
    for gate in ansatz.gates() {
        apply_gate(&mut amps, gate, gate_angle(gate, theta));
    }
    Ok(Statevector { n_qubits: ansatz.n_qubits(), amplitudes: amps })
}

/// P|psi> for one Pauli string, on raw amplitudes.
pub fn apply_pauli_string(string: &[Pauli], amps: &[Complex64]) -> Vec<Complex64> {
    let dim = amps.len();
    let mut flip_mask = 0usize;
    for (q, &p) in string.iter().enumerate() {
        if matches!(p, Pauli::X | Pauli::Y) {
            flip_mask |= 1 << q;
        }
    }
    let mut out = vec![Complex64::ZERO; dim];
    for (i, &amp) in amps.iter().enumerate() {
        let mut factor = Complex64::ONE;
        for (q, &p) in string.iter().enumerate() {
            let bit = (i >> q) & 1;
            match p {
                Pauli::I | Pauli::X => {}
                Pauli::Y => factor *= if bit == 0 { Complex64::I } else { -Complex64::I },
                Pauli::Z => {
                    if bit == 1 {
                        factor = -factor;
                    }
                }
            }
        }
        out[i ^ flip_mask] += factor * amp;
    }
    out
}

/// H|psi> for a full Pauli sum, on raw amplitudes.
pub fn apply_pauli_sum(h: &PauliSumHamiltonian, amps: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; amps.len()];
    for term in h.terms() {
        let contrib = apply_pauli_string(term.string.paulis(), amps);
        for (o, c) in out.iter_mut().zip(contrib) {
            *o += term.coefficient * c;
        }
    }
    out
}

/// Exact <state|H|state>; the imaginary residue (below 1e-10 for Hermitian
/// input) is discarded.
pub fn expectation(
    state: &Statevector,
    h: &PauliSumHamiltonian,
) -> Result<f64, SimulatorError> {
    if state.n_qubits() != h.n_qubits() {
        return Err(SimulatorError::ShapeMismatch(format!(
            "state has {} qubits, operator has {}",
            state.n_qubits(),
            h.n_qubits()
        )));
    }
    let transformed = apply_pauli_sum(h, state.amplitudes());
    Ok(inner(state.amplitudes(), &transformed).re)
}

/// Generator G of a parameterized gate, applied to raw amplitudes:
/// the Pauli axis for rotations, |1><1| (x) Y for CRY.
fn apply_generator(gate: &GateOp, amps: &[Complex64]) -> Vec<Complex64> {
    let dim = amps.len();
    let t_mask = 1usize << gate.target;
    let mut out = vec![Complex64::ZERO; dim];
    match gate.kind {
        GateKind::RX => {
            for i in 0..dim {
                out[i ^ t_mask] += amps[i];
            }
        }
        GateKind::RY => {
            for i in 0..dim {
                let factor =
                    if i & t_mask == 0 { Complex64::I } else { -Complex64::I };
                out[i ^ t_mask] += factor * amps[i];
            }
        }
        GateKind::RZ => {
            for i in 0..dim {
                out[i] = if i & t_mask == 0 { amps[i] } else { -amps[i] };
            }
        }
        GateKind::CRY => {
            let c_mask = 1usize << gate.control.expect("CRY has control");
            for i in 0..dim {
                if i & c_mask != 0 {
                    let factor =
                        if i & t_mask == 0 { Complex64::I } else { -Complex64::I };
                    out[i ^ t_mask] += factor * amps[i];
                }
            }
        }
        GateKind::H | GateKind::CX => unreachable!("unparameterized gate"),
    }
    out
}

/// Exact derivative states d|psi(theta)>/d theta_k for every slot k.
/// For each gate with slot k the derivative inserts -i/2 times the gate
/// generator at the gate's position; slots shared by several gates sum.
pub fn state_gradient(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    initial: &Statevector,
) -> Result<Vec<Vec<Complex64>>, SimulatorError> {
    check_circuit_inputs(ansatz, theta, initial)?;
    let dim = 1usize << ansatz.n_qubits();
    let gates = ansatz.gates();
    let mut prefixes = Vec::with_capacity(gates.len() + 1);
    prefixes.push(initial.amplitudes().to_vec());
    for gate in gates {
        let mut next = prefixes.last().unwrap().clone();
        apply_gate(&mut next, gate, gate_angle(gate, theta));
        prefixes.push(next);
    }
    let half = Complex64::new(0.0, -0.5);
    let mut grads = vec![vec![Complex64::ZERO; dim]; ansatz.n_params()];
    for (g_idx, gate) in gates.iter().enumerate() {
        let Some(slot) = gate.param_slot else { continue };
        let mut contrib = apply_generator(gate, &prefixes[g_idx + 1]);
        for c in &mut contrib {
            *c *= half;
        }
        for later in &gates[g_idx + 1..] {
            apply_gate(&mut contrib, later, gate_angle(later, theta));
        }
        for (acc, c) in grads[slot].iter_mut().zip(contrib) {
            *acc += c;
        }
    }
    Ok(grads)
}

/// Depolarizing strengths applied after every gate on its support qubits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    p1: f64,
    p2: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64) -> Result<Self, SimulatorError> {
        for p in [p1, p2] {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(SimulatorError::InvalidProbability(p));
            }
        }
        Ok(Self { p1, p2 })
    }

    pub fn noiseless() -> Self {
        Self { p1: 0.0, p2: 0.0 }
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }
}

/// Mixed state as a dense 2^n x 2^n matrix.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn from_statevector(state: &Statevector) -> Self {
        let dim = state.amplitudes().len();
        let mut matrix = ComplexMatrix::zeros(dim);
        for (i, &a) in state.amplitudes().iter().enumerate() {
            for (j, &b) in state.amplitudes().iter().enumerate() {
                matrix.set(i, j, a * b.conj());
            }
        }
        Self { n_qubits: state.n_qubits(), matrix }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        let dim = self.matrix.dim();
        let mut acc = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                acc += (self.matrix.get(i, j) * self.matrix.get(j, i)).re;
            }
        }
        acc
    }

    /// Tr(rho H), exact.
    pub fn expectation(&self, h: &PauliSumHamiltonian) -> Result<f64, SimulatorError> {
        if self.n_qubits != h.n_qubits() {
            return Err(SimulatorError::ShapeMismatch(format!(
                "density matrix has {} qubits, operator has {}",
                self.n_qubits,
                h.n_qubits()
            )));
        }
        let dim = self.matrix.dim();
        let mut acc = Complex64::ZERO;
        for term in h.terms() {
            // Tr(rho P) = sum_i rho[i][r_i] phase_i with P|i> = phase_i |r_i>.
            for i in 0..dim {
                let mut basis = vec![Complex64::ZERO; dim];
                basis[i] = Complex64::ONE;
                let image = apply_pauli_string(term.string.paulis(), &basis);
                for (j, v) in image.iter().enumerate() {
                    if v.norm_sqr() > 0.0 {
                        acc += term.coefficient * self.matrix.get(i, j) * v;
                    }
                }
            }
        }
        Ok(acc.re)
    }
}

/// rho -> U rho U^dagger for one gate, via U(U rho)^dagger)^dagger.
fn conjugate_gate(m: &ComplexMatrix, gate: &GateOp, angle: f64) -> ComplexMatrix {
    let dim = m.dim();
    let apply_left = |src: &ComplexMatrix| {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|j| (0..dim).map(|i| src.get(i, j)).collect())
            .collect();
        for col in &mut cols {
            apply_gate(col, gate, angle);
        }
        let mut out = ComplexMatrix::zeros(dim);
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out
    };
    apply_left(&apply_left(m).adjoint()).adjoint()
}

/// Depolarizes the listed qubits: rho <- (1-p) rho + p (I/2^k (x) Tr_S rho).
fn depolarize_support(m: &ComplexMatrix, n: usize, support: &[usize], p: f64) -> ComplexMatrix {
    if p == 0.0 {
        return m.clone();
    }
    let k = support.len();
    let rest: Vec<usize> = (0..n).filter(|q| !support.contains(q)).collect();
    let dim = m.dim();
    let dim_s = 1usize << k;
    let dim_r = 1usize << rest.len();
    let compose = |s_bits: usize, r_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in support.iter().enumerate() {
            idx |= ((s_bits >> pos) & 1) << q;
        }
        for (pos, &q) in rest.iter().enumerate() {
            idx |= ((r_bits >> pos) & 1) << q;
        }
        idx
    };
    let mut sigma = vec![Complex64::ZERO; dim_r * dim_r];
    for r1 in 0..dim_r {
        for r2 in 0..dim_r {
            let mut acc = Complex64::ZERO;
            for s in 0..dim_s {
                acc += m.get(compose(s, r1), compose(s, r2));
            }
            sigma[r1 * dim_r + r2] = acc;
        }
    }
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            out.set(i, j, m.get(i, j) * (1.0 - p));
        }
    }
    let weight = p / dim_s as f64;
    for s in 0..dim_s {
        for r1 in 0..dim_r {
            for r2 in 0..dim_r {
                let i = compose(s, r1);
                let j = compose(s, r2);
                out.add_to(i, j, sigma[r1 * dim_r + r2] * weight);
            }
        }
    }
    out
}

fn evolve_density_gates(
    gates: &[GateOp],
    n: usize,
    theta: &[f64],
    noise: &NoiseModel,
    initial: &DensityMatrix,
) -> DensityMatrix {
    let mut rho = initial.matrix().clone();
    for gate in gates {
        rho = conjugate_gate(&rho, gate, gate_angle(gate, theta));
        let p = if gate.kind.is_two_qubit() { noise.p2 } else { noise.p1 };
        if p > 0.0 {
            let support: Vec<usize> = match gate.control {
                Some(c) => vec![gate.target, c],
                None => vec![gate.target],
            };
            rho = depolarize_support(&rho, n, &support, p);
        }
    }
    DensityMatrix { n_qubits: n, matrix: rho }
}

/// Runs the circuit on a density matrix with per-gate depolarizing noise on
/// each gate's support qubits. Trace and Hermiticity are preserved exactly
/// by construction.
pub fn evolve_density_with_noise(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    noise: &NoiseModel,
    initial: &DensityMatrix,
) -> Result<DensityMatrix, SimulatorError> {
    if ansatz.n_qubits() > 8 {
        return Err(SimulatorError::TooLarge(ansatz.n_qubits()));
    }
    if theta.len() != ansatz.n_params() {
        return Err(SimulatorError::ShapeMismatch(format!(
            "theta length {} != n_params {}",
            theta.len(),
            ansatz.n_params()
        )));
    }
    if initial.n_qubits() != ansatz.n_qubits() {
        return Err(SimulatorError::ShapeMismatch(format!(
            "density matrix has {} qubits, circuit has {}",
            initial.n_qubits(),
            ansatz.n_qubits()
        )));
    }
    Ok(evolve_density_gates(ansatz.gates(), ansatz.n_qubits(), theta, noise, initial))
}
