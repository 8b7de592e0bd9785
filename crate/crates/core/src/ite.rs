//! Imaginary-time evolution: the exact dense-matrix oracle and the
//! variational engine (VITE) that produces parameter records for clustering.
//!
//! The exact path evolves v0 under exp(-(H-sI)^2 t) in the eigenbasis of H
//! and is the ground truth everything else is checked against. The
//! variational path integrates McLachlan's projection A theta_dot = -C with
//! explicit Euler steps, reducing angles mod 2pi after every step.

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::hamiltonian::{shift_and_square, HamiltonianError, PauliSumHamiltonian};
use crate::numerics::{
    hermitian_eigendecomposition, solve_regularized, NumericsError,
};
use crate::simulator::{
    apply_circuit, apply_pauli_sum, evolve_density_with_noise, expectation, inner,
    state_gradient, AnsatzCircuit, DensityMatrix, NoiseModel, SimulatorError, Statevector,
};

#[derive(Debug, Error)]
pub enum IteError {
    #[error("evolved state has zero norm (time too large for the initial overlap)")]
    ZeroNorm,
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("exact propagation capped at 10 qubits, got {0}")]
    TooLarge(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("record parse error at line {line}: {message}")]
    RecordParse { line: usize, message: String },
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

const EXACT_QUBIT_CAP: usize = 10;

/// Exact propagator for one Hamiltonian: diagonalizes dense(H) once, then
/// evolves any (s, t, v0) in the eigenbasis. Exponents are rescaled by
/// their minimum so long times stay finite; the global factor cancels in
/// the normalization.
pub struct ItePropagator {
    eigenvalues: Vec<f64>,
    basis: crate::numerics::ComplexMatrix,
    n_qubits: usize,
}

impl ItePropagator {
    pub fn new(h: &PauliSumHamiltonian) -> Result<Self, IteError> {
        if h.n_qubits() > EXACT_QUBIT_CAP {
            return Err(IteError::TooLarge(h.n_qubits()));
        }
        let eig = hermitian_eigendecomposition(&h.to_dense()?)?;
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            basis: eig.eigenvectors,
            n_qubits: h.n_qubits(),
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenbasis coefficients of the evolved, normalized state.
    fn evolved_coefficients(
        &self,
        s: f64,
        t: f64,
        v0: &Statevector,
    ) -> Result<Vec<f64>, IteError> {
        if v0.n_qubits() != self.n_qubits {
            return Err(IteError::Simulator(SimulatorError::ShapeMismatch(format!(
                "initial state has {} qubits, Hamiltonian has {}",
                v0.n_qubits(),
                self.n_qubits
            ))));
        }
        let dim = 1usize << self.n_qubits;
        let mut coeffs = vec![Complex64::ZERO; dim];
        for k in 0..dim {
            let mut acc = Complex64::ZERO;
            for i in 0..dim {
                acc += self.basis.get(i, k).conj() * v0.amplitudes()[i];
            }
            coeffs[k] = acc;
        }
        let exponents: Vec<f64> =
            self.eigenvalues.iter().map(|&lam| (lam - s).powi(2) * t).collect();
        let min_exp = exponents.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut norm_sqr = 0.0;
        let mut weights = vec![0.0; dim];
        for k in 0..dim {
            let w = (-(exponents[k] - min_exp)).exp();
            weights[k] = w;
            norm_sqr += (coeffs[k] * w).norm_sqr();
        }
        if norm_sqr < 1e-300 {
            return Err(IteError::ZeroNorm);
        }
        let norm = norm_sqr.sqrt();
        Ok((0..dim).map(|k| weights[k] / norm).collect())
    }

    /// exp(-(H-sI)^2 t) v0, normalized.
    pub fn evolve(&self, s: f64, t: f64, v0: &Statevector) -> Result<Statevector, IteError> {
        let scale = self.evolved_coefficients(s, t, v0)?;
        let dim = 1usize << self.n_qubits;
        let mut amps = vec![Complex64::ZERO; dim];
        for k in 0..dim {
            if scale[k] == 0.0 {
                continue;
            }
            let mut ck = Complex64::ZERO;
            for i in 0..dim {
                ck += self.basis.get(i, k).conj() * v0.amplitudes()[i];
            }
            let w = ck * scale[k];
            for i in 0..dim {
                amps[i] += self.basis.get(i, k) * w;
            }
        }
        Statevector::from_amplitudes(self.n_qubits, amps).map_err(IteError::Simulator)
    }

    /// f(s,t) = <H> in the evolved state.
    pub fn energy(&self, s: f64, t: f64, v0: &Statevector) -> Result<f64, IteError> {
        let scale = self.evolved_coefficients(s, t, v0)?;
        let dim = 1usize << self.n_qubits;
        let mut acc = 0.0;
        for k in 0..dim {
            if scale[k] == 0.0 {
                continue;
            }
            let mut ck = Complex64::ZERO;
            for i in 0..dim {
                ck += self.basis.get(i, k).conj() * v0.amplitudes()[i];
            }
            acc += self.eigenvalues[k] * (ck * scale[k]).norm_sqr();
        }
        Ok(acc)
    }
}

/// One-shot exp(-(H-sI)^2 t) v0, normalized.
pub fn exact_ite_state(
    h: &PauliSumHamiltonian,
    s: f64,
    t: f64,
    v0: &Statevector,
) -> Result<Statevector, IteError> {
    ItePropagator::new(h)?.evolve(s, t, v0)
}

/// One-shot f(s,t) = <H> after exact imaginary-time evolution.
pub fn exact_ite_energy(
    h: &PauliSumHamiltonian,
    s: f64,
    t: f64,
    v0: &Statevector,
) -> Result<f64, IteError> {
    ItePropagator::new(h)?.energy(s, t, v0)
}

/// Exact-evolution record over a time grid.
#[derive(Clone, Debug)]
pub struct ITETrajectory {
    pub s: f64,
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub final_state: Statevector,
}

/// Evolves v0 across an increasing time grid, recording f(s,t) at each time.
pub fn exact_ite_trajectory(
    h: &PauliSumHamiltonian,
    s: f64,
    times: &[f64],
    v0: &Statevector,
) -> Result<ITETrajectory, IteError> {
    if times.is_empty() {
        return Err(IteError::InvalidConfig("time grid is empty".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || times[0] < 0.0 {
        return Err(IteError::InvalidConfig("times must be nonnegative and increasing".into()));
    }
    let prop = ItePropagator::new(h)?;
    let energies = times
        .iter()
        .map(|&t| prop.energy(s, t, v0))
        .collect::<Result<Vec<_>, _>>()?;
    let final_state = prop.evolve(s, *times.last().unwrap(), v0)?;
    Ok(ITETrajectory { s, times: times.to_vec(), energies, final_state })
}

/// Nearest eigenvalue to a drift value, with the tie diagnosed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NearestEigenvalue {
    pub value: f64,
    pub index: usize,
    /// s sits within 1e-12 of a midpoint; the lower index was returned.
    pub at_midpoint: bool,
}

const MIDPOINT_TOL: f64 = 1e-12;

/// argmin_k |lambda_k - s| over an ascending spectrum. At an exact midpoint
/// (within 1e-12) the lower index wins and the ambiguity is flagged.
pub fn nearest_eigenvalue(
    eigenvalues: &[f64],
    s: f64,
) -> Result<NearestEigenvalue, IteError> {
    if eigenvalues.is_empty() {
        return Err(IteError::EmptySpectrum);
    }
    let mut best = 0usize;
    let mut best_dist = f64::INFINITY;
    for (k, &lam) in eigenvalues.iter().enumerate() {
        let d = (lam - s).abs();
        if d < best_dist - MIDPOINT_TOL {
            best = k;
            best_dist = d;
        }
    }
    let at_midpoint = eigenvalues
        .iter()
        .enumerate()
        .any(|(k, &lam)| k != best && ((lam - s).abs() - best_dist).abs() <= MIDPOINT_TOL);
    Ok(NearestEigenvalue { value: eigenvalues[best], index: best, at_midpoint })
}

/// Euler-integration settings for the variational evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct ViteConfig {
    pub dt: f64,
    pub steps: usize,
    pub lambda_reg: f64,
    /// 1-based step indices to snapshot; must lie in [1, steps].
    pub record_at: Vec<usize>,
}

impl Default for ViteConfig {
    fn default() -> Self {
        Self { dt: 0.1, steps: 25, lambda_reg: 1e-6, record_at: vec![5, 10, 15, 20, 25] }
    }
}

impl ViteConfig {
    pub fn validate(&self) -> Result<(), IteError> {
        if !(self.dt > 0.0) {
            return Err(IteError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(IteError::InvalidConfig("steps must be at least 1".into()));
        }
        if self.lambda_reg < 0.0 {
            return Err(IteError::InvalidConfig(format!(
                "lambda_reg must be nonnegative, got {}",
                self.lambda_reg
            )));
        }
        if let Some(&bad) =
            self.record_at.iter().find(|&&r| r == 0 || r > self.steps)
        {
            return Err(IteError::InvalidConfig(format!(
                "record step {bad} outside [1, {}]",
                self.steps
            )));
        }
        Ok(())
    }
}

/// One snapshot of a variational run.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterRecord {
    pub s: f64,
    pub ansatz_tag: String,
    pub seed: u64,
    pub step: usize,
    /// <H> (the unshifted Hamiltonian) at this theta.
    pub energy: f64,
    /// Angles reduced mod 2pi into [0, 2pi).
    pub theta: Vec<f64>,
}

/// Reduces an angle into [0, 2pi).
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// One McLachlan step on the shifted-squared operator: builds
/// A_kl = Re<d_k psi|d_l psi> and C_k = Re<d_k psi|Hs|psi>, solves the
/// regularized system A theta_dot = -C, and advances theta by dt mod 2pi.
///
/// With noise, the derivatives stay exact (noiseless tangent space) while
/// C_k contracts against the noisy density matrix: C_k = Re<d_k psi|Hs rho|psi>,
/// which reduces to the pure formula at zero noise.
pub fn vite_step(
    hs: &PauliSumHamiltonian,
    ansatz: &AnsatzCircuit,
    theta: &[f64],
    dt: f64,
    lambda_reg: f64,
    noise: Option<&NoiseModel>,
) -> Result<Vec<f64>, IteError> {
    if hs.n_qubits() != ansatz.n_qubits() {
        return Err(IteError::Simulator(SimulatorError::ShapeMismatch(format!(
            "operator has {} qubits, ansatz has {}",
            hs.n_qubits(),
            ansatz.n_qubits()
        ))));
    }
    let initial = Statevector::zero_state(ansatz.n_qubits());
    let psi = apply_circuit(ansatz, theta, &initial)?;
    let grads = state_gradient(ansatz, theta, &initial)?;
    let p = ansatz.n_params();
    let mut a = vec![vec![0.0; p]; p];
    for k in 0..p {
        for l in k..p {
            let v = inner(&grads[k], &grads[l]).re;
            a[k][l] = v;
            a[l][k] = v;
        }
    }
    let target = match noise {
        Some(nm) if !nm.is_noiseless() => {
            let rho0 = DensityMatrix::from_statevector(&initial);
            let rho = evolve_density_with_noise(ansatz, theta, nm, &rho0)?;
            let mixed = rho.matrix().mul_vec(psi.amplitudes());
            apply_pauli_sum(hs, &mixed)
        }
        _ => apply_pauli_sum(hs, psi.amplitudes()),
    };
    let minus_c: Vec<f64> = grads.iter().map(|g| -inner(g, &target).re).collect();
    let theta_dot = solve_regularized(&a, &minus_c, lambda_reg)?;
    Ok(theta
        .iter()
        .zip(theta_dot)
        .map(|(&t, d)| reduce_angle(t + dt * d))
        .collect())
}

/// Integrates the variational evolution on (H - sI)^2 and snapshots theta
/// and <H> at the configured steps. Deterministic for fixed inputs; the
/// seed is provenance recorded with each snapshot.
pub fn vite_run(
    h: &PauliSumHamiltonian,
    s: f64,
    ansatz: &AnsatzCircuit,
    theta0: &[f64],
    config: &ViteConfig,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<Vec<ParameterRecord>, IteError> {
    config.validate()?;
    if theta0.len() != ansatz.n_params() {
        return Err(IteError::Simulator(SimulatorError::ShapeMismatch(format!(
            "theta0 length {} != n_params {}",
            theta0.len(),
            ansatz.n_params()
        ))));
    }
    let hs = shift_and_square(h, s);
    let tag = ansatz.family().to_string();
    let noisy = noise.is_some_and(|nm| !nm.is_noiseless());
    let mut theta: Vec<f64> = theta0.iter().map(|&t| reduce_angle(t)).collect();
    let mut records = Vec::with_capacity(config.record_at.len());
    for step in 1..=config.steps {
        theta = vite_step(&hs, ansatz, &theta, config.dt, config.lambda_reg, noise)?;
        if !config.record_at.contains(&step) {
            continue;
        }
        let energy = if noisy {
            let rho0 = DensityMatrix::from_statevector(&Statevector::zero_state(
                ansatz.n_qubits(),
            ));
            let rho = evolve_density_with_noise(ansatz, &theta, noise.unwrap(), &rho0)?;
            rho.expectation(h)?
        } else {
            let psi =
                apply_circuit(ansatz, &theta, &Statevector::zero_state(ansatz.n_qubits()))?;
            expectation(&psi, h)?
        };
        records.push(ParameterRecord {
            s,
            ansatz_tag: tag.clone(),
            seed,
            step,
            energy,
            theta: theta.clone(),
        });
    }
    Ok(records)
}

/// CSV with header `s,ansatz_tag,seed,step,energy,theta_0..`; floats print
/// in shortest exact form so parsing recovers identical values.
pub fn records_to_csv(records: &[ParameterRecord]) -> String {
    let n_theta = records.first().map_or(0, |r| r.theta.len());
    let mut out = String::from("s,ansatz_tag,seed,step,energy");
    for k in 0..n_theta {
        out.push_str(&format!(",theta_{k}"));
    }
    out.push('\n');
    for r in records {
        debug_assert_eq!(r.theta.len(), n_theta, "records must share a parameter count");
        out.push_str(&format!("{},{},{},{},{}", r.s, r.ansatz_tag, r.seed, r.step, r.energy));
        for t in &r.theta {
            out.push_str(&format!(",{t}"));
        }
        out.push('\n');
    }
    out
}

/// Parses `records_to_csv` output; `#` comment lines anywhere are skipped.
pub fn parse_records_csv(text: &str) -> Result<Vec<ParameterRecord>, IteError> {
    let mut records = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if !line.starts_with("s,ansatz_tag,") {
                return Err(IteError::RecordParse {
                    line: line_no,
                    message: "missing header row".into(),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 5 {
            return Err(IteError::RecordParse {
                line: line_no,
                message: format!("expected at least 5 fields, got {}", fields.len()),
            });
        }
        let parse_f64 = |text: &str, what: &str| -> Result<f64, IteError> {
            text.parse().map_err(|_| IteError::RecordParse {
                line: line_no,
                message: format!("invalid {what} {text:?}"),
            })
        };
        let theta = fields[5..]
            .iter()
            .map(|f| parse_f64(f, "angle"))
            .collect::<Result<Vec<_>, _>>()?;
        records.push(ParameterRecord {
            s: parse_f64(fields[0], "drift")?,
            ansatz_tag: fields[1].to_string(),
            seed: fields[2].parse().map_err(|_| IteError::RecordParse {
                line: line_no,
                message: format!("invalid seed {:?}", fields[2]),
            })?,
            step: fields[3].parse().map_err(|_| IteError::RecordParse {
                line: line_no,
                message: format!("invalid step {:?}", fields[3]),
            })?,
            energy: parse_f64(fields[4], "energy")?,
            theta,
        });
    }
    if !saw_header {
        return Err(IteError::RecordParse { line: 0, message: "empty input".into() });
    }
    Ok(records)
}
