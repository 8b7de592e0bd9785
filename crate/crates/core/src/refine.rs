//! Spectrum refinement around a drift value: exact inverse power iteration
//! on the shifted operator, and a polynomial-approximation variant that
//! replaces the exact inverse with a Chebyshev interpolant of 1/x applied
//! through an odd extension.
//!
//! Both routes share the convergence contract: iterate, track the energy,
//! stop when the energy change drops below tolerance, and report the
//! residual of the final state. Warm starts come from cluster-median
//! parameters via [`reconstruct_state_from_params`].

use num_complex::Complex64;
use thiserror::Error;

use crate::hamiltonian::{HamiltonianError, PauliSumHamiltonian};
use crate::numerics::{
    hermitian_eigendecomposition, ComplexMatrix, LuDecomposition, NumericsError,
};
use crate::simulator::{apply_circuit, AnsatzCircuit, SimulatorError, Statevector};

#[derive(Debug, Error)]
pub enum RefineError {
    #[error("shift {0} coincides with an eigenvalue")]
    SingularShift(f64),
    #[error("nearest eigenvalue is {distance} from the shift, below the window floor {floor}")]
    WindowViolation { distance: f64, floor: f64 },
    #[error("polynomial degree must be odd, got {0}")]
    InvalidDegree(usize),
    #[error("invalid spectral window: {0}")]
    InvalidWindow(String),
    #[error("dense refinement capped at 10 qubits, got {0}")]
    TooLarge(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 500;
/// Relative margin added around the dense-computed spectral window.
pub const DEFAULT_WINDOW_MARGIN: f64 = 0.05;
const DENSE_QUBIT_CAP: usize = 10;
/// Smallest window ratio a/b the interpolant accepts.
const MIN_WINDOW_RATIO: f64 = 1e-4;

/// Refinement outcome on a qubit register.
#[derive(Clone, Debug)]
pub struct RefinementResult {
    pub eigenvalue_estimate: f64,
    pub final_state: Statevector,
    pub iterations: usize,
    /// 2-norm of (H - estimate) applied to the final state.
    pub residual: f64,
    /// Energy after each iteration; length equals `iterations`.
    pub history: Vec<f64>,
    /// False when the energy change never dropped below tolerance.
    pub converged: bool,
}

/// Refinement outcome on a raw dense operator of any dimension.
#[derive(Clone, Debug)]
pub struct DenseRefinement {
    pub eigenvalue_estimate: f64,
    pub final_state: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
    pub converged: bool,
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    norm
}

fn rayleigh(m: &ComplexMatrix, v: &[Complex64]) -> f64 {
    let mv = m.mul_vec(v);
    v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
}

fn residual_norm(m: &ComplexMatrix, v: &[Complex64], estimate: f64) -> f64 {
    let mv = m.mul_vec(v);
    mv.iter()
        .zip(v)
        .map(|(hv, x)| (hv - estimate * x).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Runs the shared power-iteration loop with `step` producing the next
/// (unnormalized) iterate.
fn iterate_to_fixed_point(
    h_dense: &ComplexMatrix,
    v0: &[Complex64],
    tol: f64,
    max_iters: usize,
    mut step: impl FnMut(&[Complex64]) -> Vec<Complex64>,
) -> DenseRefinement {
    let mut v = v0.to_vec();
    normalize(&mut v);
    let mut energy = rayleigh(h_dense, &v);
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..max_iters {
        let mut next = step(&v);
        if normalize(&mut next) < 1e-300 {
            // The step annihilated the state; report what we have.
            break;
        }
        v = next;
        let new_energy = rayleigh(h_dense, &v);
        history.push(new_energy);
        let done = (new_energy - energy).abs() < tol;
        energy = new_energy;
        if done {
            converged = true;
            break;
        }
    }
    let residual = residual_norm(h_dense, &v, energy);
    DenseRefinement {
        eigenvalue_estimate: energy,
        final_state: v,
        iterations: history.len(),
        residual,
        history,
        converged,
    }
}

/// Inverse power iteration v <- normalize((M - sI)^{-1} v) on a dense
/// Hermitian operator, stopping when the Rayleigh quotient settles within
/// `tol`. Hitting `max_iters` flags `converged = false` instead of erroring.
pub fn inverse_power_dense(
    m: &ComplexMatrix,
    s: f64,
    v0: &[Complex64],
    tol: f64,
    max_iters: usize,
) -> Result<DenseRefinement, RefineError> {
    if v0.len() != m.dim() {
        return Err(RefineError::ShapeMismatch(format!(
            "operator dimension {} but state has {} entries",
            m.dim(),
            v0.len()
        )));
    }
    let mut shifted = m.clone();
    for i in 0..m.dim() {
        shifted.add_to(i, i, Complex64::new(-s, 0.0));
    }
    let lu = LuDecomposition::factor(&shifted)
        .map_err(|_| RefineError::SingularShift(s))?;
    Ok(iterate_to_fixed_point(m, v0, tol, max_iters, |v| lu.solve(v)))
}

fn wrap_dense_result(
    n_qubits: usize,
    dense: DenseRefinement,
) -> Result<RefinementResult, RefineError> {
    let final_state = Statevector::from_amplitudes(n_qubits, dense.final_state)?;
    Ok(RefinementResult {
        eigenvalue_estimate: dense.eigenvalue_estimate,
        final_state,
        iterations: dense.iterations,
        residual: dense.residual,
        history: dense.history,
        converged: dense.converged,
    })
}

/// Inverse power iteration on a qubit Hamiltonian via its dense form.
pub fn inverse_power_iterate(
    h: &PauliSumHamiltonian,
    s: f64,
    v0: &Statevector,
    tol: f64,
    max_iters: usize,
) -> Result<RefinementResult, RefineError> {
    if h.n_qubits() > DENSE_QUBIT_CAP {
        return Err(RefineError::TooLarge(h.n_qubits()));
    }
    if v0.n_qubits() != h.n_qubits() {
        return Err(RefineError::ShapeMismatch(format!(
            "state has {} qubits, operator has {}",
            v0.n_qubits(),
            h.n_qubits()
        )));
    }
    let dense = h.to_dense()?;
    let result = inverse_power_dense(&dense, s, v0.amplitudes(), tol, max_iters)?;
    wrap_dense_result(h.n_qubits(), result)
}

/// Chebyshev interpolant of 1/x on a positive window, applied to both
/// signs through the odd extension g(x) = sign(x) r(|x|).
#[derive(Clone, Debug)]
pub struct ChebyshevInverse {
    pub degree: usize,
    pub window: (f64, f64),
    /// Chebyshev-basis coefficients c_0..c_degree on the window (with the
    /// usual halved c_0 convention in evaluation).
    pub coeffs: Vec<f64>,
    /// max |r(x) - 1/x| over a dense scan of the window.
    pub epsilon: f64,
}

impl ChebyshevInverse {
    /// Evaluates the interpolant r(x) for x inside the window via Clenshaw
    /// recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.window;
        let t = (2.0 * x - a - b) / (b - a);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let next = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = next;
        }
        t * b1 - b2 + 0.5 * self.coeffs[0]
    }

    /// Odd extension: matches r on the window and -r(-x) below it, so the
    /// approximation of 1/x covers both signs of the spectrum.
    pub fn eval_odd(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.eval(x)
        } else {
            -self.eval(-x)
        }
    }
}

const EPSILON_SCAN_POINTS: usize = 10_000;

/// Builds the degree-`degree` Chebyshev interpolant of 1/x on [a, b] and
/// reports the achieved sup-norm error from a dense scan.
pub fn chebyshev_inverse_coeffs(
    degree: usize,
    window: (f64, f64),
) -> Result<ChebyshevInverse, RefineError> {
    if degree % 2 == 0 {
        return Err(RefineError::InvalidDegree(degree));
    }
    let (a, b) = window;
    if !(a.is_finite() && b.is_finite()) || a <= 0.0 || a >= b {
        return Err(RefineError::InvalidWindow(format!(
            "need 0 < a < b, got [{a}, {b}]"
        )));
    }
    if a / b < MIN_WINDOW_RATIO {
        return Err(RefineError::InvalidWindow(format!(
            "window ratio {} below {MIN_WINDOW_RATIO}",
            a / b
        )));
    }
    let n = degree + 1;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let nodes: Vec<f64> = (0..n)
        .map(|j| std::f64::consts::PI * (j as f64 + 0.5) / n as f64)
        .collect();
    let values: Vec<f64> = nodes.iter().map(|&p| 1.0 / (mid + half * p.cos())).collect();
    let coeffs: Vec<f64> = (0..n)
        .map(|k| {
            2.0 / n as f64
                * nodes
                    .iter()
                    .zip(&values)
                    .map(|(&p, &f)| f * (k as f64 * p).cos())
                    .sum::<f64>()
        })
        .collect();
    let mut cheb = ChebyshevInverse { degree, window, coeffs, epsilon: 0.0 };
    let mut epsilon = 0.0f64;
    for i in 0..=EPSILON_SCAN_POINTS {
        let x = a + (b - a) * i as f64 / EPSILON_SCAN_POINTS as f64;
        epsilon = epsilon.max((cheb.eval(x) - 1.0 / x).abs());
    }
    cheb.epsilon = epsilon;
    Ok(cheb)
}

/// Dense-computed spectral window of |lambda - s| with the default margin.
pub fn default_spectral_window(
    m: &ComplexMatrix,
    s: f64,
) -> Result<(f64, f64), RefineError> {
    let eigen = hermitian_eigendecomposition(m)?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &lambda in &eigen.eigenvalues {
        let d = (lambda - s).abs();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok((lo * (1.0 - DEFAULT_WINDOW_MARGIN), hi * (1.0 + DEFAULT_WINDOW_MARGIN)))
}

/// Inverse power iteration with the exact inverse replaced by the odd
/// Chebyshev surrogate of 1/x over the shifted spectrum. The window comes
/// from a dense eigendecomposition unless `bounds` supplies one; a shift
/// closer to the spectrum than the window floor is rejected.
pub fn polynomial_inverse_dense(
    m: &ComplexMatrix,
    s: f64,
    v0: &[Complex64],
    degree: usize,
    tol: f64,
    max_iters: usize,
    bounds: Option<(f64, f64)>,
) -> Result<DenseRefinement, RefineError> {
    if v0.len() != m.dim() {
        return Err(RefineError::ShapeMismatch(format!(
            "operator dimension {} but state has {} entries",
            m.dim(),
            v0.len()
        )));
    }
    let eigen = hermitian_eigendecomposition(m)?;
    let nearest = eigen
        .eigenvalues
        .iter()
        .map(|&l| (l - s).abs())
        .fold(f64::INFINITY, f64::min);
    let window = match bounds {
        Some(w) => w,
        None => {
            let hi = eigen
                .eigenvalues
                .iter()
                .map(|&l| (l - s).abs())
                .fold(0.0f64, f64::max);
            (nearest * (1.0 - DEFAULT_WINDOW_MARGIN), hi * (1.0 + DEFAULT_WINDOW_MARGIN))
        }
    };
    if nearest < window.0 {
        return Err(RefineError::WindowViolation { distance: nearest, floor: window.0 });
    }
    let cheb = chebyshev_inverse_coeffs(degree, window)?;
    let surrogate = eigen.apply_function(|lambda| cheb.eval_odd(lambda - s));
    Ok(iterate_to_fixed_point(m, v0, tol, max_iters, |v| surrogate.mul_vec(v)))
}

/// Qubit-level wrapper over [`polynomial_inverse_dense`].
pub fn polynomial_inverse_power(
    h: &PauliSumHamiltonian,
    s: f64,
    v0: &Statevector,
    degree: usize,
    tol: f64,
    max_iters: usize,
    bounds: Option<(f64, f64)>,
) -> Result<RefinementResult, RefineError> {
    if h.n_qubits() > DENSE_QUBIT_CAP {
        return Err(RefineError::TooLarge(h.n_qubits()));
    }
    if v0.n_qubits() != h.n_qubits() {
        return Err(RefineError::ShapeMismatch(format!(
            "state has {} qubits, operator has {}",
            v0.n_qubits(),
            h.n_qubits()
        )));
    }
    let dense = h.to_dense()?;
    let result =
        polynomial_inverse_dense(&dense, s, v0.amplitudes(), degree, tol, max_iters, bounds)?;
    wrap_dense_result(h.n_qubits(), result)
}

/// Prepares the warm-start state: the ansatz applied to |0..0> at theta.
pub fn reconstruct_state_from_params(
    ansatz: &AnsatzCircuit,
    theta: &[f64],
) -> Result<Statevector, RefineError> {
    let zero = Statevector::zero_state(ansatz.n_qubits());
    Ok(apply_circuit(ansatz, theta, &zero)?)
}
