//! Eigenspectrum estimation by drift sweeps over a shifted-squared Hamiltonian.
//!
//! The pipeline sweeps a drift parameter `s` over a window, drives a simulated
//! parameterized circuit toward the ground state of `(H - sI)^2` by variational
//! imaginary-time evolution, clusters the recorded circuit parameters, and reports
//! cluster-median eigenvalue estimates. Estimates can be refined by exact inverse
//! power iteration or by a polynomial surrogate of the shifted inverse.
//!
//! Modules mirror the pipeline stages:
//!
//! - [`numerics`]: dense complex linear algebra (Jacobi eigensolver, regularized
//!   solves, Hermitian matrix functions).
//! - [`hamiltonian`]: Pauli-string algebra and the 1D Heisenberg builder.
//! - [`simulator`]: statevector and density-matrix circuit simulation with a
//!   depolarizing noise model.
//! - [`ite`]: the exact imaginary-time-evolution oracle and the variational
//!   (McLachlan) ITE engine.
//! - [`clustering`]: angle embedding, Hopkins clusterability, k-means++ with
//!   silhouette model selection, IQR filtering, spectrum estimation.
//! - [`refine`]: inverse power iteration and its Chebyshev polynomial surrogate.
//! - [`stats`]: Mann-Kendall trend test, Fisher scores, and quantum speed-limit
//!   bound calculators.
//! - [`pipeline`]: batch orchestration, configuration, and result persistence.

pub mod clustering;
pub mod config;
pub mod hamiltonian;
pub mod ite;
pub mod numerics;
pub mod pipeline;
pub mod refine;
pub mod rng;
pub mod simulator;
pub mod stats;
