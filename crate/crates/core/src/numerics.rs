//! Dense complex linear algebra built from scratch.
//!
//! Everything downstream (exact imaginary-time evolution, the McLachlan linear
//! system, inverse power refinement) validates against this module, so it has no
//! third-party solver dependencies. The eigensolver is a cyclic complex Jacobi
//! iteration: slow beyond a few thousand dimensions but unconditionally accurate,
//! which is the right trade for an oracle.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not Hermitian (max violation {0:.3e})")]
    NonHermitianInput(f64),
    #[error("Jacobi iteration failed to converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("linear system is numerically singular (condition estimate {0:.3e})")]
    SingularSystem(f64),
    #[error("scalar function undefined at eigenvalue {0}")]
    DomainError(f64),
    #[error("dimension mismatch: {0}")]
    ShapeMismatch(String),
}

/// Dense square complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    /// Builds from row-major data; length must be dim^2.
    pub fn from_data(dim: usize, data: Vec<Complex64>) -> Result<Self, NumericsError> {
        if data.len() != dim * dim {
            return Err(NumericsError::ShapeMismatch(format!(
                "expected {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    /// Builds from real row-major data.
    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self, NumericsError> {
        if data.len() != dim * dim {
            return Err(NumericsError::ShapeMismatch(format!(
                "expected {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data: data.iter().map(|&x| Complex64::new(x, 0.0)).collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] += v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "mul_vec dimension mismatch");
        let n = self.dim;
        let mut out = vec![Complex64::ZERO; n];
        for i in 0..n {
            let mut acc = Complex64::ZERO;
            for j in 0..n {
                acc += self.data[i * n + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest |M[i][j] - conj(M[j][i])| over all entries.
    pub fn hermiticity_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let v = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(v);
            }
        }
        worst
    }
}

/// Eigenvalues ascending with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Column `j` of the eigenvector matrix.
    pub fn eigenvector(&self, j: usize) -> Vec<Complex64> {
        (0..self.eigenvectors.dim()).map(|i| self.eigenvectors.get(i, j)).collect()
    }

    /// Reconstructs U f(L) U^dagger.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvectors.dim();
        let u = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n);
        for k in 0..n {
            let fk = f(self.eigenvalues[k]);
            if fk == 0.0 {
                continue;
            }
            for i in 0..n {
                let uik = u.get(i, k) * fk;
                for j in 0..n {
                    out.add_to(i, j, uik * u.get(j, k).conj());
                }
            }
        }
        out
    }
}

const HERMITICITY_TOL: f64 = 1e-10;
const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 60;

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Deterministic; eigenvalues ascending; each eigenvector's
/// largest-magnitude component is pinned real positive so output is unique
/// for non-degenerate spectra.
pub fn hermitian_eigendecomposition(
    m: &ComplexMatrix,
) -> Result<EigenDecomposition, NumericsError> {
    let violation = m.hermiticity_violation();
    if violation > HERMITICITY_TOL {
        return Err(NumericsError::NonHermitianInput(violation));
    }
    let n = m.dim();
    let mut a = m.clone();
    // Symmetrize exactly so rotations keep diagonals real.
    for i in 0..n {
        let d = a.get(i, i);
        a.set(i, i, Complex64::new(d.re, 0.0));
        for j in (i + 1)..n {
            let avg = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, avg);
            a.set(j, i, avg.conj());
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(EigenDecomposition { eigenvalues: vec![0.0; n], eigenvectors: v });
    }
    let skip_tol = scale * 1e-16;
    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_OFF_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= skip_tol {
                    continue;
                }
                let alpha = apq / r; // e^{i arg}
                let tau = (a.get(q, q).re - a.get(p, p).re) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (tau * tau + 1.0).sqrt())
                } else {
                    -1.0 / (-tau + (tau * tau + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let s_a = s * alpha; // s e^{i alpha}
                let s_ac = s * alpha.conj(); // s e^{-i alpha}
                // A <- J^dagger A J with J = I except
                // J[p][p]=c, J[p][q]=s e^{ia}, J[q][p]=-s e^{-ia}, J[q][q]=c.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c - akq * s_ac);
                    a.set(k, q, akp * s_a + akq * c);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c - aqk * s_a);
                    a.set(q, k, apk * s_ac + aqk * c);
                }
                // Clean the annihilated pair and rounding on diagonals.
                a.set(p, q, Complex64::ZERO);
                a.set(q, p, Complex64::ZERO);
                let dp = a.get(p, p);
                let dq = a.get(q, q);
                a.set(p, p, Complex64::new(dp.re, 0.0));
                a.set(q, q, Complex64::new(dq.re, 0.0));
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c - vkq * s_ac);
                    v.set(k, q, vkp * s_a + vkq * c);
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > JACOBI_OFF_TOL * scale {
        return Err(NumericsError::NoConvergence(JACOBI_MAX_SWEEPS));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        // Phase pin: largest-magnitude component becomes real positive.
        let mut best = 0usize;
        let mut best_norm = 0.0;
        for i in 0..n {
            let nn = v.get(i, src).norm();
            if nn > best_norm {
                best_norm = nn;
                best = i;
            }
        }
        let pivot = v.get(best, src);
        let phase =
            if best_norm > 0.0 { pivot.conj() / best_norm } else { Complex64::ONE };
        for i in 0..n {
            vectors.set(i, col, v.get(i, src) * phase);
        }
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: vectors })
}

const SINGULAR_COND: f64 = 1e14;

/// Solves (A + lambda_reg I) x = b for symmetric positive semidefinite A,
/// via the eigendecomposition of A. This is the ridge-regularized McLachlan
/// solve; lambda_reg = 0 falls back to the plain symmetric solve.
pub fn solve_regularized(
    a: &[Vec<f64>],
    b: &[f64],
    lambda_reg: f64,
) -> Result<Vec<f64>, NumericsError> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(NumericsError::ShapeMismatch(format!("A must be {n}x{n}")));
    }
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, Complex64::new(a[i][j], 0.0));
        }
    }
    let eig = hermitian_eigendecomposition(&m)?;
    let shifted: Vec<f64> = eig.eigenvalues.iter().map(|&d| d + lambda_reg).collect();
    let max_abs = shifted.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let min_abs = shifted.iter().fold(f64::INFINITY, |acc, &x| acc.min(x.abs()));
    if max_abs == 0.0 || min_abs == 0.0 || max_abs / min_abs > SINGULAR_COND {
        let cond = if min_abs == 0.0 { f64::INFINITY } else { max_abs / min_abs };
        return Err(NumericsError::SingularSystem(cond));
    }
    let u = &eig.eigenvectors;
    let mut x = vec![0.0; n];
    for k in 0..n {
        let mut proj = 0.0;
        for i in 0..n {
            proj += u.get(i, k).re * b[i];
        }
        let w = proj / shifted[k];
        for i in 0..n {
            x[i] += u.get(i, k).re * w;
        }
    }
    Ok(x)
}

/// U f(L) U^dagger for Hermitian M. DomainError when f is not finite at an
/// eigenvalue (e.g. the inverse at a numerical zero).
pub fn hermitian_matrix_function(
    m: &ComplexMatrix,
    f: impl Fn(f64) -> f64,
) -> Result<ComplexMatrix, NumericsError> {
    let eig = hermitian_eigendecomposition(m)?;
    for &lam in &eig.eigenvalues {
        if !f(lam).is_finite() {
            return Err(NumericsError::DomainError(lam));
        }
    }
    Ok(eig.apply_function(f))
}

/// LU factorization with partial pivoting, for repeated complex solves
/// against a fixed matrix (the inverse power iteration path).
#[derive(Clone, Debug)]
pub struct LuDecomposition {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl LuDecomposition {
    pub fn factor(m: &ComplexMatrix) -> Result<Self, NumericsError> {
        let n = m.dim();
        let mut lu = m.data().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0usize;
        let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_mag = lu[col * n + col].norm();
            for r in (col + 1)..n {
                let mag = lu[r * n + col].norm();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = r;
                }
            }
            if pivot_mag <= scale * 1e-14 {
                return Err(NumericsError::SingularSystem(scale / pivot_mag.max(f64::MIN_POSITIVE)));
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot_row * n + j);
                }
                perm.swap(col, pivot_row);
                swaps += 1;
            }
            let pivot = lu[col * n + col];
            for r in (col + 1)..n {
                let factor = lu[r * n + col] / pivot;
                lu[r * n + col] = factor;
                for j in (col + 1)..n {
                    let v = lu[col * n + j];
                    lu[r * n + j] -= factor * v;
                }
            }
        }
        Ok(Self { n, lu, perm, swaps })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let yj = y[j];
                y[i] -= l * yj;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[i * n + j];
                let yj = y[j];
                y[i] -= u * yj;
            }
            y[i] /= self.lu[i * n + i];
        }
        y
    }

    pub fn determinant(&self) -> Complex64 {
        let mut det = if self.swaps % 2 == 0 { Complex64::ONE } else { -Complex64::ONE };
        for i in 0..self.n {
            det *= self.lu[i * self.n + i];
        }
        det
    }
}
