//! Eigendecomposition backend for generators, in the measure-weighted
//! geometry.
//!
//! A generator `H = M^{-1} A` is self-adjoint on `L²(mu)` but not symmetric as
//! a plain matrix. The similarity transform `S = M^{1/2} H M^{-1/2}` is
//! symmetric, so a dense symmetric eigensolver applies; eigenvectors are
//! mapped back with `M^{-1/2}` and come out mu-orthonormal.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::space::Function;

/// Sorted eigendecomposition of a generator in the mu-weighted geometry.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    eigenvalues: DVector<f64>,
    /// Euclidean-orthonormal eigenvectors of the symmetrized operator,
    /// one per column, sorted by ascending eigenvalue.
    q: DMatrix<f64>,
    sqrt_mu: DVector<f64>,
}

impl EigenBasis {
    /// Decomposes `M^{1/2} H M^{-1/2}` for the generator matrix `h` over the
    /// measure `mu`. The transform is symmetrized before solving to wash out
    /// roundoff from the similarity scaling.
    pub fn new(h: &DMatrix<f64>, mu: &DVector<f64>) -> Result<Self> {
        let n = mu.len();
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::NotSquare { rows: h.nrows(), cols: h.ncols(), n });
        }
        let sqrt_mu = mu.map(f64::sqrt);
        let mut s = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] = sqrt_mu[i] * h[(i, j)] / sqrt_mu[j];
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (s[(i, j)] + s[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        let eig = s
            .symmetric_eigen_try(f64::EPSILON, 100_000)
            .ok_or(Error::EigenFailed)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = DVector::from_fn(n, |k, _| eig.eigenvalues[order[k]]);
        let mut q = DMatrix::zeros(n, n);
        for (k, &src) in order.iter().enumerate() {
            q.column_mut(k).copy_from(&eig.eigenvectors.column(src));
        }
        Ok(Self { eigenvalues, q, sqrt_mu })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Difference between the two smallest eigenvalues.
    pub fn spectral_gap(&self) -> f64 {
        if self.n() > 1 {
            self.eigenvalues[1] - self.eigenvalues[0]
        } else {
            0.0
        }
    }

    /// k-th eigenvector in the original geometry (mu-orthonormal).
    pub fn eigenvector(&self, k: usize) -> Function {
        DVector::from_fn(self.n(), |i, _| self.q[(i, k)] / self.sqrt_mu[i])
    }

    /// Applies `g(H) f` where `g` acts on the spectrum.
    pub fn apply_spectral(&self, g: impl Fn(f64) -> f64, f: &Function) -> Result<Function> {
        let n = self.n();
        if f.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.len() });
        }
        let weighted = DVector::from_fn(n, |i, _| self.sqrt_mu[i] * f[i]);
        let mut coeffs = self.q.tr_mul(&weighted);
        for k in 0..n {
            coeffs[k] *= g(self.eigenvalues[k]);
        }
        let back = &self.q * coeffs;
        Ok(DVector::from_fn(n, |i, _| back[i] / self.sqrt_mu[i]))
    }
}

/// Helper wiring nalgebra's fallible symmetric eigensolver.
trait SymmetricEigenTry {
    fn symmetric_eigen_try(
        self,
        eps: f64,
        max_niter: usize,
    ) -> Option<nalgebra::linalg::SymmetricEigen<f64, nalgebra::Dyn>>;
}

impl SymmetricEigenTry for DMatrix<f64> {
    fn symmetric_eigen_try(
        self,
        eps: f64,
        max_niter: usize,
    ) -> Option<nalgebra::linalg::SymmetricEigen<f64, nalgebra::Dyn>> {
        nalgebra::linalg::SymmetricEigen::try_new(self, eps, max_niter)
    }
}
