//! Symmetric forms and their generators.
//!
//! The correspondence realized here: a positive symmetric bilinear form
//! `E(f, g) = fᵀ A g` over a [`StateSpace`] pairs with the positive operator
//! `H = M⁻¹ A` that is self-adjoint on `L²(mu)`, via `(H f, g)_mu = E(f, g)`.
//! Graph-energy forms are weighted graph Laplacians, the discrete counterpart
//! of the integrated squared gradient; for those `E` is evaluated as the edge
//! sum, which is exact on constants.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::space::{Function, StateSpace};
use crate::spectral::EigenBasis;
use crate::tolerances::Tolerances;

/// How a form was built. Graph-energy forms carry a structural guarantee
/// (nonnegative conductances) that the checkers can certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    GraphEnergy,
    OperatorInduced,
    Custom,
}

/// Positive symmetric bilinear form `E(f, g) = fᵀ A g`.
#[derive(Debug, Clone)]
pub struct SymmetricForm {
    space: StateSpace,
    matrix: DMatrix<f64>,
    kind: FormKind,
}

impl SymmetricForm {
    /// Graph energy form `E(f, g) = Σ_edges w_ij (f_i - f_j)(g_i - g_j)`.
    /// The matrix is the unnormalized weighted graph Laplacian.
    pub fn from_graph(space: &StateSpace) -> Self {
        let n = space.n();
        let mut a = DMatrix::zeros(n, n);
        for e in space.edges() {
            a[(e.i, e.i)] += e.weight;
            a[(e.j, e.j)] += e.weight;
            a[(e.i, e.j)] -= e.weight;
            a[(e.j, e.i)] -= e.weight;
        }
        Self { space: space.clone(), matrix: a, kind: FormKind::GraphEnergy }
    }

    /// Builds a form from an explicit matrix. The matrix is symmetrized and
    /// spot-checked for positive semidefiniteness on a fixed probe set
    /// (deterministic Gaussian samples plus indicators).
    pub fn from_matrix(space: &StateSpace, matrix: DMatrix<f64>, kind: FormKind) -> Result<Self> {
        let n = space.n();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols(), n });
        }
        let mut a = matrix;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (a[(i, j)] + a[(j, i)]);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let tol = Tolerances::default().psd;
        let scale = a.amax().max(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f0c5);
        for trial in 0..(16 + n) {
            let f = if trial < n {
                DVector::from_fn(n, |i, _| f64::from(i == trial))
            } else {
                DVector::from_fn(n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal))
            };
            let energy = (&a * &f).dot(&f);
            if energy < -tol * scale * f.norm_squared() {
                return Err(Error::NotPositiveSemidefinite { energy });
            }
        }
        Ok(Self { space: space.clone(), matrix: a, kind })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    /// Evaluates `E(f, g)`. Graph-energy forms use the edge sum, which keeps
    /// constants exactly in the kernel; other kinds use the matrix.
    pub fn apply(&self, f: &Function, g: &Function) -> Result<f64> {
        self.space.check_function(f)?;
        self.space.check_function(g)?;
        if self.kind == FormKind::GraphEnergy {
            Ok(self
                .space
                .edges()
                .iter()
                .map(|e| e.weight * (f[e.i] - f[e.j]) * (g[e.i] - g[e.j]))
                .sum())
        } else {
            Ok((&self.matrix * g).dot(f))
        }
    }

    /// Quadratic energy `E(f, f)`.
    pub fn energy(&self, f: &Function) -> Result<f64> {
        self.apply(f, f)
    }

    /// The extended form `E₁(f, g) = E(f, g) + (f, g)_mu`.
    pub fn e1(&self, f: &Function, g: &Function) -> Result<f64> {
        Ok(self.apply(f, g)? + self.space.inner_mu(f, g)?)
    }

    /// Matrix of `E₁`, i.e. `A + diag(mu)`. Positive definite for every valid
    /// space, which is the finite-space form of closedness: the E₁ norm is a
    /// genuine Hilbert norm.
    pub fn e1_matrix(&self) -> DMatrix<f64> {
        let mut b = self.matrix.clone();
        for i in 0..self.space.n() {
            b[(i, i)] += self.space.mu()[i];
        }
        b
    }

    /// The positive self-adjoint operator `H = M⁻¹ A` with
    /// `(H f, g)_mu = E(f, g)`.
    pub fn generator(&self) -> Generator {
        let mu = self.space.mu();
        let n = self.space.n();
        let mut h = self.matrix.clone();
        for i in 0..n {
            let inv = 1.0 / mu[i];
            for j in 0..n {
                h[(i, j)] *= inv;
            }
        }
        Generator { space: self.space.clone(), matrix: h }
    }
}

/// Positive self-adjoint operator on `L²(mu)`, stored as a plain matrix
/// acting on vertex functions.
#[derive(Debug, Clone)]
pub struct Generator {
    space: StateSpace,
    matrix: DMatrix<f64>,
}

impl Generator {
    /// Wraps a matrix, verifying self-adjointness in the mu-inner product
    /// (`M H` symmetric). Positivity is *not* required here: the Dirichlet
    /// checker must be able to inspect operators that fail it.
    pub fn new(space: &StateSpace, matrix: DMatrix<f64>) -> Result<Self> {
        let n = space.n();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols(), n });
        }
        let mu = space.mu();
        let mut scale: f64 = 0.0;
        let mut residual: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mh = mu[i] * matrix[(i, j)];
                let mh_t = mu[j] * matrix[(j, i)];
                scale = scale.max(mh.abs());
                residual = residual.max((mh - mh_t).abs());
            }
        }
        if residual > 1e-8 * scale.max(1.0) {
            return Err(Error::NotSelfAdjoint { residual });
        }
        Ok(Self { space: space.clone(), matrix })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, f: &Function) -> Result<Function> {
        self.space.check_function(f)?;
        Ok(&self.matrix * f)
    }

    /// Eigendecomposition in the mu-weighted geometry.
    pub fn eigen(&self) -> Result<EigenBasis> {
        EigenBasis::new(&self.matrix, self.space.mu())
    }

    /// Recovers the form `E(f, g) = (√H f, √H g)_mu` through the spectral
    /// square root. Errors if the spectrum dips below `-psd` tolerance.
    pub fn to_form(&self) -> Result<SymmetricForm> {
        let basis = self.eigen()?;
        let tol = Tolerances::default().psd;
        let lambda_min = basis.min_eigenvalue();
        let scale = basis.eigenvalues()[basis.n() - 1].abs().max(1.0);
        if lambda_min < -tol * scale {
            return Err(Error::NotPositive { min_eigenvalue: lambda_min });
        }
        let n = self.space.n();
        let mu = self.space.mu();
        // Columns of √H applied to the basis vectors give A = (√H)ᵀ M √H.
        let mut sqrt_h = DMatrix::zeros(n, n);
        for j in 0..n {
            let e_j = DVector::from_fn(n, |i, _| f64::from(i == j));
            let col = basis.apply_spectral(|x| x.max(0.0).sqrt(), &e_j)?;
            sqrt_h.column_mut(j).copy_from(&col);
        }
        let mut weighted = sqrt_h.clone();
        for i in 0..n {
            for j in 0..n {
                weighted[(i, j)] *= mu[i];
            }
        }
        let mut a = sqrt_h.tr_mul(&weighted);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (a[(i, j)] + a[(j, i)]);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        Ok(SymmetricForm { space: self.space.clone(), matrix: a, kind: FormKind::OperatorInduced })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_line_grid, Edge};

    fn random_space(n: usize, seed: u64) -> StateSpace {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = (0..n).map(|_| 0.5 + 1.5 * rng.random::<f64>()).collect();
        let mut edges = Vec::new();
        for i in 1..n {
            // Random spanning tree keeps it connected.
            let parent = rng.random_range(0..i);
            edges.push(Edge::new(parent, i, 0.1 + rng.random::<f64>(), 0.5 + rng.random::<f64>()));
        }
        StateSpace::new(mu, edges, None).unwrap()
    }

    #[test]
    fn two_vertex_energy() {
        let s = StateSpace::new(vec![1.0, 1.0], vec![Edge::new(0, 1, 1.0, 1.0)], None).unwrap();
        let form = SymmetricForm::from_graph(&s);
        let f = DVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(form.energy(&f).unwrap(), 1.0);
    }

    #[test]
    fn constants_are_in_the_kernel() {
        let s = random_space(7, 3);
        let form = SymmetricForm::from_graph(&s);
        let ones = DVector::from_element(7, 1.0);
        assert_eq!(form.energy(&ones).unwrap(), 0.0);
        let f = DVector::from_fn(7, |i, _| (i as f64).sin());
        assert!(form.apply(&ones, &f).unwrap().abs() < 1e-14);
    }

    #[test]
    fn graph_energy_matches_edge_sum_oracle() {
        let s = random_space(5, 11);
        let form = SymmetricForm::from_graph(&s);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let f = DVector::from_fn(5, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
            let g = DVector::from_fn(5, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
            let direct: f64 = s
                .edges()
                .iter()
                .map(|e| e.weight * (f[e.i] - f[e.j]) * (g[e.i] - g[e.j]))
                .sum();
            // Matrix route against the edge-sum oracle.
            let via_matrix = (form.matrix() * &g).dot(&f);
            assert!((direct - via_matrix).abs() < 1e-12 * (1.0 + direct.abs()));
            assert!((form.apply(&f, &g).unwrap() - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn generator_of_two_point_grid() {
        let s = build_line_grid(0.0, 1.0, 2).unwrap();
        let h = SymmetricForm::from_graph(&s).generator();
        let m = h.matrix();
        assert!((m[(0, 0)] - 2.0).abs() < 1e-14);
        assert!((m[(0, 1)] + 2.0).abs() < 1e-14);
        assert!((m[(1, 0)] + 2.0).abs() < 1e-14);
        assert!((m[(1, 1)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_form_gives_zero_generator() {
        let s = random_space(4, 5);
        let form = SymmetricForm::from_matrix(&s, DMatrix::zeros(4, 4), FormKind::Custom).unwrap();
        let h = form.generator();
        assert_eq!(h.matrix().amax(), 0.0);
        let back = h.to_form().unwrap();
        assert_eq!(back.matrix().amax(), 0.0);
    }

    #[test]
    fn generator_pairing_identity() {
        let s = random_space(9, 17);
        let form = SymmetricForm::from_graph(&s);
        let h = form.generator();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let f = DVector::from_fn(9, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
            let g = DVector::from_fn(9, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
            let lhs = s.inner_mu(&h.apply(&f).unwrap(), &g).unwrap();
            let rhs = form.apply(&f, &g).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn generator_is_self_adjoint_in_mu() {
        let s = random_space(6, 23);
        let h = SymmetricForm::from_graph(&s).generator();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let f = DVector::from_fn(6, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
            let g = DVector::from_fn(6, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
            let lhs = s.inner_mu(&h.apply(&f).unwrap(), &g).unwrap();
            let rhs = s.inner_mu(&f, &h.apply(&g).unwrap()).unwrap();
            assert!((lhs - rhs).abs() < 1e-11 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn identity_operator_on_uniform_measure() {
        let s = StateSpace::new(vec![1.0, 1.0, 1.0], vec![Edge::new(0, 1, 1.0, 1.0)], None).unwrap();
        let h = Generator::new(&s, DMatrix::identity(3, 3)).unwrap();
        let form = h.to_form().unwrap();
        let f = DVector::from_vec(vec![1.0, 2.0, -1.0]);
        let g = DVector::from_vec(vec![0.5, 0.0, 3.0]);
        let expect: f64 = (0..3).map(|i| f[i] * g[i]).sum();
        assert!((form.apply(&f, &g).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn spectral_square_root_energy_matches_pairing() {
        // Random PSD operator: H = M^{-1}(B Bᵀ) with symmetric B Bᵀ.
        let s = random_space(8, 31);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = DMatrix::from_fn(8, 8, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let a = &b * b.transpose();
        let form = SymmetricForm::from_matrix(&s, a, FormKind::Custom).unwrap();
        let h = form.generator();
        let recovered = h.to_form().unwrap();
        for _ in 0..10 {
            let f = DVector::from_fn(8, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
            let via_sqrt = recovered.energy(&f).unwrap();
            let via_pairing = s.inner_mu(&h.apply(&f).unwrap(), &f).unwrap();
            assert!(
                (via_sqrt - via_pairing).abs() < 1e-10 * (1.0 + via_pairing.abs()),
                "sqrt route {via_sqrt} vs pairing {via_pairing}"
            );
        }
    }

    #[test]
    fn roundtrip_form_generator_form() {
        let s = random_space(12, 41);
        let form = SymmetricForm::from_graph(&s);
        let back = form.generator().to_form().unwrap();
        let diff = (form.matrix() - back.matrix()).amax();
        assert!(diff < 1e-10 * form.matrix().amax().max(1.0), "entrywise diff {diff}");
    }

    #[test]
    fn negative_operator_has_no_form() {
        let s = StateSpace::new(vec![1.0, 1.0], vec![Edge::new(0, 1, 1.0, 1.0)], None).unwrap();
        let h = Generator::new(&s, -DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(h.to_form(), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn from_matrix_rejects_indefinite_matrices() {
        let s = StateSpace::new(vec![1.0, 1.0], vec![Edge::new(0, 1, 1.0, 1.0)], None).unwrap();
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            SymmetricForm::from_matrix(&s, bad, FormKind::Custom),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn e1_matrix_is_positive_definite() {
        // Closedness is structural on finite spaces: E1 is an inner product.
        let s = random_space(10, 55);
        let form = SymmetricForm::from_graph(&s);
        let b = form.e1_matrix();
        assert!(nalgebra::linalg::Cholesky::new(b).is_some());
    }
}
