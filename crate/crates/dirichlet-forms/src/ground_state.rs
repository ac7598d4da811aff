//! Ground-state representation: the form induced by a wave-function.
//!
//! A strictly nonvanishing wave-function `psi` on a state space turns the
//! heat energy into the weighted form
//! `E_psi(f, g) = Σ_edges w_ij ρ_ij (f_i - f_j)(g_i - g_j)` with
//! `ρ_ij = (psi_i² + psi_j²)/2`, living on the reweighted measure
//! `mu_i psi_i²`. Its generator annihilates constants exactly and satisfies
//! detailed balance against `mu psi²`, so the associated Markov chain is
//! reversible with that stationary law. Conjugating back to `L²(mu)` with
//! `(U f)_i = psi_i f_i` produces the operator whose ground state is `psi`
//! itself, with the same spectrum.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forms::{Generator, SymmetricForm};
use crate::space::{Function, StateSpace};
use crate::spectral::EigenBasis;
use crate::tolerances::Tolerances;

/// Ground-state profile of the unit harmonic oscillator,
/// `x ↦ π^{-1/4} e^{-x²/2}`.
pub fn harmonic_ground_profile(x: f64) -> f64 {
    std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp()
}

/// Real-valued wave-function over a state space.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    space: StateSpace,
    values: DVector<f64>,
    normalized: bool,
}

impl WaveFunction {
    pub fn new(space: &StateSpace, values: DVector<f64>) -> Result<Self> {
        space.check_function(&values)?;
        let norm_sq = space.inner_mu(&values, &values)?;
        let normalized = (norm_sq - 1.0).abs() <= Tolerances::default().normalization;
        Ok(Self { space: space.clone(), values, normalized })
    }

    /// Harmonic-oscillator ground state sampled on a coordinate grid, then
    /// renormalized so `‖psi‖_mu = 1` on the truncated grid. The
    /// renormalization factor tends to 1 as the grid widens.
    pub fn gaussian(space: &StateSpace) -> Result<Self> {
        if space.coords().is_none() {
            return Err(Error::MissingCoordinates);
        }
        let n = space.n();
        let values = DVector::from_fn(n, |i, _| {
            harmonic_ground_profile(space.coord1(i).unwrap_or(f64::NAN))
        });
        Self::new(space, values)?.normalize()
    }

    /// Gaussian of the geodesic distance from `p`:
    /// `psi_p(q) = N(p) e^{-d(p,q)²/2}` with `N(p)` fixing the norm to 1.
    ///
    /// The exponent is negative: that is the sign under which the family
    /// reduces, on a flat line with `p` at the origin, to the
    /// harmonic-oscillator ground state (and the only normalizable choice on
    /// unbounded spaces).
    pub fn geodesic_gaussian(space: &StateSpace, p: usize) -> Result<Self> {
        space.check_vertex(p)?;
        if !space.is_connected() {
            return Err(Error::DisconnectedSpace);
        }
        let dist = space.geodesics_from(p)?;
        let values = DVector::from_fn(space.n(), |i, _| (-0.5 * dist[i] * dist[i]).exp());
        Self::new(space, values)?.normalize()
    }

    /// Rescales to unit mu-norm.
    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.space.norm_mu(&self.values)?;
        if norm == 0.0 {
            return Err(Error::ZeroFunction);
        }
        self.values /= norm;
        self.normalized = true;
        Ok(self)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_mu(&self) -> f64 {
        self.space.norm_mu(&self.values).expect("values match space")
    }

    /// The reweighted vertex measure `mu_i psi_i²`.
    pub fn weighted_measure(&self) -> DVector<f64> {
        DVector::from_fn(self.space.n(), |i, _| {
            self.space.mu()[i] * self.values[i] * self.values[i]
        })
    }

    fn check_nonvanishing(&self) -> Result<()> {
        for (i, &v) in self.values.iter().enumerate() {
            if v == 0.0 || !v.is_finite() {
                return Err(Error::DegenerateWaveFunction(i));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        self.space.write(&mut file, Some(&self.values))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let (space, psi) = crate::space::read_space(file)?;
        let psi = psi.ok_or(Error::Parse { line: 1, message: "file carries no psi column".into() })?;
        Self::new(&space, psi)
    }
}

/// The form induced by a wave-function, over the reweighted space.
#[derive(Debug, Clone)]
pub struct GroundStateForm {
    form: SymmetricForm,
    psi: WaveFunction,
}

impl GroundStateForm {
    /// Builds `E_psi` on the measure `mu psi²`. Rejects wave-functions with
    /// zeros: nodal domains would disconnect the process.
    pub fn new(psi: &WaveFunction) -> Result<Self> {
        psi.check_nonvanishing()?;
        let base = psi.space();
        let rho = |i: usize, j: usize| {
            let a = psi.values()[i];
            let b = psi.values()[j];
            0.5 * (a * a + b * b)
        };
        let edges = base
            .edges()
            .iter()
            .map(|e| crate::space::Edge::new(e.i, e.j, e.weight * rho(e.i, e.j), e.length))
            .collect();
        let mu = psi.weighted_measure().iter().copied().collect();
        let weighted = StateSpace::new(mu, edges, base.coords().map(<[_]>::to_vec))?;
        let form = SymmetricForm::from_graph(&weighted);
        Ok(Self { form, psi: psi.clone() })
    }

    pub fn form(&self) -> &SymmetricForm {
        &self.form
    }

    /// The space carrying the measure `mu psi²`.
    pub fn weighted_space(&self) -> &StateSpace {
        self.form.space()
    }

    pub fn psi(&self) -> &WaveFunction {
        &self.psi
    }

    /// The generator of `E_psi` on `L²(mu psi²)`. Annihilates constants
    /// exactly and satisfies detailed balance against the weighted measure.
    pub fn generator(&self) -> Generator {
        self.form.generator()
    }
}

/// Rayleigh quotient `E(f, f) / (f, f)` in the form's own weighted geometry.
/// Its minimum over nonzero `f` is the smallest generator eigenvalue.
pub fn rayleigh_quotient(form: &SymmetricForm, f: &Function) -> Result<f64> {
    let norm_sq = form.space().inner_mu(f, f)?;
    if norm_sq == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(form.energy(f)? / norm_sq)
}

/// Norm of the Rayleigh-quotient gradient `r = 2 (H f - S(f) f) / ‖f‖²_mu`,
/// measured in `‖·‖_mu`. Vanishes exactly at eigenvectors: the first
/// variational condition.
pub fn variational_residual(form: &SymmetricForm, f: &Function) -> Result<f64> {
    let space = form.space();
    let norm_sq = space.inner_mu(f, f)?;
    if norm_sq == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let s = form.energy(f)? / norm_sq;
    let hf = form.generator().apply(f)?;
    let r = (hf - s * f) * (2.0 / norm_sq);
    space.norm_mu(&r)
}

/// Smallest eigenvalue of `H - S(f)` restricted to the mu-orthogonal
/// complement of `f`: the second variational condition. At the ground state
/// this equals the spectral gap; it is positive exactly when the critical
/// point is a strict minimum in the directions orthogonal to `f`.
pub fn restricted_hessian_min(form: &SymmetricForm, f: &Function) -> Result<f64> {
    let space = form.space();
    let n = space.n();
    let norm_sq = space.inner_mu(f, f)?;
    if norm_sq == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let s = form.energy(f)? / norm_sq;
    let mu = space.mu();
    let sqrt_mu = mu.map(f64::sqrt);
    let h = form.generator();
    // Symmetrized operator in the weighted geometry, shifted by S(f).
    let mut sym = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] = sqrt_mu[i] * h.matrix()[(i, j)] / sqrt_mu[j];
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (sym[(i, j)] + sym[(j, i)]);
            sym[(i, j)] = v;
            sym[(j, i)] = v;
        }
    }
    for i in 0..n {
        sym[(i, i)] -= s;
    }
    // Householder reflection sending the weighted f to e_0, so the
    // complement is exactly coordinates 1..n of the reflected operator.
    let mut u = DVector::from_fn(n, |i, _| sqrt_mu[i] * f[i]);
    u /= u.norm();
    let mut v = u.clone();
    let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += sign;
    let vnorm_sq = v.norm_squared();
    if vnorm_sq == 0.0 {
        return Err(Error::ZeroFunction);
    }
    // P = I - 2 v vᵀ / (vᵀ v);  B = P sym P.
    let sv = &sym * &v;
    let coef = v.dot(&sv) / vnorm_sq;
    let mut b = sym.clone();
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] += -2.0 / vnorm_sq * (v[i] * sv[j] + sv[i] * v[j])
                + 4.0 * coef / vnorm_sq * v[i] * v[j];
        }
    }
    let reduced = b.view((1, 1), (n - 1, n - 1)).into_owned();
    let eig = nalgebra::linalg::SymmetricEigen::try_new(reduced, f64::EPSILON, 100_000)
        .ok_or(Error::EigenFailed)?;
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Directional derivative of the Rayleigh quotient at `f` along `v` in the
/// mu-geometry, `(grad S(f), v)_mu`. Exposed for finite-difference checks.
pub fn rayleigh_gradient_pairing(form: &SymmetricForm, f: &Function, v: &Function) -> Result<f64> {
    let space = form.space();
    let norm_sq = space.inner_mu(f, f)?;
    if norm_sq == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let s = form.energy(f)? / norm_sq;
    let hf = form.generator().apply(f)?;
    let r = (hf - s * f) * (2.0 / norm_sq);
    space.inner_mu(&r, v)
}

/// Conjugates the ground-state generator back to `L²(mu)` through the
/// unitary `(U f)_i = psi_i f_i`: the returned operator annihilates `psi`
/// and is unitarily equivalent to the generator of `E_psi`.
pub fn conjugated_schroedinger_operator(psi: &WaveFunction) -> Result<Generator> {
    psi.check_nonvanishing()?;
    let gsf = GroundStateForm::new(psi)?;
    let base = psi.space();
    let n = base.n();
    let a_weighted = gsf.form().matrix();
    // The conjugated operator satisfies M H̃ = D_{1/psi} A_psi D_{1/psi},
    // which is symmetric by construction, so H̃ is exactly self-adjoint.
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = a_weighted[(i, j)] / (psi.values()[i] * psi.values()[j] * base.mu()[i]);
        }
    }
    Generator::new(base, h)
}

/// Spectrum of the conjugated operator, sorted ascending. Convenience for
/// unitary-equivalence checks.
pub fn conjugated_spectrum(psi: &WaveFunction) -> Result<DVector<f64>> {
    let gen = conjugated_schroedinger_operator(psi)?;
    Ok(gen.eigen()?.eigenvalues().clone())
}

/// Eigendecomposition of the ground-state generator.
pub fn ground_state_eigen(gsf: &GroundStateForm) -> Result<EigenBasis> {
    gsf.generator().eigen()
}
