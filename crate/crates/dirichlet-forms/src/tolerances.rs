//! Central record of every numeric tolerance used by the library.
//!
//! Checkers, experiment runners and the acceptance suite all read their
//! thresholds from [`Tolerances::default`] so that no module invents its own
//! magic numbers.

/// All tolerances in one configuration record.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Positive-semidefiniteness slack for form matrices, relative to ‖f‖².
    pub psd: f64,
    /// Slack for the unit-contraction inequality of a form, relative to ‖f‖².
    pub form_contraction: f64,
    /// Bound violation slack for Markovian semigroup checks.
    pub semigroup_bounds: f64,
    /// Form -> generator -> form round-trip, entrywise.
    pub roundtrip: f64,
    /// Semigroup law T_{s+t} f = T_s (T_t f).
    pub semigroup_law: f64,
    /// Resolvent identity G_a - G_b = (b - a) G_a G_b.
    pub resolvent_identity: f64,
    /// Agreement between the resolvent linear solve and the Laplace-transform
    /// quadrature of the semigroup.
    pub quadrature_match: f64,
    /// Truncation target for the quadrature tail e^{-alpha s_max}.
    pub quadrature_tail: f64,
    /// Ground-state zero mode: |lambda_0| and the residual of the constant.
    pub zero_mode: f64,
    /// Relative error allowed on the spectral gap against the continuum value.
    pub gap_relative: f64,
    /// Unitary-equivalence agreement between conjugated spectra.
    pub spectra_match: f64,
    /// Componentwise agreement of the geodesic Gaussian with the flat one.
    pub wavefunction_reduction: f64,
    /// Wave-function normalization defect.
    pub normalization: f64,
    /// Agreement between capacity by linear solve and by projected gradient.
    pub capacity_agreement: f64,
    /// Capacity monotonicity / subadditivity slack.
    pub capacity_order: f64,
    /// Equilibrium-potential box bounds 0 <= f <= 1.
    pub potential_bounds: f64,
    /// Stopping residual for the projected-gradient capacity solver.
    pub projected_gradient_residual: f64,
    /// Iteration cap for the projected-gradient capacity solver.
    pub projected_gradient_max_iters: usize,
    /// Total-variation distance allowed between the sampled occupation
    /// histogram and the reversing measure.
    pub stationary_tv: f64,
    /// Relative error allowed on the fitted autocorrelation decay rate.
    pub autocorr_rate_relative: f64,
    /// Number of standard errors allowed in Monte Carlo association checks.
    pub mc_sigmas: f64,
    /// Variational residual at an exact eigenvector.
    pub variational_residual: f64,
    /// Agreement between the restricted-Hessian minimum and the spectral gap.
    pub hessian_gap: f64,
    /// Relative agreement between the analytic Rayleigh gradient and central
    /// finite differences.
    pub gradient_fd: f64,
    /// Step used by the finite-difference gradient oracle.
    pub gradient_fd_step: f64,
    /// Relative error allowed on discrete spectra against continuum values.
    pub spectrum_relative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd: 1e-10,
            form_contraction: 1e-12,
            semigroup_bounds: 1e-10,
            roundtrip: 1e-10,
            semigroup_law: 1e-9,
            resolvent_identity: 1e-8,
            quadrature_match: 1e-8,
            quadrature_tail: 1e-12,
            zero_mode: 1e-10,
            gap_relative: 0.02,
            spectra_match: 1e-9,
            wavefunction_reduction: 1e-10,
            normalization: 1e-12,
            capacity_agreement: 1e-6,
            capacity_order: 1e-10,
            potential_bounds: 1e-8,
            projected_gradient_residual: 1e-10,
            projected_gradient_max_iters: 1_000_000,
            stationary_tv: 0.02,
            autocorr_rate_relative: 0.05,
            mc_sigmas: 3.0,
            variational_residual: 1e-10,
            hessian_gap: 1e-6,
            gradient_fd: 1e-6,
            gradient_fd_step: 1e-5,
            spectrum_relative: 0.01,
        }
    }
}
