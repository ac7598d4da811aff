//! Semigroup and resolvent evaluators for positive self-adjoint generators.
//!
//! The semigroup `T_t = e^{-tH}` is evaluated through the spectral
//! decomposition in the weighted geometry (accurate to ~1e-12 relative at
//! desk sizes, n ≤ 2000). The resolvent `G_a = (aI + H)^{-1}` is a direct LU
//! solve; an independent route integrates the Laplace transform
//! `∫ e^{-as} T_s f ds` with adaptive Simpson quadrature so the two can be
//! checked against each other.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::forms::Generator;
use crate::space::Function;
use crate::spectral::EigenBasis;
use crate::tolerances::Tolerances;

/// Evaluator for `T_t = e^{-tH}`, backed by a spectral decomposition
/// computed once at construction.
#[derive(Debug, Clone)]
pub struct SemigroupEvaluator {
    generator: Generator,
    basis: EigenBasis,
    /// Relative accuracy contract of [`SemigroupEvaluator::apply`].
    pub accuracy: f64,
}

impl SemigroupEvaluator {
    /// Fails with [`Error::NotPositive`] if the generator spectrum dips below
    /// the PSD tolerance; contraction of the semigroup needs positivity.
    pub fn new(generator: &Generator) -> Result<Self> {
        let basis = generator.eigen()?;
        check_positive(&basis)?;
        Ok(Self { generator: generator.clone(), basis, accuracy: 1e-10 })
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }

    /// Applies `e^{-tH} f`. Eigenvalues are clamped at zero so roundoff
    /// cannot break the contraction property.
    pub fn apply(&self, t: f64, f: &Function) -> Result<Function> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        self.basis.apply_spectral(|lambda| (-t * lambda.max(0.0)).exp(), f)
    }
}

/// Evaluator for the resolvent `G_a = (aI + H)^{-1}`.
#[derive(Debug, Clone)]
pub struct ResolventEvaluator {
    generator: Generator,
}

impl ResolventEvaluator {
    pub fn new(generator: &Generator) -> Result<Self> {
        let basis = generator.eigen()?;
        check_positive(&basis)?;
        Ok(Self { generator: generator.clone() })
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// Solves `(aI + H) u = f` directly. For `a > 0` and positive `H` the
    /// system is nonsingular.
    pub fn apply(&self, alpha: f64, f: &Function) -> Result<Function> {
        if !(alpha > 0.0) {
            return Err(Error::NonPositiveAlpha(alpha));
        }
        self.generator.space().check_function(f)?;
        let n = f.len();
        let mut m = self.generator.matrix().clone();
        for i in 0..n {
            m[(i, i)] += alpha;
        }
        m.lu().solve(f).ok_or(Error::SingularSystem)
    }
}

/// Resolvent by numerical quadrature of the Laplace transform of the
/// semigroup: `G_a f = ∫_0^∞ e^{-as} T_s f ds`, truncated where the kernel
/// drops below the configured tail and integrated with adaptive Simpson.
///
/// This route is deliberately independent of the linear solve in
/// [`ResolventEvaluator::apply`]; agreement between the two is one of the
/// correspondence checks.
pub fn resolvent_via_quadrature(
    sg: &SemigroupEvaluator,
    alpha: f64,
    f: &Function,
    tol: &Tolerances,
) -> Result<Function> {
    if !(alpha > 0.0) {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    sg.generator().space().check_function(f)?;
    let s_max = -tol.quadrature_tail.ln() / alpha;
    let integrand = |s: f64| -> Result<Function> {
        let mut v = sg.apply(s, f)?;
        v *= (-alpha * s).exp();
        Ok(v)
    };
    let fa = integrand(0.0)?;
    let fb = integrand(s_max)?;
    let abs_tol = tol.quadrature_match * 0.1 * (1.0 + f.amax());
    let mut total = DVector::zeros(f.len());
    adaptive_simpson(&integrand, 0.0, s_max, &fa, &fb, abs_tol, 48, &mut total)?;
    Ok(total)
}

/// Recursive adaptive Simpson on a vector-valued integrand, controlling the
/// max-norm of the local error estimate.
#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    integrand: &dyn Fn(f64) -> Result<Function>,
    a: f64,
    b: f64,
    fa: &Function,
    fb: &Function,
    abs_tol: f64,
    depth: usize,
    acc: &mut Function,
) -> Result<()> {
    let m = 0.5 * (a + b);
    let fm = integrand(m)?;
    let h = b - a;
    let coarse = (h / 6.0) * (fa + 4.0 * &fm + fb);

    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = integrand(lm)?;
    let frm = integrand(rm)?;
    let left = (h / 12.0) * (fa + 4.0 * &flm + &fm);
    let right = (h / 12.0) * (&fm + 4.0 * &frm + fb);
    let fine = &left + &right;
    let err = (&fine - &coarse).amax();

    if err <= 15.0 * abs_tol || depth == 0 {
        // Richardson correction of the composite estimate.
        *acc += &fine + (&fine - &coarse) / 15.0;
        Ok(())
    } else {
        adaptive_simpson(integrand, a, m, fa, &fm, abs_tol * 0.5, depth - 1, acc)?;
        adaptive_simpson(integrand, m, b, &fm, fb, abs_tol * 0.5, depth - 1, acc)
    }
}

fn check_positive(basis: &EigenBasis) -> Result<()> {
    let tol = Tolerances::default().psd;
    let lambda_min = basis.min_eigenvalue();
    let scale = basis.eigenvalues()[basis.n() - 1].abs().max(1.0);
    if lambda_min < -tol * scale {
        return Err(Error::NotPositive { min_eigenvalue: lambda_min });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::SymmetricForm;
    use crate::space::{build_circle_grid, Edge, StateSpace};
    use nalgebra::DMatrix;

    fn two_state_chain() -> Generator {
        // H = [[1, -1], [-1, 1]] over uniform measure: eigenvalues 0 and 2.
        let s = StateSpace::new(vec![1.0, 1.0], vec![Edge::new(0, 1, 1.0, 1.0)], None).unwrap();
        Generator::new(&s, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])).unwrap()
    }

    #[test]
    fn time_zero_is_identity() {
        let sg = SemigroupEvaluator::new(&two_state_chain()).unwrap();
        let f = DVector::from_vec(vec![0.3, -2.0]);
        let out = sg.apply(0.0, &f).unwrap();
        assert!((&out - &f).amax() < 1e-13);
    }

    #[test]
    fn negative_time_rejected() {
        let sg = SemigroupEvaluator::new(&two_state_chain()).unwrap();
        let f = DVector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(sg.apply(-0.1, &f), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn conservative_semigroup_fixes_constants() {
        let s = build_circle_grid(2.0 * std::f64::consts::PI, 31).unwrap();
        let sg = SemigroupEvaluator::new(&SymmetricForm::from_graph(&s).generator()).unwrap();
        let ones = DVector::from_element(31, 1.0);
        for &t in &[0.01, 0.5, 5.0] {
            let out = sg.apply(t, &ones).unwrap();
            assert!((&out - &ones).amax() < 1e-11, "t={t}");
        }
    }

    #[test]
    fn two_state_closed_form() {
        // T_t (1,0) = (½(1+e^{-2t}), ½(1-e^{-2t})), from eigenvalues {0, 2}.
        let sg = SemigroupEvaluator::new(&two_state_chain()).unwrap();
        let f = DVector::from_vec(vec![1.0, 0.0]);
        for &t in &[0.0, 0.1, 0.7, 3.0] {
            let out = sg.apply(t, &f).unwrap();
            let decay = (-2.0 * t).exp();
            assert!((out[0] - 0.5 * (1.0 + decay)).abs() < 1e-13);
            assert!((out[1] - 0.5 * (1.0 - decay)).abs() < 1e-13);
        }
    }

    #[test]
    fn semigroup_law_holds() {
        let s = build_circle_grid(3.0, 17).unwrap();
        let sg = SemigroupEvaluator::new(&SymmetricForm::from_graph(&s).generator()).unwrap();
        let f = DVector::from_fn(17, |i, _| (i as f64 * 0.3).cos());
        let a = sg.apply(0.8, &sg.apply(0.5, &f).unwrap()).unwrap();
        let b = sg.apply(1.3, &f).unwrap();
        assert!((&a - &b).amax() < 1e-12);
    }

    #[test]
    fn resolvent_of_zero_operator() {
        let s = StateSpace::new(vec![1.0, 1.0, 1.0], vec![Edge::new(0, 1, 1.0, 1.0)], None).unwrap();
        let h = Generator::new(&s, DMatrix::zeros(3, 3)).unwrap();
        let rv = ResolventEvaluator::new(&h).unwrap();
        let f = DVector::from_vec(vec![2.0, -1.0, 0.5]);
        let out = rv.apply(4.0, &f).unwrap();
        assert!((&out - &(f / 4.0)).amax() < 1e-14);
    }

    #[test]
    fn resolvent_of_constants() {
        let s = build_circle_grid(2.0, 9).unwrap();
        let gen = SymmetricForm::from_graph(&s).generator();
        let rv = ResolventEvaluator::new(&gen).unwrap();
        let ones = DVector::from_element(9, 1.0);
        let out = rv.apply(2.5, &ones).unwrap();
        assert!((&out - &(ones / 2.5)).amax() < 1e-12);
    }

    #[test]
    fn resolvent_rejects_nonpositive_alpha() {
        let rv = ResolventEvaluator::new(&two_state_chain()).unwrap();
        let f = DVector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(rv.apply(0.0, &f), Err(Error::NonPositiveAlpha(_))));
        assert!(matches!(rv.apply(-1.0, &f), Err(Error::NonPositiveAlpha(_))));
    }

    #[test]
    fn quadrature_matches_linear_solve_on_two_state_chain() {
        let gen = two_state_chain();
        let sg = SemigroupEvaluator::new(&gen).unwrap();
        let rv = ResolventEvaluator::new(&gen).unwrap();
        let tol = Tolerances::default();
        let f = DVector::from_vec(vec![1.0, 0.0]);
        let solve = rv.apply(1.0, &f).unwrap();
        let quad = resolvent_via_quadrature(&sg, 1.0, &f, &tol).unwrap();
        assert!((&solve - &quad).amax() < tol.quadrature_match);
    }

    #[test]
    fn quadrature_matches_solve_on_a_stiff_generator() {
        let s = build_circle_grid(1.0, 25).unwrap();
        let gen = SymmetricForm::from_graph(&s).generator();
        let sg = SemigroupEvaluator::new(&gen).unwrap();
        let rv = ResolventEvaluator::new(&gen).unwrap();
        let tol = Tolerances::default();
        let f = DVector::from_fn(25, |i, _| if i == 3 { 1.0 } else { 0.0 });
        for &alpha in &[0.3, 1.0, 7.0] {
            let solve = rv.apply(alpha, &f).unwrap();
            let quad = resolvent_via_quadrature(&sg, alpha, &f, &tol).unwrap();
            assert!((&solve - &quad).amax() < tol.quadrature_match, "alpha={alpha}");
        }
    }

    #[test]
    fn semigroup_rejects_negative_operator() {
        let s = StateSpace::new(vec![1.0, 1.0], vec![Edge::new(0, 1, 1.0, 1.0)], None).unwrap();
        let h = Generator::new(&s, -DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(SemigroupEvaluator::new(&h), Err(Error::NotPositive { .. })));
        assert!(matches!(ResolventEvaluator::new(&h), Err(Error::NotPositive { .. })));
    }
}
