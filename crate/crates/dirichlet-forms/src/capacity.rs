//! Capacity of vertex sets and equilibrium potentials.
//!
//! The capacity of a set S is the infimum of `E₁(f, f) = E(f, f) + ‖f‖²_mu`
//! over functions dominating 1 on S. On a finite space the infimum is
//! attained: fixing `f = 1` on S and solving the E₁-harmonic extension on the
//! complement is a positive-definite linear solve. The KKT residuals of that
//! ansatz are verified; if a multiplier comes out negative the solver falls
//! back to projected gradient descent, and the result records which path ran.
//! Sets of capacity zero would be invisible to the process; the exceptional
//! set check certifies that no nonempty set qualifies.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::SymmetricForm;
use crate::space::Function;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolverPath {
    #[serde(rename = "linear-solve")]
    LinearSolve,
    #[serde(rename = "projected-gradient")]
    ProjectedGradient,
}

/// Optimality evidence for a capacity solve.
#[derive(Debug, Clone, Serialize)]
pub struct CapacityCertificate {
    /// Worst violation of `f ≥ 1` on S (nonnegative number).
    pub max_constraint_violation: f64,
    /// Smallest KKT multiplier on S; negative values invalidate the
    /// equality ansatz.
    pub min_multiplier: f64,
    /// Largest complementary-slackness product |(f_i - 1) λ_i| over S.
    pub complementarity: f64,
    /// Stationarity residual off S, ‖(B f)_c‖∞.
    pub stationarity: f64,
    pub min_potential: f64,
    pub max_potential: f64,
    pub solver: SolverPath,
}

/// Capacity value with its equilibrium potential and certificate.
#[derive(Debug, Clone)]
pub struct CapacityResult {
    pub set: Vec<usize>,
    pub value: f64,
    pub potential: Function,
    pub certificate: CapacityCertificate,
}

fn e1_value(form: &SymmetricForm, f: &Function) -> Result<f64> {
    Ok(form.energy(f)? + form.space().inner_mu(f, f)?)
}

fn certificate(
    form: &SymmetricForm,
    b: &DMatrix<f64>,
    set: &[usize],
    f: &Function,
    solver: SolverPath,
) -> CapacityCertificate {
    let bf = b * f;
    let mut max_violation: f64 = 0.0;
    let mut min_multiplier = f64::INFINITY;
    let mut complementarity: f64 = 0.0;
    let mut in_set = vec![false; form.space().n()];
    for &i in set {
        in_set[i] = true;
        max_violation = max_violation.max(1.0 - f[i]);
        // Multiplier of the active constraint f_i >= 1 is the E1 gradient.
        min_multiplier = min_multiplier.min(2.0 * bf[i]);
        complementarity = complementarity.max(((f[i] - 1.0) * 2.0 * bf[i]).abs());
    }
    if set.is_empty() {
        min_multiplier = 0.0;
    }
    let stationarity = (0..form.space().n())
        .filter(|&i| !in_set[i])
        .map(|i| bf[i].abs())
        .fold(0.0, f64::max);
    let min_potential = f.iter().copied().fold(f64::INFINITY, f64::min);
    let max_potential = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    CapacityCertificate {
        max_constraint_violation: max_violation,
        min_multiplier,
        complementarity,
        stationarity,
        min_potential,
        max_potential,
        solver,
    }
}

/// Capacity of `set` for the extended form E₁, by harmonic extension.
///
/// Empty sets have capacity zero; the full vertex set has `f* ≡ 1`, so for a
/// graph-energy form the value is exactly the total measure.
pub fn capacity(form: &SymmetricForm, set: &[usize]) -> Result<CapacityResult> {
    let tol = Tolerances::default();
    let n = form.space().n();
    let mut set: Vec<usize> = set.to_vec();
    set.sort_unstable();
    set.dedup();
    for &i in &set {
        form.space().check_vertex(i)?;
    }
    let b = form.e1_matrix();
    if set.is_empty() {
        let f = DVector::zeros(n);
        let cert = certificate(form, &b, &set, &f, SolverPath::LinearSolve);
        return Ok(CapacityResult { set, value: 0.0, potential: f, certificate: cert });
    }
    if set.len() == n {
        let f = DVector::from_element(n, 1.0);
        let value = e1_value(form, &f)?;
        let cert = certificate(form, &b, &set, &f, SolverPath::LinearSolve);
        return Ok(CapacityResult { set, value, potential: f, certificate: cert });
    }

    let in_set = {
        let mut v = vec![false; n];
        for &i in &set {
            v[i] = true;
        }
        v
    };
    let complement: Vec<usize> = (0..n).filter(|&i| !in_set[i]).collect();
    let m = complement.len();
    let mut bcc = DMatrix::zeros(m, m);
    for (r, &i) in complement.iter().enumerate() {
        for (c, &j) in complement.iter().enumerate() {
            bcc[(r, c)] = b[(i, j)];
        }
    }
    let mut rhs = DVector::zeros(m);
    for (r, &i) in complement.iter().enumerate() {
        let boundary: f64 = set.iter().map(|&j| b[(i, j)]).sum();
        rhs[r] = -boundary;
    }
    let solution = nalgebra::linalg::Cholesky::new(bcc)
        .map(|ch| ch.solve(&rhs))
        .ok_or(Error::SingularSystem)?;
    let mut f = DVector::zeros(n);
    for &i in &set {
        f[i] = 1.0;
    }
    for (r, &i) in complement.iter().enumerate() {
        f[i] = solution[r];
    }
    let cert = certificate(form, &b, &set, &f, SolverPath::LinearSolve);
    if cert.min_multiplier < -tol.capacity_order {
        // The equality ansatz is not optimal; solve the inequality problem.
        return capacity_projected_gradient(
            form,
            &set,
            tol.projected_gradient_max_iters,
            tol.projected_gradient_residual,
        );
    }
    let value = e1_value(form, &f)?;
    Ok(CapacityResult { set, value, potential: f, certificate: cert })
}

/// Capacity by projected gradient descent on `{f : f ≥ 1 on S}`.
///
/// Step size is the reciprocal of a power-iteration estimate of the largest
/// E₁ eigenvalue; iteration stops when the scaled gradient-projection
/// residual drops below `residual_tol` or at `max_iters`. Used both as the
/// fallback solver and as the independent oracle for the linear-solve path.
pub fn capacity_projected_gradient(
    form: &SymmetricForm,
    set: &[usize],
    max_iters: usize,
    residual_tol: f64,
) -> Result<CapacityResult> {
    let n = form.space().n();
    let mut set: Vec<usize> = set.to_vec();
    set.sort_unstable();
    set.dedup();
    for &i in &set {
        form.space().check_vertex(i)?;
    }
    let b = form.e1_matrix();
    if set.is_empty() {
        let f = DVector::zeros(n);
        let cert = certificate(form, &b, &set, &f, SolverPath::ProjectedGradient);
        return Ok(CapacityResult { set, value: 0.0, potential: f, certificate: cert });
    }
    // Largest eigenvalue estimate by power iteration, padded slightly so the
    // step stays inside the stability region.
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut lambda_max: f64 = 1.0;
    for _ in 0..60 {
        let w = &b * &v;
        let norm = w.norm();
        if norm == 0.0 {
            break;
        }
        lambda_max = norm / v.norm();
        v = w / norm;
    }
    let lip = lambda_max * 1.05;
    let step = 1.0 / lip;

    let project = |f: &mut Function| {
        for &i in &set {
            if f[i] < 1.0 {
                f[i] = 1.0;
            }
        }
    };
    let mut f = DVector::zeros(n);
    project(&mut f);
    for _ in 0..max_iters {
        let grad = &b * &f;
        let mut next = &f - step * &grad;
        project(&mut next);
        let residual = lip * (&next - &f).norm();
        f = next;
        if residual <= residual_tol {
            break;
        }
    }
    let value = e1_value(form, &f)?;
    let cert = certificate(form, &b, &set, &f, SolverPath::ProjectedGradient);
    Ok(CapacityResult { set, value, potential: f, certificate: cert })
}

/// Report of the exceptional-set audit: the singleton capacities.
#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalSetReport {
    pub min_capacity: f64,
    pub min_vertex: usize,
    pub capacities: Vec<f64>,
    /// True when every singleton has positive capacity: no nonempty
    /// exceptional sets exist and quasi-continuity is plain pointwise
    /// equality.
    pub none_exceptional: bool,
}

/// Computes every singleton capacity. On a finite space with positive vertex
/// measures each is at least `mu_i`, so the report certifies that no nonempty
/// set is exceptional.
pub fn exceptional_set_check(form: &SymmetricForm) -> Result<ExceptionalSetReport> {
    let n = form.space().n();
    let mut capacities = Vec::with_capacity(n);
    for i in 0..n {
        capacities.push(capacity(form, &[i])?.value);
    }
    let (min_vertex, min_capacity) = capacities
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty space");
    Ok(ExceptionalSetReport {
        min_capacity,
        min_vertex,
        capacities,
        none_exceptional: min_capacity > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::build_line_grid;
    use crate::tolerances::Tolerances;

    #[test]
    fn empty_set_has_zero_capacity() {
        let s = build_line_grid(-1.0, 1.0, 11).unwrap();
        let form = SymmetricForm::from_graph(&s);
        let r = capacity(&form, &[]).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.potential.amax(), 0.0);
    }

    #[test]
    fn full_set_capacity_is_total_measure_exactly() {
        let s = build_line_grid(-1.0, 1.0, 17).unwrap();
        let form = SymmetricForm::from_graph(&s);
        let all: Vec<usize> = (0..17).collect();
        let r = capacity(&form, &all).unwrap();
        // Edge-sum evaluation makes E(1,1) literally zero, so the value is
        // the same float as the measure total.
        assert_eq!(r.value, s.total_measure());
        assert_eq!(r.potential, DVector::from_element(17, 1.0));
    }

    #[test]
    fn interior_vertex_matches_projected_gradient_oracle() {
        let s = build_line_grid(-1.0, 1.0, 41).unwrap();
        let form = SymmetricForm::from_graph(&s);
        let tol = Tolerances::default();
        let direct = capacity(&form, &[20]).unwrap();
        assert_eq!(direct.certificate.solver, SolverPath::LinearSolve);
        let pgd = capacity_projected_gradient(
            &form,
            &[20],
            tol.projected_gradient_max_iters,
            tol.projected_gradient_residual,
        )
        .unwrap();
        assert!(
            (direct.value - pgd.value).abs() <= tol.capacity_agreement,
            "linear {} vs pgd {}",
            direct.value,
            pgd.value
        );
    }

    #[test]
    fn equilibrium_potential_stays_in_the_unit_box() {
        let s = build_line_grid(-2.0, 2.0, 41).unwrap();
        let form = SymmetricForm::from_graph(&s);
        let tol = Tolerances::default();
        let r = capacity(&form, &[5, 6, 30]).unwrap();
        assert!(r.certificate.min_potential >= -tol.potential_bounds);
        assert!(r.certificate.max_potential <= 1.0 + tol.potential_bounds);
        assert!(r.certificate.max_constraint_violation <= tol.potential_bounds);
        assert!(r.certificate.min_multiplier >= -tol.capacity_order);
    }

    #[test]
    fn capacity_is_monotone_in_the_set() {
        let s = build_line_grid(-1.0, 1.0, 21).unwrap();
        let form = SymmetricForm::from_graph(&s);
        let tol = Tolerances::default();
        let single = capacity(&form, &[10]).unwrap().value;
        let pair = capacity(&form, &[10, 11]).unwrap().value;
        assert!(single <= pair + tol.capacity_order);
    }

    #[test]
    fn singleton_capacity_below_indicator_energy() {
        // The indicator of {i} is feasible, so cap({i}) ≤ E1(e_i, e_i).
        let s = build_line_grid(-1.0, 1.0, 21).unwrap();
        let form = SymmetricForm::from_graph(&s);
        for i in [0, 7, 20] {
            let e_i = DVector::from_fn(21, |k, _| f64::from(k == i));
            let bound = form.energy(&e_i).unwrap() + s.inner_mu(&e_i, &e_i).unwrap();
            let cap = capacity(&form, &[i]).unwrap().value;
            assert!(cap <= bound + 1e-12, "cap {cap} vs indicator bound {bound}");
        }
    }

    #[test]
    fn no_exceptional_sets_on_a_grid() {
        let s = build_line_grid(0.0, 1.0, 15).unwrap();
        let form = SymmetricForm::from_graph(&s);
        let report = exceptional_set_check(&form).unwrap();
        assert!(report.none_exceptional);
        assert!(report.min_capacity > 0.0);
        // Each singleton dominates its own measure weight.
        for (i, &c) in report.capacities.iter().enumerate() {
            assert!(c >= s.mu()[i] - 1e-12);
        }
    }

    #[test]
    fn duplicate_and_unsorted_sets_are_canonicalized() {
        let s = build_line_grid(0.0, 1.0, 9).unwrap();
        let form = SymmetricForm::from_graph(&s);
        let a = capacity(&form, &[4, 2, 4]).unwrap();
        let b = capacity(&form, &[2, 4]).unwrap();
        assert_eq!(a.set, b.set);
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn out_of_range_vertex_is_rejected() {
        let s = build_line_grid(0.0, 1.0, 5).unwrap();
        let form = SymmetricForm::from_graph(&s);
        assert!(matches!(capacity(&form, &[9]), Err(Error::VertexOutOfRange { .. })));
    }
}
