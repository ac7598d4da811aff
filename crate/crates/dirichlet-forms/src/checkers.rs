//! Dirichlet / Markovian property checkers.
//!
//! The three faces of the same property are checked on matching probe sets:
//!
//! * a form is Dirichlet iff `E(f♯, f♯) ≤ E(f, f)` for the unit contraction
//!   `f♯ = min(1, max(f, 0))`;
//! * an operator is Dirichlet iff `(H f, max(0, f - 1))_mu ≥ 0`;
//! * a semigroup is Markovian iff it maps the order interval `[0, 1]` into
//!   itself.
//!
//! Verdicts are evidence from sampling, not proofs: each checker evaluates a
//! fixed, documented probe set — indicator vectors, ±2-scaled indicators,
//! constants, targeted two-point probes aimed at sign violations in the
//! matrix, and seeded Gaussian samples — so a FAIL witness is reproducible
//! from the seed. Where a structural certificate exists (graph-energy forms
//! with nonnegative conductances, generators with nonpositive off-diagonal
//! entries and nonnegative row sums) the verdict is additionally marked
//! `certified`.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{FormKind, Generator, SymmetricForm};
use crate::semigroup::SemigroupEvaluator;
use crate::space::Function;
use crate::tolerances::Tolerances;

/// Componentwise clamp of `f` to the order interval `[0, 1]`.
pub fn unit_contraction(f: &Function) -> Function {
    f.map(|x| x.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

/// Violating probe attached to a FAIL verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    /// Which probe family produced the violation.
    pub probe: String,
    pub f: Vec<f64>,
    /// Time of the violation, for semigroup checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    /// Violating component, for semigroup checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    /// Signed violation magnitude beyond tolerance.
    pub violation: f64,
}

/// Outcome record of a checker run.
#[derive(Debug, Clone, Serialize)]
pub struct CheckerVerdict {
    pub property: String,
    pub verdict: Verdict,
    pub certified: bool,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl CheckerVerdict {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl std::fmt::Display for CheckerVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "property={} verdict={} certified={} trials={} seed={}",
            self.property,
            match self.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            },
            self.certified,
            self.trials,
            self.seed
        )?;
        if let Some(w) = &self.witness {
            write!(f, " witness_probe={} violation={:e}", w.probe, w.violation)?;
            if let Some(t) = w.time {
                write!(f, " t={t:e}")?;
            }
            if let Some(i) = w.index {
                write!(f, " index={i}")?;
            }
        }
        Ok(())
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Function {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal))
}

/// Checks `E(f♯, f♯) ≤ E(f, f)` over the probe set.
///
/// Tolerance is `form_contraction · max(1, ‖A‖∞) · ‖f‖²` to stay above the
/// roundoff of the quadratic form itself.
pub fn is_dirichlet_form(form: &SymmetricForm, trials: usize, seed: u64) -> Result<CheckerVerdict> {
    if trials < 1 {
        return Err(Error::NoTrials);
    }
    let tol = Tolerances::default().form_contraction;
    let n = form.space().n();
    let a = form.matrix();
    let scale = a.amax().max(1.0);
    let certified = form.kind() == FormKind::GraphEnergy;

    let mut probes: Vec<(String, Function)> = Vec::new();
    for i in 0..n {
        let e_i = DVector::from_fn(n, |k, _| f64::from(k == i));
        probes.push((format!("indicator[{i}]"), e_i.clone()));
        probes.push((format!("indicator[{i}]*2"), 2.0 * &e_i));
        probes.push((format!("indicator[{i}]*-2"), -2.0 * e_i));
    }
    // Two-point probes target positive off-diagonal entries: for
    // f = e_i - (A_ij/A_jj) e_j the clamp strictly lowers the energy
    // whenever A_ij > 0.
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)] > 0.0 && a[(j, j)] > 0.0 {
                let t = a[(i, j)] / a[(j, j)];
                let mut f = DVector::zeros(n);
                f[i] = 1.0;
                f[j] = -t;
                probes.push((format!("pair[{i},{j}]"), f));
            }
        }
    }
    // Constant-plus-bump probes target negative row sums of A.
    let row_sums = a * DVector::from_element(n, 1.0);
    for i in 0..n {
        for t in [0.5, -0.5] {
            let mut f = DVector::from_element(n, 1.0);
            f[i] += t;
            probes.push((format!("bump[{i}]{t:+}"), f));
        }
        if row_sums[i] < 0.0 && a[(i, i)] > 0.0 {
            let t = -row_sums[i] / a[(i, i)];
            let mut f = DVector::from_element(n, 1.0);
            f[i] += t;
            probes.push((format!("bump[{i}]+opt"), f));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..trials {
        probes.push((format!("gaussian[{k}]"), gaussian(&mut rng, n)));
    }

    for (name, f) in &probes {
        let clamped = unit_contraction(f);
        let e_f = form.energy(f)?;
        let e_clamped = form.energy(&clamped)?;
        let slack = tol * scale * f.norm_squared();
        if e_clamped > e_f + slack {
            return Ok(CheckerVerdict {
                property: "dirichlet-form".into(),
                verdict: Verdict::Fail,
                certified: false,
                trials,
                seed,
                witness: Some(Witness {
                    probe: name.clone(),
                    f: f.iter().copied().collect(),
                    time: None,
                    index: None,
                    violation: e_clamped - e_f,
                }),
            });
        }
    }
    Ok(CheckerVerdict {
        property: "dirichlet-form".into(),
        verdict: Verdict::Pass,
        certified,
        trials,
        seed,
        witness: None,
    })
}

/// Checks `(H f, max(0, f - 1))_mu ≥ 0` over the probe set.
pub fn is_dirichlet_operator(gen: &Generator, trials: usize, seed: u64) -> Result<CheckerVerdict> {
    if trials < 1 {
        return Err(Error::NoTrials);
    }
    let tol = Tolerances::default().form_contraction;
    let space = gen.space();
    let n = space.n();
    let h = gen.matrix();
    let scale = h.amax().max(1.0);
    let row_sums = h * DVector::from_element(n, 1.0);

    // Structural certificate: nonpositive off-diagonal entries and
    // nonnegative row sums make H the generator of a sub-Markov semigroup.
    let floor = 1e-12 * scale;
    let mut structurally_markovian = true;
    for i in 0..n {
        if row_sums[i] < -floor {
            structurally_markovian = false;
        }
        for j in 0..n {
            if i != j && h[(i, j)] > floor {
                structurally_markovian = false;
            }
        }
    }

    let mut probes: Vec<(String, Function)> = Vec::new();
    for i in 0..n {
        let e_i = DVector::from_fn(n, |k, _| f64::from(k == i));
        probes.push((format!("indicator[{i}]"), e_i.clone()));
        probes.push((format!("indicator[{i}]*2"), 2.0 * e_i));
    }
    for c in [1.5, 2.0] {
        probes.push((format!("constant[{c}]"), DVector::from_element(n, c)));
    }
    for i in 0..n {
        let mut f = DVector::from_element(n, 1.0);
        f[i] += 1.0;
        probes.push((format!("bump[{i}]"), f));
        if row_sums[i] < 0.0 && h[(i, i)] > 0.0 {
            // Small excursion above 1 exposes a negative row sum.
            let t = -0.5 * row_sums[i] / h[(i, i)];
            let mut f = DVector::from_element(n, 1.0);
            f[i] += t;
            probes.push((format!("bump[{i}]+opt"), f));
        }
    }
    // Two-point probes expose positive off-diagonal entries: with
    // f = 1 + e_i - s e_j only component i exceeds 1, and s can always be
    // chosen to drive (H f)_i negative when H_ij > 0.
    for i in 0..n {
        for j in 0..n {
            if i != j && h[(i, j)] > 0.0 {
                let s = (row_sums[i] + h[(i, i)] + scale) / h[(i, j)];
                let mut f = DVector::from_element(n, 1.0);
                f[i] += 1.0;
                f[j] -= s;
                probes.push((format!("pair[{i},{j}]"), f));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..trials {
        let g = gaussian(&mut rng, n);
        // Half the draws straddle the threshold at 1 where the excess part
        // activates.
        let f = if k % 2 == 0 { g } else { g.add_scalar(1.0) };
        probes.push((format!("gaussian[{k}]"), f));
    }

    for (name, f) in &probes {
        let excess = f.map(|x| (x - 1.0).max(0.0));
        let hf = gen.apply(f)?;
        let value = space.inner_mu(&hf, &excess)?;
        let slack = tol * scale * space.inner_mu(f, f)?.max(1.0);
        if value < -slack {
            return Ok(CheckerVerdict {
                property: "dirichlet-operator".into(),
                verdict: Verdict::Fail,
                certified: false,
                trials,
                seed,
                witness: Some(Witness {
                    probe: name.clone(),
                    f: f.iter().copied().collect(),
                    time: None,
                    index: None,
                    violation: value,
                }),
            });
        }
    }
    Ok(CheckerVerdict {
        property: "dirichlet-operator".into(),
        verdict: Verdict::Pass,
        certified: structurally_markovian,
        trials,
        seed,
        witness: None,
    })
}

/// Checks `0 ≤ f ≤ 1 ⇒ 0 ≤ T_t f ≤ 1` at every listed time.
pub fn is_markovian_semigroup(
    sg: &SemigroupEvaluator,
    times: &[f64],
    trials: usize,
    seed: u64,
) -> Result<CheckerVerdict> {
    if trials < 1 {
        return Err(Error::NoTrials);
    }
    if times.is_empty() {
        return Err(Error::EmptyTimes);
    }
    for &t in times {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
    }
    let tol = Tolerances::default().semigroup_bounds;
    let n = sg.generator().space().n();

    // The generator-level certificate transfers along the equivalence.
    let gen_verdict = is_dirichlet_operator(sg.generator(), 1, seed)?;
    let certified = gen_verdict.certified;

    let mut probes: Vec<(String, Function)> = Vec::new();
    for i in 0..n {
        probes.push((
            format!("indicator[{i}]"),
            DVector::from_fn(n, |k, _| f64::from(k == i)),
        ));
    }
    probes.push(("constant[0]".into(), DVector::zeros(n)));
    probes.push(("constant[1]".into(), DVector::from_element(n, 1.0)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..trials {
        probes.push((
            format!("uniform[{k}]"),
            DVector::from_fn(n, |_, _| rng.random::<f64>()),
        ));
    }

    for &t in times {
        for (name, f) in &probes {
            let out = sg.apply(t, f)?;
            for i in 0..n {
                let v = out[i];
                if v < -tol || v > 1.0 + tol {
                    return Ok(CheckerVerdict {
                        property: "markovian-semigroup".into(),
                        verdict: Verdict::Fail,
                        certified: false,
                        trials,
                        seed,
                        witness: Some(Witness {
                            probe: name.clone(),
                            f: f.iter().copied().collect(),
                            time: Some(t),
                            index: Some(i),
                            violation: if v < 0.0 { v } else { v - 1.0 },
                        }),
                    });
                }
            }
        }
    }
    Ok(CheckerVerdict {
        property: "markovian-semigroup".into(),
        verdict: Verdict::Pass,
        certified,
        trials,
        seed,
        witness: None,
    })
}
