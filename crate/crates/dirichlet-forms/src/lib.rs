//! Symmetric Dirichlet forms on finite weighted graphs.
//!
//! This crate realizes, at desk scale, the correspondence at the heart of
//! potential theory for symmetric Markov processes: a positive symmetric
//! form over a finite measure space, its self-adjoint generator, the
//! contraction semigroup `e^{-tH}`, the resolvent `(aI + H)^{-1}`, and — when
//! the form is Dirichlet — the continuous-time Markov chain the whole chain
//! of objects describes. On top of that sit the ground-state transform of a
//! wave-function, capacities of vertex sets with their equilibrium
//! potentials, Rayleigh-quotient variational checks, and Monte Carlo
//! verification that the sampled process really is the analytic semigroup in
//! disguise; run end to end they reproduce the Ornstein-Uhlenbeck process
//! from the Gaussian ground state.
//!
//! # Quick start
//!
//! ```
//! use dirichlet_forms::space::build_line_grid;
//! use dirichlet_forms::forms::SymmetricForm;
//! use dirichlet_forms::semigroup::SemigroupEvaluator;
//! use nalgebra::DVector;
//!
//! let grid = build_line_grid(0.0, 1.0, 21)?;
//! let form = SymmetricForm::from_graph(&grid);
//! let semigroup = SemigroupEvaluator::new(&form.generator())?;
//! let f = DVector::from_fn(21, |i, _| (i as f64 / 20.0 - 0.5).abs());
//! let smoothed = semigroup.apply(0.1, &f)?;
//! assert!(smoothed.max() <= f.max());
//! # Ok::<(), dirichlet_forms::Error>(())
//! ```
//!
//! # Runnable examples
//!
//! One example per capability; run with `cargo run --example <name>`:
//!
//! * `heat_spectrum` — grid builders and heat-form spectra against the
//!   continuum eigenvalues.
//! * `correspondence_chain` — form ⇄ generator ⇄ semigroup ⇄ resolvent
//!   round trips with printed residuals.
//! * `dirichlet_checkers` — the three equivalent Markovianity checkers, with
//!   a counterexample and its witness.
//! * `ou_process` — Gaussian ground state to Ornstein-Uhlenbeck chain:
//!   spectrum, stationary law, autocorrelation.
//! * `geodesic_gaussian` — the geodesic Gaussian family and its reduction to
//!   the flat one.
//! * `capacity_potentials` — capacities of nested sets and equilibrium
//!   potentials.
//! * `path_sampling` — trajectory sampling, holding times, and the Monte
//!   Carlo association check.
//!
//! The same scenarios, with CSV/JSON reports, live behind the thin `df`
//! binary (`df ou-verify`, `df heat`, `df roundtrip`, `df capacity`).

pub mod capacity;
pub mod checkers;
pub mod config;
pub mod error;
pub mod experiments;
pub mod forms;
pub mod ground_state;
pub mod process;
pub mod report;
pub mod semigroup;
pub mod space;
pub mod spectral;
pub mod synth;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
