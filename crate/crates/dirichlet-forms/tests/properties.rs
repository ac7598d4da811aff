//! Cross-module invariants: metric axioms, contraction and continuity of
//! semigroups, resolvent behavior, ground-state structure, reversibility of
//! the sampled chains, and capacity order relations.

use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dirichlet_forms::capacity::capacity;
use dirichlet_forms::checkers::{
    is_dirichlet_form, is_dirichlet_operator, is_markovian_semigroup, unit_contraction,
};
use dirichlet_forms::forms::{Generator, SymmetricForm};
use dirichlet_forms::ground_state::{GroundStateForm, WaveFunction};
use dirichlet_forms::process::{empirical_semigroup, sample_path, JumpChain};
use dirichlet_forms::semigroup::{ResolventEvaluator, SemigroupEvaluator};
use dirichlet_forms::space::{build_circle_grid, build_line_grid, Edge, Function, StateSpace};
use dirichlet_forms::synth::{
    random_dirichlet_form, random_graph_space, random_non_dirichlet_form, ViolationMode,
};
use dirichlet_forms::Tolerances;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Geodesic distance is a metric on connected spaces.
    #[test]
    fn geodesic_is_a_metric(n in 3usize..14, seed in 0u64..1000, picks in prop::array::uniform3(0usize..14)) {
        let space = random_graph_space(n, n / 2, seed);
        let p = picks[0] % n;
        let q = picks[1] % n;
        let r = picks[2] % n;
        let d_pq = space.geodesic_distance(p, q).unwrap();
        let d_qp = space.geodesic_distance(q, p).unwrap();
        prop_assert!((d_pq - d_qp).abs() < 1e-12);
        prop_assert_eq!(d_pq == 0.0, p == q);
        let d_pr = space.geodesic_distance(p, r).unwrap();
        let d_qr = space.geodesic_distance(q, r).unwrap();
        prop_assert!(d_pr <= d_pq + d_qr + 1e-12);
    }

    /// Grid builders: total measure telescopes to the interval length /
    /// circumference (machine precision), and the graphs are connected.
    #[test]
    fn grid_measures_and_connectivity(a in -10.0f64..0.0, len in 0.1f64..10.0, n in 2usize..200) {
        let line = build_line_grid(a, a + len, n).unwrap();
        prop_assert!(line.is_connected());
        prop_assert!((line.total_measure() - len).abs() <= 1e-12 * len.max(1.0));
        if n >= 3 {
            let circle = build_circle_grid(len, n).unwrap();
            prop_assert!(circle.is_connected());
            prop_assert!((circle.total_measure() - len).abs() <= 1e-12 * len.max(1.0));
        }
    }

    /// The unit contraction maps into [0,1], is idempotent, and never
    /// increases a graph energy.
    #[test]
    fn unit_contraction_properties(n in 2usize..12, seed in 0u64..1000) {
        let form = random_dirichlet_form(n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Function = DVector::from_fn(n, |_, _| 4.0 * rng.random::<f64>() - 2.0);
        let clamped = unit_contraction(&f);
        prop_assert!(clamped.iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert_eq!(&unit_contraction(&clamped), &clamped);
        prop_assert!(form.energy(&clamped).unwrap() <= form.energy(&f).unwrap() + 1e-12);
    }

    /// The three Markovianity checkers return the same verdict on random
    /// graph forms and on random indefinite-sign perturbations.
    #[test]
    fn three_way_checker_agreement(n in 3usize..10, seed in 0u64..500, perturb in proptest::bool::ANY) {
        let form = if perturb {
            let mode = if seed % 2 == 0 {
                ViolationMode::PositiveOffDiagonal
            } else {
                ViolationMode::NegativeRowSum
            };
            random_non_dirichlet_form(n, mode, 0.4, seed)
        } else {
            random_dirichlet_form(n, seed)
        };
        let gen = form.generator();
        let sg = SemigroupEvaluator::new(&gen).unwrap();
        let vf = is_dirichlet_form(&form, 16, seed).unwrap().passed();
        let vo = is_dirichlet_operator(&gen, 16, seed).unwrap().passed();
        let vs = is_markovian_semigroup(&sg, &[0.05, 0.5, 5.0], 8, seed).unwrap().passed();
        prop_assert_eq!(vf, vo, "form vs operator (perturbed: {})", perturb);
        prop_assert_eq!(vo, vs, "operator vs semigroup (perturbed: {})", perturb);
    }

    /// Capacity is monotone under set inclusion and subadditive.
    #[test]
    fn capacity_order_relations(seed in 0u64..400) {
        let tol = Tolerances::default();
        let space = build_line_grid(-1.0, 1.0, 21).unwrap();
        let form = SymmetricForm::from_graph(&space);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<usize> = (0..21).filter(|_| rng.random::<f64>() < 0.2).collect();
        let b: Vec<usize> = (0..21).filter(|_| rng.random::<f64>() < 0.2).collect();
        let mut union = a.clone();
        union.extend_from_slice(&b);
        let ca = capacity(&form, &a).unwrap().value;
        let cb = capacity(&form, &b).unwrap().value;
        let cu = capacity(&form, &union).unwrap().value;
        prop_assert!(ca <= cu + tol.capacity_order);
        prop_assert!(cb <= cu + tol.capacity_order);
        prop_assert!(cu <= ca + cb + tol.capacity_order);
    }

    /// Equilibrium potentials of Dirichlet forms live in [0, 1].
    #[test]
    fn equilibrium_potential_bounds(seed in 0u64..200) {
        let tol = Tolerances::default();
        let form = random_dirichlet_form(15, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set: Vec<usize> = (0..15).filter(|_| rng.random::<f64>() < 0.25).collect();
        let result = capacity(&form, &set).unwrap();
        prop_assert!(result.certificate.min_potential >= -tol.potential_bounds);
        prop_assert!(result.certificate.max_potential <= 1.0 + tol.potential_bounds);
    }

    /// Ground-state forms of strictly positive wave-functions are Dirichlet
    /// with a simple zero eigenvalue on connected spaces.
    #[test]
    fn ground_state_forms_are_dirichlet_with_positive_gap(n in 3usize..20, seed in 0u64..300) {
        let space = random_graph_space(n, n / 2, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Function = DVector::from_fn(n, |_, _| 0.2 + rng.random::<f64>());
        let psi = WaveFunction::new(&space, values).unwrap().normalize().unwrap();
        let gsf = GroundStateForm::new(&psi).unwrap();
        prop_assert!(is_dirichlet_form(gsf.form(), 8, seed).unwrap().passed());
        let eigen = gsf.generator().eigen().unwrap();
        prop_assert!(eigen.min_eigenvalue().abs() < 1e-9);
        prop_assert!(eigen.spectral_gap() > 1e-8, "zero eigenvalue not simple");
    }
}

/// Contraction of the semigroup in the weighted norm over random forms.
#[test]
fn semigroup_contracts() {
    for seed in 0..10u64 {
        let n = 6 + seed as usize;
        let form = random_dirichlet_form(n, seed);
        let space = form.space().clone();
        let sg = SemigroupEvaluator::new(&form.generator()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Function =
            DVector::from_fn(n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let norm0 = space.norm_mu(&f).unwrap();
        for &t in &[0.01, 0.1, 1.0, 10.0] {
            let norm = space.norm_mu(&sg.apply(t, &f).unwrap()).unwrap();
            assert!(norm <= norm0 * (1.0 + 1e-12), "t={t}: {norm} > {norm0}");
        }
    }
}

/// Strong-continuity surrogate: ‖T_t f - f‖ decreases monotonically to zero
/// along a dyadic sequence t ↓ 0.
#[test]
fn semigroup_strong_continuity() {
    let form = random_dirichlet_form(12, 3);
    let space = form.space().clone();
    let gen = form.generator();
    let sg = SemigroupEvaluator::new(&gen).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f: Function = DVector::from_fn(12, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    let hf_norm = space.norm_mu(&gen.apply(&f).unwrap()).unwrap();
    let mut previous = f64::INFINITY;
    let mut t = 1.0;
    for _ in 0..20 {
        let dist = space.norm_mu(&(&sg.apply(t, &f).unwrap() - &f)).unwrap();
        assert!(dist <= previous * (1.0 + 1e-12), "not monotone at t={t}");
        previous = dist;
        t *= 0.5;
    }
    // First-order bound ‖T_t f - f‖ ≤ t ‖H f‖ at the last dyadic time.
    assert!(previous <= t * 2.0 * hf_norm + 1e-12);
}

/// Resolvent identity on random forms, and the α → ∞ limit α G_α f → f at
/// the stated tolerances for a bounded generator, plus the generic rate
/// bound ‖α G_α f - f‖ ≤ ‖H f‖ / α.
#[test]
fn resolvent_identity_and_large_alpha_limit() {
    let tol = Tolerances::default();
    for seed in 0..8u64 {
        let n = 5 + 2 * seed as usize;
        let form = random_dirichlet_form(n, 100 + seed);
        let space = form.space().clone();
        let gen = form.generator();
        let rv = ResolventEvaluator::new(&gen).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Function =
            DVector::from_fn(n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let (alpha, beta) = (0.5 + 3.0 * rng.random::<f64>(), 0.5 + 3.0 * rng.random::<f64>());
        let ga = rv.apply(alpha, &f).unwrap();
        let gb = rv.apply(beta, &f).unwrap();
        let identity = (&ga - &gb - (beta - alpha) * rv.apply(alpha, &gb).unwrap()).amax();
        assert!(identity <= tol.resolvent_identity, "identity residual {identity:e}");

        // Rate bound for the strong limit.
        let hf_norm = space.norm_mu(&gen.apply(&f).unwrap()).unwrap();
        for &big in &[1e3, 1e6] {
            let err = space.norm_mu(&(big * rv.apply(big, &f).unwrap() - &f)).unwrap();
            assert!(err <= hf_norm / big * (1.0 + 1e-9) + 1e-15, "rate violated at alpha={big}");
        }

        // Round-trip consistency: (αI + H) G_α f recovers f.
        let back = alpha * &ga + gen.apply(&ga).unwrap();
        assert!((&back - &f).amax() <= 1e-9 * f.amax().max(1.0));
    }

    // Bounded-generator instance pinning the stated absolute tolerances:
    // ‖H‖ small enough that ‖α G_α f - f‖ ≤ 1e-4 at α = 1e3 and 1e-7 at 1e6.
    let s = StateSpace::new(vec![1.0, 1.0], vec![Edge::new(0, 1, 0.05, 1.0)], None).unwrap();
    let gen = SymmetricForm::from_graph(&s).generator();
    let rv = ResolventEvaluator::new(&gen).unwrap();
    let f: Function = DVector::from_vec(vec![1.0, 0.0]);
    for (alpha, bound) in [(1e3, 1e-4), (1e6, 1e-7)] {
        let err = s.norm_mu(&(alpha * rv.apply(alpha, &f).unwrap() - &f)).unwrap();
        assert!(err <= bound, "alpha={alpha}: err {err:e} > {bound:e}");
    }
}

/// Reversibility of ground-state chains: on a long path the empirical edge
/// fluxes balance within three standard deviations.
#[test]
fn detailed_balance_fluxes() {
    let space = build_line_grid(-3.0, 3.0, 61).unwrap();
    let psi = WaveFunction::gaussian(&space).unwrap();
    let chain = JumpChain::from_generator(&GroundStateForm::new(&psi).unwrap().generator()).unwrap();
    let path = sample_path(&chain, 30, 300.0, 21).unwrap();
    let mut flux = std::collections::HashMap::<(usize, usize), f64>::new();
    for k in 1..path.vertices.len() {
        *flux.entry((path.vertices[k - 1], path.vertices[k])).or_default() += 1.0;
    }
    let mut checked = 0;
    for i in 25..35 {
        let forward = flux.get(&(i, i + 1)).copied().unwrap_or(0.0);
        let backward = flux.get(&(i + 1, i)).copied().unwrap_or(0.0);
        if forward + backward > 50.0 {
            checked += 1;
            let sigma = (forward + backward).sqrt();
            assert!(
                (forward - backward).abs() <= 3.0 * sigma,
                "flux imbalance on edge ({i},{}): {forward} vs {backward}",
                i + 1
            );
        }
    }
    assert!(checked >= 5, "path too short to check fluxes");
}

/// Mean reversion of the Ornstein-Uhlenbeck chain: conditional means decay
/// at the spectral gap within 5%.
#[test]
fn ou_mean_reversion() {
    let space = build_line_grid(-5.0, 5.0, 201).unwrap();
    let psi = WaveFunction::gaussian(&space).unwrap();
    let gsf = GroundStateForm::new(&psi).unwrap();
    let generator = gsf.generator();
    let chain = JumpChain::from_generator(&generator).unwrap();
    let gap = generator.eigen().unwrap().spectral_gap();
    let weighted = gsf.weighted_space();
    let coord: Function = DVector::from_fn(201, |i, _| weighted.coord1(i).unwrap());
    let x0 = (0..201)
        .min_by(|&a, &b| {
            (coord[a] - 1.0).abs().total_cmp(&(coord[b] - 1.0).abs())
        })
        .unwrap();
    for (k, s) in [0.25, 0.5].into_iter().enumerate() {
        let (estimate, std_error) =
            empirical_semigroup(&chain, x0, s, &coord, 20_000, 31 + k as u64).unwrap();
        let predicted = coord[x0] * (-gap * s).exp();
        let slack = 0.05 * predicted.abs() + 3.0 * std_error;
        assert!(
            (estimate - predicted).abs() <= slack,
            "s={s}: estimate {estimate} vs e^(-gap s) x0 = {predicted}"
        );
    }
}

/// A sampled trajectory evaluated against the conjugated operator: the
/// generator built by conjugation shares the weighted generator's chain.
#[test]
fn conjugated_and_weighted_spectra_agree_on_random_wavefunctions() {
    for seed in 0..6u64 {
        let space = random_graph_space(10, 4, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Function = DVector::from_fn(10, |_, _| 0.3 + rng.random::<f64>());
        let psi = WaveFunction::new(&space, values).unwrap().normalize().unwrap();
        let weighted_spec = GroundStateForm::new(&psi)
            .unwrap()
            .generator()
            .eigen()
            .unwrap()
            .eigenvalues()
            .clone();
        let conjugated_spec =
            dirichlet_forms::ground_state::conjugated_spectrum(&psi).unwrap();
        let scale = weighted_spec.amax().max(1.0);
        assert!(
            (&weighted_spec - &conjugated_spec).amax() / scale < 1e-9,
            "spectra diverge at seed {seed}"
        );
    }
}

/// Generators of graph forms annihilate constants, so the sampled chains
/// conserve mass; a killed generator loses it.
#[test]
fn conservativeness_matches_row_sums() {
    let form = random_dirichlet_form(9, 12);
    let chain = JumpChain::from_generator(&form.generator()).unwrap();
    assert!(chain.is_conservative());

    let space = form.space().clone();
    let mut h = form.generator().matrix().clone();
    for i in 0..9 {
        h[(i, i)] += 0.3; // pointwise killing
    }
    let killed = JumpChain::from_generator(&Generator::new(&space, h).unwrap()).unwrap();
    assert!(!killed.is_conservative());
    let f: Function = DVector::from_element(9, 1.0);
    let (mass, _) = empirical_semigroup(&killed, 0, 1.0, &f, 4000, 2).unwrap();
    let expected = (-0.3f64).exp();
    assert!((mass - expected).abs() < 0.05, "survival {mass} vs e^{{-0.3}} = {expected}");
}
