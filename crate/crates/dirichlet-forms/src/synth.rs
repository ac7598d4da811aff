//! Seeded generators for random test instances: connected weighted graphs,
//! their energy forms, and constructed non-Dirichlet counterexamples with a
//! guaranteed violation.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::forms::{FormKind, SymmetricForm};
use crate::space::{Edge, StateSpace};

/// Random connected weighted graph: a random spanning tree plus extra edges.
/// Measures are in `[0.5, 2)`, conductances in `[0.1, 1.1)`, lengths in
/// `[0.5, 1.5)`.
pub fn random_graph_space(n: usize, extra_edges: usize, seed: u64) -> StateSpace {
    assert!(n >= 2, "need at least two vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = (0..n).map(|_| 0.5 + 1.5 * rng.random::<f64>()).collect();
    let mut edges = Vec::new();
    let mut present = std::collections::HashSet::new();
    for i in 1..n {
        let parent = rng.random_range(0..i);
        present.insert((parent.min(i), parent.max(i)));
        edges.push(Edge::new(parent, i, 0.1 + rng.random::<f64>(), 0.5 + rng.random::<f64>()));
    }
    let mut attempts = 0;
    let mut added = 0;
    while added < extra_edges && attempts < 20 * extra_edges + 20 {
        attempts += 1;
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j {
            continue;
        }
        let key = (i.min(j), i.max(j));
        if present.insert(key) {
            edges.push(Edge::new(i, j, 0.1 + rng.random::<f64>(), 0.5 + rng.random::<f64>()));
            added += 1;
        }
    }
    StateSpace::new(mu, edges, None).expect("generated space is valid")
}

/// Random graph-energy form on a random connected space.
pub fn random_dirichlet_form(n: usize, seed: u64) -> SymmetricForm {
    let extra = n / 3;
    SymmetricForm::from_graph(&random_graph_space(n, extra, seed))
}

/// Failure modes for constructed counterexamples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationMode {
    /// Adds a rank-one positive term that turns one off-diagonal entry
    /// positive: a negative conductance in disguise.
    PositiveOffDiagonal,
    /// Adds a rank-one positive term whose row sums go negative: negative
    /// killing.
    NegativeRowSum,
}

/// A positive-semidefinite form that is *not* Dirichlet, with violation
/// margin around `strength`. Built from a random graph form plus a rank-one
/// positive perturbation, so positivity is preserved while the sign
/// structure breaks.
pub fn random_non_dirichlet_form(
    n: usize,
    mode: ViolationMode,
    strength: f64,
    seed: u64,
) -> SymmetricForm {
    assert!(strength > 0.0);
    let space = random_graph_space(n, n / 3, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let base = SymmetricForm::from_graph(&space);
    let w_ij = -base.matrix()[(i, j)];
    let mut v = DVector::zeros(n);
    let scale = match mode {
        // (e_i + e_j)(e_i + e_j)ᵀ adds +c to A_ij.
        ViolationMode::PositiveOffDiagonal => {
            v[i] = 1.0;
            v[j] = 1.0;
            w_ij + strength
        }
        // (e_i - 2 e_j)(e_i - 2 e_j)ᵀ leaves row i summing to -c.
        ViolationMode::NegativeRowSum => {
            v[i] = 1.0;
            v[j] = -2.0;
            strength
        }
    };
    let a = base.matrix() + scale * &v * v.transpose();
    SymmetricForm::from_matrix(&space, a, FormKind::Custom)
        .expect("rank-one positive update keeps the form positive")
}
