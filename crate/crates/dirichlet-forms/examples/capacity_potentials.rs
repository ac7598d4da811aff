//! Capacities of nested vertex sets on a line grid, the equilibrium
//! potential profile, and the exceptional-set audit.
//!
//! ```bash
//! cargo run --example capacity_potentials
//! ```

use dirichlet_forms::capacity::{capacity, capacity_projected_gradient, exceptional_set_check};
use dirichlet_forms::forms::SymmetricForm;
use dirichlet_forms::space::build_line_grid;
use dirichlet_forms::Tolerances;

fn main() -> dirichlet_forms::Result<()> {
    let tol = Tolerances::default();
    let space = build_line_grid(-1.0, 1.0, 41)?;
    let form = SymmetricForm::from_graph(&space);

    println!("{:>8} {:>14} {:>14} {:>10}", "set size", "linear solve", "proj gradient", "diff");
    for size in [0usize, 1, 5, 9, 15, 21, 41] {
        let half = size / 2;
        let lo = 20usize.saturating_sub(half);
        let set: Vec<usize> = (lo..(lo + size).min(41)).collect();
        let direct = capacity(&form, &set)?;
        let oracle = capacity_projected_gradient(
            &form,
            &set,
            tol.projected_gradient_max_iters,
            tol.projected_gradient_residual,
        )?;
        println!(
            "{size:>8} {:>14.8} {:>14.8} {:>10.2e}",
            direct.value,
            oracle.value,
            (direct.value - oracle.value).abs()
        );
    }
    println!("(total measure of the grid: {})", space.total_measure());

    let single = capacity(&form, &[20])?;
    println!("\nequilibrium potential of the middle vertex:");
    for i in (0..41).step_by(5) {
        let bar = "#".repeat((40.0 * single.potential[i]).round() as usize);
        println!("  x = {:>5.2}  {:>8.5}  {bar}", space.coord1(i).unwrap(), single.potential[i]);
    }
    println!(
        "certificate: constraint violation {:.1e}, stationarity {:.1e}, bounds [{:.3}, {:.3}]",
        single.certificate.max_constraint_violation,
        single.certificate.stationarity,
        single.certificate.min_potential,
        single.certificate.max_potential,
    );

    let report = exceptional_set_check(&form)?;
    println!(
        "\nexceptional sets: none — min singleton capacity {:.6} at vertex {}",
        report.min_capacity, report.min_vertex
    );
    Ok(())
}
