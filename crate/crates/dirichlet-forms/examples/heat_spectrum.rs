//! Heat-form spectra on a circle and an interval, against the continuum
//! eigenvalues.
//!
//! ```bash
//! cargo run --example heat_spectrum
//! ```

use dirichlet_forms::forms::SymmetricForm;
use dirichlet_forms::space::{build_circle_grid, build_line_grid};

fn main() -> dirichlet_forms::Result<()> {
    let circle = build_circle_grid(2.0 * std::f64::consts::PI, 400)?;
    let eigen = SymmetricForm::from_graph(&circle).generator().eigen()?;
    println!("circle of circumference 2π, 400 vertices");
    println!("{:>3} {:>14} {:>10} {:>10}", "k", "eigenvalue", "continuum", "rel err");
    for k in 0usize..8 {
        let m = k.div_ceil(2);
        let reference = (m * m) as f64;
        let value = eigen.eigenvalues()[k];
        let err = if reference == 0.0 { value.abs() } else { (value - reference).abs() / reference };
        println!("{k:>3} {value:>14.8} {reference:>10} {err:>10.2e}");
    }

    let line = build_line_grid(0.0, std::f64::consts::PI, 201)?;
    let eigen = SymmetricForm::from_graph(&line).generator().eigen()?;
    println!("\ninterval (0, π), 201 vertices, reflecting boundary");
    println!("{:>3} {:>14} {:>10} {:>10}", "k", "eigenvalue", "continuum", "rel err");
    for k in 0..6 {
        let reference = (k * k) as f64;
        let value = eigen.eigenvalues()[k];
        let err = if reference == 0.0 { value.abs() } else { (value - reference).abs() / reference };
        println!("{k:>3} {value:>14.8} {reference:>10} {err:>10.2e}");
    }

    println!("\ntotal measure: circle {:.12}, line {:.12}", circle.total_measure(), line.total_measure());
    Ok(())
}
