//! The geodesic Gaussian family `psi_p ∝ e^{-d(p,·)²/2}`: normalized at
//! every basepoint, and equal to the flat Gaussian on a line grid with the
//! basepoint at the origin.
//!
//! ```bash
//! cargo run --example geodesic_gaussian
//! ```

use dirichlet_forms::ground_state::WaveFunction;
use dirichlet_forms::space::{build_circle_grid, build_line_grid};

fn main() -> dirichlet_forms::Result<()> {
    let line = build_line_grid(-6.0, 6.0, 601)?;
    let flat = WaveFunction::gaussian(&line)?;
    let geodesic = WaveFunction::geodesic_gaussian(&line, 300)?;
    let diff = (flat.values() - geodesic.values()).amax();
    println!("line grid (-6, 6), basepoint x = 0:");
    println!("  componentwise distance to the flat Gaussian: {diff:.2e}");
    println!("  both normalized: {} / {}", flat.norm_mu(), geodesic.norm_mu());

    let circle = build_circle_grid(8.0, 64)?;
    println!("\ncircle of circumference 8, basepoint vertex 10:");
    let psi = WaveFunction::geodesic_gaussian(&circle, 10)?;
    println!("  ‖psi_p‖ = {}", psi.norm_mu());
    let peak = (0..64).max_by(|&a, &b| psi.values()[a].total_cmp(&psi.values()[b])).unwrap();
    let trough = (0..64).min_by(|&a, &b| psi.values()[a].total_cmp(&psi.values()[b])).unwrap();
    println!("  maximal at vertex {peak}, minimal at vertex {trough} (antipode of 10 is 42)");
    for p in [0, 16, 48] {
        let psi = WaveFunction::geodesic_gaussian(&circle, p)?;
        println!("  basepoint {p:>2}: norm = {:.12}", psi.norm_mu());
    }
    Ok(())
}
