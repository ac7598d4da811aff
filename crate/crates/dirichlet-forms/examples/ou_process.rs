//! From the Gaussian ground state to the Ornstein-Uhlenbeck chain: spectrum
//! of the weighted generator, sampled stationary law against `mu psi²`, and
//! the autocorrelation decay rate against the spectral gap.
//!
//! ```bash
//! cargo run --example ou_process
//! ```

use dirichlet_forms::ground_state::{GroundStateForm, WaveFunction};
use dirichlet_forms::process::{
    autocovariance, fit_exponential_decay, observable_time_series, stationary_histogram, JumpChain,
};
use dirichlet_forms::space::build_line_grid;
use nalgebra::DVector;

fn main() -> dirichlet_forms::Result<()> {
    let space = build_line_grid(-5.0, 5.0, 201)?;
    let psi = WaveFunction::gaussian(&space)?;
    let gsf = GroundStateForm::new(&psi)?;
    let generator = gsf.generator();

    let eigen = generator.eigen()?;
    println!("generator spectrum (continuum reference 2k):");
    for k in 0..6 {
        println!("  lambda_{k} = {:>12.6}   (reference {})", eigen.eigenvalues()[k], 2 * k);
    }
    let gap = eigen.spectral_gap();

    let chain = JumpChain::from_generator(&generator)?;
    let weighted = gsf.weighted_space();
    let horizon = 4000.0;
    let hist = stationary_histogram(&chain, horizon, 10.0, 42)?;
    let target = weighted.mu() / weighted.total_measure();
    let tv: f64 = 0.5 * (0..201).map(|i| (hist[i] - target[i]).abs()).sum::<f64>();
    println!("\nstationary law after horizon {horizon}: TV distance to mu psi² = {tv:.4}");
    println!("  x      empirical   target");
    for i in (20..=180).step_by(32) {
        println!(
            "  {:>5.2}  {:>9.5}   {:>9.5}",
            weighted.coord1(i).unwrap(),
            hist[i],
            target[i]
        );
    }

    let coord = DVector::from_fn(201, |i, _| weighted.coord1(i).unwrap());
    let series = observable_time_series(&chain, 100, horizon, 10.0, 0.02, 43, &coord)?;
    let acov = autocovariance(&series, 0.02, 100);
    let (amp, rate) = fit_exponential_decay(&acov).expect("positive covariances");
    println!("\nposition autocovariance fit: {amp:.4} · exp(-{rate:.4} t)");
    println!("decay rate {rate:.4} vs spectral gap {gap:.4} ({:+.2}%)", 100.0 * (rate - gap) / gap);
    Ok(())
}
