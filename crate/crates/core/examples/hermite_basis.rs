// Rescaled Hermite functions and the harmonic-oscillator eigenrelation.

use std::error::Error;

use heisenberg_lab::hermite::{hermite_eval, oscillator_residual, oscillator_residual_with, HermiteBasisSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    println!("H_0(0) = {:.10}, π^(-1/4) = {:.10}", hermite_eval(0, 0.0), std::f64::consts::PI.powf(-0.25));

    let spec = HermiteBasisSpec::new(4.0, 4)?;
    println!("position matrix, λ = 4:\n{}", spec.position_matrix());
    println!("derivative matrix, λ = 4:\n{}", spec.derivative_matrix());

    // the residual is exact linear algebra, so it sits at rounding level
    for (n, lambda) in [(0, 1.0), (5, -3.0), (20, 0.5)] {
        let eigen = (2 * n + 1) as f64 * f64::abs(lambda);
        println!(
            "n = {n:>2}, λ = {lambda:>4}: eigenvalue {eigen:>5}, residual {:.2e}",
            oscillator_residual(n, lambda)?
        );
    }
    let wrong = oscillator_residual_with(5, -3.0, 36.0)?;
    println!("with the eigenvalue 36 instead of 33 the residual is {wrong:.3}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
