// The trial-family estimate of the Hardy constant with respect to the
// distance from the origin.

use std::error::Error;

use heisenberg_lab::hardy::{hardy_ratio, quotient_for_alpha, CLAIMED_BOUND};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let report = hardy_ratio(4096)?;
    println!("ratio {:.12} (claimed bound {CLAIMED_BOUND})", report.ratio);
    println!("numerator {:.12}, denominator {:.12}", report.numerator, report.denominator);
    println!("change under node doubling {:.2e}, converged {}", report.refinement_delta, report.converged);
    print!("{}", report.sweep_csv());

    // the cutoff scale does not matter
    for c in [0.5, 1.0, 4.0] {
        println!("α = −2.2, cutoff {c}: quotient {:.10}", quotient_for_alpha(-2.2, c, 512)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
