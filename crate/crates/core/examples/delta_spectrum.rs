// Fourier coefficients of derivatives of the Dirac delta at the origin.

use std::error::Error;

use heisenberg_lab::delta::{band_check, build_b, delta_coefficient_fd, delta_coefficients, MultiIndex};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for alpha in ["1,0,0", "0,1,0", "0,0,1", "2,1,1"] {
        let alpha: MultiIndex = alpha.parse()?;
        let op = build_b(alpha, 6)?;
        println!("B_{alpha}: λ-factor |λ|^{} λ^{}, banded: {}", op.abs_exponent, op.sgn_exponent, band_check(&op));
    }
    print!("{}", build_b("0,1,0".parse()?, 4)?.to_csv());

    // differentiate the representation coefficient numerically
    let x = MultiIndex::new(1, 0, 0)?;
    let exact = delta_coefficients(x, 1, 2, 2.0)?;
    let fd = delta_coefficient_fd(x, 1, 2, 2.0, 1e-4)?;
    println!("X-coefficient (1,2) at λ = 2: {exact:.10} exact, {fd:.10} by differences");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
