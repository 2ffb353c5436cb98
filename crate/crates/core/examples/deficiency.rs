// Candidates `θ̃^λ = (|λ|(2n+1) + i)⁻¹ Σ c_α B_α^λ` for a deficiency vector
// and the divergence of their partial norms.

use std::collections::BTreeMap;
use std::error::Error;

use heisenberg_lab::delta::{
    divergence_report, identity_candidate_norm, lower_bound_witness, partial_norm, DeficiencyCandidate, MultiIndex,
};
use heisenberg_lab::Complex64;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let identity = DeficiencyCandidate::single(MultiIndex::default(), 1)?;
    let cutoffs: Vec<f64> = (1..=6).map(|k| 10f64.powi(k)).collect();
    let report = divergence_report(&identity, 1.0, &cutoffs)?;
    print!("{}", report.to_csv());
    println!("fitted slope {:.8} vs 1/(2π) = {:.8}", report.fitted_slope, 1.0 / (2.0 * std::f64::consts::PI));
    let oracle = identity_candidate_norm(1, 1.0, 1e6);
    println!("quadrature {:.12} vs closed form {oracle:.12}", partial_norm(&identity, 1.0, 1e6)?);

    let mixed = DeficiencyCandidate::new(
        &BTreeMap::from([
            (MultiIndex::new(0, 0, 0)?, Complex64::new(1.0, 0.0)),
            (MultiIndex::new(1, 1, 0)?, Complex64::new(0.0, -0.5)),
        ]),
        4,
    )?;
    let report = divergence_report(&mixed, 1.0, &cutoffs)?;
    println!("mixed candidate: slope {:.3e}", report.fitted_slope);
    if let Some(w) = lower_bound_witness(&mixed, 10.0, 3.0, 40) {
        println!("|θ̃(n={}, m={})|² ≥ {:.3e}/(λ²(2n+1)² + 1) for |λ| ≥ {}", w.n, w.m, w.constant, w.threshold);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
