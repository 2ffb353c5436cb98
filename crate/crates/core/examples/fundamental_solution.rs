// `Γ = 1/(2π N²)` solves `−Δ_H Γ = δ₀` weakly, and `Γ²` is not locally
// integrable.

use std::error::Error;

use heisenberg_lab::group::{fundamental_solution, gamma_l2_blowup, weak_identity, PolarQuadrature, Stencil};
use heisenberg_lab::{Complex64, GroupPoint};

fn bump(p: GroupPoint) -> Complex64 {
    let n4 = p.horizontal_sq().powi(2) + 16.0 * p.z * p.z;
    if n4 >= 1.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new((1.0 - 1.0 / (1.0 - n4)).exp(), 0.0)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    println!("Γ(1,0,0) = {:.10}", fundamental_solution(GroupPoint::new(1.0, 0.0, 0.0))?);
    let mut quad = PolarQuadrature::default();
    for _ in 0..3 {
        let v = weak_identity(&bump, 1e-2, 1.0, &quad, &Stencil::default())?;
        println!("∫Γ(−Δ_H φ) = {:.8} with {} ψ-nodes, φ(0) = 1", v.re, quad.psi_nodes);
        quad = quad.refined();
    }
    let eps = [0.4, 0.2, 0.1, 0.05];
    let values = gamma_l2_blowup(&eps)?;
    for (e, pair) in eps[1..].iter().zip(values.windows(2)) {
        println!("ε = {e:<5}: ∫Γ² grew by {:.8}", pair[1] - pair[0]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
