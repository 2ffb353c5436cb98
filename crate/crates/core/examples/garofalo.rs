// `∫|∇_H u|² ≥ ∫u²|∇_H N|²/N²` on the built-in test functions.

use std::error::Error;

use heisenberg_lab::hardy::{builtin_test_functions, koranyi_hardy_check, GarofaloQuadrature};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let rows = koranyi_hardy_check(&builtin_test_functions(), &GarofaloQuadrature::default())?;
    println!("{:<14} {:>14} {:>14} {:>12}", "function", "energy", "potential", "defect");
    for r in &rows {
        println!("{:<14} {:>14.6e} {:>14.6e} {:>12.4e}", r.name, r.energy, r.potential, r.defect);
    }
    let worst = rows.iter().map(|r| r.defect / r.energy).fold(f64::INFINITY, f64::min);
    println!("smallest defect/energy {worst:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
