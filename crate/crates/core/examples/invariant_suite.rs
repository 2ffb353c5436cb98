// Runs the invariant suite in-process and summarizes it by kind.

use std::error::Error;

use heisenberg_lab::cli::{run_checks, CheckKind, RunConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let config = RunConfig { seed: 3, ..RunConfig::default() };
    let rows = run_checks(&config)?;
    for kind in [CheckKind::Exact, CheckKind::Quadrature, CheckKind::Fd] {
        let of_kind: Vec<_> = rows.iter().filter(|r| r.kind == kind).collect();
        let passed = of_kind.iter().filter(|r| r.pass()).count();
        println!("{:<10} {passed}/{} pass", kind.as_str(), of_kind.len());
    }
    let coarse = RunConfig { fd_step: 0.1, ..config };
    let failing: Vec<_> = run_checks(&coarse)?.into_iter().filter(|r| !r.pass()).map(|r| r.name).collect();
    println!("with a step of 0.1 these fail: {}", failing.join(", "));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
