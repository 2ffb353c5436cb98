// Fourier transform of a Gaussian on a truncated `(n, m, λ)` grid: the
// Plancherel defect and pointwise inversion.

use std::error::Error;

use heisenberg_lab::ncft::{
    direct_l2_norm, forward_transform, inverse_transform, plancherel_norm, SpectralGrid, TransformQuadrature,
};
use heisenberg_lab::{Complex64, GroupPoint};

fn gaussian(p: GroupPoint) -> Complex64 {
    Complex64::new((-(p.x * p.x + p.y * p.y + p.z * p.z)).exp(), 0.0)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let quad = TransformQuadrature { half_width: 5.0, spatial_nodes: 40, xi_nodes: 48 };
    let direct = direct_l2_norm(&gaussian, &quad)?;
    println!("‖f‖ = {direct:.10}");
    let at = GroupPoint::new(0.1, 0.2, 0.1);
    for n in [2, 4, 8] {
        let grid = SpectralGrid::geometric(n, 1e-3, 12.0, 24)?;
        let c = forward_transform(&gaussian, &grid, &quad)?;
        let spectral = plancherel_norm(&c);
        let defect = (direct * direct - spectral * spectral) / (direct * direct);
        println!(
            "N = {n}: spectral norm {spectral:.6}, defect {defect:.3e}, f(p) ≈ {:.5} (exact {:.5})",
            inverse_transform(&c, at).re,
            gaussian(at).re
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
