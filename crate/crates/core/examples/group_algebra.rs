// Group law, dilations, the Koranyi gauge and the left-invariant fields.

use std::error::Error;

use heisenberg_lab::group::{apply_field, apply_sublaplacian, dilate, koranyi_norm, Field, Stencil};
use heisenberg_lab::{Complex64, GroupPoint};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let p = GroupPoint::new(1.0, 0.0, 0.0);
    let q = GroupPoint::new(0.0, 1.0, 0.0);
    let pq = p * q;
    let qp = q * p;
    println!("p·q = {pq:?}");
    println!("q·p = {qp:?}  (the z entries differ by xy' − x'y = 1)");
    assert_eq!(pq, GroupPoint::new(1.0, 1.0, 0.5));

    let w = GroupPoint::new(0.3, -1.7, 2.2);
    println!("w·w⁻¹ = {:?}", w * w.inverse());

    let lambda = 2.5;
    let v = GroupPoint::new(1.0, -1.0, 0.3);
    let scaled = dilate(lambda, v)?;
    println!("N(δ_λ v) / N(v) = {:.15} for λ = {lambda}", koranyi_norm(scaled) / koranyi_norm(v));

    let z = |p: GroupPoint| Complex64::new(p.z, 0.0);
    println!("X z at (0,2,0) = {:.6}", apply_field(Field::X, &z, GroupPoint::new(0.0, 2.0, 0.0)).re);
    println!("Y z at (4,0,0) = {:.6}", apply_field(Field::Y, &z, GroupPoint::new(4.0, 0.0, 0.0)).re);

    let gaussian = |p: GroupPoint| Complex64::new((-(p.x * p.x + p.y * p.y + p.z * p.z)).exp(), 0.0);
    let at = GroupPoint::new(0.4, -0.2, 0.1);
    let s = Stencil::default();
    let residual = (s.apply_commutator(&gaussian, at) - s.apply_field(Field::Z, &gaussian, at)).norm();
    println!("|[X, Y]f − Zf| = {residual:.2e}");
    println!("Δ_H f = {:.8}", apply_sublaplacian(&gaussian, at).re);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
