// The exponential chart `Φ(t, θ, r)` from the origin and its inverse.

use std::error::Error;
use std::f64::consts::PI;

use heisenberg_lab::geodesics::{
    distance_from_origin, exp_map, geodesic_coordinates, geodesic_horizontality, jacobian_det, koranyi_in_chart, mu,
    GeodesicCoordinates,
};
use heisenberg_lab::GroupPoint;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let c = GeodesicCoordinates::new(1.5, 0.3, 2.0)?;
    let p = exp_map(c);
    let back = geodesic_coordinates(p)?;
    println!("Φ{:?} = {p:?}", (c.t, c.theta, c.r));
    println!("recovered (t, θ, r) = ({:.12}, {:.12}, {:.12})", back.t, back.theta, back.r);

    println!(
        "d((0,0,1)) = {:.12}, 2√π = {:.12}",
        distance_from_origin(GroupPoint::new(0.0, 0.0, 1.0)),
        2.0 * PI.sqrt()
    );
    println!("N(Φ) = {:.12} against δ = {}", koranyi_in_chart(c.t, c.r), c.t);
    println!("det DΦ = {:.10}, t³μ(r) = {:.10}", jacobian_det(c), c.t.powi(3) * mu(c.r));

    for h0 in [0.0, 1.0, 3.0] {
        println!("ray h0 = {h0}: speed/horizontality defect {:.2e}", geodesic_horizontality(0.7, h0, 16, 2.0)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
