//! Exponential coordinates centred at the origin.
//!
//! The chart `Φ(t, θ, r)` sends arclength `t > 0`, initial angle `θ` and
//! holonomy `r ∈ (−2π, 2π)` to the endpoint of the length-minimizing
//! geodesic
//!
//! ```text
//! Φ(t, θ, r) = ( t (sin(θ+r) − sin θ)/r,  t (cos θ − cos(θ+r))/r,  t² (r − sin r)/(2r²) ).
//! ```
//!
//! Its Jacobian determinant is `t³ μ(r)` and `δ(Φ(t, θ, r)) = t`.
//!
//! The raw formulas cancel catastrophically near `r = 0` (`μ` loses twelve
//! digits at `r = 1e−3`), so every quotient below is evaluated through the
//! helpers in [`stable`], which switch to a Taylor series summed to full
//! precision for `|r| < 1`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::group::GroupPoint;

const TWO_PI: f64 = 2.0 * PI;

/// Cancellation-free building blocks of the chart.
pub mod stable {
    /// Below this `|r|` the series are used.
    pub const SERIES_RADIUS: f64 = 1.0;

    /// `Σ_{k ≥ 0} c_k x^k` until terms stop contributing.
    fn power_series(x: f64, mut coeff: impl FnMut(usize) -> f64) -> f64 {
        let mut sum = 0.0;
        let mut power = 1.0;
        for k in 0..40 {
            let term = coeff(k) * power;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() && k > 2 {
                break;
            }
            power *= x;
        }
        sum
    }

    /// `1/(n!)` for small `n`.
    fn inv_factorial(n: usize) -> f64 {
        (1..=n).fold(1.0, |acc, j| acc / j as f64)
    }

    /// `sin u / u`.
    pub fn sinc(u: f64) -> f64 {
        if u.abs() < 0.5 {
            power_series(u * u, |k| sign(k) * inv_factorial(2 * k + 1))
        } else {
            u.sin() / u
        }
    }

    fn sign(k: usize) -> f64 {
        if k.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `(1 − cos r)/r²`.
    pub fn one_minus_cos_sq(r: f64) -> f64 {
        0.5 * sinc(0.5 * r).powi(2)
    }

    /// `(r − sin r)/r³`.
    pub fn sine_defect(r: f64) -> f64 {
        if r.abs() < SERIES_RADIUS {
            power_series(r * r, |k| sign(k) * inv_factorial(2 * k + 3))
        } else {
            (r - r.sin()) / r.powi(3)
        }
    }

    /// `μ(r) = (2 − 2cos r − r sin r)/r⁴`.
    pub fn mu(r: f64) -> f64 {
        if r.abs() < SERIES_RADIUS {
            // coefficient of r^{2k} in the numerator is (−1)^k (2k−2)/(2k)!, k ≥ 2
            power_series(r * r, |j| {
                let k = j + 2;
                sign(k) * (2 * k - 2) as f64 * inv_factorial(2 * k)
            })
        } else {
            let half = 0.5 * r;
            2.0 * half.sin() * (2.0 * half.sin() - r * half.cos()) / r.powi(4)
        }
    }

    /// `q(r)/r⁴` with `q(r) = r² − 2r sin r − 2cos r + 2`.
    pub fn q_quartic(r: f64) -> f64 {
        if r.abs() < SERIES_RADIUS {
            // coefficient of r^{2k} in q is 2(−1)^k (2k−1)/(2k)!, k ≥ 2
            power_series(r * r, |j| {
                let k = j + 2;
                2.0 * sign(k) * (2 * k - 1) as f64 * inv_factorial(2 * k)
            })
        } else {
            (r * r - 2.0 * r * r.sin() + 4.0 * (0.5 * r).sin().powi(2)) / r.powi(4)
        }
    }

    /// `(2 − r cot(r/2))/r²`, so that `w(r) = 1/(r · this)`.
    pub fn cot_defect(r: f64) -> f64 {
        let u = 0.5 * r;
        // 2 − r cot u = 2 (sin u − u cos u) / sin u
        let numerator = if u.abs() < SERIES_RADIUS {
            // (sin u − u cos u)/u³ = Σ (−1)^{k+1} 2k u^{2k−2}/(2k+1)!
            power_series(u * u, |j| {
                let k = j + 1;
                sign(k + 1) * (2 * k) as f64 * inv_factorial(2 * k + 1)
            })
        } else {
            (u.sin() - u * u.cos()) / u.powi(3)
        };
        numerator / (2.0 * sinc(u))
    }
}

/// A point `(t, θ, r)` of the chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicCoordinates {
    pub t: f64,
    pub theta: f64,
    pub r: f64,
}

impl GeodesicCoordinates {
    pub fn new(t: f64, theta: f64, r: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(LabError::InvalidCoordinates(format!("t must be positive, got {t}")));
        }
        if !theta.is_finite() {
            return Err(LabError::InvalidCoordinates("θ must be finite".into()));
        }
        if !(r.abs() < TWO_PI) {
            return Err(LabError::InvalidCoordinates(format!("r must lie in (−2π, 2π), got {r}")));
        }
        Ok(GeodesicCoordinates { t, theta: theta.rem_euclid(TWO_PI), r })
    }
}

/// `Φ(t, θ, r)`, written as `(t cos(θ+r/2) sinc(r/2), t sin(θ+r/2) sinc(r/2), t² (r − sin r)/(2r²))`
/// which is continuous through `r = 0`. Accepts the closed range `|r| ≤ 2π`.
pub fn exp_map_raw(t: f64, theta: f64, r: f64) -> GroupPoint {
    let radial = t * stable::sinc(0.5 * r);
    let phase = theta + 0.5 * r;
    GroupPoint::new(radial * phase.cos(), radial * phase.sin(), 0.5 * t * t * r * stable::sine_defect(r))
}

pub fn exp_map(c: GeodesicCoordinates) -> GroupPoint {
    exp_map_raw(c.t, c.theta, c.r)
}

/// Density of the pulled-back Lebesgue measure per unit `t³ dt dθ dr`.
pub fn mu(r: f64) -> f64 {
    stable::mu(r)
}

/// `w(r) = r/(2 − r cot(r/2))`.
pub fn w_coeff(r: f64) -> Result<f64> {
    if r == 0.0 {
        return Err(LabError::SingularAtZero);
    }
    if !(r.abs() < TWO_PI) {
        return Err(LabError::InvalidCoordinates(format!("w is defined on 0 < |r| < 2π, got {r}")));
    }
    Ok(1.0 / (r * stable::cot_defect(r)))
}

/// `N(Φ(t, θ, r)) = (√2 t / |r|) q(r)^{1/4}`, in the form `√2 t (q/r⁴)^{1/4}`.
pub fn koranyi_in_chart(t: f64, r: f64) -> f64 {
    std::f64::consts::SQRT_2 * t * stable::q_quartic(r).sqrt().sqrt()
}

/// Numerical Jacobian of `Φ` by central differences.
pub fn jacobian(c: GeodesicCoordinates, h: f64) -> Matrix3<f64> {
    let base = [c.t, c.theta, c.r];
    let mut j = Matrix3::zeros();
    for col in 0..3 {
        let mut plus = base;
        let mut minus = base;
        plus[col] += h;
        minus[col] -= h;
        let a = exp_map_raw(plus[0], plus[1], plus[2]);
        let b = exp_map_raw(minus[0], minus[1], minus[2]);
        j[(0, col)] = (a.x - b.x) / (2.0 * h);
        j[(1, col)] = (a.y - b.y) / (2.0 * h);
        j[(2, col)] = (a.z - b.z) / (2.0 * h);
    }
    j
}

pub fn jacobian_det(c: GeodesicCoordinates) -> f64 {
    jacobian(c, 1e-5).determinant()
}

/// `r ↦ (r − sin r)/(4(1 − cos r))`, the ratio `z/(x² + y²)` along the chart.
fn holonomy_ratio(r: f64) -> f64 {
    r * stable::sine_defect(r) / (4.0 * stable::one_minus_cos_sq(r))
}

/// Whether the holonomy ratio is strictly increasing on a uniform grid of
/// `(0, 2π)`: the condition under which bisection inverts it.
pub fn holonomy_ratio_is_monotone(samples: usize) -> bool {
    let samples = samples.max(2);
    let mut previous = 0.0;
    (1..samples).all(|i| {
        let v = holonomy_ratio(TWO_PI * i as f64 / samples as f64);
        let ok = v > previous;
        previous = v;
        ok
    })
}

fn monotone_guard() -> bool {
    static GUARD: OnceLock<bool> = OnceLock::new();
    *GUARD.get_or_init(|| holonomy_ratio_is_monotone(10_000))
}

/// Solves `holonomy_ratio(r) = target ≥ 0` on `[0, 2π)` by bisection,
/// continuing until the bracket stops shrinking.
fn solve_holonomy(target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, TWO_PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if holonomy_ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Chart coordinates of `p`. Fails at the origin and on the vertical axis
/// `x = y = 0`, which is the image of the boundary `|r| = 2π`.
pub fn geodesic_coordinates(p: GroupPoint) -> Result<GeodesicCoordinates> {
    if !p.is_finite() {
        return Err(LabError::InvalidCoordinates("non-finite point".into()));
    }
    let rho_sq = p.horizontal_sq();
    if rho_sq == 0.0 {
        return if p.z == 0.0 {
            Err(LabError::SingularAtZero)
        } else {
            Err(LabError::InvalidCoordinates("vertical axis lies on the conjugate locus |r| = 2π".into()))
        };
    }
    if !monotone_guard() {
        return Err(LabError::DegenerateDomain("holonomy ratio is not monotone".into()));
    }
    let r = p.z.signum() * solve_holonomy(p.z.abs() / rho_sq);
    let r = if p.z == 0.0 { 0.0 } else { r };
    let t = rho_sq.sqrt() / stable::sinc(0.5 * r);
    let theta = p.y.atan2(p.x) - 0.5 * r;
    GeodesicCoordinates::new(t, theta, r)
}

/// Sub-Riemannian distance from the origin.
pub fn distance_from_origin(p: GroupPoint) -> f64 {
    let rho_sq = p.horizontal_sq();
    if p.z == 0.0 {
        return rho_sq.sqrt();
    }
    if rho_sq == 0.0 {
        return 2.0 * (PI * p.z.abs()).sqrt();
    }
    let r = solve_holonomy(p.z.abs() / rho_sq);
    rho_sq.sqrt() / stable::sinc(0.5 * r)
}

/// `∇_H δ` and its horizontal rotation by `π/2`, as `(t, θ, r)` components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientFrame {
    pub radial: [f64; 3],
    /// `None` at `r = 0`, where the chart expression is singular.
    pub perpendicular: Option<[f64; 3]>,
}

/// `∇_H δ = ∂_t + (r/t) ∂_r` and
/// `(∇_H δ)^⊥ = (r/t)(r − sin r)/(r sin r + 2cos r − 2) ∂_θ + (r/t) w(r) ∂_r`.
pub fn gradient_frame(c: GeodesicCoordinates) -> GradientFrame {
    let radial = [1.0, 0.0, c.r / c.t];
    let perpendicular = (c.r != 0.0).then(|| {
        // r (r − sin r)/(r sin r + 2 cos r − 2) = −(sine_defect)/(mu)
        let theta_coeff = -stable::sine_defect(c.r) / stable::mu(c.r) / c.t;
        let r_coeff = 1.0 / (c.t * stable::cot_defect(c.r));
        [0.0, theta_coeff, r_coeff]
    });
    GradientFrame { radial, perpendicular }
}

/// Splits a tangent vector `v` at `p` as `a X_H + b Y_H + c Z_H`; returns
/// `(a, b, c)`. Horizontal vectors have `c = 0`.
pub fn frame_components(p: GroupPoint, v: [f64; 3]) -> [f64; 3] {
    let (a, b) = (v[0], v[1]);
    [a, b, v[2] + 0.5 * p.y * a - 0.5 * p.x * b]
}

/// Pushes chart components forward through the numerical Jacobian.
pub fn pushforward(c: GeodesicCoordinates, v: [f64; 3]) -> [f64; 3] {
    pushforward_with_step(c, v, 1e-5)
}

pub fn pushforward_with_step(c: GeodesicCoordinates, v: [f64; 3], h: f64) -> [f64; 3] {
    let j = jacobian(c, h);
    let out = j * nalgebra::Vector3::new(v[0], v[1], v[2]);
    [out[0], out[1], out[2]]
}

/// Largest horizontality plus unit-speed defect along `t ↦ Φ(t, θ₀, t h₀)`
/// sampled at `samples` equispaced `t ∈ (0, t_max]`:
/// `|ż − (x ẏ − y ẋ)/2| + ||(ẋ, ẏ)| − 1|`.
pub fn geodesic_horizontality(theta0: f64, h0: f64, samples: usize, t_max: f64) -> Result<f64> {
    geodesic_horizontality_with_step(theta0, h0, samples, t_max, 1e-5)
}

/// [`geodesic_horizontality`] with an explicit difference step.
pub fn geodesic_horizontality_with_step(theta0: f64, h0: f64, samples: usize, t_max: f64, step: f64) -> Result<f64> {
    if samples == 0 || !(t_max > 0.0) || !(step > 0.0) {
        return Err(LabError::InvalidArgument("need samples ≥ 1, t_max > 0 and a positive step".into()));
    }
    if !((t_max * h0).abs() < TWO_PI) {
        return Err(LabError::InvalidCoordinates(format!("t·h0 leaves (−2π, 2π) at t = {t_max}")));
    }
    let curve = |t: f64| exp_map_raw(t, theta0, t * h0);
    let h = step.min(0.5 * t_max / samples as f64);
    let mut worst = 0.0f64;
    for i in 1..=samples {
        let t = t_max * i as f64 / samples as f64;
        let (a, b, p) = (curve(t + h), curve(t - h), curve(t));
        let (dx, dy, dz) = ((a.x - b.x) / (2.0 * h), (a.y - b.y) / (2.0 * h), (a.z - b.z) / (2.0 * h));
        let defect = (dz - 0.5 * (p.x * dy - p.y * dx)).abs() + ((dx * dx + dy * dy).sqrt() - 1.0).abs();
        worst = worst.max(defect);
    }
    Ok(worst)
}
