//! Group algebra of ℍ¹ and the closed-form quantities built on it.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::quadrature::{composite_gauss_legendre, gauss_legendre, periodic_trapezoid, Rule};

/// A point `(x, y, z)` of ℍ¹.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl GroupPoint {
    pub const ORIGIN: GroupPoint = GroupPoint { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        GroupPoint { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn inverse(self) -> Self {
        group_inv(self)
    }

    pub fn koranyi(self) -> f64 {
        koranyi_norm(self)
    }

    /// Squared horizontal radius `x² + y²`.
    pub fn horizontal_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn euclidean_sq(self) -> f64 {
        self.horizontal_sq() + self.z * self.z
    }
}

impl Mul for GroupPoint {
    type Output = GroupPoint;

    fn mul(self, rhs: GroupPoint) -> GroupPoint {
        group_mul(self, rhs)
    }
}

/// `(x, y, z)·(x', y', z') = (x + x', y + y', z + z' + (xy' − x'y)/2)`.
pub fn group_mul(p: GroupPoint, q: GroupPoint) -> GroupPoint {
    GroupPoint { x: p.x + q.x, y: p.y + q.y, z: p.z + q.z + 0.5 * (p.x * q.y - q.x * p.y) }
}

pub fn group_inv(p: GroupPoint) -> GroupPoint {
    GroupPoint::new(-p.x, -p.y, -p.z)
}

/// Anisotropic dilation `(λx, λy, λ²z)`.
pub fn dilate(lambda: f64, p: GroupPoint) -> Result<GroupPoint> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(LabError::NonPositiveDilation(lambda));
    }
    Ok(GroupPoint::new(lambda * p.x, lambda * p.y, lambda * lambda * p.z))
}

/// Koranyi gauge `((x² + y²)² + 16z²)^{1/4}`, homogeneous of degree one.
pub fn koranyi_norm(p: GroupPoint) -> f64 {
    let s = p.horizontal_sq();
    (s * s + 16.0 * p.z * p.z).sqrt().sqrt()
}

/// Normalizing constant of the fundamental solution `Γ = c / N²` of `−Δ_H`
/// for the group law above.
///
/// With this normalization `∫ Γ·(−Δ_H φ) dp = φ(0)`. The often quoted value
/// `1/(8π)` belongs to the rescaled central coordinate `t = 4z` and
/// reproduces only a quarter of `φ(0)` here.
pub const FUNDAMENTAL_SOLUTION_CONSTANT: f64 = 1.0 / (2.0 * PI);

/// `Γ(p) = 1 / (2π N(p)²)`; the origin is a pole.
pub fn fundamental_solution(p: GroupPoint) -> Result<f64> {
    let n = koranyi_norm(p);
    if n == 0.0 {
        return Err(LabError::Pole);
    }
    Ok(FUNDAMENTAL_SOLUTION_CONSTANT / (n * n))
}

/// Point with Koranyi polar coordinates `(ρ, ψ, ϕ)`:
/// `x² + y² = ρ² cos ψ`, `4z = ρ² sin ψ`, `ψ ∈ [−π/2, π/2]`.
/// The Lebesgue measure reads `ρ³/4 dρ dψ dϕ` in these coordinates.
pub fn koranyi_polar(rho: f64, psi: f64, phi: f64) -> GroupPoint {
    let radial = rho * psi.cos().max(0.0).sqrt();
    GroupPoint::new(radial * phi.cos(), radial * phi.sin(), 0.25 * rho * rho * psi.sin())
}

/// Left-invariant fields `X_H = ∂x − (y/2)∂z`, `Y_H = ∂y + (x/2)∂z`, `Z_H = ∂z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    X,
    Y,
    Z,
}

impl Field {
    /// Cartesian components of the field at `p`.
    pub fn at(self, p: GroupPoint) -> [f64; 3] {
        match self {
            Field::X => [1.0, 0.0, -0.5 * p.y],
            Field::Y => [0.0, 1.0, 0.5 * p.x],
            Field::Z => [0.0, 0.0, 1.0],
        }
    }
}

/// A complex-valued function on ℍ¹. Evaluation must be deterministic.
pub trait ScalarField: Sync {
    fn eval(&self, p: GroupPoint) -> Complex64;
}

impl<F> ScalarField for F
where
    F: Fn(GroupPoint) -> Complex64 + Sync,
{
    fn eval(&self, p: GroupPoint) -> Complex64 {
        self(p)
    }
}

/// Wraps a real-valued closure as a [`ScalarField`].
pub fn real_field<F>(f: F) -> impl ScalarField
where
    F: Fn(GroupPoint) -> f64 + Sync,
{
    move |p: GroupPoint| Complex64::new(f(p), 0.0)
}

/// Central finite-difference stencil for the fields and the sub-Laplacian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub h: f64,
    /// Combine steps `h` and `h/2` to cancel the leading `h²` error term.
    pub richardson: bool,
}

impl Default for Stencil {
    fn default() -> Self {
        Stencil { h: 1e-4, richardson: false }
    }
}

impl Stencil {
    pub fn new(h: f64) -> Self {
        Stencil { h, richardson: false }
    }

    pub fn with_richardson(mut self) -> Self {
        self.richardson = true;
        self
    }

    fn extrapolate(&self, rule: impl Fn(f64) -> Complex64) -> Complex64 {
        if self.richardson {
            let coarse = rule(self.h);
            let fine = rule(0.5 * self.h);
            (4.0 * fine - coarse) / 3.0
        } else {
            rule(self.h)
        }
    }

    /// Applies `X_H`, `Y_H` or `Z_H` to `f` at `p`.
    ///
    /// The difference is taken along the right translate `p·(±h e)`, which is
    /// the straight line through `p` tangent to the field.
    pub fn apply_field<F: ScalarField + ?Sized>(&self, which: Field, f: &F, p: GroupPoint) -> Complex64 {
        self.extrapolate(|h| {
            let step = match which {
                Field::X => GroupPoint::new(h, 0.0, 0.0),
                Field::Y => GroupPoint::new(0.0, h, 0.0),
                Field::Z => GroupPoint::new(0.0, 0.0, h),
            };
            let fwd = f.eval(p * step);
            let bwd = f.eval(p * group_inv(step));
            (fwd - bwd) / (2.0 * h)
        })
    }

    /// Applies `Δ_H = ∂x² + ∂y² + ((x² + y²)/4)∂z² + (x∂y − y∂x)∂z` to `f` at `p`.
    pub fn apply_sublaplacian<F: ScalarField + ?Sized>(&self, f: &F, p: GroupPoint) -> Complex64 {
        self.extrapolate(|h| {
            let at = |dx: f64, dy: f64, dz: f64| f.eval(GroupPoint::new(p.x + dx, p.y + dy, p.z + dz));
            let centre = at(0.0, 0.0, 0.0);
            let h2 = h * h;
            let fxx = (at(h, 0.0, 0.0) - 2.0 * centre + at(-h, 0.0, 0.0)) / h2;
            let fyy = (at(0.0, h, 0.0) - 2.0 * centre + at(0.0, -h, 0.0)) / h2;
            let fzz = (at(0.0, 0.0, h) - 2.0 * centre + at(0.0, 0.0, -h)) / h2;
            let fxz = (at(h, 0.0, h) - at(h, 0.0, -h) - at(-h, 0.0, h) + at(-h, 0.0, -h)) / (4.0 * h2);
            let fyz = (at(0.0, h, h) - at(0.0, h, -h) - at(0.0, -h, h) + at(0.0, -h, -h)) / (4.0 * h2);
            fxx + fyy + 0.25 * p.horizontal_sq() * fzz + p.x * fyz - p.y * fxz
        })
    }

    /// `(X_H Y_H − Y_H X_H) f` by nested differences.
    pub fn apply_commutator<F: ScalarField + ?Sized>(&self, f: &F, p: GroupPoint) -> Complex64 {
        let yf = |q: GroupPoint| self.apply_field(Field::Y, f, q);
        let xf = |q: GroupPoint| self.apply_field(Field::X, f, q);
        self.apply_field(Field::X, &yf, p) - self.apply_field(Field::Y, &xf, p)
    }

    /// `X_H X_H f + Y_H Y_H f` by nested differences.
    pub fn apply_sum_of_squares<F: ScalarField + ?Sized>(&self, f: &F, p: GroupPoint) -> Complex64 {
        let xf = |q: GroupPoint| self.apply_field(Field::X, f, q);
        let yf = |q: GroupPoint| self.apply_field(Field::Y, f, q);
        self.apply_field(Field::X, &xf, p) + self.apply_field(Field::Y, &yf, p)
    }
}

/// Free-function form of [`Stencil::apply_field`] with the default step.
pub fn apply_field<F: ScalarField + ?Sized>(which: Field, f: &F, p: GroupPoint) -> Complex64 {
    Stencil::default().apply_field(which, f, p)
}

/// Free-function form of [`Stencil::apply_sublaplacian`] with the default step.
pub fn apply_sublaplacian<F: ScalarField + ?Sized>(f: &F, p: GroupPoint) -> Complex64 {
    Stencil::default().apply_sublaplacian(f, p)
}

/// Node layout for integrals in Koranyi polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarQuadrature {
    /// Gauss–Legendre panels per unit of `ln ρ`.
    pub panels_per_unit: usize,
    pub radial_order: usize,
    pub psi_nodes: usize,
    pub phi_nodes: usize,
}

impl Default for PolarQuadrature {
    fn default() -> Self {
        PolarQuadrature { panels_per_unit: 2, radial_order: 12, psi_nodes: 32, phi_nodes: 32 }
    }
}

impl PolarQuadrature {
    pub fn refined(self) -> Self {
        PolarQuadrature {
            panels_per_unit: self.panels_per_unit * 2,
            radial_order: self.radial_order,
            psi_nodes: self.psi_nodes * 2,
            phi_nodes: self.phi_nodes * 2,
        }
    }

    fn radial_rule(&self, rho_lo: f64, rho_hi: f64) -> Rule {
        let (s_lo, s_hi) = (rho_lo.ln(), rho_hi.ln());
        let panels = ((s_hi - s_lo) * self.panels_per_unit as f64).ceil().max(1.0) as usize;
        let mut rule = composite_gauss_legendre(s_lo, s_hi, panels, self.radial_order);
        // ρ = e^s, dρ = ρ ds
        for point in rule.points.iter_mut() {
            let rho = point.0.exp();
            *point = (rho, point.1 * rho);
        }
        rule
    }

    /// ψ = (π/2)(3v − v³)/2 flattens the `√cos ψ` endpoint behaviour.
    fn psi_rule(&self) -> Rule {
        let base = gauss_legendre(-1.0, 1.0, self.psi_nodes);
        Rule {
            points: base
                .points
                .iter()
                .map(|&(v, w)| (0.25 * PI * (3.0 * v - v * v * v), w * 0.75 * PI * (1.0 - v * v)))
                .collect(),
        }
    }

    /// `∫_{ρ_lo < N < ρ_hi} g dp`, reduced per radial node in a fixed order.
    pub fn integrate<G>(&self, rho_lo: f64, rho_hi: f64, g: G) -> Complex64
    where
        G: Fn(GroupPoint) -> Complex64 + Sync,
    {
        let radial = self.radial_rule(rho_lo, rho_hi);
        let psi = self.psi_rule();
        let phi = periodic_trapezoid(0.0, 2.0 * PI, self.phi_nodes);
        let shells: Vec<Complex64> = radial
            .points
            .par_iter()
            .map(|&(rho, w_rho)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(ps, w_ps) in &psi.points {
                    for &(ph, w_ph) in &phi.points {
                        acc += g(koranyi_polar(rho, ps, ph)) * (w_ps * w_ph);
                    }
                }
                acc * (w_rho * 0.25 * rho * rho * rho)
            })
            .collect();
        shells.into_iter().sum()
    }
}

/// `∫_{ε < N < ρ_max} Γ·(−Δ_H φ) dp`, the weak form of `−Δ_H Γ = δ₀`
/// tested against `φ`, with the Koranyi ball `N < ε` excised.
pub fn weak_identity<F: ScalarField + ?Sized>(
    phi: &F,
    eps: f64,
    rho_max: f64,
    quadrature: &PolarQuadrature,
    stencil: &Stencil,
) -> Result<Complex64> {
    if !(eps > 0.0 && eps < rho_max) {
        return Err(LabError::DegenerateDomain(format!("need 0 < ε < ρ_max, got ε = {eps}, ρ_max = {rho_max}")));
    }
    Ok(quadrature.integrate(eps, rho_max, |p| {
        let gamma = FUNDAMENTAL_SOLUTION_CONSTANT / p.koranyi().powi(2);
        -stencil.apply_sublaplacian(phi, p) * gamma
    }))
}

/// `∫_{ε < N < 1} Γ² dp` for each `ε`; grows like `ln(1/ε)/8`.
pub fn gamma_l2_blowup(epsilons: &[f64]) -> Result<Vec<f64>> {
    let decreasing = epsilons.windows(2).all(|w| w[1] < w[0]);
    if !decreasing || epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(LabError::InvalidArgument("epsilons must be strictly decreasing and inside (0, 1)".into()));
    }
    let quadrature = PolarQuadrature { panels_per_unit: 1, radial_order: 8, psi_nodes: 8, phi_nodes: 4 };
    Ok(epsilons
        .iter()
        .map(|&eps| {
            quadrature
                .integrate(eps, 1.0, |p| {
                    let g = fundamental_solution(p).unwrap_or(0.0);
                    Complex64::new(g * g, 0.0)
                })
                .re
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian(p: GroupPoint) -> Complex64 {
        Complex64::new((-(p.x * p.x + 0.5 * p.y * p.y + p.z * p.z)).exp(), 0.0)
    }

    #[test]
    fn group_law_examples() {
        let p = group_mul(GroupPoint::new(1.0, 0.0, 0.0), GroupPoint::new(0.0, 1.0, 0.0));
        assert_eq!(p, GroupPoint::new(1.0, 1.0, 0.5));
        let q = GroupPoint::new(0.4, -2.0, 7.0);
        assert_eq!(q * GroupPoint::ORIGIN, q);
        let r = GroupPoint::new(2.0, 3.0, 5.0) * GroupPoint::new(-2.0, -3.0, -5.0);
        assert_eq!(r, GroupPoint::ORIGIN);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(group_inv(GroupPoint::new(1.0, 2.0, 3.0)), GroupPoint::new(-1.0, -2.0, -3.0));
        assert_eq!(group_inv(GroupPoint::ORIGIN), GroupPoint::ORIGIN);
        let p = GroupPoint::new(0.3, -1.7, 2.2);
        assert_eq!(p * p.inverse(), GroupPoint::ORIGIN);
    }

    #[test]
    fn dilation_examples() {
        assert_eq!(dilate(2.0, GroupPoint::new(1.0, 1.0, 1.0)).unwrap(), GroupPoint::new(2.0, 2.0, 4.0));
        let p = GroupPoint::new(0.1, 0.2, 0.3);
        assert_eq!(dilate(1.0, p).unwrap(), p);
        assert!(matches!(dilate(0.0, p), Err(LabError::NonPositiveDilation(_))));
        assert!(dilate(-1.0, p).is_err());
        // a unit box maps to a 3 × 3 × 9 box
        let corner = dilate(3.0, GroupPoint::new(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(corner.x * corner.y * corner.z, 81.0);
    }

    #[test]
    fn koranyi_examples() {
        assert_eq!(koranyi_norm(GroupPoint::new(1.0, 0.0, 0.0)), 1.0);
        assert_eq!(koranyi_norm(GroupPoint::new(0.0, 0.0, 1.0)), 2.0);
        let p = GroupPoint::new(1.0, -1.0, 0.3);
        let scaled = koranyi_norm(dilate(2.5, p).unwrap());
        assert_relative_eq!(scaled, 2.5 * koranyi_norm(p), max_relative = 1e-15);
    }

    #[test]
    fn fundamental_solution_values() {
        let c = FUNDAMENTAL_SOLUTION_CONSTANT;
        assert_relative_eq!(fundamental_solution(GroupPoint::new(1.0, 0.0, 0.0)).unwrap(), c);
        assert_relative_eq!(fundamental_solution(GroupPoint::new(0.0, 0.0, 1.0)).unwrap(), c / 4.0);
        assert_eq!(fundamental_solution(GroupPoint::ORIGIN), Err(LabError::Pole));
    }

    #[test]
    fn polar_coordinates_have_the_right_gauge_and_volume() {
        let p = koranyi_polar(1.7, 0.4, 2.0);
        assert_relative_eq!(koranyi_norm(p), 1.7, max_relative = 1e-14);
        // volume of the unit Koranyi ball is π²/8
        let q = PolarQuadrature::default();
        let vol = q.integrate(1e-6, 1.0, |_| Complex64::new(1.0, 0.0)).re;
        assert_relative_eq!(vol, PI * PI / 8.0, max_relative = 1e-9);
    }

    #[test]
    fn field_examples() {
        let z = |p: GroupPoint| Complex64::new(p.z, 0.0);
        assert_relative_eq!(apply_field(Field::X, &z, GroupPoint::new(0.0, 2.0, 0.0)).re, -1.0, epsilon = 1e-10);
        assert_relative_eq!(apply_field(Field::Y, &z, GroupPoint::new(4.0, 0.0, 0.0)).re, 2.0, epsilon = 1e-10);
        assert_relative_eq!(apply_field(Field::Z, &z, GroupPoint::new(4.0, 1.0, 0.0)).re, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn sublaplacian_examples() {
        let one = |_: GroupPoint| Complex64::new(1.0, 0.0);
        assert_eq!(apply_sublaplacian(&one, GroupPoint::new(0.3, 0.1, -2.0)).norm(), 0.0);
        let quad = |p: GroupPoint| Complex64::new(p.horizontal_sq(), 0.0);
        let v = apply_sublaplacian(&quad, GroupPoint::new(0.7, -1.2, 0.4));
        assert_relative_eq!(v.re, 4.0, epsilon = 1e-6);
    }

    #[test]
    fn commutator_gives_z_field() {
        let s = Stencil::new(1e-3);
        for p in [GroupPoint::new(0.2, -0.4, 0.3), GroupPoint::new(-1.0, 0.5, 0.1)] {
            let lhs = s.apply_commutator(&gaussian, p);
            let rhs = s.apply_field(Field::Z, &gaussian, p);
            assert!((lhs - rhs).norm() < 1e-5, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn sublaplacian_equals_sum_of_squares() {
        let s = Stencil::new(1e-3);
        let p = GroupPoint::new(0.5, 0.3, -0.2);
        let a = s.apply_sublaplacian(&gaussian, p);
        let b = s.apply_sum_of_squares(&gaussian, p);
        assert!((a - b).norm() < 1e-5);
    }

    #[test]
    fn richardson_improves_commutator() {
        let p = GroupPoint::new(0.6, -0.3, 0.2);
        let exact = Stencil::new(1e-3).apply_field(Field::Z, &gaussian, p);
        let plain = (Stencil::new(0.05).apply_commutator(&gaussian, p) - exact).norm();
        let extrapolated = (Stencil::new(0.05).with_richardson().apply_commutator(&gaussian, p) - exact).norm();
        assert!(extrapolated < 0.1 * plain, "{extrapolated} vs {plain}");
    }

    #[test]
    fn blowup_rejects_bad_sequences() {
        assert!(gamma_l2_blowup(&[0.1, 0.2]).is_err());
        assert!(gamma_l2_blowup(&[0.0]).is_err());
        let single = gamma_l2_blowup(&[0.5]).unwrap();
        assert!(single[0] > 0.0 && single[0].is_finite());
    }

    #[test]
    fn blowup_matches_log_oracle() {
        // Γ² = 1/(4π²ρ⁴), angular volume π²/2: the shell integral is ln(1/ε)/8
        let eps = [0.5, 0.25, 0.125, 0.0625];
        let values = gamma_l2_blowup(&eps).unwrap();
        for (e, v) in eps.iter().zip(&values) {
            assert_relative_eq!(*v, (1.0 / e).ln() / 8.0, max_relative = 1e-10);
        }
    }
}
