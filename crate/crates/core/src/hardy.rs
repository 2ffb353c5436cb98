//! Hardy-type quotients on ℍ¹ in the exponential chart.
//!
//! With `γ_α(r) = (4q(r)/r⁴)^{α/4}`, `q(r) = r² − 2r sin r − 2cos r + 2`,
//! the Koranyi norm satisfies `N^α/δ² = t^{α−2} γ_α(r)` and
//! `|∇_H N^{α/2}|² = (α²/4) t^{α−2} γ_α(r) η(r)` with
//! `η(r) = r²(1 − cos r)/(2q(r))`. The trial functions `u_α = N^{α/2}`, cut
//! off near the origin, give an upper bound for the Hardy constant
//!
//! ```text
//! C_H = inf ∫|∇_H u|² / ∫ u²/δ²
//! ```
//!
//! which tends to `∫γ_{−2}ημ / ∫γ_{−2}μ` as `α → −2⁻`.
//!
//! The second half of the module checks the Koranyi-weight inequality
//! `∫|∇_H u|² ≥ ∫ u² |∇_H N|²/N²` on a family of test functions.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geodesics::{exp_map_raw, koranyi_in_chart, stable};
use crate::group::{koranyi_norm, Field, GroupPoint, Stencil};
use crate::quadrature::{composite_gauss_legendre, gauss_legendre, periodic_trapezoid, Rule};

const TWO_PI: f64 = 2.0 * PI;

/// The upper bound for `C_H` quoted in the literature this module reproduces.
pub const CLAIMED_BOUND: f64 = 0.798;
/// Acceptance threshold for the computed ratio.
pub const BOUND_TOLERANCE: f64 = 0.7985;
/// Exponents used to show the approach of the quotient to its limit.
pub const ALPHA_SWEEP: [f64; 6] = [-2.9, -2.5, -2.2, -2.1, -2.05, -2.01];

const PANEL_ORDER: usize = 8;

/// `γ_α(r) = 2^{α/2} (q(r)^{1/4}/r)^α`, equal to 1 at `r = 0`.
pub fn gamma_alpha(alpha: f64, r: f64) -> f64 {
    (4.0 * stable::q_quartic(r)).powf(0.25 * alpha)
}

/// `η(r) = r²(1 − cos r)/(2q(r))`.
pub fn eta(r: f64) -> f64 {
    stable::one_minus_cos_sq(r) / (2.0 * stable::q_quartic(r))
}

/// `|∇_H N|²` at chart angle `r`: `(1 − cos r)/√q(r)`.
pub fn koranyi_gradient_sq(r: f64) -> f64 {
    stable::one_minus_cos_sq(r) / stable::q_quartic(r).sqrt()
}

/// Quintic smoothstep: 0 below `1/2`, 1 above 1.
pub fn cutoff(t: f64) -> f64 {
    let s = ((t - 0.5) / 0.5).clamp(0.0, 1.0);
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

pub fn cutoff_derivative(t: f64) -> f64 {
    let s = ((t - 0.5) / 0.5).clamp(0.0, 1.0);
    2.0 * 30.0 * s * s * (1.0 - s) * (1.0 - s)
}

fn r_rule(nodes: usize) -> Rule {
    let panels = nodes.div_ceil(PANEL_ORDER).max(1);
    composite_gauss_legendre(-TWO_PI, TWO_PI, panels, PANEL_ORDER)
}

/// `(∫γ_αμ, ∫γ_αημ)` over `(−2π, 2π)`.
fn angular_integrals(alpha: f64, rule: &Rule) -> (f64, f64) {
    let terms: Vec<(f64, f64)> = rule
        .points
        .par_iter()
        .map(|&(r, w)| {
            let base = w * gamma_alpha(alpha, r) * stable::mu(r);
            (base, base * eta(r))
        })
        .collect();
    terms.into_iter().fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub ratio: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub quadrature_nodes: usize,
    pub alpha_sweep: Vec<SweepPoint>,
    pub bound_claimed: f64,
    /// `|ratio(2·nodes) − ratio(nodes)|`.
    pub refinement_delta: f64,
    /// At least 64 nodes and a refinement change below `1e−8`.
    pub converged: bool,
}

impl HardyReport {
    /// `ratio ≤ 0.7985`, which also puts it below 1.
    pub fn within_bound(&self) -> bool {
        self.ratio <= BOUND_TOLERANCE
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn sweep_csv(&self) -> String {
        let mut out = String::from("alpha,quotient\n");
        for p in &self.alpha_sweep {
            out.push_str(&format!("{:.16e},{:.16e}\n", p.alpha, p.quotient));
        }
        out
    }
}

fn limit_ratio(nodes: usize) -> (f64, f64, usize) {
    let rule = r_rule(nodes);
    let (den, num) = angular_integrals(-2.0, &rule);
    (num, den, rule.len())
}

/// `∫γ_{−2}ημ / ∫γ_{−2}μ` on composite 8-point Gauss–Legendre panels with
/// about `nodes` points, plus the α-sweep at the same resolution.
///
/// Fewer than 64 nodes still produce a report, flagged as not converged.
pub fn hardy_ratio(nodes: usize) -> Result<HardyReport> {
    if nodes == 0 {
        return Err(LabError::InvalidArgument("need at least one node".into()));
    }
    let (numerator, denominator, used) = limit_ratio(nodes);
    let (num2, den2, _) = limit_ratio(2 * used);
    let ratio = numerator / denominator;
    let refinement_delta = (num2 / den2 - ratio).abs();
    let alpha_sweep = ALPHA_SWEEP
        .iter()
        .map(|&alpha| Ok(SweepPoint { alpha, quotient: quotient_for_alpha(alpha, 1.0, used)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(HardyReport {
        ratio,
        numerator,
        denominator,
        quadrature_nodes: used,
        alpha_sweep,
        bound_claimed: CLAIMED_BOUND,
        refinement_delta,
        converged: used >= 64 && refinement_delta < 1e-8,
    })
}

/// Relative size of the neglected tail `∫_{T_max}^∞ t^{α+1} dt`.
const TAIL_TOLERANCE: f64 = 1e-10;

/// `∫_c^{T_max} t^{α+1} dt` in `s = ln t`, with `T_max` chosen so the tail
/// is below [`TAIL_TOLERANCE`] relative to the whole integral.
pub fn outer_radial_integral(alpha: f64, c: f64) -> f64 {
    let rate = alpha + 2.0;
    let span = TAIL_TOLERANCE.ln() / rate;
    let s0 = c.ln();
    composite_gauss_legendre(s0, s0 + span, 32, 16).integrate(|s| (rate * s).exp())
}

/// Quotient `∫|∇_H u_α|² / ∫ u_α²/δ²` for the trial function
/// `u_α = χ(t/c) c^{α/2} N^{α/2}(1, θ, r)` for `t ≤ c`, `N^{α/2}` beyond.
///
/// Writing `n(r) = √γ_α(r)`, one has `r n'(r) = (α/2)(η − 1) n`, so in the
/// frame `(∇_H δ, (∇_H δ)^⊥)` the cutoff region contributes
/// `c^α γ_α [(χ'/c + (χ/t)(α/2)(η−1))² + (χ/t)²(α²/4) w²(η−1)²]`. Since
/// `w²(1−η)² = η(1−η)` the bracket is a combination of `1`, `η` with
/// t-dependent weights, and both double integrals split into products of
/// one-dimensional ones. The quotient does not depend on `c`.
pub fn quotient_for_alpha(alpha: f64, cutoff_scale: f64, nodes: usize) -> Result<f64> {
    let parts = quotient_parts(alpha, cutoff_scale, nodes)?;
    Ok(parts.numerator / parts.denominator)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientParts {
    pub numerator: f64,
    pub denominator: f64,
    /// Portion of the numerator from `t < c`.
    pub inner_numerator: f64,
}

pub fn quotient_parts(alpha: f64, cutoff_scale: f64, nodes: usize) -> Result<QuotientParts> {
    if !(-3.0..-2.0).contains(&alpha) {
        return Err(LabError::AlphaOutOfRange(alpha));
    }
    if !(cutoff_scale > 0.0) || !cutoff_scale.is_finite() {
        return Err(LabError::InvalidArgument(format!("cutoff scale must be positive, got {cutoff_scale}")));
    }
    let c = cutoff_scale;
    let (i_mu, i_eta) = angular_integrals(alpha, &r_rule(nodes));
    let outer = outer_radial_integral(alpha, c);

    let t_rule = gauss_legendre(0.5 * c, c, 16);
    let mut grad_sq = 0.0;
    let mut cross = 0.0;
    let mut value_sq = 0.0;
    for &(t, w) in &t_rule.points {
        let chi = cutoff(t / c);
        let dchi = cutoff_derivative(t / c) / c;
        grad_sq += w * t.powi(3) * dchi * dchi;
        cross += w * t * t * dchi * chi;
        value_sq += w * t * chi * chi;
    }
    let scale = c.powf(alpha);
    let inner_numerator = TWO_PI
        * scale
        * (grad_sq * i_mu + alpha * cross * (i_eta - i_mu) + 0.25 * alpha * alpha * value_sq * (i_mu - i_eta));
    let numerator = inner_numerator + TWO_PI * 0.25 * alpha * alpha * outer * i_eta;
    let denominator = TWO_PI * (outer * i_mu + scale * value_sq * i_mu);
    Ok(QuotientParts { numerator, denominator, inner_numerator })
}

/// The trial function `u_α` of [`quotient_for_alpha`] as a function on ℍ¹.
pub fn trial_function(alpha: f64, cutoff_scale: f64) -> impl Fn(GroupPoint) -> f64 + Sync {
    move |p: GroupPoint| {
        let Ok(chart) = crate::geodesics::geodesic_coordinates(p) else {
            return 0.0;
        };
        let n = gamma_alpha(alpha, chart.r).sqrt();
        if chart.t >= cutoff_scale {
            chart.t.powf(0.5 * alpha) * n
        } else {
            cutoff(chart.t / cutoff_scale) * cutoff_scale.powf(0.5 * alpha) * n
        }
    }
}

/// `|∇_H u_α|²` at chart point `(t, r)`, by the frame formula.
pub fn trial_gradient_sq(alpha: f64, cutoff_scale: f64, t: f64, r: f64) -> f64 {
    let c = cutoff_scale;
    let g = gamma_alpha(alpha, r);
    let e = eta(r);
    if t >= c {
        0.25 * alpha * alpha * t.powf(alpha - 2.0) * g * e
    } else {
        let chi = cutoff(t / c);
        let radial = cutoff_derivative(t / c) / c + chi / t * 0.5 * alpha * (e - 1.0);
        let perp_sq = (chi / t).powi(2) * 0.25 * alpha * alpha * e * (1.0 - e);
        c.powf(alpha) * g * (radial * radial + perp_sq)
    }
}

/// `(∫_{|r|>a} γ_{−2}ημ, η(a) ∫_{|r|>a} γ_{−2}μ)`: the first is strictly
/// smaller for every `a ∈ (0, 2π)`.
pub fn tail_comparison(a: f64, nodes: usize) -> Result<(f64, f64)> {
    if !(a > 0.0 && a < TWO_PI) {
        return Err(LabError::InvalidArgument(format!("a must lie in (0, 2π), got {a}")));
    }
    let panels = nodes.div_ceil(2 * PANEL_ORDER).max(1);
    let rule = composite_gauss_legendre(a, TWO_PI, panels, PANEL_ORDER);
    let (i_mu, i_eta) = angular_integrals(-2.0, &rule);
    // even integrands: the negative side doubles both
    Ok((2.0 * i_eta, eta(a) * 2.0 * i_mu))
}

/// A real test function with support inside the Koranyi annulus
/// `lower < N < upper`.
#[derive(Clone)]
pub struct TestFunction {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    f: Arc<dyn Fn(GroupPoint) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish_non_exhaustive()
    }
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        f: impl Fn(GroupPoint) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let name = name.into();
        if !(lower > 0.0) {
            return Err(LabError::SupportTouchesOrigin(name));
        }
        if !(upper > lower) || !upper.is_finite() {
            return Err(LabError::InvalidArgument(format!("{name}: empty support annulus")));
        }
        Ok(TestFunction { name, lower, upper, f: Arc::new(f) })
    }

    pub fn eval(&self, p: GroupPoint) -> f64 {
        (self.f)(p)
    }

    /// The same function multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let f = Arc::clone(&self.f);
        TestFunction {
            name: format!("{}*{k}", self.name),
            lower: self.lower,
            upper: self.upper,
            f: Arc::new(move |p| k * f(p)),
        }
    }
}

/// Smooth bump in the Koranyi norm, supported in `(a, b)`.
pub fn koranyi_bump(a: f64, b: f64) -> impl Fn(GroupPoint) -> f64 + Send + Sync + Copy {
    move |p: GroupPoint| {
        let n = koranyi_norm(p);
        if n <= a || n >= b {
            return 0.0;
        }
        let s = (2.0 * n - a - b) / (b - a);
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// `N^{-1} cos²(π ln N/(2L))` on `|ln N| < L`: a slowly varying multiple of
/// the extremal profile `N^{-1}`.
pub fn near_extremal(log_width: f64) -> impl Fn(GroupPoint) -> f64 + Send + Sync + Copy {
    move |p: GroupPoint| {
        let n = koranyi_norm(p);
        let l = n.ln();
        if l.abs() >= log_width {
            return 0.0;
        }
        (PI * l / (2.0 * log_width)).cos().powi(2) / n
    }
}

/// The ten functions checked by default.
pub fn builtin_test_functions() -> Vec<TestFunction> {
    let b = koranyi_bump(0.5, 2.0);
    let list: Vec<Result<TestFunction>> = vec![
        TestFunction::new("bump", 0.5, 2.0, b),
        TestFunction::new("bump-wide", 0.25, 4.0, koranyi_bump(0.25, 4.0)),
        TestFunction::new("bump-thin", 0.9, 1.1, koranyi_bump(0.9, 1.1)),
        TestFunction::new("bump-scaled", 0.5, 2.0, move |p| 10.0 * b(p)),
        TestFunction::new("bump-x", 0.5, 2.0, move |p| b(p) * p.x / koranyi_norm(p)),
        TestFunction::new("bump-z", 0.5, 2.0, move |p| b(p) * (1.0 + 4.0 * p.z / koranyi_norm(p).powi(2))),
        TestFunction::new("bump-cubic", 0.5, 2.0, move |p| {
            b(p) * (p.x.powi(3) - 3.0 * p.x * p.y * p.y) / koranyi_norm(p).powi(3)
        }),
        TestFunction::new("bump-skew", 0.5, 3.0, {
            let c = koranyi_bump(0.5, 3.0);
            move |p| c(p) * (1.0 + 0.5 * p.y / koranyi_norm(p)).powi(2)
        }),
        TestFunction::new("bump-gaussian", 0.5, 2.5, {
            let c = koranyi_bump(0.5, 2.5);
            move |p| c(p) * (-(p.x - 0.5).powi(2) - p.y * p.y - p.z * p.z).exp()
        }),
        TestFunction::new("near-extremal", (-6.0f64).exp(), 6.0f64.exp(), near_extremal(6.0)),
    ];
    list.into_iter().map(|t| t.expect("built-in supports avoid the origin")).collect()
}

/// Chart quadrature for [`koranyi_hardy_check`]: `ln t` on panels of width
/// `log_panel_width`, periodic trapezoid in θ, Gauss–Legendre in `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarofaloQuadrature {
    pub log_panel_width: f64,
    pub panel_order: usize,
    pub theta_nodes: usize,
    pub r_nodes: usize,
    /// Finite-difference step relative to `N(p)`.
    pub fd_step: f64,
}

impl Default for GarofaloQuadrature {
    fn default() -> Self {
        GarofaloQuadrature { log_panel_width: 0.25, panel_order: 8, theta_nodes: 32, r_nodes: 64, fd_step: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GarofaloDefect {
    pub name: String,
    /// `∫|∇_H u|²`.
    pub energy: f64,
    /// `∫u² |∇_H N|²/N²`.
    pub potential: f64,
    pub defect: f64,
}

fn garofalo_one(u: &TestFunction, quad: &GarofaloQuadrature) -> GarofaloDefect {
    // N = t κ(r) with κ between 1/√π (at |r| = 2π) and 1 (at r = 0)
    let s_lo = u.lower.ln();
    let s_hi = u.upper.ln() + 0.5 * PI.ln();
    let panels = ((s_hi - s_lo) / quad.log_panel_width).ceil().max(1.0) as usize;
    let s_rule = composite_gauss_legendre(s_lo, s_hi, panels, quad.panel_order);
    let theta_rule = periodic_trapezoid(0.0, TWO_PI, quad.theta_nodes);
    let r_rule = r_rule(quad.r_nodes);
    let field = |p: GroupPoint| Complex64::new(u.eval(p), 0.0);

    let per_r: Vec<(f64, f64)> = r_rule
        .points
        .par_iter()
        .map(|&(r, wr)| {
            let density = stable::mu(r);
            let weight_r = eta(r);
            let kappa = koranyi_in_chart(1.0, r);
            let mut energy = 0.0;
            let mut potential = 0.0;
            for &(theta, wt) in &theta_rule.points {
                for &(s, ws) in &s_rule.points {
                    let t = s.exp();
                    let n = t * kappa;
                    if n <= u.lower || n >= u.upper {
                        continue;
                    }
                    let p = exp_map_raw(t, theta, r);
                    // t³ μ dt = t⁴ μ ds
                    let w = wr * wt * ws * t.powi(4) * density;
                    let stencil = Stencil::new(quad.fd_step * n);
                    let gx = stencil.apply_field(Field::X, &field, p).re;
                    let gy = stencil.apply_field(Field::Y, &field, p).re;
                    let v = u.eval(p);
                    energy += w * (gx * gx + gy * gy);
                    potential += w * v * v * weight_r / (t * t);
                }
            }
            (energy, potential)
        })
        .collect();
    let (energy, potential) = per_r.into_iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    GarofaloDefect { name: u.name.clone(), energy, potential, defect: energy - potential }
}

/// `∫|∇_H u|² − ∫u²|∇_H N|²/N²` for each test function, integrated in the
/// exponential chart where `|∇_H N|²/N² = η(r)/t²`.
pub fn koranyi_hardy_check(tests: &[TestFunction], quad: &GarofaloQuadrature) -> Result<Vec<GarofaloDefect>> {
    if quad.theta_nodes == 0 || quad.r_nodes == 0 || quad.panel_order == 0 || !(quad.log_panel_width > 0.0) {
        return Err(LabError::DegenerateDomain("empty Garofalo quadrature".into()));
    }
    if !(quad.fd_step > 0.0) {
        return Err(LabError::InvalidArgument("finite-difference step must be positive".into()));
    }
    Ok(tests.iter().map(|u| garofalo_one(u, quad)).collect())
}
