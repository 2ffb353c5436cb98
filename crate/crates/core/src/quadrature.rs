//! Quadrature rules shared by the integration routines.
//!
//! Gauss–Legendre nodes come from the `gauss-quad` crate. Gauss–Hermite nodes
//! are taken from the same crate and then polished by Newton steps on the
//! normalized Hermite function, because the weights are needed in the scaled
//! form `wⱼ·exp(sⱼ²)`, which the eigenvector-based weights cannot deliver to
//! relative precision for the outer nodes.

use std::num::NonZeroUsize;

use gauss_quad::{GaussHermite, GaussLegendre};

use crate::hermite::hermite_functions;

/// A list of `(node, weight)` pairs on a fixed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub points: Vec<(f64, f64)>,
}

impl Rule {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.points.iter().map(|&(x, w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }
}

fn legendre_reference(order: usize) -> Vec<(f64, f64)> {
    let order = NonZeroUsize::new(order.max(1)).expect("order is at least one");
    GaussLegendre::new(order).as_node_weight_pairs().to_vec()
}

/// Gauss–Legendre rule of `order` nodes mapped onto `[a, b]`.
pub fn gauss_legendre(a: f64, b: f64, order: usize) -> Rule {
    composite_gauss_legendre(a, b, 1, order)
}

/// Composite Gauss–Legendre: `panels` equal panels with `order` nodes each.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> Rule {
    let reference = legendre_reference(order);
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut points = Vec::with_capacity(panels * reference.len());
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        for &(x, w) in &reference {
            points.push((mid + 0.5 * width * x, 0.5 * width * w));
        }
    }
    Rule { points }
}

/// Composite Gauss–Legendre over the given breakpoints (sorted ascending).
pub fn gauss_legendre_on_breaks(breaks: &[f64], order: usize) -> Rule {
    let reference = legendre_reference(order);
    let mut points = Vec::with_capacity(breaks.len().saturating_sub(1) * reference.len());
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for &(x, w) in &reference {
            points.push((mid + half * x, half * w));
        }
    }
    Rule { points }
}

/// Gauss–Hermite rule in scaled form: `∫ g(s) ds ≈ Σ Wⱼ g(sⱼ)` where
/// `Wⱼ = wⱼ·exp(sⱼ²)`, exact when `g(s)·exp(s²)` is a polynomial of degree
/// below `2·order`.
pub fn scaled_gauss_hermite(order: usize) -> Rule {
    let order = order.max(1);
    let raw = GaussHermite::new(NonZeroUsize::new(order).expect("nonzero"));
    let mut points = Vec::with_capacity(order);
    for &(s0, _) in raw.as_node_weight_pairs() {
        let mut s = s0;
        // ψ_K'(s) = √(2K) ψ_{K-1}(s) − s ψ_K(s)
        for _ in 0..3 {
            let psi = hermite_functions(order + 1, s);
            let value = psi[order];
            let slope = (2.0 * order as f64).sqrt() * psi[order - 1] - s * value;
            if slope == 0.0 {
                break;
            }
            let step = value / slope;
            s -= step;
            if step.abs() < 1e-16 * s.abs().max(1.0) {
                break;
            }
        }
        let psi = hermite_functions(order, s);
        let christoffel: f64 = psi.iter().map(|v| v * v).sum();
        points.push((s, 1.0 / christoffel));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule { points }
}

/// Trapezoid rule on a periodic interval `[a, a + period)` with `n` nodes.
pub fn periodic_trapezoid(a: f64, period: f64, n: usize) -> Rule {
    let n = n.max(1);
    let h = period / n as f64;
    Rule { points: (0..n).map(|k| (a + k as f64 * h, h)).collect() }
}
