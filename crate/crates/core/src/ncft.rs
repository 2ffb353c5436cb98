//! Non-commutative Fourier transform of ℍ¹ in the rescaled Hermite basis.
//!
//! The Schrödinger representation at frequency `λ ≠ 0` acts on L²(ℝ) by
//! `(𝔛^λ_{(x,y,z)} u)(ξ) = e^{iλ(z − yξ + xy/2)} u(ξ − x)`, and its matrix
//! coefficients are `𝔛_p(n, m, λ) = (𝔛^λ_p H_{m,λ} | H_{n,λ})`. A function is
//! represented by `f̃^λ(n, m) = ∫ f(p) 𝔛_{p⁻¹}(n, m, λ) dp` on a truncated
//! grid of Hermite indices and λ-nodes.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::group::{GroupPoint, ScalarField};
use crate::hermite::HermiteBasisSpec;
use crate::quadrature::{gauss_legendre, scaled_gauss_hermite, Rule};

/// Density of the Plancherel measure, `|λ| dλ / (4π²)`, for the representation
/// above: with it `‖f̃‖ = ‖f‖_{L²}`.
pub const PLANCHEREL_DENSITY: f64 = 1.0 / (4.0 * PI * PI);

/// Truncated `(n, m, λ)` grid with Plancherel-weighted λ-nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    truncation: usize,
    lambda_nodes: Vec<f64>,
    lambda_weights: Vec<f64>,
}

impl SpectralGrid {
    pub fn new(truncation: usize, lambda_nodes: Vec<f64>, lambda_weights: Vec<f64>) -> Result<Self> {
        if truncation == 0 {
            return Err(LabError::Truncation { min: 1, got: 0 });
        }
        if lambda_nodes.is_empty() {
            return Err(LabError::InvalidGrid("no λ-nodes".into()));
        }
        if lambda_nodes.len() != lambda_weights.len() {
            return Err(LabError::InvalidGrid("node and weight counts differ".into()));
        }
        if lambda_nodes.iter().any(|&l| l == 0.0 || !l.is_finite()) {
            return Err(LabError::InvalidGrid("λ-nodes must be finite and nonzero".into()));
        }
        if lambda_nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::InvalidGrid("λ-nodes must be strictly increasing".into()));
        }
        if lambda_weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(LabError::InvalidGrid("λ-weights must be positive".into()));
        }
        let k = lambda_nodes.len();
        let symmetric = (0..k).all(|i| {
            let (a, b) = (lambda_nodes[i], -lambda_nodes[k - 1 - i]);
            (a - b).abs() <= 1e-12 * a.abs()
        });
        if !symmetric {
            return Err(LabError::InvalidGrid("λ-nodes must be symmetric about 0".into()));
        }
        Ok(SpectralGrid { truncation, lambda_nodes, lambda_weights })
    }

    /// `nodes_per_side` geometric nodes on `[λ_min, λ_max]`, mirrored to the
    /// negative axis, with trapezoidal weights times the Plancherel density.
    pub fn geometric(truncation: usize, lambda_min: f64, lambda_max: f64, nodes_per_side: usize) -> Result<Self> {
        if !(lambda_min > 0.0 && lambda_max > lambda_min) {
            return Err(LabError::InvalidGrid(format!("need 0 < λ_min < λ_max, got {lambda_min}, {lambda_max}")));
        }
        if nodes_per_side < 2 {
            return Err(LabError::InvalidGrid("at least two nodes per side".into()));
        }
        let ratio = (lambda_max / lambda_min).ln() / (nodes_per_side - 1) as f64;
        let positive: Vec<f64> = (0..nodes_per_side).map(|i| lambda_min * (ratio * i as f64).exp()).collect();
        let mut trap = vec![0.0; nodes_per_side];
        for i in 0..nodes_per_side - 1 {
            let gap = positive[i + 1] - positive[i];
            trap[i] += 0.5 * gap;
            trap[i + 1] += 0.5 * gap;
        }
        let mut nodes = Vec::with_capacity(2 * nodes_per_side);
        let mut weights = Vec::with_capacity(2 * nodes_per_side);
        for i in (0..nodes_per_side).rev() {
            nodes.push(-positive[i]);
            weights.push(trap[i] * positive[i] * PLANCHEREL_DENSITY);
        }
        for i in 0..nodes_per_side {
            nodes.push(positive[i]);
            weights.push(trap[i] * positive[i] * PLANCHEREL_DENSITY);
        }
        SpectralGrid::new(truncation, nodes, weights)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn lambda_nodes(&self) -> &[f64] {
        &self.lambda_nodes
    }

    pub fn lambda_weights(&self) -> &[f64] {
        &self.lambda_weights
    }

    pub fn len(&self) -> usize {
        self.lambda_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda_nodes.is_empty()
    }

    /// Index of the node `−λ_k`.
    pub fn mirror(&self, k: usize) -> usize {
        self.lambda_nodes.len() - 1 - k
    }

    pub fn with_truncation(&self, truncation: usize) -> Result<Self> {
        SpectralGrid::new(truncation, self.lambda_nodes.clone(), self.lambda_weights.clone())
    }
}

/// Dense coefficient tensor `f̃^{λ_k}(n, m)`, row-major in `(n, m, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    grid: SpectralGrid,
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SpectralDocument {
    truncation: usize,
    lambda_nodes: Vec<f64>,
    lambda_weights: Vec<f64>,
    values: Vec<[f64; 2]>,
}

impl SpectralCoefficients {
    pub fn zeros(grid: SpectralGrid) -> Self {
        let len = grid.truncation * grid.truncation * grid.len();
        SpectralCoefficients { grid, values: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn from_values(grid: SpectralGrid, values: Vec<Complex64>) -> Result<Self> {
        let len = grid.truncation * grid.truncation * grid.len();
        if values.len() != len {
            return Err(LabError::InvalidGrid(format!("expected {len} values, got {}", values.len())));
        }
        Ok(SpectralCoefficients { grid, values })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn index(&self, n: usize, m: usize, k: usize) -> usize {
        (n * self.grid.truncation + m) * self.grid.len() + k
    }

    pub fn get(&self, n: usize, m: usize, k: usize) -> Complex64 {
        self.values[self.index(n, m, k)]
    }

    pub fn set(&mut self, n: usize, m: usize, k: usize, v: Complex64) {
        let i = self.index(n, m, k);
        self.values[i] = v;
    }

    /// `a·self + b·other` on a shared grid.
    pub fn combine(&self, a: Complex64, other: &SpectralCoefficients, b: Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(LabError::InvalidGrid("grids differ".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(SpectralCoefficients { grid: self.grid.clone(), values })
    }

    pub fn to_json(&self) -> String {
        let doc = SpectralDocument {
            truncation: self.grid.truncation,
            lambda_nodes: self.grid.lambda_nodes.clone(),
            lambda_weights: self.grid.lambda_weights.clone(),
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
        };
        serde_json::to_string(&doc).expect("coefficient document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpectralDocument = serde_json::from_str(text).map_err(|e| LabError::InvalidArgument(e.to_string()))?;
        let grid = SpectralGrid::new(doc.truncation, doc.lambda_nodes, doc.lambda_weights)?;
        let values = doc.values.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        SpectralCoefficients::from_values(grid, values)
    }
}

fn xi_order_for(n: usize, m: usize) -> usize {
    96.max(n + m + 32)
}

/// All coefficients `𝔛_p(n, m, λ)`, `n, m < truncation`, by a Gauss–Hermite
/// rule centred on the envelope of `H_{m,λ}(ξ − x) H_{n,λ}(ξ)`.
pub fn rep_matrix(p: GroupPoint, lambda: f64, truncation: usize, xi_order: usize) -> Result<DMatrix<Complex64>> {
    let spec = HermiteBasisSpec::new(lambda, truncation)?;
    let sq = lambda.abs().sqrt();
    let rule = scaled_gauss_hermite(xi_order);
    let mut out = DMatrix::from_element(truncation, truncation, Complex64::new(0.0, 0.0));
    for &(s, w) in &rule.points {
        let xi = 0.5 * p.x + s / sq;
        let phase = Complex64::from_polar(w / sq, lambda * (p.z - p.y * xi + 0.5 * p.x * p.y));
        let hn = spec.functions_at(xi);
        let hm = spec.functions_at(xi - p.x);
        for (n, a) in hn.iter().enumerate() {
            let row = phase * *a;
            for (m, b) in hm.iter().enumerate() {
                out[(n, m)] += row * *b;
            }
        }
    }
    Ok(out)
}

/// `𝔛_p(n, m, λ) = ∫ e^{iλ(z − yξ + xy/2)} H_{m,λ}(ξ − x) H_{n,λ}(ξ) dξ`.
pub fn rep_coefficient(p: GroupPoint, n: usize, m: usize, lambda: f64) -> Result<Complex64> {
    let size = n.max(m) + 1;
    Ok(rep_matrix(p, lambda, size, xi_order_for(n, m))?[(n, m)])
}

/// Tensor-product quadrature over the cube `[−half_width, half_width]³`
/// with a Gauss–Hermite rule in ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformQuadrature {
    pub half_width: f64,
    pub spatial_nodes: usize,
    pub xi_nodes: usize,
}

impl Default for TransformQuadrature {
    fn default() -> Self {
        TransformQuadrature { half_width: 6.0, spatial_nodes: 64, xi_nodes: 64 }
    }
}

impl TransformQuadrature {
    fn validate(&self) -> Result<Rule> {
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(LabError::DegenerateDomain(format!("half width {}", self.half_width)));
        }
        if self.spatial_nodes == 0 || self.xi_nodes == 0 {
            return Err(LabError::DegenerateDomain("quadrature needs at least one node per axis".into()));
        }
        Ok(gauss_legendre(-self.half_width, self.half_width, self.spatial_nodes))
    }
}

/// `f̃^{λ_k}(n, m) = ∫ f(p) 𝔛_{p⁻¹}(n, m, λ_k) dp`.
///
/// The integral is organised as `z`, then `y`, then `(x, ξ)`: the `z`
/// dependence of `𝔛_{p⁻¹}` is the phase `e^{−iλz}` and the `y` dependence is
/// `e^{iλy(ξ + x/2)}`. Each λ-node is an independent task whose reduction
/// order is fixed, so results do not depend on scheduling.
pub fn forward_transform<F: ScalarField + ?Sized>(
    f: &F,
    grid: &SpectralGrid,
    quadrature: &TransformQuadrature,
) -> Result<SpectralCoefficients> {
    let axis = quadrature.validate()?;
    let q = axis.len();
    let n_trunc = grid.truncation;
    let samples: Vec<Complex64> = (0..q * q * q)
        .into_par_iter()
        .map(|idx| {
            let (ix, iy, iz) = (idx / (q * q), (idx / q) % q, idx % q);
            f.eval(GroupPoint::new(axis.points[ix].0, axis.points[iy].0, axis.points[iz].0))
        })
        .collect();
    let xi_rule = scaled_gauss_hermite(quadrature.xi_nodes);

    let per_lambda: Vec<DMatrix<Complex64>> = grid
        .lambda_nodes
        .par_iter()
        .map(|&lambda| {
            let sq = lambda.abs().sqrt();
            let spec = HermiteBasisSpec::new(lambda, n_trunc).expect("grid nodes are nonzero");
            // ∫ f e^{−iλz} dz, pre-multiplied by the y weight
            let z_phase: Vec<Complex64> =
                axis.points.iter().map(|&(z, w)| Complex64::from_polar(w, -lambda * z)).collect();
            let mut slab = vec![Complex64::new(0.0, 0.0); q * q];
            for ix in 0..q {
                for iy in 0..q {
                    let base = (ix * q + iy) * q;
                    let acc: Complex64 = (0..q).map(|iz| samples[base + iz] * z_phase[iz]).sum();
                    slab[ix * q + iy] = acc * axis.points[iy].1;
                }
            }
            // e^{iλy(ξ + x/2)} with ξ + x/2 = s/√|λ|
            let y_phase: Vec<Vec<Complex64>> = xi_rule
                .points
                .iter()
                .map(|&(s, _)| {
                    axis.points.iter().map(|&(y, _)| Complex64::from_polar(1.0, lambda.signum() * sq * y * s)).collect()
                })
                .collect();
            let mut out = DMatrix::from_element(n_trunc, n_trunc, Complex64::new(0.0, 0.0));
            for ix in 0..q {
                let (x, wx) = axis.points[ix];
                let row = &slab[ix * q..(ix + 1) * q];
                for (j, &(s, w)) in xi_rule.points.iter().enumerate() {
                    let g: Complex64 = row.iter().zip(&y_phase[j]).map(|(a, b)| a * b).sum();
                    let xi = -0.5 * x + s / sq;
                    let weight = g * (wx * w / sq);
                    let hn = spec.functions_at(xi);
                    let hm = spec.functions_at(xi + x);
                    for (n, a) in hn.iter().enumerate() {
                        let left = weight * *a;
                        for (m, b) in hm.iter().enumerate() {
                            out[(n, m)] += left * *b;
                        }
                    }
                }
            }
            out
        })
        .collect();

    let mut coefficients = SpectralCoefficients::zeros(grid.clone());
    for (k, block) in per_lambda.iter().enumerate() {
        for n in 0..n_trunc {
            for m in 0..n_trunc {
                coefficients.set(n, m, k, block[(n, m)]);
            }
        }
    }
    Ok(coefficients)
}

/// Synthesis `Σ_{n,m,k} c(n,m,k) · conj(𝔛_{p⁻¹}(n,m,λ_k)) · w_k`.
///
/// The conjugate makes this the adjoint of [`forward_transform`] for the
/// sesquilinear L² pairing, so it inverts the transform on the truncated
/// grid. Without it the sum is the bilinear distributional pairing, which
/// agrees only where the matrix coefficients are real.
pub fn inverse_transform(c: &SpectralCoefficients, p: GroupPoint) -> Complex64 {
    let grid = c.grid();
    let n_trunc = grid.truncation;
    let terms: Vec<Complex64> = grid
        .lambda_nodes
        .par_iter()
        .enumerate()
        .map(|(k, &lambda)| {
            let block = rep_matrix(p.inverse(), lambda, n_trunc, xi_order_for(n_trunc, n_trunc))
                .expect("grid nodes are nonzero");
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..n_trunc {
                for m in 0..n_trunc {
                    acc += c.get(n, m, k) * block[(n, m)].conj();
                }
            }
            acc * grid.lambda_weights[k]
        })
        .collect();
    terms.into_iter().sum()
}

/// `(Σ |c(n,m,k)|² w_k)^{1/2}`.
pub fn plancherel_norm(c: &SpectralCoefficients) -> f64 {
    let grid = c.grid();
    let mut total = 0.0;
    for n in 0..grid.truncation {
        for m in 0..grid.truncation {
            for (k, w) in grid.lambda_weights.iter().enumerate() {
                total += c.get(n, m, k).norm_sqr() * w;
            }
        }
    }
    total.sqrt()
}

/// Multiplies cell `(n, m, k)` by `|λ_k|(2n + 1) + shift`: the symbol of
/// `−Δ_H + shift`.
pub fn sublaplacian_multiplier(c: &SpectralCoefficients, shift: Complex64) -> SpectralCoefficients {
    let mut out = c.clone();
    let grid = c.grid().clone();
    for n in 0..grid.truncation {
        for m in 0..grid.truncation {
            for (k, &lambda) in grid.lambda_nodes.iter().enumerate() {
                let factor = lambda.abs() * (2 * n + 1) as f64 + shift;
                out.set(n, m, k, c.get(n, m, k) * factor);
            }
        }
    }
    out
}

/// `‖f‖_{L²}` over the transform box by the same spatial rule.
pub fn direct_l2_norm<F: ScalarField + ?Sized>(f: &F, quadrature: &TransformQuadrature) -> Result<f64> {
    let axis = quadrature.validate()?;
    let total: f64 = axis
        .points
        .par_iter()
        .map(|&(x, wx)| {
            let mut acc = 0.0;
            for &(y, wy) in &axis.points {
                for &(z, wz) in &axis.points {
                    acc += f.eval(GroupPoint::new(x, y, z)).norm_sqr() * wy * wz;
                }
            }
            acc * wx
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(total.sqrt())
}
