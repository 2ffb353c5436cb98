//! Normalized and rescaled Hermite functions.
//!
//! Convention: `H_n(ξ) = (2ⁿ n! √π)^{-1/2} h_n(ξ) e^{-ξ²/2}` with `h_n` the
//! physicists' Hermite polynomial, so that `(H_n)` is orthonormal in L²(ℝ).
//! The rescaled family is `H_{n,λ}(ξ) = |λ|^{1/4} H_n(|λ|^{1/2} ξ)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{LabError, Result};

const PI_QUARTER_ROOT_INV: f64 = 0.751_125_544_464_942_5; // π^{-1/4}

/// `H_0(ξ), …, H_{count-1}(ξ)` by the normalized three-term recurrence
/// `H_{k+1} = √(2/(k+1)) ξ H_k − √(k/(k+1)) H_{k-1}`.
pub fn hermite_functions(count: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(PI_QUARTER_ROOT_INV * (-0.5 * xi * xi).exp());
    if count > 1 {
        out.push(std::f64::consts::SQRT_2 * xi * out[0]);
    }
    for k in 1..count.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

pub fn hermite_eval(n: usize, xi: f64) -> f64 {
    hermite_functions(n + 1, xi)[n]
}

pub fn rescaled_hermite_eval(n: usize, lambda: f64, xi: f64) -> Result<f64> {
    let spec = HermiteBasisSpec::new(lambda, n + 1)?;
    Ok(spec.functions_at(xi)[n])
}

/// Frequency `λ ≠ 0` and truncation `N ≥ 1` (indices `0..N`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteBasisSpec {
    lambda: f64,
    truncation: usize,
}

impl HermiteBasisSpec {
    pub fn new(lambda: f64, truncation: usize) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(LabError::ZeroFrequency);
        }
        if truncation == 0 {
            return Err(LabError::Truncation { min: 1, got: 0 });
        }
        Ok(HermiteBasisSpec { lambda, truncation })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `H_{n,λ}(ξ)` for `n < N`.
    pub fn functions_at(&self, xi: f64) -> Vec<f64> {
        let a = self.lambda.abs();
        let scale = a.sqrt().sqrt();
        let mut v = hermite_functions(self.truncation, a.sqrt() * xi);
        v.iter_mut().for_each(|h| *h *= scale);
        v
    }

    /// Matrix of multiplication by `λξ`: tridiagonal, zero diagonal, with
    /// `(m−1, m)` and `(m, m−1)` entries `sgn(λ)|λ|^{1/2}√(m/2)`.
    pub fn position_matrix(&self) -> DMatrix<f64> {
        let n = self.truncation;
        let scale = self.lambda.signum() * self.lambda.abs().sqrt();
        DMatrix::from_fn(n, n, |row, col| {
            if col == row + 1 {
                scale * (col as f64 / 2.0).sqrt()
            } else if row == col + 1 {
                scale * (row as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        })
    }

    /// Matrix of `∂_ξ`: entry `(n, m) = ⟨H'_{m,λ}, H_{n,λ}⟩`, antisymmetric.
    pub fn derivative_matrix(&self) -> DMatrix<f64> {
        let n = self.truncation;
        let scale = self.lambda.abs().sqrt();
        DMatrix::from_fn(n, n, |row, col| {
            if col == row + 1 {
                scale * (col as f64 / 2.0).sqrt()
            } else if row == col + 1 {
                -scale * (row as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        })
    }

    /// Evaluates `Σ_k c_k H_{k,λ}(ξ)`.
    pub fn expansion_at(&self, coefficients: &DVector<f64>, xi: f64) -> f64 {
        self.functions_at(xi).iter().zip(coefficients.iter()).map(|(h, c)| h * c).sum()
    }
}

/// Relative residual of `(∂_ξ² − λ²ξ²)H_{n,λ} = −(2n+1)|λ| H_{n,λ}`.
pub fn oscillator_residual(n: usize, lambda: f64) -> Result<f64> {
    oscillator_residual_with(n, lambda, (2 * n + 1) as f64 * lambda.abs())
}

/// Same residual for a trial eigenvalue.
///
/// The operator is applied exactly in coefficient space with the
/// recurrence matrices at truncation `n + 3`, then evaluated on a ξ-sample
/// covering the bulk of `H_{n,λ}`.
pub fn oscillator_residual_with(n: usize, lambda: f64, eigenvalue: f64) -> Result<f64> {
    let spec = HermiteBasisSpec::new(lambda, n + 3)?;
    let d = spec.derivative_matrix();
    let p = spec.position_matrix();
    let op = &d * &d - &p * &p;
    let mut e_n = DVector::zeros(n + 3);
    e_n[n] = 1.0;
    let image = &op * &e_n + &e_n * eigenvalue;

    let half_width = ((2 * n + 1) as f64).sqrt() + 4.0;
    let samples = 401;
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    for i in 0..samples {
        let u = -half_width + 2.0 * half_width * i as f64 / (samples - 1) as f64;
        let xi = u / lambda.abs().sqrt();
        worst = worst.max(spec.expansion_at(&image, xi).abs());
        peak = peak.max(spec.functions_at(xi)[n].abs());
    }
    Ok(worst / peak)
}
