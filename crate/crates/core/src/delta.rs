//! Fourier transforms of derivatives of the Dirac delta at the origin, and
//! the divergence diagnostic for the deficiency-space candidate they induce.
//!
//! For a multi-index `α = (a1, a2, a3)` the transform of `D^α δ₀` at
//! frequency λ is `|λ|^{(a1+a2)/2} λ^{a3} B_α`, where `B_α` is a banded
//! matrix assembled from three elementary factors:
//!
//! * `Z`: `(−i) δ_{nm}`;
//! * `Y`: `i(√((n+1)/2) δ_{n+1,m} + √(n/2) δ_{n,m+1})`;
//! * `X`: `√((n+1)/2) δ_{n+1,m} − √(n/2) δ_{n,m+1}`;
//!
//! composed as `X^{a1} Y^{a2} Z^{a3}`.
//!
//! A candidate `θ` for the deficiency space of the pointed sub-Laplacian
//! satisfies `θ̃^λ(n, m) = Q_{n,m}(λ) / (|λ|(2n+1) + i)` with
//! `Q = Σ c_α (D^α δ₀)̃^λ`. Its Plancherel norm grows like `ln Λ` when
//! integrated up to `|λ| = Λ`, which is what [`divergence_report`] measures.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::quadrature::gauss_legendre;

/// Default bound on `|α|`.
pub const ORDER_CAP: usize = 6;
/// Largest truncation accepted by [`build_b`].
pub const TRUNCATION_CAP: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    pub a1: usize,
    pub a2: usize,
    pub a3: usize,
}

impl MultiIndex {
    pub fn new(a1: usize, a2: usize, a3: usize) -> Result<Self> {
        Self::with_cap(a1, a2, a3, ORDER_CAP)
    }

    pub fn with_cap(a1: usize, a2: usize, a3: usize, cap: usize) -> Result<Self> {
        let order = a1 + a2 + a3;
        if order > cap {
            return Err(LabError::OrderTooLarge { order, cap });
        }
        Ok(MultiIndex { a1, a2, a3 })
    }

    pub fn order(&self) -> usize {
        self.a1 + self.a2 + self.a3
    }

    /// Half-bandwidth of `B_α`.
    pub fn band(&self) -> usize {
        self.a1 + self.a2
    }

    /// All indices with `|α| ≤ cap`.
    pub fn all_up_to(cap: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for order in 0..=cap {
            for a1 in 0..=order {
                for a2 in 0..=order - a1 {
                    out.push(MultiIndex { a1, a2, a3: order - a1 - a2 });
                }
            }
        }
        out
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.a1, self.a2, self.a3)
    }
}

impl std::str::FromStr for MultiIndex {
    type Err = LabError;

    /// Accepts `a1,a2,a3` with optional surrounding parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(LabError::InvalidArgument(format!("multi-index needs three entries: {s:?}")));
        }
        let parse =
            |t: &str| t.parse::<usize>().map_err(|_| LabError::InvalidArgument(format!("bad multi-index entry {t:?}")));
        MultiIndex::new(parse(parts[0])?, parse(parts[1])?, parse(parts[2])?)
    }
}

/// `B_α` together with its λ-homogeneity: the transform of `D^α δ₀` is
/// `|λ|^{abs_exponent} λ^{sgn_exponent} entries`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSpectralOperator {
    pub alpha: MultiIndex,
    pub entries: DMatrix<Complex64>,
    pub abs_exponent: f64,
    pub sgn_exponent: u32,
}

impl BandedSpectralOperator {
    pub fn truncation(&self) -> usize {
        self.entries.nrows()
    }

    pub fn lambda_factor(&self, lambda: f64) -> f64 {
        lambda.abs().powf(self.abs_exponent) * lambda.powi(self.sgn_exponent as i32)
    }

    pub fn at(&self, lambda: f64) -> DMatrix<Complex64> {
        self.entries.map(|v| v * self.lambda_factor(lambda))
    }

    /// CSV rows `n,m,re,im` for the nonzero entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,m,re,im\n");
        for n in 0..self.entries.nrows() {
            for m in 0..self.entries.ncols() {
                let v = self.entries[(n, m)];
                if v != ZERO {
                    let _ = writeln!(out, "{n},{m},{:.16e},{:.16e}", v.re, v.im);
                }
            }
        }
        out
    }
}

fn x_factor(size: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(size, size, |n, m| {
        if m == n + 1 {
            Complex64::new(((n + 1) as f64 / 2.0).sqrt(), 0.0)
        } else if n == m + 1 {
            Complex64::new(-(n as f64 / 2.0).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

fn y_factor(size: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(size, size, |n, m| {
        if m == n + 1 {
            Complex64::new(0.0, ((n + 1) as f64 / 2.0).sqrt())
        } else if n == m + 1 {
            Complex64::new(0.0, (n as f64 / 2.0).sqrt())
        } else {
            ZERO
        }
    })
}

fn z_power(a3: usize) -> Complex64 {
    Complex64::new(0.0, -1.0).powu(a3 as u32)
}

/// Assembles `B_α` on indices `0..n`.
///
/// The product is formed at size `n + a1 + a2` and cropped, so that every
/// retained entry is exact despite the truncation of each tridiagonal factor.
pub fn build_b(alpha: MultiIndex, n: usize) -> Result<BandedSpectralOperator> {
    if n < alpha.band() + 1 {
        return Err(LabError::Truncation { min: alpha.band() + 1, got: n });
    }
    if n > TRUNCATION_CAP {
        return Err(LabError::InvalidArgument(format!("truncation {n} exceeds {TRUNCATION_CAP}")));
    }
    let size = n + alpha.band();
    let mut product = DMatrix::<Complex64>::identity(size, size) * z_power(alpha.a3);
    let x = x_factor(size);
    let y = y_factor(size);
    for _ in 0..alpha.a1 {
        product = &x * product;
    }
    // X^{a1} Y^{a2}: Y factors sit to the right of the X factors
    let mut right = DMatrix::<Complex64>::identity(size, size);
    for _ in 0..alpha.a2 {
        right = &y * right;
    }
    product *= right;
    Ok(BandedSpectralOperator {
        alpha,
        entries: product.view((0, 0), (n, n)).into_owned(),
        abs_exponent: alpha.band() as f64 / 2.0,
        sgn_exponent: alpha.a3 as u32,
    })
}

/// True iff all entries with `|n − m| > a1 + a2` are exactly zero and some
/// entry inside the band is not.
pub fn band_check(op: &BandedSpectralOperator) -> bool {
    let band = op.alpha.band();
    let mut inside = false;
    for n in 0..op.entries.nrows() {
        for m in 0..op.entries.ncols() {
            let v = op.entries[(n, m)];
            if n.abs_diff(m) > band {
                if v != ZERO {
                    return false;
                }
            } else if v != ZERO {
                inside = true;
            }
        }
    }
    inside
}

/// `(D^α δ₀)̃^λ(n, m) = |λ|^{(a1+a2)/2} λ^{a3} B_α(n, m)`.
pub fn delta_coefficients(alpha: MultiIndex, n: usize, m: usize, lambda: f64) -> Result<Complex64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(LabError::ZeroFrequency);
    }
    let size = n.max(m).max(alpha.band()) + 1;
    let op = build_b(alpha, size)?;
    Ok(op.entries[(n, m)] * op.lambda_factor(lambda))
}

/// Finite-difference value of `D^α(p ↦ 𝔛_{p⁻¹}(n, m, λ))` at the origin for
/// a first-order `α`, with `D` the coordinate derivative (equal to the
/// left-invariant field there).
///
/// Compared with [`delta_coefficients`], the `x` and `z` derivatives agree
/// for both signs of λ, while the `y` derivative carries an extra `sgn λ`:
/// differentiating the phase `e^{iλyξ}` produces multiplication by `λξ`,
/// whose matrix is `sgn(λ)|λ|^{1/2}` times the unsigned recurrence.
pub fn delta_coefficient_fd(alpha: MultiIndex, n: usize, m: usize, lambda: f64, h: f64) -> Result<Complex64> {
    use crate::group::GroupPoint;
    use crate::ncft::rep_coefficient;
    if alpha.order() != 1 {
        return Err(LabError::InvalidArgument("finite-difference check is first order only".into()));
    }
    let step = |s: f64| GroupPoint::new(s * alpha.a1 as f64, s * alpha.a2 as f64, s * alpha.a3 as f64);
    let plus = rep_coefficient(step(h).inverse(), n, m, lambda)?;
    let minus = rep_coefficient(step(-h).inverse(), n, m, lambda)?;
    Ok((plus - minus) / (2.0 * h))
}

/// A finite combination `Σ c_α D^α δ₀` with at least one nonzero weight,
/// together with the Hermite truncation used to evaluate it.
#[derive(Debug, Clone, PartialEq)]
pub struct DeficiencyCandidate {
    terms: Vec<(Complex64, BandedSpectralOperator)>,
    truncation: usize,
}

impl DeficiencyCandidate {
    pub fn new(coefficients: &BTreeMap<MultiIndex, Complex64>, truncation: usize) -> Result<Self> {
        if coefficients.values().all(|c| *c == ZERO) {
            return Err(LabError::ZeroCandidate);
        }
        if truncation == 0 {
            return Err(LabError::Truncation { min: 1, got: 0 });
        }
        let mut terms = Vec::new();
        for (alpha, &c) in coefficients {
            if c == ZERO {
                continue;
            }
            // evaluate at a truncation wide enough for the band, then crop
            let size = truncation.max(alpha.band() + 1);
            let mut op = build_b(*alpha, size)?;
            op.entries = op.entries.view((0, 0), (truncation, truncation)).into_owned();
            terms.push((c, op));
        }
        Ok(DeficiencyCandidate { terms, truncation })
    }

    /// The single-term candidate `c_α = 1`.
    pub fn single(alpha: MultiIndex, truncation: usize) -> Result<Self> {
        Self::new(&BTreeMap::from([(alpha, Complex64::new(1.0, 0.0))]), truncation)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn alphas(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        self.terms.iter().map(|(_, op)| op.alpha)
    }

    /// `Q(λ) = Σ c_α |λ|^{(a1+a2)/2} λ^{a3} B_α`.
    pub fn q_matrix(&self, lambda: f64) -> DMatrix<Complex64> {
        let n = self.truncation;
        let mut out = DMatrix::from_element(n, n, ZERO);
        for (c, op) in &self.terms {
            out += op.entries.map(|v| v * (c * op.lambda_factor(lambda)));
        }
        out
    }

    /// `θ̃^λ` on the truncation.
    pub fn values(&self, lambda: f64) -> DMatrix<Complex64> {
        let mut q = self.q_matrix(lambda);
        for n in 0..self.truncation {
            let denom = Complex64::new(lambda.abs() * (2 * n + 1) as f64, 1.0);
            q.row_mut(n).iter_mut().for_each(|v| *v /= denom);
        }
        q
    }

    /// `Σ_{n,m} |θ̃^λ(n,m)|²`.
    pub fn frobenius_sq(&self, lambda: f64) -> f64 {
        self.values(lambda).iter().map(|v| v.norm_sqr()).sum()
    }
}

/// `θ̃^λ(n, m) = Q_{n,m}(λ) / (|λ|(2n+1) + i)`.
pub fn deficiency_values(cand: &DeficiencyCandidate, n: usize, m: usize, lambda: f64) -> Result<Complex64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(LabError::ZeroFrequency);
    }
    if n >= cand.truncation || m >= cand.truncation {
        return Err(LabError::Truncation { min: n.max(m) + 1, got: cand.truncation });
    }
    Ok(cand.values(lambda)[(n, m)])
}

/// An index pair and constants with `|θ̃^λ(n₀,m₀)|² ≥ C/(λ²(2n₀+1)²+1)`
/// for all scanned `|λ| ≥ Λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundWitness {
    pub n: usize,
    pub m: usize,
    pub threshold: f64,
    pub constant: f64,
}

/// Scans both signs of λ on `samples` log-spaced points in
/// `[threshold, threshold·10^decades]` and returns the entry with the
/// largest certified constant, if any entry stays bounded away from zero.
pub fn lower_bound_witness(
    cand: &DeficiencyCandidate,
    threshold: f64,
    decades: f64,
    samples: usize,
) -> Option<LowerBoundWitness> {
    let samples = samples.max(2);
    let lambdas: Vec<f64> = (0..samples)
        .map(|i| threshold * 10f64.powf(decades * i as f64 / (samples - 1) as f64))
        .flat_map(|l| [l, -l])
        .collect();
    let n_trunc = cand.truncation;
    let mut best_ratio = vec![f64::INFINITY; n_trunc * n_trunc];
    for &lambda in &lambdas {
        let values = cand.values(lambda);
        for n in 0..n_trunc {
            let scale = lambda * lambda * ((2 * n + 1) as f64).powi(2) + 1.0;
            for m in 0..n_trunc {
                let r = values[(n, m)].norm_sqr() * scale;
                let slot = &mut best_ratio[n * n_trunc + m];
                *slot = slot.min(r);
            }
        }
    }
    let (idx, &constant) = best_ratio.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    (constant > 0.0 && constant.is_finite()).then_some(LowerBoundWitness {
        n: idx / n_trunc,
        m: idx % n_trunc,
        threshold,
        constant,
    })
}

/// Density of the measure the divergence is stated in, `|λ| dλ / (4π)`.
pub const DIVERGENCE_DENSITY: f64 = 1.0 / (4.0 * PI);

const PANEL_WIDTH: f64 = 0.25;
const PANEL_ORDER: usize = 20;

/// `Σ_{n,m} ∫_{λ_lo ≤ |λ| ≤ λ_hi} |θ̃^λ(n,m)|² |λ|/(4π) dλ`, integrated in
/// `s = ln|λ|` with composite Gauss–Legendre panels.
pub fn partial_norm(cand: &DeficiencyCandidate, lambda_lo: f64, lambda_hi: f64) -> Result<f64> {
    if !(lambda_lo > 0.0) || !(lambda_hi >= lambda_lo) || !lambda_hi.is_finite() {
        return Err(LabError::InvalidArgument(format!("need 0 < λ_lo ≤ λ_hi, got {lambda_lo}, {lambda_hi}")));
    }
    if lambda_hi == lambda_lo {
        return Ok(0.0);
    }
    let (s_lo, s_hi) = (lambda_lo.ln(), lambda_hi.ln());
    let panels = ((s_hi - s_lo) / PANEL_WIDTH).ceil().max(1.0) as usize;
    let width = (s_hi - s_lo) / panels as f64;
    let pieces: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let a = s_lo + i as f64 * width;
            gauss_legendre(a, a + width, PANEL_ORDER).integrate(|s| {
                let lambda = s.exp();
                // dλ = λ ds, density |λ|/(4π)
                let weight = lambda * lambda * DIVERGENCE_DENSITY;
                weight * (cand.frobenius_sq(lambda) + cand.frobenius_sq(-lambda))
            })
        })
        .collect();
    Ok(pieces.into_iter().sum())
}

/// Closed form of [`partial_norm`] for `c = {(0,0,0): 1}` at truncation `n`.
pub fn identity_candidate_norm(truncation: usize, lambda_lo: f64, lambda_hi: f64) -> f64 {
    (0..truncation)
        .map(|n| {
            let a2 = ((2 * n + 1) as f64).powi(2);
            ((lambda_hi.powi(2) * a2 + 1.0) / (lambda_lo.powi(2) * a2 + 1.0)).ln() / (4.0 * PI * a2)
        })
        .sum()
}

/// `d partial_norm / d ln Λ` at `Λ`.
pub fn log_slope(cand: &DeficiencyCandidate, lambda_hi: f64) -> f64 {
    lambda_hi * lambda_hi * DIVERGENCE_DENSITY * (cand.frobenius_sq(lambda_hi) + cand.frobenius_sq(-lambda_hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceRow {
    pub lambda_hi: f64,
    pub partial_norm: f64,
    pub slope_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub lambda_lo: f64,
    pub rows: Vec<DivergenceRow>,
    /// Least-squares slope of `partial_norm` against `ln Λ` over the last three cutoffs.
    pub fitted_slope: f64,
    /// Positive slope whose local estimates over the last three cutoffs agree
    /// with the fit to 5%.
    pub stable: bool,
}

impl DivergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda_hi,partial_norm,slope_estimate\n");
        for row in &self.rows {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", row.lambda_hi, row.partial_norm, row.slope_estimate);
        }
        out
    }
}

/// Tabulates [`partial_norm`] from `lambda_lo` up to each cutoff.
/// `slope_estimate` is the exact local derivative against `ln Λ`.
pub fn divergence_report(cand: &DeficiencyCandidate, lambda_lo: f64, cutoffs: &[f64]) -> Result<DivergenceReport> {
    if cutoffs.len() < 3 {
        return Err(LabError::InvalidArgument("need at least three cutoffs".into()));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) || cutoffs[0] <= lambda_lo {
        return Err(LabError::InvalidArgument("cutoffs must increase from above λ_lo".into()));
    }
    let mut rows = Vec::with_capacity(cutoffs.len());
    let mut total = 0.0;
    let mut previous = lambda_lo;
    for &cut in cutoffs {
        total += partial_norm(cand, previous, cut)?;
        previous = cut;
        rows.push(DivergenceRow { lambda_hi: cut, partial_norm: total, slope_estimate: log_slope(cand, cut) });
    }
    let tail = &rows[rows.len() - 3..];
    let xs: Vec<f64> = tail.iter().map(|r| r.lambda_hi.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|r| r.partial_norm).collect();
    let xm = xs.iter().sum::<f64>() / 3.0;
    let ym = ys.iter().sum::<f64>() / 3.0;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let var: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let fitted_slope = cov / var;
    let stable =
        fitted_slope > 0.0 && tail.iter().all(|r| (r.slope_estimate - fitted_slope).abs() <= 0.05 * fitted_slope);
    Ok(DivergenceReport { lambda_lo, rows, fitted_slope, stable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn idx(a1: usize, a2: usize, a3: usize) -> MultiIndex {
        MultiIndex::new(a1, a2, a3).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn multi_index_cap_and_parsing() {
        assert!(MultiIndex::new(3, 2, 1).is_ok());
        assert_eq!(MultiIndex::new(3, 2, 2), Err(LabError::OrderTooLarge { order: 7, cap: 6 }));
        assert_eq!("(1, 0,2)".parse::<MultiIndex>().unwrap(), idx(1, 0, 2));
        assert!("1,2".parse::<MultiIndex>().is_err());
        assert!("a,b,c".parse::<MultiIndex>().is_err());
        assert_eq!(MultiIndex::all_up_to(6).len(), 84);
    }

    #[test]
    fn stated_entries() {
        let z = build_b(idx(0, 0, 1), 4).unwrap();
        assert_eq!(z.entries, DMatrix::identity(4, 4) * c(0.0, -1.0));
        assert_eq!((z.abs_exponent, z.sgn_exponent), (0.0, 1));

        let y = build_b(idx(0, 1, 0), 4).unwrap();
        assert_eq!(y.entries[(0, 1)], c(0.0, 0.5f64.sqrt()));
        assert_eq!(y.entries[(1, 0)], c(0.0, 0.5f64.sqrt()));
        assert_eq!(y.abs_exponent, 0.5);

        let x = build_b(idx(1, 0, 0), 4).unwrap();
        assert_eq!(x.entries[(0, 1)], c(0.5f64.sqrt(), 0.0));
        assert_eq!(x.entries[(1, 0)], c(-(0.5f64.sqrt()), 0.0));
    }

    #[test]
    fn truncation_below_band_is_rejected() {
        assert_eq!(build_b(idx(1, 2, 0), 3), Err(LabError::Truncation { min: 4, got: 3 }));
        assert!(build_b(idx(0, 0, 0), 65).is_err());
    }

    #[test]
    fn band_property_for_every_index() {
        for alpha in MultiIndex::all_up_to(ORDER_CAP) {
            let op = build_b(alpha, 32).unwrap();
            assert!(band_check(&op), "{alpha}");
            let band = alpha.band();
            // extreme diagonals are populated
            if band > 0 {
                assert!(op.entries[(0, band)] != ZERO && op.entries[(band, 0)] != ZERO, "{alpha}");
            }
        }
    }

    #[test]
    fn band_check_negative_control() {
        let mut op = build_b(idx(0, 2, 0), 8).unwrap();
        assert!(band_check(&op));
        op.entries[(0, 3)] = c(1e-30, 0.0);
        assert!(!band_check(&op));
        let mut empty = build_b(idx(0, 0, 0), 3).unwrap();
        empty.entries.fill(ZERO);
        assert!(!band_check(&empty));
    }

    #[test]
    fn cropping_keeps_interior_exact() {
        // entries near the edge agree with a much larger computation
        let small = build_b(idx(2, 2, 1), 10).unwrap();
        let large = build_b(idx(2, 2, 1), 40).unwrap();
        for n in 0..10 {
            for m in 0..10 {
                assert!((small.entries[(n, m)] - large.entries[(n, m)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn composition_law() {
        let y = build_b(idx(0, 1, 0), 20).unwrap().entries;
        let y_big = build_b(idx(0, 1, 0), 24).unwrap().entries;
        for a3 in 0..=2 {
            for a2 in 1..=4 {
                let composed = build_b(idx(0, a2, a3), 20).unwrap().entries;
                let mut power = DMatrix::<Complex64>::identity(24, 24);
                for _ in 0..a2 {
                    power = &y_big * power;
                }
                let z = build_b(idx(0, 0, a3), 20).unwrap().entries;
                let expected = power.view((0, 0), (20, 20)).into_owned() * z;
                for (a, b) in composed.iter().zip(expected.iter()) {
                    assert!((a - b).norm() < 1e-14);
                }
            }
        }
        assert_eq!(y.nrows(), 20);
    }

    #[test]
    fn coefficient_examples() {
        for lambda in [0.3, -2.0, 9.0] {
            for n in 0..4 {
                for m in 0..4 {
                    let v = delta_coefficients(idx(0, 0, 0), n, m, lambda).unwrap();
                    assert_eq!(v, if n == m { c(1.0, 0.0) } else { ZERO });
                }
            }
        }
        let v = delta_coefficients(idx(0, 1, 0), 0, 1, 4.0).unwrap();
        assert_relative_eq!(v.im, 2f64.sqrt(), max_relative = 1e-15);
        assert_eq!(delta_coefficients(idx(0, 0, 1), 0, 0, 0.0), Err(LabError::ZeroFrequency));
    }

    #[test]
    fn homogeneity() {
        for alpha in [idx(1, 0, 0), idx(0, 2, 1), idx(1, 1, 2)] {
            for lambda in [0.25f64, -3.0, 7.5] {
                for (n, m) in [(0, 1), (2, 2), (3, 1)] {
                    let unit = delta_coefficients(alpha, n, m, 1.0).unwrap();
                    if unit == ZERO {
                        continue;
                    }
                    let ratio = delta_coefficients(alpha, n, m, lambda).unwrap() / unit;
                    let expected = lambda.abs().powf(alpha.band() as f64 / 2.0) * lambda.powi(alpha.a3 as i32);
                    assert!((ratio - expected).norm() < 1e-12 * expected.abs());
                }
            }
        }
    }

    #[test]
    fn finite_difference_cross_check() {
        let h = 1e-4;
        for lambda in [0.7f64, 2.0, -1.3] {
            for alpha in [idx(1, 0, 0), idx(0, 1, 0), idx(0, 0, 1)] {
                // the y direction picks up sgn λ, see delta_coefficient_fd
                let sign = if alpha.a2 == 1 { lambda.signum() } else { 1.0 };
                for (n, m) in [(0, 0), (0, 1), (1, 0), (2, 3), (3, 3)] {
                    let fd = delta_coefficient_fd(alpha, n, m, lambda, h).unwrap();
                    let exact = delta_coefficients(alpha, n, m, lambda).unwrap() * sign;
                    assert!((fd - exact).norm() < 1e-6, "{alpha} ({n},{m}) λ={lambda}: {fd} vs {exact}");
                }
            }
        }
        assert!(delta_coefficient_fd(idx(1, 1, 0), 0, 0, 1.0, h).is_err());
    }

    #[test]
    fn zero_candidate_is_rejected() {
        let coefficients = BTreeMap::from([(idx(0, 0, 0), ZERO), (idx(1, 0, 0), ZERO)]);
        assert_eq!(DeficiencyCandidate::new(&coefficients, 3), Err(LabError::ZeroCandidate));
        assert_eq!(DeficiencyCandidate::new(&BTreeMap::new(), 3), Err(LabError::ZeroCandidate));
    }

    #[test]
    fn identity_candidate_values() {
        let cand = DeficiencyCandidate::single(idx(0, 0, 0), 4).unwrap();
        for lambda in [-3.0f64, 0.5, 2.0] {
            for n in 0..4 {
                for m in 0..4 {
                    let v = deficiency_values(&cand, n, m, lambda).unwrap();
                    let expected = if n == m { c(1.0, 0.0) / c(lambda.abs() * (2 * n + 1) as f64, 1.0) } else { ZERO };
                    assert!((v - expected).norm() < 1e-15);
                }
            }
            let v00 = deficiency_values(&cand, 0, 0, lambda).unwrap();
            assert_relative_eq!(v00.norm_sqr(), 1.0 / (lambda * lambda + 1.0), max_relative = 1e-14);
        }
        assert!(deficiency_values(&cand, 4, 0, 1.0).is_err());
    }

    #[test]
    fn witnesses_exist_for_assorted_candidates() {
        let candidates = [
            BTreeMap::from([(idx(0, 0, 0), c(1.0, 0.0))]),
            BTreeMap::from([(idx(0, 1, 0), c(1.0, 0.0))]),
            BTreeMap::from([(idx(1, 0, 0), c(0.0, 2.0)), (idx(0, 0, 1), c(-1.0, 0.0))]),
            BTreeMap::from([(idx(1, 1, 0), c(1.0, 0.0)), (idx(0, 0, 2), c(0.3, 0.1))]),
        ];
        for coefficients in &candidates {
            let cand = DeficiencyCandidate::new(coefficients, 4).unwrap();
            let w = lower_bound_witness(&cand, 10.0, 6.0, 200).expect("witness");
            assert!(w.constant > 0.0);
        }
    }

    #[test]
    fn partial_norm_matches_closed_form() {
        for truncation in [1usize, 3, 6] {
            let cand = DeficiencyCandidate::single(idx(0, 0, 0), truncation).unwrap();
            for (lo, hi) in [(1e-3, 1e3), (0.5, 2.0), (1e-3, 1e9)] {
                let quad = partial_norm(&cand, lo, hi).unwrap();
                let exact = identity_candidate_norm(truncation, lo, hi);
                assert_relative_eq!(quad, exact, max_relative = 1e-10);
            }
        }
        let cand = DeficiencyCandidate::single(idx(0, 0, 0), 1).unwrap();
        assert_eq!(partial_norm(&cand, 2.0, 2.0).unwrap(), 0.0);
        assert!(partial_norm(&cand, 0.0, 2.0).is_err());
        assert!(partial_norm(&cand, 3.0, 2.0).is_err());
    }

    #[test]
    fn partial_norm_is_monotone() {
        let coefficients = BTreeMap::from([(idx(0, 1, 0), c(1.0, 0.0)), (idx(0, 0, 0), c(0.5, 0.0))]);
        let mut previous_n = 0.0;
        for truncation in 1..5 {
            let cand = DeficiencyCandidate::new(&coefficients, truncation).unwrap();
            let mut previous = 0.0;
            for hi in [1.0, 10.0, 100.0] {
                let v = partial_norm(&cand, 1e-2, hi).unwrap();
                assert!(v >= previous);
                previous = v;
            }
            assert!(previous >= previous_n);
            previous_n = previous;
        }
    }

    #[test]
    fn equal_increments_per_decade() {
        let cand = DeficiencyCandidate::single(idx(0, 0, 0), 1).unwrap();
        let a = partial_norm(&cand, 1e3, 1e6).unwrap();
        let b = partial_norm(&cand, 1e6, 1e9).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-6);
    }

    #[test]
    fn default_candidate_slope() {
        let cand = DeficiencyCandidate::single(idx(0, 0, 0), 1).unwrap();
        let cutoffs: Vec<f64> = (1..=9).map(|k| 10f64.powi(k)).collect();
        let report = divergence_report(&cand, 1e-3, &cutoffs).unwrap();
        assert!(report.stable);
        assert_relative_eq!(report.fitted_slope, 1.0 / (2.0 * PI), max_relative = 1e-6);
        let csv = report.to_csv();
        assert!(csv.starts_with("lambda_hi,partial_norm,slope_estimate\n1.0000000000000000e1,"));
        assert_eq!(csv.lines().count(), 10);
        assert!(divergence_report(&cand, 1e-3, &[10.0, 5.0, 100.0]).is_err());
    }

    #[test]
    fn other_candidates_diverge() {
        let cutoffs: Vec<f64> = (1..=6).map(|k| 10f64.powi(k)).collect();
        let candidates = [
            BTreeMap::from([(idx(0, 1, 0), c(1.0, 0.0))]),
            BTreeMap::from([(idx(1, 1, 0), c(1.0, 0.0)), (idx(0, 0, 1), c(0.0, 1.0))]),
            BTreeMap::from([(idx(1, 0, 0), c(2.0, 0.0)), (idx(0, 0, 0), c(-1.0, 0.5))]),
        ];
        for coefficients in &candidates {
            let cand = DeficiencyCandidate::new(coefficients, 4).unwrap();
            let report = divergence_report(&cand, 1e-3, &cutoffs).unwrap();
            assert!(report.fitted_slope > 0.0);
        }
    }
}
