//! The invariant suite behind `heisenberg-lab check`.
//!
//! Every row reports a nonnegative residual and passes when it is finite and
//! at most its tolerance. Rows of kind `fd` depend on the configured
//! finite-difference step; the others do not.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::commands::verdict;
use super::config::RunConfig;
use super::{num, CliError, Output};
use crate::delta::{
    band_check, build_b, delta_coefficient_fd, delta_coefficients, identity_candidate_norm, partial_norm,
    DeficiencyCandidate, MultiIndex, ORDER_CAP,
};
use crate::geodesics::{
    distance_from_origin, exp_map, frame_components, geodesic_coordinates, geodesic_horizontality_with_step,
    holonomy_ratio_is_monotone, jacobian, mu, pushforward_with_step, GeodesicCoordinates,
};
use crate::group::{
    dilate, fundamental_solution, gamma_l2_blowup, koranyi_norm, weak_identity, Field, GroupPoint, PolarQuadrature,
    Stencil,
};
use crate::hardy::{builtin_test_functions, eta, gamma_alpha, hardy_ratio, koranyi_hardy_check, GarofaloQuadrature};
use crate::hermite::{oscillator_residual, HermiteBasisSpec};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Closed-form algebra, independent of any discretization.
    Exact,
    /// Finite differences with the configured step.
    Fd,
    /// Fixed quadratures.
    Quadrature,
}

impl CheckKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::Exact => "exact",
            CheckKind::Fd => "fd",
            CheckKind::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: &'static str,
    pub kind: CheckKind,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckRow {
    pub fn pass(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

fn gaussian(p: GroupPoint) -> Complex64 {
    Complex64::new((-(p.x * p.x + 2.0 * p.y * p.y + p.z * p.z) + 0.3 * p.x).exp(), 0.0)
}

/// Smooth in `p` since `N⁴` is a polynomial; equals 1 at the origin.
fn koranyi_bump(p: GroupPoint) -> Complex64 {
    let n4 = p.horizontal_sq().powi(2) + 16.0 * p.z * p.z;
    if n4 >= 1.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new((1.0 - 1.0 / (1.0 - n4)).exp(), 0.0)
}

fn random_point(rng: &mut ChaCha8Rng, half: f64) -> GroupPoint {
    GroupPoint::new(rng.gen_range(-half..half), rng.gen_range(-half..half), rng.gen_range(-half..half))
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    // NaN propagates so that a broken evaluation cannot pass.
    values.into_iter().fold(0.0, |acc: f64, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
}

fn point_gap(a: GroupPoint, b: GroupPoint) -> f64 {
    let scale = 1.0 + a.x.abs().max(a.y.abs()).max(a.z.abs());
    ((a.x - b.x).abs().max((a.y - b.y).abs()).max((a.z - b.z).abs())) / scale
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    d.min(TWO_PI - d)
}

/// Runs the suite; deterministic given the config (and its seed).
pub fn run_checks(config: &RunConfig) -> Result<Vec<CheckRow>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let stencil = Stencil::new(config.fd_step);
    let h = config.fd_step;
    let mut rows = Vec::new();
    let mut push = |name: &'static str, kind: CheckKind, value: f64| {
        rows.push(CheckRow { name, kind, value, tolerance: config.tolerance(name) });
    };

    // group algebra
    let triples: Vec<[GroupPoint; 3]> = (0..50)
        .map(|_| [random_point(&mut rng, 3.0), random_point(&mut rng, 3.0), random_point(&mut rng, 3.0)])
        .collect();
    push(
        "associativity",
        CheckKind::Exact,
        max_of(triples.iter().map(|[p, q, w]| point_gap((*p * *q) * *w, *p * (*q * *w)))),
    );
    let mut homomorphism = Vec::new();
    for [p, q, _] in &triples {
        let lambda = rng.gen_range(0.1..4.0);
        homomorphism.push(point_gap(dilate(lambda, *p * *q)?, dilate(lambda, *p)? * dilate(lambda, *q)?));
    }
    push("dilation_homomorphism", CheckKind::Exact, max_of(homomorphism));
    push(
        "koranyi_inverse",
        CheckKind::Exact,
        max_of(triples.iter().map(|[p, ..]| (koranyi_norm(p.inverse()) - koranyi_norm(*p)).abs() / koranyi_norm(*p))),
    );

    // Hermite basis
    let mut osc = Vec::new();
    for n in 0..=20 {
        for lambda in [0.5, -0.5, 1.0, -1.0, 4.0, -4.0] {
            osc.push(oscillator_residual(n, lambda)?);
        }
    }
    push("oscillator", CheckKind::Exact, max_of(osc));
    let mut comm = Vec::new();
    for lambda in [0.5, -2.0, 3.0] {
        let spec = HermiteBasisSpec::new(lambda, 12)?;
        let (d, p) = (spec.derivative_matrix(), spec.position_matrix());
        let c = &d * &p - &p * &d - DMatrix::identity(12, 12) * lambda;
        comm.push(c.view((0, 0), (11, 11)).amax() / lambda.abs());
    }
    push("hermite_commutation", CheckKind::Exact, max_of(comm));

    // B_α
    let mut outside = Vec::new();
    for alpha in MultiIndex::all_up_to(ORDER_CAP) {
        let op = build_b(alpha, 32)?;
        let band = alpha.band();
        let mut worst = 0.0f64;
        for n in 0..32usize {
            for m in 0..32 {
                if n.abs_diff(m) > band {
                    worst = worst.max(op.entries[(n, m)].norm());
                }
            }
        }
        outside.push(if band_check(&op) { worst } else { f64::INFINITY });
    }
    push("b_band", CheckKind::Exact, max_of(outside));
    let y = build_b(MultiIndex::new(0, 1, 0)?, 24)?.entries;
    let x = build_b(MultiIndex::new(1, 0, 0)?, 24)?.entries;
    let mut composition = Vec::new();
    for (a1, a2, a3) in [(0, 2, 1), (1, 1, 0), (2, 1, 2), (1, 3, 0)] {
        let composed = build_b(MultiIndex::new(a1, a2, a3)?, 16)?.entries;
        let mut product = DMatrix::<Complex64>::identity(24, 24);
        for _ in 0..a1 {
            product *= &x;
        }
        for _ in 0..a2 {
            product *= &y;
        }
        let z = build_b(MultiIndex::new(0, 0, a3)?, 16)?.entries;
        let expected = product.view((0, 0), (16, 16)).into_owned() * z;
        // entrywise, relative to entries above one
        composition.push(max_of(composed.iter().zip(expected.iter()).map(|(a, b)| (a - b).norm() / b.norm().max(1.0))));
    }
    push("b_composition", CheckKind::Exact, max_of(composition));

    // geodesic chart
    let mut round_trip = Vec::new();
    for _ in 0..200 {
        let t = rng.gen_range(0.1..5.0);
        let theta = rng.gen_range(0.0..TWO_PI);
        let r = rng.gen_range(1e-3..TWO_PI - 1e-3) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let c = GeodesicCoordinates::new(t, theta, r)?;
        let back = geodesic_coordinates(exp_map(c))?;
        round_trip.push(((back.t - t).abs() / t).max(angle_gap(back.theta, c.theta)).max((back.r - r).abs()));
    }
    push("geodesic_round_trip", CheckKind::Exact, max_of(round_trip));
    push(
        "axis_distance",
        CheckKind::Exact,
        (distance_from_origin(GroupPoint::new(0.0, 0.0, 1.0)) - 2.0 * PI.sqrt()).abs(),
    );
    push("monotone_guard", CheckKind::Exact, if holonomy_ratio_is_monotone(10_000) { 0.0 } else { 1.0 });

    // Hardy integrand landmarks
    let mut landmarks: Vec<f64> =
        [-3.0, -2.0, -1.0].iter().map(|&a| (gamma_alpha(a, 0.0) * mu(0.0) - 1.0 / 12.0).abs()).collect();
    landmarks.extend([(eta(0.0) - 1.0).abs(), eta(TWO_PI).abs(), eta(-TWO_PI).abs()]);
    let grid: Vec<f64> = (0..10_000).map(|i| TWO_PI * i as f64 / 9_999.0).collect();
    if grid.windows(2).any(|w| eta(w[1]) >= eta(w[0])) {
        landmarks.push(f64::INFINITY);
    }
    push("landmarks", CheckKind::Exact, max_of(landmarks));

    // quadratures
    let report = hardy_ratio(config.r_nodes)?;
    push("hardy_ratio", CheckKind::Quadrature, if report.ratio < 1.0 { report.ratio } else { f64::INFINITY });
    push("hardy_convergence", CheckKind::Quadrature, report.refinement_delta);
    let defects = koranyi_hardy_check(&builtin_test_functions(), &GarofaloQuadrature::default())?;
    push("garofalo", CheckKind::Quadrature, max_of(defects.iter().map(|d| (-d.defect).max(0.0))));
    let identity = DeficiencyCandidate::single(MultiIndex::default(), 3)?;
    let (lo, hi) = (0.5, 1e6);
    let oracle = identity_candidate_norm(3, lo, hi);
    push("partial_norm_oracle", CheckKind::Quadrature, (partial_norm(&identity, lo, hi)? - oracle).abs() / oracle);
    let blowup = gamma_l2_blowup(&[0.4, 0.2, 0.1, 0.05, 0.025])?;
    let steps: Vec<f64> = blowup.windows(2).map(|w| w[1] - w[0]).collect();
    push("gamma_blowup", CheckKind::Quadrature, max_of(steps.iter().map(|s| (s / steps[0] - 1.0).abs())));
    let weak = weak_identity(&koranyi_bump, 1e-2, 1.0, &PolarQuadrature::default(), &Stencil::default())?;
    push("weak_identity", CheckKind::Quadrature, (weak - koranyi_bump(GroupPoint::ORIGIN)).norm());

    // finite differences at the configured step
    let points: Vec<GroupPoint> = (0..10).map(|_| random_point(&mut rng, 1.0)).collect();
    push(
        "commutator",
        CheckKind::Fd,
        max_of(
            points.iter().map(|&p| {
                (stencil.apply_commutator(&gaussian, p) - stencil.apply_field(Field::Z, &gaussian, p)).norm()
            }),
        ),
    );
    push(
        "sublaplacian_sum_of_squares",
        CheckKind::Fd,
        max_of(
            points.iter().map(|&p| {
                (stencil.apply_sublaplacian(&gaussian, p) - stencil.apply_sum_of_squares(&gaussian, p)).norm()
            }),
        ),
    );
    let gamma = |p: GroupPoint| Complex64::new(fundamental_solution(p).unwrap_or(f64::NAN), 0.0);
    let mut harmonic = Vec::new();
    for _ in 0..10 {
        // Koranyi radius in [0.5, 2]; the residual is scaled to the size of Γ/N²
        let dir = random_point(&mut rng, 1.0);
        let n = koranyi_norm(dir);
        let rho = rng.gen_range(0.5..2.0);
        let p = dilate(rho / n, dir)?;
        harmonic.push(stencil.apply_sublaplacian(&gamma, p).norm() * rho.powi(4));
    }
    push("gamma_harmonic", CheckKind::Fd, max_of(harmonic));
    let mut jac = Vec::new();
    let mut unit = Vec::new();
    for _ in 0..20 {
        let t = rng.gen_range(0.2..3.0);
        let theta = rng.gen_range(0.0..TWO_PI);
        let r = rng.gen_range(-5.0..5.0);
        let c = GeodesicCoordinates::new(t, theta, r)?;
        let expected = t.powi(3) * mu(r);
        jac.push((jacobian(c, h).determinant() - expected).abs() / expected);
        let v = pushforward_with_step(c, [1.0, 0.0, r / t], h);
        let [a, b, vertical] = frame_components(exp_map(c), v);
        unit.push(((a * a + b * b).sqrt() - 1.0).abs() + vertical.abs());
    }
    push("jacobian", CheckKind::Fd, max_of(jac));
    push("unit_gradient", CheckKind::Fd, max_of(unit));
    let mut horizontal = Vec::new();
    for _ in 0..4 {
        let theta0 = rng.gen_range(0.0..TWO_PI);
        let h0 = rng.gen_range(-2.5..2.5);
        horizontal.push(geodesic_horizontality_with_step(theta0, h0, 20, 2.0, h)?);
    }
    push("horizontality", CheckKind::Fd, max_of(horizontal));
    let mut fd = Vec::new();
    for lambda in [0.7f64, -1.3, 2.0] {
        for alpha in [MultiIndex::new(1, 0, 0)?, MultiIndex::new(0, 1, 0)?, MultiIndex::new(0, 0, 1)?] {
            // the y direction carries an extra sgn λ
            let sign = if alpha.a2 == 1 { lambda.signum() } else { 1.0 };
            for (n, m) in [(0, 0), (0, 1), (2, 3)] {
                let approx = delta_coefficient_fd(alpha, n, m, lambda, h)?;
                fd.push((approx - delta_coefficients(alpha, n, m, lambda)? * sign).norm());
            }
        }
    }
    push("delta_fd", CheckKind::Fd, max_of(fd));
    Ok(rows)
}

pub(crate) fn check(config: &RunConfig, out: &Output) -> Result<bool, CliError> {
    let rows = run_checks(config)?;
    let mut csv = String::from("name,kind,value,tolerance,pass\n");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            row.name,
            row.kind.as_str(),
            num(row.value),
            num(row.tolerance),
            row.pass()
        );
        println!(
            "{} {:<28} {:<10} {:>12.4e} ≤ {:.1e}",
            verdict(row.pass()),
            row.name,
            row.kind.as_str(),
            row.value,
            row.tolerance
        );
    }
    out.write("check.csv", &csv)?;
    let failed: Vec<&str> = rows.iter().filter(|r| !r.pass()).map(|r| r.name).collect();
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
    }
    Ok(failed.is_empty())
}
