use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::config::{RunConfig, TestFunctionKind};
use super::{num, CliError, Output};
use crate::delta::{band_check, build_b, divergence_report, MultiIndex};
use crate::geodesics::{distance_from_origin, exp_map_raw, geodesic_horizontality, koranyi_in_chart};
use crate::group::GroupPoint;
use crate::hardy::hardy_ratio;
use crate::ncft::{direct_l2_norm, forward_transform, plancherel_norm, SpectralGrid, TransformQuadrature};

pub(crate) fn hardy(config: &RunConfig, out: &Output) -> Result<bool, CliError> {
    let report = hardy_ratio(config.r_nodes)?;
    out.write("hardy_report.json", &(report.to_json() + "\n"))?;
    out.write("alpha_sweep.csv", &report.sweep_csv())?;
    println!(
        "ratio {:.12} (numerator {:.12}, denominator {:.12}), Δ under doubling {:.3e}, converged {}",
        report.ratio, report.numerator, report.denominator, report.refinement_delta, report.converged
    );
    let bound = config.tolerance("hardy_ratio");
    let pass = report.ratio < 1.0 && report.ratio <= bound;
    println!("{} ratio < 1 and ≤ {bound}", verdict(pass));
    Ok(pass)
}

fn test_function(kind: TestFunctionKind) -> impl Fn(GroupPoint) -> Complex64 + Sync {
    move |p: GroupPoint| match kind {
        TestFunctionKind::Gaussian => Complex64::new((-(p.x * p.x + p.y * p.y + p.z * p.z)).exp(), 0.0),
        TestFunctionKind::Zero => Complex64::new(0.0, 0.0),
    }
}

pub(crate) fn plancherel(config: &RunConfig, out: &Output) -> Result<bool, CliError> {
    let quad = TransformQuadrature {
        half_width: config.box_halfwidth,
        spatial_nodes: config.spatial_nodes,
        xi_nodes: config.xi_nodes,
    };
    let f = test_function(config.test_function);
    let direct = direct_l2_norm(&f, &quad)?;
    let mut csv = String::from("N,lambda_nodes,direct_norm,spectral_norm,relative_defect\n");
    let mut defects = Vec::new();
    for &n in &config.truncation_ladder {
        let grid = SpectralGrid::geometric(n, config.lambda_min, config.lambda_max, config.lambda_nodes)?;
        let c = forward_transform(&f, &grid, &quad)?;
        let spectral = plancherel_norm(&c);
        let defect =
            if direct > 0.0 { (direct * direct - spectral * spectral).abs() / (direct * direct) } else { f64::NAN };
        let _ = writeln!(csv, "{n},{},{},{},{}", grid.len(), num(direct), num(spectral), num(defect));
        println!("N = {n:>3}: direct {direct:.6e}, spectral {spectral:.6e}, defect {defect:.4e}");
        defects.push(defect);
    }
    out.write("plancherel.csv", &csv)?;
    let monotone = defects.windows(2).all(|w| w[1] < w[0]);
    let finest = *defects.last().expect("ladder is nonempty");
    let pass = monotone && finest < config.tolerance("plancherel");
    println!("{} defect monotone: {monotone}, finest {finest:.4e}", verdict(pass));
    Ok(pass)
}

pub(crate) fn deficiency(config: &RunConfig, out: &Output) -> Result<bool, CliError> {
    let cand = config.candidate()?;
    let report = divergence_report(&cand, config.lambda_lo, &config.cutoffs)?;
    out.write("divergence.csv", &report.to_csv())?;
    let coefficients = config.candidate_coefficients()?;
    let identity_only = coefficients.iter().all(|(a, c)| *a == MultiIndex::default() || *c == Complex64::new(0.0, 0.0));
    let slope = report.fitted_slope;
    println!("fitted slope {slope:.10e} against ln Λ");
    let pass = if identity_only {
        // |c|² Σ_n 1/(2π(2n+1)²)
        let weight = coefficients.get(&MultiIndex::default()).map_or(0.0, |c| c.norm_sqr());
        let oracle: f64 =
            weight * (0..cand.truncation()).map(|n| 1.0 / (2.0 * PI * ((2 * n + 1) as f64).powi(2))).sum::<f64>();
        let rel = (slope - oracle).abs() / oracle;
        println!("closed-form slope {oracle:.10e}, relative gap {rel:.3e}");
        slope > 0.0 && rel <= config.tolerance("deficiency_slope")
    } else {
        slope > 0.0
    };
    println!("{} partial norms diverge", verdict(pass));
    Ok(pass)
}

pub(crate) fn delta_spectrum(config: &RunConfig, out: &Output) -> Result<bool, CliError> {
    let alpha = config.alpha()?;
    let op = build_b(alpha, config.delta_truncation)?;
    let csv = op.to_csv();
    print!("{csv}");
    out.write("delta_spectrum.csv", &csv)?;
    println!("λ-factor |λ|^{} λ^{}", op.abs_exponent, op.sgn_exponent);
    let pass = band_check(&op);
    println!("{} band |n − m| ≤ {}", verdict(pass), alpha.band());
    Ok(pass)
}

pub(crate) fn geodesic(config: &RunConfig, out: &Output) -> Result<bool, CliError> {
    let g = &config.geodesic;
    let mut csv = String::from("theta0,h0,t,r,x,y,z,distance,koranyi\n");
    let mut worst_distance = 0.0f64;
    let mut worst_speed = 0.0f64;
    for &[theta0, h0] in &g.rays {
        for i in 1..=g.samples {
            let t = g.t_max * i as f64 / g.samples as f64;
            let r = t * h0;
            let p = exp_map_raw(t, theta0, r);
            let d = distance_from_origin(p);
            worst_distance = worst_distance.max((d - t).abs() / t);
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{}",
                num(theta0),
                num(h0),
                num(t),
                num(r),
                num(p.x),
                num(p.y),
                num(p.z),
                num(d),
                num(koranyi_in_chart(t, r))
            );
        }
        worst_speed = worst_speed.max(geodesic_horizontality(theta0, h0, g.samples, g.t_max)?);
    }
    out.write("geodesic.csv", &csv)?;
    let pass =
        worst_distance <= config.tolerance("geodesic_round_trip") && worst_speed <= config.tolerance("horizontality");
    println!("{} max relative |δ − t| {worst_distance:.3e}, max horizontality defect {worst_speed:.3e}", verdict(pass));
    Ok(pass)
}

pub(crate) fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
