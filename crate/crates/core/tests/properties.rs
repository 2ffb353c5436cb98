//! Randomized invariants across modules.

use std::f64::consts::PI;

use heisenberg_lab::delta::{delta_coefficients, partial_norm, DeficiencyCandidate, MultiIndex};
use heisenberg_lab::geodesics::{
    distance_from_origin, exp_map, geodesic_coordinates, koranyi_in_chart, GeodesicCoordinates,
};
use heisenberg_lab::group::{dilate, koranyi_norm};
use heisenberg_lab::hermite::{hermite_eval, rescaled_hermite_eval};
use heisenberg_lab::GroupPoint;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = GroupPoint> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y, z)| GroupPoint::new(x, y, z))
}

fn close(a: GroupPoint, b: GroupPoint, tol: f64) -> bool {
    let scale = 1.0 + a.x.abs() + a.y.abs() + a.z.abs();
    (a.x - b.x).abs() + (a.y - b.y).abs() + (a.z - b.z).abs() <= tol * scale
}

proptest! {
    #[test]
    fn group_law_is_associative(p in point(), q in point(), w in point()) {
        prop_assert!(close((p * q) * w, p * (q * w), 1e-13));
    }

    #[test]
    fn dilations_are_automorphisms(p in point(), q in point(), lambda in 0.05..6.0f64) {
        let lhs = dilate(lambda, p * q).unwrap();
        let rhs = dilate(lambda, p).unwrap() * dilate(lambda, q).unwrap();
        prop_assert!(close(lhs, rhs, 1e-13));
        let n = koranyi_norm(p);
        prop_assert!((koranyi_norm(dilate(lambda, p).unwrap()) - lambda * n).abs() <= 1e-12 * (1.0 + lambda * n));
    }

    #[test]
    fn koranyi_is_inverse_invariant(p in point()) {
        prop_assert_eq!(koranyi_norm(p.inverse()), koranyi_norm(p));
    }

    #[test]
    fn hermite_functions_stay_bounded(n in 0usize..=200, xi in -20.0..20.0f64) {
        let v = hermite_eval(n, xi);
        prop_assert!(v.is_finite() && v.abs() <= 1.1);
    }

    #[test]
    fn rescaling_ignores_the_sign_of_lambda(n in 0usize..30, lambda in 0.01..50.0f64, xi in -3.0..3.0f64) {
        prop_assert_eq!(rescaled_hermite_eval(n, lambda, xi).unwrap(), rescaled_hermite_eval(n, -lambda, xi).unwrap());
    }

    #[test]
    fn delta_coefficients_are_homogeneous(
        a1 in 0usize..3, a2 in 0usize..3, a3 in 0usize..3,
        n in 0usize..5, m in 0usize..5,
        lambda in prop_oneof![-20.0..-0.05f64, 0.05..20.0f64],
    ) {
        let alpha = MultiIndex::new(a1, a2, a3).unwrap();
        let unit = delta_coefficients(alpha, n, m, 1.0).unwrap();
        let scaled = delta_coefficients(alpha, n, m, lambda).unwrap();
        let factor = lambda.abs().powf((a1 + a2) as f64 / 2.0) * lambda.powi(a3 as i32);
        prop_assert!((scaled - unit * factor).norm() <= 1e-12 * (1.0 + scaled.norm()));
    }

    #[test]
    fn multi_index_text_round_trip(a1 in 0usize..3, a2 in 0usize..3, a3 in 0usize..=2) {
        let alpha = MultiIndex::new(a1, a2, a3).unwrap();
        prop_assert_eq!(alpha.to_string().parse::<MultiIndex>().unwrap(), alpha);
    }

    #[test]
    fn partial_norm_grows_with_cutoff_and_truncation(lo in 0.1..10.0f64, span in 1.0..1e4f64, extra in 1.0..100.0f64) {
        let small = DeficiencyCandidate::single(MultiIndex::default(), 2).unwrap();
        let large = DeficiencyCandidate::single(MultiIndex::default(), 3).unwrap();
        let hi = lo + span;
        let base = partial_norm(&small, lo, hi).unwrap();
        prop_assert!(partial_norm(&small, lo, hi * extra).unwrap() >= base);
        prop_assert!(partial_norm(&large, lo, hi).unwrap() >= base);
    }

    #[test]
    fn chart_round_trip(t in 0.1..5.0f64, theta in 0.0..(2.0 * PI), r in 1e-3..(2.0 * PI - 1e-3), flip in any::<bool>()) {
        let r = if flip { -r } else { r };
        let c = GeodesicCoordinates::new(t, theta, r).unwrap();
        let p = exp_map(c);
        let back = geodesic_coordinates(p).unwrap();
        prop_assert!((back.t - t).abs() < 1e-9 && (back.r - r).abs() < 1e-9);
        prop_assert!((distance_from_origin(p) - t).abs() < 1e-9);
        // the gauge never exceeds the distance
        prop_assert!(koranyi_in_chart(t, r) <= t * (1.0 + 1e-12));
    }
}
