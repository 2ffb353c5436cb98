//! Every example under `examples/` runs to completion.

macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(group_algebra, "group_algebra.rs");
example!(hermite_basis, "hermite_basis.rs");
example!(plancherel, "plancherel.rs");
example!(delta_spectrum, "delta_spectrum.rs");
example!(deficiency, "deficiency.rs");
example!(geodesic_chart, "geodesic_chart.rs");
example!(hardy_constant, "hardy_constant.rs");
example!(garofalo, "garofalo.rs");
example!(fundamental_solution, "fundamental_solution.rs");
example!(invariant_suite, "invariant_suite.rs");
