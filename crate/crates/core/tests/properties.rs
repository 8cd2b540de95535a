mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use common::{fd_jet, rel};
use monoform_core::calibration::{solve_c, CalibrationOptions};
use monoform_core::mass_properties::h_value;
use monoform_core::polyhedral::io::{read_obj, write_obj};
use monoform_core::polyhedral::{
    generate_symmetric_mesh, poly_equilibria, poly_mass, ConvexPolyhedron, Feature, DEFAULT_TOL,
};
use monoform_core::quadrature::{integrate_sphere, LatitudeRule, QuadratureSpec};
use monoform_core::radial_family::*;
use monoform_core::surface_analysis::{census, curvature_at, find_equilibria, symmetry_deviation, EquilibriumOptions};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x6d6f6e6f),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn params() -> impl Strategy<Value = ShapeParams> {
    (2u32..=7, 0.01f64..=1.0, 0.0f64..0.99).prop_map(|(n, c, d)| ShapeParams::new(n, c, d).unwrap())
}

fn interior_point(margin: f64) -> impl Strategy<Value = SphericalPoint> {
    (-FRAC_PI_2 + margin..FRAC_PI_2 - margin, 0.0..TAU).prop_map(|(theta, phi)| SphericalPoint { theta, phi })
}

fn any_point() -> impl Strategy<Value = SphericalPoint> {
    (-FRAC_PI_2..=FRAC_PI_2, 0.0..TAU).prop_map(|(theta, phi)| SphericalPoint { theta, phi })
}

fn sphere_points(count: usize) -> impl Strategy<Value = Vec<[f64; 3]>> {
    prop::collection::vec((-1.0f64..=1.0, 0.0..TAU), count).prop_map(|v| {
        v.into_iter()
            .map(|(z, phi): (f64, f64)| {
                let r = (1.0 - z * z).sqrt();
                [r * phi.cos(), r * phi.sin(), z]
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn profile_is_strictly_increasing(c in 0.001f64..=1.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(eval_big_f(c, lo).unwrap() < eval_big_f(c, hi).unwrap());
    }

    #[test]
    fn profile_endpoint_slopes_are_one(c in 0.01f64..=1.0) {
        let h = 1e-6;
        let right = (eval_big_f(c, h).unwrap() - eval_big_f(c, 0.0).unwrap()) / h;
        let left = (eval_big_f(c, 1.0).unwrap() - eval_big_f(c, 1.0 - h).unwrap()) / h;
        prop_assert!((right - 1.0).abs() < 1e-4, "{}", right);
        prop_assert!((left - 1.0).abs() < 1e-4, "{}", left);
    }

    #[test]
    fn profile_vanishes_as_c_shrinks(x in 0.0f64..0.95) {
        let values: Vec<f64> = (2..=10).map(|k| eval_big_f(10f64.powi(-k), x).unwrap()).collect();
        for w in values.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        prop_assert!(values[values.len() - 1] < 1e-6);
    }

    #[test]
    fn rho_tends_to_the_limit_profile(n in 2u32..=6, p in interior_point(0.05)) {
        let limit = eval_rho0(n, &p).unwrap();
        let errs: Vec<f64> = [1e-3, 1e-5, 1e-7]
            .iter()
            .map(|&c| (eval_rho(&ShapeParams::new(n, c, 0.0).unwrap(), &p) - limit).abs())
            .collect();
        prop_assert!(errs[1] <= errs[0] + 1e-15 && errs[2] <= errs[1] + 1e-15, "{:?}", errs);
        prop_assert!(errs[2] < 1e-4, "{:?}", errs);
    }

    #[test]
    fn dihedral_symmetry_of_rho(pr in params(), p in any_point()) {
        let r = eval_rho(&pr, &p);
        let rot = SphericalPoint { theta: p.theta, phi: (p.phi + TAU / pr.n() as f64).rem_euclid(TAU) };
        let refl = SphericalPoint { theta: p.theta, phi: (-p.phi).rem_euclid(TAU) };
        prop_assert!((eval_rho(&pr, &rot) - r).abs() <= 1e-12);
        prop_assert!((eval_rho(&pr, &refl) - r).abs() <= 1e-12);
    }

    #[test]
    fn rho_and_radius_ranges(pr in params(), p in any_point()) {
        let r = eval_rho(&pr, &p);
        prop_assert!((-1.0..=1.0).contains(&r));
        let big_r = eval_radius(&pr, &p);
        prop_assert!(big_r >= 1.0 - pr.d() && big_r <= 1.0 + pr.d());
    }

    #[test]
    fn jet_matches_finite_differences(pr in params(), p in interior_point(0.05)) {
        let j = jet(&pr, &p);
        let s = pr.c().sqrt();
        let fd = fd_jet(&pr, p.theta, p.phi, 1e-3 * s, 3e-3 * s);
        prop_assert!(rel(&[j.rho_theta, j.rho_phi], &fd[..2]) <= 1e-6);
        prop_assert!(rel(&[j.rho_tt, j.rho_tp, j.rho_pp], &fd[2..]) <= 1e-6);
        prop_assert!((j.radius - eval_radius(&pr, &p)).abs() < 1e-15);
    }

    #[test]
    fn curvature_sample_identities(pr in params(), p in any_point()) {
        let s = curvature_at(&pr, &p).unwrap();
        prop_assert!((s.gaussian - s.kappa1 * s.kappa2).abs() <= 1e-12 * s.gaussian.abs().max(1.0));
        prop_assert!((s.mean - 0.5 * (s.kappa1 + s.kappa2)).abs() <= 1e-12 * s.mean.abs().max(1.0));
        prop_assert!(s.kappa1 <= s.kappa2);
    }

    #[test]
    fn poles_are_umbilic(pr in params()) {
        for q in [SphericalPoint::NORTH, SphericalPoint::SOUTH] {
            let s = curvature_at(&pr, &q).unwrap();
            prop_assert!((s.kappa1 - s.kappa2).abs() < 1e-6);
        }
    }

    #[test]
    fn mirror_meridians_are_monotone(n in 2u32..=7, c in 0.01f64..0.99, k in 0u32..14, theta in -1.5f64..1.5) {
        let pr = ShapeParams::new(n, c, 0.0).unwrap();
        let phi = (k % (2 * n)) as f64 * PI / n as f64;
        let slope = jet(&pr, &SphericalPoint { theta, phi }).rho_theta;
        prop_assert!(slope > 0.0, "rho_theta = {:e}", slope);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn sin_rule_integrates_polynomials_in_sin_theta(k in 0i32..40, m in 0u32..5) {
        let spec = QuadratureSpec::new(32, 16, LatitudeRule::GaussLegendreSinTheta).unwrap();
        let v = integrate_sphere(&spec, |t, p| t.sin().powi(k) * t.cos() * (m as f64 * p).cos()).unwrap();
        let expected = if m != 0 || k % 2 == 1 { 0.0 } else { TAU * 2.0 / (k as f64 + 1.0) };
        prop_assert!((v - expected).abs() < 1e-12, "{} vs {}", v, expected);
    }

    #[test]
    fn symmetry_deviation_is_negligible(pr in params()) {
        prop_assert!(symmetry_deviation(&pr, 200).unwrap() <= 1e-12);
    }

    #[test]
    fn hull_census_obeys_poincare_hopf(pts in sphere_points(100)) {
        let poly = ConvexPolyhedron::hull(&pts, DEFAULT_TOL).unwrap();
        let (v, e, f) = poly.counts();
        prop_assert_eq!(v as i64 - e as i64 + f as i64, 2);
        let m = poly_mass(&poly).unwrap();
        let r = poly_equilibria(&poly, m.centroid, DEFAULT_TOL).unwrap();
        prop_assert_eq!(r.census.degenerate, 0);
        prop_assert_eq!(r.census.euler_check, 2);
        // each reported equilibrium has a supporting plane: no vertex above it
        for eq in &r.equilibria {
            let foot = eq.foot_point;
            let dir: Vec<f64> = (0..3).map(|k| foot[k] - m.centroid[k]).collect();
            let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            for p in poly.vertices() {
                let h: f64 = (0..3).map(|k| (p[k] - foot[k]) * dir[k] / len).sum();
                prop_assert!(h <= DEFAULT_TOL, "{:?} has vertex {:e} above its plane", eq.feature, h);
            }
            if let Feature::Face(i) = eq.feature {
                let n = poly.planes()[i].normal;
                prop_assert!((0..3).all(|k| (n[k] - dir[k] / len).abs() < 1e-9));
            }
        }
    }

    #[test]
    fn obj_round_trip_is_bit_stable(pts in sphere_points(60)) {
        let poly = ConvexPolyhedron::hull(&pts, DEFAULT_TOL).unwrap();
        let mut a = Vec::new();
        write_obj(&poly, &mut a).unwrap();
        let back = read_obj(a.as_slice()).unwrap().into_polyhedron(DEFAULT_TOL).unwrap();
        prop_assert_eq!(&back, &poly);
        let mut b = Vec::new();
        write_obj(&back, &mut b).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn symmetric_mesh_is_dihedral(n in 2u32..=5, c in 0.02f64..=1.0, d in 0.0f64..0.3, mult in 1usize..4, mt in 8usize..20) {
        let pr = ShapeParams::new(n, c, d).unwrap();
        let m_phi = 2 * n as usize * (mult + 1);
        let poly = generate_symmetric_mesh(&pr, mt, m_phi, DEFAULT_TOL).unwrap();
        let verts = poly.vertices();
        let step = TAU / n as f64;
        let (s, co) = step.sin_cos();
        for v in verts {
            for w in [[co * v[0] - s * v[1], s * v[0] + co * v[1], v[2]], [v[0], -v[1], v[2]]] {
                let near = verts.iter().any(|u| (0..3).all(|k| (u[k] - w[k]).abs() < 1e-12));
                prop_assert!(near);
            }
            let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            prop_assert!((r - 1.0).abs() <= d + 1e-12);
        }
        let mass = poly_mass(&poly).unwrap();
        prop_assert!(mass.centroid[0].abs() < 1e-12 && mass.centroid[1].abs() < 1e-12);
    }

    #[test]
    fn inscribed_volume_grows_under_nested_refinement(n in 2u32..=4, c in 0.05f64..=1.0, d in 0.0f64..0.05) {
        let pr = ShapeParams::new(n, c, d).unwrap();
        let m_phi = 2 * n as usize * 4;
        let coarse = poly_mass(&generate_symmetric_mesh(&pr, 15, m_phi, DEFAULT_TOL).unwrap()).unwrap().volume;
        let fine = poly_mass(&generate_symmetric_mesh(&pr, 31, 2 * m_phi, DEFAULT_TOL).unwrap()).unwrap().volume;
        prop_assert!(fine >= coarse - 1e-12);
    }

    #[test]
    fn smooth_census_obeys_poincare_hopf(c in 0.3f64..=1.0, d in 0.02f64..0.2, qx in -0.2f64..0.2, qz in -0.2f64..0.2) {
        let pr = ShapeParams::new(3, c, d).unwrap();
        let opts = EquilibriumOptions::default();
        let r = find_equilibria(&pr, [qx, 0.05, qz], &opts).unwrap();
        for p in &r.points {
            prop_assert!(p.residual < opts.tol);
        }
        let cen = census(&r.points);
        if cen.degenerate == 0 && r.ambiguous_pairs == 0 {
            prop_assert_eq!(cen.euler_check, 2, "{:?}", r.points);
        }
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn calibration_invariants(n in 2u32..=5, d in 0.0f64..3e-3) {
        let spec = QuadratureSpec::default();
        let loose = solve_c(n, d, &CalibrationOptions { tol: 1e-6, spec }).unwrap();
        let tight = solve_c(n, d, &CalibrationOptions { tol: 1e-11, spec }).unwrap();
        for r in [&loose, &tight] {
            prop_assert!(r.c_star > 0.0 && r.c_star < 1.0);
            let h = |c: f64| h_value(&ShapeParams::new(n, c, d).unwrap(), &spec).unwrap();
            prop_assert!(h(r.bracket.0) <= 0.0 && h(r.bracket.1) >= 0.0);
        }
        prop_assert!(loose.residual < 1e-6 && tight.residual < 1e-11);
        prop_assert!(tight.residual <= loose.residual);
    }
}
