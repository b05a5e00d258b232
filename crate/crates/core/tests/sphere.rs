use std::f64::consts::{FRAC_PI_4, TAU};
use std::sync::Arc;

use fbms::discretize::{assemble_operators, build_mesh, OperatorSet};
use fbms::indexform::boundary_tensor_basis;
use fbms::sphere::{
    boundary_curvature_identity, gauss_curve_curvature, pullback_problem, reconstruct_surface, roundness,
    segment_and_roundness_test, segment_test_in_frame, square_map, zeta_check,
};
use fbms::steklov::steklov_spectrum;
use fbms::surface::{catenoid_constants, critical_catenoid, equatorial_disk, rotated_catenoid, End, ParametricSurface, Vec3};
use fbms::tolerances::Tolerances;
use fbms::Error;

fn ops(s: &ParametricSurface, n_t: usize, n_theta: usize) -> OperatorSet {
    assemble_operators(Arc::new(build_mesh(s, n_t, n_theta).unwrap()))
}

#[test]
fn transformed_problem_has_the_same_spectrum() {
    let tol = Tolerances::default();
    let o = ops(&critical_catenoid().unwrap(), 32, 64);
    let sp = pullback_problem(&o, 6, &tol).unwrap();
    let base = steklov_spectrum(&o, 6, &tol).unwrap();
    for (a, b) in sp.spectrum.eigenvalues.iter().zip(&base.eigenvalues) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
    assert!(sp.boundary_integrals.iter().all(|v| v.abs() <= tol.boundary_integral));
    assert!(sp.conformality_residual < 1e-12);
    assert!(sp.reciprocity_residual < 1e-8);
    for (s1, e) in sp.s1_values.iter().zip(&sp.s1_expected) {
        assert!((s1 - e).abs() < 1e-8 * e.abs().max(1.0));
    }
}

#[test]
fn support_function_is_a_dirichlet_eigenfunction() {
    let z = zeta_check(&ops(&critical_catenoid().unwrap(), 32, 64), &Tolerances::default()).unwrap();
    assert!(z.interior_residual <= 1e-3, "{}", z.interior_residual);
    assert!(z.boundary_error <= 1e-3);
    assert!(z.boundary_derivative.iter().all(|d| (d.abs() - 1.0).abs() <= 1e-3));
    assert!(z.boundary_trace < 1e-15);
    assert!(z.no_interior_zeros);
}

#[test]
fn reconstruction_from_support_function() {
    let r = reconstruct_surface(&critical_catenoid().unwrap(), 64, 128, 1e-10).unwrap();
    assert!(r.max_error <= 1e-3, "{}", r.max_error);
    assert!(r.max_error_analytic < 1e-12);
    assert!(r.boundary_norm_error <= 1e-3);
    assert!(r.boundary_normal_error < 1e-12);
}

/// Circumradius of three boundary points: an oracle for the curvature of the
/// boundary circle that does not touch the surface derivatives.
fn circumradius(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let (ab, bc, ca) = ((b - a).norm(), (c - b).norm(), (a - c).norm());
    ab * bc * ca / (2.0 * (b - a).cross(&(c - a)).norm())
}

#[test]
fn boundary_curvature_identity_on_catenoid() {
    let k = catenoid_constants().unwrap();
    let s = critical_catenoid().unwrap();
    let r = circumradius(s.position(k.t0, 0.0), s.position(k.t0, 2.0), s.position(k.t0, 4.0));
    assert!((1.0 / (r * r) - k.t0 * k.t0).abs() < 1e-12);
    for c in boundary_curvature_identity(&s, 32).unwrap() {
        assert!(c.identity_residual() < 1e-12);
        assert!((c.kappa_sq - k.t0 * k.t0).abs() < 1e-12);
        assert!((c.kappa_n + 1.0).abs() < 1e-12);
        assert!((c.h_norm_over_sqrt2 - c.f.abs()).abs() < 1e-12);
    }
    // Gauss image of the boundary has curvature sinh T0 = 1 / |h(eta, eta)|.
    let kg = gauss_curve_curvature(&s, End::Max, 0.7).unwrap().unwrap();
    assert!((kg.abs() - k.t0.sinh()).abs() < 1e-7, "{kg}");
}

#[test]
fn segment_test_on_catenoid() {
    let k = catenoid_constants().unwrap();
    let seg = segment_and_roundness_test(&critical_catenoid().unwrap(), k.normal_eigenvalues(), 128).unwrap();
    assert!(seg.plane_residual <= 1e-12);
    assert!(seg.max_line_residual() <= 1e-12);
    assert!(seg.lambda_orthogonality.as_ref().unwrap().iter().all(|o| *o <= 1e-12));
    assert!(seg.max_roundness() <= 1e-12);
    let d = seg.directions[0];
    assert!((d.x.abs() - 0.5f64.sqrt()).abs() < 1e-12 && d.z.abs() < 1e-12);
    // f is constant on the boundary: 1/f^2 = P s + Q with P = 0, which is
    // the a_3 = 0 (A = 0) case of the curvature formula.
    for (p, q, res) in &seg.inverse_f_sq_fits {
        assert!(p.abs() < 1e-9 && res.abs() < 1e-9);
        assert!((q - 1.0 / k.boundary_f().powi(2)).abs() < 1e-9);
    }
}

#[test]
fn segment_test_needs_the_eigenframe_on_rotated_catenoid() {
    let k = catenoid_constants().unwrap();
    let s = rotated_catenoid(FRAC_PI_4).unwrap();
    let plain = segment_and_roundness_test(&s, k.normal_eigenvalues(), 128).unwrap();
    assert!(plain.max_line_residual() > 0.1);
    let frame = boundary_tensor_basis(&build_mesh(&s, 16, 64).unwrap()).vectors;
    let lambdas = [k.t0 * k.t0 - 1.0, -1.0, -1.0];
    let seg = segment_test_in_frame(&s, &frame, lambdas, 128).unwrap();
    assert!(seg.max_line_residual() <= 1e-12, "{}", seg.max_line_residual());
    assert!(seg.lambda_orthogonality.as_ref().unwrap().iter().all(|o| *o <= 1e-12));
}

#[test]
fn perturbed_boundary_is_not_round() {
    let pts: Vec<Vec3> = (0..200)
        .map(|k| {
            let th = TAU * k as f64 / 200.0;
            Vec3::new(0.8 * th.cos(), 0.8 * th.sin(), 0.6 + 0.05 * (3.0 * th).sin()).normalize()
        })
        .collect();
    assert!(roundness(&pts).unwrap().residual() >= 1e-3);
    let img: Vec<Vec3> = pts.iter().map(square_map).collect();
    assert!(img.iter().all(|p| (p.sum() - 1.0).abs() < 1e-14));
}

#[test]
fn disk_has_degenerate_gauss_map() {
    let o = ops(&equatorial_disk(), 16, 32);
    match pullback_problem(&o, 3, &Tolerances::default()) {
        Err(Error::DegenerateGaussMap { norm_h_sq, .. }) => assert_eq!(norm_h_sq, 0.0),
        other => panic!("expected a degenerate Gauss map, got {:?}", other.map(|p| p.spectrum.eigenvalues)),
    }
    assert!(reconstruct_surface(&equatorial_disk(), 16, 32, 1e-10).is_err());
}
