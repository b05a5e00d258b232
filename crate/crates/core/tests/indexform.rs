use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use fbms::discretize::{assemble_operators, build_mesh, OperatorSet};
use fbms::indexform::{boundary_tensor_basis, gauss_map_matrix, index_form_value, s_orthogonal_basis};
use fbms::steklov::{normal_traces, DtnMap};
use fbms::surface::{catenoid_constants, critical_catenoid, equatorial_disk, rotated_catenoid, ParametricSurface, DISK_HOLE_RADIUS};
use fbms::tolerances::Tolerances;
use nalgebra::{Matrix3, Rotation3, Vector3};

fn ops(s: &ParametricSurface, n_t: usize, n_theta: usize) -> OperatorSet {
    assemble_operators(Arc::new(build_mesh(s, n_t, n_theta).unwrap()))
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// `-2 int nu_i^2` by a 2D Simpson rule over pointwise geometry, independent
/// of the mesh quadrature.
fn identity_diagonal(s: &ParametricSurface, i: usize) -> f64 {
    let d = s.domain;
    let inner = |t: f64| {
        simpson(
            |th| {
                let g = s.geometric_data(t, th).unwrap();
                g.nu(i).powi(2) * g.area_element
            },
            d.theta_range.0,
            d.theta_range.1,
            64,
        )
    };
    -2.0 * simpson(inner, d.t_range.0, d.t_range.1, 1000)
}

#[test]
fn closed_forms_agree_with_direct_integration() {
    let k = catenoid_constants().unwrap();
    let s = critical_catenoid().unwrap();
    let c2 = k.c * k.c;
    let m11 = -4.0 * PI * c2 * k.t0;
    let m33 = -4.0 * PI * c2 * (k.t0.sinh() * k.t0.cosh() - k.t0);
    assert!((identity_diagonal(&s, 0) / m11 - 1.0).abs() < 1e-9);
    let d33 = identity_diagonal(&s, 2);
    assert!((d33 / m33 - 1.0).abs() < 1e-9, "{d33} vs {m33}");
    // R: two circles of radius r = c cosh T0 at heights +-c T0.
    let r = k.c * k.t0.cosh();
    let r11 = 2.0 * PI * r.powi(3);
    let r33 = 2.0 * 2.0 * PI * r * (k.c * k.t0).powi(2);
    assert!((r11 - 2.0 * PI / k.t0.powi(3)).abs() < 1e-12);
    assert!((r33 - 4.0 * PI * c2 * k.t0).abs() < 1e-12);
}

#[test]
fn catenoid_index_matrices() {
    let k = catenoid_constants().unwrap();
    let im = gauss_map_matrix(&ops(&critical_catenoid().unwrap(), 64, 128));
    assert!(im.max_discrepancy() <= 1e-3, "{}", im.max_discrepancy());
    assert!(im.m_off_diagonal() < 1e-10);
    assert!(im.is_negative_definite() && im.m_eigen.values[2] <= -0.1);
    let c2 = k.c * k.c;
    let r = Matrix3::from_diagonal(&Vector3::new(2.0 * PI / k.t0.powi(3), 2.0 * PI / k.t0.powi(3), 4.0 * PI * c2 * k.t0));
    assert!((im.r - r).amax() < 1e-10, "{}", im.r);
    // Off-diagonal identity: M_ij = 2 R_ij, both zero here.
    assert!(im.m_identity[(0, 2)].abs() < 1e-12);
}

#[test]
fn rotated_catenoid_matrices_rotate() {
    let base = gauss_map_matrix(&ops(&critical_catenoid().unwrap(), 16, 32));
    let o = ops(&rotated_catenoid(FRAC_PI_4).unwrap(), 16, 32);
    let rot = gauss_map_matrix(&o);
    let q = Rotation3::from_axis_angle(&Vector3::x_axis(), FRAC_PI_4).into_inner();
    assert!((rot.r - q * base.r * q.transpose()).amax() < 1e-10);
    assert!((rot.m - q * base.m * q.transpose()).amax() < 1e-8);
    let frame = boundary_tensor_basis(&o.mesh).vectors;
    // Smallest R eigenvalue belongs to the rotated axis of symmetry.
    let axis = q * Vector3::z();
    assert!((frame.column(0).dot(&axis).abs() - 1.0).abs() < 1e-10);
}

#[test]
fn s_orthogonal_basis_on_catenoid() {
    let o = ops(&critical_catenoid().unwrap(), 32, 64);
    let dtn = DtnMap::new(&o, &Tolerances::default()).unwrap();
    let b = s_orthogonal_basis(&dtn, &normal_traces(&o)).unwrap();
    assert!(b.max_off_diagonal_s() < 1e-10);
    assert!((b.coefficients.clone() - nalgebra::DMatrix::identity(3, 3)).amax() < 1e-8);
    for i in 0..3 {
        let s_ii = b.pairwise_s[(i, i)];
        assert!((s_ii - b.predicted_s[(i, i)]).abs() < 1e-8 * s_ii.abs().max(1.0));
    }
}

#[test]
fn disk_vertical_component() {
    let o = ops(&equatorial_disk(), 32, 64);
    let im = gauss_map_matrix(&o);
    let exact = -2.0 * PI * (1.0 - DISK_HOLE_RADIUS * DISK_HOLE_RADIUS);
    assert!((im.m_identity[(2, 2)] - exact).abs() < 1e-6);
    assert_eq!(im.m[(0, 0)], 0.0);
    let one = vec![1.0; o.n_nodes()];
    assert!((index_form_value(&o, &one, &one) - im.m[(2, 2)]).abs() < 1e-12);
}
