use std::sync::Arc;

use fbms::discretize::{assemble_operators, build_mesh, OperatorSet};
use fbms::steklov::{dirichlet_kernel, jacobi_extend, steklov_spectrum, DtnMap};
use fbms::surface::{catenoid_constants, critical_catenoid, equatorial_disk, End, ParametricSurface};
use fbms::tolerances::Tolerances;
use fbms::Error;

fn ops(s: &ParametricSurface, n_t: usize, n_theta: usize) -> OperatorSet {
    assemble_operators(Arc::new(build_mesh(s, n_t, n_theta).unwrap()))
}

/// `D_eta nu_i / nu_i` on the boundary from a one-sided finite difference of
/// the normal along the conormal, independent of the assembled operators.
#[test]
fn normal_eigenvalues_from_boundary_derivative() {
    let k = catenoid_constants().unwrap();
    let s = critical_catenoid().unwrap();
    let h = 1e-5;
    for theta in [0.3, 1.1, 2.0, 4.0] {
        let g0 = s.geometric_data(k.t0, theta).unwrap();
        let [g1, g2] = [1.0, 2.0].map(|m| s.geometric_data(k.t0 - m * h, theta).unwrap());
        // Outward conormal is +x_t / |x_t| at t = T0.
        let dnu = (g0.normal * 3.0 - g1.normal * 4.0 + g2.normal) / (2.0 * h) / g0.tangents[0].norm();
        let got = [dnu.x / g0.normal.x, dnu.y / g0.normal.y, dnu.z / g0.normal.z];
        let want = k.normal_eigenvalues();
        for i in 0..3 {
            assert!((got[i] - want[i]).abs() < 1e-6, "component {i}: {} vs {}", got[i], want[i]);
        }
    }
}

#[test]
fn catenoid_spectrum_converges_at_second_order() {
    let k = catenoid_constants().unwrap();
    let tol = Tolerances::default();
    let s = critical_catenoid().unwrap();
    let want = [-1.0, -1.0, k.t0 * k.t0 - 1.0];
    let err = |n_t, n_theta| {
        let sp = steklov_spectrum(&ops(&s, n_t, n_theta), 4, &tol).unwrap();
        assert!(sp.weak_residuals.iter().all(|r| *r < 1e-10));
        assert_eq!(sp.count_below(0.95), 3);
        (0..3).map(|i| (sp.eigenvalues[i] - want[i]).abs()).fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(32, 64), err(64, 128));
    assert!(fine < tol.eigenvalue, "{fine}");
    let ratio = coarse / fine;
    assert!((3.0..5.0).contains(&ratio), "refinement ratio {ratio}");
}

#[test]
fn catenoid_kernel_is_the_support_function() {
    let o = ops(&critical_catenoid().unwrap(), 32, 64);
    let modes = dirichlet_kernel(&o, &Tolerances::default()).unwrap();
    assert_eq!(modes.len(), 1);
    let zeta = o.mesh.sample(|g| g.support);
    let m = &o.interior_mass;
    let z = &modes[0].field;
    let corr = m.form(z, &zeta).abs() / (m.form(z, z) * m.form(&zeta, &zeta)).sqrt();
    assert!(corr >= 0.999, "{corr}");
    for &n in &o.partition.boundary {
        assert_eq!(z[n], 0.0);
    }
}

#[test]
fn disk_has_no_kernel_and_classical_spectrum() {
    let o = ops(&equatorial_disk(), 32, 64);
    let tol = Tolerances::default();
    assert!(dirichlet_kernel(&o, &tol).unwrap().is_empty());
    let sp = steklov_spectrum(&o, 5, &tol).unwrap();
    for (got, want) in sp.eigenvalues.iter().zip([0.0, 1.0, 1.0, 2.0, 2.0]) {
        assert!((got - want).abs() < 5e-3, "{got} vs {want}");
    }
}

#[test]
fn disk_extension_of_cosine_is_linear() {
    let o = ops(&equatorial_disk(), 32, 64);
    let x = o.mesh.sample(|g| g.position.x);
    let u = jacobi_extend(&o, &o.partition.trace(&x), &Tolerances::default()).unwrap();
    let err = x.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 5e-3, "{err}");
}

#[test]
fn catenoid_extension_of_normal_component() {
    let o = ops(&critical_catenoid().unwrap(), 32, 64);
    let tol = Tolerances::default();
    let nu1 = o.mesh.sample(|g| g.nu(0));
    let u = jacobi_extend(&o, &o.partition.trace(&nu1), &tol).unwrap();
    let err = nu1.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-2, "{err}");
}

#[test]
fn constant_data_is_incompatible_on_the_catenoid() {
    let o = ops(&critical_catenoid().unwrap(), 32, 64);
    let tol = Tolerances::default();
    let ones = vec![1.0; o.partition.boundary.len()];
    match jacobi_extend(&o, &ones, &tol) {
        Err(Error::IncompatibleBoundaryData { residual, tol: t }) => {
            assert_eq!(t, tol.compatibility);
            assert!(residual > 0.1, "{residual}");
        }
        other => panic!("expected incompatibility, got {other:?}"),
    }
    let dtn = DtnMap::new(&o, &tol).unwrap();
    assert!(dtn.check_compatible(&ones).is_err());
    // Odd data in t is orthogonal to the even kernel flux.
    let odd: Vec<f64> = o.partition.boundary.iter().map(|&n| if o.mesh.node_geometry[n].t > 0.0 { 1.0 } else { -1.0 }).collect();
    assert!(dtn.check_compatible(&odd).is_ok());
}

#[test]
fn requesting_too_many_eigenvalues() {
    let o = ops(&equatorial_disk(), 8, 16);
    let dtn = DtnMap::new(&o, &Tolerances::default()).unwrap();
    assert!(matches!(dtn.spectrum(17), Err(Error::TooManyEigenvalues { requested: 17, available: 16 })));
}

#[test]
fn boundary_ends_carry_half_the_trace() {
    let o = ops(&critical_catenoid().unwrap(), 16, 32);
    let ends: Vec<End> = o.mesh.boundary.iter().map(|c| c.end).collect();
    assert_eq!(ends, vec![End::Min, End::Max]);
    let sp = steklov_spectrum(&o, 1, &Tolerances::default()).unwrap();
    let norms = fbms::report::component_trace_norms(&o.mesh, &sp.boundary_nodes, &sp.boundary_traces[0]);
    assert!((norms[0] - norms[1]).abs() < 1e-8 && (norms[0].powi(2) + norms[1].powi(2) - 1.0).abs() < 1e-8);
}

#[test]
fn refinement_differences_shrink() {
    let s = critical_catenoid().unwrap();
    let tol = Tolerances::default();
    let eig = |n_t, n_theta| steklov_spectrum(&ops(&s, n_t, n_theta), 8, &tol).unwrap().eigenvalues;
    let (a, b, c) = (eig(32, 64), eig(64, 128), eig(96, 192));
    for k in 0..8 {
        let (d1, d2) = ((a[k] - b[k]).abs(), (b[k] - c[k]).abs());
        assert!(d2 <= 4.0 * d1, "eigenvalue {k}: {d2:e} vs {d1:e}");
    }
}
