use super::pullback::check_gauss_map;
use crate::error::{Error, Result};
use crate::surface::{GeometricData, ParametricSurface, Vec3};

/// Errors of the support-function reconstruction `X^zeta = grad_1 zeta + zeta nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    /// `max |X^zeta - X|` with `grad_1 zeta` from second-order differences of
    /// nodal `zeta`.
    pub max_error: f64,
    /// Same with the analytic gradient `(X . nu_t, X . nu_theta)`.
    pub max_error_analytic: f64,
    /// `max | |X^zeta| - 1 |` on the free boundary.
    pub boundary_norm_error: f64,
    /// `max |X^zeta . nu - zeta|` on the free boundary.
    pub boundary_normal_error: f64,
    /// `max |zeta|` on the free boundary.
    pub boundary_zeta: f64,
}

fn lift(g: &GeometricData, dzeta: [f64; 2]) -> Vec3 {
    let g1 = g.gauss_metric();
    let inv = g1.try_inverse().unwrap_or_else(nalgebra::Matrix2::zeros);
    let c = inv * nalgebra::Vector2::new(dzeta[0], dzeta[1]);
    g.normal_derivs[0] * c[0] + g.normal_derivs[1] * c[1] + g.normal * g.support
}

/// Reconstruct the surface from its support function on an
/// `n_t x n_theta` cell grid and compare with the immersion.
pub fn reconstruct_surface(surface: &ParametricSurface, n_t: usize, n_theta: usize, gauss_floor: f64) -> Result<Reconstruction> {
    let mesh = crate::discretize::build_mesh(surface, n_t, n_theta)?;
    let ops = crate::discretize::assemble_operators(std::sync::Arc::new(mesh));
    check_gauss_map(&ops, gauss_floor)?;
    let mesh = &ops.mesh;
    let lay = mesh.layout;
    if !lay.periodic {
        return Err(Error::InvalidMesh("support-function reconstruction needs a periodic theta direction".into()));
    }
    let zeta = mesh.sample(|g| g.support);
    let (rows, cols) = (lay.rows, lay.cols);
    let z = |i: usize, j: usize| zeta[lay.node(i, j % cols)];
    let mut out = Reconstruction { max_error: 0.0, max_error_analytic: 0.0, boundary_norm_error: 0.0, boundary_normal_error: 0.0, boundary_zeta: 0.0 };
    for i in 0..rows {
        for j in 0..cols {
            let g = &mesh.node_geometry[lay.node(i, j)];
            let dt = if i == 0 {
                (-3.0 * z(0, j) + 4.0 * z(1, j) - z(2, j)) / (2.0 * mesh.dt)
            } else if i == rows - 1 {
                (3.0 * z(i, j) - 4.0 * z(i - 1, j) + z(i - 2, j)) / (2.0 * mesh.dt)
            } else {
                (z(i + 1, j) - z(i - 1, j)) / (2.0 * mesh.dt)
            };
            let ds = (z(i, j + 1) - z(i, j + cols - 1)) / (2.0 * mesh.dtheta);
            let x = lift(g, [dt, ds]);
            let xa = lift(g, [g.position.dot(&g.normal_derivs[0]), g.position.dot(&g.normal_derivs[1])]);
            out.max_error = out.max_error.max((x - g.position).norm());
            out.max_error_analytic = out.max_error_analytic.max((xa - g.position).norm());
            if g.boundary.is_some() {
                out.boundary_norm_error = out.boundary_norm_error.max((x.norm() - 1.0).abs());
                out.boundary_normal_error = out.boundary_normal_error.max((x.dot(&g.normal) - g.support).abs());
                out.boundary_zeta = out.boundary_zeta.max(g.support.abs());
            }
        }
    }
    Ok(out)
}
