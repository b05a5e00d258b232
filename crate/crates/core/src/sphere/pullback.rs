use std::collections::HashMap;

use crate::discretize::{
    assemble_boundary_mass_like, assemble_mass_like, interior_jacobi_residual, weak_conormal, GridOperator, OperatorSet,
};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::steklov::{DtnMap, SteklovSpectrum};
use crate::surface::End;
use crate::tolerances::Tolerances;

use super::curvature::gauss_curve_curvature;

/// Fail unless `|h|^2 >= floor` at every node and quadrature point.
pub fn check_gauss_map(ops: &OperatorSet, floor: f64) -> Result<()> {
    let mesh = &ops.mesh;
    let points = mesh
        .node_geometry
        .iter()
        .chain(mesh.quadrature.iter().map(|q| &q.geo))
        .chain(mesh.boundary.iter().flat_map(|c| c.quadrature.iter().map(|q| &q.geo)));
    for g in points {
        if !(g.norm_h_sq >= floor) {
            return Err(Error::DegenerateGaussMap { norm_h_sq: g.norm_h_sq, t: g.t, theta: g.theta });
        }
    }
    Ok(())
}

/// Forms of `(Delta_1 + 2) u = 0`, `D_1 u = |kappa| lambda u` on the Gauss
/// image, assembled from the pullback metric `g1 = d nu^T d nu`.
#[derive(Debug, Clone)]
pub struct TransformedForms {
    /// `K` unchanged, potential `2 M_1`, interior mass `M_1`, boundary mass
    /// `B_1 = int |kappa| u phi ds_1`.
    pub ops: OperatorSet,
    /// `int u phi ds_1` without the curvature weight.
    pub arclength_mass: GridOperator,
}

fn end_of(ops: &OperatorSet, t: f64) -> End {
    let lo = ops.mesh.surface.domain.t_range.0;
    let hi = ops.mesh.surface.domain.t_range.1;
    if (t - lo).abs() <= (t - hi).abs() {
        End::Min
    } else {
        End::Max
    }
}

pub fn transformed_forms(ops: &OperatorSet, tol: &Tolerances) -> Result<TransformedForms> {
    check_gauss_map(ops, tol.gauss_floor)?;
    let mesh = &ops.mesh;
    let surface = &mesh.surface;
    let m1 = assemble_mass_like(mesh, |g| g.gauss_metric().determinant().max(0.0).sqrt());
    let potential = GridOperator::combine(&[(2.0, &m1)]);
    let arclength_mass = assemble_boundary_mass_like(mesh, |g| g.normal_derivs[1].norm());
    // Curvature weights are evaluated up front so errors propagate.
    let mut kappa = HashMap::new();
    for comp in &mesh.boundary {
        for q in &comp.quadrature {
            let k = gauss_curve_curvature(surface, end_of(ops, q.geo.t), q.geo.theta)?
                .ok_or(Error::DegenerateGaussMap { norm_h_sq: q.geo.norm_h_sq, t: q.geo.t, theta: q.geo.theta })?;
            kappa.insert((q.geo.t.to_bits(), q.geo.theta.to_bits()), k.abs());
        }
    }
    let boundary_mass = assemble_boundary_mass_like(mesh, |g| kappa[&(g.t.to_bits(), g.theta.to_bits())] * g.normal_derivs[1].norm());
    Ok(TransformedForms {
        ops: OperatorSet {
            mesh: mesh.clone(),
            stiffness: ops.stiffness.clone(),
            potential,
            interior_mass: m1,
            boundary_mass,
            partition: ops.partition.clone(),
        },
        arclength_mass,
    })
}

/// The transformed eigenproblem and its diagnostics.
#[derive(Debug, Clone)]
pub struct SphericalProblem {
    /// `|h|^2 / 2` per node.
    pub g1_weights: Vec<f64>,
    /// `max |g1 - (|h|^2/2) g| / |g1|` over nodes.
    pub conformality_residual: f64,
    /// `|kappa|` of the Gauss image boundary per boundary node.
    pub kappa_abs: Vec<f64>,
    /// `max | |kappa| |h(eta, eta)| - 1 |` over boundary nodes.
    pub reciprocity_residual: f64,
    pub spectrum: SteklovSpectrum,
    /// `S_1(u, u)` for each eigenfunction.
    pub s1_values: Vec<f64>,
    /// `(lambda - 1) B_1(u, u)`.
    pub s1_expected: Vec<f64>,
    /// `int_{dOmega} u ds_1` for each eigenfunction.
    pub boundary_integrals: Vec<f64>,
}

/// Solve the transformed problem for its lowest `n_eig` eigenpairs.
pub fn pullback_problem(ops: &OperatorSet, n_eig: usize, tol: &Tolerances) -> Result<SphericalProblem> {
    let forms = transformed_forms(ops, tol)?;
    let mesh = &ops.mesh;
    let g1_weights = mesh.sample(|g| g.norm_h_sq / 2.0);
    let conformality_residual = mesh
        .node_geometry
        .iter()
        .map(|g| {
            let g1 = g.gauss_metric();
            (g1 - g.metric * (g.norm_h_sq / 2.0)).amax() / g1.amax()
        })
        .fold(0.0, f64::max);
    let mut kappa_abs = Vec::with_capacity(ops.partition.boundary.len());
    let mut reciprocity_residual = 0.0f64;
    for &n in &ops.partition.boundary {
        let g = &mesh.node_geometry[n];
        let k = gauss_curve_curvature(&mesh.surface, end_of(ops, g.t), g.theta)?
            .ok_or(Error::DegenerateGaussMap { norm_h_sq: g.norm_h_sq, t: g.t, theta: g.theta })?
            .abs();
        let f = g.boundary.expect("boundary node").f;
        reciprocity_residual = reciprocity_residual.max((k * f.abs() - 1.0).abs());
        kappa_abs.push(k);
    }

    let t_ops = &forms.ops;
    let spectrum = DtnMap::new(t_ops, tol)?.spectrum(n_eig)?;
    let one = vec![1.0; ops.n_nodes()];
    let arc = forms.arclength_mass.apply(&one);
    let mut s1_values = Vec::with_capacity(n_eig);
    let mut s1_expected = Vec::with_capacity(n_eig);
    let mut boundary_integrals = Vec::with_capacity(n_eig);
    for (u, &lambda) in spectrum.extensions.iter().zip(&spectrum.eigenvalues) {
        let b1 = t_ops.boundary_mass.form(u, u);
        s1_values.push(t_ops.stiffness.form(u, u) - t_ops.potential.form(u, u) - b1);
        s1_expected.push((lambda - 1.0) * b1);
        boundary_integrals.push(dot(&arc, u));
    }
    Ok(SphericalProblem {
        g1_weights,
        conformality_residual,
        kappa_abs,
        reciprocity_residual,
        spectrum,
        s1_values,
        s1_expected,
        boundary_integrals,
    })
}

/// Checks that the support function is the Dirichlet eigenfunction of
/// `Delta_1` with eigenvalue 2.
#[derive(Debug, Clone)]
pub struct ZetaCheck {
    /// Interior residual of `(K - 2 M_1) zeta`, relative to
    /// `|K - 2 M_1|_inf |zeta|_inf`.
    pub interior_residual: f64,
    /// Weak `(D_1)_{eta_1} zeta` per boundary node.
    pub boundary_derivative: Vec<f64>,
    /// Closed form `-h(eta, eta) / |h(eta, eta)|` per boundary node.
    pub boundary_closed_form: Vec<f64>,
    /// `max |weak - closed form|`.
    pub boundary_error: f64,
    /// `max |zeta|` on the boundary.
    pub boundary_trace: f64,
    /// `zeta` keeps one sign at interior nodes (a proxy for star-shapedness).
    pub no_interior_zeros: bool,
}

pub fn zeta_check(ops: &OperatorSet, tol: &Tolerances) -> Result<ZetaCheck> {
    let forms = transformed_forms(ops, tol)?;
    let zeta = ops.mesh.sample(|g| g.support);
    let interior_residual = interior_jacobi_residual(&forms.ops, &zeta);
    let arc_ops = OperatorSet { boundary_mass: forms.arclength_mass.clone(), ..forms.ops.clone() };
    let boundary_derivative = weak_conormal(&arc_ops, &zeta, f64::INFINITY)?;
    let boundary_closed_form: Vec<f64> = ops
        .partition
        .boundary
        .iter()
        .map(|&n| {
            let h = ops.mesh.node_geometry[n].boundary.expect("boundary node").h_eta_eta;
            -h / h.abs()
        })
        .collect();
    let boundary_error = boundary_derivative.iter().zip(&boundary_closed_form).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let boundary_trace = ops.partition.boundary.iter().map(|&n| zeta[n].abs()).fold(0.0, f64::max);
    let interior: Vec<f64> = ops.partition.interior.iter().map(|&n| zeta[n]).collect();
    let no_interior_zeros = interior.iter().all(|&z| z > 0.0) || interior.iter().all(|&z| z < 0.0);
    Ok(ZetaCheck { interior_residual, boundary_derivative, boundary_closed_form, boundary_error, boundary_trace, no_interior_zeros })
}
