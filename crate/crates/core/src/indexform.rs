//! The second-variation form `S(f, h) = K(f, h) - P(f, h) - B(f, h)` and its
//! integral identities on the normal components.

use nalgebra::{DMatrix, Matrix3};
use serde::Serialize;

use crate::discretize::{OperatorSet, SurfaceMesh};
use crate::error::{Error, Result};
use crate::linalg::{sym_eigen3, SymEigen3};
use crate::steklov::{fit_invariant, DtnMap};

/// `S(f, h)` on nodal fields.
pub fn index_form_value(ops: &OperatorSet, f: &[f64], h: &[f64]) -> f64 {
    ops.stiffness.form(f, h) - ops.potential.form(f, h) - ops.boundary_mass.form(f, h)
}

/// Eigen-data of a symmetric 3x3 matrix in serialisable form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigen3 {
    pub values: [f64; 3],
    /// Eigenvectors as rows.
    pub vectors: [[f64; 3]; 3],
}

impl From<SymEigen3> for Eigen3 {
    fn from(e: SymEigen3) -> Self {
        let v = e.vectors;
        Eigen3 { values: e.values, vectors: std::array::from_fn(|k| std::array::from_fn(|i| v[(i, k)])) }
    }
}

fn rows(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

/// `M(e_i, e_j) = S(nu_i, nu_j)` and `R(e_i, e_j) = int_{dSigma} X_i X_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexMatrices {
    /// Through the assembled forms on nodal samples of `nu`.
    pub m: Matrix3<f64>,
    /// Through the identities: `-2 int nu_i^2` on the diagonal,
    /// `2 int_{dSigma} X_i X_j` off it, both by direct quadrature.
    pub m_identity: Matrix3<f64>,
    /// `|m - m_identity|`, relative to `|m_identity_ii|` on the diagonal and
    /// to `max_k |m_identity_kk|` off it.
    pub discrepancy: Matrix3<f64>,
    pub r: Matrix3<f64>,
    pub m_eigen: SymEigen3,
    pub r_eigen: SymEigen3,
}

impl IndexMatrices {
    pub fn max_discrepancy(&self) -> f64 {
        self.discrepancy.amax()
    }

    /// `max |M_ij|, i != j`.
    pub fn m_off_diagonal(&self) -> f64 {
        off_diagonal(&self.m)
    }

    pub fn is_negative_definite(&self) -> bool {
        self.m_eigen.values[2] < 0.0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "M": rows(&self.m),
            "M_identity": rows(&self.m_identity),
            "discrepancy": rows(&self.discrepancy),
            "R": rows(&self.r),
            "M_eigen": Eigen3::from(self.m_eigen),
            "R_eigen": Eigen3::from(self.r_eigen),
        })
    }
}

pub fn off_diagonal(m: &Matrix3<f64>) -> f64 {
    m[(0, 1)].abs().max(m[(0, 2)].abs()).max(m[(1, 2)].abs())
}

/// `R(e_i, e_j) = int_{dSigma} X_i X_j` by boundary quadrature.
pub fn boundary_tensor(mesh: &SurfaceMesh) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| mesh.integrate_boundary(|g| g.position[i] * g.position[j]))
}

/// Orthonormal eigenbasis of `R` (columns), ascending eigenvalues, with the
/// closed-form solver's tie-break and sign convention.
pub fn boundary_tensor_basis(mesh: &SurfaceMesh) -> SymEigen3 {
    sym_eigen3(&boundary_tensor(mesh))
}

/// Assemble `M` by the forms and by the identities, and `R`.
pub fn gauss_map_matrix(ops: &OperatorSet) -> IndexMatrices {
    let nu: [Vec<f64>; 3] = std::array::from_fn(|i| ops.mesh.sample(|g| g.nu(i)));
    let m = Matrix3::from_fn(|i, j| index_form_value(ops, &nu[i], &nu[j]));
    let m = (m + m.transpose()) * 0.5;
    let r = boundary_tensor(&ops.mesh);
    let m_identity = Matrix3::from_fn(|i, j| {
        if i == j {
            -2.0 * ops.mesh.integrate_area(|g| g.nu(i) * g.nu(i))
        } else {
            2.0 * r[(i, j)]
        }
    });
    let diag_scale = (0..3).map(|k| m_identity[(k, k)].abs()).fold(0.0, f64::max);
    let discrepancy = Matrix3::from_fn(|i, j| {
        let scale = if i == j { m_identity[(i, i)].abs() } else { diag_scale };
        let d = (m[(i, j)] - m_identity[(i, j)]).abs();
        if scale == 0.0 {
            d
        } else {
            d / scale
        }
    });
    IndexMatrices { m, m_identity, discrepancy, m_eigen: sym_eigen3(&m), r_eigen: sym_eigen3(&r), r }
}

/// Eigenfunction basis of an eigen-subspace with pairwise vanishing `S`.
#[derive(Debug, Clone)]
pub struct SOrthogonalBasis {
    pub eigenvalues: Vec<f64>,
    /// Unit coefficient vectors `a_k` (columns): `u_k = sum_j a_jk v_j`.
    pub coefficients: DMatrix<f64>,
    /// Boundary traces of the basis functions.
    pub traces: Vec<Vec<f64>>,
    /// `S(u_i, u_j)` on the discrete Jacobi extensions.
    pub pairwise_s: DMatrix<f64>,
    /// `B(u_i, u_j)`.
    pub boundary_products: DMatrix<f64>,
    /// `(lambda_j - 1) B(u_i, u_j)`.
    pub predicted_s: DMatrix<f64>,
    /// `(lambda_i - 1) B(u_i, u_j)`.
    pub predicted_s_swapped: DMatrix<f64>,
    /// Residual of the eigen-subspace fit.
    pub subspace_residual: f64,
}

impl SOrthogonalBasis {
    /// Largest off-diagonal `|S(u_i, u_j)|`.
    pub fn max_off_diagonal_s(&self) -> f64 {
        let n = self.pairwise_s.nrows();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.pairwise_s[(i, j)].abs());
                }
            }
        }
        m
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mat = |m: &DMatrix<f64>| -> Vec<Vec<f64>> { m.row_iter().map(|r| r.iter().copied().collect()).collect() };
        serde_json::json!({
            "eigenvalues": self.eigenvalues,
            "coefficients": mat(&self.coefficients),
            "pairwise_S": mat(&self.pairwise_s),
            "boundary_products": mat(&self.boundary_products),
            "subspace_residual": self.subspace_residual,
        })
    }
}

/// Relative gap below which restricted eigenvalues form one cluster.
const CLUSTER_TOL: f64 = 1e-8;

/// Replace the basis of every repeated-eigenvalue cluster by the
/// `G`-orthonormalised projections of the canonical axes, taken greedily by
/// largest projection. Removes the arbitrary rotation the dense solver
/// leaves inside a degenerate eigenspace.
fn canonical_within_clusters(values: &[f64], vectors: &DMatrix<f64>, gram: &DMatrix<f64>) -> DMatrix<f64> {
    let m = values.len();
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let mut out = vectors.clone();
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && values[end] - values[end - 1] <= CLUSTER_TOL * scale {
            end += 1;
        }
        if end - start > 1 {
            let v = vectors.columns(start, end - start).into_owned();
            let proj = &v * v.transpose() * gram;
            let gnorm = |x: &nalgebra::DVector<f64>| (x.transpose() * gram * x)[0].max(0.0).sqrt();
            let mut used = vec![false; m];
            let mut basis: Vec<nalgebra::DVector<f64>> = Vec::new();
            for _ in start..end {
                let mut best: Option<(usize, nalgebra::DVector<f64>, f64)> = None;
                for j in (0..m).filter(|&j| !used[j]) {
                    let mut x = proj.column(j).into_owned();
                    for b in &basis {
                        let c = (b.transpose() * gram * &x)[0];
                        x -= b * c;
                    }
                    let n = gnorm(&x);
                    if best.as_ref().map_or(true, |(_, _, bn)| n > *bn + 1e-12) {
                        best = Some((j, x, n));
                    }
                }
                let (j, x, n) = best.expect("cluster smaller than the space");
                used[j] = true;
                basis.push(x / n);
            }
            for (k, b) in basis.into_iter().enumerate() {
                out.set_column(start + k, &b);
            }
        }
        start = end;
    }
    out
}

/// Basis of the span of `subspace` (boundary traces) made of eigenfunctions
/// with pairwise `S = 0`.
///
/// Eigenvectors of the restricted pencil are `B`-orthonormal, which is the
/// Gram-Schmidt step inside repeated eigenvalues; across distinct
/// eigenvalues `S`-orthogonality is automatic.
pub fn s_orthogonal_basis(dtn: &DtnMap<'_>, subspace: &[Vec<f64>]) -> Result<SOrthogonalBasis> {
    let fit = fit_invariant(dtn, subspace)?;
    let tol = dtn.tolerances.subspace;
    if fit.residual > tol {
        return Err(Error::NotEigenSubspace { residual: fit.residual, tol });
    }
    let m = subspace.len();
    let mut coefficients = canonical_within_clusters(&fit.eigenvalues, &fit.vectors, &fit.gram);
    for mut c in coefficients.column_iter_mut() {
        let nrm = c.norm();
        c /= nrm;
        let big = c.iter().copied().fold(0.0f64, |a, e| if e.abs() > a.abs() { e } else { a });
        if big < 0.0 {
            c.neg_mut();
        }
    }
    let traces_m = &fit.traces * &coefficients;
    let traces: Vec<Vec<f64>> = (0..m).map(|k| traces_m.column(k).iter().copied().collect()).collect();
    let ext = traces.iter().map(|t| dtn.extend(t)).collect::<Result<Vec<_>>>()?;
    let ops = dtn.ops;
    let pairwise_s = DMatrix::from_fn(m, m, |i, j| index_form_value(ops, &ext[i], &ext[j]));
    let boundary_products = DMatrix::from_fn(m, m, |i, j| ops.boundary_mass.form(&ext[i], &ext[j]));
    let lam = &fit.eigenvalues;
    let predicted_s = DMatrix::from_fn(m, m, |i, j| (lam[j] - 1.0) * boundary_products[(i, j)]);
    let predicted_s_swapped = DMatrix::from_fn(m, m, |i, j| (lam[i] - 1.0) * boundary_products[(i, j)]);
    Ok(SOrthogonalBasis {
        eigenvalues: fit.eigenvalues,
        coefficients,
        traces,
        pairwise_s,
        boundary_products,
        predicted_s,
        predicted_s_swapped,
        subspace_residual: fit.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{assemble_operators, build_mesh};
    use crate::surface::{equatorial_disk, DISK_HOLE_RADIUS};
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn disk_constant_field() {
        let ops = assemble_operators(Arc::new(build_mesh(&equatorial_disk(), 32, 64).unwrap()));
        let one = vec![1.0; ops.n_nodes()];
        assert!((index_form_value(&ops, &one, &one) + 2.0 * PI).abs() < 1e-4);
        let im = gauss_map_matrix(&ops);
        let exact = -2.0 * PI * (1.0 - DISK_HOLE_RADIUS * DISK_HOLE_RADIUS);
        assert!((im.m[(2, 2)] - exact).abs() < 1e-3);
        assert_eq!(im.r[(2, 2)], 0.0);
    }
}
