use nalgebra::{DMatrix, DVector};

use super::dtn::DtnMap;
use crate::error::{Error, Result};
use crate::linalg::generalized_symmetric_eigen;

/// Relative eigenvalue cut-off for the rank of the trace Gram matrix.
const RANK_TOL: f64 = 1e-8;

/// Least-squares restriction of `L_J` to the span of a few traces.
#[derive(Debug, Clone)]
pub struct InvariantFit {
    /// Traces as columns.
    pub traces: DMatrix<f64>,
    /// `G = N^T B N`.
    pub gram: DMatrix<f64>,
    /// `H = N^T Sigma N`.
    pub stiffness: DMatrix<f64>,
    /// `Lambda = G^{-1} H`, the `B`-least-squares solution of `L_J N ~ N Lambda`.
    pub lambda: DMatrix<f64>,
    /// `|L_J N - N Lambda|_B / max(|L_J N|_B, |N|_B)`.
    pub residual: f64,
    /// Eigenvalues of `Lambda`, ascending.
    pub eigenvalues: Vec<f64>,
    /// `G`-orthonormal eigenvectors of `Lambda` (columns).
    pub vectors: DMatrix<f64>,
}

fn b_norm(b: &DMatrix<f64>, x: &DMatrix<f64>) -> f64 {
    (x.transpose() * b * x).trace().max(0.0).sqrt()
}

/// Numerical rank of the `B`-Gram matrix of the traces.
pub fn trace_rank(dtn: &DtnMap<'_>, traces: &[Vec<f64>]) -> usize {
    let n = DMatrix::from_fn(dtn.boundary_dim(), traces.len(), |i, k| traces[k][i]);
    let g = n.transpose() * &dtn.boundary_mass * &n;
    let eig = nalgebra::SymmetricEigen::new((&g + g.transpose()) * 0.5);
    let gmax = eig.eigenvalues.amax();
    eig.eigenvalues.iter().filter(|&&e| e > RANK_TOL * gmax).count()
}

/// Fit `L_J N ~ N Lambda` for linearly independent compatible traces.
pub fn fit_invariant(dtn: &DtnMap<'_>, traces: &[Vec<f64>]) -> Result<InvariantFit> {
    for t in traces {
        dtn.check_compatible(t)?;
    }
    let m = traces.len();
    let rank = trace_rank(dtn, traces);
    if rank < m {
        return Err(Error::DegenerateSubspace { rank });
    }
    let b = &dtn.boundary_mass;
    let n = DMatrix::from_fn(dtn.boundary_dim(), m, |i, k| traces[k][i]);
    let mut ln = DMatrix::zeros(dtn.boundary_dim(), m);
    for k in 0..m {
        ln.set_column(k, &DVector::from_vec(dtn.apply(&traces[k])?));
    }
    let g = n.transpose() * b * &n;
    let g = (&g + g.transpose()) * 0.5;
    let h = n.transpose() * &dtn.schur * &n;
    let h = (&h + h.transpose()) * 0.5;
    let lambda = g.clone().cholesky().ok_or(Error::DegenerateSubspace { rank })?.solve(&h);
    let denom = b_norm(b, &ln).max(b_norm(b, &n));
    let residual = if denom == 0.0 { 0.0 } else { b_norm(b, &(&ln - &n * &lambda)) / denom };
    let (eigenvalues, vectors) = generalized_symmetric_eigen(&h, &g)?;
    Ok(InvariantFit { traces: n, gram: g, stiffness: h, lambda, residual, eigenvalues, vectors })
}

/// Outcome of testing whether the span of the normal-component traces is
/// an invariant subspace of `L_J`.
#[derive(Debug, Clone)]
pub enum SubspaceTest {
    /// Three independent traces.
    Full(SubspaceReport),
    /// Only one trace is nonzero (planar surface through the origin).
    Equatorial {
        /// Index of the surviving normal component.
        component: usize,
        eigenvalue: f64,
        residual: f64,
    },
}

#[derive(Debug, Clone)]
pub struct SubspaceReport {
    /// `|L_J N - N Lambda|_B / max(|L_J N|_B, |N|_B)`.
    pub residual: f64,
    pub lambda: DMatrix<f64>,
    /// Eigenvalues of `Lambda`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors of `Lambda` (columns): the rotation taking the
    /// normal components to eigenfunctions.
    pub rotation: DMatrix<f64>,
    /// Per-component `min_mu |L_J n_i - mu n_i|_B / max(|L_J n_i|_B, |n_i|_B)`.
    pub component_residuals: [f64; 3],
    /// Minimising `mu` for each component.
    pub component_quotients: [f64; 3],
    /// `max |Lambda_ij|, i != j` relative to `max |Lambda_ij|`.
    pub off_diagonal: f64,
}

/// Unit columns with the largest-magnitude entry positive.
pub(crate) fn unit_columns(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for mut c in m.column_iter_mut() {
        let nrm = c.norm();
        c /= nrm;
        let big = c.iter().copied().fold(0.0f64, |m, e| if e.abs() > m.abs() { e } else { m });
        if big < 0.0 {
            c.neg_mut();
        }
    }
    m
}

/// Test whether the span of the given boundary traces is an eigen-subspace
/// of `L_J`.
pub fn subspace_invariance(dtn: &DtnMap<'_>, traces: &[Vec<f64>; 3]) -> Result<SubspaceTest> {
    for t in traces {
        dtn.check_compatible(t)?;
    }
    let b = &dtn.boundary_mass;
    let quotient = |k: usize| -> Result<(f64, f64)> {
        let l = DVector::from_vec(dtn.apply(&traces[k])?);
        let nk = DVector::from_column_slice(&traces[k]);
        let mu = (nk.transpose() * &dtn.schur * &nk)[0] / (nk.transpose() * b * &nk)[0];
        let e = &l - &nk * mu;
        let scale = (l.transpose() * b * &l)[0].max((nk.transpose() * b * &nk)[0]).sqrt();
        let en = (e.transpose() * b * &e)[0].max(0.0).sqrt();
        Ok((mu, if scale == 0.0 { 0.0 } else { en / scale }))
    };

    match trace_rank(dtn, traces) {
        3 => {}
        1 => {
            let norms: Vec<f64> = traces.iter().map(|t| crate::linalg::norm2(t)).collect();
            let component = (0..3).max_by(|&i, &j| norms[i].total_cmp(&norms[j])).unwrap();
            let (eigenvalue, residual) = quotient(component)?;
            return Ok(SubspaceTest::Equatorial { component, eigenvalue, residual });
        }
        rank => return Err(Error::DegenerateSubspace { rank }),
    }

    let fit = fit_invariant(dtn, traces)?;
    let mut component_residuals = [0.0; 3];
    let mut component_quotients = [0.0; 3];
    for k in 0..3 {
        let (mu, r) = quotient(k)?;
        component_quotients[k] = mu;
        component_residuals[k] = r;
    }
    let lambda = fit.lambda;
    let lmax = lambda.amax();
    let off = (0..3)
        .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| lambda[(i, j)].abs())
        .fold(0.0, f64::max);
    Ok(SubspaceTest::Full(SubspaceReport {
        residual: fit.residual,
        rotation: unit_columns(fit.vectors),
        eigenvalues: fit.eigenvalues,
        component_residuals,
        component_quotients,
        off_diagonal: if lmax == 0.0 { 0.0 } else { off / lmax },
        lambda,
    }))
}

/// Boundary traces of `nu_1, nu_2, nu_3` in boundary-node order.
pub fn normal_traces(ops: &crate::discretize::OperatorSet) -> [Vec<f64>; 3] {
    std::array::from_fn(|i| ops.partition.trace(&ops.mesh.sample(|g| g.nu(i))))
}
