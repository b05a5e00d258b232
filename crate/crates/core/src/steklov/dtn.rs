use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::interior::{compatibility_residual, extend_with, kernel_fluxes, InteriorSolver, KernelMode};
use crate::discretize::OperatorSet;
use crate::error::{Error, Result};
use crate::linalg::{generalized_symmetric_eigen, orthogonal_complement};
use crate::tolerances::Tolerances;

/// Deflated Dirichlet-to-Neumann map of the Jacobi operator on the free
/// boundary.
///
/// With `W` the boundary fluxes `A_GI z` of the kernel fields, admissible
/// traces are those Euclidean-orthogonal to `W`; on them the Schur
/// complement `Sigma = A_GG - A_GI A_II^+ A_IG` is the weak form of the
/// Neumann trace, and `L_J = B^{-1} Pi_W Sigma`.
#[derive(Debug)]
pub struct DtnMap<'a> {
    pub ops: &'a OperatorSet,
    pub solver: InteriorSolver,
    pub tolerances: Tolerances,
    /// Kernel fluxes, one per kernel field.
    pub fluxes: Vec<Vec<f64>>,
    /// Orthonormal basis (columns) of the compatible traces.
    pub compatible: DMatrix<f64>,
    /// Symmetrised Schur complement on all boundary nodes.
    pub schur: DMatrix<f64>,
    /// `max |Sigma - Sigma^T| / max |Sigma|` before averaging.
    pub asymmetry: f64,
    /// Dense boundary mass.
    pub boundary_mass: DMatrix<f64>,
    mass_chol: Cholesky<f64, Dyn>,
}

impl<'a> DtnMap<'a> {
    pub fn new(ops: &'a OperatorSet, tol: &Tolerances) -> Result<Self> {
        let solver = InteriorSolver::new(ops, tol)?;
        let nb = ops.partition.boundary.len();
        let jac = solver.jacobi();
        let mut schur = ops.jacobi().dense_block(&ops.partition.boundary, &ops.partition.boundary);
        let mut e = vec![0.0; ops.n_nodes()];
        for (j, &bj) in ops.partition.boundary.iter().enumerate() {
            e[bj] = 1.0;
            let x = solver.embed(&solver.deflated_solve(&solver.boundary_rhs(&e)));
            e[bj] = 0.0;
            for (i, &bi) in ops.partition.boundary.iter().enumerate() {
                schur[(i, j)] += jac.row(bi).filter(|(c, _)| solver.position(*c).is_some()).map(|(c, v)| v * x[c]).sum::<f64>();
            }
        }
        let scale = schur.amax();
        let asymmetry = if scale == 0.0 { 0.0 } else { (&schur - schur.transpose()).amax() / scale };
        if asymmetry > tol.symmetry {
            return Err(Error::Asymmetric { asymmetry, tol: tol.symmetry });
        }
        let schur = (&schur + schur.transpose()) * 0.5;

        let fluxes = kernel_fluxes(&solver, ops);
        let w = DMatrix::from_fn(nb, fluxes.len(), |i, k| fluxes[k][i]);
        let compatible = orthogonal_complement(&w);
        let boundary_mass = ops.boundary_mass_matrix();
        let mass_chol = Cholesky::new(boundary_mass.clone())
            .ok_or_else(|| Error::EigenSolver("boundary mass is not positive definite".into()))?;
        Ok(DtnMap { ops, solver, tolerances: *tol, fluxes, compatible, schur, asymmetry, boundary_mass, mass_chol })
    }

    pub fn kernel(&self) -> &[KernelMode] {
        &self.solver.modes
    }

    pub fn boundary_dim(&self) -> usize {
        self.schur.nrows()
    }

    /// `Q^T Sigma Q`, the symmetric operator on the compatible subspace.
    pub fn matrix(&self) -> DMatrix<f64> {
        self.compatible.transpose() * &self.schur * &self.compatible
    }

    /// `Q^T B Q`.
    pub fn reduced_mass(&self) -> DMatrix<f64> {
        self.compatible.transpose() * &self.boundary_mass * &self.compatible
    }

    /// Largest relative kernel-flux constraint of a trace.
    pub fn compatibility_residual(&self, trace: &[f64]) -> f64 {
        compatibility_residual(&self.fluxes, trace)
    }

    pub fn check_compatible(&self, trace: &[f64]) -> Result<()> {
        let residual = self.compatibility_residual(trace);
        if residual > self.tolerances.compatibility {
            return Err(Error::IncompatibleBoundaryData { residual, tol: self.tolerances.compatibility });
        }
        Ok(())
    }

    pub fn b_inverse(&self, r: &DVector<f64>) -> DVector<f64> {
        self.mass_chol.solve(r)
    }

    /// `Pi_W r = r - W (W^T B^{-1} W)^{-1} W^T B^{-1} r`.
    pub fn project_flux(&self, r: &DVector<f64>) -> DVector<f64> {
        let k = self.fluxes.len();
        if k == 0 {
            return r.clone();
        }
        let w = DMatrix::from_fn(r.len(), k, |i, j| self.fluxes[j][i]);
        let binv_w = self.mass_chol.solve(&w);
        let g = w.transpose() * &binv_w;
        let coef = g.cholesky().map(|c| c.solve(&(binv_w.transpose() * r))).unwrap_or_else(|| DVector::zeros(k));
        r - w * coef
    }

    /// `L_J f = B^{-1} Pi_W Sigma f` for compatible boundary data.
    pub fn apply(&self, trace: &[f64]) -> Result<Vec<f64>> {
        self.check_compatible(trace)?;
        let f = DVector::from_column_slice(trace);
        let r = self.project_flux(&(&self.schur * f));
        Ok(self.b_inverse(&r).iter().copied().collect())
    }

    /// Jacobi extension of compatible data (see [`super::jacobi_extend`]).
    pub fn extend(&self, trace: &[f64]) -> Result<Vec<f64>> {
        extend_with(&self.solver, self.ops, trace, self.tolerances.compatibility)
    }

    /// Lowest `n_eig` eigenpairs of `Q^T Sigma Q y = lambda Q^T B Q y`.
    pub fn spectrum(&self, n_eig: usize) -> Result<SteklovSpectrum> {
        let available = self.compatible.ncols();
        if n_eig > available {
            return Err(Error::TooManyEigenvalues { requested: n_eig, available });
        }
        let (values, vecs) = generalized_symmetric_eigen(&self.matrix(), &self.reduced_mass())?;
        let jac = self.ops.jacobi();
        let mut eigenvalues = Vec::with_capacity(n_eig);
        let mut traces = Vec::with_capacity(n_eig);
        let mut extensions = Vec::with_capacity(n_eig);
        let mut residuals = Vec::with_capacity(n_eig);
        for k in 0..n_eig {
            let lambda = values[k];
            let trace: Vec<f64> = (&self.compatible * vecs.column(k)).iter().copied().collect();
            let u = extend_with(&self.solver, self.ops, &trace, f64::INFINITY)?;
            residuals.push(self.weak_residual(&jac, &u, lambda));
            eigenvalues.push(lambda);
            traces.push(trace);
            extensions.push(u);
        }
        Ok(SteklovSpectrum { eigenvalues, boundary_traces: traces, extensions, weak_residuals: residuals, boundary_nodes: self.ops.partition.boundary.clone() })
    }

    /// Weak eigen-relation `(K - P)(u, phi) = lambda B(u, phi)` tested on
    /// interior hat functions and compatible boundary traces, relative to
    /// `|K - P|_inf |u|`.
    fn weak_residual(&self, jac: &crate::discretize::GridOperator, u: &[f64], lambda: f64) -> f64 {
        let au = jac.apply(u);
        let bu = self.ops.boundary_mass.apply(u);
        let r: Vec<f64> = au.iter().zip(&bu).map(|(a, b)| a - lambda * b).collect();
        let interior = self.solver.nodes.iter().map(|&n| r[n] * r[n]).sum::<f64>();
        let rb = DVector::from_iterator(self.boundary_dim(), self.ops.partition.boundary.iter().map(|&n| r[n]));
        let boundary = (self.compatible.transpose() * rb).norm_squared();
        let scale = jac.row_norm() * u.iter().map(|a| a * a).sum::<f64>().sqrt();
        if scale == 0.0 {
            0.0
        } else {
            (interior + boundary).sqrt() / scale
        }
    }
}

/// Lowest eigenpairs of the Jacobi-Steklov problem.
#[derive(Debug, Clone)]
pub struct SteklovSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Boundary eigenfields in boundary-node order, `B`-orthonormal.
    pub boundary_traces: Vec<Vec<f64>>,
    /// Nodal Jacobi extensions.
    pub extensions: Vec<Vec<f64>>,
    pub weak_residuals: Vec<f64>,
    pub boundary_nodes: Vec<usize>,
}

impl SteklovSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Number of eigenvalues strictly below `bound`.
    pub fn count_below(&self, bound: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l < bound).count()
    }

    /// `max |u_i^T B u_j - delta_ij|`.
    pub fn orthonormality_error(&self, boundary_mass: &DMatrix<f64>) -> f64 {
        let n = self.len();
        let u = DMatrix::from_fn(self.boundary_nodes.len(), n, |i, k| self.boundary_traces[k][i]);
        let g = u.transpose() * boundary_mass * u;
        (g - DMatrix::identity(n, n)).amax()
    }
}

/// Build the DtN map and return its lowest `n_eig` eigenpairs.
pub fn steklov_spectrum(ops: &OperatorSet, n_eig: usize, tol: &Tolerances) -> Result<SteklovSpectrum> {
    DtnMap::new(ops, tol)?.spectrum(n_eig)
}
