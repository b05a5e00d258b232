//! Centralised numerical tolerances with their documented defaults.

use serde::{Deserialize, Serialize};

/// Every threshold used by the verification suites. The defaults are the
/// values the acceptance suite runs with; the CLI can override each of them
/// through `--tol-*` flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Closed-form identities evaluated at machine precision.
    pub analytic: f64,
    /// Discrete eigenvalues against their analytic targets at 64x128.
    pub eigenvalue: f64,
    /// Mass-normalised Rayleigh quotient below which an interior mode is a
    /// Dirichlet Jacobi kernel element.
    pub kernel: f64,
    /// Relative size of the kernel-flux constraint accepted as compatible.
    pub compatibility: f64,
    /// Relative asymmetry of the Schur complement accepted before averaging.
    pub symmetry: f64,
    /// Relative residual of the eigen-subspace test.
    pub subspace: f64,
    /// Relative discrepancy between the two sides of an integral identity.
    pub identity: f64,
    /// Floor on |h|^2 for the Gauss-map reformulation.
    pub gauss_floor: f64,
    /// Residuals of the discretised conformal and reconstruction checks.
    pub discrete: f64,
    /// Boundary integral of transformed eigenfunctions.
    pub boundary_integral: f64,
    /// Fit residuals for exact segment / circle inputs.
    pub fit: f64,
    /// Relative agreement of the curvature closed form with its oracle.
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            analytic: 1e-12,
            eigenvalue: 5e-3,
            kernel: 5e-2,
            compatibility: 1e-8,
            symmetry: 1e-10,
            subspace: 1e-3,
            identity: 1e-3,
            gauss_floor: 1e-10,
            discrete: 1e-3,
            boundary_integral: 1e-4,
            fit: 1e-12,
            oracle: 1e-10,
        }
    }
}
