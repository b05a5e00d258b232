use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("root finder did not reach {tol:e} in {iterations} bisection steps")]
    RootNotConverged { iterations: usize, tol: f64 },

    #[error("degenerate metric at (t={t}, theta={theta}): Gram determinant {det:e}")]
    DegenerateMetric { t: f64, theta: f64, det: f64 },

    #[error("surface invariant violated: {0}")]
    SurfaceInvariant(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("field is not a discrete Jacobi field: interior residual {residual:e} > {tol:e}")]
    NotJacobiField { residual: f64, tol: f64 },

    #[error("boundary data incompatible with the Dirichlet kernel: constraint residual {residual:e} > {tol:e}")]
    IncompatibleBoundaryData { residual: f64, tol: f64 },

    #[error("interior block is singular (zero pivot at row {row})")]
    SingularMatrix { row: usize },

    #[error("Dirichlet-to-Neumann matrix asymmetry {asymmetry:e} exceeds {tol:e}")]
    Asymmetric { asymmetry: f64, tol: f64 },

    #[error("eigen-solver failure: {0}")]
    EigenSolver(String),

    #[error("requested {requested} eigenpairs but the compatible subspace has dimension {available}")]
    TooManyEigenvalues { requested: usize, available: usize },

    #[error("subspace fails the eigen-subspace test: residual {residual:e} > {tol:e}")]
    NotEigenSubspace { residual: f64, tol: f64 },

    #[error("subspace spanned by the traces has dimension {rank}, expected 1 or 3")]
    DegenerateSubspace { rank: usize },

    #[error("degenerate Gauss map: |h|^2 = {norm_h_sq:e} at (t={t}, theta={theta})")]
    DegenerateGaussMap { norm_h_sq: f64, t: f64, theta: f64 },

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },

    #[error("segment curve constraint violated: {what} (residual {residual:e})")]
    SegmentConstraint { what: &'static str, residual: f64 },

    #[error("positivity violated: a_{coordinate} t + b_{coordinate} = {value:e} at t = {t}")]
    Positivity { coordinate: usize, t: f64, value: f64 },

    #[error("denominator A t + B = {value:e} at t = {t} is below threshold")]
    DegenerateDenominator { t: f64, value: f64 },

    #[error("parameter {t} outside the curve interval [{lo}, {hi}]")]
    OutsideInterval { t: f64, lo: f64, hi: f64 },

    #[error("unknown surface: {0}")]
    UnknownSurface(String),

    #[error("surface spec: {0}")]
    SpecFile(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
