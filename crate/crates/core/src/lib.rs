//! Jacobi-Steklov spectra of free boundary minimal surfaces in the unit ball.
//!
//! The crate is organised bottom-up:
//!
//! * [`surface`] holds analytic immersions of a parameter rectangle and their
//!   pointwise differential geometry (metric, normal, second fundamental
//!   form, support function, conormal).
//! * [`discretize`] builds a structured tensor-product mesh on the parameter
//!   rectangle and assembles the stiffness, potential, mass and boundary-mass
//!   forms with bilinear elements.
//! * [`steklov`] detects the Dirichlet Jacobi kernel, forms the deflated
//!   Dirichlet-to-Neumann map and solves for its spectrum.
//! * [`indexform`] evaluates the second-variation form on Gauss-map
//!   components and checks its integral identities two ways.
//! * [`sphere`] re-poses the problem on the Gauss image and hosts the
//!   boundary-curvature, reconstruction and segment/roundness checks.
//! * [`appendix_curve`] is the closed-form curvature of curves whose
//!   coordinate squares are affine in the parameter.
//! * [`cli`] drives the suites from the command line and writes reports.

pub mod appendix_curve;
pub mod cli;
pub mod discretize;
pub mod error;
pub mod fit;
pub mod indexform;
pub mod linalg;
pub mod report;
pub mod sphere;
pub mod steklov;
pub mod surface;
pub mod tolerances;

pub use error::{Error, Result};
pub use surface::{GeometricData, ParametricSurface, Vec3};
