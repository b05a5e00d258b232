//! The problem re-posed on the Gauss image `Omega = (Sigma, nu^* g_round)`,
//! the support-function reconstruction, boundary curvature identities and
//! the square-map segment test.

mod curvature;
mod pullback;
mod reconstruct;
mod segment;

pub use curvature::{boundary_curvature_identity, gauss_curve_curvature, BoundaryCurvature};
pub use pullback::{check_gauss_map, pullback_problem, transformed_forms, zeta_check, SphericalProblem, TransformedForms, ZetaCheck};
pub use reconstruct::{reconstruct_surface, Reconstruction};
pub use segment::{roundness, segment_and_roundness_test, segment_test_in_frame, square_map, SegmentTestReport};
