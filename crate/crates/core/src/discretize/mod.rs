//! Structured meshes of the parameter rectangle and bilinear finite-element
//! forms on them.

mod mesh;
mod operators;

pub use mesh::{build_mesh, BoundaryComponent, BoundaryQuadPoint, Cell, GridLayout, QuadPoint, SurfaceMesh, GAUSS_2};
pub use operators::{
    assemble_boundary_mass_like, assemble_mass_like, assemble_operators, assemble_stiffness, interior_jacobi_residual, weak_conormal,
    GridOperator, OperatorSet, Partition,
};
