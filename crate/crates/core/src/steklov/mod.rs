//! The Jacobi-Steklov eigenproblem `J u = 0` in the surface, `D_eta u = lambda u`
//! on its free boundary, discretised by a kernel-deflated Schur complement.

mod dtn;
mod interior;
mod subspace;

pub use dtn::{steklov_spectrum, DtnMap, SteklovSpectrum};
pub use interior::{dirichlet_kernel, jacobi_extend, InteriorSolver, KernelMode};
pub use subspace::{fit_invariant, normal_traces, subspace_invariance, trace_rank, InvariantFit, SubspaceReport, SubspaceTest};
