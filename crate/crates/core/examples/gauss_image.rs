//! The problem pulled back to the Gauss image: transformed spectrum, the
//! support function, reconstruction, boundary curvature and the squares-map
//! segment test.

use std::sync::Arc;

use fbms::discretize::{assemble_operators, build_mesh};
use fbms::sphere::{
    boundary_curvature_identity, pullback_problem, reconstruct_surface, segment_and_roundness_test, zeta_check,
};
use fbms::surface::{catenoid_constants, critical_catenoid};
use fbms::tolerances::Tolerances;

fn main() -> fbms::Result<()> {
    let tol = Tolerances::default();
    let k = catenoid_constants()?;
    let surface = critical_catenoid()?;
    let ops = assemble_operators(Arc::new(build_mesh(&surface, 64, 128)?));

    let sp = pullback_problem(&ops, 6, &tol)?;
    println!("transformed eigenvalues {:?}", sp.spectrum.eigenvalues);
    println!("boundary integrals {:?}", sp.boundary_integrals);
    println!("conformality residual {:.1e}", sp.conformality_residual);

    let z = zeta_check(&ops, &tol)?;
    println!("(Delta_1 + 2) zeta residual {:.2e}, boundary derivative error {:.2e}", z.interior_residual, z.boundary_error);

    let rec = reconstruct_surface(&surface, 64, 128, tol.gauss_floor)?;
    println!("reconstruction max error {:.2e} (analytic gradient {:.1e})", rec.max_error, rec.max_error_analytic);

    let c = &boundary_curvature_identity(&surface, 16)?[0];
    println!("kappa^2 = {:.15}, 1 + f^2 = {:.15}, T0^2 = {:.15}", c.kappa_sq, c.one_plus_f_sq, k.t0 * k.t0);

    let seg = segment_and_roundness_test(&surface, k.normal_eigenvalues(), 256)?;
    println!(
        "F-image: plane residual {:.1e}, line residual {:.1e}, direction {:.6}",
        seg.plane_residual,
        seg.max_line_residual(),
        seg.directions[0].transpose()
    );
    println!("orthogonality to 1/lambda {:?}, roundness {:.1e}", seg.lambda_orthogonality, seg.max_roundness());
    Ok(())
}
