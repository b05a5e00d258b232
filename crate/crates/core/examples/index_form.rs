//! Index-form matrix of the normal components, computed through the
//! assembled forms and through the integral identities, and the boundary
//! tensor R.

use std::sync::Arc;

use fbms::discretize::{assemble_operators, build_mesh};
use fbms::indexform::{gauss_map_matrix, s_orthogonal_basis};
use fbms::steklov::{normal_traces, DtnMap};
use fbms::surface::{catenoid_constants, critical_catenoid};
use fbms::tolerances::Tolerances;

fn main() -> fbms::Result<()> {
    let k = catenoid_constants()?;
    let ops = assemble_operators(Arc::new(build_mesh(&critical_catenoid()?, 64, 128)?));
    let im = gauss_map_matrix(&ops);
    println!("M (forms) = {:.6}", im.m);
    println!("M (identities) = {:.6}", im.m_identity);
    println!("max relative discrepancy {:.2e}", im.max_discrepancy());
    println!("eigenvalues of M: {:?} (negative definite: {})", im.m_eigen.values, im.is_negative_definite());

    let c2 = k.c * k.c;
    let pi = std::f64::consts::PI;
    println!(
        "closed forms: M_11 = {:.6}, M_33 = {:.6}, R_11 = {:.6}, R_33 = {:.6}",
        -4.0 * pi * c2 * k.t0,
        -4.0 * pi * c2 * (k.t0.sinh() * k.t0.cosh() - k.t0),
        2.0 * pi / k.t0.powi(3),
        4.0 * pi * c2 * k.t0
    );
    println!("R = {:.6}", im.r);

    let dtn = DtnMap::new(&ops, &Tolerances::default())?;
    let basis = s_orthogonal_basis(&dtn, &normal_traces(&ops))?;
    println!("S-orthogonal eigenbasis, eigenvalues {:?}", basis.eigenvalues);
    println!("pairwise S = {:.3e}", basis.pairwise_s);
    Ok(())
}
