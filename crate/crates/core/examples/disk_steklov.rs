//! On the flat disk |h|^2 = 0 and the Jacobi-Steklov problem is the
//! classical Steklov problem with eigenvalues 0, 1, 1, 2, 2, ...

use std::sync::Arc;

use fbms::discretize::{assemble_operators, build_mesh};
use fbms::steklov::{jacobi_extend, steklov_spectrum};
use fbms::surface::equatorial_disk;
use fbms::tolerances::Tolerances;

fn main() -> fbms::Result<()> {
    let tol = Tolerances::default();
    let ops = assemble_operators(Arc::new(build_mesh(&equatorial_disk(), 64, 128)?));
    let spectrum = steklov_spectrum(&ops, 7, &tol)?;
    for (i, l) in spectrum.eigenvalues.iter().enumerate() {
        println!("sigma_{i} = {l:.6}");
    }

    // The extension of cos(theta) is the linear function r cos(theta).
    let trace = ops.partition.trace(&ops.mesh.sample(|g| g.position.x));
    let u = jacobi_extend(&ops, &trace, &tol)?;
    let err = ops.mesh.node_geometry.iter().zip(&u).map(|(g, v)| (g.position.x - v).abs()).fold(0.0, f64::max);
    println!("max |extension - r cos(theta)| = {err:.2e}");
    Ok(())
}
