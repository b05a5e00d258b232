//! Jacobi-Steklov spectrum of the critical catenoid.
//!
//! cargo run --release --example catenoid_spectrum -- 64 128

use std::sync::Arc;

use fbms::discretize::{assemble_operators, build_mesh};
use fbms::steklov::DtnMap;
use fbms::surface::{catenoid_constants, critical_catenoid};
use fbms::tolerances::Tolerances;

fn main() -> fbms::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (n_t, n_theta) = (*args.first().unwrap_or(&64), *args.get(1).unwrap_or(&128));
    let k = catenoid_constants()?;
    let tol = Tolerances::default();

    let ops = assemble_operators(Arc::new(build_mesh(&critical_catenoid()?, n_t, n_theta)?));
    let dtn = DtnMap::new(&ops, &tol)?;
    for m in dtn.kernel() {
        println!("Dirichlet kernel mode: rayleigh {:.3e}, residual {:.1e}", m.rayleigh, m.residual);
    }
    let spectrum = dtn.spectrum(8)?;

    let expected = [-1.0, -1.0, k.t0 * k.t0 - 1.0];
    println!("mesh {n_t}x{n_theta}, T0 = {:.12}", k.t0);
    for (i, l) in spectrum.eigenvalues.iter().enumerate() {
        match expected.get(i) {
            Some(e) => println!("  lambda_{i} = {l:>12.8}   closed form {e:>11.8}   error {:.2e}", (l - e).abs()),
            None => println!("  lambda_{i} = {l:>12.8}"),
        }
    }
    println!("eigenvalues below 1: {}", spectrum.count_below(0.95));
    Ok(())
}
