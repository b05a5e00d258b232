//! Closed-form curvature of the square-root curves against the cross-product
//! formula; writes the comparison for one curve as CSV to stdout.

use fbms::appendix_curve::{
    curvature_closed_form, curvature_numeric_oracle, make_segment_curve, parameter_samples, random_admissible_curve,
    write_curvature_csv,
};
use rand::SeedableRng;

fn main() -> fbms::Result<()> {
    let latitude = make_segment_curve([1.0, -1.0, 0.0], [0.3, 0.3, 0.4], (-0.25, 0.25))?;
    let k = latitude.coefficients;
    eprintln!("latitude circle: A = {}, B = {}, C = {}, kappa^2 = {}", k.big_a, k.big_b, k.c, curvature_closed_form(&latitude, 0.0)?.kappa_sq);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let curve = random_admissible_curve(&mut rng);
        for t in parameter_samples(&curve, 50) {
            let o = curvature_numeric_oracle(&curve, t)?;
            worst = worst.max((curvature_closed_form(&curve, t)?.kappa_sq - o).abs() / o);
        }
    }
    eprintln!("1000 random curves x 50 samples: worst relative difference {worst:.2e}");

    let curve = make_segment_curve([1.0, 1.0, -2.0], [0.2, 0.3, 0.5], (-0.15, 0.15))?;
    write_curvature_csv(&curve, &parameter_samples(&curve, 21), std::io::stdout())
}
