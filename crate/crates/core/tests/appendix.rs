use fbms::appendix_curve::{
    curvature_closed_form, curvature_numeric_oracle, make_segment_curve, parameter_samples, random_admissible_curve,
    write_curvature_csv, SegmentCurve,
};
use fbms::Error;
use proptest::prelude::*;
use rand::SeedableRng;

/// Curvature of the sampled curve from a circle through three nearby
/// points: a derivative-free oracle.
fn three_point_kappa_sq(c: &SegmentCurve, t: f64, h: f64) -> f64 {
    let [a, b, d] = [t - h, t, t + h].map(|s| c.point(s).unwrap());
    let (ab, bd, da) = ((b - a).norm(), (d - b).norm(), (a - d).norm());
    let r = ab * bd * da / (2.0 * (b - a).cross(&(d - a)).norm());
    1.0 / (r * r)
}

#[test]
fn worked_example_matches_oracles() {
    let c = make_segment_curve([1.0, 1.0, -2.0], [0.2, 0.3, 0.5], (-0.15, 0.15)).unwrap();
    let closed = curvature_closed_form(&c, 0.05).unwrap();
    let oracle = curvature_numeric_oracle(&c, 0.05).unwrap();
    assert!((closed.kappa_sq - oracle).abs() <= 1e-10 * oracle);
    assert!(closed.difference.abs() < 1e-12);
    assert!((three_point_kappa_sq(&c, 0.05, 1e-4) / oracle - 1.0).abs() < 1e-6);
}

#[test]
fn latitude_circle_has_constant_curvature() {
    let c = make_segment_curve([1.0, -1.0, 0.0], [0.3, 0.3, 0.4], (-0.25, 0.25)).unwrap();
    for t in parameter_samples(&c, 50) {
        assert!((curvature_closed_form(&c, t).unwrap().kappa_sq - 5.0 / 3.0).abs() < 1e-12);
        assert!((three_point_kappa_sq(&c, t.clamp(-0.24, 0.24), 1e-3) - 5.0 / 3.0).abs() < 1e-7);
    }
}

#[test]
fn grid_of_random_curves() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
    for _ in 0..20 {
        let c = random_admissible_curve(&mut rng);
        assert!(c.identity_residuals().iter().all(|r| *r <= 1e-12));
        for t in parameter_samples(&c, 50) {
            let o = curvature_numeric_oracle(&c, t).unwrap();
            assert!((curvature_closed_form(&c, t).unwrap().kappa_sq - o).abs() <= 1e-10 * o);
            assert!((c.point(t).unwrap().norm_squared() - 1.0).abs() <= 1e-14 * 4.0);
        }
    }
}

#[test]
fn near_the_edge_of_admissibility() {
    let t1 = (0.5 - 1e-6) / 2.0;
    let c = make_segment_curve([1.0, 1.0, -2.0], [0.2, 0.3, 0.5], (-0.15, t1)).unwrap();
    let closed = curvature_closed_form(&c, t1).unwrap().kappa_sq;
    let oracle = curvature_numeric_oracle(&c, t1).unwrap();
    assert!(closed.is_finite() && oracle.is_finite());
    assert!((closed - oracle).abs() <= 1e-6 * oracle);
}

#[test]
fn invalid_curves() {
    assert!(matches!(
        make_segment_curve([1.0, 1.0, -1.0], [0.2, 0.3, 0.5], (0.0, 0.1)),
        Err(Error::SegmentConstraint { residual, .. }) if residual == 1.0
    ));
    assert!(matches!(
        make_segment_curve([1.0, -1.0, 0.0], [0.2, 0.3, 0.4], (0.0, 0.1)),
        Err(Error::SegmentConstraint { .. })
    ));
    match make_segment_curve([1.0, -1.0, 0.0], [0.5, 0.5, 0.0], (-0.1, 0.1)) {
        Err(Error::Positivity { coordinate, t, value }) => {
            assert_eq!((coordinate, t, value), (3, -0.1, 0.0));
        }
        other => panic!("{other:?}"),
    }
    // a = 0 is a single point: A t + B vanishes identically.
    let p = make_segment_curve([0.0; 3], [0.2, 0.3, 0.5], (0.0, 0.1)).unwrap();
    assert!(matches!(curvature_closed_form(&p, 0.05), Err(Error::DegenerateDenominator { .. })));
    assert!(matches!(curvature_numeric_oracle(&p, 0.5), Err(Error::OutsideInterval { .. })));
}

#[test]
fn csv_columns() {
    let c = make_segment_curve([1.0, 1.0, -2.0], [0.2, 0.3, 0.5], (-0.15, 0.15)).unwrap();
    let mut buf = Vec::new();
    write_curvature_csv(&c, &parameter_samples(&c, 5), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,kappa_sq_closed,kappa_sq_oracle,difference"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], -0.15);
    for r in rows {
        assert!((r[1] - r[2] - r[3]).abs() < 1e-15);
    }
}

proptest! {
    #[test]
    fn coefficient_identities_hold(
        raw in prop::array::uniform3(-1.0f64..1.0),
        rb in prop::array::uniform3(0.1f64..1.0),
    ) {
        let m = raw.iter().sum::<f64>() / 3.0;
        let mut a = raw.map(|x| x - m);
        a[2] = -(a[0] + a[1]);
        let s: f64 = rb.iter().sum();
        let mut b = rb.map(|x| x / s);
        b[2] = 1.0 - b[0] - b[1];
        let c = make_segment_curve(a, b, (0.0, 0.0)).unwrap();
        for r in c.identity_residuals() {
            prop_assert!(r <= 1e-12, "{}", r);
        }
    }
}
