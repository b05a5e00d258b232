//! Curvature of `gamma(t) = (sqrt(a_1 t + b_1), sqrt(a_2 t + b_2), sqrt(a_3 t + b_3))`
//! with `sum a_i = 0`, `sum b_i = 1`, the preimage of a line segment in the
//! plane `x + y + z = 1` under the squares map.
//!
//! With `A = -a_1 a_2 a_3` and `B = sum a_i^2 b_j b_k`, the squared
//! curvature is `(A_1 t^3 + A_2 t^2 + A_3 t + A_4) / (A t + B)^3`, and
//! `A_1 = A^3`, `A_2 = 3 A^2 B`, `A_3 = 3 A B^2` reduce it to
//! `1 + C / (A t + B)^3` with `C = A_4 - B^3`.

use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::Vec3;

/// Tolerance on `sum a_i = 0` and `sum b_i = 1`.
pub const CONSTRAINT_TOL: f64 = 1e-12;
/// Smallest admissible `a_i t + b_i` on the interval.
pub const POSITIVITY_FLOOR: f64 = 1e-12;
/// Smallest admissible `|A t + B|`.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Coefficients, each from its raw sum-of-products definition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficients {
    /// `A = -a_1 a_2 a_3`.
    pub big_a: f64,
    /// `B = a_1^2 b_2 b_3 + a_2^2 b_1 b_3 + a_3^2 b_1 b_2`.
    pub big_b: f64,
    /// `c_i`, the components of `-8 gamma' x gamma''` without their
    /// denominators: `c_1 = a_2 a_3 (a_3 b_2 - a_2 b_3)` and cyclic.
    pub cross: [f64; 3],
    /// `A_1 = sum c_i^2 a_i^3`.
    pub a1: f64,
    /// `A_2 = 3 sum c_i^2 a_i^2 b_i`.
    pub a2: f64,
    /// `A_3 = 3 sum c_i^2 a_i b_i^2`.
    pub a3: f64,
    /// `A_4 = sum c_i^2 b_i^3`.
    pub a4: f64,
    /// `C = A_4 - B^3`.
    pub c: f64,
}

impl Coefficients {
    fn from_raw(a: &[f64; 3], b: &[f64; 3]) -> Self {
        let big_a = -a[0] * a[1] * a[2];
        let big_b = a[0] * a[0] * b[1] * b[2] + a[1] * a[1] * b[0] * b[2] + a[2] * a[2] * b[0] * b[1];
        let cross = [
            a[1] * a[2] * (a[2] * b[1] - a[1] * b[2]),
            a[2] * a[0] * (a[0] * b[2] - a[2] * b[0]),
            a[0] * a[1] * (a[1] * b[0] - a[0] * b[1]),
        ];
        let sum = |f: &dyn Fn(usize) -> f64| (0..3).map(|i| cross[i] * cross[i] * f(i)).sum::<f64>();
        let a1 = sum(&|i| a[i].powi(3));
        let a2 = 3.0 * sum(&|i| a[i] * a[i] * b[i]);
        let a3 = 3.0 * sum(&|i| a[i] * b[i] * b[i]);
        let a4 = sum(&|i| b[i].powi(3));
        Coefficients { big_a, big_b, cross, a1, a2, a3, a4, c: a4 - big_b.powi(3) }
    }

    /// Relative residuals of `A_1 = A^3`, `A_2 = 3 A^2 B`, `A_3 = 3 A B^2`,
    /// each divided by the sum of the magnitudes of the terms in the raw
    /// definition (and by 1 if that sum vanishes).
    pub fn identity_residuals(&self, a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
        let c2 = self.cross.map(|c| c * c);
        let mag = |f: &dyn Fn(usize) -> f64| (0..3).map(|i| (c2[i] * f(i)).abs()).sum::<f64>();
        let scales = [
            mag(&|i| a[i].powi(3)),
            3.0 * mag(&|i| a[i] * a[i] * b[i]),
            3.0 * mag(&|i| a[i] * b[i] * b[i]),
        ];
        let (ca, cb) = (self.big_a, self.big_b);
        let diffs = [self.a1 - ca.powi(3), self.a2 - 3.0 * ca * ca * cb, self.a3 - 3.0 * ca * cb * cb];
        std::array::from_fn(|k| diffs[k].abs() / if scales[k] > 0.0 { scales[k] } else { 1.0 })
    }
}

/// An admissible curve on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentCurve {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub interval: (f64, f64),
    pub coefficients: Coefficients,
}

/// Validate the constraints and positivity and derive the coefficients.
pub fn make_segment_curve(a: [f64; 3], b: [f64; 3], interval: (f64, f64)) -> Result<SegmentCurve> {
    let sa: f64 = a.iter().sum();
    if sa.abs() > CONSTRAINT_TOL {
        return Err(Error::SegmentConstraint { what: "sum of a_i must vanish", residual: sa });
    }
    let sb: f64 = b.iter().sum::<f64>() - 1.0;
    if sb.abs() > CONSTRAINT_TOL {
        return Err(Error::SegmentConstraint { what: "sum of b_i must equal 1", residual: sb });
    }
    if !(interval.0 <= interval.1) {
        return Err(Error::SegmentConstraint { what: "empty parameter interval", residual: interval.0 - interval.1 });
    }
    // Affine in t, so the minimum is at an endpoint.
    for t in [interval.0, interval.1] {
        for i in 0..3 {
            let v = a[i] * t + b[i];
            if !(v >= POSITIVITY_FLOOR) {
                return Err(Error::Positivity { coordinate: i + 1, t, value: v });
            }
        }
    }
    Ok(SegmentCurve { a, b, interval, coefficients: Coefficients::from_raw(&a, &b) })
}

impl SegmentCurve {
    fn check_t(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.interval;
        if !(t >= lo && t <= hi) {
            return Err(Error::OutsideInterval { t, lo, hi });
        }
        Ok(())
    }

    pub fn point(&self, t: f64) -> Result<Vec3> {
        self.check_t(t)?;
        Ok(Vec3::from_fn(|i, _| (self.a[i] * t + self.b[i]).sqrt()))
    }

    pub fn identity_residuals(&self) -> [f64; 3] {
        self.coefficients.identity_residuals(&self.a, &self.b)
    }
}

/// Closed-form curvature with its unsimplified rational counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForm {
    /// `1 + C / (A t + B)^3`.
    pub kappa_sq: f64,
    /// `(A_1 t^3 + A_2 t^2 + A_3 t + A_4) / (A t + B)^3`.
    pub rational: f64,
    /// `kappa_sq - rational`.
    pub difference: f64,
}

pub fn curvature_closed_form(curve: &SegmentCurve, t: f64) -> Result<ClosedForm> {
    curve.check_t(t)?;
    let k = &curve.coefficients;
    let den = k.big_a * t + k.big_b;
    if den.abs() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator { t, value: den });
    }
    let den3 = den.powi(3);
    let kappa_sq = 1.0 + k.c / den3;
    let rational = (((k.a1 * t + k.a2) * t + k.a3) * t + k.a4) / den3;
    Ok(ClosedForm { kappa_sq, rational, difference: kappa_sq - rational })
}

/// `|gamma' x gamma''|^2 / |gamma'|^6` from the exact derivatives
/// `gamma'_i = a_i / (2 sqrt(a_i t + b_i))`,
/// `gamma''_i = -a_i^2 / (4 (a_i t + b_i)^{3/2})`.
pub fn curvature_numeric_oracle(curve: &SegmentCurve, t: f64) -> Result<f64> {
    curve.check_t(t)?;
    let (a, b) = (&curve.a, &curve.b);
    let d1 = Vec3::from_fn(|i, _| a[i] / (2.0 * (a[i] * t + b[i]).sqrt()));
    let d2 = Vec3::from_fn(|i, _| -a[i] * a[i] / (4.0 * (a[i] * t + b[i]).powf(1.5)));
    Ok(d1.cross(&d2).norm_squared() / d1.norm_squared().powi(3))
}

/// Minimum of `a_i t + b_i` kept by [`random_admissible_curve`].
pub const RANDOM_MARGIN: f64 = 0.05;

/// Random admissible curve: `a` uniform in `[-1, 1]^3` minus its mean
/// (rejected if `|a| < 0.1`), `b` uniform positive then normalised
/// (rejected if some `b_i < 2 * RANDOM_MARGIN`), and the interval the
/// largest one inside `[-1, 1]` with `min_i(a_i t + b_i) >= RANDOM_MARGIN`.
pub fn random_admissible_curve<R: Rng + ?Sized>(rng: &mut R) -> SegmentCurve {
    loop {
        let raw: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let mean = raw.iter().sum::<f64>() / 3.0;
        let mut a = raw.map(|x| x - mean);
        // Exact zero sum up to one rounding.
        a[2] = -(a[0] + a[1]);
        if a.iter().map(|x| x * x).sum::<f64>().sqrt() < 0.1 {
            continue;
        }
        let rb: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
        let s: f64 = rb.iter().sum();
        let mut b = rb.map(|x| x / s);
        b[2] = 1.0 - b[0] - b[1];
        if b.iter().any(|&x| x < 2.0 * RANDOM_MARGIN) {
            continue;
        }
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        for i in 0..3 {
            if a[i] > 0.0 {
                lo = lo.max((RANDOM_MARGIN - b[i]) / a[i]);
            } else if a[i] < 0.0 {
                hi = hi.min((RANDOM_MARGIN - b[i]) / a[i]);
            }
        }
        if let Ok(c) = make_segment_curve(a, b, (lo, hi)) {
            return c;
        }
    }
}

/// `n` equally spaced parameters over the curve's interval.
pub fn parameter_samples(curve: &SegmentCurve, n: usize) -> Vec<f64> {
    let (lo, hi) = curve.interval;
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
}

/// CSV rows `t, kappa_sq_closed, kappa_sq_oracle, difference`.
pub fn write_curvature_csv<W: Write>(curve: &SegmentCurve, ts: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "kappa_sq_closed", "kappa_sq_oracle", "difference"])?;
    for &t in ts {
        let c = curvature_closed_form(curve, t)?;
        let o = curvature_numeric_oracle(curve, t)?;
        w.write_record([t, c.kappa_sq, o, c.kappa_sq - o].map(|v| format!("{v:.17e}")))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn worked_coefficients() {
        let c = make_segment_curve([1.0, 1.0, -2.0], [0.2, 0.3, 0.5], (-0.15, 0.15)).unwrap();
        assert!((c.coefficients.big_a - 2.0).abs() < 1e-15);
        assert!((c.coefficients.big_b - 0.49).abs() < 1e-15);
        let l = make_segment_curve([1.0, -1.0, 0.0], [0.3, 0.3, 0.4], (-0.25, 0.25)).unwrap();
        assert_eq!(l.coefficients.big_a, 0.0);
        assert!((l.coefficients.big_b - 0.24).abs() < 1e-15);
    }

    #[test]
    fn latitude_circle() {
        let l = make_segment_curve([1.0, -1.0, 0.0], [0.3, 0.3, 0.4], (-0.25, 0.25)).unwrap();
        let k = l.coefficients;
        assert!((k.a4 - 0.02304).abs() < 1e-15);
        assert!((k.c - 0.009216).abs() < 1e-15);
        assert!((curvature_closed_form(&l, 0.0).unwrap().kappa_sq - 5.0 / 3.0).abs() < 1e-12);
        // Circle of Euclidean radius sqrt(0.6) at height sqrt(0.4).
        let r = (0.6f64).sqrt();
        assert!((curvature_numeric_oracle(&l, 0.1).unwrap() - 1.0 / (r * r)).abs() < 1e-12);
    }

    #[test]
    fn constraint_and_positivity_errors() {
        assert!(matches!(
            make_segment_curve([1.0, 1.0, -1.0], [0.2, 0.3, 0.5], (0.0, 0.1)),
            Err(Error::SegmentConstraint { .. })
        ));
        assert!(matches!(
            make_segment_curve([1.0, -1.0, 0.0], [0.5, 0.5, 0.0], (-0.1, 0.1)),
            Err(Error::Positivity { coordinate: 3, .. })
        ));
        let c = make_segment_curve([1.0, 1.0, -2.0], [0.2, 0.3, 0.5], (-0.15, 0.15)).unwrap();
        assert!(matches!(c.point(0.2), Err(Error::OutsideInterval { .. })));
    }

    #[test]
    fn random_curves_are_admissible() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let c = random_admissible_curve(&mut rng);
            for t in parameter_samples(&c, 7) {
                assert!((c.point(t).unwrap().norm_squared() - 1.0).abs() <= 1e-14 * 4.0);
                for i in 0..3 {
                    assert!(c.a[i] * t + c.b[i] >= RANDOM_MARGIN - 1e-12);
                }
            }
        }
    }
}
