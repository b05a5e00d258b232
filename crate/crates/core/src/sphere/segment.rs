use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::fit::{fit_circle, fit_line, CircleFit};
use crate::surface::{ParametricSurface, Vec3};

/// Result of mapping the boundary through `F(s) = (s_1^2, s_2^2, s_3^2)`.
#[derive(Debug, Clone)]
pub struct SegmentTestReport {
    pub image_points: Vec<Vec3>,
    /// `max |x + y + z - 1|` over the image.
    pub plane_residual: f64,
    /// Per boundary component: largest distance to the best-fit line.
    pub line_residuals: Vec<f64>,
    /// Per boundary component: unit line direction.
    pub directions: Vec<Vec3>,
    /// Per component `|d . l| / |l|` with `l = (1/lambda_i)`; `None` in the
    /// cone/equator case where some `lambda_i = 0`.
    pub lambda_orthogonality: Option<Vec<f64>>,
    /// Affine fit `1/f^2 ~ P s + Q` along each segment, with `s` the
    /// coordinate along the fitted direction: `(P, Q, max residual)`.
    pub inverse_f_sq_fits: Vec<(f64, f64, f64)>,
    /// Plane + circle fit of each raw boundary component.
    pub roundness: Vec<CircleFit>,
}

impl SegmentTestReport {
    pub fn is_cone_case(&self) -> bool {
        self.lambda_orthogonality.is_none()
    }

    pub fn max_line_residual(&self) -> f64 {
        self.line_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_roundness(&self) -> f64 {
        self.roundness.iter().map(CircleFit::residual).fold(0.0, f64::max)
    }
}

pub fn square_map(x: &Vec3) -> Vec3 {
    x.component_mul(x)
}

/// Plane + circle fit of a closed curve given by samples.
pub fn roundness(points: &[Vec3]) -> Result<CircleFit> {
    fit_circle(points)
}

fn distinct(points: &[Vec3]) -> usize {
    let mut d: Vec<&Vec3> = Vec::new();
    for p in points {
        if d.iter().all(|q| (*q - p).norm() > 1e-12) {
            d.push(p);
            if d.len() >= 3 {
                break;
            }
        }
    }
    d.len()
}

/// Map `n` samples per free boundary component through `F`, fit a line in
/// the plane `x + y + z = 1`, test its direction against `(1/lambda_i)`,
/// and fit a circle to every raw component.
pub fn segment_and_roundness_test(surface: &ParametricSurface, lambdas: [f64; 3], n: usize) -> Result<SegmentTestReport> {
    segment_test_in_frame(surface, &Matrix3::identity(), lambdas, n)
}

/// As [`segment_and_roundness_test`], with boundary positions expressed in
/// the orthonormal frame whose columns are `frame` (the axes along which
/// the normal components are eigenfunctions with eigenvalues `lambdas`).
pub fn segment_test_in_frame(
    surface: &ParametricSurface,
    frame: &Matrix3<f64>,
    lambdas: [f64; 3],
    n: usize,
) -> Result<SegmentTestReport> {
    let mut image_points = Vec::new();
    let mut line_residuals = Vec::new();
    let mut directions = Vec::new();
    let mut inverse_f_sq_fits = Vec::new();
    let mut roundness_fits = Vec::new();
    let cone = lambdas.iter().any(|&l| l == 0.0);
    let inv = Vector3::new(1.0 / lambdas[0], 1.0 / lambdas[1], 1.0 / lambdas[2]);
    let mut orth = Vec::new();
    for end in surface.free_ends() {
        let mut raw = Vec::with_capacity(n);
        let mut f_vals = Vec::with_capacity(n);
        for (_, theta) in surface.boundary_samples(end, n) {
            let g = surface.boundary_geometry(end, theta)?;
            raw.push(frame.tr_mul(&g.position));
            f_vals.push(g.boundary.expect("boundary point").f);
        }
        let got = distinct(&raw);
        if got < 3 {
            return Err(Error::TooFewSamples { got, need: 3 });
        }
        let img: Vec<Vec3> = raw.iter().map(square_map).collect();
        let line = fit_line(&img)?;
        if !cone {
            orth.push(line.direction.dot(&inv).abs() / inv.norm());
        }
        // 1/f^2 against the segment coordinate.
        let s: Vec<f64> = img.iter().map(|p| (p - line.centroid).dot(&line.direction)).collect();
        let y: Vec<f64> = f_vals.iter().map(|f| 1.0 / (f * f)).collect();
        let m = s.len() as f64;
        let (sm, ym) = (s.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
        let sxx: f64 = s.iter().map(|v| (v - sm).powi(2)).sum();
        let sxy: f64 = s.iter().zip(&y).map(|(a, b)| (a - sm) * (b - ym)).sum();
        let p = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let q = ym - p * sm;
        let res = s.iter().zip(&y).map(|(a, b)| (p * a + q - b).abs()).fold(0.0, f64::max);
        inverse_f_sq_fits.push((p, q, res));
        line_residuals.push(line.max_residual);
        directions.push(line.direction);
        roundness_fits.push(fit_circle(&raw)?);
        image_points.extend(img);
    }
    let plane_residual = image_points.iter().map(|p| (p.x + p.y + p.z - 1.0).abs()).fold(0.0, f64::max);
    Ok(SegmentTestReport {
        image_points,
        plane_residual,
        line_residuals,
        directions,
        lambda_orthogonality: if cone { None } else { Some(orth) },
        inverse_f_sq_fits,
        roundness: roundness_fits,
    })
}
