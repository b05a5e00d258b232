//! Total-least-squares plane and line fits and a plane-circle fit for point
//! clouds in R^3.

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::linalg::sym_eigen3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFit {
    pub centroid: Vector3<f64>,
    pub normal: Vector3<f64>,
    /// Largest distance of a point to the plane.
    pub max_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub centroid: Vector3<f64>,
    pub direction: Vector3<f64>,
    /// Largest distance of a point to the line.
    pub max_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit {
    pub center: Vector3<f64>,
    pub radius: f64,
    pub normal: Vector3<f64>,
    /// Largest distance to the fitted plane.
    pub plane_residual: f64,
    /// Largest `| |p - center| - radius |` after projecting to the plane.
    pub radial_residual: f64,
}

impl CircleFit {
    /// Combined roundness residual.
    pub fn residual(&self) -> f64 {
        self.plane_residual.max(self.radial_residual)
    }
}

fn centroid(points: &[Vector3<f64>]) -> Vector3<f64> {
    points.iter().fold(Vector3::zeros(), |a, p| a + p) / points.len() as f64
}

fn second_moment(points: &[Vector3<f64>], c: &Vector3<f64>) -> Matrix3<f64> {
    points.iter().fold(Matrix3::zeros(), |a, p| {
        let d = p - c;
        a + d * d.transpose()
    })
}

fn need(points: &[Vector3<f64>], n: usize) -> Result<()> {
    if points.len() < n {
        return Err(Error::TooFewSamples { got: points.len(), need: n });
    }
    Ok(())
}

pub fn fit_plane(points: &[Vector3<f64>]) -> Result<PlaneFit> {
    need(points, 3)?;
    let c = centroid(points);
    let normal = sym_eigen3(&second_moment(points, &c)).vectors.column(0).into_owned();
    let max_residual = points.iter().map(|p| (p - c).dot(&normal).abs()).fold(0.0, f64::max);
    Ok(PlaneFit { centroid: c, normal, max_residual })
}

pub fn fit_line(points: &[Vector3<f64>]) -> Result<LineFit> {
    need(points, 2)?;
    let c = centroid(points);
    let direction = sym_eigen3(&second_moment(points, &c)).vectors.column(2).into_owned();
    let max_residual = points
        .iter()
        .map(|p| {
            let d = p - c;
            (d - direction * d.dot(&direction)).norm()
        })
        .fold(0.0, f64::max);
    Ok(LineFit { centroid: c, direction, max_residual })
}

/// Plane by TLS, then a circle in that plane: algebraic (Kasa) fit followed
/// by two Gauss-Newton steps on the geometric distance.
pub fn fit_circle(points: &[Vector3<f64>]) -> Result<CircleFit> {
    need(points, 3)?;
    let plane = fit_plane(points)?;
    let n = plane.normal;
    let e1 = crate::linalg::canonical_complement(&n);
    let e2 = n.cross(&e1);
    let uv: Vec<Vector2<f64>> = points
        .iter()
        .map(|p| {
            let d = p - plane.centroid;
            Vector2::new(d.dot(&e1), d.dot(&e2))
        })
        .collect();

    // x^2 + y^2 + D x + E y + F = 0 in least squares.
    let mut ata = Matrix3::zeros();
    let mut atb = Vector3::zeros();
    for q in &uv {
        let row = Vector3::new(q.x, q.y, 1.0);
        ata += row * row.transpose();
        atb -= row * q.norm_squared();
    }
    let sol = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::SegmentConstraint { what: "circle fit is singular (collinear points)", residual: 0.0 })?;
    let mut center = Vector2::new(-0.5 * sol.x, -0.5 * sol.y);
    let mut radius = (center.norm_squared() - sol.z).max(0.0).sqrt();

    for _ in 0..2 {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for q in &uv {
            let d = q - center;
            let dist = d.norm();
            if dist == 0.0 {
                continue;
            }
            let r = dist - radius;
            let j = Vector3::new(-d.x / dist, -d.y / dist, -1.0);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        match jtj.lu().solve(&jtr) {
            Some(step) => {
                center -= Vector2::new(step.x, step.y);
                radius -= step.z;
            }
            None => break,
        }
    }
    let radial_residual = uv.iter().map(|q| ((q - center).norm() - radius).abs()).fold(0.0, f64::max);
    let center3 = plane.centroid + e1 * center.x + e2 * center.y;
    Ok(CircleFit { center: center3, radius, normal: n, plane_residual: plane.max_residual, radial_residual })
}
