use crate::error::Result;
use crate::surface::{End, GeometricData, ParametricSurface, Vec3};

/// Below this `|d nu / dtheta|` the Gauss image of a boundary circle is
/// treated as a point and has no curvature.
const GAUSS_CURVE_FLOOR: f64 = 1e-8;

/// Curvature data of one boundary sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCurvature {
    pub end: End,
    pub theta: f64,
    /// `D_T T . nu` of the boundary curve.
    pub kappa_g: f64,
    /// `D_T T . X`.
    pub kappa_n: f64,
    /// `|D_T T|^2`.
    pub kappa_sq: f64,
    /// `1 + f^2` with `f = -h(eta, eta)`.
    pub one_plus_f_sq: f64,
    /// `-h(eta, eta)`, the expected `kappa_g`.
    pub f: f64,
    /// `|h| / sqrt 2`.
    pub h_norm_over_sqrt2: f64,
    /// Signed geodesic curvature of the Gauss image `nu(dSigma)` in the
    /// sphere, if the image is a curve.
    pub gauss_curve_curvature: Option<f64>,
}

impl BoundaryCurvature {
    /// `|kappa^2 - (1 + f^2)|`.
    pub fn identity_residual(&self) -> f64 {
        (self.kappa_sq - self.one_plus_f_sq).abs()
    }

    /// `| |kappa_gauss| |h(eta, eta)| - 1 |`: principal curvatures of the
    /// Gauss image are reciprocal to those of the boundary curve.
    pub fn reciprocity_residual(&self) -> Option<f64> {
        self.gauss_curve_curvature.map(|k| (k.abs() * self.f.abs() - 1.0).abs())
    }
}

/// Signed geodesic curvature `(nu x nu') . nu'' / |nu'|^3` of the Gauss
/// image of a boundary circle, with `nu''` from fourth-order differences of
/// the analytic `nu'`.
pub fn gauss_curve_curvature(surface: &ParametricSurface, end: End, theta: f64) -> Result<Option<f64>> {
    let geo = surface.boundary_geometry(end, theta)?;
    let d1 = geo.normal_derivs[1];
    if d1.norm() < GAUSS_CURVE_FLOOR {
        return Ok(None);
    }
    let h = f64::EPSILON.powf(0.2) * theta.abs().max(1.0);
    let t = geo.t;
    let dn = |s: f64| -> Result<Vec3> { Ok(surface.geometric_data(t, theta + s)?.normal_derivs[1]) };
    let d2 = (dn(-2.0 * h)? - dn(-h)? * 8.0 + dn(h)? * 8.0 - dn(2.0 * h)?) / (12.0 * h);
    Ok(Some(geo.normal.cross(&d1).dot(&d2) / d1.norm().powi(3)))
}

fn record(surface: &ParametricSurface, end: End, geo: &GeometricData) -> Result<BoundaryCurvature> {
    let bd = geo.boundary.expect("boundary point");
    let xs = geo.tangents[1];
    let xss = geo.second_derivatives[2];
    let speed2 = xs.norm_squared();
    let tangent = xs / speed2.sqrt();
    // Curvature vector of the curve theta -> X(t_end, theta).
    let k = (xss - tangent * xss.dot(&tangent)) / speed2;
    Ok(BoundaryCurvature {
        end,
        theta: geo.theta,
        kappa_g: k.dot(&geo.normal),
        kappa_n: k.dot(&geo.position),
        kappa_sq: k.norm_squared(),
        one_plus_f_sq: 1.0 + bd.f * bd.f,
        f: bd.f,
        h_norm_over_sqrt2: (geo.norm_h_sq / 2.0).sqrt(),
        gauss_curve_curvature: gauss_curve_curvature(surface, end, geo.theta)?,
    })
}

/// Curvature records at `n` equally spaced samples of every free boundary
/// component.
pub fn boundary_curvature_identity(surface: &ParametricSurface, n: usize) -> Result<Vec<BoundaryCurvature>> {
    let mut out = Vec::new();
    for end in surface.free_ends() {
        for (_, theta) in surface.boundary_samples(end, n) {
            out.push(record(surface, end, &surface.boundary_geometry(end, theta)?)?);
        }
    }
    Ok(out)
}
