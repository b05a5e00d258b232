//! Parametric immersions of a rectangle `[t_min, t_max] x [theta_min, theta_max)`
//! into the closed unit ball and their pointwise differential geometry.

mod catenoid;
mod custom;
mod disk;
pub mod spec_file;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};

pub use catenoid::{catenoid_constants, catenoid_with_half_height, critical_catenoid, rotated_catenoid, CatenoidConstants};
pub use custom::{finite_difference_jet, ChebyshevFourier, FnImmersion, FourierChebyshevTerm};
pub use disk::{equatorial_disk, equatorial_disk_with_hole, DISK_HOLE_RADIUS};

pub type Vec3 = Vector3<f64>;

/// Gram determinant below which a point is considered non-immersed.
pub const MIN_GRAM_DET: f64 = 1e-14;

/// Position and first/second partial derivatives of an immersion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub x: Vec3,
    pub x_t: Vec3,
    pub x_s: Vec3,
    pub x_tt: Vec3,
    pub x_ts: Vec3,
    pub x_ss: Vec3,
}

/// A map `(t, theta) -> R^3`.
///
/// Implementors that only know the position get fourth-order central finite
/// differences for the derivatives; the built-in surfaces override
/// [`Immersion::jet`] with closed forms. The position must be defined on a
/// small neighbourhood of the parameter rectangle for the stencils.
pub trait Immersion: Send + Sync + fmt::Debug {
    fn position(&self, t: f64, theta: f64) -> Vec3;

    fn jet(&self, t: f64, theta: f64) -> Jet {
        finite_difference_jet(|t, s| self.position(t, s), t, theta)
    }
}

/// Parameter rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub t_range: (f64, f64),
    pub theta_range: (f64, f64),
    /// `theta` wraps around; the rectangle closes up into an annulus.
    pub periodic: bool,
}

impl Domain {
    pub fn annulus(t_min: f64, t_max: f64) -> Self {
        Domain { t_range: (t_min, t_max), theta_range: (0.0, 2.0 * PI), periodic: true }
    }
}

/// How a `t = const` edge of the rectangle enters the problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndKind {
    /// Part of the free boundary on the unit sphere.
    FreeBoundary,
    /// Coordinate artefact (a cut-out pole or symmetry edge); natural
    /// boundary condition, carries no boundary measure.
    Natural,
}

/// Which `t = const` edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum End {
    Min,
    Max,
}

/// Built-in surface family or user-supplied immersion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SurfaceKind {
    Catenoid { half_height: f64, scale: f64, alpha: f64 },
    Disk { hole_radius: f64 },
    Custom,
}

#[derive(Debug, Clone)]
pub struct ParametricSurface {
    pub domain: Domain,
    pub ends: [EndKind; 2],
    pub label: String,
    pub kind: SurfaceKind,
    /// +1 or -1; multiplies `x_t x x_s / |x_t x x_s|` to give the normal.
    pub normal_sign: f64,
    immersion: Arc<dyn Immersion>,
}

/// Extra data attached to points on a free-boundary edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryGeometry {
    pub end: End,
    /// Outward unit conormal.
    pub conormal: Vec3,
    /// Conormal in coordinates, `conormal = c[0] x_t + c[1] x_s`.
    pub conormal_coords: Vector2<f64>,
    /// `h(eta, eta)`.
    pub h_eta_eta: f64,
    /// `f = -h(eta, eta)`.
    pub f: f64,
    /// `D_eta nu`.
    pub d_eta_normal: Vec3,
    /// `D_eta zeta = X . D_eta nu` (the `eta . nu` term vanishes).
    pub d_eta_support: f64,
    /// Arclength element `|x_s|` along the boundary edge.
    pub arc_element: f64,
}

/// Pointwise geometry at `(t, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricData {
    pub t: f64,
    pub theta: f64,
    pub position: Vec3,
    pub tangents: [Vec3; 2],
    pub second_derivatives: [Vec3; 3],
    pub metric: Matrix2<f64>,
    pub metric_inv: Matrix2<f64>,
    /// `sqrt(det g)`.
    pub area_element: f64,
    pub normal: Vec3,
    /// Partial derivatives of the normal, `d nu / dt` and `d nu / dtheta`.
    pub normal_derivs: [Vec3; 2],
    /// Coordinate second fundamental form `b_ij = X_ij . nu`.
    pub second_form: Matrix2<f64>,
    /// `|h|^2 = tr((g^{-1} b)^2)`.
    pub norm_h_sq: f64,
    /// `tr(g^{-1} b)`; zero for minimal surfaces.
    pub mean_curvature: f64,
    /// `zeta = X . nu`.
    pub support: f64,
    pub boundary: Option<BoundaryGeometry>,
}

impl GeometricData {
    /// Normal component `nu_i`.
    pub fn nu(&self, i: usize) -> f64 {
        self.normal[i]
    }

    /// Pullback of the round metric by the Gauss map, `g1_ij = nu_i . nu_j`.
    pub fn gauss_metric(&self) -> Matrix2<f64> {
        let [a, b] = self.normal_derivs;
        Matrix2::new(a.dot(&a), a.dot(&b), a.dot(&b), b.dot(&b))
    }
}

impl ParametricSurface {
    /// Wrap a user immersion. The normal orientation is fixed so that
    /// `zeta = X . nu` is positive where `|zeta|` is largest on a sample grid.
    pub fn custom(immersion: Arc<dyn Immersion>, domain: Domain, ends: [EndKind; 2], label: impl Into<String>) -> Result<Self> {
        let mut s = ParametricSurface {
            domain,
            ends,
            label: label.into(),
            kind: SurfaceKind::Custom,
            normal_sign: 1.0,
            immersion,
        };
        let mut best = 0.0f64;
        for (t, theta) in s.sample_grid(17, 32) {
            let z = s.geometric_data(t, theta)?.support;
            if z.abs() > best.abs() {
                best = z;
            }
        }
        if best < 0.0 {
            s.normal_sign = -1.0;
        }
        Ok(s)
    }

    pub(crate) fn from_parts(
        immersion: Arc<dyn Immersion>,
        domain: Domain,
        ends: [EndKind; 2],
        label: &str,
        kind: SurfaceKind,
        normal_sign: f64,
    ) -> Self {
        ParametricSurface { domain, ends, label: label.to_string(), kind, normal_sign, immersion }
    }

    pub fn immersion(&self) -> &dyn Immersion {
        self.immersion.as_ref()
    }

    pub fn position(&self, t: f64, theta: f64) -> Vec3 {
        self.immersion.position(t, theta)
    }

    pub fn end_kind(&self, end: End) -> EndKind {
        match end {
            End::Min => self.ends[0],
            End::Max => self.ends[1],
        }
    }

    pub fn end_parameter(&self, end: End) -> f64 {
        match end {
            End::Min => self.domain.t_range.0,
            End::Max => self.domain.t_range.1,
        }
    }

    /// Ends that belong to the free boundary.
    pub fn free_ends(&self) -> Vec<End> {
        [End::Min, End::Max].into_iter().filter(|&e| self.end_kind(e) == EndKind::FreeBoundary).collect()
    }

    fn end_at(&self, t: f64) -> Option<End> {
        let (lo, hi) = self.domain.t_range;
        let eps = 1e-13 * (1.0 + lo.abs().max(hi.abs()));
        if (t - hi).abs() <= eps && self.ends[1] == EndKind::FreeBoundary {
            Some(End::Max)
        } else if (t - lo).abs() <= eps && self.ends[0] == EndKind::FreeBoundary {
            Some(End::Min)
        } else {
            None
        }
    }

    /// Uniform `n_t x n_theta` sample grid covering the closed rectangle
    /// (the periodic seam is sampled once).
    pub fn sample_grid(&self, n_t: usize, n_theta: usize) -> Vec<(f64, f64)> {
        let (t0, t1) = self.domain.t_range;
        let (s0, s1) = self.domain.theta_range;
        let ds = if self.domain.periodic { (s1 - s0) / n_theta as f64 } else { (s1 - s0) / (n_theta.max(2) - 1) as f64 };
        let mut out = Vec::with_capacity(n_t * n_theta);
        for i in 0..n_t {
            let t = t0 + (t1 - t0) * i as f64 / (n_t.max(2) - 1) as f64;
            for j in 0..n_theta {
                out.push((t, s0 + ds * j as f64));
            }
        }
        out
    }

    /// Samples along one boundary edge.
    pub fn boundary_samples(&self, end: End, n: usize) -> Vec<(f64, f64)> {
        let t = self.end_parameter(end);
        let (s0, s1) = self.domain.theta_range;
        let step = if self.domain.periodic { (s1 - s0) / n as f64 } else { (s1 - s0) / (n.max(2) - 1) as f64 };
        (0..n).map(|j| (t, s0 + step * j as f64)).collect()
    }

    /// Full pointwise geometry. Points on a free-boundary edge also carry
    /// the conormal data.
    pub fn geometric_data(&self, t: f64, theta: f64) -> Result<GeometricData> {
        let jet = self.immersion.jet(t, theta);
        self.geometry_from_jet(t, theta, &jet, self.end_at(t))
    }

    /// Geometry at a boundary point of the given end, independent of the
    /// floating-point match of `t` with the end parameter.
    pub fn boundary_geometry(&self, end: End, theta: f64) -> Result<GeometricData> {
        let t = self.end_parameter(end);
        let jet = self.immersion.jet(t, theta);
        self.geometry_from_jet(t, theta, &jet, Some(end))
    }

    fn geometry_from_jet(&self, t: f64, theta: f64, jet: &Jet, end: Option<End>) -> Result<GeometricData> {
        let g = Matrix2::new(
            jet.x_t.dot(&jet.x_t),
            jet.x_t.dot(&jet.x_s),
            jet.x_t.dot(&jet.x_s),
            jet.x_s.dot(&jet.x_s),
        );
        let det = g.determinant();
        if !(det > MIN_GRAM_DET) {
            return Err(Error::DegenerateMetric { t, theta, det });
        }
        let ginv = Matrix2::new(g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)]) / det;
        let cross = jet.x_t.cross(&jet.x_s);
        let normal = cross * (self.normal_sign / cross.norm());
        let b = Matrix2::new(
            jet.x_tt.dot(&normal),
            jet.x_ts.dot(&normal),
            jet.x_ts.dot(&normal),
            jet.x_ss.dot(&normal),
        );
        // Shape operator S = g^{-1} b (mixed components S^j_i).
        let shape = ginv * b;
        let norm_h_sq = (shape * shape).trace();
        let mean_curvature = shape.trace();
        // Weingarten: nu_{,i} = - S^j_i X_j
        let tangents = [jet.x_t, jet.x_s];
        let dn = |i: usize| -(tangents[0] * shape[(0, i)] + tangents[1] * shape[(1, i)]);
        let normal_derivs = [dn(0), dn(1)];
        let support = jet.x.dot(&normal);

        let boundary = end.map(|end| {
            let sign = match end {
                End::Max => 1.0,
                End::Min => -1.0,
            };
            // Gradient of t, normalised: the unit conormal in coordinates.
            let v = Vector2::new(ginv[(0, 0)], ginv[(1, 0)]) * (sign / ginv[(0, 0)].sqrt());
            let conormal = tangents[0] * v[0] + tangents[1] * v[1];
            let h_eta_eta = (v.transpose() * b * v)[(0, 0)];
            let d_eta_normal = normal_derivs[0] * v[0] + normal_derivs[1] * v[1];
            BoundaryGeometry {
                end,
                conormal,
                conormal_coords: v,
                h_eta_eta,
                f: -h_eta_eta,
                d_eta_normal,
                d_eta_support: jet.x.dot(&d_eta_normal),
                arc_element: jet.x_s.norm(),
            }
        });

        Ok(GeometricData {
            t,
            theta,
            position: jet.x,
            tangents,
            second_derivatives: [jet.x_tt, jet.x_ts, jet.x_ss],
            metric: g,
            metric_inv: ginv,
            area_element: det.sqrt(),
            normal,
            normal_derivs,
            second_form: b,
            norm_h_sq,
            mean_curvature,
            support,
            boundary,
        })
    }

    /// Checks the immersion invariants on an `n x 2n` sample grid: positive
    /// Gram determinant, image in the closed ball, free-boundary edges on the
    /// unit sphere.
    pub fn validate(&self, n: usize, tol: f64) -> Result<()> {
        for (t, theta) in self.sample_grid(n, 2 * n) {
            let geo = self.geometric_data(t, theta)?;
            let r = geo.position.norm();
            if r > 1.0 + tol {
                return Err(Error::SurfaceInvariant(format!("|X({t}, {theta})| = {r} lies outside the unit ball")));
            }
        }
        for end in self.free_ends() {
            for (t, theta) in self.boundary_samples(end, 2 * n) {
                let r = self.position(t, theta).norm();
                if (r - 1.0).abs() > tol {
                    return Err(Error::SurfaceInvariant(format!("boundary point |X({t}, {theta})| = {r} is off the unit sphere")));
                }
            }
        }
        Ok(())
    }
}

/// Max over boundary samples of `max(||X| - 1|, |eta - X|)`; zero for an
/// exact free boundary minimal surface.
pub fn free_boundary_residual(surface: &ParametricSurface, n_samples: usize) -> Result<f64> {
    if n_samples < 4 {
        return Err(Error::TooFewSamples { got: n_samples, need: 4 });
    }
    let mut worst = 0.0f64;
    for end in surface.free_ends() {
        for (_, theta) in surface.boundary_samples(end, n_samples) {
            let geo = surface.boundary_geometry(end, theta)?;
            let bd = geo.boundary.expect("boundary geometry");
            let x = geo.position;
            worst = worst.max((x.norm() - 1.0).abs()).max((bd.conormal - x).norm());
        }
    }
    Ok(worst)
}

/// Dimension of `span(nu_1, nu_2, nu_3)` as functions on the surface,
/// estimated from the rank of their Gram matrix on a sample grid.
pub fn gauss_map_dimension(surface: &ParametricSurface, n: usize) -> Result<usize> {
    let mut gram = nalgebra::Matrix3::<f64>::zeros();
    for (t, theta) in surface.sample_grid(n, 2 * n) {
        let nu = surface.geometric_data(t, theta)?.normal;
        gram += nu * nu.transpose();
    }
    let e = crate::linalg::sym_eigen3(&gram);
    let top = e.values[2];
    Ok(e.values.iter().filter(|&&v| v > 1e-10 * top).count())
}
