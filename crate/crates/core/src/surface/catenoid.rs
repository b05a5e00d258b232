use std::sync::{Arc, OnceLock};

use nalgebra::Matrix3;

use super::{Domain, EndKind, Immersion, Jet, ParametricSurface, SurfaceKind, Vec3};
use crate::error::{Error, Result};

const BISECTION_TOL: f64 = 1e-14;
const BISECTION_MAX_STEPS: usize = 200;

/// Constants of the critical catenoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatenoidConstants {
    /// Root of `coth T = T`.
    pub t0: f64,
    /// Scale `1 / sqrt(cosh^2 T0 + T0^2)`.
    pub c: f64,
    /// The same scale through `sinh T0 / cosh^2 T0`.
    pub c_alt: f64,
}

impl CatenoidConstants {
    /// Closed-form Jacobi-Steklov eigenvalues of `nu_1, nu_2, nu_3`.
    pub fn normal_eigenvalues(&self) -> [f64; 3] {
        [-1.0, -1.0, self.t0 * self.t0 - 1.0]
    }

    /// `f = -h(eta, eta)` on the boundary.
    pub fn boundary_f(&self) -> f64 {
        -1.0 / (self.c * self.t0.cosh().powi(2))
    }

    /// Length of one boundary circle.
    pub fn boundary_length(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.c * self.t0.cosh()
    }
}

fn bisect_coth_fixed_point() -> Result<f64> {
    let g = |t: f64| 1.0 / t.tanh() - t;
    let (mut lo, mut hi) = (1.1f64, 1.3f64);
    for _ in 0..BISECTION_MAX_STEPS {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECTION_TOL {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::RootNotConverged { iterations: BISECTION_MAX_STEPS, tol: BISECTION_TOL })
}

/// Root-solves `coth T = T` once and caches the result.
pub fn catenoid_constants() -> Result<CatenoidConstants> {
    static CONSTS: OnceLock<std::result::Result<CatenoidConstants, (usize, f64)>> = OnceLock::new();
    let r = CONSTS.get_or_init(|| match bisect_coth_fixed_point() {
        Ok(t0) => {
            let ch = t0.cosh();
            Ok(CatenoidConstants {
                t0,
                c: 1.0 / (ch * ch + t0 * t0).sqrt(),
                c_alt: t0.sinh() / (ch * ch),
            })
        }
        Err(Error::RootNotConverged { iterations, tol }) => Err((iterations, tol)),
        Err(_) => unreachable!(),
    });
    r.clone().map_err(|(iterations, tol)| Error::RootNotConverged { iterations, tol })
}

/// `c R_alpha (cosh t cos theta, cosh t sin theta, t)` with `R_alpha` a
/// rotation by `alpha` in the yz-plane.
#[derive(Debug, Clone, Copy)]
struct Catenoid {
    c: f64,
    rot: Matrix3<f64>,
}

impl Catenoid {
    fn new(c: f64, alpha: f64) -> Self {
        let (s, co) = alpha.sin_cos();
        let rot = Matrix3::new(1.0, 0.0, 0.0, 0.0, co, -s, 0.0, s, co);
        Catenoid { c, rot }
    }
}

impl Immersion for Catenoid {
    fn position(&self, t: f64, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        self.rot * Vec3::new(t.cosh() * c, t.cosh() * s, t) * self.c
    }

    fn jet(&self, t: f64, theta: f64) -> Jet {
        let (s, c) = theta.sin_cos();
        let (ch, sh) = (t.cosh(), t.sinh());
        let k = self.c;
        let r = &self.rot;
        Jet {
            x: r * Vec3::new(ch * c, ch * s, t) * k,
            x_t: r * Vec3::new(sh * c, sh * s, 1.0) * k,
            x_s: r * Vec3::new(-ch * s, ch * c, 0.0) * k,
            x_tt: r * Vec3::new(ch * c, ch * s, 0.0) * k,
            x_ts: r * Vec3::new(-sh * s, sh * c, 0.0) * k,
            x_ss: r * Vec3::new(-ch * c, -ch * s, 0.0) * k,
        }
    }
}

/// Catenoid piece `|t| <= half_height` scaled so its boundary circles lie on
/// the unit sphere. Only `half_height = T0` meets the sphere orthogonally.
pub fn catenoid_with_half_height(half_height: f64, alpha: f64) -> ParametricSurface {
    let scale = 1.0 / (half_height.cosh().powi(2) + half_height * half_height).sqrt();
    let label = if alpha == 0.0 { "catenoid" } else { "catenoid-rotated" };
    ParametricSurface::from_parts(
        Arc::new(Catenoid::new(scale, alpha)),
        Domain::annulus(-half_height, half_height),
        [EndKind::FreeBoundary, EndKind::FreeBoundary],
        label,
        SurfaceKind::Catenoid { half_height, scale, alpha },
        // x_t x x_s = -c^2 cosh t (cos, sin, -sinh); the outward normal
        // (cos, sin, -sinh)/cosh makes zeta positive at the waist.
        -1.0,
    )
}

/// The critical catenoid on `[-T0, T0] x [0, 2 pi)`.
pub fn critical_catenoid() -> Result<ParametricSurface> {
    Ok(catenoid_with_half_height(catenoid_constants()?.t0, 0.0))
}

/// The critical catenoid rotated by `alpha` in the yz-plane.
pub fn rotated_catenoid(alpha: f64) -> Result<ParametricSurface> {
    Ok(catenoid_with_half_height(catenoid_constants()?.t0, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{free_boundary_residual, End};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn constants_match_closed_forms() {
        let k = catenoid_constants().unwrap();
        // Independent root of coth T = T by Newton from 1.2.
        let mut t = 1.2f64;
        for _ in 0..50 {
            let g = 1.0 / t.tanh() - t;
            let dg = -1.0 / t.sinh().powi(2) - 1.0;
            t -= g / dg;
        }
        assert!((k.t0 - t).abs() < 1e-13);
        assert!((k.t0 - 1.1996786).abs() < 1e-7);
        assert!((k.c - 0.460_485).abs() < 1e-6);
        assert!((k.c - k.c_alt).abs() < 1e-12);
        assert!((k.boundary_length() - 5.237_39).abs() < 1e-5);
    }

    #[test]
    fn normal_matches_closed_form() {
        let s = critical_catenoid().unwrap();
        for &(t, th) in &[(0.0, 0.0), (0.3, 1.0), (-1.0, 4.0), (1.1, 2.5)] {
            let geo = s.geometric_data(t, th).unwrap();
            let want = Vec3::new(th.cos(), th.sin(), -(t as f64).sinh()) / (t as f64).cosh();
            assert!((geo.normal - want).amax() < 1e-14);
            assert!(geo.mean_curvature.abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_f_is_constant() {
        let k = catenoid_constants().unwrap();
        let s = critical_catenoid().unwrap();
        for j in 0..16 {
            let th = j as f64 * PI / 8.0;
            for end in [End::Min, End::Max] {
                let bd = s.boundary_geometry(end, th).unwrap().boundary.unwrap();
                assert!((bd.f - k.boundary_f()).abs() < 1e-12);
                assert!((bd.f + 0.6627).abs() < 1e-4);
                assert!((bd.f * bd.f - 1.0 / k.t0.sinh().powi(2)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_fixes_waist_point_and_rotates_normal() {
        let k = catenoid_constants().unwrap();
        let s = rotated_catenoid(FRAC_PI_4).unwrap();
        let x = s.position(0.0, 0.0);
        assert!((x - Vec3::new(k.c, 0.0, 0.0)).amax() < 1e-15);

        let (t, th, a) = (k.t0, FRAC_PI_2, FRAC_PI_4);
        // Closed form of the rotated normal.
        let formula = Vec3::new(th.cos(), t.sinh() * a.sin() + th.sin() * a.cos(), th.sin() * a.sin() - t.sinh() * a.cos()) / t.cosh();
        let base = critical_catenoid().unwrap().geometric_data(t, th).unwrap().normal;
        let rot = nalgebra::Rotation3::from_axis_angle(&Vec3::x_axis(), a);
        let got = s.geometric_data(t, th).unwrap().normal;
        assert!((got - formula).amax() < 1e-14);
        assert!((rot * base - formula).amax() < 1e-14);
    }

    #[test]
    fn zero_rotation_is_identity() {
        let a = critical_catenoid().unwrap();
        let b = rotated_catenoid(0.0).unwrap();
        for (t, th) in a.sample_grid(9, 16) {
            assert_eq!(a.position(t, th), b.position(t, th));
        }
    }

    #[test]
    fn free_boundary_residuals() {
        assert!(free_boundary_residual(&critical_catenoid().unwrap(), 64).unwrap() <= 1e-12);
        assert!(free_boundary_residual(&rotated_catenoid(PI / 3.0).unwrap(), 64).unwrap() <= 1e-12);
        // Wrong height: boundary still on the sphere, but not orthogonal to it.
        let wrong = catenoid_with_half_height(1.0, 0.0);
        let res = free_boundary_residual(&wrong, 64).unwrap();
        // Oracle: |eta - X| at t = 1 from the parametrisation directly.
        let c = 1.0 / (1f64.cosh().powi(2) + 1.0).sqrt();
        let eta = Vec3::new(1f64.sinh(), 0.0, 1.0) / 1f64.cosh();
        let x = Vec3::new(c * 1f64.cosh(), 0.0, c);
        assert!((res - (eta - x).norm()).abs() < 1e-12);
        assert!(res >= 0.05);
    }

    #[test]
    fn support_vanishes_on_boundary() {
        let s = critical_catenoid().unwrap();
        for end in [End::Min, End::Max] {
            for (_, th) in s.boundary_samples(end, 32) {
                assert!(s.boundary_geometry(end, th).unwrap().support.abs() <= 1e-12);
            }
        }
        assert!(s.geometric_data(0.0, 0.0).unwrap().support > 0.0);
    }
}
