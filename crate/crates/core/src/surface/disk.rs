use std::sync::Arc;

use super::{Domain, EndKind, Immersion, Jet, ParametricSurface, SurfaceKind, Vec3};

/// Radius of the hole cut around the polar singularity of the disk.
pub const DISK_HOLE_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
struct FlatDisk;

impl Immersion for FlatDisk {
    fn position(&self, r: f64, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        Vec3::new(r * c, r * s, 0.0)
    }

    fn jet(&self, r: f64, theta: f64) -> Jet {
        let (s, c) = theta.sin_cos();
        Jet {
            x: Vec3::new(r * c, r * s, 0.0),
            x_t: Vec3::new(c, s, 0.0),
            x_s: Vec3::new(-r * s, r * c, 0.0),
            x_tt: Vec3::zeros(),
            x_ts: Vec3::new(-s, c, 0.0),
            x_ss: Vec3::new(-r * c, -r * s, 0.0),
        }
    }
}

/// Flat unit disk in the xy-plane in polar coordinates `t = r`, with the
/// pole replaced by a small hole carrying a natural boundary condition.
pub fn equatorial_disk_with_hole(hole_radius: f64) -> ParametricSurface {
    ParametricSurface::from_parts(
        Arc::new(FlatDisk),
        Domain::annulus(hole_radius, 1.0),
        [EndKind::Natural, EndKind::FreeBoundary],
        "disk",
        SurfaceKind::Disk { hole_radius },
        1.0,
    )
}

pub fn equatorial_disk() -> ParametricSurface {
    equatorial_disk_with_hole(DISK_HOLE_RADIUS)
}
