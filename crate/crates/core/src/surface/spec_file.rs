//! Surface-spec documents (TOML).
//!
//! ```toml
//! format_version = 1
//!
//! [surface]
//! kind = "catenoid-rotated"   # catenoid | catenoid-rotated | disk | custom
//! alpha = 0.7853981633974483  # rotation angle, catenoid-rotated only
//! # half_height = 1.0         # catenoid only: truncate at |t| <= half_height
//! # hole_radius = 1e-3        # disk only
//!
//! # kind = "custom" needs a [custom] table:
//! [custom]
//! label = "my-surface"
//! t_range = [0.001, 1.0]
//! theta_range = [0.0, 6.283185307179586]   # optional
//! periodic = true                          # optional
//! ends = ["natural", "free"]               # t_min edge, t_max edge
//!
//! [[custom.terms]]   # coordinate += T_cheb(s) * (cos * cos(k theta) + sin * sin(k theta))
//! component = 0
//! cheb = 1
//! fourier = 1
//! cos = 0.5
//! ```

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    catenoid_with_half_height, critical_catenoid, equatorial_disk, equatorial_disk_with_hole, rotated_catenoid, ChebyshevFourier,
    Domain, EndKind, FourierChebyshevTerm, ParametricSurface,
};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub format_version: u32,
    pub surface: SurfaceEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceEntry {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomEntry {
    #[serde(default = "default_label")]
    pub label: String,
    pub t_range: [f64; 2],
    #[serde(default = "default_theta_range")]
    pub theta_range: [f64; 2],
    #[serde(default = "default_periodic")]
    pub periodic: bool,
    pub ends: [String; 2],
    pub terms: Vec<FourierChebyshevTerm>,
}

fn default_label() -> String {
    "custom".into()
}

fn default_theta_range() -> [f64; 2] {
    [0.0, std::f64::consts::TAU]
}

fn default_periodic() -> bool {
    true
}

fn parse_end(s: &str) -> Result<EndKind> {
    match s {
        "free" | "free-boundary" => Ok(EndKind::FreeBoundary),
        "natural" => Ok(EndKind::Natural),
        other => Err(Error::SpecFile(format!("unknown end kind {other:?} (expected \"free\" or \"natural\")"))),
    }
}

impl SurfaceSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: SurfaceSpec = toml::from_str(text).map_err(|e| Error::SpecFile(e.to_string()))?;
        if spec.format_version != FORMAT_VERSION {
            return Err(Error::SpecFile(format!(
                "unsupported format_version {} (this build reads {FORMAT_VERSION})",
                spec.format_version
            )));
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("surface spec serialises")
    }

    pub fn build(&self) -> Result<ParametricSurface> {
        let e = &self.surface;
        match e.kind.as_str() {
            "catenoid" => match e.half_height {
                Some(h) => Ok(catenoid_with_half_height(h, 0.0)),
                None => critical_catenoid(),
            },
            "catenoid-rotated" => {
                let alpha = e.alpha.ok_or_else(|| Error::SpecFile("catenoid-rotated needs alpha".into()))?;
                match e.half_height {
                    Some(h) => Ok(catenoid_with_half_height(h, alpha)),
                    None => rotated_catenoid(alpha),
                }
            }
            "disk" => Ok(match e.hole_radius {
                Some(r) => equatorial_disk_with_hole(r),
                None => equatorial_disk(),
            }),
            "custom" => {
                let c = self.custom.as_ref().ok_or_else(|| Error::SpecFile("kind = \"custom\" needs a [custom] table".into()))?;
                if c.terms.iter().any(|t| t.component > 2) {
                    return Err(Error::SpecFile("term component must be 0, 1 or 2".into()));
                }
                if !(c.t_range[1] > c.t_range[0]) || !(c.theta_range[1] > c.theta_range[0]) {
                    return Err(Error::SpecFile("empty parameter range".into()));
                }
                let domain = Domain {
                    t_range: (c.t_range[0], c.t_range[1]),
                    theta_range: (c.theta_range[0], c.theta_range[1]),
                    periodic: c.periodic,
                };
                let ends = [parse_end(&c.ends[0])?, parse_end(&c.ends[1])?];
                let imm = ChebyshevFourier::new(domain.t_range, c.terms.clone());
                let s = ParametricSurface::custom(Arc::new(imm), domain, ends, c.label.clone())?;
                s.validate(16, 1e-12)?;
                Ok(s)
            }
            other => Err(Error::UnknownSurface(other.to_string())),
        }
    }
}

/// Resolve a CLI surface argument: `catenoid`, `catenoid-rotated:<alpha>`,
/// `disk`, or a path to a surface-spec file.
pub fn resolve_surface(name: &str) -> Result<ParametricSurface> {
    match name {
        "catenoid" => critical_catenoid(),
        "disk" => Ok(equatorial_disk()),
        _ => {
            if let Some(rest) = name.strip_prefix("catenoid-rotated") {
                let alpha = match rest.strip_prefix(':') {
                    Some(a) => a.parse::<f64>().map_err(|_| Error::UnknownSurface(name.to_string()))?,
                    None if rest.is_empty() => std::f64::consts::FRAC_PI_4,
                    None => return Err(Error::UnknownSurface(name.to_string())),
                };
                return rotated_catenoid(alpha);
            }
            let path = Path::new(name);
            if path.exists() {
                SurfaceSpec::load(path)?.build()
            } else {
                Err(Error::UnknownSurface(name.to_string()))
            }
        }
    }
}
