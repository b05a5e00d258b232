//! Report files. Every writer is deterministic: fixed column and key order,
//! shortest round-trip float formatting, no timestamps.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::discretize::SurfaceMesh;
use crate::error::Result;
use crate::steklov::SteklovSpectrum;
use crate::surface::Vec3;

/// Version of the report layout; bumped on any change of columns or keys.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Comparison a check applies to its measured value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "bound", rename_all = "snake_case")]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Equals(f64),
}

impl Bound {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Bound::AtMost(b) => v <= b,
            Bound::AtLeast(b) => v >= b,
            Bound::Equals(b) => v == b,
        }
    }

    fn describe(&self) -> String {
        match self {
            Bound::AtMost(b) => format!("<= {b:e}"),
            Bound::AtLeast(b) => format!(">= {b:e}"),
            Bound::Equals(b) => format!("== {b}"),
        }
    }
}

/// One pass/fail assertion of a suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    pub fn new(suite: &str, name: impl Into<String>, value: f64, bound: Bound) -> Self {
        Check { suite: suite.into(), name: name.into(), value, passed: bound.holds(value), bound }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {}/{}: {:e} (required {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.value,
            self.bound.describe()
        )
    }
}

/// Collects files under an output directory.
#[derive(Debug)]
pub struct ReportWriter {
    dir: PathBuf,
    pub format: Format,
    written: Vec<PathBuf>,
}

impl ReportWriter {
    pub fn new(dir: &Path, format: Format) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(ReportWriter { dir: dir.to_path_buf(), format, written: Vec::new() })
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn path(&self, stem: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{stem}.{ext}"))
    }

    /// Create a file in the output directory and record it.
    pub fn create(&mut self, stem: &str, ext: &str) -> Result<fs::File> {
        let path = self.path(stem, ext);
        let f = fs::File::create(&path)?;
        self.written.push(path);
        Ok(f)
    }

    /// Write `value` pretty-printed with a schema version.
    pub fn json(&mut self, stem: &str, value: Value) -> Result<PathBuf> {
        let mut v = value;
        if let Value::Object(m) = &mut v {
            m.insert("schema_version".into(), json!(REPORT_SCHEMA_VERSION));
        }
        let path = self.path(stem, "json");
        let mut f = fs::File::create(&path)?;
        serde_json::to_writer_pretty(&mut f, &v)?;
        f.write_all(b"\n")?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Write a CSV with the given header and rows.
    pub fn csv(&mut self, stem: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let path = self.path(stem, "csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Write a table in the configured format; JSON gets one object per row
    /// plus `extra` at the top level.
    pub fn table(&mut self, stem: &str, header: &[&str], rows: &[Vec<String>], extra: Value) -> Result<PathBuf> {
        match self.format {
            Format::Csv => self.csv(stem, header, rows),
            Format::Json => {
                let parsed: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        let m: serde_json::Map<String, Value> = header
                            .iter()
                            .zip(r)
                            .map(|(h, c)| (h.to_string(), c.parse::<f64>().map(|x| json!(x)).unwrap_or_else(|_| json!(c))))
                            .collect();
                        Value::Object(m)
                    })
                    .collect();
                let mut v = json!({ "rows": parsed });
                if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
                    m.extend(e);
                }
                self.json(stem, v)
            }
        }
    }

    pub fn checks(&mut self, checks: &[Check]) -> Result<PathBuf> {
        let rows: Vec<Vec<String>> = checks
            .iter()
            .map(|c| {
                let (kind, b) = match c.bound {
                    Bound::AtMost(b) => ("at_most", b),
                    Bound::AtLeast(b) => ("at_least", b),
                    Bound::Equals(b) => ("equals", b),
                };
                vec![c.suite.clone(), c.name.clone(), num(c.value), kind.into(), num(b), c.passed.to_string()]
            })
            .collect();
        match self.format {
            Format::Csv => self.csv("checks", &["suite", "name", "value", "bound_kind", "bound", "passed"], &rows),
            Format::Json => self.json("checks", json!({ "checks": checks })),
        }
    }
}

/// Shortest round-trip representation.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// L2 norm of a boundary trace over each free-boundary component, by the
/// mesh's boundary quadrature.
pub fn component_trace_norms(mesh: &SurfaceMesh, boundary_nodes: &[usize], trace: &[f64]) -> Vec<f64> {
    let mut pos = vec![usize::MAX; mesh.n_nodes()];
    for (k, &n) in boundary_nodes.iter().enumerate() {
        pos[n] = k;
    }
    mesh.boundary
        .iter()
        .map(|c| {
            c.quadrature
                .iter()
                .map(|q| {
                    let u = (1.0 - q.local) * trace[pos[q.nodes[0]]] + q.local * trace[pos[q.nodes[1]]];
                    q.arc_weight() * u * u
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Rows `index, eigenvalue, trace_l2_<end>...`.
pub fn spectrum_rows(mesh: &SurfaceMesh, spectrum: &SteklovSpectrum) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["index".to_string(), "eigenvalue".to_string()];
    header.extend(mesh.boundary.iter().map(|c| format!("trace_l2_{:?}", c.end).to_lowercase()));
    let rows = spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let mut r = vec![k.to_string(), num(l)];
            r.extend(component_trace_norms(mesh, &spectrum.boundary_nodes, &spectrum.boundary_traces[k]).into_iter().map(num));
            r
        })
        .collect();
    (header, rows)
}

/// Boundary traces and full nodal fields of the eigenfunctions.
pub fn eigenfield_dump(mesh: &SurfaceMesh, spectrum: &SteklovSpectrum) -> Value {
    json!({
        "n_t": mesh.n_t,
        "n_theta": mesh.n_theta,
        "t_nodes": mesh.t_nodes,
        "theta_nodes": mesh.theta_nodes,
        "boundary_nodes": spectrum.boundary_nodes,
        "eigenvalues": spectrum.eigenvalues,
        "boundary_traces": spectrum.boundary_traces,
        "extensions": spectrum.extensions,
    })
}

/// Rows `x, y, z` of square-map images.
pub fn point_rows(points: &[Vec3]) -> Vec<Vec<String>> {
    points.iter().map(|p| vec![num(p.x), num(p.y), num(p.z)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(Bound::AtMost(1.0).holds(1.0));
        assert!(!Bound::AtLeast(0.1).holds(0.05));
        assert!(!Bound::AtMost(1.0).holds(f64::NAN));
        assert!(Check::new("s", "x", 3.0, Bound::Equals(3.0)).passed);
    }

    #[test]
    fn json_table_parses_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ReportWriter::new(dir.path(), Format::Json).unwrap();
        let p = w.table("t", &["a", "b"], &[vec!["1".into(), "x".into()]], json!({"k": 2})).unwrap();
        let v: Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(v["rows"][0]["a"], json!(1.0));
        assert_eq!(v["rows"][0]["b"], json!("x"));
        assert_eq!(v["k"], json!(2));
        assert_eq!(v["schema_version"], json!(REPORT_SCHEMA_VERSION));
    }
}
