use crate::error::{Error, Result};
use crate::surface::{End, GeometricData, ParametricSurface};

/// Node numbering of the tensor grid: `node = row * cols + col`, rows along
/// `t`, columns along `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridLayout {
    pub rows: usize,
    pub cols: usize,
    pub periodic: bool,
}

impl GridLayout {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn node(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    #[inline]
    pub fn row_col(&self, node: usize) -> (usize, usize) {
        (node / self.cols, node % self.cols)
    }

    /// Neighbour at offset `(di, dj)`, each in `-1..=1`.
    #[inline]
    pub fn neighbor(&self, node: usize, di: i64, dj: i64) -> Option<usize> {
        let (r, c) = self.row_col(node);
        let r2 = r as i64 + di;
        if r2 < 0 || r2 >= self.rows as i64 {
            return None;
        }
        let mut c2 = c as i64 + dj;
        if self.periodic {
            c2 = c2.rem_euclid(self.cols as i64);
        } else if c2 < 0 || c2 >= self.cols as i64 {
            return None;
        }
        Some(self.node(r2 as usize, c2 as usize))
    }
}

/// Interior quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub cell: usize,
    /// Local coordinates in `[0, 1]^2` (t first).
    pub local: [f64; 2],
    /// Weight in parameter measure `dt dtheta`; multiply by the area
    /// element for `d mu`.
    pub weight: f64,
    pub geo: GeometricData,
}

impl QuadPoint {
    /// Weight in surface measure.
    pub fn area_weight(&self) -> f64 {
        self.weight * self.geo.area_element
    }
}

/// Quadrature point on a boundary edge.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryQuadPoint {
    /// Edge end nodes, in increasing theta.
    pub nodes: [usize; 2],
    /// Local coordinate along the edge in `[0, 1]`.
    pub local: f64,
    /// Weight in `dtheta`; multiply by the arclength element for `da`.
    pub weight: f64,
    pub geo: GeometricData,
}

impl BoundaryQuadPoint {
    pub fn arc_weight(&self) -> f64 {
        self.weight * self.geo.boundary.expect("boundary point").arc_element
    }
}

/// One boundary edge `t = const` on the free boundary.
#[derive(Debug, Clone)]
pub struct BoundaryComponent {
    pub end: End,
    pub row: usize,
    pub nodes: Vec<usize>,
    pub quadrature: Vec<BoundaryQuadPoint>,
}

#[derive(Debug, Clone, Copy)]
pub struct Cell {
    /// Local order `(i, j), (i+1, j), (i, j+1), (i+1, j+1)`.
    pub nodes: [usize; 4],
}

/// Structured tensor-product mesh of the parameter rectangle with cached
/// geometry at nodes and 2x2 Gauss points.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub surface: ParametricSurface,
    pub layout: GridLayout,
    pub n_t: usize,
    pub n_theta: usize,
    pub dt: f64,
    pub dtheta: f64,
    pub t_nodes: Vec<f64>,
    pub theta_nodes: Vec<f64>,
    pub node_geometry: Vec<GeometricData>,
    pub cells: Vec<Cell>,
    pub quadrature: Vec<QuadPoint>,
    pub boundary: Vec<BoundaryComponent>,
}

/// Two-point Gauss-Legendre nodes on `[0, 1]`, `(1 -+ 1/sqrt 3) / 2`.
pub const GAUSS_2: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

/// Uniform `n_t x n_theta` cell grid on the surface's parameter rectangle.
pub fn build_mesh(surface: &ParametricSurface, n_t: usize, n_theta: usize) -> Result<SurfaceMesh> {
    if n_t < 8 || n_theta < 8 {
        return Err(Error::InvalidMesh(format!("mesh {n_t}x{n_theta} is below the 8x8 minimum")));
    }
    let d = surface.domain;
    let periodic = d.periodic;
    let layout = GridLayout { rows: n_t + 1, cols: if periodic { n_theta } else { n_theta + 1 }, periodic };
    let dt = (d.t_range.1 - d.t_range.0) / n_t as f64;
    let dtheta = (d.theta_range.1 - d.theta_range.0) / n_theta as f64;
    let mut t_nodes: Vec<f64> = (0..=n_t).map(|i| d.t_range.0 + dt * i as f64).collect();
    t_nodes[n_t] = d.t_range.1;
    let theta_nodes: Vec<f64> = (0..layout.cols).map(|j| d.theta_range.0 + dtheta * j as f64).collect();

    let free_row = |row: usize| -> Option<End> {
        let end = if row == 0 {
            End::Min
        } else if row == n_t {
            End::Max
        } else {
            return None;
        };
        surface.free_ends().contains(&end).then_some(end)
    };

    let mut node_geometry = Vec::with_capacity(layout.len());
    for (i, &t) in t_nodes.iter().enumerate() {
        for &theta in &theta_nodes {
            node_geometry.push(match free_row(i) {
                Some(end) => surface.boundary_geometry(end, theta)?,
                None => surface.geometric_data(t, theta)?,
            });
        }
    }

    let mut cells = Vec::with_capacity(n_t * n_theta);
    let mut quadrature = Vec::with_capacity(4 * n_t * n_theta);
    for i in 0..n_t {
        for j in 0..n_theta {
            let jn = if periodic { (j + 1) % layout.cols } else { j + 1 };
            let cell = cells.len();
            cells.push(Cell {
                nodes: [layout.node(i, j), layout.node(i + 1, j), layout.node(i, jn), layout.node(i + 1, jn)],
            });
            for &b in &GAUSS_2 {
                for &a in &GAUSS_2 {
                    let t = t_nodes[i] + a * dt;
                    let theta = theta_nodes[j] + b * dtheta;
                    quadrature.push(QuadPoint {
                        cell,
                        local: [a, b],
                        weight: 0.25 * dt * dtheta,
                        geo: surface.geometric_data(t, theta)?,
                    });
                }
            }
        }
    }

    let mut boundary = Vec::new();
    for end in surface.free_ends() {
        let row = if end == End::Min { 0 } else { n_t };
        let nodes: Vec<usize> = (0..layout.cols).map(|j| layout.node(row, j)).collect();
        let n_edges = n_theta;
        let mut quad = Vec::with_capacity(2 * n_edges);
        for j in 0..n_edges {
            let jn = if periodic { (j + 1) % layout.cols } else { j + 1 };
            for &s in &GAUSS_2 {
                quad.push(BoundaryQuadPoint {
                    nodes: [layout.node(row, j), layout.node(row, jn)],
                    local: s,
                    weight: 0.5 * dtheta,
                    geo: surface.boundary_geometry(end, theta_nodes[j] + s * dtheta)?,
                });
            }
        }
        boundary.push(BoundaryComponent { end, row, nodes, quadrature: quad });
    }

    Ok(SurfaceMesh {
        surface: surface.clone(),
        layout,
        n_t,
        n_theta,
        dt,
        dtheta,
        t_nodes,
        theta_nodes,
        node_geometry,
        cells,
        quadrature,
        boundary,
    })
}

impl SurfaceMesh {
    pub fn n_nodes(&self) -> usize {
        self.layout.len()
    }

    /// All free-boundary nodes, component by component.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        self.boundary.iter().flat_map(|c| c.nodes.iter().copied()).collect()
    }

    /// Sample a pointwise quantity at the nodes.
    pub fn sample<F: Fn(&GeometricData) -> f64>(&self, f: F) -> Vec<f64> {
        self.node_geometry.iter().map(f).collect()
    }

    /// `int_Sigma f d mu` by 2x2 Gauss quadrature with exact geometry.
    pub fn integrate_area<F: Fn(&GeometricData) -> f64>(&self, f: F) -> f64 {
        self.quadrature.iter().map(|q| q.area_weight() * f(&q.geo)).sum()
    }

    /// `int_{dSigma} f da` over all free-boundary components.
    pub fn integrate_boundary<F: Fn(&GeometricData) -> f64>(&self, f: F) -> f64 {
        self.boundary.iter().map(|c| c.quadrature.iter().map(|q| q.arc_weight() * f(&q.geo)).sum::<f64>()).sum()
    }

    pub fn area(&self) -> f64 {
        self.integrate_area(|_| 1.0)
    }

    /// Length of each boundary component.
    pub fn boundary_lengths(&self) -> Vec<f64> {
        self.boundary.iter().map(|c| c.quadrature.iter().map(|q| q.arc_weight()).sum()).collect()
    }

    /// Bilinear interpolation of nodal values at a quadrature point.
    pub fn interpolate(&self, field: &[f64], q: &QuadPoint) -> f64 {
        let [a, b] = q.local;
        let n = self.cells[q.cell].nodes;
        let w = [(1.0 - a) * (1.0 - b), a * (1.0 - b), (1.0 - a) * b, a * b];
        (0..4).map(|k| w[k] * field[n[k]]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{catenoid_constants, critical_catenoid, equatorial_disk, DISK_HOLE_RADIUS};
    use std::f64::consts::PI;

    #[test]
    fn gauss_points() {
        let g = 1.0 / 3f64.sqrt();
        assert!((GAUSS_2[0] - 0.5 * (1.0 - g)).abs() < 1e-16);
        assert!((GAUSS_2[1] - 0.5 * (1.0 + g)).abs() < 1e-16);
    }

    #[test]
    fn rejects_coarse_mesh() {
        assert!(matches!(build_mesh(&equatorial_disk(), 7, 64), Err(Error::InvalidMesh(_))));
        assert!(matches!(build_mesh(&equatorial_disk(), 8, 4), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn disk_area() {
        let m = build_mesh(&equatorial_disk(), 32, 64).unwrap();
        let exact = PI * (1.0 - DISK_HOLE_RADIUS * DISK_HOLE_RADIUS);
        assert!((m.area() - exact).abs() < 1e-4);
        assert_eq!(m.boundary.len(), 1);
        assert!((m.boundary_lengths()[0] - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn catenoid_boundary_and_area_convergence() {
        let k = catenoid_constants().unwrap();
        let s = critical_catenoid().unwrap();
        let m = build_mesh(&s, 32, 64).unwrap();
        for len in m.boundary_lengths() {
            assert!((len - 2.0 * PI * k.c * k.t0.cosh()).abs() < 1e-6);
        }
        // Area = 2 pi c^2 int cosh^2 = 2 pi c^2 (T0 + sinh T0 cosh T0).
        let exact = 2.0 * PI * k.c * k.c * (k.t0 + k.t0.sinh() * k.t0.cosh());
        let e16 = (build_mesh(&s, 16, 32).unwrap().area() - exact).abs();
        let e32 = (m.area() - exact).abs();
        assert!(e16 / e32 > 3.5, "area convergence order below 2: ratio {}", e16 / e32);
    }
}
