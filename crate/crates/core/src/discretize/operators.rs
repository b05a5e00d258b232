use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, Vector2};

use super::mesh::{GridLayout, SurfaceMesh};
use crate::error::{Error, Result};
use crate::linalg::norm_inf;
use crate::surface::GeometricData;

/// Sparse symmetric-pattern operator on the grid with a 3x3 nodal stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOperator {
    layout: GridLayout,
    coeffs: Vec<[f64; 9]>,
}

#[inline]
fn slot(di: i64, dj: i64) -> usize {
    ((di + 1) * 3 + (dj + 1)) as usize
}

const OFFSETS: [(i64, i64); 9] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)];

impl GridOperator {
    pub fn zeros(layout: GridLayout) -> Self {
        GridOperator { layout, coeffs: vec![[0.0; 9]; layout.len()] }
    }

    pub fn layout(&self) -> GridLayout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.len()
    }

    fn offset(&self, row: usize, col: usize) -> (i64, i64) {
        let (ir, jr) = self.layout.row_col(row);
        let (ic, jc) = self.layout.row_col(col);
        let di = ic as i64 - ir as i64;
        let dj = if self.layout.periodic {
            let n = self.layout.cols as i64;
            match (jc as i64 - jr as i64).rem_euclid(n) {
                0 => 0,
                1 => 1,
                d if d == n - 1 => -1,
                _ => panic!("nodes {row} and {col} are not stencil neighbours"),
            }
        } else {
            jc as i64 - jr as i64
        };
        assert!(di.abs() <= 1 && dj.abs() <= 1, "nodes {row} and {col} are not stencil neighbours");
        (di, dj)
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        let (di, dj) = self.offset(row, col);
        self.coeffs[row][slot(di, dj)] += value;
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        let (ir, jr) = self.layout.row_col(row);
        let (ic, jc) = self.layout.row_col(col);
        if ir.abs_diff(ic) > 1 {
            return 0.0;
        }
        let n = self.layout.cols;
        let near = if self.layout.periodic {
            let d = (jc + n - jr) % n;
            d == 0 || d == 1 || d == n - 1
        } else {
            jr.abs_diff(jc) <= 1
        };
        if !near {
            return 0.0;
        }
        let (di, dj) = self.offset(row, col);
        self.coeffs[row][slot(di, dj)]
    }

    /// Nonzero pattern of a row: `(column, value)` pairs.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        OFFSETS.iter().filter_map(move |&(di, dj)| {
            let v = self.coeffs[row][slot(di, dj)];
            if v == 0.0 {
                return None;
            }
            self.layout.neighbor(row, di, dj).map(|c| (c, v))
        })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    /// Bilinear form `u^T A v`.
    pub fn form(&self, u: &[f64], v: &[f64]) -> f64 {
        (0..self.dim()).map(|r| u[r] * self.row(r).map(|(c, a)| a * v[c]).sum::<f64>()).sum()
    }

    /// `sum_k w_k A_k` over operators on the same layout.
    pub fn combine(parts: &[(f64, &GridOperator)]) -> GridOperator {
        let layout = parts[0].1.layout;
        let mut out = GridOperator::zeros(layout);
        for (w, op) in parts {
            assert_eq!(op.layout, layout);
            for (o, c) in out.coeffs.iter_mut().zip(&op.coeffs) {
                for k in 0..9 {
                    o[k] += w * c[k];
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().flat_map(|c| c.iter()).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute row sum.
    pub fn row_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `max |A_ij - A_ji| / max |A_ij|`.
    pub fn relative_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim() {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.entry(c, r)).abs());
            }
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// `(row, col, value)` for every stored nonzero, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out: Vec<(usize, usize, f64)> = (0..self.dim()).flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v))).collect();
        out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        out
    }

    /// Sparse triplet text dump, one `row col value` line per nonzero.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (r, c, v) in self.triplets() {
            writeln!(w, "{r} {c} {v:.17e}")?;
        }
        Ok(())
    }

    /// Dense restriction to the given row and column index sets.
    pub fn dense_block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        let mut pos = vec![usize::MAX; self.dim()];
        for (k, &c) in cols.iter().enumerate() {
            pos[c] = k;
        }
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                if pos[c] != usize::MAX {
                    m[(i, pos[c])] += v;
                }
            }
        }
        m
    }
}

/// Split of the nodes into interior and free-boundary degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub interior: Vec<usize>,
    /// Free-boundary nodes, component by component.
    pub boundary: Vec<usize>,
    /// Position of each node inside `boundary`, if any.
    pub boundary_pos: Vec<Option<usize>>,
}

impl Partition {
    pub fn from_mesh(mesh: &SurfaceMesh) -> Self {
        let boundary = mesh.boundary_nodes();
        let mut boundary_pos = vec![None; mesh.n_nodes()];
        for (k, &n) in boundary.iter().enumerate() {
            boundary_pos[n] = Some(k);
        }
        let interior = (0..mesh.n_nodes()).filter(|&n| boundary_pos[n].is_none()).collect();
        Partition { interior, boundary, boundary_pos }
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary_pos[node].is_some()
    }

    /// Boundary values of a nodal field.
    pub fn trace(&self, field: &[f64]) -> Vec<f64> {
        self.boundary.iter().map(|&n| field[n]).collect()
    }

    /// Nodal field equal to `trace` on the boundary and zero inside.
    pub fn embed_trace(&self, trace: &[f64], n_nodes: usize) -> Vec<f64> {
        let mut f = vec![0.0; n_nodes];
        for (&n, &v) in self.boundary.iter().zip(trace) {
            f[n] = v;
        }
        f
    }
}

/// Assembled bilinear forms on a mesh.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub mesh: Arc<SurfaceMesh>,
    /// `K(f, h) = int Df . Dh d mu`
    pub stiffness: GridOperator,
    /// `P(f, h) = int |h|^2 f h d mu`
    pub potential: GridOperator,
    /// `M(f, h) = int f h d mu`
    pub interior_mass: GridOperator,
    /// `B(f, h) = int_{dSigma} f h da`
    pub boundary_mass: GridOperator,
    pub partition: Partition,
}

impl OperatorSet {
    /// `K - P`, the weak form of `-J`.
    pub fn jacobi(&self) -> GridOperator {
        GridOperator::combine(&[(1.0, &self.stiffness), (-1.0, &self.potential)])
    }

    /// `S = K - P - B`.
    pub fn index_form(&self) -> GridOperator {
        GridOperator::combine(&[(1.0, &self.stiffness), (-1.0, &self.potential), (-1.0, &self.boundary_mass)])
    }

    pub fn n_nodes(&self) -> usize {
        self.mesh.n_nodes()
    }

    /// Dense boundary block of the boundary mass.
    pub fn boundary_mass_matrix(&self) -> DMatrix<f64> {
        self.boundary_mass.dense_block(&self.partition.boundary, &self.partition.boundary)
    }
}

fn basis(local: [f64; 2]) -> ([f64; 4], [Vector2<f64>; 4]) {
    let [a, b] = local;
    let vals = [(1.0 - a) * (1.0 - b), a * (1.0 - b), (1.0 - a) * b, a * b];
    let grads = [
        Vector2::new(-(1.0 - b), -(1.0 - a)),
        Vector2::new(1.0 - b, -a),
        Vector2::new(-b, 1.0 - a),
        Vector2::new(b, a),
    ];
    (vals, grads)
}

/// `int w phi_a phi_b dt dtheta` where `w` already includes the area element
/// of whatever metric the caller integrates against.
pub fn assemble_mass_like<F: Fn(&GeometricData) -> f64>(mesh: &SurfaceMesh, weight: F) -> GridOperator {
    let mut op = GridOperator::zeros(mesh.layout);
    for q in &mesh.quadrature {
        let (phi, _) = basis(q.local);
        let w = q.weight * weight(&q.geo);
        let nodes = mesh.cells[q.cell].nodes;
        for a in 0..4 {
            for b in 0..4 {
                op.add(nodes[a], nodes[b], w * phi[a] * phi[b]);
            }
        }
    }
    op
}

/// `int (grad phi_a)^T g^{-1} grad phi_b sqrt(det g) dt dtheta`.
pub fn assemble_stiffness(mesh: &SurfaceMesh) -> GridOperator {
    let mut op = GridOperator::zeros(mesh.layout);
    let scale = Vector2::new(1.0 / mesh.dt, 1.0 / mesh.dtheta);
    for q in &mesh.quadrature {
        let (_, grads) = basis(q.local);
        let grads: Vec<Vector2<f64>> = grads.iter().map(|g| g.component_mul(&scale)).collect();
        let coef = q.geo.metric_inv * (q.weight * q.geo.area_element);
        let nodes = mesh.cells[q.cell].nodes;
        for a in 0..4 {
            let ca = coef * grads[a];
            for b in 0..4 {
                op.add(nodes[a], nodes[b], ca.dot(&grads[b]));
            }
        }
    }
    op
}

/// `int_{dSigma} w psi_a psi_b dtheta` with linear edge elements, `w`
/// including the arclength element of the caller's metric.
pub fn assemble_boundary_mass_like<F: Fn(&GeometricData) -> f64>(mesh: &SurfaceMesh, weight: F) -> GridOperator {
    let mut op = GridOperator::zeros(mesh.layout);
    for comp in &mesh.boundary {
        for q in &comp.quadrature {
            let psi = [1.0 - q.local, q.local];
            let w = q.weight * weight(&q.geo);
            for a in 0..2 {
                for b in 0..2 {
                    op.add(q.nodes[a], q.nodes[b], w * psi[a] * psi[b]);
                }
            }
        }
    }
    op
}

/// Assemble `K, P, M, B` with bilinear elements and exact geometry at the
/// 2x2 Gauss points. `|h|^2` is evaluated at the quadrature points, never
/// interpolated.
pub fn assemble_operators(mesh: Arc<SurfaceMesh>) -> OperatorSet {
    let stiffness = assemble_stiffness(&mesh);
    let potential = assemble_mass_like(&mesh, |g| g.norm_h_sq * g.area_element);
    let interior_mass = assemble_mass_like(&mesh, |g| g.area_element);
    let boundary_mass = assemble_boundary_mass_like(&mesh, |g| g.boundary.expect("boundary point").arc_element);
    let partition = Partition::from_mesh(&mesh);
    OperatorSet { mesh, stiffness, potential, interior_mass, boundary_mass, partition }
}

/// Residual of `(K - P) field` on interior rows, relative to
/// `row_norm(K - P) * |field|_inf`.
pub fn interior_jacobi_residual(ops: &OperatorSet, field: &[f64]) -> f64 {
    let jac = ops.jacobi();
    let r = jac.apply(field);
    let worst = ops.partition.interior.iter().map(|&n| r[n].abs()).fold(0.0, f64::max);
    let scale = jac.row_norm() * norm_inf(field);
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Variationally consistent Neumann trace `D_eta field` of a discrete
/// Jacobi field: the functional `phi -> K(field, phi) - P(field, phi)` on
/// boundary test functions, represented against the boundary mass.
///
/// Values are returned in [`Partition::boundary`] order. Fails when the
/// interior residual (see [`interior_jacobi_residual`]) exceeds
/// `interior_tol`.
pub fn weak_conormal(ops: &OperatorSet, field: &[f64], interior_tol: f64) -> Result<Vec<f64>> {
    let residual = interior_jacobi_residual(ops, field);
    if residual > interior_tol {
        return Err(Error::NotJacobiField { residual, tol: interior_tol });
    }
    let r = ops.jacobi().apply(field);
    let rhs = nalgebra::DVector::from_iterator(ops.partition.boundary.len(), ops.partition.boundary.iter().map(|&n| r[n]));
    let chol = nalgebra::Cholesky::new(ops.boundary_mass_matrix())
        .ok_or_else(|| Error::EigenSolver("boundary mass is not positive definite".into()))?;
    Ok(chol.solve(&rhs).iter().copied().collect())
}
