use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discretize::{GridOperator, OperatorSet};
use crate::error::{Error, Result};
use crate::linalg::{dot, generalized_symmetric_eigen, norm2, BandLu};
use crate::tolerances::Tolerances;

const KERNEL_BLOCK: usize = 4;
const KERNEL_MAX_ITERS: usize = 60;
const KERNEL_SEED: u64 = 0x5eed;

/// Position of column `j` in the folded ordering `0, n-1, 1, n-2, ...`,
/// which keeps periodic neighbours within distance 2.
fn fold(j: usize, n: usize) -> usize {
    if j < (n + 1) / 2 {
        2 * j
    } else {
        2 * (n - 1 - j) + 1
    }
}

/// One interior eigenmode of the Dirichlet Jacobi problem flagged as kernel.
#[derive(Debug, Clone)]
pub struct KernelMode {
    /// Nodal field, zero on the free boundary, unit interior mass.
    pub field: Vec<f64>,
    /// Rayleigh quotient `(K - P)(z, z) / M(z, z)`.
    pub rayleigh: f64,
    /// `|A_II z - mu M_II z| / (|A_II|_inf |z|)`.
    pub residual: f64,
}

/// Interior block of the Jacobi pencil with a banded factorisation and the
/// detected Dirichlet kernel.
#[derive(Debug)]
pub struct InteriorSolver {
    /// Interior nodes in solver order.
    pub nodes: Vec<usize>,
    pos: Vec<Option<usize>>,
    n_nodes: usize,
    jacobi: GridOperator,
    mass: GridOperator,
    lu: BandLu,
    /// Kernel modes, interior-local vectors.
    kernel: Vec<Vec<f64>>,
    /// `M_II z` for each kernel vector.
    kernel_mass: Vec<Vec<f64>>,
    pub modes: Vec<KernelMode>,
    /// Lowest Ritz values of `(A_II, M_II)` found during detection.
    pub ritz_values: Vec<f64>,
}

impl InteriorSolver {
    pub fn new(ops: &OperatorSet, tol: &Tolerances) -> Result<Self> {
        let layout = ops.mesh.layout;
        let mut nodes = Vec::with_capacity(ops.partition.interior.len());
        let mut rows: Vec<usize> = ops.partition.interior.iter().map(|&n| layout.row_col(n).0).collect();
        rows.dedup();
        for r in rows {
            let mut row_nodes: Vec<usize> = (0..layout.cols).map(|c| layout.node(r, c)).filter(|&n| !ops.partition.is_boundary(n)).collect();
            if layout.periodic {
                let n = layout.cols;
                row_nodes.sort_by_key(|&node| fold(layout.row_col(node).1, n));
            }
            nodes.extend(row_nodes);
        }
        let n_nodes = ops.n_nodes();
        let mut pos = vec![None; n_nodes];
        for (k, &n) in nodes.iter().enumerate() {
            pos[n] = Some(k);
        }
        let jacobi = ops.jacobi();
        let mut bw = 0usize;
        for (k, &n) in nodes.iter().enumerate() {
            for (c, _) in jacobi.row(n) {
                if let Some(p) = pos[c] {
                    bw = bw.max(p.abs_diff(k));
                }
            }
        }
        let lu = BandLu::factor(nodes.len(), bw, bw, |j, put| {
            let node = nodes[j];
            for (c, _) in jacobi.row(node) {
                if let Some(i) = pos[c] {
                    put(i, jacobi.entry(c, node));
                }
            }
        })?;
        let mut solver = InteriorSolver {
            nodes,
            pos,
            n_nodes,
            jacobi,
            mass: ops.interior_mass.clone(),
            lu,
            kernel: Vec::new(),
            kernel_mass: Vec::new(),
            modes: Vec::new(),
            ritz_values: Vec::new(),
        };
        solver.detect_kernel(tol.kernel)?;
        Ok(solver)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn position(&self, node: usize) -> Option<usize> {
        self.pos[node]
    }

    pub fn restrict(&self, field: &[f64]) -> Vec<f64> {
        self.nodes.iter().map(|&n| field[n]).collect()
    }

    pub fn embed(&self, local: &[f64]) -> Vec<f64> {
        let mut f = vec![0.0; self.n_nodes];
        for (&n, &v) in self.nodes.iter().zip(local) {
            f[n] = v;
        }
        f
    }

    fn apply_local(&self, op: &GridOperator, x: &[f64]) -> Vec<f64> {
        self.nodes
            .iter()
            .map(|&n| op.row(n).filter_map(|(c, v)| self.pos[c].map(|p| v * x[p])).sum())
            .collect()
    }

    /// `A_II x`.
    pub fn apply_jacobi(&self, x: &[f64]) -> Vec<f64> {
        self.apply_local(&self.jacobi, x)
    }

    /// `M_II x`.
    pub fn apply_mass(&self, x: &[f64]) -> Vec<f64> {
        self.apply_local(&self.mass, x)
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }

    /// Interior-local kernel vectors.
    pub fn kernel_vectors(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    /// Block inverse iteration with Rayleigh-Ritz on `(A_II, M_II)`.
    fn detect_kernel(&mut self, threshold: f64) -> Result<()> {
        let n = self.len();
        let k = KERNEL_BLOCK.min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(KERNEL_SEED);
        let mut x: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let mut prev = vec![f64::INFINITY; k];
        let mut values = vec![0.0; k];
        for _ in 0..KERNEL_MAX_ITERS {
            let y: Vec<Vec<f64>> = x
                .iter()
                .map(|v| {
                    let mut w = self.apply_mass(v);
                    self.lu.solve_in_place(&mut w);
                    let s = norm2(&w);
                    w.iter().map(|e| e / s).collect()
                })
                .collect();
            let ay: Vec<Vec<f64>> = y.iter().map(|v| self.apply_jacobi(v)).collect();
            let my: Vec<Vec<f64>> = y.iter().map(|v| self.apply_mass(v)).collect();
            let ah = DMatrix::from_fn(k, k, |i, j| 0.5 * (dot(&y[i], &ay[j]) + dot(&y[j], &ay[i])));
            let mh = DMatrix::from_fn(k, k, |i, j| 0.5 * (dot(&y[i], &my[j]) + dot(&y[j], &my[i])));
            let (vals, vecs) = generalized_symmetric_eigen(&ah, &mh)?;
            x = (0..k)
                .map(|c| {
                    let mut v = vec![0.0; n];
                    for (r, yr) in y.iter().enumerate() {
                        let w = vecs[(r, c)];
                        v.iter_mut().zip(yr).for_each(|(a, b)| *a += w * b);
                    }
                    v
                })
                .collect();
            values = vals;
            let change = values.iter().zip(&prev).map(|(a, b)| (a - b).abs() / a.abs().max(1.0)).fold(0.0, f64::max);
            prev.clone_from(&values);
            if change < 1e-14 {
                break;
            }
        }
        self.ritz_values = values.clone();
        let scale = self.jacobi.row_norm();
        for (v, &mu) in x.into_iter().zip(&values) {
            if mu.abs() > threshold {
                continue;
            }
            let mv = self.apply_mass(&v);
            let nrm = dot(&v, &mv).sqrt();
            let mut z: Vec<f64> = v.iter().map(|e| e / nrm).collect();
            let big = z.iter().copied().fold(0.0f64, |m, e| if e.abs() > m.abs() { e } else { m });
            if big < 0.0 {
                z.iter_mut().for_each(|e| *e = -*e);
            }
            let az = self.apply_jacobi(&z);
            let mz = self.apply_mass(&z);
            let r: Vec<f64> = az.iter().zip(&mz).map(|(a, m)| a - mu * m).collect();
            let residual = norm2(&r) / (scale * norm2(&z));
            self.modes.push(KernelMode { field: self.embed(&z), rayleigh: mu, residual });
            self.kernel.push(z);
            self.kernel_mass.push(mz);
        }
        Ok(())
    }

    /// Solve `A_II x = b` on the complement of the kernel: the right-hand
    /// side is projected off `M z`, and the result is made `M`-orthogonal to
    /// every kernel field.
    pub fn deflated_solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        for (z, mz) in self.kernel.iter().zip(&self.kernel_mass) {
            let c = dot(z, &x);
            x.iter_mut().zip(mz).for_each(|(a, m)| *a -= c * m);
        }
        self.lu.solve_in_place(&mut x);
        for (z, mz) in self.kernel.iter().zip(&self.kernel_mass) {
            let c = dot(mz, &x);
            x.iter_mut().zip(z).for_each(|(a, e)| *a -= c * e);
        }
        x
    }

    /// Right-hand side `-A_IG g` for a nodal field `g` supported on the
    /// boundary.
    pub fn boundary_rhs(&self, boundary_field: &[f64]) -> Vec<f64> {
        self.nodes
            .iter()
            .map(|&n| -self.jacobi.row(n).filter(|(c, _)| self.pos[*c].is_none()).map(|(c, v)| v * boundary_field[c]).sum::<f64>())
            .collect()
    }

    pub fn jacobi(&self) -> &GridOperator {
        &self.jacobi
    }
}

/// Dirichlet Jacobi kernel of the interior block.
pub fn dirichlet_kernel(ops: &OperatorSet, tol: &Tolerances) -> Result<Vec<KernelMode>> {
    Ok(InteriorSolver::new(ops, tol)?.modes)
}

/// Minimum-norm discrete Jacobi extension of boundary data given in
/// [`crate::discretize::Partition::boundary`] order.
pub fn jacobi_extend(ops: &OperatorSet, boundary_data: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    let solver = InteriorSolver::new(ops, tol)?;
    extend_with(&solver, ops, boundary_data, tol.compatibility)
}

pub(crate) fn kernel_fluxes(solver: &InteriorSolver, ops: &OperatorSet) -> Vec<Vec<f64>> {
    // w_b = sum_c A[b][c] z[c] over interior c.
    let jac = solver.jacobi();
    solver
        .kernel_vectors()
        .iter()
        .map(|z| {
            let full = solver.embed(z);
            ops.partition.boundary.iter().map(|&b| jac.row(b).map(|(c, v)| v * full[c]).sum()).collect()
        })
        .collect()
}

pub(crate) fn compatibility_residual(fluxes: &[Vec<f64>], data: &[f64]) -> f64 {
    let dn = norm2(data);
    fluxes
        .iter()
        .map(|w| {
            let s = norm2(w) * dn;
            if s == 0.0 {
                0.0
            } else {
                dot(w, data).abs() / s
            }
        })
        .fold(0.0, f64::max)
}

pub(crate) fn extend_with(solver: &InteriorSolver, ops: &OperatorSet, data: &[f64], compat_tol: f64) -> Result<Vec<f64>> {
    if data.len() != ops.partition.boundary.len() {
        return Err(Error::Config(format!(
            "boundary data has {} values, the mesh has {} boundary nodes",
            data.len(),
            ops.partition.boundary.len()
        )));
    }
    let residual = compatibility_residual(&kernel_fluxes(solver, ops), data);
    if residual > compat_tol {
        return Err(Error::IncompatibleBoundaryData { residual, tol: compat_tol });
    }
    let g = ops.partition.embed_trace(data, ops.n_nodes());
    let x = solver.deflated_solve(&solver.boundary_rhs(&g));
    let mut u = solver.embed(&x);
    for (&n, &v) in ops.partition.boundary.iter().zip(data) {
        u[n] = v;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_is_a_permutation_with_short_wrap() {
        for n in [8, 9, 64, 65] {
            let mut seen: Vec<usize> = (0..n).map(|j| fold(j, n)).collect();
            for j in 0..n {
                assert!(fold(j, n).abs_diff(fold((j + 1) % n, n)) <= 2);
            }
            seen.sort();
            assert_eq!(seen, (0..n).collect::<Vec<_>>());
        }
    }
}
