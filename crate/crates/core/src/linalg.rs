//! Small dense and banded linear algebra used throughout the crate.

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// LU factorisation with partial pivoting of a banded matrix.
///
/// Storage follows the LAPACK `gbtrf` layout: column `j` keeps rows
/// `j - kl - ku ..= j + kl`, the extra `kl` rows above the diagonal band
/// absorb the fill produced by row interchanges.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    /// Factor the `n x n` matrix whose entries inside the band are produced
    /// by `entries`, which is called once per column with a callback
    /// `(row, value)`. Entries outside `|row - col| <= kl/ku` are ignored.
    pub fn factor<F>(n: usize, kl: usize, ku: usize, mut entries: F) -> Result<Self>
    where
        F: FnMut(usize, &mut dyn FnMut(usize, f64)),
    {
        let kv = kl + ku;
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![0.0; ldab * n];
        for j in 0..n {
            let col = &mut ab[j * ldab..(j + 1) * ldab];
            entries(j, &mut |i, v| {
                if i + ku >= j && i <= j + kl {
                    col[kv + i - j] += v;
                }
            });
        }
        let mut lu = BandLu { n, kl, ku, ldab, ab, piv: vec![0; n] };
        lu.factor_in_place()?;
        Ok(lu)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + self.kl + self.ku + i - j
    }

    fn factor_in_place(&mut self) -> Result<()> {
        let n = self.n;
        let kv = self.kl + self.ku;
        let mut ju = 0usize;
        for j in 0..n {
            let km = self.kl.min(n - 1 - j);
            let base = self.idx(j, j);
            let mut jp = 0;
            let mut best = self.ab[base].abs();
            for r in 1..=km {
                let v = self.ab[base + r].abs();
                if v > best {
                    best = v;
                    jp = r;
                }
            }
            self.piv[j] = j + jp;
            if best == 0.0 {
                return Err(Error::SingularMatrix { row: j });
            }
            ju = ju.max((j + self.ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let a = self.idx(j, c);
                    let b = self.idx(j + jp, c);
                    self.ab.swap(a, b);
                }
            }
            let pivot = self.ab[base];
            for r in 1..=km {
                self.ab[base + r] /= pivot;
            }
            for c in (j + 1)..=ju {
                let u = self.ab[self.idx(j, c)];
                if u == 0.0 {
                    continue;
                }
                let cbase = self.idx(j + 1, c);
                debug_assert!(c - j <= kv);
                for r in 0..km {
                    self.ab[cbase + r] -= self.ab[base + 1 + r] * u;
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Overwrites `b` with `A^{-1} b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        let kv = self.kl + self.ku;
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = self.kl.min(n - 1 - j);
            let bj = b[j];
            if bj != 0.0 {
                let base = self.idx(j, j);
                for r in 1..=km {
                    b[j + r] -= self.ab[base + r] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[self.idx(j, j)];
            let bj = b[j];
            if bj != 0.0 {
                let lo = j.saturating_sub(kv);
                for i in lo..j {
                    b[i] -= self.ab[self.idx(i, j)] * bj;
                }
            }
        }
    }
}

/// Eigen-decomposition of a symmetric 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEigen3 {
    /// Ascending.
    pub values: [f64; 3],
    /// Unit eigenvectors as columns, ordered like `values`.
    pub vectors: Matrix3<f64>,
}

/// Relative gap below which two eigenvalues of a 3x3 block are treated as tied.
pub const SYM3_TIE_TOL: f64 = 1e-10;

/// Closed-form symmetric 3x3 eigen-solver.
///
/// Eigenvalues come from the trigonometric solution of the characteristic
/// cubic. The best separated eigenvalue is paired with a cross-product
/// eigenvector; the remaining 2x2 block is diagonalised by a single exact
/// rotation. Tied eigenvalues keep the basis obtained by projecting the
/// canonical axes onto the eigenspace, and every vector is signed so that
/// its largest-magnitude entry is positive.
pub fn sym_eigen3(a: &Matrix3<f64>) -> SymEigen3 {
    let a = (a + a.transpose()) * 0.5;
    let scale = a.amax();
    if scale == 0.0 {
        return SymEigen3 { values: [0.0; 3], vectors: Matrix3::identity() };
    }
    let s = a / scale;
    let p1 = s[(0, 1)].powi(2) + s[(0, 2)].powi(2) + s[(1, 2)].powi(2);
    let q = s.trace() / 3.0;
    let p2 = (s[(0, 0)] - q).powi(2) + (s[(1, 1)] - q).powi(2) + (s[(2, 2)] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p <= SYM3_TIE_TOL {
        let mut values = [a[(0, 0)], a[(1, 1)], a[(2, 2)]];
        values.sort_by(f64::total_cmp);
        let m = (values[0] + values[1] + values[2]) / 3.0;
        return SymEigen3 { values: [m; 3], vectors: Matrix3::identity() };
    }
    let b = (s - Matrix3::identity() * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let mid = 3.0 * q - hi - lo;
    let iso = if hi - mid >= mid - lo { hi } else { lo };

    let v_iso = isolated_vector(&s, iso);
    let lam_iso = (v_iso.transpose() * s * v_iso)[(0, 0)];

    let u = canonical_complement(&v_iso);
    let w = v_iso.cross(&u).normalize();
    let a11 = (u.transpose() * s * u)[(0, 0)];
    let a22 = (w.transpose() * s * w)[(0, 0)];
    let a12 = (u.transpose() * s * w)[(0, 0)];
    let (pair, vecs) = if a12.abs() <= SYM3_TIE_TOL && (a11 - a22).abs() <= SYM3_TIE_TOL {
        let m = 0.5 * (a11 + a22);
        ([m, m], [u, w])
    } else {
        let angle = 0.5 * (2.0 * a12).atan2(a11 - a22);
        let (sn, cs) = angle.sin_cos();
        let e1 = u * cs + w * sn;
        let e2 = w * cs - u * sn;
        let mean = 0.5 * (a11 + a22);
        let rad = (0.25 * (a11 - a22).powi(2) + a12 * a12).sqrt();
        ([mean + rad, mean - rad], [e1, e2])
    };

    let mut pairs = [(lam_iso, v_iso), (pair[0], vecs[0]), (pair[1], vecs[1])];
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut vectors = Matrix3::zeros();
    let mut values = [0.0; 3];
    for (k, (lam, v)) in pairs.iter().enumerate() {
        values[k] = lam * scale;
        vectors.set_column(k, &sign_normalize(*v));
    }
    SymEigen3 { values, vectors }
}

fn isolated_vector(s: &Matrix3<f64>, lam: f64) -> Vector3<f64> {
    let m = s - Matrix3::identity() * lam;
    let r0 = m.row(0).transpose();
    let r1 = m.row(1).transpose();
    let r2 = m.row(2).transpose();
    let cands = [r0.cross(&r1), r0.cross(&r2), r1.cross(&r2)];
    let mut best = cands[0];
    for c in &cands[1..] {
        if c.norm_squared() > best.norm_squared() {
            best = *c;
        }
    }
    if best.norm_squared() == 0.0 {
        return Vector3::x();
    }
    best.normalize()
}

/// Unit vector orthogonal to `v` obtained from the canonical axis with the
/// largest projection onto `v`'s orthogonal complement.
pub fn canonical_complement(v: &Vector3<f64>) -> Vector3<f64> {
    let mut k = 0;
    for i in 1..3 {
        if v[i].abs() < v[k].abs() {
            k = i;
        }
    }
    let mut e = Vector3::zeros();
    e[k] = 1.0;
    (e - v * v[k]).normalize()
}

/// Flip `v` so its largest-magnitude entry (first one on ties) is positive.
pub fn sign_normalize(v: Vector3<f64>) -> Vector3<f64> {
    let mut k = 0;
    for i in 1..3 {
        if v[i].abs() > v[k].abs() + 1e-14 {
            k = i;
        }
    }
    if v[k] < 0.0 {
        -v
    } else {
        v
    }
}

/// Generalized symmetric-definite eigenproblem `A x = lambda B x` with dense
/// matrices. Eigenvalues ascending, eigenvectors `B`-orthonormal (columns).
pub fn generalized_symmetric_eigen(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let chol = nalgebra::Cholesky::new(b.clone())
        .ok_or_else(|| Error::EigenSolver("right-hand mass matrix is not positive definite".into()))?;
    let l = chol.l();
    // C = L^{-1} A L^{-T}
    let linv_a = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::EigenSolver("triangular solve failed".into()))?;
    let c = l
        .solve_lower_triangular(&linv_a.transpose())
        .ok_or_else(|| Error::EigenSolver("triangular solve failed".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::try_new(c, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::EigenSolver("symmetric QR iteration did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut y = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        y.set_column(k, &eig.eigenvectors.column(i));
    }
    let x = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::EigenSolver("triangular solve failed".into()))?;
    Ok((values, x))
}

/// Orthonormal basis (columns) of the Euclidean orthogonal complement of
/// the column span of `w` in `R^n`.
pub fn orthogonal_complement(w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = w.nrows();
    let k = w.ncols();
    if k == 0 {
        return DMatrix::identity(n, n);
    }
    let gram = w.transpose() * w;
    let ginv = gram
        .clone()
        .try_inverse()
        .unwrap_or_else(|| DMatrix::identity(k, k) / gram.amax().max(f64::MIN_POSITIVE));
    let proj = DMatrix::identity(n, n) - w * ginv * w.transpose();
    let proj = (&proj + proj.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(proj);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let m = n - k;
    let mut q = DMatrix::zeros(n, m);
    for (c, &i) in idx.iter().take(m).enumerate() {
        q.set_column(c, &eig.eigenvectors.column(i));
    }
    q
}
