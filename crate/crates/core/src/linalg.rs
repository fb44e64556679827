//! Small dense symmetric eigensolver (cyclic Jacobi) and a Sturm-sequence
//! bisection solver for symmetric tridiagonal matrices.

use crate::error::{Error, Result};
use crate::scalar::{lit, tol, Real};

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    fn off_diagonal_norm(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s = s + self[(i, j)] * self[(i, j)];
                }
            }
        }
        s.sqrt()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Eigen-decomposition `A = V diag(values) Vᵀ`, eigenvalues ascending, the
/// eigenvectors stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

const JACOBI_THRESHOLD: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations in fixed row-major pivot order.
///
/// Stops when the off-diagonal Frobenius norm falls below `1e-14` times the
/// Frobenius norm of the input.
pub fn jacobi_eigen<T: Real>(a: &Matrix<T>) -> Result<SymmetricEigen<T>> {
    let n = a.dim();
    let scale = a.frobenius();
    if a.max_asymmetry() > tol::<T>(1e-12) * scale.max(T::one()) {
        return Err(Error::InvalidParameter("jacobi_eigen: matrix is not symmetric".into()));
    }
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let threshold = tol::<T>(JACOBI_THRESHOLD) * scale;
    let two = lit::<T>(2.0);

    let mut converged = n < 2 || scale == T::zero();
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged || m.off_diagonal_norm() <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                // tan of the rotation angle, smaller root for stability
                let theta = (aqq - app) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = T::zero();
                m[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && m.off_diagonal_norm() > threshold {
        return Err(Error::NoConvergence("jacobi_eigen"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<T> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_j)] = v[(i, old_j)];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Rewrites the eigenvectors of each cluster of eigenvalues closer than
/// `cluster_tol` into a canonical basis: candidates from `preferred` first,
/// then the unit vectors in index order, each projected onto the cluster
/// subspace and Gram–Schmidt orthonormalized. Afterwards every column is
/// flipped so its first component above `1e-8` in magnitude is positive.
pub fn canonicalize_eigenvectors<T: Real>(eig: &mut SymmetricEigen<T>, cluster_tol: T, preferred: &[Vec<T>]) {
    let n = eig.values.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eig.values[end] - eig.values[end - 1]).abs() <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let cluster: Vec<Vec<T>> = (start..end).map(|j| eig.vectors.column(j)).collect();
            let project = |x: &[T]| -> Vec<T> {
                let mut out = vec![T::zero(); n];
                for c in &cluster {
                    let w = dot(c, x);
                    for i in 0..n {
                        out[i] = out[i] + w * c[i];
                    }
                }
                out
            };
            let mut basis: Vec<Vec<T>> = Vec::with_capacity(end - start);
            let candidates = preferred.iter().cloned().chain((0..n).map(|i| {
                let mut e = vec![T::zero(); n];
                e[i] = T::one();
                e
            }));
            for cand in candidates {
                if basis.len() == end - start {
                    break;
                }
                let mut w = project(&cand);
                for b in &basis {
                    let d = dot(b, &w);
                    for i in 0..n {
                        w[i] = w[i] - d * b[i];
                    }
                }
                let nw = norm(&w);
                if nw > lit(1e-6) {
                    basis.push(w.into_iter().map(|x| x / nw).collect());
                }
            }
            for (k, b) in basis.into_iter().enumerate() {
                for i in 0..n {
                    eig.vectors[(i, start + k)] = b[i];
                }
            }
        }
        start = end;
    }
    for j in 0..n {
        let first = (0..n).map(|i| eig.vectors[(i, j)]).find(|x| x.abs() > lit(1e-8));
        if let Some(f) = first {
            if f < T::zero() {
                for i in 0..n {
                    eig.vectors[(i, j)] = -eig.vectors[(i, j)];
                }
            }
        }
    }
}

/// Symmetric tridiagonal matrix: `diag[i]` and `off[i]` = entry `(i, i+1)`.
#[derive(Debug, Clone)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        Self { diag, off }
    }

    /// Number of eigenvalues strictly below `x` (Sturm count from the LDLᵀ pivots).
    pub fn count_below(&self, x: T) -> usize {
        let mut count = 0;
        let mut q = T::one();
        let tiny = T::min_positive_value().sqrt();
        for i in 0..self.diag.len() {
            let e2 = if i == 0 { T::zero() } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { T::zero() } else { e2 / q };
            if q == T::zero() {
                q = -tiny;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (T, T) {
        let n = self.diag.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let mut r = T::zero();
            if i > 0 {
                r = r + self.off[i - 1].abs();
            }
            if i + 1 < n {
                r = r + self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k` smallest eigenvalues by bisection on the Sturm count.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<T> {
        let n = self.diag.len();
        let k = k.min(n);
        let (glo, ghi) = self.gershgorin();
        let two = lit::<T>(2.0);
        (0..k)
            .map(|idx| {
                let (mut lo, mut hi) = (glo, ghi);
                loop {
                    let mid = (lo + hi) / two;
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.count_below(mid) > idx {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                (lo + hi) / two
            })
            .collect()
    }
}
