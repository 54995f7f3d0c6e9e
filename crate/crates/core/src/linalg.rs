//! Small dense vectors and matrices.
//!
//! Everything here is sized for state dimensions of at most a handful, so
//! storage is a plain row-major `Vec<f64>` and every operation returns a
//! fresh value.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Relative cutoff applied to `max(rows, cols) * sigma_max` when the caller
/// passes a zero tolerance to [`pinv`] or [`numerical_rank`].
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 80;

#[derive(Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// `‖v‖∞ = max |v_i|`.
    pub fn inf_norm(&self) -> f64 {
        inf_norm_vec(&self.0)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, alpha: f64) -> Vector {
        Vector(self.0.iter().map(|a| alpha * a).collect())
    }

    /// `self + alpha * other`
    pub fn axpy(&self, alpha: f64, other: &Vector) -> Vector {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + alpha * b).collect())
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(v: [f64; N]) -> Self {
        Vector(v.to_vec())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Mat { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Mat::new(rows.len(), cols, data)
    }

    pub fn column(v: &[f64]) -> Self {
        Mat::new(v.len(), 1, v.to_vec())
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Mat::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect::<Vec<_>>()
            .into()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Mat::new(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Mat::new(self.rows, self.cols, data)
    }

    pub fn scale(&self, alpha: f64) -> Mat {
        Mat::new(self.rows, self.cols, self.data.iter().map(|a| alpha * a).collect())
    }

    /// Induced ∞-norm (maximum absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        inf_norm_mat(self)
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.rows).map(|i| self.row(i)).collect();
        f.debug_struct("Mat")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &rows)
            .finish()
    }
}

pub fn inf_norm_vec(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn inf_norm_mat(m: &Mat) -> f64 {
    (0..m.rows)
        .map(|i| m.row(i).iter().map(|a| a.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Thin singular value decomposition `M = W diag(sigma) Vᵀ` where the columns
/// of `w_scaled` hold `sigma_j * W_j` (unnormalized left vectors).
struct JacobiSvd {
    w_scaled: Mat,
    v: Mat,
    sigma: Vec<f64>,
}

/// One-sided (Hestenes) Jacobi on the columns of `a`. Requires
/// `a.rows() >= a.cols()` so the Gram matrix is the smaller one.
fn jacobi_svd_tall(a: &Mat) -> JacobiSvd {
    debug_assert!(a.rows >= a.cols);
    let (r, c) = (a.rows, a.cols);
    let mut u = a.clone();
    let mut v = Mat::identity(c);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..r {
                    let (up, uq) = (u[(i, p)], u[(i, q)]);
                    alpha += up * up;
                    beta += uq * uq;
                    gamma += up * uq;
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..r {
                    let (up, uq) = (u[(i, p)], u[(i, q)]);
                    u[(i, p)] = cs * up - sn * uq;
                    u[(i, q)] = sn * up + cs * uq;
                }
                for i in 0..c {
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = cs * vp - sn * vq;
                    v[(i, q)] = sn * vp + cs * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma = (0..c)
        .map(|j| (0..r).map(|i| u[(i, j)] * u[(i, j)]).sum::<f64>().sqrt())
        .collect();
    JacobiSvd { w_scaled: u, v, sigma }
}

/// Singular values of `m` (unordered), computed on the smaller Gram side.
pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.rows >= m.cols {
        jacobi_svd_tall(m).sigma
    } else {
        jacobi_svd_tall(&m.transpose()).sigma
    }
}

fn cutoff(sigma: &[f64], rows: usize, cols: usize, tol: f64) -> f64 {
    if tol > 0.0 {
        tol
    } else {
        let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
        rows.max(cols) as f64 * sigma_max * DEFAULT_RELATIVE_TOL
    }
}

/// Moore–Penrose pseudoinverse.
///
/// Singular values at or below the cutoff are dropped. `tol = 0` uses the
/// relative cutoff `max(rows, cols) * sigma_max * 1e-12`; a positive `tol`
/// is used as an absolute cutoff.
pub fn pinv(m: &Mat, tol: f64) -> Result<Mat> {
    if !m.is_finite() || !tol.is_finite() || tol < 0.0 {
        return Err(Error::InvalidMatrix);
    }
    if m.rows < m.cols {
        return Ok(pinv(&m.transpose(), tol)?.transpose());
    }
    let svd = jacobi_svd_tall(m);
    let thr = cutoff(&svd.sigma, m.rows, m.cols, tol);
    // pinv = V diag(1/sigma) Wᵀ = sum_j v_j (sigma_j w_j)ᵀ / sigma_j²
    let mut p = Mat::zeros(m.cols, m.rows);
    for (j, &s) in svd.sigma.iter().enumerate() {
        if s <= thr {
            continue;
        }
        let inv_s2 = 1.0 / (s * s);
        for k in 0..m.cols {
            let vk = svd.v[(k, j)] * inv_s2;
            if vk == 0.0 {
                continue;
            }
            for i in 0..m.rows {
                p[(k, i)] += vk * svd.w_scaled[(i, j)];
            }
        }
    }
    Ok(p)
}

/// Number of singular values strictly above the cutoff (see [`pinv`]).
pub fn numerical_rank(m: &Mat, tol: f64) -> usize {
    let sigma = singular_values(m);
    let thr = cutoff(&sigma, m.rows, m.cols, tol);
    sigma.iter().filter(|&&s| s > thr).count()
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot vanishes.
pub fn solve(a: &Mat, b: &[f64]) -> Option<Vector> {
    assert_eq!(a.rows, a.cols, "solve needs a square matrix");
    assert_eq!(a.rows, b.len());
    let n = a.rows;
    let scale = inf_norm_mat(a).max(f64::MIN_POSITIVE);
    let mut m = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| m[(i, k)].abs().total_cmp(&m[(j, k)].abs()))
            .unwrap();
        if m[(piv, k)].abs() <= 1e-14 * scale {
            return None;
        }
        if piv != k {
            for j in 0..n {
                m.data.swap(k * n + j, piv * n + j);
            }
            x.swap(k, piv);
        }
        for i in k + 1..n {
            let f = m[(i, k)] / m[(k, k)];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                m[(i, j)] -= f * m[(k, j)];
            }
            x[i] -= f * x[k];
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[(k, j)] * x[j]).sum();
        x[k] = (x[k] - s) / m[(k, k)];
    }
    Some(x.into())
}

/// Inverse of a square matrix, `None` if singular to working precision.
pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = a.rows;
    let mut inv = Mat::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve(a, &e)?;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Some(inv)
}
