//! Small dense complex matrices.
//!
//! Two types cover all needs of the crate: [`Mat2`], a `Copy` 2×2 matrix
//! used in the ODE hot paths, and [`CMatrix`], a heap-backed rectangular
//! matrix (generic in size) used by the loop algebra, the series calculus
//! and the kernel extraction.  Singular value decompositions are computed
//! by one-sided Jacobi, which is accurate for the tiny matrices that occur
//! here ((q·n²)×n² flattenings of the unitarization defect operator) and
//! needs no external backend.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64 as C64;

use crate::num;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// 2×2 complex matrix, row major: `[a, b, c, d]` = [[a, b], [c, d]].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub e: [C64; 4],
}

impl Mat2 {
    #[inline]
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { e: [a, b, c, d] }
    }

    #[inline]
    pub fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    #[inline]
    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let [a, b, c, d] = self.e;
        let [e, f, g, h] = o.e;
        Mat2::new(
            a * e + b * g,
            a * f + b * h,
            c * e + d * g,
            c * f + d * h,
        )
    }

    #[inline]
    pub fn add(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.e[0] + o.e[0],
            self.e[1] + o.e[1],
            self.e[2] + o.e[2],
            self.e[3] + o.e[3],
        )
    }

    #[inline]
    pub fn sub(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.e[0] - o.e[0],
            self.e[1] - o.e[1],
            self.e[2] - o.e[2],
            self.e[3] - o.e[3],
        )
    }

    #[inline]
    pub fn scale(&self, s: C64) -> Mat2 {
        Mat2::new(s * self.e[0], s * self.e[1], s * self.e[2], s * self.e[3])
    }

    #[inline]
    pub fn det(&self) -> C64 {
        self.e[0] * self.e[3] - self.e[1] * self.e[2]
    }

    #[inline]
    pub fn trace(&self) -> C64 {
        self.e[0] + self.e[3]
    }

    /// Conjugate transpose.
    #[inline]
    pub fn adjoint(&self) -> Mat2 {
        Mat2::new(
            self.e[0].conj(),
            self.e[2].conj(),
            self.e[1].conj(),
            self.e[3].conj(),
        )
    }

    /// Exact inverse; caller is responsible for nonsingularity.
    #[inline]
    pub fn inv(&self) -> Mat2 {
        let d = self.det();
        Mat2::new(self.e[3] / d, -self.e[1] / d, -self.e[2] / d, self.e[0] / d)
    }

    pub fn commutator(&self, o: &Mat2) -> Mat2 {
        self.mul(o).sub(&o.mul(self))
    }

    /// Max entry magnitude.
    pub fn norm_max(&self) -> f64 {
        let mut m = 0.0f64;
        for z in &self.e {
            m = m.max(z.norm());
        }
        m
    }

    pub fn norm_fro(&self) -> f64 {
        num::sqrt(self.e.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn dist(&self, o: &Mat2) -> f64 {
        self.sub(o).norm_fro()
    }

    /// Matrix exponential of a trace-free matrix: with s² = −det M,
    /// exp(M) = cosh(s)·id + (sinh(s)/s)·M.
    pub fn exp_traceless(&self) -> Mat2 {
        let s = (-self.det()).sqrt();
        let (ch, shs) = if s.norm() < 1e-8 {
            // sinh(s)/s = 1 + s²/6 + s⁴/120
            let s2 = s * s;
            (
                ONE + s2 / 2.0 + s2 * s2 / 24.0,
                ONE + s2 / 6.0 + s2 * s2 / 120.0,
            )
        } else {
            ((s.exp() + (-s).exp()) / 2.0, (s.exp() - (-s).exp()) / (2.0 * s))
        };
        Mat2::identity().scale(ch).add(&self.scale(shs))
    }

    /// Eigenvalues of a Hermitian 2×2 matrix, ascending.
    pub fn eig_hermitian(&self) -> (f64, f64) {
        let tr = self.trace().re;
        let det = self.det().re;
        let disc = num::sqrt((tr * tr - 4.0 * det).max(0.0));
        ((tr - disc) / 2.0, (tr + disc) / 2.0)
    }

    /// ‖M*M − id‖_F, i.e. the unitarity defect.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).dist(&Mat2::identity())
    }
}

/// Rectangular complex matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn from_mat2(m: &Mat2) -> Self {
        Self::from_rows(2, 2, m.e.to_vec())
    }

    pub fn to_mat2(&self) -> Mat2 {
        assert!(self.rows == 2 && self.cols == 2);
        Mat2::new(self.data[0], self.data[1], self.data[2], self.data[3])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn mul(&self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = CMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..o.cols {
                    out[(i, j)] += a * o[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, o: &CMatrix) -> CMatrix {
        assert!(self.rows == o.rows && self.cols == o.cols);
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a + b)
            .collect();
        CMatrix::from_rows(self.rows, self.cols, data)
    }

    pub fn sub(&self, o: &CMatrix) -> CMatrix {
        assert!(self.rows == o.rows && self.cols == o.cols);
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a - b)
            .collect();
        CMatrix::from_rows(self.rows, self.cols, data)
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix::from_rows(self.rows, self.cols, self.data.iter().map(|a| s * a).collect())
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn commutator(&self, o: &CMatrix) -> CMatrix {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    pub fn norm_fro(&self) -> f64 {
        num::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn dist(&self, o: &CMatrix) -> f64 {
        self.sub(o).norm_fro()
    }

    /// ‖M*M − id‖_F.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).dist(&CMatrix::identity(self.cols))
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.dist(&self.adjoint())
    }

    /// (M + M*)/2.
    pub fn hermitian_part(&self) -> CMatrix {
        self.add(&self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> C64 {
        assert!(self.is_square());
        let n = self.rows;
        if n == 1 {
            return self.data[0];
        }
        if n == 2 {
            return self.data[0] * self.data[3] - self.data[1] * self.data[2];
        }
        let mut a = self.clone();
        let mut det = ONE;
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].norm();
            for r in k + 1..n {
                if a[(r, k)].norm() > best {
                    best = a[(r, k)].norm();
                    p = r;
                }
            }
            if best == 0.0 {
                return ZERO;
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                det = -det;
            }
            det *= a[(k, k)];
            for r in k + 1..n {
                let f = a[(r, k)] / a[(k, k)];
                for j in k..n {
                    let v = a[(k, j)];
                    a[(r, j)] -= f * v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan with partial pivoting.  Returns `None`
    /// when a pivot vanishes to machine scale.
    pub fn inv(&self) -> Option<CMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut b = CMatrix::identity(n);
        let scale = self.norm_max().max(1e-300);
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].norm();
            for r in k + 1..n {
                if a[(r, k)].norm() > best {
                    best = a[(r, k)].norm();
                    p = r;
                }
            }
            if best < 1e-300 * scale {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                    b.data.swap(k * n + j, p * n + j);
                }
            }
            let piv = a[(k, k)];
            for j in 0..n {
                a[(k, j)] /= piv;
                b[(k, j)] /= piv;
            }
            for r in 0..n {
                if r == k {
                    continue;
                }
                let f = a[(r, k)];
                if f == ZERO {
                    continue;
                }
                for j in 0..n {
                    let av = a[(k, j)];
                    let bv = b[(k, j)];
                    a[(r, j)] -= f * av;
                    b[(r, j)] -= f * bv;
                }
            }
        }
        Some(b)
    }

    /// Numerical rank: number of singular values above `tol` relative to
    /// the largest one.
    pub fn rank(&self, tol: f64) -> usize {
        let sv = self.singular_values();
        let s0 = sv.first().copied().unwrap_or(0.0);
        if s0 == 0.0 {
            return 0;
        }
        sv.iter().filter(|s| **s > tol * s0).count()
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.svd().singular
    }

    /// One-sided Jacobi SVD.  Works on the columns of `A`, so `A` should
    /// be tall (rows ≥ cols); transpose first otherwise.
    pub fn svd(&self) -> Svd {
        assert!(self.rows >= self.cols, "svd expects rows >= cols");
        let m = self.rows;
        let n = self.cols;
        let mut a = self.clone();
        let mut v = CMatrix::identity(n);
        let eps = 1e-15;
        for _sweep in 0..40 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in p + 1..n {
                    let mut app = 0.0;
                    let mut aqq = 0.0;
                    let mut apq = ZERO;
                    for i in 0..m {
                        let x = a[(i, p)];
                        let y = a[(i, q)];
                        app += x.norm_sqr();
                        aqq += y.norm_sqr();
                        apq += x.conj() * y;
                    }
                    let denom = num::sqrt(app * aqq);
                    if denom == 0.0 || apq.norm() <= eps * denom {
                        continue;
                    }
                    off = off.max(apq.norm() / denom);
                    // Diagonalize the 2×2 Hermitian Gram block
                    // [[app, apq], [conj(apq), aqq]].
                    let phi = apq / apq.norm();
                    let tau = (aqq - app) / (2.0 * apq.norm());
                    let t = if tau >= 0.0 {
                        1.0 / (tau + num::sqrt(1.0 + tau * tau))
                    } else {
                        -1.0 / (-tau + num::sqrt(1.0 + tau * tau))
                    };
                    let c = 1.0 / num::sqrt(1.0 + t * t);
                    let s = c * t;
                    // Columns (p,q) ← (c·p − s·phi*·q , c·q + s·phi·p)
                    for i in 0..m {
                        let x = a[(i, p)];
                        let y = a[(i, q)];
                        a[(i, p)] = x * c - y * s * phi.conj();
                        a[(i, q)] = y * c + x * s * phi;
                    }
                    for i in 0..n {
                        let x = v[(i, p)];
                        let y = v[(i, q)];
                        v[(i, p)] = x * c - y * s * phi.conj();
                        v[(i, q)] = y * c + x * s * phi;
                    }
                }
            }
            if off < eps {
                break;
            }
        }
        // Column norms are the singular values; sort descending.
        let mut order: Vec<usize> = (0..n).collect();
        let norms: Vec<f64> = (0..n)
            .map(|j| num::sqrt((0..m).map(|i| a[(i, j)].norm_sqr()).sum()))
            .collect();
        order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
        let mut singular = Vec::with_capacity(n);
        let mut u = CMatrix::zeros(m, n);
        let mut vs = CMatrix::zeros(n, n);
        for (jj, &j) in order.iter().enumerate() {
            singular.push(norms[j]);
            for i in 0..n {
                vs[(i, jj)] = v[(i, j)];
            }
            if norms[j] > 0.0 {
                for i in 0..m {
                    u[(i, jj)] = a[(i, j)] / norms[j];
                }
            }
        }
        Svd {
            u,
            singular,
            v: vs,
        }
    }

    /// QR factorization `A = Q·R` by modified Gram-Schmidt, with the
    /// diagonal of `R` real and positive.  Requires full column rank.
    pub fn qr_positive(&self) -> (CMatrix, CMatrix) {
        assert!(self.rows >= self.cols);
        let m = self.rows;
        let n = self.cols;
        let mut q = self.clone();
        let mut r = CMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..j {
                let mut dot = ZERO;
                for i in 0..m {
                    dot += q[(i, k)].conj() * q[(i, j)];
                }
                r[(k, j)] = dot;
                for i in 0..m {
                    let t = q[(i, k)];
                    q[(i, j)] -= dot * t;
                }
            }
            let nrm = num::sqrt((0..m).map(|i| q[(i, j)].norm_sqr()).sum());
            r[(j, j)] = C64::new(nrm, 0.0);
            if nrm > 0.0 {
                for i in 0..m {
                    q[(i, j)] /= nrm;
                }
            }
        }
        (q, r)
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of [`CMatrix::svd`]: `A = U·diag(σ)·V*` with σ descending.
pub struct Svd {
    pub u: CMatrix,
    pub singular: Vec<f64>,
    pub v: CMatrix,
}

/// Analytic LDU-style Cholesky step for a single Hermitian positive
/// definite matrix: `X = V*·V` with `V = √D·R`, `R` unit upper triangular
/// and `D` positive diagonal.  This factorization is unique, which is what
/// makes the loop-wise factor vary continuously from sample to sample.
pub fn cholesky_upper(x: &CMatrix) -> Result<CMatrix, NotPositiveDefinite> {
    assert!(x.is_square());
    let n = x.rows();
    let mut r = CMatrix::identity(n);
    let mut d = vec![0.0f64; n];
    for i in 0..n {
        let mut di = x[(i, i)].re;
        for m in 0..i {
            di -= r[(m, i)].norm_sqr() * d[m];
        }
        if !(di > 0.0) || !di.is_finite() {
            return Err(NotPositiveDefinite { pivot: i, value: di });
        }
        d[i] = di;
        for j in i + 1..n {
            let mut s = x[(i, j)];
            for m in 0..i {
                s -= r[(m, i)].conj() * d[m] * r[(m, j)];
            }
            r[(i, j)] = s / di;
        }
    }
    let mut v = r;
    for i in 0..n {
        let e = C64::new(num::sqrt(d[i]), 0.0);
        for j in 0..n {
            v[(i, j)] *= e;
        }
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("matrix is not positive definite (pivot {pivot} = {value})")]
pub struct NotPositiveDefinite {
    pub pivot: usize,
    pub value: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn mat2_inverse_roundtrip() {
        let m = Mat2::new(c(1.0, 2.0), c(0.5, -1.0), c(3.0, 0.0), c(-1.0, 0.25));
        let p = m.mul(&m.inv());
        assert!(p.dist(&Mat2::identity()) < 1e-14);
    }

    #[test]
    fn exp_traceless_is_special() {
        let m = Mat2::new(c(0.3, 0.1), c(-0.2, 0.7), c(1.1, -0.4), c(-0.3, -0.1));
        let e = m.exp_traceless();
        assert!((e.det() - ONE).norm() < 1e-12);
        // exp(0) = id
        assert!(Mat2::zero().exp_traceless().dist(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn svd_recovers_diagonal() {
        let mut a = CMatrix::zeros(4, 3);
        a[(0, 0)] = c(3.0, 0.0);
        a[(1, 1)] = c(0.0, 2.0);
        a[(2, 2)] = c(0.1, 0.0);
        let svd = a.svd();
        assert!((svd.singular[0] - 3.0).abs() < 1e-12);
        assert!((svd.singular[1] - 2.0).abs() < 1e-12);
        assert!((svd.singular[2] - 0.1).abs() < 1e-12);
        assert!(svd.v.unitarity_defect() < 1e-12);
    }

    #[test]
    fn svd_nullspace_vector() {
        // Rank-2 matrix with known kernel (1,1,1)/√3.
        let mut a = CMatrix::zeros(3, 3);
        let rows = [
            [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.5), c(-1.0, -0.5)],
            [c(2.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0)],
        ];
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = rows[i][j];
            }
        }
        let svd = a.svd();
        assert!(svd.singular[2] < 1e-14);
        let v = svd.v.column(2);
        let r = (v[0] - v[1]).norm() + (v[1] - v[2]).norm();
        assert!(r < 1e-12, "kernel vector not constant: {r}");
    }

    #[test]
    fn cholesky_matches_hand_computation() {
        // X = [[2, 1], [1, 1]] → V = [[√2, 1/√2], [0, 1/√2]].
        let mut x = CMatrix::zeros(2, 2);
        x[(0, 0)] = c(2.0, 0.0);
        x[(0, 1)] = c(1.0, 0.0);
        x[(1, 0)] = c(1.0, 0.0);
        x[(1, 1)] = c(1.0, 0.0);
        let v = cholesky_upper(&x).unwrap();
        let s2 = 2.0f64.sqrt();
        assert!((v[(0, 0)] - c(s2, 0.0)).norm() < 1e-14);
        assert!((v[(0, 1)] - c(1.0 / s2, 0.0)).norm() < 1e-14);
        assert!((v[(1, 0)]).norm() < 1e-14);
        assert!((v[(1, 1)] - c(1.0 / s2, 0.0)).norm() < 1e-14);
        assert!(v.adjoint().mul(&v).dist(&x) < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut x = CMatrix::identity(2);
        x[(1, 1)] = c(-1.0, 0.0);
        assert!(cholesky_upper(&x).is_err());
    }

    #[test]
    fn qr_positive_diagonal() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = c(0.0, 1.0);
        a[(0, 1)] = c(1.0, 0.0);
        a[(1, 0)] = c(1.0, 1.0);
        a[(1, 1)] = c(0.0, -2.0);
        let (q, r) = a.qr_positive();
        assert!(q.unitarity_defect() < 1e-13);
        assert!(r[(0, 0)].im.abs() < 1e-14 && r[(0, 0)].re > 0.0);
        assert!(r[(1, 1)].im.abs() < 1e-14 && r[(1, 1)].re > 0.0);
        assert!(r[(1, 0)].norm() < 1e-14);
        assert!(q.mul(&r).dist(&a) < 1e-13);
    }

    #[test]
    fn general_det_and_inv() {
        let mut a = CMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = c((i * 3 + j) as f64 * 0.37 - 1.0, (i as f64) - 0.5 * j as f64);
            }
        }
        a[(2, 2)] += c(2.0, 0.0);
        let inv = a.inv().unwrap();
        assert!(a.mul(&inv).dist(&CMatrix::identity(3)) < 1e-12);
        let lu_det = a.det();
        // 3×3 determinant by cofactors for cross-checking.
        let m = |i: usize, j: usize| a[(i, j)];
        let cof = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        assert!((lu_det - cof).norm() < 1e-12);
    }
}
