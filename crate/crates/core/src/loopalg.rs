//! Matrix loops sampled on the unit circle.
//!
//! A [`LoopMatrix`] is an analytic map 𝕊¹ → Mat(n×n, ℂ) stored as its
//! values at the `N` grid points `λ_j = exp(2πi·j/N)` of a shared
//! [`CircleGrid`], optionally carrying truncated Fourier coefficients.
//! All operations are pure per-sample maps; values are immutable after
//! construction, so loops are safe to read concurrently.
//!
//! The star involution is `F*(λ) = conj(F(1/conj(λ)))ᵀ`.  On the unit
//! circle `1/conj(λ_j) = λ_j`, so per sample it is the plain conjugate
//! transpose, while on Fourier coefficients it sends the degree-`d`
//! coefficient to the adjoint of the degree-`−d` one.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64 as C64;

use crate::fft;
use crate::linalg::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum LoopError {
    #[error("grid size {0} is not a power of two >= 4")]
    BadGridSize(usize),
    #[error("loop value at sample {sample} is singular (|det| = {det})")]
    SingularSample { sample: usize, det: f64 },
    #[error("fourier degree {degree} too large for grid size {grid} (need N >= 2D+2)")]
    DegreeTooLarge { degree: usize, grid: usize },
    #[error("fourier data not available (run fourier_analyze first)")]
    MissingFourier,
    #[error("mismatched grids or dimensions")]
    Mismatch,
}

/// Uniform sampling of the unit circle with a power-of-two point count.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    points: Vec<C64>,
}

impl CircleGrid {
    pub fn new(n: usize) -> Result<Arc<Self>, LoopError> {
        if !fft::is_power_of_two(n) || n < 4 {
            return Err(LoopError::BadGridSize(n));
        }
        let points = (0..n)
            .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
            .collect();
        Ok(Arc::new(Self { points }))
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn point(&self, j: usize) -> C64 {
        self.points[j]
    }

    #[inline]
    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.size() as f64
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    /// Index of `conj(λ_j) = 1/λ_j` on the grid.
    #[inline]
    pub fn conj_index(&self, j: usize) -> usize {
        (self.size() - j) % self.size()
    }

    /// Grid index of `λ` if it coincides with a sample point.
    pub fn index_of(&self, lambda: C64, tol: f64) -> Option<usize> {
        let n = self.size();
        let theta = crate::num::atan2(lambda.im, lambda.re);
        let jf = theta / (2.0 * PI) * n as f64;
        let j = ((crate::num::round(jf) as i64).rem_euclid(n as i64)) as usize;
        if (self.point(j) - lambda).norm() <= tol {
            Some(j)
        } else {
            None
        }
    }
}

/// Fourier data attached to a loop: coefficients for degrees `−D..D`
/// plus the max coefficient magnitude observed beyond `D`.
#[derive(Debug, Clone)]
pub struct LoopFourier {
    pub degree: usize,
    /// Index `k` holds the coefficient of degree `k − D`.
    pub coeffs: Vec<CMatrix>,
    pub tail_energy: f64,
}

impl LoopFourier {
    pub fn coeff(&self, d: i64) -> &CMatrix {
        &self.coeffs[(d + self.degree as i64) as usize]
    }
}

/// An n×n matrix loop sampled on a [`CircleGrid`].
#[derive(Debug, Clone)]
pub struct LoopMatrix {
    grid: Arc<CircleGrid>,
    dim: usize,
    values: Vec<CMatrix>,
    fourier: Option<LoopFourier>,
}

impl LoopMatrix {
    pub fn from_values(grid: Arc<CircleGrid>, values: Vec<CMatrix>) -> Result<Self, LoopError> {
        if values.len() != grid.size() || values.is_empty() {
            return Err(LoopError::Mismatch);
        }
        let dim = values[0].rows();
        if values.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(LoopError::Mismatch);
        }
        Ok(Self {
            grid,
            dim,
            values,
            fourier: None,
        })
    }

    pub fn from_fn(
        grid: Arc<CircleGrid>,
        dim: usize,
        mut f: impl FnMut(usize, C64) -> CMatrix,
    ) -> Self {
        let values = (0..grid.size()).map(|j| f(j, grid.point(j))).collect();
        Self {
            grid,
            dim,
            values,
            fourier: None,
        }
    }

    pub fn constant(grid: Arc<CircleGrid>, m: CMatrix) -> Self {
        let dim = m.rows();
        let values = (0..grid.size()).map(|_| m.clone()).collect();
        Self {
            grid,
            dim,
            values,
            fourier: None,
        }
    }

    pub fn identity(grid: Arc<CircleGrid>, dim: usize) -> Self {
        Self::constant(grid, CMatrix::identity(dim))
    }

    #[inline]
    pub fn grid(&self) -> &Arc<CircleGrid> {
        &self.grid
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn value(&self, j: usize) -> &CMatrix {
        &self.values[j]
    }

    pub fn values(&self) -> &[CMatrix] {
        &self.values
    }

    pub fn fourier(&self) -> Option<&LoopFourier> {
        self.fourier.as_ref()
    }

    fn compatible(&self, o: &LoopMatrix) -> Result<(), LoopError> {
        if self.grid.size() != o.grid.size() || self.dim != o.dim {
            return Err(LoopError::Mismatch);
        }
        Ok(())
    }

    fn map(&self, f: impl Fn(usize, &CMatrix) -> CMatrix) -> LoopMatrix {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, m)| f(j, m))
            .collect();
        LoopMatrix {
            grid: self.grid.clone(),
            dim: self.dim,
            values,
            fourier: None,
        }
    }

    /// The star involution.  Per sample this is the conjugate transpose;
    /// attached Fourier data is transformed as `c_d ↦ c_{−d}*`.
    pub fn star(&self) -> LoopMatrix {
        let mut out = self.map(|_, m| m.adjoint());
        if let Some(f) = &self.fourier {
            let d = f.degree as i64;
            let coeffs = (-d..=d).map(|k| f.coeff(-k).adjoint()).collect();
            out.fourier = Some(LoopFourier {
                degree: f.degree,
                coeffs,
                tail_energy: f.tail_energy,
            });
        }
        out
    }

    /// Pointwise product.
    pub fn mul(&self, o: &LoopMatrix) -> Result<LoopMatrix, LoopError> {
        self.compatible(o)?;
        Ok(self.map(|j, m| m.mul(o.value(j))))
    }

    pub fn add(&self, o: &LoopMatrix) -> Result<LoopMatrix, LoopError> {
        self.compatible(o)?;
        Ok(self.map(|j, m| m.add(o.value(j))))
    }

    pub fn sub(&self, o: &LoopMatrix) -> Result<LoopMatrix, LoopError> {
        self.compatible(o)?;
        Ok(self.map(|j, m| m.sub(o.value(j))))
    }

    pub fn scale(&self, s: C64) -> LoopMatrix {
        self.map(|_, m| m.scale(s))
    }

    /// Pointwise commutator `[A,B] = AB − BA`.
    pub fn commutator(&self, o: &LoopMatrix) -> Result<LoopMatrix, LoopError> {
        self.compatible(o)?;
        Ok(self.map(|j, m| m.commutator(o.value(j))))
    }

    /// Pointwise inverse.  Fails with the offending sample index when a
    /// determinant falls below `1e−13` relative to the largest sample norm.
    pub fn inv(&self) -> Result<LoopMatrix, LoopError> {
        let scale = self
            .values
            .iter()
            .fold(0.0f64, |m, v| m.max(v.norm_max()))
            .max(1e-300);
        let floor = 1e-13 * scale;
        let mut values = Vec::with_capacity(self.len());
        for (j, m) in self.values.iter().enumerate() {
            let det = m.det().norm();
            if det < floor {
                return Err(LoopError::SingularSample { sample: j, det });
            }
            values.push(m.inv().ok_or(LoopError::SingularSample { sample: j, det })?);
        }
        LoopMatrix::from_values(self.grid.clone(), values)
    }

    /// Pointwise determinant as a scalar loop.
    pub fn det_loop(&self) -> Vec<C64> {
        self.values.iter().map(|m| m.det()).collect()
    }

    /// Half-trace samples, `t(λ_j) = tr(M(λ_j))/2`.
    pub fn half_trace(&self) -> Vec<C64> {
        self.values.iter().map(|m| m.trace() / 2.0).collect()
    }

    /// Max over samples of `|det − 1|`; loops integrated from trace-free
    /// potentials should keep this at integrator-noise level.
    pub fn max_det_deviation(&self) -> f64 {
        self.det_loop()
            .iter()
            .fold(0.0f64, |m, d| m.max((d - C64::new(1.0, 0.0)).norm()))
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm_max()))
    }

    pub fn max_dist(&self, o: &LoopMatrix) -> f64 {
        self.values
            .iter()
            .zip(o.values.iter())
            .fold(0.0f64, |m, (a, b)| m.max(a.dist(b)))
    }

    /// Max over samples of ‖M*M − id‖_F.
    pub fn max_unitarity_defect(&self) -> f64 {
        self.values
            .iter()
            .fold(0.0f64, |m, v| m.max(v.unitarity_defect()))
    }

    /// Entrywise discrete Fourier analysis, keeping degrees `|d| ≤ D` and
    /// recording the max coefficient magnitude beyond `D` as tail energy.
    pub fn fourier_analyze(&mut self, degree: usize) -> Result<&LoopFourier, LoopError> {
        let n = self.grid.size();
        if 2 * degree + 2 > n {
            return Err(LoopError::DegreeTooLarge { degree, grid: n });
        }
        let dim = self.dim;
        let mut coeffs =
            vec_of_matrices(2 * degree + 1, dim);
        let mut tail = 0.0f64;
        let mut buf = Vec::with_capacity(n);
        for r in 0..dim {
            for c in 0..dim {
                buf.clear();
                buf.extend(self.values.iter().map(|m| m[(r, c)]));
                let cs = fft::coefficients(&buf);
                for (k, v) in cs.iter().enumerate() {
                    let d = fft::slot_degree(k, n);
                    if d.unsigned_abs() as usize <= degree {
                        coeffs[(d + degree as i64) as usize][(r, c)] = *v;
                    } else {
                        tail = tail.max(v.norm());
                    }
                }
            }
        }
        self.fourier = Some(LoopFourier {
            degree,
            coeffs,
            tail_energy: tail,
        });
        Ok(self.fourier.as_ref().unwrap())
    }

    /// Evaluate the attached Fourier series at an arbitrary `λ`.
    pub fn eval_fourier(&self, lambda: C64) -> Result<CMatrix, LoopError> {
        let f = self.fourier.as_ref().ok_or(LoopError::MissingFourier)?;
        let mut out = CMatrix::zeros(self.dim, self.dim);
        let d = f.degree as i64;
        let mut pw = lambda.powi(-(d as i32));
        for k in -d..=d {
            let c = f.coeff(k);
            for r in 0..self.dim {
                for cc in 0..self.dim {
                    out[(r, cc)] += c[(r, cc)] * pw;
                }
            }
            pw *= lambda;
        }
        Ok(out)
    }

    /// Entrywise full-resolution Fourier coefficients (aliased layout).
    pub fn full_coefficients(&self) -> Vec<Vec<C64>> {
        let n = self.grid.size();
        let mut out = Vec::with_capacity(self.dim * self.dim);
        let mut buf = Vec::with_capacity(n);
        for r in 0..self.dim {
            for c in 0..self.dim {
                buf.clear();
                buf.extend(self.values.iter().map(|m| m[(r, c)]));
                out.push(fft::coefficients(&buf));
            }
        }
        out
    }

    /// θ-derivative of given order at grid sample `j0`, computed
    /// spectrally with modes below `noise_floor` (relative to the largest
    /// coefficient) dropped.
    pub fn theta_derivative_at(&self, j0: usize, order: u32, noise_floor: f64) -> CMatrix {
        let coeffs = self.full_coefficients();
        let mut scale = 0.0f64;
        for entry in &coeffs {
            for c in entry {
                scale = scale.max(c.norm());
            }
        }
        let floor = noise_floor * scale;
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[(r, c)] =
                    fft::theta_derivative_at(&coeffs[r * self.dim + c], j0, order, floor);
            }
        }
        out
    }

    /// Taylor coefficients in `θ − θ_{j0}` up to degree `k_max`, i.e.
    /// `f^{(k)}(θ_0)/k!`, computed spectrally.  This is how sampled loops
    /// are handed to the series-order calculus.
    pub fn taylor_at(&self, j0: usize, k_max: usize, noise_floor: f64) -> Vec<CMatrix> {
        let coeffs = self.full_coefficients();
        let mut scale = 0.0f64;
        for entry in &coeffs {
            for c in entry {
                scale = scale.max(c.norm());
            }
        }
        let floor = noise_floor * scale;
        let mut fact = 1.0f64;
        let mut out = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            if k > 0 {
                fact *= k as f64;
            }
            let mut m = CMatrix::zeros(self.dim, self.dim);
            for r in 0..self.dim {
                for c in 0..self.dim {
                    m[(r, c)] = fft::theta_derivative_at(
                        &coeffs[r * self.dim + c],
                        j0,
                        k as u32,
                        floor,
                    ) / fact;
                }
            }
            out.push(m);
        }
        out
    }
}

fn vec_of_matrices(len: usize, dim: usize) -> Vec<CMatrix> {
    (0..len).map(|_| CMatrix::zeros(dim, dim)).collect()
}

/// Branch-continuous square root of a nonvanishing scalar loop: principal
/// branch at sample 0, then continued so consecutive samples never jump
/// sheets.
pub fn continuous_sqrt(values: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev: Option<C64> = None;
    for v in values {
        let mut s = v.sqrt();
        if let Some(p) = prev {
            if (s + p).norm() < (s - p).norm() {
                s = -s;
            }
        }
        prev = Some(s);
        out.push(s);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Mat2, ONE, ZERO};

    fn grid(n: usize) -> Arc<CircleGrid> {
        CircleGrid::new(n).unwrap()
    }

    fn diag_loop(g: &Arc<CircleGrid>) -> LoopMatrix {
        // F(λ) = diag(λ, 1/λ)
        LoopMatrix::from_fn(g.clone(), 2, |_, l| {
            CMatrix::from_mat2(&Mat2::diag(l, 1.0 / l))
        })
    }

    #[test]
    fn star_of_identity() {
        let g = grid(8);
        let id = LoopMatrix::identity(g, 2);
        assert!(id.star().max_dist(&id) == 0.0);
    }

    #[test]
    fn star_swaps_diagonal_monomials() {
        // F = diag(λ, λ⁻¹) → F* = diag(λ⁻¹, λ)
        let g = grid(16);
        let f = diag_loop(&g);
        let fs = f.star();
        let expect = LoopMatrix::from_fn(g, 2, |_, l| {
            CMatrix::from_mat2(&Mat2::diag(1.0 / l, l))
        });
        assert!(fs.max_dist(&expect) < 1e-14);
    }

    #[test]
    fn star_constant_unitary_is_inverse() {
        let g = grid(8);
        // A constant SU(2) matrix.
        let u = Mat2::new(
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.8),
            C64::new(0.0, 0.8),
            C64::new(0.6, 0.0),
        );
        let f = LoopMatrix::constant(g, CMatrix::from_mat2(&u));
        let prod = f.star().mul(&f).unwrap();
        assert!(prod.max_dist(&LoopMatrix::identity(prod.grid().clone(), 2)) < 1e-14);
    }

    #[test]
    fn inverse_roundtrip_and_det() {
        let g = grid(32);
        let f = diag_loop(&g);
        let inv = f.inv().unwrap();
        let prod = f.mul(&inv).unwrap();
        assert!(prod.max_dist(&LoopMatrix::identity(g.clone(), 2)) < 1e-12);
        for d in f.det_loop() {
            assert!((d - ONE).norm() < 1e-14);
        }
        // [A, A] = 0
        let comm = f.commutator(&f).unwrap();
        assert!(comm.max_norm() < 1e-15);
    }

    #[test]
    fn singular_sample_reported() {
        let g = grid(8);
        let f = LoopMatrix::from_fn(g, 2, |j, _| {
            if j == 3 {
                CMatrix::zeros(2, 2)
            } else {
                CMatrix::identity(2)
            }
        });
        match f.inv() {
            Err(LoopError::SingularSample { sample: 3, .. }) => {}
            other => panic!("expected singular sample 3, got {other:?}"),
        }
    }

    #[test]
    fn fourier_monomials() {
        let g = grid(64);
        let mut f = diag_loop(&g);
        f.fourier_analyze(4).unwrap();
        let fr = f.fourier().unwrap();
        assert!(fr.tail_energy < 1e-13);
        assert!((fr.coeff(1)[(0, 0)] - ONE).norm() < 1e-13);
        assert!((fr.coeff(-1)[(1, 1)] - ONE).norm() < 1e-13);
        assert!(fr.coeff(0)[(0, 0)].norm() < 1e-13);
        // star on fourier: c_d ↦ c_{−d}*
        let fs = f.star();
        let fsf = fs.fourier().unwrap();
        assert!((fsf.coeff(-1)[(0, 0)] - ONE).norm() < 1e-13);
        // evaluation reproduces samples
        for j in (0..64).step_by(7) {
            let m = f.eval_fourier(g.point(j)).unwrap();
            assert!(m.dist(f.value(j)) < 1e-12);
        }
    }

    #[test]
    fn fourier_constant_loop() {
        let g = grid(8);
        let mut c = CMatrix::identity(2);
        c[(0, 1)] = C64::new(0.5, -0.25);
        let mut f = LoopMatrix::constant(g, c.clone());
        f.fourier_analyze(2).unwrap();
        let fr = f.fourier().unwrap();
        assert!(fr.coeff(0).dist(&c) < 1e-14);
        assert!(fr.coeff(1).norm_max() < 1e-14);
        assert!(fr.coeff(-2).norm_max() < 1e-14);
    }

    #[test]
    fn degree_too_large_rejected() {
        let g = grid(8);
        let mut f = LoopMatrix::identity(g, 2);
        assert!(matches!(
            f.fourier_analyze(4),
            Err(LoopError::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn star_antihomomorphism_and_positivity() {
        let g = grid(16);
        let a = LoopMatrix::from_fn(g.clone(), 2, |_, l| {
            CMatrix::from_mat2(&Mat2::new(
                l + C64::new(2.0, 0.3),
                1.0 / l,
                l * C64::new(0.0, 1.0),
                C64::new(0.5, -0.2),
            ))
        });
        let b = LoopMatrix::from_fn(g, 2, |_, l| {
            CMatrix::from_mat2(&Mat2::new(
                C64::new(1.0, 0.0),
                l * l,
                ZERO,
                C64::new(1.0, 0.0),
            ))
        });
        let lhs = a.mul(&b).unwrap().star();
        let rhs = b.star().mul(&a.star()).unwrap();
        assert!(lhs.max_dist(&rhs) < 1e-12);
        // star(F)·F is Hermitian positive semidefinite per sample.
        let p = a.star().mul(&a).unwrap();
        for j in 0..p.len() {
            let m = p.value(j).to_mat2();
            assert!(m.sub(&m.adjoint()).norm_fro() < 1e-12);
            let (lo, _) = m.eig_hermitian();
            assert!(lo > -1e-12);
        }
    }

    #[test]
    fn continuous_sqrt_crosses_branch_cut() {
        // A loop winding twice: λ², whose continuous square root is ±λ.
        let g = grid(32);
        let vals: Vec<C64> = (0..32).map(|j| g.point(j) * g.point(j)).collect();
        let s = continuous_sqrt(&vals);
        for j in 0..32 {
            assert!((s[j] - g.point(j)).norm() < 1e-12);
        }
    }
}
