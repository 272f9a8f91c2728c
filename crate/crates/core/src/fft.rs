//! Radix-2 FFT for power-of-two sample counts.
//!
//! Conventions used throughout the crate: a loop `f` sampled at
//! `λ_j = exp(2πi·j/N)` has Fourier coefficients `c_d` with
//! `f(λ) = Σ_d c_d·λ^d`, recovered as `c_d = (1/N)·Σ_j f_j·λ_j^{−d}`,
//! i.e. the forward transform below divided by `N`.  Degrees are stored
//! aliased modulo `N`: slot `k` holds degree `k` for `k < N/2` and degree
//! `k − N` otherwise.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64 as C64;

use crate::num;

pub fn is_power_of_two(n: usize) -> bool {
    n >= 2 && n & (n - 1) == 0
}

/// In-place forward DFT, `F_k = Σ_j f_j·exp(−2πi·jk/N)`.
pub fn fft_in_place(buf: &mut [C64]) {
    let n = buf.len();
    assert!(is_power_of_two(n), "fft length must be a power of two");
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = -2.0 * PI / len as f64;
        let wlen = C64::new(num::cos(ang), num::sin(ang));
        let mut i = 0;
        while i < n {
            let mut w = C64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = buf[i + k];
                let v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w *= wlen;
            }
            i += len;
        }
        len <<= 1;
    }
}

/// In-place inverse DFT including the 1/N normalization.
pub fn ifft_in_place(buf: &mut [C64]) {
    let n = buf.len();
    for z in buf.iter_mut() {
        *z = z.conj();
    }
    fft_in_place(buf);
    let scale = 1.0 / n as f64;
    for z in buf.iter_mut() {
        *z = z.conj() * scale;
    }
}

/// Fourier coefficients (aliased layout) of samples on the circle grid.
pub fn coefficients(samples: &[C64]) -> Vec<C64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    fft_in_place(&mut buf);
    let scale = 1.0 / n as f64;
    for z in buf.iter_mut() {
        *z *= scale;
    }
    buf
}

/// Samples from Fourier coefficients in aliased layout.
pub fn samples(coeffs: &[C64]) -> Vec<C64> {
    let mut buf = coeffs.to_vec();
    let n = buf.len();
    for z in buf.iter_mut() {
        *z *= n as f64;
    }
    ifft_in_place(&mut buf);
    buf
}

/// Slot of degree `d` in aliased layout, requiring `−N/2 ≤ d < N/2`.
pub fn degree_slot(d: i64, n: usize) -> usize {
    let half = (n / 2) as i64;
    assert!(d >= -half && d < half, "degree {d} out of range for N={n}");
    d.rem_euclid(n as i64) as usize
}

/// Degree represented by slot `k` in aliased layout.
pub fn slot_degree(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Evaluate `Σ_d c_d·λ^d` from aliased coefficients at an arbitrary point
/// (Laurent evaluation; the caller is responsible for `λ` lying in the
/// annulus of convergence).
pub fn evaluate(coeffs: &[C64], lambda: C64) -> C64 {
    let n = coeffs.len();
    let inv = 1.0 / lambda;
    // Horner on positive degrees 0..N/2−1.
    let mut pos = C64::new(0.0, 0.0);
    for k in (0..n / 2).rev() {
        pos = pos * lambda + coeffs[k];
    }
    // Negative degrees: slot n−1 ↔ degree −1, …, slot n/2 ↔ degree −N/2.
    let mut neg = C64::new(0.0, 0.0);
    let mut p = inv;
    for k in (n / 2..n).rev() {
        neg += coeffs[k] * p;
        p *= inv;
    }
    pos + neg
}

/// θ-derivative of order `k` evaluated at grid sample `j0`, computed
/// spectrally: `f^{(k)}(θ_0) = Σ_d (i·d)^k·c_d·λ_0^d`.  Coefficients with
/// magnitude below `noise_floor` are dropped so that integrator noise in
/// the high modes is not amplified by `d^k`.
pub fn theta_derivative_at(coeffs: &[C64], j0: usize, order: u32, noise_floor: f64) -> C64 {
    let n = coeffs.len();
    let theta0 = 2.0 * PI * j0 as f64 / n as f64;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        let c = coeffs[k];
        if c.norm() < noise_floor {
            continue;
        }
        let d = slot_degree(k, n) as f64;
        let idk = C64::new(0.0, d).powu(order);
        let phase = C64::from_polar(1.0, d * theta0);
        acc += idk * c * phase;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let n = 64;
        let xs: Vec<C64> = (0..n)
            .map(|j| C64::new((j as f64).sin(), (j as f64 * 0.3).cos()))
            .collect();
        let mut buf = xs.clone();
        fft_in_place(&mut buf);
        ifft_in_place(&mut buf);
        for (a, b) in xs.iter().zip(&buf) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn monomial_coefficients() {
        let n = 32;
        // f(λ) = 2λ³ + iλ⁻²
        let samples_in: Vec<C64> = (0..n)
            .map(|j| {
                let l = C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
                l.powi(3) * 2.0 + l.powi(-2) * C64::new(0.0, 1.0)
            })
            .collect();
        let c = coefficients(&samples_in);
        assert!((c[degree_slot(3, n)] - C64::new(2.0, 0.0)).norm() < 1e-13);
        assert!((c[degree_slot(-2, n)] - C64::new(0.0, 1.0)).norm() < 1e-13);
        let mut energy = 0.0;
        for k in 0..n {
            let d = slot_degree(k, n);
            if d != 3 && d != -2 {
                energy += c[k].norm();
            }
        }
        assert!(energy < 1e-12);
        // Laurent evaluation off the grid and off the circle.
        let z = C64::new(0.9, 0.3);
        let direct = z.powi(3) * 2.0 + z.powi(-2) * C64::new(0.0, 1.0);
        assert!((evaluate(&c, z) - direct).norm() < 1e-12);
    }

    #[test]
    fn spectral_derivative() {
        let n = 128;
        // f(θ) = exp(2iθ) + 0.5·exp(−iθ): f''(θ₀) = −4e^{2iθ₀} − 0.5e^{−iθ₀}
        let samples_in: Vec<C64> = (0..n)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / n as f64;
                C64::from_polar(1.0, 2.0 * th) + C64::from_polar(0.5, -th)
            })
            .collect();
        let c = coefficients(&samples_in);
        let j0 = 17;
        let th0 = 2.0 * PI * j0 as f64 / n as f64;
        let truth = C64::from_polar(4.0, 2.0 * th0) * -1.0 - C64::from_polar(0.5, -th0);
        let got = theta_derivative_at(&c, j0, 2, 1e-13);
        assert!((got - truth).norm() < 1e-10);
    }
}
