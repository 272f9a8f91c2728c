//! Numerical construction of simultaneous unitarizers for sets of
//! SL(2,ℂ)-valued analytic loops, applied to closing the monodromy of
//! trinoid and symmetric k-noid potentials and producing constant mean
//! curvature surfaces in ℝ³, 𝕊³ and ℍ³ via the loop-group (extended
//! Weierstrass) representation.
//!
//! The crate is organised around the pipeline
//!
//! ```text
//! potential ──► monodromy ──► unitarize ──► iwasawa ──► surface
//!                  │              │
//!                  └── series ◄───┘         (local hypothesis checks)
//! ```
//!
//! with [`loopalg`] providing the shared loop arithmetic (matrix loops
//! sampled on the unit circle, the star involution, Fourier analysis)
//! and [`linalg`] the small dense complex matrix kernels.
//!
//! The crate is `no_std` (with `alloc`); all file formats and the CLI
//! live in the companion `knoid-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod fft;
pub mod iwasawa;
pub mod linalg;
pub mod loopalg;
pub mod monodromy;
pub mod ode;
pub mod potential;
pub mod series;
pub mod surface;
pub mod synthetic;
pub mod unitarize;

pub use num_complex::Complex64 as C64;

pub(crate) mod num {
    //! f64 math routed through `num_traits::Float` so the same code
    //! compiles on `no_std` targets (libm) and under test (std).
    use num_traits::Float;

    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        Float::sqrt(x)
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        Float::abs(x)
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        Float::cos(x)
    }
    #[inline]
    pub fn sin(x: f64) -> f64 {
        Float::sin(x)
    }
    #[inline]
    pub fn atan2(y: f64, x: f64) -> f64 {
        Float::atan2(y, x)
    }
    #[inline]
    pub fn powi(x: f64, k: i32) -> f64 {
        Float::powi(x, k)
    }
    #[inline]
    pub fn powf(x: f64, p: f64) -> f64 {
        Float::powf(x, p)
    }
    #[inline]
    pub fn hypot(x: f64, y: f64) -> f64 {
        Float::hypot(x, y)
    }
    #[inline]
    pub fn round(x: f64) -> f64 {
        Float::round(x)
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        Float::floor(x)
    }
    #[inline]
    pub fn exp(x: f64) -> f64 {
        Float::exp(x)
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        Float::ln(x)
    }
}
