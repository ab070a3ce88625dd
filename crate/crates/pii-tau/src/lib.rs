//! Numerical evaluation of the generic Painlevé II tau-function.
//!
//! The tau-function is represented as the Fredholm determinant of an
//! integrable operator on the imaginary axis built from parabolic cylinder
//! parametrices, together with explicit correction integrals. The crate also
//! scans the complex `t`-plane for zeros of the determinant.
//!
//! Module overview:
//! * [`specialfn`] — Γ, Kummer `M`, parabolic cylinder `D_ν`.
//! * [`monodromy`] — Stokes data and derived parameters `ν, h₀, h₁, h`.
//! * [`geometry`] — phase `θ`, conformal maps `ζ, ξ`, Möbius factor `m`.
//! * [`jump`] — parametrices, Stokes matrices, jump entries `A, B, C, D`.
//! * [`quadrature`] — Gauss–Legendre rules.
//! * [`cauchy`] — contours, Cauchy transforms, the scalar factor `φ`.
//! * [`fredholm`] — Nyström operators and determinant routes.
//! * [`corrections`] — correction integrals and the sector-integral check.
//! * [`tau`] — `∂_t log τ`, path integration, divisor scanning.
//! * [`registry`] — the identity registry behind `selftest`.
//! * [`cli`] — command-line front end.

// `!(x < tol)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cauchy;
pub mod cli;
pub mod corrections;
pub mod error;
pub mod fredholm;
pub mod geometry;
pub mod jump;
pub mod monodromy;
pub mod quadrature;
pub mod registry;
pub mod specialfn;
pub mod tau;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
