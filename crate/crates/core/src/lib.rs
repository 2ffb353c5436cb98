//! A numerical laboratory for the first Heisenberg group ℍ¹ ≅ ℝ³.
//!
//! The crate bundles the explicit computational machinery around the
//! sub-Laplacian of ℍ¹:
//!
//! * [`group`]: the group law, dilations, the Koranyi gauge, the fundamental
//!   solution and finite-difference application of the left-invariant fields.
//! * [`hermite`]: normalized and rescaled Hermite functions and the exact
//!   tridiagonal matrices of position and derivative in that basis.
//! * [`ncft`]: the non-commutative Fourier transform in the rescaled Hermite
//!   basis, on a truncated `(n, m, λ)` grid.
//! * [`delta`]: Fourier coefficients of derivatives of the Dirac delta and the
//!   logarithmic divergence of the resulting deficiency candidates.
//! * [`geodesics`]: the exponential chart `Φ(t, θ, r)` and the distance from
//!   the origin.
//! * [`hardy`]: the Hardy quotient machinery and the Koranyi-weight inequality.
//! * [`cli`]: reproducible batch runs writing CSV/JSON reports.
//!
//! Runnable walkthroughs for each part live in the `examples/` directory.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod delta;
pub mod error;
pub mod geodesics;
pub mod group;
pub mod hardy;
pub mod hermite;
pub mod ncft;
pub mod quadrature;

pub use error::{LabError, Result};
pub use group::{GroupPoint, ScalarField, Stencil};
pub use num_complex::Complex64;
