//! Quaternionic functional calculi for finite-dimensional operators with
//! commuting components.
//!
//! Operators `T = T0 + e1 T1 + e2 T2 + e3 T3` act on `H^n`. Functions are left
//! slice hyperholomorphic, represented by stems. The S-calculus reproduces
//! `f(T)`; the Q, P2 and F calculi produce the Cauchy-Fueter derivative
//! `Df(T)`, its conjugate `Dbar f(T)` and the Laplacian `Delta f(T)`. All four
//! are contour integrals of explicit resolvent kernels along the boundary of a
//! sector, with an H-infinity extension for polynomially growing functions.

// Validation is written `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod contour;
pub mod error;
pub mod operator;
pub mod quat;
pub mod slice;

pub use calculus::{calc, calc_right, hinf, CalcKind, CalcOptions, CalculusResult, Regime};
pub use contour::{tail_radius, SectorContour};
pub use error::{Error, Result};
pub use operator::{CommutingOperator, KernelKind, QuatMatrix, TypeProfile};
pub use quat::{in_sector, to_slice, Quaternion, SlicePoint};
pub use slice::{parse_function, pointwise_fine, StemFunction};
