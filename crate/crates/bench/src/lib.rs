//! Shared fixtures for the benchmarks.

use std::f64::consts::FRAC_PI_4;

use qcalc_core::operator::{generate_operator, GeneratorSpec};
use qcalc_core::{CommutingOperator, TypeProfile};

/// Seeded sectorial operator of dimension `dim` with spectrum in the annulus `[0.5, 2]`.
pub fn operator(dim: usize) -> CommutingOperator {
    generate_operator(&GeneratorSpec { dim, r_min: 0.5, r_max: 2.0, omega: FRAC_PI_4, seed: 1 }).expect("valid generator spec")
}

pub fn profile() -> TypeProfile {
    TypeProfile::assumed(1.0 / 3.0, 1.0 / 3.0, FRAC_PI_4)
}
