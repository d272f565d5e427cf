//! The S, Q, P2 and F functional calculi for decaying functions, and their
//! H-infinity extensions through a regularizer.
//!
//! | kind | result        | kernel          | prefactor |
//! |------|---------------|-----------------|-----------|
//! | S    | `f(T)`        | `S_L^-1`        | `1/2pi`   |
//! | Q    | `Df(T)`       | `Q_{c,s}^-1`    | `-1/pi`   |
//! | P2   | `Dbar f(T)`   | `P2_L`          | `1/2pi`   |
//! | F    | `Delta f(T)`  | `F_L`           | `1/2pi`   |

mod checks;
mod hinf;

use std::f64::consts::PI;

use crate::contour::{certified_radii, integrate, integrate_right, Integral, KernelEnvelope, SectorContour};
use crate::error::{Error, Result};
use crate::operator::{kernel, CommutingOperator, KernelKind, QuatMatrix, TypeProfile};
use crate::quat::{Quaternion, SlicePoint};
use crate::slice::StemFunction;

pub use checks::{
    contour_independence, default_variants, derivative_relation, diagonal_oracle, hinf_powers, intrinsic_properties,
    power_recurrence_check, product_rules, resolvent_identities, sample_resolvent_pairs, CheckRecord,
};
pub use hinf::hinf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CalcKind {
    S,
    Q,
    P2,
    F,
}

impl CalcKind {
    pub const ALL: [CalcKind; 4] = [CalcKind::S, CalcKind::Q, CalcKind::P2, CalcKind::F];

    fn left_kernel(self) -> KernelKind {
        match self {
            CalcKind::S => KernelKind::SL,
            CalcKind::Q => KernelKind::Qc,
            CalcKind::P2 => KernelKind::P2L,
            CalcKind::F => KernelKind::FL,
        }
    }

    fn right_kernel(self) -> KernelKind {
        match self {
            CalcKind::S => KernelKind::SR,
            CalcKind::Q => KernelKind::Qc,
            CalcKind::P2 => KernelKind::P2R,
            CalcKind::F => KernelKind::FR,
        }
    }

    fn prefactor(self) -> f64 {
        match self {
            CalcKind::Q => -1.0 / PI,
            _ => 1.0 / (2.0 * PI),
        }
    }

    /// Power of `|s|^-1` governing the kernel at infinity for bounded `T`.
    fn kernel_decay(self) -> f64 {
        match self {
            CalcKind::S => 1.0,
            CalcKind::Q | CalcKind::P2 => 2.0,
            CalcKind::F => 3.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CalcKind::S => "S",
            CalcKind::Q => "Q",
            CalcKind::P2 => "P2",
            CalcKind::F => "F",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Decaying,
    HInfinity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalcOptions {
    /// Opening of the sector where `f` is holomorphic; defaults to `(omega + pi)/2`.
    pub theta: Option<f64>,
    /// Contour angle; defaults to the midpoint of `(omega, theta)`.
    pub phi: Option<f64>,
    pub j: Quaternion,
    /// Absolute quadrature target.
    pub tol: f64,
    pub rel_tol: f64,
    /// Targets for the sub-calculi inside the H-infinity construction, where
    /// the regularized integrals are small and their errors get amplified by
    /// the inverted prefactor.
    pub inner_tol: f64,
    pub inner_rel_tol: f64,
    /// Overrides the regularizer index chosen from the growth certificate.
    pub regularizer: Option<u32>,
}

impl Default for CalcOptions {
    fn default() -> Self {
        CalcOptions {
            theta: None,
            phi: None,
            j: Quaternion::E1,
            tol: 1e-9,
            rel_tol: 0.0,
            inner_tol: 1e-15,
            inner_rel_tol: 1e-11,
            regularizer: None,
        }
    }
}

impl CalcOptions {
    pub fn theta(&self, profile: &TypeProfile) -> f64 {
        self.theta.unwrap_or(0.5 * (profile.omega + PI))
    }

    pub fn phi(&self, profile: &TypeProfile) -> f64 {
        self.phi.unwrap_or(0.5 * (profile.omega + self.theta(profile)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    /// Final refinement estimate (summed over sub-integrals for H-infinity).
    pub estimate: f64,
    pub panels: usize,
    pub regularizer: Option<u32>,
    /// `||P X - B|| / ||B||` for the H-infinity solve `X = P^-1 B`.
    pub bracket_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalculusResult {
    pub value: QuatMatrix,
    pub kind: CalcKind,
    pub regime: Regime,
    pub diagnostics: Diagnostics,
}

/// Sampled envelope of `||K||` on both rays of the contour, inflated by 2.
fn kernel_envelope(kind: KernelKind, decay: f64, t: &CommutingOperator, phi: f64, j: Quaternion) -> Result<KernelEnvelope> {
    let mut c0: f64 = 0.0;
    let mut c_inf: f64 = 0.0;
    for k in 0..=32 {
        let r = 10f64.powf(-8.0 + 0.5 * k as f64);
        let (x, y) = (r * phi.cos(), r * phi.sin());
        for unit in [j, -j] {
            let norm = kernel(kind, t, &SlicePoint::new(x, y, unit))?.frobenius();
            if r <= 1.0 {
                c0 = c0.max(norm);
            }
            if r >= 1.0 {
                c_inf = c_inf.max(norm * r.powf(decay));
            }
        }
    }
    Ok(KernelEnvelope { c0: 2.0 * c0, c_inf: 2.0 * c_inf, decay })
}

fn check_setup(t: &CommutingOperator, f: &StemFunction, profile: &TypeProfile, opts: &CalcOptions) -> Result<f64> {
    if !profile.valid_for_calculus() {
        return Err(Error::Invalid(format!("type exponents ({}, {}) outside alpha >= 1/3, 0 < beta <= 1/3", profile.alpha, profile.beta)));
    }
    let theta = opts.theta(profile);
    let phi = opts.phi(profile);
    if !(profile.omega < phi && phi < theta && theta < PI) {
        return Err(Error::Invalid(format!("need omega < phi < theta < pi, got {} < {phi} < {theta}", profile.omega)));
    }
    if t.dim() == 0 {
        return Err(Error::Invalid("empty operator".into()));
    }
    if f.decay_certificate(3.0 * profile.alpha, 3.0 * profile.beta, theta).is_none() {
        return Err(Error::ClassMismatch(format!(
            "{f} is not in the decaying class with exponents ({}, {})",
            3.0 * profile.alpha,
            3.0 * profile.beta
        )));
    }
    Ok(phi)
}

fn run(
    kind: CalcKind,
    kernel_kind: KernelKind,
    t: &CommutingOperator,
    f: &StemFunction,
    profile: &TypeProfile,
    opts: &CalcOptions,
    right: bool,
) -> Result<CalculusResult> {
    let phi = check_setup(t, f, profile, opts)?;
    let env = kernel_envelope(kernel_kind, kind.kernel_decay(), t, phi, opts.j)?;
    let (t_min, t_max) = certified_radii(f, &env, phi, opts.tol)?;
    let contour = SectorContour::new(phi, opts.j, t_min, t_max, opts.tol)?.with_rel_tol(opts.rel_tol);
    let k = |s: &SlicePoint| kernel(kernel_kind, t, s);
    let Integral { value, estimate, panels } = if right { integrate_right(k, f, &contour)? } else { integrate(k, f, &contour)? };
    Ok(CalculusResult {
        value: value.scale(kind.prefactor()),
        kind,
        regime: Regime::Decaying,
        diagnostics: Diagnostics { estimate, panels, regularizer: None, bracket_residual: None },
    })
}

/// Decaying-class calculus `f(T)`, `Df(T)`, `Dbar f(T)` or `Delta f(T)` via the left kernels.
pub fn calc(kind: CalcKind, t: &CommutingOperator, f: &StemFunction, profile: &TypeProfile, opts: &CalcOptions) -> Result<CalculusResult> {
    run(kind, kind.left_kernel(), t, f, profile, opts, false)
}

/// The same calculus through the right kernels, `int f(s) ds_J K_R(s,T)`; needs intrinsic `f`.
pub fn calc_right(
    kind: CalcKind,
    t: &CommutingOperator,
    f: &StemFunction,
    profile: &TypeProfile,
    opts: &CalcOptions,
) -> Result<CalculusResult> {
    if !f.is_intrinsic() {
        return Err(Error::NotIntrinsic);
    }
    run(kind, kind.right_kernel(), t, f, profile, opts, true)
}
