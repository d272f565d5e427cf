use super::kernels::{q_inverse_parts, KernelKind};
use super::{kernel, CommutingOperator};
use crate::quat::{to_slice, Quaternion, SlicePoint};

/// Sampled resolvent type `(alpha, beta, omega)` with one constant per test angle.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeProfile {
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    /// `(phi, C_phi)` pairs; `C_phi` is infinite when a sample hit the spectrum.
    pub constants: Vec<(f64, f64)>,
    pub accepted: bool,
}

impl TypeProfile {
    /// Whether the exponents are usable by the decaying calculi.
    pub fn valid_for_calculus(&self) -> bool {
        self.alpha >= 1.0 / 3.0 - 1e-15 && self.beta > 0.0 && self.beta <= 1.0 / 3.0 + 1e-15
    }

    /// Profile with the given exponents and no sampled constants.
    pub fn assumed(alpha: f64, beta: f64, omega: f64) -> Self {
        TypeProfile { alpha, beta, omega, constants: Vec::new(), accepted: true }
    }
}

/// `true` when `s` is in the F-resolvent set, decided by the conditioning of `R`.
pub fn f_spectrum_check(t: &CommutingOperator, s: Quaternion) -> bool {
    let p = to_slice(s);
    q_inverse_parts(t, p.x, p.y).is_ok()
}

/// [`estimate_type_profile_with`] for `alpha = beta = 1/3`.
pub fn estimate_type_profile(t: &CommutingOperator, omega: f64, angles: &[f64]) -> TypeProfile {
    estimate_type_profile_with(t, 1.0 / 3.0, 1.0 / 3.0, omega, angles)
}

/// Samples `||S_L^-1(s,T)|| |s|^alpha` (for `|s| <= 1`) and `||S_L^-1(s,T)|| |s|^beta`
/// (for `|s| >= 1`) on rays outside `S_phi` for each `phi`. The profile is accepted
/// when every sample is finite and the maximum is attained away from the extreme
/// radii, i.e. the normalized norm does not grow towards 0 or infinity.
pub fn estimate_type_profile_with(t: &CommutingOperator, alpha: f64, beta: f64, omega: f64, angles: &[f64]) -> TypeProfile {
    const RADII: usize = 49;
    let units = [Quaternion::E1, Quaternion::E2, Quaternion::E3];
    let mut accepted = !angles.is_empty();
    let mut constants = Vec::with_capacity(angles.len());
    for &phi in angles {
        if !(phi > omega && phi <= std::f64::consts::PI) {
            constants.push((phi, f64::INFINITY));
            accepted = false;
            continue;
        }
        let mut per_radius = vec![0.0f64; RADII];
        'rays: for a in 0..6 {
            let arg = phi + (std::f64::consts::PI - phi) * a as f64 / 5.0;
            for (k, slot) in per_radius.iter_mut().enumerate() {
                let r = 10f64.powf(-6.0 + 12.0 * k as f64 / (RADII - 1) as f64);
                for j in units {
                    let s = SlicePoint::new(r * arg.cos(), r * arg.sin(), j);
                    let v = match kernel(KernelKind::SL, t, &s) {
                        Ok(m) => m.op_norm() * if r <= 1.0 { r.powf(alpha) } else { r.powf(beta) },
                        Err(_) => f64::INFINITY,
                    };
                    *slot = slot.max(v);
                    if !v.is_finite() {
                        break 'rays;
                    }
                }
            }
        }
        let c = per_radius.iter().cloned().fold(0.0, f64::max);
        let interior = per_radius[1..RADII - 1].iter().cloned().fold(0.0, f64::max);
        if !c.is_finite() || interior < c {
            accepted = false;
        }
        constants.push((phi, c));
    }
    TypeProfile { alpha, beta, omega, constants, accepted }
}

/// Power of the resolvent exponent bounding each kernel: `S` like `|s|^-alpha`,
/// `Q` and `P2` like `|s|^-2alpha`, `F` like `|s|^-3alpha` (with `beta` above 1).
fn estimate_multiplicity(kind: KernelKind) -> f64 {
    match kind {
        KernelKind::SL | KernelKind::SR => 1.0,
        KernelKind::Qc | KernelKind::P2L | KernelKind::P2R => 2.0,
        KernelKind::FL | KernelKind::FR => 3.0,
    }
}

/// Samples `g(r) = ||K(r e^{J arg})|| r^{m alpha}` (`r <= 1`) or `r^{m beta}` (`r >= 1`)
/// on rays with `phi <= arg <= pi` and returns `max g(r_end) / (10 max g(r_mid))`,
/// where the ends are `r = 1e-6, 1e6` and the middle is `1e-2 <= r <= 1e2`. A value
/// at most 1 means the kernel obeys the estimate exponents within a factor of ten.
pub fn kernel_scaling_ratio(t: &CommutingOperator, kind: KernelKind, alpha: f64, beta: f64, phi: f64) -> f64 {
    let m = estimate_multiplicity(kind);
    let (mut ends, mut mid): (f64, f64) = (0.0, 0.0);
    for a in 0..4 {
        let arg = phi + (std::f64::consts::PI - phi) * a as f64 / 3.0;
        for k in 0..=24 {
            let r = 10f64.powf(-6.0 + 0.5 * k as f64);
            for j in [Quaternion::E1, Quaternion::E2, Quaternion::E3] {
                let s = SlicePoint::new(r * arg.cos(), r * arg.sin(), j);
                let g = match kernel(kind, t, &s) {
                    Ok(v) => v.op_norm() * r.powf(m * if r <= 1.0 { alpha } else { beta }),
                    Err(_) => f64::INFINITY,
                };
                if k == 0 || k == 24 {
                    ends = ends.max(g);
                }
                if (8..=16).contains(&k) {
                    mid = mid.max(g);
                }
            }
        }
    }
    ends / (10.0 * mid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{generate_operator, GeneratorSpec};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn spectrum_check_on_spheres() {
        let qs = [Quaternion::new(1.0, 0.6, 0.0, 0.0), Quaternion::new(0.5, 0.0, 0.0, 0.2)];
        let t = CommutingOperator::from_diagonal(&qs);
        let dirs =
            [Quaternion::E1, Quaternion::E2, Quaternion::E3, Quaternion::new(0.0, 0.6, 0.8, 0.0), Quaternion::new(0.0, -0.48, 0.6, 0.64)];
        for q in qs {
            let p = to_slice(q);
            for j in dirs {
                assert!(!f_spectrum_check(&t, Quaternion::real(p.x) + j * p.y));
                assert!(f_spectrum_check(&t, Quaternion::real(p.x + 0.05) + j * p.y));
            }
        }
    }

    #[test]
    fn resolvent_set_is_axially_symmetric() {
        let t = generate_operator(&GeneratorSpec { dim: 3, r_min: 0.5, r_max: 2.0, omega: FRAC_PI_4, seed: 5 }).unwrap();
        for s in [Quaternion::new(0.3, 0.2, 1.0, -0.4), Quaternion::new(-1.0, 0.0, 0.1, 0.0)] {
            let p = to_slice(s);
            let base = f_spectrum_check(&t, s);
            for k in 0..16 {
                let a = k as f64 * 0.39;
                let b = k as f64 * 1.17;
                let j = Quaternion::new(0.0, a.cos() * b.sin(), a.sin() * b.sin(), b.cos());
                assert_eq!(f_spectrum_check(&t, Quaternion::real(p.x) + j * p.y), base);
            }
        }
    }

    #[test]
    fn sectorial_diagonal_operator_is_accepted() {
        let t = generate_operator(&GeneratorSpec { dim: 4, r_min: 0.5, r_max: 2.0, omega: FRAC_PI_4, seed: 2 }).unwrap();
        let p = estimate_type_profile(&t, FRAC_PI_4, &[FRAC_PI_2]);
        assert!(p.accepted, "{p:?}");
        assert!(p.constants[0].1.is_finite());
    }

    #[test]
    fn kernels_follow_estimate_exponents() {
        let t = generate_operator(&GeneratorSpec { dim: 3, r_min: 0.5, r_max: 2.0, omega: FRAC_PI_4, seed: 9 }).unwrap();
        for kind in KernelKind::ALL {
            assert!(kernel_scaling_ratio(&t, kind, 1.0 / 3.0, 1.0 / 3.0, FRAC_PI_2) <= 1.0, "{kind:?}");
        }
        // Exponents too large at infinity are caught.
        assert!(kernel_scaling_ratio(&t, KernelKind::SL, 1.0 / 3.0, 2.0, FRAC_PI_2) > 1.0);
    }

    #[test]
    fn zero_operator_is_rejected() {
        let t = CommutingOperator::from_real(nalgebra::DMatrix::zeros(2, 2));
        assert!(f_spectrum_check(&t, Quaternion::new(0.5, 1.0, 0.0, 0.0)));
        let p = estimate_type_profile(&t, FRAC_PI_4, &[FRAC_PI_2]);
        assert!(!p.accepted);
        assert!(!t.is_injective(1e-10).0);
    }
}
