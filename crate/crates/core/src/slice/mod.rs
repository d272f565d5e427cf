//! Left slice hyperholomorphic functions given by stem pairs `(alpha, beta)`,
//! `f(x + J y) = alpha(x, y) + J beta(x, y)`.
//!
//! The family is closed: rational atoms `s^p (1 + s)^(-q)` (powers and
//! regularizers are special cases), sums, products with an intrinsic left
//! factor, and right scalar multiples. Decay and growth orders propagate
//! symbolically; their constants come from grid maximization.

mod parse;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quat::{to_slice, Quaternion};

pub use parse::parse_function;

/// Inflation applied to grid-maximized constants.
const CONSTANT_SAFETY: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    /// `s^n`
    Power(u32),
    /// `s^n / (1 + s)^(2n)`
    Regularizer(u32),
    /// `s^num / (1 + s)^den`, produced by differentiation.
    Rational {
        num: u32,
        den: u32,
    },
    Sum(StemFunction, StemFunction),
    /// Pointwise product; the left factor must be intrinsic.
    Product(StemFunction, StemFunction),
    /// `f(s) * c`. The scalar sits on the right of the values so that the
    /// result stays left slice hyperholomorphic for quaternionic `c`.
    Scaled(Quaternion, StemFunction),
}

/// Membership certificate for the decaying class with exponents `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decay {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub c_f: f64,
}

/// Certificate `|f(s)| <= C_k (|s|^k + |s|^-k)` on the sector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Growth {
    pub k: f64,
    pub c_k: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StemFunction {
    kind: Arc<Kind>,
    intrinsic: bool,
}

impl StemFunction {
    pub fn power(n: u32) -> Self {
        StemFunction { kind: Arc::new(Kind::Power(n)), intrinsic: true }
    }

    pub fn regularizer(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("regularizer index must be >= 1".into()));
        }
        Ok(StemFunction { kind: Arc::new(Kind::Regularizer(n)), intrinsic: true })
    }

    pub fn rational(num: u32, den: u32) -> Self {
        StemFunction { kind: Arc::new(Kind::Rational { num, den }), intrinsic: true }
    }

    pub fn constant(c: Quaternion) -> Self {
        StemFunction::power(0).scale(c)
    }

    pub fn sum(f: StemFunction, g: StemFunction) -> Self {
        let intrinsic = f.intrinsic && g.intrinsic;
        StemFunction { kind: Arc::new(Kind::Sum(f, g)), intrinsic }
    }

    /// `f * g`; fails unless `f` is intrinsic.
    pub fn product(f: StemFunction, g: StemFunction) -> Result<Self> {
        if !f.intrinsic {
            return Err(Error::Unsupported(format!("left factor {f} of a product must be intrinsic")));
        }
        let intrinsic = g.intrinsic;
        Ok(StemFunction { kind: Arc::new(Kind::Product(f, g)), intrinsic })
    }

    /// `s -> f(s) * c`.
    pub fn scale(self, c: impl Into<Quaternion>) -> Self {
        let c = c.into();
        let intrinsic = self.intrinsic && c.is_real();
        StemFunction { kind: Arc::new(Kind::Scaled(c, self)), intrinsic }
    }

    /// `s -> s^n f(s)`.
    pub fn times_power(&self, n: u32) -> Self {
        if n == 0 {
            return self.clone();
        }
        StemFunction::product(StemFunction::power(n), self.clone()).expect("powers are intrinsic")
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn is_intrinsic(&self) -> bool {
        self.intrinsic
    }

    /// Stem pair at `(x, y)`; `y` may have either sign.
    pub fn eval_stem(&self, x: f64, y: f64) -> (Quaternion, Quaternion) {
        match &*self.kind {
            Kind::Power(_) | Kind::Regularizer(_) | Kind::Rational { .. } => {
                let w = self.eval_complex(Complex64::new(x, y));
                (Quaternion::real(w.re), Quaternion::real(w.im))
            }
            Kind::Sum(f, g) => {
                let (a1, b1) = f.eval_stem(x, y);
                let (a2, b2) = g.eval_stem(x, y);
                (a1 + a2, b1 + b2)
            }
            Kind::Product(f, g) => {
                let (a1, b1) = f.eval_stem(x, y);
                let (a2, b2) = g.eval_stem(x, y);
                // a1, b1 are real, so they commute with J.
                let (a1, b1) = (a1.s0, b1.s0);
                (a2 * a1 - b2 * b1, b2 * a1 + a2 * b1)
            }
            Kind::Scaled(c, f) => {
                let (a, b) = f.eval_stem(x, y);
                (a * *c, b * *c)
            }
        }
    }

    /// Value at the complex point `z` for intrinsic functions (`J` replaced by `i`).
    fn eval_complex(&self, z: Complex64) -> Complex64 {
        match &*self.kind {
            Kind::Power(n) => z.powu(*n),
            Kind::Regularizer(n) => rational_complex(z, *n, 2 * n),
            Kind::Rational { num, den } => rational_complex(z, *num, *den),
            _ => {
                let (a, b) = self.eval_stem(z.re, z.im);
                Complex64::new(a.s0, b.s0)
            }
        }
    }

    /// `alpha + J beta` at the slice point of `q`.
    pub fn eval(&self, q: Quaternion) -> Result<Quaternion> {
        let p = to_slice(q);
        let (a, b) = self.eval_stem(p.x, p.y);
        let v = a + p.j * b;
        if !v.norm().is_finite() {
            return Err(Error::Domain(format!("{self} is singular at {q}")));
        }
        Ok(v)
    }

    pub fn has_pole(&self) -> bool {
        match &*self.kind {
            Kind::Power(_) => false,
            Kind::Regularizer(_) => true,
            Kind::Rational { den, .. } => *den > 0,
            Kind::Sum(f, g) | Kind::Product(f, g) => f.has_pole() || g.has_pole(),
            Kind::Scaled(_, f) => f.has_pole(),
        }
    }

    /// Slice derivative, computed symbolically within the family.
    pub fn derivative(&self) -> Self {
        match &*self.kind {
            Kind::Power(0) => StemFunction::constant(Quaternion::ZERO),
            Kind::Power(n) => StemFunction::power(n - 1).scale(*n as f64),
            Kind::Regularizer(n) => rational_derivative(*n, 2 * n),
            Kind::Rational { num, den } => rational_derivative(*num, *den),
            Kind::Sum(f, g) => StemFunction::sum(f.derivative(), g.derivative()),
            Kind::Product(f, g) => {
                let fd = f.derivative();
                let gd = g.derivative();
                StemFunction::sum(
                    StemFunction::product(fd, g.clone()).expect("derivative of intrinsic is intrinsic"),
                    StemFunction::product(f.clone(), gd).expect("left factor already intrinsic"),
                )
            }
            Kind::Scaled(c, f) => f.derivative().scale(*c),
        }
    }

    /// Orders `(nu0, nu_inf)` with `|f(s)| = O(|s|^nu0)` at 0 and `O(|s|^nu_inf)` at infinity.
    pub fn orders(&self) -> (f64, f64) {
        match &*self.kind {
            Kind::Power(n) => (*n as f64, *n as f64),
            Kind::Regularizer(n) => (*n as f64, -(*n as f64)),
            Kind::Rational { num, den } => (*num as f64, *num as f64 - *den as f64),
            Kind::Sum(f, g) => {
                let (f0, fi) = f.orders();
                let (g0, gi) = g.orders();
                (f0.min(g0), fi.max(gi))
            }
            Kind::Product(f, g) => {
                let (f0, fi) = f.orders();
                let (g0, gi) = g.orders();
                (f0 + g0, fi + gi)
            }
            Kind::Scaled(_, f) => f.orders(),
        }
    }

    /// Upper bound for `|f|` at `(x, y)`, valid for every unit `J`.
    fn magnitude_bound(&self, x: f64, y: f64) -> f64 {
        if self.intrinsic {
            let (a, b) = self.eval_stem(x, y);
            a.s0.hypot(b.s0)
        } else {
            let (a, b) = self.eval_stem(x, y);
            a.norm() + b.norm()
        }
    }

    /// Grid-maximized constants `(C0, Cinf)` such that `|f(s)| <= C0 |s|^nu0` for
    /// `|s| <= 1` and `|f(s)| <= Cinf |s|^nu_inf` for `|s| >= 1`, over the given
    /// arguments.
    pub fn envelope(&self, angles: &[f64]) -> (f64, f64) {
        let (nu0, nui) = self.orders();
        let mut c0: f64 = 0.0;
        let mut ci: f64 = 0.0;
        for &th in angles {
            let (c, s) = (th.cos(), th.sin());
            for k in 0..=60 {
                let r = 10f64.powf(-6.0 + 6.0 * k as f64 / 60.0);
                c0 = c0.max(self.magnitude_bound(r * c, r * s) / r.powf(nu0));
                let r = 1.0 / r;
                ci = ci.max(self.magnitude_bound(r * c, r * s) / r.powf(nui));
            }
        }
        (CONSTANT_SAFETY * c0, CONSTANT_SAFETY * ci)
    }

    /// Decay certificate for the class with exponents `(a, b)` on `S_theta`,
    /// or `None` when the orders do not give a positive `delta`.
    pub fn decay_certificate(&self, a: f64, b: f64, theta: f64) -> Option<Decay> {
        if self.has_pole() && theta >= std::f64::consts::PI {
            return None;
        }
        let (nu0, nui) = self.orders();
        let delta = (nu0 - (a - 1.0)).min((b - 1.0) - nui);
        if !(delta > 0.0) {
            return None;
        }
        let (c0, ci) = self.envelope(&sector_angles(theta));
        Some(Decay { a, b, delta, c_f: c0.max(ci) })
    }

    /// Growth certificate on `S_theta`.
    pub fn growth_certificate(&self, theta: f64) -> Option<Growth> {
        if self.has_pole() && theta >= std::f64::consts::PI {
            return None;
        }
        let (nu0, nui) = self.orders();
        let k = (-nu0).max(nui).max(f64::EPSILON);
        let (c0, ci) = self.envelope(&sector_angles(theta));
        // |s|^nu <= |s|^k + |s|^-k whenever -k <= nu <= k.
        Some(Growth { k, c_k: c0.max(ci) })
    }
}

/// `z^num / (1+z)^den`, arranged so that large `|z|` neither overflows nor yields `inf/inf`.
fn rational_complex(z: Complex64, num: u32, den: u32) -> Complex64 {
    let w = 1.0 + z;
    let ratio = (z / w).powu(num);
    if den >= num {
        ratio * w.inv().powu(den - num)
    } else {
        ratio * w.powu(num - den)
    }
}

fn rational_derivative(num: u32, den: u32) -> StemFunction {
    // d/ds s^p (1+s)^-q = p s^(p-1) (1+s)^-q - q s^p (1+s)^-(q+1)
    let first = (num > 0).then(|| StemFunction::rational(num - 1, den).scale(num as f64));
    let second = (den > 0).then(|| StemFunction::rational(num, den + 1).scale(-(den as f64)));
    match (first, second) {
        (Some(f), Some(g)) => StemFunction::sum(f, g),
        (Some(f), None) | (None, Some(f)) => f,
        (None, None) => StemFunction::constant(Quaternion::ZERO),
    }
}

/// Arguments sampling the closed sector `|Arg| <= theta` (upper half suffices
/// by the even-odd symmetry of stems).
fn sector_angles(theta: f64) -> Vec<f64> {
    (0..=24).map(|k| theta * k as f64 / 24.0).collect()
}

impl fmt::Display for StemFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.kind {
            Kind::Power(n) => write!(f, "pow({n})"),
            Kind::Regularizer(n) => write!(f, "reg({n})"),
            Kind::Rational { num, den } => write!(f, "rat({num},{den})"),
            Kind::Sum(a, b) => write!(f, "({a}+{b})"),
            Kind::Product(a, b) if matches!(b.kind(), Kind::Scaled(..)) => write!(f, "{a}*({b})"),
            Kind::Product(a, b) => write!(f, "{a}*{b}"),
            Kind::Scaled(c, a) => {
                if c.is_real() {
                    write!(f, "{}*", c.s0)?;
                } else {
                    write!(f, "q({},{},{},{})*", c.s0, c.s1, c.s2, c.s3)?;
                }
                match a.kind() {
                    Kind::Product(..) | Kind::Scaled(..) => write!(f, "({a})"),
                    _ => write!(f, "{a}"),
                }
            }
        }
    }
}

/// Pointwise values of `Df`, `Dbar f` and `Delta f` at a non-real `q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FineValues {
    pub d: Quaternion,
    pub dbar: Quaternion,
    pub delta: Quaternion,
}

/// Closed forms of the Cauchy-Fueter operator, its conjugate and the Laplacian
/// applied to a left slice function, at a point off the real axis.
pub fn pointwise_fine(f: &StemFunction, q: Quaternion) -> Result<FineValues> {
    let p = to_slice(q);
    if p.y == 0.0 {
        return Err(Error::Domain("fine-structure closed forms are singular on the real axis".into()));
    }
    let (x, y, j) = (p.x, p.y, p.j);
    let (_, beta) = f.eval_stem(x, y);
    let (da, db) = f.derivative().eval_stem(x, y);
    let fprime = da + j * db;
    // Cauchy-Riemann: d_y beta = d_x alpha.
    let d = beta * (-2.0 / y);
    let dbar = fprime * 2.0 + beta * (2.0 / y);
    let delta = db * (-2.0 / y) + j * ((da - beta / y) * (2.0 / y));
    Ok(FineValues { d, dbar, delta })
}

/// The regularizer `s^n/(1+s)^(2n)` with the least `n > max(k + 3 alpha - 1, k - 3 beta + 1)`.
pub fn choose_regularizer(f: &StemFunction, alpha: f64, beta: f64, theta: f64) -> Result<StemFunction> {
    let growth = f.growth_certificate(theta).ok_or(Error::MissingGrowth)?;
    StemFunction::regularizer(regularizer_index(growth.k, alpha, beta))
}

/// Least integer strictly above `max(k + 3 alpha - 1, k - 3 beta + 1)`, at least 1.
pub fn regularizer_index(k: f64, alpha: f64, beta: f64) -> u32 {
    let bound = (k + 3.0 * alpha - 1.0).max(k - 3.0 * beta + 1.0);
    ((bound + 1e-9).floor() as i64 + 1).max(1) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reg(n: u32) -> StemFunction {
        StemFunction::regularizer(n).unwrap()
    }

    fn family() -> Vec<StemFunction> {
        vec![
            StemFunction::power(0),
            StemFunction::power(3),
            reg(1),
            reg(2),
            StemFunction::sum(StemFunction::power(1), reg(2)),
            StemFunction::product(StemFunction::power(1), reg(3)).unwrap(),
            reg(2).scale(Quaternion::new(0.5, -1.0, 2.0, 0.25)),
            StemFunction::product(reg(1), reg(2).scale(Quaternion::E2)).unwrap(),
        ]
    }

    #[test]
    fn regularizer_stays_finite_far_out() {
        // (1+z)^12 alone overflows here.
        let (a, b) = reg(6).eval_stem(1e27, 1e27);
        let r = a.s0.hypot(b.s0);
        assert!(r > 0.0 && r.is_finite());
        let want = 2f64.sqrt().powi(-6) * 1e-162;
        assert!((r / want - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eval_examples() {
        let q = Quaternion::ONE + Quaternion::E1;
        assert!(StemFunction::power(2).eval(q).unwrap().abs_diff(Quaternion::E1 * 2.0) < 1e-15);
        assert!((reg(1).eval(Quaternion::ONE).unwrap().s0 - 0.25).abs() < 1e-15);
        assert!(reg(1).eval(Quaternion::real(-1.0)).is_err());
    }

    proptest! {
        #[test]
        fn power_matches_repeated_product(c in prop::array::uniform4(-2.0f64..2.0)) {
            let q = Quaternion::from_array(c);
            let got = StemFunction::power(3).eval(q).unwrap();
            let want = q * q * q;
            prop_assert!(got.abs_diff(want) <= 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(StemFunction::power(3).derivative(), StemFunction::power(2).scale(3.0));
        let d = reg(1).derivative();
        for k in 0..10 {
            let z = Complex64::new(0.3 + 0.4 * k as f64, 0.7 - 0.05 * k as f64);
            let want = (1.0 - z) / (1.0 + z).powu(3);
            let (a, b) = d.eval_stem(z.re, z.im);
            assert!((Complex64::new(a.s0, b.s0) - want).norm() < 1e-14);
            // central difference along x
            let h = 1e-5;
            let (ap, bp) = reg(1).eval_stem(z.re + h, z.im);
            let (am, bm) = reg(1).eval_stem(z.re - h, z.im);
            let fd = Complex64::new((ap.s0 - am.s0) / (2.0 * h), (bp.s0 - bm.s0) / (2.0 * h));
            assert!((fd - want).norm() < 1e-8);
        }
        let s = StemFunction::sum(StemFunction::power(1), StemFunction::power(2)).derivative();
        assert_eq!(s, StemFunction::sum(StemFunction::power(0).scale(1.0), StemFunction::power(1).scale(2.0)));
    }

    #[test]
    fn even_odd_and_cauchy_riemann() {
        let h = 1e-6;
        for f in family() {
            for i in 0..20 {
                for k in 0..20 {
                    let x = -0.9 + 0.19 * i as f64 + 0.013;
                    let y = 0.05 + 0.15 * k as f64;
                    let (a, b) = f.eval_stem(x, y);
                    let (am, bm) = f.eval_stem(x, -y);
                    let scale = 1.0 + a.norm() + b.norm();
                    assert!(a.abs_diff(am) <= 1e-14 * scale);
                    assert!(b.abs_diff(-bm) <= 1e-14 * scale);
                    let (axp, bxp) = f.eval_stem(x + h, y);
                    let (axm, bxm) = f.eval_stem(x - h, y);
                    let (ayp, byp) = f.eval_stem(x, y + h);
                    let (aym, bym) = f.eval_stem(x, y - h);
                    let ax = (axp - axm) / (2.0 * h);
                    let bx = (bxp - bxm) / (2.0 * h);
                    let ay = (ayp - aym) / (2.0 * h);
                    let by = (byp - bym) / (2.0 * h);
                    let s2 = 1.0 + ax.norm() + ay.norm();
                    assert!((ax - by).norm() <= 1e-6 * s2, "{f} at ({x},{y})");
                    assert!((ay + bx).norm() <= 1e-6 * s2, "{f} at ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn intrinsic_values_are_real_and_slice_independent() {
        for f in family().into_iter().filter(|f| f.is_intrinsic()) {
            let (a, b) = f.eval_stem(0.4, 1.3);
            assert!(a.im().norm() == 0.0 && b.im().norm() == 0.0);
            let j1 = Quaternion::E2;
            let j2 = Quaternion::new(0.0, 0.6, 0.0, 0.8);
            let v1 = f.eval(Quaternion::real(0.4) + j1 * 1.3).unwrap();
            let v2 = f.eval(Quaternion::real(0.4) + j2 * 1.3).unwrap();
            assert!((v1.s0 - v2.s0).abs() < 1e-15);
            assert!((v1.im().norm() - v2.im().norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn fine_values_for_low_powers() {
        let q = Quaternion::new(0.3, -0.2, 0.9, 0.4);
        let v = pointwise_fine(&StemFunction::power(1), q).unwrap();
        assert!(v.d.abs_diff(Quaternion::real(-2.0)) < 1e-14);
        assert!(v.dbar.abs_diff(Quaternion::real(4.0)) < 1e-14);
        assert!(v.delta.norm() < 1e-14);
        let v = pointwise_fine(&StemFunction::power(2), q).unwrap();
        assert!(v.delta.abs_diff(Quaternion::real(-4.0)) < 1e-13);
        assert!(pointwise_fine(&StemFunction::power(2), Quaternion::real(2.0)).is_err());
    }

    fn power_sums(q: Quaternion, n: u32) -> FineValues {
        let qb = q.conj();
        let mut d = Quaternion::ZERO;
        let mut delta = Quaternion::ZERO;
        for k in 0..n {
            d += qb.powi(n - 1 - k) * q.powi(k);
        }
        for k in 1..n {
            delta += qb.powi(n - 1 - k) * q.powi(k - 1) * k as f64;
        }
        let dbar = if n == 0 { Quaternion::ZERO } else { q.powi(n - 1) * (2.0 * n as f64) + d * 2.0 };
        FineValues { d: d * -2.0, dbar, delta: delta * -4.0 }
    }

    proptest! {
        #[test]
        fn fine_values_match_power_sums(c in prop::array::uniform4(-1.5f64..1.5), n in 0u32..=8) {
            let q = Quaternion::from_array(c);
            prop_assume!(q.im().norm() > 1e-3);
            let got = pointwise_fine(&StemFunction::power(n), q).unwrap();
            let want = power_sums(q, n);
            let scale = 1.0 + want.d.norm() + want.dbar.norm() + want.delta.norm();
            prop_assert!(got.d.abs_diff(want.d) <= 1e-10 * scale);
            prop_assert!(got.dbar.abs_diff(want.dbar) <= 1e-10 * scale);
            prop_assert!(got.delta.abs_diff(want.delta) <= 1e-10 * scale);
        }

        #[test]
        fn d_plus_dbar_is_twice_derivative(c in prop::array::uniform4(-1.5f64..1.5), pick in 0usize..8) {
            let q = Quaternion::from_array(c);
            prop_assume!(q.im().norm() > 1e-3 && (q + Quaternion::ONE).norm() > 1e-2);
            let f = &family()[pick];
            let v = pointwise_fine(f, q).unwrap();
            let fp = f.derivative().eval(q).unwrap();
            prop_assert!((v.d + v.dbar).abs_diff(fp * 2.0) <= 1e-10 * (1.0 + fp.norm()));
        }
    }

    #[test]
    fn laplacian_of_scaled_cube_keeps_scalar_on_the_right() {
        // Delta(q^3 c) = (-12x - 4 J y) c
        let c = Quaternion::new(0.2, 1.0, -0.5, 0.3);
        let f = StemFunction::power(3).scale(c);
        let q = Quaternion::new(0.7, 0.1, 0.5, -0.6);
        let p = to_slice(q);
        let want = (Quaternion::real(-12.0 * p.x) - p.j * (4.0 * p.y)) * c;
        let got = pointwise_fine(&f, q).unwrap().delta;
        assert!(got.abs_diff(want) < 1e-12);
    }

    #[test]
    fn regularizer_choice() {
        assert_eq!(regularizer_index(1.0, 1.0 / 3.0, 1.0 / 3.0), 2);
        assert_eq!(regularizer_index(0.5, 1.0 / 3.0, 1.0 / 3.0), 1);
        let e = choose_regularizer(&StemFunction::power(3), 1.0 / 3.0, 1.0 / 3.0, 2.0).unwrap();
        assert_eq!(e, reg(4));
        let ef = StemFunction::product(e.clone(), StemFunction::power(3)).unwrap();
        assert!(e.decay_certificate(1.0, 1.0, 2.0).is_some());
        assert!(ef.decay_certificate(1.0, 1.0, 2.0).is_some());
        assert!(StemFunction::product(reg(3), StemFunction::power(3)).unwrap().decay_certificate(1.0, 1.0, 2.0).is_none());
    }

    #[test]
    fn decay_certificate_bounds_hold_on_grid() {
        let theta = 2.5;
        for f in family() {
            let Some(d) = f.decay_certificate(1.0, 1.0, theta) else { continue };
            for i in 0..40 {
                let th = theta * (i as f64 + 0.5) / 40.0;
                for k in 0..50 {
                    let r = 10f64.powf(-5.0 + 10.0 * k as f64 / 49.0);
                    let v = f.eval(Quaternion::real(r * th.cos()) + Quaternion::E3 * (r * th.sin())).unwrap();
                    let bound = if r <= 1.0 { d.c_f * r.powf(d.a - 1.0 + d.delta) } else { d.c_f * r.powf(d.b - 1.0 - d.delta) };
                    assert!(v.norm() <= bound * (1.0 + 1e-12), "{f} at r={r}, th={th}");
                }
            }
        }
    }

    #[test]
    fn product_needs_intrinsic_left_factor() {
        let nonint = reg(1).scale(Quaternion::E1);
        assert!(StemFunction::product(nonint, reg(1)).is_err());
    }
}
