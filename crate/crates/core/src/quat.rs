//! Quaternion arithmetic, slice-plane coordinates and sector membership.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// An element `s0 + s1 e1 + s2 e2 + s3 e3` of the quaternions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const E1: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const E2: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const E3: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(s0: f64, s1: f64, s2: f64, s3: f64) -> Self {
        Quaternion { s0, s1, s2, s3 }
    }

    pub const fn real(x: f64) -> Self {
        Quaternion::new(x, 0.0, 0.0, 0.0)
    }

    /// The basis element `e_i` for `i` in `0..4`, with `e_0 = 1`.
    pub fn unit(i: usize) -> Self {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        Quaternion::from_array(c)
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        Quaternion::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.s0, self.s1, self.s2, self.s3]
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.s0, -self.s1, -self.s2, -self.s3)
    }

    pub fn norm_sqr(self) -> f64 {
        self.s0 * self.s0 + self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn re(self) -> f64 {
        self.s0
    }

    pub fn im(self) -> Self {
        Quaternion::new(0.0, self.s1, self.s2, self.s3)
    }

    pub fn is_real(self) -> bool {
        self.s1 == 0.0 && self.s2 == 0.0 && self.s3 == 0.0
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Self> {
        let n = self.norm_sqr();
        (n > 0.0).then(|| self.conj() * (1.0 / n))
    }

    pub fn powi(self, n: u32) -> Self {
        (0..n).fold(Quaternion::ONE, |acc, _| acc * self)
    }

    /// Real 4x4 matrix of `v -> self * v` in the basis (1, e1, e2, e3), row-major.
    pub fn left_matrix(self) -> [[f64; 4]; 4] {
        let [a, b, c, d] = self.to_array();
        [[a, -b, -c, -d], [b, a, -d, c], [c, d, a, -b], [d, -c, b, a]]
    }

    pub fn abs_diff(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}e1 + {}e2 + {}e3", self.s0, self.s1, self.s2, self.s3)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Quaternion::new(self.s0 + o.s0, self.s1 + o.s1, self.s2 + o.s2, self.s3 + o.s3)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Quaternion::new(self.s0 - o.s0, self.s1 - o.s1, self.s2 - o.s2, self.s3 - o.s3)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Quaternion::new(-self.s0, -self.s1, -self.s2, -self.s3)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let (a0, a1, a2, a3) = (self.s0, self.s1, self.s2, self.s3);
        let (b0, b1, b2, b3) = (o.s0, o.s1, o.s2, o.s3);
        Quaternion::new(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, r: f64) -> Self {
        Quaternion::new(self.s0 * r, self.s1 * r, self.s2 * r, self.s3 * r)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, r: f64) -> Self {
        self * (1.0 / r)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl From<f64> for Quaternion {
    fn from(x: f64) -> Self {
        Quaternion::real(x)
    }
}

/// A point `x + J y` of the complex plane through the unit `J`, with `y >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlicePoint {
    pub x: f64,
    pub y: f64,
    pub j: Quaternion,
    /// Set when the source quaternion was real and `j` is the default `e1`.
    pub degenerate: bool,
}

impl SlicePoint {
    /// Builds `x + j y` for an arbitrary sign of `y`, flipping `j` to keep `y >= 0`.
    pub fn new(x: f64, y: f64, j: Quaternion) -> Self {
        if y < 0.0 {
            SlicePoint { x, y: -y, j: -j, degenerate: false }
        } else {
            SlicePoint { x, y, j, degenerate: y == 0.0 }
        }
    }

    pub fn to_quat(&self) -> Quaternion {
        Quaternion::real(self.x) + self.j * self.y
    }

    /// The conjugate point `x - J y`, written with unit `-J`.
    pub fn conj(&self) -> Self {
        SlicePoint { x: self.x, y: self.y, j: -self.j, degenerate: self.degenerate }
    }

    pub fn modulus(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Argument in `[0, pi]`.
    pub fn arg(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

/// Splits `s` into `Re(s) + J |Im(s)|`; real input gets `J = e1` and the degenerate flag.
pub fn to_slice(s: Quaternion) -> SlicePoint {
    let v = s.im();
    let y = v.norm();
    if y == 0.0 {
        SlicePoint { x: s.s0, y: 0.0, j: Quaternion::E1, degenerate: true }
    } else {
        SlicePoint { x: s.s0, y, j: v / y, degenerate: false }
    }
}

/// Whether `s` lies in the open sector `|Arg(s)| < omega`.
pub fn in_sector(s: Quaternion, omega: f64) -> Result<bool> {
    if s == Quaternion::ZERO {
        return Err(Error::Domain("argument of 0 is undefined".into()));
    }
    Ok(to_slice(s).arg() < omega)
}

/// Normalizes the imaginary part of `j`; fails when `j` has no imaginary part.
pub fn unit_imaginary(j: Quaternion) -> Result<Quaternion> {
    let v = j.im();
    let n = v.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::Domain(format!("{j} has no imaginary direction")));
    }
    Ok(v / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quat() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-10.0f64..10.0).prop_map(Quaternion::from_array)
    }

    fn apply(m: [[f64; 4]; 4], v: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = (0..4).map(|k| m[i][k] * v[k]).sum();
        }
        out
    }

    #[test]
    fn unit_table() {
        let e = [Quaternion::ONE, Quaternion::E1, Quaternion::E2, Quaternion::E3];
        assert_eq!(e[1] * e[2], e[3]);
        assert_eq!(e[2] * e[3], e[1]);
        assert_eq!(e[3] * e[1], e[2]);
        assert_eq!(e[2] * e[1], -e[3]);
        for u in &e[1..] {
            assert_eq!(*u * *u, -Quaternion::ONE);
        }
        for a in e {
            for b in e {
                let p = (a * b).to_array();
                assert_eq!(p.iter().filter(|c| **c != 0.0).count(), 1);
                assert!(p.iter().all(|c| [0.0, 1.0, -1.0].contains(c)));
            }
        }
    }

    #[test]
    fn one_plus_e1_times_conj() {
        let a = Quaternion::ONE + Quaternion::E1;
        assert_eq!(a * (Quaternion::ONE - Quaternion::E1), Quaternion::real(2.0));
    }

    #[test]
    fn slice_examples() {
        let p = to_slice(Quaternion::new(3.0, 0.0, 4.0, 0.0));
        assert_eq!((p.x, p.y, p.j), (3.0, 4.0, Quaternion::E2));
        let p = to_slice(Quaternion::real(5.0));
        assert_eq!((p.x, p.y, p.j, p.degenerate), (5.0, 0.0, Quaternion::E1, true));
        let p = to_slice(Quaternion::new(1.0, 1.0, 1.0, 1.0));
        let r = 3f64.sqrt();
        assert!((p.y - r).abs() < 1e-15);
        assert!(p.j.abs_diff(Quaternion::new(0.0, 1.0 / r, 1.0 / r, 1.0 / r)) < 1e-15);
    }

    #[test]
    fn sector_examples() {
        assert!(in_sector(Quaternion::new(1.0, 1.0, 0.0, 0.0), std::f64::consts::FRAC_PI_2).unwrap());
        assert!(!in_sector(Quaternion::real(-1.0), 3.0 * std::f64::consts::FRAC_PI_4).unwrap());
        assert!(!in_sector(Quaternion::E3, std::f64::consts::FRAC_PI_2).unwrap());
        assert!(in_sector(Quaternion::ZERO, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn product_matches_left_matrix(a in quat(), b in quat()) {
            let want = apply(a.left_matrix(), b.to_array());
            let got = (a * b).to_array();
            for i in 0..4 {
                prop_assert!((want[i] - got[i]).abs() <= 1e-12 * (1.0 + want[i].abs()));
            }
        }

        #[test]
        fn associative_and_multiplicative_norm(a in quat(), b in quat(), c in quat()) {
            let l = (a * b) * c;
            let r = a * (b * c);
            prop_assert!(l.abs_diff(r) <= 1e-12 * (1.0 + l.norm()));
            prop_assert!(((a * b).norm() - a.norm() * b.norm()).abs() <= 1e-12 * (1.0 + a.norm() * b.norm()));
        }

        #[test]
        fn conj_reverses_products(a in quat(), b in quat()) {
            prop_assert!((a * b).conj().abs_diff(b.conj() * a.conj()) <= 1e-12 * (1.0 + a.norm() * b.norm()));
            prop_assert_eq!(a.conj().conj(), a);
            let n = a * a.conj();
            prop_assert!((n.s0 - a.norm_sqr()).abs() <= 1e-12 * (1.0 + a.norm_sqr()));
            prop_assert!(n.im().norm() <= 1e-14 * (1.0 + a.norm_sqr()));
        }

        #[test]
        fn slice_reconstructs(a in quat()) {
            let p = to_slice(a);
            prop_assert!(a.abs_diff(p.to_quat()) <= 1e-14 * a.norm().max(1e-300));
            prop_assert!(p.y >= 0.0);
            prop_assert!((p.j.norm() - 1.0).abs() < 1e-14 && p.j.s0 == 0.0);
        }
    }
}
