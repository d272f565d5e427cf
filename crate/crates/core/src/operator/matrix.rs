//! Square quaternion matrices acting on `H^n` by `(M v)_i = sum_j M_ij v_j`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quat::Quaternion;

#[derive(Clone, Debug, PartialEq)]
pub struct QuatMatrix {
    n: usize,
    data: Vec<Quaternion>,
}

impl QuatMatrix {
    pub fn zeros(n: usize) -> Self {
        QuatMatrix { n, data: vec![Quaternion::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Quaternion::ONE)
    }

    /// `q I`, i.e. left multiplication of every coordinate by `q`.
    pub fn scalar(n: usize, q: Quaternion) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = q;
        }
        m
    }

    pub fn diagonal(qs: &[Quaternion]) -> Self {
        let mut m = Self::zeros(qs.len());
        for (i, q) in qs.iter().enumerate() {
            m[(i, i)] = *q;
        }
        m
    }

    pub fn from_real(r: &DMatrix<f64>) -> Self {
        assert!(r.is_square());
        let n = r.nrows();
        let data = (0..n * n).map(|k| Quaternion::real(r[(k / n, k % n)])).collect();
        QuatMatrix { n, data }
    }

    /// `C0 + e1 C1 + e2 C2 + e3 C3` for real component matrices.
    pub fn from_components(c: [&DMatrix<f64>; 4]) -> Self {
        let n = c[0].nrows();
        let data = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                Quaternion::new(c[0][(i, j)], c[1][(i, j)], c[2][(i, j)], c[3][(i, j)])
            })
            .collect();
        QuatMatrix { n, data }
    }

    /// `A + B J` for real `A`, `B` and a scalar quaternion `J` (which commutes with reals).
    pub fn real_pair(a: &DMatrix<f64>, b: &DMatrix<f64>, j: Quaternion) -> Self {
        let n = a.nrows();
        let data = (0..n * n)
            .map(|k| {
                let (r, c) = (k / n, k % n);
                Quaternion::real(a[(r, c)]) + j * b[(r, c)]
            })
            .collect();
        QuatMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.data
    }

    /// Real matrix of the `i`-th component (`i = 0` is the real part).
    pub fn component(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |r, c| self[(r, c)].to_array()[i])
    }

    /// Entrywise conjugate.
    pub fn conj(&self) -> Self {
        self.map(Quaternion::conj)
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        QuatMatrix { n: self.n, data: self.data.iter().map(|q| f(*q)).collect() }
    }

    /// `q M` as operators: every entry multiplied by `q` from the left.
    pub fn left_scale(&self, q: Quaternion) -> Self {
        self.map(|e| q * e)
    }

    /// `M q` as operators: every entry multiplied by `q` from the right.
    pub fn right_scale(&self, q: Quaternion) -> Self {
        self.map(|e| e * q)
    }

    pub fn scale(&self, r: f64) -> Self {
        self.map(|e| e * r)
    }

    /// Real `4n x 4n` matrix of the action on `H^n = R^(4n)`.
    pub fn embedding(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(4 * n, 4 * n);
        for i in 0..n {
            for j in 0..n {
                let b = self[(i, j)].left_matrix();
                for (r, row) in b.iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        m[(4 * i + r, 4 * j + c)] = *v;
                    }
                }
            }
        }
        m
    }

    /// Inverse of [`embedding`](Self::embedding) for matrices of that block form.
    pub fn from_embedding(m: &DMatrix<f64>) -> Self {
        let n = m.nrows() / 4;
        let data = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                Quaternion::new(m[(4 * i, 4 * j)], m[(4 * i + 1, 4 * j)], m[(4 * i + 2, 4 * j)], m[(4 * i + 3, 4 * j)])
            })
            .collect();
        QuatMatrix { n, data }
    }

    /// Spectral norm of the operator on `H^n`.
    pub fn op_norm(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.embedding().singular_values().max()
    }

    pub fn min_singular_value(&self) -> f64 {
        self.embedding().singular_values().min()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self.embedding().try_inverse().ok_or_else(|| Error::Invalid("singular quaternion matrix".into()))?;
        Ok(Self::from_embedding(&inv))
    }

    pub fn powi(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.n), |acc, _| &acc * self)
    }

    /// `|| self - other ||` in operator norm.
    pub fn dist(&self, other: &Self) -> f64 {
        (self - other).op_norm()
    }

    /// Whether the four real components pairwise commute, relative to their sizes.
    pub fn commutator_residual(&self) -> f64 {
        let c: Vec<_> = (0..4).map(|i| self.component(i)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                let r = (&c[i] * &c[j] - &c[j] * &c[i]).norm();
                worst = worst.max(r / (1.0 + c[i].norm() * c[j].norm()));
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for QuatMatrix {
    type Output = Quaternion;
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QuatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &QuatMatrix {
    type Output = QuatMatrix;
    fn mul(self, o: &QuatMatrix) -> QuatMatrix {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let mut out = QuatMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Quaternion::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * o.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Mul for QuatMatrix {
    type Output = QuatMatrix;
    fn mul(self, o: QuatMatrix) -> QuatMatrix {
        &self * &o
    }
}

impl Mul<&DMatrix<f64>> for &QuatMatrix {
    type Output = QuatMatrix;
    fn mul(self, r: &DMatrix<f64>) -> QuatMatrix {
        self * &QuatMatrix::from_real(r)
    }
}

impl Mul<&QuatMatrix> for &DMatrix<f64> {
    type Output = QuatMatrix;
    fn mul(self, m: &QuatMatrix) -> QuatMatrix {
        &QuatMatrix::from_real(self) * m
    }
}

impl Add for &QuatMatrix {
    type Output = QuatMatrix;
    fn add(self, o: &QuatMatrix) -> QuatMatrix {
        assert_eq!(self.n, o.n);
        let data = self.data.iter().zip(&o.data).map(|(a, b)| *a + *b).collect();
        QuatMatrix { n: self.n, data }
    }
}

impl Sub for &QuatMatrix {
    type Output = QuatMatrix;
    fn sub(self, o: &QuatMatrix) -> QuatMatrix {
        assert_eq!(self.n, o.n);
        let data = self.data.iter().zip(&o.data).map(|(a, b)| *a - *b).collect();
        QuatMatrix { n: self.n, data }
    }
}

impl Add for QuatMatrix {
    type Output = QuatMatrix;
    fn add(self, o: QuatMatrix) -> QuatMatrix {
        &self + &o
    }
}

impl Sub for QuatMatrix {
    type Output = QuatMatrix;
    fn sub(self, o: QuatMatrix) -> QuatMatrix {
        &self - &o
    }
}

impl Neg for &QuatMatrix {
    type Output = QuatMatrix;
    fn neg(self) -> QuatMatrix {
        self.scale(-1.0)
    }
}

impl Neg for QuatMatrix {
    type Output = QuatMatrix;
    fn neg(self) -> QuatMatrix {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qmat(n: usize) -> impl Strategy<Value = QuatMatrix> {
        prop::collection::vec(prop::array::uniform4(-2.0f64..2.0), n * n).prop_map(move |v| {
            let mut m = QuatMatrix::zeros(n);
            for (k, c) in v.into_iter().enumerate() {
                m[(k / n, k % n)] = Quaternion::from_array(c);
            }
            m
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn embedding_is_multiplicative(a in qmat(3), b in qmat(3)) {
            let lhs = (&a * &b).embedding();
            let rhs = a.embedding() * b.embedding();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + a.frobenius() * b.frobenius()));
        }

        #[test]
        fn associative_with_neutral_identity(a in qmat(3), b in qmat(3), c in qmat(3)) {
            let l = &(&a * &b) * &c;
            let r = &a * &(&b * &c);
            prop_assert!((&l - &r).frobenius() <= 1e-12 * (1.0 + l.frobenius()));
            prop_assert_eq!(&a * &QuatMatrix::identity(3), a.clone());
            prop_assert_eq!(&QuatMatrix::identity(3) * &a, a);
        }

        #[test]
        fn norm_is_submultiplicative(a in qmat(2), b in qmat(2)) {
            prop_assert!((&a * &b).op_norm() <= a.op_norm() * b.op_norm() * (1.0 + 1e-12) + 1e-14);
        }

        #[test]
        fn embedding_round_trips(a in qmat(3)) {
            prop_assert_eq!(QuatMatrix::from_embedding(&a.embedding()), a);
        }
    }

    #[test]
    fn inverse_multiplies_back() {
        let mut m = QuatMatrix::identity(2);
        m[(0, 1)] = Quaternion::new(0.3, 1.0, -0.2, 0.5);
        m[(1, 0)] = Quaternion::E3 * 0.7;
        let inv = m.inverse().unwrap();
        assert!((&(&m * &inv) - &QuatMatrix::identity(2)).frobenius() < 1e-14);
    }

    #[test]
    fn scalar_operator_is_left_multiplication() {
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        let v = Quaternion::new(-0.5, 0.25, 1.0, 2.0);
        let mut col = QuatMatrix::zeros(1);
        col[(0, 0)] = v;
        assert_eq!((&QuatMatrix::scalar(1, q) * &col)[(0, 0)], q * v);
    }
}
