//! Operators `T = T0 + e1 T1 + e2 T2 + e3 T3` on `H^n` with commuting real
//! components, their resolvent kernels, spectrum tests and text I/O.

mod generate;
mod io;
mod kernels;
mod matrix;
mod profile;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quat::Quaternion;

pub use generate::{generate_operator, generate_with_basis, generate_with_eigenvalues, sample_eigenvalues, GeneratorSpec};
pub use io::{format_operator, parse_operator};
pub use kernels::{ab_decompose, kernel, q_inverse, real_pseudo_resolvent, KernelKind, SPECTRUM_COND_LIMIT};
pub use matrix::QuatMatrix;
pub use profile::{estimate_type_profile, estimate_type_profile_with, f_spectrum_check, kernel_scaling_ratio, TypeProfile};

/// Relative commutator tolerance accepted at construction.
const COMMUTE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct CommutingOperator {
    comps: [DMatrix<f64>; 4],
}

impl CommutingOperator {
    /// Builds `T` from its components, checking shapes and pairwise commutation.
    pub fn new(comps: [DMatrix<f64>; 4]) -> Result<Self> {
        let n = comps[0].nrows();
        if comps.iter().any(|c| c.nrows() != n || c.ncols() != n) {
            return Err(Error::Invalid("component matrices must be square of equal size".into()));
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let r = (&comps[i] * &comps[j] - &comps[j] * &comps[i]).norm();
                if r > COMMUTE_TOL * (comps[i].norm() * comps[j].norm()).max(1.0) {
                    return Err(Error::Invalid(format!("components T{i} and T{j} do not commute ({r:.3e})")));
                }
            }
        }
        Ok(CommutingOperator { comps })
    }

    /// Left multiplication by `q_k` on coordinate `k`.
    pub fn from_diagonal(qs: &[Quaternion]) -> Self {
        let comps = std::array::from_fn(|i| {
            DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(qs.len(), qs.iter().map(|q| q.to_array()[i])))
        });
        CommutingOperator { comps }
    }

    /// Real operator `T0` with vanishing imaginary components.
    pub fn from_real(t0: DMatrix<f64>) -> Self {
        let n = t0.nrows();
        CommutingOperator { comps: [t0, DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)] }
    }

    pub fn dim(&self) -> usize {
        self.comps[0].nrows()
    }

    pub fn component(&self, i: usize) -> &DMatrix<f64> {
        &self.comps[i]
    }

    pub fn components(&self) -> &[DMatrix<f64>; 4] {
        &self.comps
    }

    /// `T0 - e1 T1 - e2 T2 - e3 T3`.
    pub fn conj(&self) -> Self {
        let [t0, t1, t2, t3] = &self.comps;
        CommutingOperator { comps: [t0.clone(), -t1, -t2, -t3] }
    }

    /// `|T|^2 = T0^2 + T1^2 + T2^2 + T3^2`.
    pub fn modulus_sq(&self) -> DMatrix<f64> {
        self.comps.iter().map(|c| c * c).fold(DMatrix::zeros(self.dim(), self.dim()), |a, b| a + b)
    }

    pub fn to_quat(&self) -> QuatMatrix {
        QuatMatrix::from_components([&self.comps[0], &self.comps[1], &self.comps[2], &self.comps[3]])
    }

    pub fn norm(&self) -> f64 {
        self.to_quat().op_norm()
    }

    /// Injective iff the smallest singular value of the real embedding exceeds
    /// `rel_tol * ||T||`.
    pub fn is_injective(&self, rel_tol: f64) -> (bool, f64) {
        let sv = self.to_quat().embedding().singular_values();
        let (lo, hi) = (sv.min(), sv.max());
        (hi > 0.0 && lo > rel_tol * hi, lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_diag() -> Vec<Quaternion> {
        vec![Quaternion::new(1.0, 0.3, -0.2, 0.1), Quaternion::new(0.5, 0.0, 0.4, 0.0), Quaternion::new(2.0, -0.1, 0.0, 0.7)]
    }

    #[test]
    fn conj_examples() {
        let t = CommutingOperator::from_real(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -1.0]));
        assert_eq!(t.conj(), t);
        let t = CommutingOperator::from_diagonal(&sample_diag());
        assert_eq!(t.conj().conj(), t);
        let tb = t.conj().to_quat();
        for (k, q) in sample_diag().iter().enumerate() {
            assert_eq!(tb[(k, k)], q.conj());
        }
    }

    #[test]
    fn modulus_examples() {
        let n = 3;
        let t =
            CommutingOperator::new([DMatrix::identity(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)]).unwrap();
        assert_eq!(t.modulus_sq(), DMatrix::identity(n, n));
        let t = CommutingOperator::from_diagonal(&sample_diag());
        let m = t.modulus_sq();
        for (k, q) in sample_diag().iter().enumerate() {
            assert!((m[(k, k)] - q.norm_sqr()).abs() < 1e-15);
        }
    }

    #[test]
    fn modulus_equals_conj_composed_with_t() {
        let t = generate_operator(&GeneratorSpec { dim: 5, r_min: 0.5, r_max: 2.0, omega: 1.0, seed: 3 }).unwrap();
        let composed = &t.conj().to_quat() * &t.to_quat();
        let m = QuatMatrix::from_real(&t.modulus_sq());
        assert!((&composed - &m).op_norm() <= 1e-10);
    }

    #[test]
    fn rejects_non_commuting_components() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        assert!(CommutingOperator::new([DMatrix::identity(2, 2), a, b, DMatrix::zeros(2, 2)]).is_err());
    }

    #[test]
    fn action_matches_component_sum() {
        let t = generate_operator(&GeneratorSpec { dim: 3, r_min: 0.5, r_max: 2.0, omega: 1.0, seed: 11 }).unwrap();
        let v: Vec<Quaternion> = (0..3).map(|k| Quaternion::new(k as f64, 1.0, -0.5 * k as f64, 0.25)).collect();
        let tq = t.to_quat();
        for i in 0..3 {
            let mut direct = Quaternion::ZERO;
            let mut by_parts = Quaternion::ZERO;
            for j in 0..3 {
                direct += tq[(i, j)] * v[j];
                for c in 0..4 {
                    by_parts += Quaternion::unit(c) * (v[j] * t.component(c)[(i, j)]);
                }
            }
            assert!(direct.abs_diff(by_parts) < 1e-13);
        }
    }
}
