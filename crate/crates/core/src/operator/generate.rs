//! Seeded test operators with known eigenspheres.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::CommutingOperator;
use crate::error::{Error, Result};
use crate::quat::Quaternion;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub dim: usize,
    pub r_min: f64,
    pub r_max: f64,
    /// Eigenvalues satisfy `|Arg| < omega`.
    pub omega: f64,
    pub seed: u64,
}

/// Eigenvalues `q_k` with `r_min <= |q_k| <= r_max` and `|Arg q_k| < omega`.
pub fn sample_eigenvalues(spec: &GeneratorSpec, rng: &mut impl Rng) -> Vec<Quaternion> {
    (0..spec.dim)
        .map(|_| {
            let r = spec.r_min + (spec.r_max - spec.r_min) * rng.random::<f64>();
            let arg = spec.omega * rng.random::<f64>();
            let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            let j = Quaternion::new(0.0, v[0] / len, v[1] / len, v[2] / len);
            Quaternion::real(r * arg.cos()) + j * (r * arg.sin())
        })
        .collect()
}

fn random_orthogonal(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix column signs so the factor is Haar distributed and deterministic.
    let signs = DMatrix::from_diagonal(&r.diagonal().map(|d| if d < 0.0 { -1.0 } else { 1.0 }));
    q * signs
}

/// Builds `T_i = O diag(q_k,i) O^T` for a random orthogonal `O`, so the
/// F-spectrum is the union of the spheres `[q_k]`. Returns `T`, the `q_k` and `O`.
pub fn generate_with_basis(spec: &GeneratorSpec) -> Result<(CommutingOperator, Vec<Quaternion>, DMatrix<f64>)> {
    if spec.dim == 0 {
        return Err(Error::Invalid("dimension must be positive".into()));
    }
    if !(spec.omega > 0.0 && spec.omega < std::f64::consts::PI) {
        return Err(Error::Invalid(format!("sector angle {} outside (0, pi)", spec.omega)));
    }
    if !(spec.r_min > 0.0 && spec.r_min <= spec.r_max && spec.r_max.is_finite()) {
        return Err(Error::Invalid(format!("annulus [{}, {}] is infeasible", spec.r_min, spec.r_max)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let qs = sample_eigenvalues(spec, &mut rng);
    let o = random_orthogonal(spec.dim, &mut rng);
    let comps = std::array::from_fn(|i| {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(spec.dim, qs.iter().map(|q| q.to_array()[i])));
        &o * d * o.transpose()
    });
    Ok((CommutingOperator::new(comps)?, qs, o))
}

pub fn generate_with_eigenvalues(spec: &GeneratorSpec) -> Result<(CommutingOperator, Vec<Quaternion>)> {
    generate_with_basis(spec).map(|(t, qs, _)| (t, qs))
}

pub fn generate_operator(spec: &GeneratorSpec) -> Result<CommutingOperator> {
    generate_with_eigenvalues(spec).map(|(t, _)| t)
}
