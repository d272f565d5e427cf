use nalgebra::DMatrix;

use super::{CommutingOperator, QuatMatrix};
use crate::error::{Error, Result};
use crate::quat::{Quaternion, SlicePoint};

/// `cond_1(R)` above which a point is treated as lying in the F-spectrum.
pub const SPECTRUM_COND_LIMIT: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// Left S-resolvent `S_L^-1(s,T)`.
    SL,
    /// Right S-resolvent `S_R^-1(s,T)`.
    SR,
    /// `Q_{c,s}(T)^-1`.
    Qc,
    P2L,
    P2R,
    FL,
    FR,
}

impl KernelKind {
    pub const ALL: [KernelKind; 7] =
        [KernelKind::SL, KernelKind::SR, KernelKind::Qc, KernelKind::P2L, KernelKind::P2R, KernelKind::FL, KernelKind::FR];

    /// Right kernels reconstruct as `A + J B`, the others as `A + B J`.
    pub fn is_right(self) -> bool {
        matches!(self, KernelKind::SR | KernelKind::P2R | KernelKind::FR)
    }
}

/// `R(x,y) = (x^2+y^2-|T|^2)^2 + 4 (T0 - x)((x^2+y^2) T0 - x |T|^2)`.
pub fn real_pseudo_resolvent(t: &CommutingOperator, x: f64, y: f64) -> DMatrix<f64> {
    let n = t.dim();
    let id = DMatrix::<f64>::identity(n, n);
    let m = t.modulus_sq();
    let t0 = t.component(0);
    let r2 = x * x + y * y;
    let a = &id * r2 - &m;
    let b = t0 - &id * x;
    let c = t0 * r2 - &m * x;
    &a * &a + (&b * &c) * 4.0
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Real parts of `Q_{c,s}^-1 = A1 + B1 J` at `s = x + J y`.
pub(crate) struct QInverseParts {
    pub a1: DMatrix<f64>,
    pub b1: DMatrix<f64>,
}

pub(crate) fn q_inverse_parts(t: &CommutingOperator, x: f64, y: f64) -> Result<QInverseParts> {
    let n = t.dim();
    let r = real_pseudo_resolvent(t, x, y);
    let hit = |cond: f64| Error::SpectrumHit(format!("x={x}, y={y}"), cond);
    let rinv = r.clone().try_inverse().ok_or_else(|| hit(f64::INFINITY))?;
    let cond = norm1(&r) * norm1(&rinv);
    if !(cond <= SPECTRUM_COND_LIMIT) {
        return Err(hit(cond));
    }
    let id = DMatrix::<f64>::identity(n, n);
    let t0 = t.component(0);
    let a0 = &id * (x * x - y * y) - t0 * (2.0 * x) + t.modulus_sq();
    let aj = (&id * x - t0) * (2.0 * y);
    Ok(QInverseParts { a1: &a0 * &rinv, b1: -(&aj * &rinv) })
}

/// `Q_{c,s}(T)^-1 = (s^2 - 2 s T0 + |T|^2)^-1`.
pub fn q_inverse(t: &CommutingOperator, s: &SlicePoint) -> Result<QuatMatrix> {
    let p = q_inverse_parts(t, s.x, s.y)?;
    Ok(QuatMatrix::real_pair(&p.a1, &p.b1, s.j))
}

fn s_left(t: &CommutingOperator, s: Quaternion, qinv: &QuatMatrix) -> QuatMatrix {
    let lhs = &QuatMatrix::scalar(t.dim(), s) - &t.conj().to_quat();
    &lhs * qinv
}

fn s_right(t: &CommutingOperator, s: Quaternion, qinv: &QuatMatrix) -> QuatMatrix {
    let mut out = qinv.left_scale(s);
    for i in 0..4 {
        let term = (t.component(i) * qinv).right_scale(Quaternion::unit(i).conj());
        out = &out - &term;
    }
    out
}

/// Resolvent kernel of the given kind at `s`.
pub fn kernel(kind: KernelKind, t: &CommutingOperator, s: &SlicePoint) -> Result<QuatMatrix> {
    let qinv = q_inverse(t, s)?;
    let sq = s.to_quat();
    Ok(match kind {
        KernelKind::Qc => qinv,
        KernelKind::SL => s_left(t, sq, &qinv),
        KernelKind::SR => s_right(t, sq, &qinv),
        KernelKind::FL => (&s_left(t, sq, &qinv) * &qinv).scale(-4.0),
        KernelKind::FR => (&qinv * &s_right(t, sq, &qinv)).scale(-4.0),
        KernelKind::P2L => {
            let sl = s_left(t, sq, &qinv);
            let slc = s_left(&t.conj(), sq, &qinv);
            (&sl * &(&sl + &slc)).scale(2.0)
        }
        KernelKind::P2R => {
            let sr = s_right(t, sq, &qinv);
            let src = s_right(&t.conj(), sq, &qinv);
            (&(&sr + &src) * &sr).scale(2.0)
        }
    })
}

/// `J`-independent pair `(A, B)` with `K_L(x+Jy) = A + B J` and `K_R(x+Jy) = A + J B`.
pub fn ab_decompose(kind: KernelKind, t: &CommutingOperator, x: f64, y: f64) -> Result<(QuatMatrix, QuatMatrix)> {
    let n = t.dim();
    let p = q_inverse_parts(t, x, y)?;
    let a1 = QuatMatrix::from_real(&p.a1);
    let b1 = QuatMatrix::from_real(&p.b1);
    if kind == KernelKind::Qc {
        return Ok((a1, b1));
    }
    let x_minus_tbar = &QuatMatrix::scalar(n, Quaternion::real(x)) - &t.conj().to_quat();
    let a2 = &(&x_minus_tbar * &a1) - &b1.scale(y);
    let b2 = &a1.scale(y) + &(&x_minus_tbar * &b1);
    if matches!(kind, KernelKind::SL | KernelKind::SR) {
        return Ok((a2, b2));
    }
    let a3 = (&(&a2 * &a1) - &(&b2 * &b1)).scale(-4.0);
    let b3 = (&(&a2 * &b1) + &(&b2 * &a1)).scale(-4.0);
    if matches!(kind, KernelKind::FL | KernelKind::FR) {
        return Ok((a3, b3));
    }
    let t0_minus_x = QuatMatrix::from_real(&(t.component(0) - DMatrix::identity(n, n) * x));
    let a4 = &(&t0_minus_x * &a3) + &b3.scale(y);
    let b4 = &(&t0_minus_x * &b3) - &a3.scale(y);
    Ok((a4, b4))
}
