//! H-infinity extension: `f` is regularized by `e(s) = s^n/(1+s)^(2n)` so that
//! `ef` decays, and the product rules are solved for the calculus of `f`.

use rayon::prelude::*;

use super::{calc, CalcKind, CalcOptions, CalculusResult, Diagnostics, Regime};
use crate::error::{Error, Result};
use crate::operator::{CommutingOperator, QuatMatrix, TypeProfile};
use crate::slice::{regularizer_index, StemFunction};

/// Relative threshold on the smallest singular value for `T` and `T̄`.
const INJECTIVE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    T,
    TBar,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Fun {
    E,
    EF,
}

type Job = (CalcKind, Op, Fun);

fn jobs(kind: CalcKind) -> Vec<Job> {
    use CalcKind::*;
    use Fun::*;
    use Op::*;
    match kind {
        S => vec![(S, T, E), (S, T, EF)],
        Q => vec![(S, T, E), (S, TBar, E), (Q, T, E), (S, T, EF), (Q, T, EF)],
        P2 => vec![(S, T, E), (S, TBar, E), (Q, T, E), (P2, T, E), (S, T, EF), (S, TBar, EF), (P2, T, EF)],
        F => vec![(S, T, E), (S, TBar, E), (Q, T, E), (F, T, E), (S, T, EF), (Q, T, EF), (F, T, EF)],
    }
}

/// Solves `P X = B` through the real embedding; returns `X` and `||P X - B|| / ||B||`.
fn solve(p: &QuatMatrix, b: &QuatMatrix) -> Result<(QuatMatrix, f64)> {
    let x = &p.inverse()? * b;
    let residual = (&(p * &x) - b).op_norm() / b.op_norm().max(f64::MIN_POSITIVE);
    Ok((x, residual))
}

/// `f(T)`, `Df(T)`, `Dbar f(T)` or `Delta f(T)` for `f` of polynomial growth at 0 and infinity.
pub fn hinf(kind: CalcKind, t: &CommutingOperator, f: &StemFunction, profile: &TypeProfile, opts: &CalcOptions) -> Result<CalculusResult> {
    let tbar = t.conj();
    for op in [t, &tbar] {
        let (ok, sv) = op.is_injective(INJECTIVE_TOL);
        if !ok {
            return Err(Error::NotInjective(sv));
        }
    }
    let theta = opts.theta(profile);
    let n = match opts.regularizer {
        Some(n) => n,
        None => {
            let growth = f.growth_certificate(theta).ok_or(Error::MissingGrowth)?;
            regularizer_index(growth.k, profile.alpha, profile.beta)
        }
    };
    let e = StemFunction::regularizer(n)?;
    let ef = StemFunction::product(e.clone(), f.clone())?;
    let inner = CalcOptions { tol: opts.inner_tol, rel_tol: opts.inner_rel_tol, ..opts.clone() };

    let list = jobs(kind);
    let results: Vec<CalculusResult> = list
        .par_iter()
        .map(|&(k, op, fun)| {
            let op = if op == Op::T { t } else { &tbar };
            let g = if fun == Fun::E { &e } else { &ef };
            calc(k, op, g, profile, &inner)
        })
        .collect::<Result<_>>()?;
    let get = |job: Job| -> &QuatMatrix {
        let i = list.iter().position(|j| *j == job).expect("job scheduled");
        &results[i].value
    };
    let estimate = results.iter().map(|r| r.diagnostics.estimate).sum();
    let panels = results.iter().map(|r| r.diagnostics.panels).sum();

    use CalcKind as K;
    let e_t = get((K::S, Op::T, Fun::E));
    let ef_t = get((K::S, Op::T, Fun::EF));
    let (prefactor, bracket) = match kind {
        K::S => (e_t.clone(), ef_t.clone()),
        K::Q => {
            let e_bar = get((K::S, Op::TBar, Fun::E));
            let de = get((K::Q, Op::T, Fun::E));
            let d_ef = get((K::Q, Op::T, Fun::EF));
            (e_t * e_bar, &(e_t * d_ef) - &(de * ef_t))
        }
        K::P2 => {
            let e_bar = get((K::S, Op::TBar, Fun::E));
            let de = get((K::Q, Op::T, Fun::E));
            let dbar_e = get((K::P2, Op::T, Fun::E));
            let ef_bar = get((K::S, Op::TBar, Fun::EF));
            let dbar_ef = get((K::P2, Op::T, Fun::EF));
            let e_ebar = e_t * e_bar;
            let b = &(&(&(&e_ebar * dbar_ef) - &(&(e_bar * dbar_e) * ef_t)) + &(&(e_t * de) * ef_bar)) - &(&(e_bar * de) * ef_t);
            (&(e_t * e_t) * e_bar, b)
        }
        K::F => {
            let e_bar = get((K::S, Op::TBar, Fun::E));
            let de = get((K::Q, Op::T, Fun::E));
            let lap_e = get((K::F, Op::T, Fun::E));
            let d_ef = get((K::Q, Op::T, Fun::EF));
            let lap_ef = get((K::F, Op::T, Fun::EF));
            let e_ebar = e_t * e_bar;
            let b = &(&(&(&e_ebar * lap_ef) - &(&(e_bar * lap_e) * ef_t)) + &(&(e_t * de) * d_ef)) - &(&(de * de) * ef_t);
            (&(e_t * e_t) * e_bar, b)
        }
    };
    let (value, residual) = solve(&prefactor, &bracket)?;
    Ok(CalculusResult {
        value,
        kind,
        regime: Regime::HInfinity,
        diagnostics: Diagnostics { estimate, panels, regularizer: Some(n), bracket_residual: Some(residual) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{generate_operator, GeneratorSpec};
    use crate::quat::Quaternion;
    use std::f64::consts::FRAC_PI_4;

    fn setup() -> (CommutingOperator, TypeProfile) {
        let t = generate_operator(&GeneratorSpec { dim: 3, r_min: 0.5, r_max: 2.0, omega: FRAC_PI_4, seed: 21 }).unwrap();
        (t, TypeProfile::assumed(1.0 / 3.0, 1.0 / 3.0, FRAC_PI_4))
    }

    #[test]
    fn powers_of_degree_one() {
        let (t, p) = setup();
        let opts = CalcOptions::default();
        let id = QuatMatrix::identity(t.dim());
        let s = hinf(CalcKind::S, &t, &StemFunction::power(1), &p, &opts).unwrap();
        assert_eq!(s.diagnostics.regularizer, Some(2));
        assert!(s.value.dist(&t.to_quat()) <= 1e-7);
        let q = hinf(CalcKind::Q, &t, &StemFunction::power(1), &p, &opts).unwrap().value;
        assert!(q.dist(&id.scale(-2.0)) <= 1e-7, "{}", q.dist(&id.scale(-2.0)));
        let p2 = hinf(CalcKind::P2, &t, &StemFunction::power(1), &p, &opts).unwrap().value;
        assert!(p2.dist(&id.scale(4.0)) <= 1e-7);
        let lap = hinf(CalcKind::F, &t, &StemFunction::power(1), &p, &opts).unwrap().value;
        assert!(lap.op_norm() <= 1e-7);
    }

    #[test]
    fn cube_reproduces_operator_power() {
        let (t, p) = setup();
        let r = hinf(CalcKind::S, &t, &StemFunction::power(3), &p, &CalcOptions::default()).unwrap();
        assert!(r.value.dist(&t.to_quat().powi(3)) <= 1e-7);
        assert!(r.diagnostics.bracket_residual.unwrap() <= 1e-8);
    }

    #[test]
    fn regularizer_index_does_not_matter() {
        let (t, p) = setup();
        let f = StemFunction::power(2).scale(Quaternion::new(0.5, 0.0, 1.0, 0.0));
        for kind in CalcKind::ALL {
            let a = hinf(kind, &t, &f, &p, &CalcOptions { regularizer: Some(3), ..Default::default() }).unwrap();
            let b = hinf(kind, &t, &f, &p, &CalcOptions { regularizer: Some(4), ..Default::default() }).unwrap();
            assert!(a.value.dist(&b.value) <= 1e-6, "{kind:?}");
        }
    }

    #[test]
    fn decaying_function_agrees_with_direct_calculus() {
        let (t, p) = setup();
        let f = StemFunction::regularizer(2).unwrap();
        for kind in CalcKind::ALL {
            let h = hinf(kind, &t, &f, &p, &CalcOptions::default()).unwrap().value;
            let d = calc(kind, &t, &f, &p, &CalcOptions::default()).unwrap().value;
            assert!(h.dist(&d) <= 1e-6, "{kind:?}");
        }
    }

    #[test]
    fn rejects_non_injective_operator() {
        let t = CommutingOperator::from_diagonal(&[Quaternion::ONE, Quaternion::ZERO]);
        let p = TypeProfile::assumed(1.0 / 3.0, 1.0 / 3.0, FRAC_PI_4);
        let r = hinf(CalcKind::S, &t, &StemFunction::power(1), &p, &CalcOptions::default());
        assert!(matches!(r, Err(Error::NotInjective(_))));
    }
}
