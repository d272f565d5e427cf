//! Residuals of the algebraic identities satisfied by the kernels and the calculi.
//! Each record carries a tag naming the identity; residuals are operator norms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{calc, hinf, CalcKind, CalcOptions, Regime};
use crate::error::{Error, Result};
use crate::operator::{kernel, CommutingOperator, KernelKind, QuatMatrix, TypeProfile};
use crate::quat::{to_slice, unit_imaginary, Quaternion};
use crate::slice::{pointwise_fine, StemFunction};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub tag: String,
    pub residual: f64,
}

impl CheckRecord {
    fn new(tag: impl Into<String>, a: &QuatMatrix, b: &QuatMatrix) -> Self {
        CheckRecord { tag: tag.into(), residual: a.dist(b) }
    }
}

fn at(kind: KernelKind, t: &CommutingOperator, s: Quaternion) -> Result<QuatMatrix> {
    kernel(kind, t, &to_slice(s))
}

/// `(X p - Y p - s̄ X + s̄ Y)(p^2 - 2 s0 p + |s|^2)^-1`.
fn bracket(x: &QuatMatrix, y: &QuatMatrix, s: Quaternion, p: Quaternion) -> Result<QuatMatrix> {
    let q = p * p - p * (2.0 * s.re()) + Quaternion::real(s.norm_sqr());
    let q_inv = q.inv().ok_or_else(|| Error::Domain(format!("{s} and {p} lie on the same sphere")))?;
    let sb = s.conj();
    let m = &(&(&x.right_scale(p) - &y.right_scale(p)) - &x.left_scale(sb)) + &y.left_scale(sb);
    Ok(m.right_scale(q_inv))
}

/// The S, Q, P2 and F resolvent identities at `s, p` in the F-resolvent set with `s` off the sphere of `p`.
pub fn resolvent_identities(t: &CommutingOperator, s: Quaternion, p: Quaternion) -> Result<Vec<CheckRecord>> {
    let tb = t.conj();
    let sr_s = at(KernelKind::SR, t, s)?;
    let sr_s_bar = at(KernelKind::SR, &tb, s)?;
    let sl_p = at(KernelKind::SL, t, p)?;
    let sl_p_bar = at(KernelKind::SL, &tb, p)?;
    let q_s = at(KernelKind::Qc, t, s)?;
    let q_p = at(KernelKind::Qc, t, p)?;
    let p2r_s = at(KernelKind::P2R, t, s)?;
    let p2l_p = at(KernelKind::P2L, t, p)?;
    let fr_s = at(KernelKind::FR, t, s)?;
    let fl_p = at(KernelKind::FL, t, p)?;

    let s_lhs = bracket(&sr_s, &sl_p, s, p)?;
    let q_lhs = bracket(&q_s, &q_p, s, p)?;
    let q_rhs_a = &(&q_s * &sl_p) + &(&sr_s_bar * &q_p);
    let q_rhs_b = &(&q_s * &sl_p_bar) + &(&sr_s * &q_p);
    let p_lhs = bracket(&p2r_s, &p2l_p, s, p)?;
    let p_rhs = &(&(&p2r_s * &sl_p) + &(&sr_s * &p2l_p)) - &(&q_s * &(&sl_p - &sl_p_bar)).scale(2.0);
    let f_lhs = bracket(&fr_s, &fl_p, s, p)?;
    let f_rhs = &(&(&fr_s * &sl_p) + &(&sr_s * &fl_p)) - &(&q_s * &q_p).scale(4.0);
    Ok(vec![
        CheckRecord::new("resolvent_S", &s_lhs, &(&sr_s * &sl_p)),
        CheckRecord::new("resolvent_Q_a", &q_lhs, &q_rhs_a),
        CheckRecord::new("resolvent_Q_b", &q_lhs, &q_rhs_b),
        CheckRecord::new("resolvent_P2", &p_lhs, &p_rhs),
        CheckRecord::new("resolvent_F", &f_lhs, &f_rhs),
    ])
}

/// `count` seeded pairs `(s, p)` with Gaussian components of scale 1.5, each in
/// the F-resolvent set and with `s` at distance above `1e-3` from the sphere of `p`.
pub fn sample_resolvent_pairs(t: &CommutingOperator, count: usize, seed: u64) -> Vec<(Quaternion, Quaternion)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut draw = || Quaternion::from_array(std::array::from_fn(|_| 1.5 * rng.sample::<f64, _>(StandardNormal)));
        let (s, p) = (draw(), draw());
        let same_sphere = (s.re() - p.re()).abs() < 1e-3 && (s.im().norm() - p.im().norm()).abs() < 1e-3;
        let resolvent = [s, p].iter().all(|q| at(KernelKind::Qc, t, *q).is_ok());
        if !same_sphere && resolvent {
            out.push((s, p));
        }
    }
    out
}

/// Evaluates a batch of calculi concurrently, in the requested regime.
fn batch(
    jobs: &[(CalcKind, &CommutingOperator, &StemFunction)],
    profile: &TypeProfile,
    opts: &CalcOptions,
    regime: Regime,
) -> Result<Vec<QuatMatrix>> {
    jobs.par_iter()
        .map(|&(k, t, f)| {
            let r = match regime {
                Regime::Decaying => calc(k, t, f, profile, opts)?,
                Regime::HInfinity => hinf(k, t, f, profile, opts)?,
            };
            Ok(r.value)
        })
        .collect()
}

fn regime_prefix(regime: Regime) -> &'static str {
    match regime {
        Regime::Decaying => "",
        Regime::HInfinity => "hinf_",
    }
}

/// Product rules for intrinsic `g` and left slice `f`.
pub fn product_rules(
    t: &CommutingOperator,
    g: &StemFunction,
    f: &StemFunction,
    profile: &TypeProfile,
    opts: &CalcOptions,
    regime: Regime,
) -> Result<Vec<CheckRecord>> {
    use CalcKind::*;
    let gf = StemFunction::product(g.clone(), f.clone())?;
    let tb = t.conj();
    let v = batch(
        &[
            (S, t, g),
            (S, &tb, g),
            (S, t, f),
            (S, &tb, f),
            (S, t, &gf),
            (Q, t, g),
            (Q, t, f),
            (Q, t, &gf),
            (P2, t, g),
            (P2, t, f),
            (P2, t, &gf),
            (F, t, g),
            (F, t, f),
            (F, t, &gf),
        ],
        profile,
        opts,
        regime,
    )?;
    let [g_t, g_tb, f_t, f_tb, gf_t, dg, df, dgf, pg, pf, pgf, lg, lf, lgf] = <[QuatMatrix; 14]>::try_from(v).expect("14 results");
    let pre = regime_prefix(regime);
    Ok(vec![
        CheckRecord::new(format!("{pre}product_S"), &gf_t, &(&g_t * &f_t)),
        CheckRecord::new(format!("{pre}product_Q_a"), &dgf, &(&(&dg * &f_t) + &(&g_tb * &df))),
        CheckRecord::new(format!("{pre}product_Q_b"), &dgf, &(&(&dg * &f_tb) + &(&g_t * &df))),
        CheckRecord::new(format!("{pre}product_P2"), &pgf, &(&(&(&pg * &f_t) + &(&g_t * &pf)) + &(&dg * &(&f_t - &f_tb)))),
        CheckRecord::new(format!("{pre}product_F"), &lgf, &(&(&(&lg * &f_t) + &(&g_t * &lf)) - &(&dg * &df))),
    ])
}

/// The four power recurrences for `s^n f`, `n = 1..=n_max`, in the decaying regime.
pub fn power_recurrence_check(
    t: &CommutingOperator,
    f: &StemFunction,
    n_max: u32,
    profile: &TypeProfile,
    opts: &CalcOptions,
) -> Result<Vec<CheckRecord>> {
    use CalcKind::*;
    let tb = t.conj();
    let funcs: Vec<StemFunction> = (0..=n_max).map(|n| f.times_power(n)).collect();
    let mut jobs = vec![(S, &tb, f)];
    for g in &funcs {
        jobs.extend([(S, t, g), (Q, t, g), (P2, t, g), (F, t, g)]);
    }
    let v = batch(&jobs, profile, opts, Regime::Decaying)?;
    let f_tb = &v[0];
    let row = |n: u32, k: usize| &v[1 + 4 * n as usize + k];
    let (tq, tbq) = (t.to_quat(), tb.to_quat());
    let f_t = row(0, 0);
    let mut out = Vec::new();
    for n in 1..=n_max {
        let tp = tq.powi(n - 1);
        let tbp = tbq.powi(n - 1);
        let t_f = &tp * f_t;
        let tb_f = &tbp * f_tb;
        out.push(CheckRecord::new(format!("recurrence_S_n{n}"), row(n, 0), &(&tq * row(n - 1, 0))));
        out.push(CheckRecord::new(format!("recurrence_Q_a_n{n}"), row(n, 1), &(&(&tq * row(n - 1, 1)) - &tb_f.scale(2.0))));
        out.push(CheckRecord::new(format!("recurrence_Q_b_n{n}"), row(n, 1), &(&(&tbq * row(n - 1, 1)) - &t_f.scale(2.0))));
        out.push(CheckRecord::new(
            format!("recurrence_P2_n{n}"),
            row(n, 2),
            &(&(&(&tq * row(n - 1, 2)) + &tb_f.scale(2.0)) + &t_f.scale(2.0)),
        ));
        out.push(CheckRecord::new(format!("recurrence_F_n{n}"), row(n, 3), &(&(&tq * row(n - 1, 3)) + &row(n - 1, 1).scale(2.0))));
    }
    Ok(out)
}

/// `2 f'(T) = Df(T) + Dbar f(T)`.
pub fn derivative_relation(t: &CommutingOperator, f: &StemFunction, profile: &TypeProfile, opts: &CalcOptions) -> Result<CheckRecord> {
    let fp = f.derivative();
    let v = batch(&[(CalcKind::S, t, &fp), (CalcKind::Q, t, f), (CalcKind::P2, t, f)], profile, opts, Regime::Decaying)?;
    Ok(CheckRecord::new("derivative_relation", &v[0].scale(2.0), &(&v[1] + &v[2])))
}

/// H-infinity calculi of `s^n` against the operator power sums, plus regularizer
/// independence (index `m` versus `m + 1`).
pub fn hinf_powers(t: &CommutingOperator, n: u32, profile: &TypeProfile, opts: &CalcOptions) -> Result<Vec<CheckRecord>> {
    let f = StemFunction::power(n);
    let (tq, tbq) = (t.to_quat(), t.conj().to_quat());
    let dim = t.dim();
    let mixed = |a: u32, b: u32| &tbq.powi(a) * &tq.powi(b);
    let mut sum_d = QuatMatrix::zeros(dim);
    let mut sum_lap = QuatMatrix::zeros(dim);
    for k in 0..n {
        sum_d = &sum_d + &mixed(n - 1 - k, k);
        if k >= 1 {
            sum_lap = &sum_lap + &mixed(n - 1 - k, k - 1).scale(k as f64);
        }
    }
    let dbar_want = if n == 0 { QuatMatrix::zeros(dim) } else { &tq.powi(n - 1).scale(2.0 * n as f64) + &sum_d.scale(2.0) };
    let wants = [tq.powi(n), sum_d.scale(-2.0), dbar_want, sum_lap.scale(-4.0)];
    let first = hinf(CalcKind::S, t, &f, profile, opts)?.diagnostics.regularizer.expect("hinf records its regularizer");
    let alt = CalcOptions { regularizer: Some(first + 1), ..opts.clone() };
    let per_kind: Vec<Result<Vec<CheckRecord>>> = CalcKind::ALL
        .par_iter()
        .zip(wants.par_iter())
        .map(|(&kind, want)| {
            let a = hinf(kind, t, &f, profile, opts)?;
            let b = hinf(kind, t, &f, profile, &alt)?;
            Ok(vec![
                CheckRecord::new(format!("hinf_power_{}_n{n}", kind.name()), &a.value, want),
                CheckRecord::new(format!("regularizer_independence_{}_n{n}", kind.name()), &a.value, &b.value),
            ])
        })
        .collect();
    let mut out = Vec::new();
    for r in per_kind {
        out.extend(r?);
    }
    Ok(out)
}

/// Largest deviation of each calculus over all pairs of contour angles and
/// imaginary units, measured against the first pair.
pub fn contour_independence(
    t: &CommutingOperator,
    f: &StemFunction,
    profile: &TypeProfile,
    opts: &CalcOptions,
    angles: &[f64],
    units: &[Quaternion],
) -> Result<Vec<CheckRecord>> {
    let mut variants = Vec::new();
    for &phi in angles {
        for &j in units {
            variants.push(CalcOptions { phi: Some(phi), j: unit_imaginary(j)?, ..opts.clone() });
        }
    }
    if variants.is_empty() {
        return Err(Error::Invalid("no contour variants requested".into()));
    }
    CalcKind::ALL
        .par_iter()
        .map(|&kind| {
            let values = variants.iter().map(|o| Ok(calc(kind, t, f, profile, o)?.value)).collect::<Result<Vec<_>>>()?;
            let residual = values.iter().map(|v| v.dist(&values[0])).fold(0.0, f64::max);
            Ok(CheckRecord { tag: format!("contour_independence_{}", kind.name()), residual })
        })
        .collect()
}

/// The default variants: `phi` at `omega + 0.2` and `theta - 0.2`, `J` at `e1` and `(e1 + e2)/sqrt 2`.
pub fn default_variants(profile: &TypeProfile, opts: &CalcOptions) -> (Vec<f64>, Vec<Quaternion>) {
    let theta = opts.theta(profile);
    let j2 = Quaternion::new(0.0, 1.0, 1.0, 0.0) * std::f64::consts::FRAC_1_SQRT_2;
    (vec![profile.omega + 0.2, theta - 0.2], vec![Quaternion::E1, j2])
}

/// Calculi on the diagonal operator with entries `qs` against the pointwise closed forms.
pub fn diagonal_oracle(qs: &[Quaternion], f: &StemFunction, profile: &TypeProfile, opts: &CalcOptions) -> Result<Vec<CheckRecord>> {
    let t = CommutingOperator::from_diagonal(qs);
    let mut wants: [Vec<Quaternion>; 4] = Default::default();
    for &q in qs {
        let fine = pointwise_fine(f, q)?;
        wants[0].push(f.eval(q)?);
        wants[1].push(fine.d);
        wants[2].push(fine.dbar);
        wants[3].push(fine.delta);
    }
    CalcKind::ALL
        .par_iter()
        .zip(wants.par_iter())
        .map(|(&kind, want)| {
            let v = calc(kind, &t, f, profile, opts)?.value;
            Ok(CheckRecord::new(format!("oracle_{}", kind.name()), &v, &QuatMatrix::diagonal(want)))
        })
        .collect()
}

/// For intrinsic `g`: entrywise conjugate of `g(T)` against `g(T̄)`, and the
/// commutator of `g(T)` with `T`.
pub fn intrinsic_properties(
    t: &CommutingOperator,
    g: &StemFunction,
    profile: &TypeProfile,
    opts: &CalcOptions,
) -> Result<Vec<CheckRecord>> {
    if !g.is_intrinsic() {
        return Err(Error::NotIntrinsic);
    }
    let tb = t.conj();
    let v = batch(&[(CalcKind::S, t, g), (CalcKind::S, &tb, g)], profile, opts, Regime::Decaying)?;
    let tq = t.to_quat();
    Ok(vec![
        CheckRecord::new("intrinsic_conjugation", &v[0].conj(), &v[1]),
        CheckRecord::new("commutes_with_T", &(&v[0] * &tq), &(&tq * &v[0])),
        CheckRecord { tag: "commuting_components".into(), residual: v[0].commutator_residual() },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{generate_operator, GeneratorSpec};
    use std::f64::consts::FRAC_PI_4;

    fn setup(seed: u64) -> (CommutingOperator, TypeProfile) {
        let t = generate_operator(&GeneratorSpec { dim: 3, r_min: 0.5, r_max: 2.0, omega: FRAC_PI_4, seed }).unwrap();
        (t, TypeProfile::assumed(1.0 / 3.0, 1.0 / 3.0, FRAC_PI_4))
    }

    fn reg(n: u32) -> StemFunction {
        StemFunction::regularizer(n).unwrap()
    }

    fn assert_all(records: &[CheckRecord], tol: f64) {
        for r in records {
            assert!(r.residual <= tol, "{} = {:e}", r.tag, r.residual);
        }
    }

    #[test]
    fn resolvent_identities_hold() {
        let (t, _) = setup(1);
        let pairs = [
            (Quaternion::new(-1.0, 0.5, 0.2, 0.0), Quaternion::new(0.2, 0.0, -1.5, 0.3)),
            (Quaternion::new(0.0, 0.0, 2.0, 1.0), Quaternion::new(-0.4, 0.9, 0.0, 0.0)),
        ];
        for (s, p) in pairs {
            assert_all(&resolvent_identities(&t, s, p).unwrap(), 1e-10);
        }
    }

    #[test]
    fn same_sphere_is_rejected() {
        let (t, _) = setup(1);
        let s = Quaternion::new(-1.0, 0.5, 0.0, 0.0);
        let p = Quaternion::new(-1.0, 0.0, 0.5, 0.0);
        assert!(resolvent_identities(&t, s, p).is_err());
    }

    #[test]
    fn product_rules_decaying() {
        let (t, p) = setup(2);
        let f = StemFunction::product(StemFunction::power(1), reg(3)).unwrap().scale(Quaternion::new(0.0, 1.0, 0.5, 0.0));
        assert_all(&product_rules(&t, &reg(2), &f, &p, &CalcOptions::default(), Regime::Decaying).unwrap(), 1e-6);
    }

    #[test]
    fn recurrences_for_first_power() {
        let (t, p) = setup(3);
        assert_all(&power_recurrence_check(&t, &reg(3), 1, &p, &CalcOptions::default()).unwrap(), 1e-7);
    }

    #[test]
    fn derivative_relation_holds() {
        let (t, p) = setup(4);
        let r = derivative_relation(&t, &reg(3), &p, &CalcOptions::default()).unwrap();
        assert!(r.residual <= 1e-6, "{r:?}");
    }

    #[test]
    fn intrinsic_function_properties() {
        let (t, p) = setup(5);
        let recs = intrinsic_properties(&t, &reg(2), &p, &CalcOptions::default()).unwrap();
        assert!(recs[0].residual <= 1e-7);
        assert_all(&recs[1..], 1e-9);
    }
}
