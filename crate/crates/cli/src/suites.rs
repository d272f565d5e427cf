//! Theorem suites. Each suite is a list of independent tasks; every task yields
//! tagged residuals that pass when at most their tolerance.

use std::f64::consts::PI;
use std::time::Instant;

use anyhow::{bail, Context};
use nalgebra::DMatrix;
use qcalc_core::calculus::{
    contour_independence, default_variants, derivative_relation, diagonal_oracle, hinf_powers, intrinsic_properties,
    power_recurrence_check, product_rules, resolvent_identities, sample_resolvent_pairs, CheckRecord,
};
use qcalc_core::operator::{
    ab_decompose, estimate_type_profile, f_spectrum_check, generate_with_basis, kernel, kernel_scaling_ratio, parse_operator, q_inverse,
};
use qcalc_core::quat::to_slice;
use qcalc_core::slice::pointwise_fine;
use qcalc_core::{
    calc, calc_right, hinf, CalcKind, CalcOptions, CommutingOperator, KernelKind, QuatMatrix, Quaternion, Regime, SlicePoint, StemFunction,
    TypeProfile,
};
use rayon::prelude::*;

use crate::config::{Config, OperatorSource};
use crate::report::{CheckResult, Env, OperatorInfo, QuadratureInfo, SuiteReport, REPORT_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Identities,
    ProductRules,
    Independence,
    Powers,
    Hinf,
    Oracle,
    Kernels,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Identities, Suite::ProductRules, Suite::Independence, Suite::Powers, Suite::Hinf, Suite::Oracle, Suite::Kernels];

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::ProductRules => "product_rules",
            Suite::Independence => "independence",
            Suite::Powers => "powers",
            Suite::Hinf => "hinf",
            Suite::Oracle => "oracle",
            Suite::Kernels => "kernels",
        }
    }
}

/// The operator under test with whatever ground truth is known about it.
pub struct Subject {
    pub t: CommutingOperator,
    pub profile: TypeProfile,
    /// Eigenvalues `q_k` and the orthogonal `O` with `T = O diag(q_k) O^T`.
    pub eigen: Option<(Vec<Quaternion>, DMatrix<f64>)>,
    pub info: OperatorInfo,
}

pub fn prepare(cfg: &Config) -> anyhow::Result<Subject> {
    let omega = cfg.generator.omega;
    let (t, eigen, info) = match &cfg.source {
        OperatorSource::File(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading operator file {}", path.display()))?;
            let t = parse_operator(&text)?;
            let info = OperatorInfo {
                source: "file".into(),
                dim: t.dim(),
                path: Some(path.display().to_string()),
                seed: None,
                annulus: None,
                omega,
                diag: false,
            };
            (t, None, info)
        }
        OperatorSource::Generated => {
            let g = &cfg.generator;
            let (t, qs, o) = generate_with_basis(g)?;
            let (t, o) = if cfg.diag { (CommutingOperator::from_diagonal(&qs), DMatrix::identity(g.dim, g.dim)) } else { (t, o) };
            let info = OperatorInfo {
                source: "generated".into(),
                dim: g.dim,
                path: None,
                seed: Some(g.seed),
                annulus: Some([g.r_min, g.r_max]),
                omega,
                diag: cfg.diag,
            };
            (t, Some((qs, o)), info)
        }
    };
    let estimated = estimate_type_profile(&t, omega, &[0.5 * (omega + PI)]);
    Ok(Subject { t, profile: estimated, eigen, info })
}

type Rec = (String, f64, f64);

struct Task {
    name: String,
    run: Box<dyn Fn() -> qcalc_core::Result<Vec<Rec>> + Send + Sync>,
}

fn task(name: impl Into<String>, run: impl Fn() -> qcalc_core::Result<Vec<Rec>> + Send + Sync + 'static) -> Task {
    Task { name: name.into(), run: Box::new(run) }
}

fn with_tol(records: Vec<CheckRecord>, tol: f64) -> Vec<Rec> {
    records.into_iter().map(|r| (r.tag, r.residual, tol)).collect()
}

fn rec(tag: impl Into<String>, residual: f64, tol: f64) -> Rec {
    (tag.into(), residual, tol)
}

struct Ctx {
    t: CommutingOperator,
    profile: TypeProfile,
    opts: CalcOptions,
}

fn identities(cfg: &Config, s: &Subject) -> Vec<Task> {
    sample_resolvent_pairs(&s.t, cfg.pairs, cfg.generator.seed)
        .into_iter()
        .enumerate()
        .map(|(k, (a, b))| {
            let t = s.t.clone();
            task(format!("resolvent pair {k}"), move || Ok(with_tol(resolvent_identities(&t, a, b)?, 1e-10)))
        })
        .collect()
}

fn product_rule_tasks(cfg: &Config, ctx: &std::sync::Arc<Ctx>) -> Vec<Task> {
    let mut tasks = Vec::new();
    for f in &cfg.functions {
        for regime in [Regime::Decaying, Regime::HInfinity] {
            let (c, g, f) = (ctx.clone(), cfg.g.clone(), f.clone());
            tasks.push(task(format!("product rules {regime:?} g={g} f={f}"), move || {
                Ok(with_tol(product_rules(&c.t, &g, &f, &c.profile, &c.opts, regime)?, 1e-6))
            }));
        }
        let (c, f) = (ctx.clone(), f.clone());
        tasks.push(task(format!("derivative relation f={f}"), move || {
            let r = derivative_relation(&c.t, &f, &c.profile, &c.opts)?;
            Ok(vec![rec(r.tag, r.residual, 1e-6)])
        }));
    }
    let (c, g) = (ctx.clone(), cfg.g.clone());
    tasks.push(task(format!("intrinsic properties g={g}"), move || {
        let r = intrinsic_properties(&c.t, &g, &c.profile, &c.opts)?;
        Ok(r.into_iter()
            .map(|r| {
                let tol = if r.tag == "intrinsic_conjugation" { 1e-7 } else { 1e-9 };
                (r.tag, r.residual, tol)
            })
            .collect())
    }));
    tasks
}

fn independence(cfg: &Config, ctx: &std::sync::Arc<Ctx>) -> Vec<Task> {
    let (def_angles, def_units) = default_variants(&ctx.profile, &ctx.opts);
    let angles = cfg.angles.clone().unwrap_or(def_angles);
    let units = cfg.units.clone().unwrap_or(def_units);
    let mut tasks = Vec::new();
    for f in &cfg.functions {
        let (c, f2, a, u) = (ctx.clone(), f.clone(), angles.clone(), units.clone());
        tasks.push(task(format!("contour independence f={f}"), move || {
            Ok(with_tol(contour_independence(&c.t, &f2, &c.profile, &c.opts, &a, &u)?, 1e-7))
        }));
        if f.is_intrinsic() {
            let (c, f2) = (ctx.clone(), f.clone());
            tasks.push(task(format!("left/right kernels f={f}"), move || {
                let mut out = Vec::new();
                for kind in CalcKind::ALL {
                    let l = calc(kind, &c.t, &f2, &c.profile, &c.opts)?.value;
                    let r = calc_right(kind, &c.t, &f2, &c.profile, &c.opts)?.value;
                    out.push(rec(format!("left_right_agreement_{}", kind.name()), l.dist(&r), 10.0 * c.opts.tol.max(1e-9)));
                }
                Ok(out)
            }));
        }
    }
    tasks
}

fn powers(cfg: &Config, ctx: &std::sync::Arc<Ctx>) -> Vec<Task> {
    let mut tasks: Vec<Task> = (0..=cfg.n_max)
        .map(|n| {
            let c = ctx.clone();
            task(format!("H-infinity powers n={n}"), move || Ok(with_tol(hinf_powers(&c.t, n, &c.profile, &c.opts)?, 1e-6)))
        })
        .collect();
    let c = ctx.clone();
    tasks.push(task("power recurrences f=reg(4)", move || {
        let f = StemFunction::regularizer(4)?;
        Ok(with_tol(power_recurrence_check(&c.t, &f, 3, &c.profile, &c.opts)?, 1e-6))
    }));
    tasks
}

fn hinf_tasks(cfg: &Config, ctx: &std::sync::Arc<Ctx>) -> Vec<Task> {
    let mut tasks = Vec::new();
    for f in &cfg.growing {
        let (c, g, f2) = (ctx.clone(), cfg.g.clone(), f.clone());
        tasks.push(task(format!("H-infinity product rules f={f}"), move || {
            Ok(with_tol(product_rules(&c.t, &g, &f2, &c.profile, &c.opts, Regime::HInfinity)?, 1e-6))
        }));
        for kind in CalcKind::ALL {
            let (c, f2) = (ctx.clone(), f.clone());
            tasks.push(task(format!("H-infinity {} f={f}", kind.name()), move || {
                let a = hinf(kind, &c.t, &f2, &c.profile, &c.opts)?;
                let n = a.diagnostics.regularizer.expect("hinf records its regularizer");
                let b = hinf(kind, &c.t, &f2, &c.profile, &CalcOptions { regularizer: Some(n + 1), ..c.opts.clone() })?;
                Ok(vec![
                    rec(format!("regularizer_independence_{}", kind.name()), a.value.dist(&b.value), 1e-6),
                    rec(format!("hinf_bracket_in_range_{}", kind.name()), a.diagnostics.bracket_residual.unwrap_or(f64::INFINITY), 1e-8),
                ])
            }));
        }
    }
    for f in &cfg.functions {
        let (c, f2) = (ctx.clone(), f.clone());
        tasks.push(task(format!("H-infinity versus decaying f={f}"), move || {
            let mut out = Vec::new();
            for kind in CalcKind::ALL {
                let h = hinf(kind, &c.t, &f2, &c.profile, &c.opts)?.value;
                let d = calc(kind, &c.t, &f2, &c.profile, &c.opts)?.value;
                out.push(rec(format!("hinf_matches_decaying_{}", kind.name()), h.dist(&d), 1e-6));
            }
            Ok(out)
        }));
    }
    tasks
}

fn oracle(cfg: &Config, s: &Subject, ctx: &std::sync::Arc<Ctx>) -> anyhow::Result<Vec<Task>> {
    let Some((qs, o)) = s.eigen.clone() else {
        bail!("the oracle suite needs a generated operator with known eigenvalues");
    };
    let diag = cfg.diag;
    Ok(cfg
        .functions
        .iter()
        .map(|f| {
            let (c, f2, qs, o) = (ctx.clone(), f.clone(), qs.clone(), o.clone());
            task(format!("pointwise oracle f={f}"), move || {
                if diag {
                    return Ok(with_tol(diagonal_oracle(&qs, &f2, &c.profile, &c.opts)?, 1e-7));
                }
                // T = O diag(q) O^T with real O, so every calculus is O diag(oracle) O^T.
                let mut wants: [Vec<Quaternion>; 4] = Default::default();
                for &q in &qs {
                    let fine = pointwise_fine(&f2, q)?;
                    wants[0].push(f2.eval(q)?);
                    wants[1].push(fine.d);
                    wants[2].push(fine.dbar);
                    wants[3].push(fine.delta);
                }
                let mut out = Vec::new();
                for (kind, want) in CalcKind::ALL.into_iter().zip(wants.iter()) {
                    let v = calc(kind, &c.t, &f2, &c.profile, &c.opts)?.value;
                    let w = &(&o * &QuatMatrix::diagonal(want)) * &o.transpose();
                    out.push(rec(format!("oracle_{}", kind.name()), v.dist(&w), 1e-7));
                }
                Ok(out)
            })
        })
        .collect())
}

/// Eight fixed unit imaginaries spread over the sphere.
fn sample_units() -> Vec<Quaternion> {
    let dirs: [[f64; 3]; 8] = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 1.0, 0.0],
        [0.0, -1.0, 1.0],
        [1.0, 2.0, 3.0],
        [-2.0, 1.0, 1.0],
        [0.3, -0.4, -1.2],
    ];
    dirs.iter()
        .map(|d| {
            let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            Quaternion::new(0.0, d[0] / n, d[1] / n, d[2] / n)
        })
        .collect()
}

/// Points `r e^{J arg}` outside the sector, on a 10 x 10 grid of radii and arguments.
fn sample_points(omega: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 0..10 {
        let r = 10f64.powf(-1.0 + 2.0 * i as f64 / 9.0);
        for k in 0..10 {
            let arg = omega + 0.1 + (PI - omega - 0.1) * k as f64 / 9.0;
            out.push((r * arg.cos(), r * arg.sin()));
        }
    }
    out
}

fn kernels(s: &Subject) -> Vec<Task> {
    let omega = s.info.omega;
    let mut tasks = Vec::new();
    for kind in KernelKind::ALL {
        let t = s.t.clone();
        tasks.push(task(format!("kernel structure {kind:?}"), move || {
            let mut recon: f64 = 0.0;
            let mut cr: f64 = 0.0;
            let mut parity: f64 = 0.0;
            for &(x, y) in sample_points(omega).iter().step_by(7) {
                let (a, b) = ab_decompose(kind, &t, x, y)?;
                for j in sample_units() {
                    let k = kernel(kind, &t, &SlicePoint::new(x, y, j))?;
                    let rebuilt = if kind.is_right() { &a + &b.left_scale(j) } else { &a + &b.right_scale(j) };
                    recon = recon.max(k.dist(&rebuilt));
                }
                let (am, bm) = ab_decompose(kind, &t, x, -y)?;
                parity = parity.max(a.dist(&am)).max(b.dist(&bm.scale(-1.0)));
                let h = 1e-4 * (x * x + y * y).sqrt().max(1.0);
                let d = |dx: f64, dy: f64| ab_decompose(kind, &t, x + dx, y + dy);
                let ((axp, bxp), (axm, bxm), (ayp, byp), (aym, bym)) = (d(h, 0.0)?, d(-h, 0.0)?, d(0.0, h)?, d(0.0, -h)?);
                let ax = (&axp - &axm).scale(0.5 / h);
                let bx = (&bxp - &bxm).scale(0.5 / h);
                let ay = (&ayp - &aym).scale(0.5 / h);
                let by = (&byp - &bym).scale(0.5 / h);
                let scale = ax.op_norm().max(ay.op_norm()).max(f64::MIN_POSITIVE);
                cr = cr.max((&ax - &by).op_norm() / scale).max((&ay + &bx).op_norm() / scale);
            }
            let name = format!("{kind:?}");
            Ok(vec![
                rec(format!("ab_reconstruction_{name}"), recon, 1e-10),
                rec(format!("ab_parity_{name}"), parity, 1e-10),
                rec(format!("cauchy_riemann_{name}"), cr, 1e-5),
                rec(
                    format!("kernel_estimate_scaling_{name}"),
                    kernel_scaling_ratio(&t, kind, 1.0 / 3.0, 1.0 / 3.0, 0.5 * (omega + PI)),
                    1.0,
                ),
            ])
        }));
    }
    let t = s.t.clone();
    tasks.push(task("component norms", move || {
        let mut violation: f64 = 0.0;
        for (i, &(x, y)) in sample_points(omega).iter().enumerate() {
            let kind = KernelKind::ALL[i % KernelKind::ALL.len()];
            let j = sample_units()[i % 8];
            let b = kernel(kind, &t, &SlicePoint::new(x, y, j))?;
            let norm = b.op_norm();
            for c in 0..4 {
                violation = violation.max(b.component(c).singular_values().max() - norm);
            }
            violation = violation.max(b.conj().op_norm() - 2.0 * norm);
        }
        Ok(vec![rec("component_norms", violation.max(0.0), 1e-12)])
    }));
    let t = s.t.clone();
    tasks.push(task("pseudo-resolvent inverse", move || {
        let n = t.dim();
        let tb = t.conj();
        let (mut back, mut comm, mut conj): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for &(x, y) in sample_points(omega).iter().step_by(3) {
            for j in sample_units() {
                let sp = SlicePoint::new(x, y, j);
                let sq = sp.to_quat();
                let g = q_inverse(&t, &sp)?;
                let q = &(&QuatMatrix::scalar(n, sq * sq) - &QuatMatrix::from_real(t.component(0)).left_scale(sq * 2.0))
                    + &QuatMatrix::from_real(&t.modulus_sq());
                let id = QuatMatrix::identity(n);
                back = back.max((&q * &g).dist(&id)).max((&g * &q).dist(&id));
                for i in 0..4 {
                    let ti = QuatMatrix::from_real(t.component(i));
                    comm = comm.max((&ti * &g).dist(&(&g * &ti)));
                }
                let lhs = kernel(KernelKind::SL, &tb, &sp)?;
                let rhs = kernel(KernelKind::SR, &t, &sp.conj())?.conj();
                conj = conj.max(lhs.dist(&rhs));
            }
        }
        Ok(vec![
            rec("q_inverse_multiply_back", back, 1e-10),
            rec("q_inverse_commutes", comm, 1e-10),
            rec("kernel_conj_relation", conj, 1e-10),
        ])
    }));
    let t = s.t.clone();
    let eigen = s.eigen.clone();
    tasks.push(task("F-spectrum", move || {
        let mut out = Vec::new();
        let mut asym = 0usize;
        for &(x, y) in sample_points(omega).iter().step_by(5) {
            let probes = [Quaternion::new(x, 0.0, y, 0.0), Quaternion::new(x + 0.3, y, 0.0, 0.0), Quaternion::new(0.9, 0.2, 0.0, 0.3 * y)];
            for s0 in probes {
                let p = to_slice(s0);
                let base = f_spectrum_check(&t, s0);
                for k in 0..16 {
                    let (a, b) = (k as f64 * 0.39, k as f64 * 1.17);
                    let j = Quaternion::new(0.0, a.cos() * b.sin(), a.sin() * b.sin(), b.cos());
                    asym += usize::from(f_spectrum_check(&t, Quaternion::real(p.x) + j * p.y) != base);
                }
            }
        }
        out.push(rec("resolvent_set_axial_symmetry", asym as f64, 0.0));
        if let Some((qs, _)) = &eigen {
            let mut wrong = 0usize;
            for q in qs {
                let p = to_slice(*q);
                for j in sample_units() {
                    wrong += usize::from(f_spectrum_check(&t, Quaternion::real(p.x) + j * p.y));
                    wrong += usize::from(!f_spectrum_check(&t, Quaternion::real(p.x + 0.05) + j * p.y));
                }
            }
            out.push(rec("f_spectrum_is_eigenspheres", wrong as f64, 0.0));
        }
        let composed = &t.conj().to_quat() * &t.to_quat();
        out.push(rec("modulus_is_conj_composition", composed.dist(&QuatMatrix::from_real(&t.modulus_sq())), 1e-10));
        Ok(out)
    }));
    let t = s.t.clone();
    let accepted = s.profile.accepted;
    tasks.push(task("type profile", move || {
        let (injective, _) = t.is_injective(1e-10);
        Ok(vec![
            rec("type_profile_accepted", if accepted { 0.0 } else { 1.0 }, 0.0),
            rec("injective", if injective { 0.0 } else { 1.0 }, 0.0),
        ])
    }));
    tasks
}

fn run_tasks(tasks: &[Task], parallel: bool) -> Vec<CheckResult> {
    let one = |tk: &Task| -> Vec<CheckResult> {
        let start = Instant::now();
        let out = (tk.run)();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match out {
            Ok(records) => records.into_iter().map(|(tag, res, tol)| CheckResult::new(tag, res, tol, ms)).collect(),
            Err(e) => {
                eprintln!("warning: {} failed: {e}", tk.name);
                vec![CheckResult::new(tk.name.replace(' ', "_"), f64::INFINITY, 0.0, ms)]
            }
        }
    };
    if parallel {
        tasks.par_iter().flat_map_iter(one).collect()
    } else {
        tasks.iter().flat_map(one).collect()
    }
}

/// Runs one suite. Without `parallel` everything, including the quadrature
/// panels, executes on a single thread so reports are bit-reproducible.
pub fn run_suite(suite: Suite, cfg: &Config, parallel: bool) -> anyhow::Result<SuiteReport> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(if parallel { 0 } else { 1 }).build()?;
    let threads = pool.current_num_threads();
    pool.install(|| {
        let subject = prepare(cfg)?;
        if !subject.profile.accepted && suite != Suite::Kernels {
            bail!(
                "operator is not of type (1/3, 1/3, {}): sampled resolvent constants {:?}",
                subject.info.omega,
                subject.profile.constants
            );
        }
        let profile = TypeProfile::assumed(1.0 / 3.0, 1.0 / 3.0, subject.info.omega);
        let ctx = std::sync::Arc::new(Ctx { t: subject.t.clone(), profile, opts: cfg.quadrature.clone() });
        let tasks = match suite {
            Suite::Identities => identities(cfg, &subject),
            Suite::ProductRules => product_rule_tasks(cfg, &ctx),
            Suite::Independence => independence(cfg, &ctx),
            Suite::Powers => powers(cfg, &ctx),
            Suite::Hinf => hinf_tasks(cfg, &ctx),
            Suite::Oracle => oracle(cfg, &subject, &ctx)?,
            Suite::Kernels => kernels(&subject),
        };
        let mut checks = run_tasks(&tasks, parallel);
        if let Some(tol) = cfg.tol {
            for c in &mut checks {
                *c = CheckResult::new(std::mem::take(&mut c.tag), c.residual, tol, c.ms);
            }
        }
        let q = &cfg.quadrature;
        Ok(SuiteReport {
            version: REPORT_VERSION,
            suite: suite.name().into(),
            operator: subject.info,
            checks,
            env: Env {
                seed: cfg.generator.seed,
                quadrature: QuadratureInfo {
                    tol: q.tol,
                    rel_tol: q.rel_tol,
                    inner_tol: q.inner_tol,
                    inner_rel_tol: q.inner_rel_tol,
                    phi: q.phi,
                    theta: q.theta,
                    j: q.j.to_array(),
                },
                parallel,
                threads,
                tool_version: env!("CARGO_PKG_VERSION").into(),
            },
        })
    })
}
