//! Path integrals `int K(s) ds_J f(s)` over the boundary of `S_phi` in the
//! plane `C_J`, parametrized by `gamma(t) = -t e^{J phi}` for `t < 0` and
//! `t e^{-J phi}` for `t > 0`, with `ds_J = gamma'(t) J^-1 dt`.
//!
//! Both rays are folded onto `t in (0, inf)` and integrated in `u = ln t` with
//! composite 16-point Gauss-Legendre panels. A panel is accepted through the
//! difference between its one-panel and two-half-panel values; the global
//! stopping rule uses the Frobenius norm of the summed differences.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::QuatMatrix;
use crate::quat::{unit_imaginary, Quaternion, SlicePoint};
use crate::slice::StemFunction;

const GL_ORDER: usize = 16;
const DEFAULT_MAX_PANELS: usize = 4096;

/// Nodes and weights of the 16-point Gauss-Legendre rule on `[-1, 1]`.
fn gauss_legendre() -> &'static [(f64, f64); GL_ORDER] {
    static RULE: OnceLock<[(f64, f64); GL_ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut rule = [(0.0, 0.0); GL_ORDER];
        for (i, slot) in rule.iter_mut().enumerate() {
            // Newton on P_n from the Chebyshev-like initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

/// Integration path and refinement controls.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorContour {
    pub phi: f64,
    pub j: Quaternion,
    pub t_min: f64,
    pub t_max: f64,
    /// Initial number of uniform panels in `ln t`.
    pub panels: usize,
    /// Absolute target for the refinement estimate.
    pub tol: f64,
    /// Relative target, applied to the Frobenius norm of the result.
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl SectorContour {
    pub fn new(phi: f64, j: Quaternion, t_min: f64, t_max: f64, tol: f64) -> Result<Self> {
        if !(phi > 0.0 && phi < std::f64::consts::PI) {
            return Err(Error::Invalid(format!("contour angle {phi} outside (0, pi)")));
        }
        if !(t_min > 0.0 && t_min < 1.0 && t_max > 1.0 && t_max.is_finite()) {
            return Err(Error::Invalid(format!("truncation radii ({t_min}, {t_max}) must satisfy 0 < t_min < 1 < t_max")));
        }
        if !(tol > 0.0) {
            return Err(Error::Invalid(format!("tolerance {tol} must be positive")));
        }
        let j = unit_imaginary(j)?;
        let width = t_max.ln() - t_min.ln();
        let panels = ((width / 2.0).ceil() as usize).max(4);
        Ok(SectorContour { phi, j, t_min, t_max, panels, tol, rel_tol: 0.0, max_panels: DEFAULT_MAX_PANELS })
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Points `t e^{J phi}` and `t e^{-J phi}` on the two rays.
    pub fn ray_points(&self, t: f64) -> (SlicePoint, SlicePoint) {
        let (x, y) = (t * self.phi.cos(), t * self.phi.sin());
        (SlicePoint::new(x, y, self.j), SlicePoint::new(x, y, -self.j))
    }

    /// `J e^{J phi}` and `J e^{-J phi}`: the `ds_J / dt` factors of the two rays
    /// (signs of the orientation included by the caller).
    fn ray_weights(&self) -> (Quaternion, Quaternion) {
        let (c, s) = (self.phi.cos(), self.phi.sin());
        (self.j * c - Quaternion::real(s), self.j * c + Quaternion::real(s))
    }
}

/// `(t_min, t_max)` with `2 C t_min^delta / delta <= tol/20` and
/// `2 C t_max^-delta / delta <= tol/20`, clamped to `t_min <= 1 <= t_max`.
pub fn tail_radius(delta: f64, c: f64, tol: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0) {
        return Err(Error::Invalid(format!("decay exponent {delta} must be positive")));
    }
    let ratio = tol * delta.min(1.0) / (40.0 * c);
    let t_min = ratio.powf(1.0 / delta).min(1.0);
    let t_max = ratio.powf(-1.0 / delta).max(1.0);
    Ok((t_min, t_max))
}

/// Bounds `||K(s)|| <= c0` for `|s| <= 1` and `||K(s)|| <= c_inf |s|^-decay`
/// for `|s| >= 1` on the contour.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelEnvelope {
    pub c0: f64,
    pub c_inf: f64,
    pub decay: f64,
}

/// Truncation radii keeping both tails of `int K ds_J f` below `tol/20`.
pub fn certified_radii(f: &StemFunction, env: &KernelEnvelope, phi: f64, tol: f64) -> Result<(f64, f64)> {
    let (nu0, nui) = f.orders();
    let (cf0, cfi) = f.envelope(&[phi]);
    let delta0 = nu0 + 1.0;
    let delta_inf = env.decay - 1.0 - nui;
    if !(delta0 > 0.0 && delta_inf > 0.0) {
        return Err(Error::NoDecayMetadata(format!(
            "{f} against a kernel decaying like |s|^-{}: exponents ({delta0}, {delta_inf})",
            env.decay
        )));
    }
    let tiny = f64::MIN_POSITIVE;
    let (t_min, _) = tail_radius(delta0, (env.c0 * cf0).max(tiny), tol)?;
    let (_, t_max) = tail_radius(delta_inf, (env.c_inf * cfi).max(tiny), tol)?;
    Ok((t_min.min(0.5), t_max.max(2.0)))
}

/// Integral value with its refinement diagnostics.
#[derive(Clone, Debug)]
pub struct Integral {
    pub value: QuatMatrix,
    pub estimate: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    whole: QuatMatrix,
    left: QuatMatrix,
    right: QuatMatrix,
}

impl Panel {
    fn refined(&self) -> QuatMatrix {
        &self.left + &self.right
    }

    fn error(&self) -> f64 {
        (&self.refined() - &self.whole).frobenius()
    }
}

fn gl_panel<G>(g: &G, a: f64, b: f64) -> Result<QuatMatrix>
where
    G: Fn(f64) -> Result<QuatMatrix> + Sync,
{
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc: Option<QuatMatrix> = None;
    for &(x, w) in gauss_legendre() {
        let v = g(mid + half * x)?.scale(w * half);
        acc = Some(match acc {
            None => v,
            Some(m) => &m + &v,
        });
    }
    Ok(acc.expect("rule has nodes"))
}

fn halves<G>(g: &G, a: f64, b: f64) -> Result<(QuatMatrix, QuatMatrix)>
where
    G: Fn(f64) -> Result<QuatMatrix> + Sync,
{
    let m = 0.5 * (a + b);
    Ok((gl_panel(g, a, m)?, gl_panel(g, m, b)?))
}

fn sum_refined(panels: &[Panel]) -> QuatMatrix {
    let mut it = panels.iter().map(Panel::refined);
    let first = it.next().expect("at least one panel");
    it.fold(first, |acc, m| &acc + &m)
}

/// Adaptive composite Gauss-Legendre integration of `g` over `[ua, ub]`.
fn adaptive<G>(g: &G, ua: f64, ub: f64, c: &SectorContour) -> Result<Integral>
where
    G: Fn(f64) -> Result<QuatMatrix> + Sync,
{
    let n0 = c.panels.max(1);
    let h = (ub - ua) / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (ua + h * i as f64, if i + 1 == n0 { ub } else { ua + h * (i + 1) as f64 });
            let whole = gl_panel(g, a, b)?;
            let (left, right) = halves(g, a, b)?;
            Ok(Panel { a, b, whole, left, right })
        })
        .collect::<Result<_>>()?;
    loop {
        let value = sum_refined(&panels);
        let errors: Vec<f64> = panels.iter().map(Panel::error).collect();
        let estimate: f64 = errors.iter().sum();
        let target = c.tol.max(c.rel_tol * value.frobenius());
        if estimate <= target {
            return Ok(Integral { value, estimate, panels: panels.len() });
        }
        if panels.len() >= c.max_panels {
            return Err(Error::ToleranceNotMet { panels: panels.len(), estimate, target });
        }
        let threshold = target / panels.len() as f64;
        let next: Vec<Vec<Panel>> = panels
            .into_par_iter()
            .zip(errors.into_par_iter())
            .map(|(p, err)| {
                if err <= threshold {
                    return Ok(vec![p]);
                }
                let m = 0.5 * (p.a + p.b);
                let (ll, lr) = halves(g, p.a, m)?;
                let (rl, rr) = halves(g, m, p.b)?;
                Ok(vec![
                    Panel { a: p.a, b: m, whole: p.left, left: ll, right: lr },
                    Panel { a: m, b: p.b, whole: p.right, left: rl, right: rr },
                ])
            })
            .collect::<Result<_>>()?;
        panels = next.into_iter().flatten().collect();
    }
}

/// Integrand in `u = ln t` for `int K ds_J f` (or `int f ds_J K` when `right`).
fn integrand<'a, K>(kernel: &'a K, f: &'a StemFunction, c: &'a SectorContour, right: bool) -> impl Fn(f64) -> Result<QuatMatrix> + Sync + 'a
where
    K: Fn(&SlicePoint) -> Result<QuatMatrix> + Sync,
{
    let (w_up, w_down) = c.ray_weights();
    move |u: f64| {
        let t = u.exp();
        let (up, down) = c.ray_points(t);
        let (a, b) = f.eval_stem(up.x, up.y);
        let f_up = a + up.j * b;
        let f_down = a + down.j * b;
        let k_up = kernel(&up)?;
        let k_down = kernel(&down)?;
        let (m_up, m_down) = if right {
            (k_up.left_scale(f_up * w_up), k_down.left_scale(f_down * w_down))
        } else {
            (k_up.right_scale(w_up * f_up), k_down.right_scale(w_down * f_down))
        };
        Ok((&m_up - &m_down).scale(t))
    }
}

/// `int_gamma K(s) ds_J f(s)` over `[t_min, t_max]` on both rays.
pub fn integrate<K>(kernel: K, f: &StemFunction, c: &SectorContour) -> Result<Integral>
where
    K: Fn(&SlicePoint) -> Result<QuatMatrix> + Sync,
{
    let g = integrand(&kernel, f, c, false);
    adaptive(&g, c.t_min.ln(), c.t_max.ln(), c)
}

/// `int_gamma f(s) ds_J K(s)` over `[t_min, t_max]` on both rays.
pub fn integrate_right<K>(kernel: K, f: &StemFunction, c: &SectorContour) -> Result<Integral>
where
    K: Fn(&SlicePoint) -> Result<QuatMatrix> + Sync,
{
    let g = integrand(&kernel, f, c, true);
    adaptive(&g, c.t_min.ln(), c.t_max.ln(), c)
}

/// Non-adaptive composite rule with `panels` uniform panels; the estimate is
/// the summed one-panel versus two-half-panel difference.
pub fn integrate_fixed<K>(kernel: K, f: &StemFunction, c: &SectorContour, panels: usize) -> Result<Integral>
where
    K: Fn(&SlicePoint) -> Result<QuatMatrix> + Sync,
{
    let g = integrand(&kernel, f, c, false);
    let fixed = SectorContour { panels, max_panels: panels, tol: f64::INFINITY, ..c.clone() };
    adaptive(&g, c.t_min.ln(), c.t_max.ln(), &fixed)
}
