//! The local fractional integral operators (exact-kernel and tilde
//! variants, plus their duals) and the maximal operators, all as point
//! evaluators. Suprema over ball families are estimated on a deterministic
//! search grid and are therefore lower bounds; refinement stability is the
//! convergence criterion.

use crate::error::{Error, Result};
use crate::functions::{FnFunction, PowAbs, RealFunction};
use crate::geometry::{admissibility_radius, is_admissible, AdmissibleClass, Ball, GaussContext, Point};
use crate::quadrature::ray_ball_interval;
use crate::rules::{gauss_legendre, power_weight_rule, search_directions, sphere_directions};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Discretization of the ball family used to estimate suprema: a fixed set
/// of unit directions, log-spaced radii, center offsets along each
/// direction, plus caller-supplied explicit candidate balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSearchGrid {
    pub directions: usize,
    pub radii: usize,
    pub offsets: usize,
    #[serde(default)]
    pub explicit_candidates: Vec<Ball>,
}

impl Default for BallSearchGrid {
    fn default() -> Self {
        Self { directions: 8, radii: 10, offsets: 8, explicit_candidates: Vec::new() }
    }
}

impl BallSearchGrid {
    /// Grid with every resolution doubled (used for refinement evidence).
    pub fn refined(&self) -> Self {
        Self {
            directions: self.directions * 2,
            radii: self.radii * 2,
            offsets: self.offsets * 2,
            explicit_candidates: self.explicit_candidates.clone(),
        }
    }

    pub fn with_explicit(mut self, balls: Vec<Ball>) -> Self {
        self.explicit_candidates = balls;
        self
    }
}

/// Class parameter and fractional order shared by the operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    pub a: f64,
    pub beta: f64,
    pub grid: BallSearchGrid,
}

impl OperatorParams {
    pub fn new(a: f64, beta: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in (0, 1), got {beta}"
            )));
        }
        Ok(Self { a, beta, grid: BallSearchGrid::default() })
    }

    pub fn with_grid(mut self, grid: BallSearchGrid) -> Self {
        self.grid = grid;
        self
    }
}

/// Which kernel weight a fractional integral uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum KernelKind {
    /// `V(x, y)^{beta-1}` with the exact measure kernel.
    ExactV,
    /// `V(y, x)^{beta-1}`: the measure kernel of the dual operator, whose
    /// ball is centered at the integration variable.
    ExactVAtY,
    /// `[e^{-|x|^2} |x-y|^n]^{beta-1}` (weight at the evaluation point).
    TildeAtX,
    /// `[e^{-|y|^2} |x-y|^n]^{beta-1}` (weight at the integration variable).
    TildeAtY,
}

/// `I_a^beta(f)(x)`: integral of `f(y) V(x,y)^{beta-1}` over the local ball
/// `B(x, a m(x))`. Linear in `f`; nonnegative for nonnegative `f`.
pub fn frac_integral(
    ctx: &GaussContext,
    params: &OperatorParams,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<f64> {
    frac_core(ctx, params.a, params.beta, f, x, KernelKind::ExactV, None)
}

/// The variant kernel `[e^{-|x|^2}|x-y|^n]^{beta-1}`.
pub fn frac_integral_tilde(
    ctx: &GaussContext,
    params: &OperatorParams,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<f64> {
    frac_core(ctx, params.a, params.beta, f, x, KernelKind::TildeAtX, None)
}

/// Dual operator: integral over `{y : |x-y| < a m(y)}` of
/// `f(y) V(y, x)^{beta-1}`. Requires declared compact support on `f`.
pub fn frac_integral_dual(
    ctx: &GaussContext,
    params: &OperatorParams,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<f64> {
    dual_core(ctx, params, f, x, true)
}

/// Dual of the tilde variant: kernel `[e^{-|y|^2}|x-y|^n]^{beta-1}` over the
/// same predicate domain.
pub fn frac_integral_tilde_dual(
    ctx: &GaussContext,
    params: &OperatorParams,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<f64> {
    dual_core(ctx, params, f, x, false)
}

fn dual_core(
    ctx: &GaussContext,
    params: &OperatorParams,
    f: &dyn RealFunction,
    x: &Point,
    exact_kernel: bool,
) -> Result<f64> {
    let support = f
        .support()
        .ok_or_else(|| {
            Error::MissingSupport("dual operators require declared compact support".into())
        })?
        .clone();
    let a = params.a;
    // the predicate |x-y| < a m(y) <= a caps the domain at B(x, a); the
    // declared support caps it further
    let radius = a.min(x.dist(&support.center) + support.radius);
    if radius <= 0.0 {
        return Ok(0.0);
    }
    // The dual domain is not a ball: the membership predicate is applied
    // pointwise inside the integrand.
    let xc = x.coords.clone();
    let masked = FnFunction::with_support(
        move |y: &[f64]| {
            if crate::geometry::dist(&xc, y) < a * admissibility_radius(y) {
                f.eval(y)
            } else {
                0.0
            }
        },
        support,
    );
    let kind = if exact_kernel { KernelKind::ExactVAtY } else { KernelKind::TildeAtY };
    frac_polar(
        ctx,
        params.beta,
        &masked,
        x,
        kind,
        radius,
        None,
        masked.support(),
        ctx.quad.radial_nodes,
        ctx.quad.angular_nodes,
    )
}

fn frac_core(
    ctx: &GaussContext,
    a: f64,
    beta: f64,
    f: &dyn RealFunction,
    x: &Point,
    kind: KernelKind,
    support_override: Option<&Ball>,
) -> Result<f64> {
    let radius = a * admissibility_radius(&x.coords);
    frac_core_over(ctx, a, beta, f, x, kind, radius, support_override)
}

#[allow(clippy::too_many_arguments)]
fn frac_core_over(
    ctx: &GaussContext,
    _a: f64,
    beta: f64,
    f: &dyn RealFunction,
    x: &Point,
    kind: KernelKind,
    radius: f64,
    support_override: Option<&Ball>,
) -> Result<f64> {
    ctx.check_dim(&x.coords)?;
    let n = ctx.dim();
    if n > 3 {
        return Err(Error::UnsupportedDimension { dim: n });
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!("beta must lie in (0,1), got {beta}")));
    }
    if radius <= 0.0 {
        return Ok(0.0);
    }
    // distribute over finite linear combinations so each term keeps its own
    // support clipping
    if let Some(terms) = f.linear_terms() {
        let mut acc = 0.0;
        for (coef, term) in terms {
            acc += coef * frac_core_over(ctx, _a, beta, term, x, kind, radius, support_override)?;
        }
        return Ok(acc);
    }
    let (constant, clip): (Option<f64>, Option<&Ball>) = match f.as_scaled_indicator() {
        Some((c, b)) => (Some(c), Some(b)),
        None => (None, support_override.or_else(|| f.support())),
    };
    frac_polar(
        ctx,
        beta,
        f,
        x,
        kind,
        radius,
        constant,
        clip,
        ctx.quad.radial_nodes,
        ctx.quad.angular_nodes,
    )
}

#[allow(clippy::too_many_arguments)]
fn frac_polar(
    ctx: &GaussContext,
    beta: f64,
    f: &dyn RealFunction,
    x: &Point,
    kind: KernelKind,
    radius: f64,
    constant: Option<f64>,
    clip: Option<&Ball>,
    radial_nodes: usize,
    angular_nodes: usize,
) -> Result<f64> {
    let n = ctx.dim();
    let nf = n as f64;
    let x_norm = x.norm();
    let lambda = nf * beta - 1.0; // radial weight exponent s^{n beta - 1}
    let dirs = sphere_directions(n, angular_nodes);
    let dens_scale = PI.powf(-nf / 2.0);
    let mut acc = 0.0;
    let mut y = [0.0f64; 3];
    for (xi, wxi) in &dirs {
        let mut s0 = 0.0f64;
        let mut s1 = radius;
        if let Some(b) = clip {
            match ray_ball_interval(&x.coords, xi, b) {
                Some((a2, b2)) => {
                    s0 = s0.max(a2);
                    s1 = s1.min(b2);
                }
                None => continue,
            }
        }
        if s1 <= s0 {
            continue;
        }
        let mut eval_node = |s: f64, base_weight: f64, weighted: bool, acc: &mut f64| -> Result<()> {
            // base_weight already contains s^{n beta - 1} when `weighted`
            let mut y2 = 0.0;
            for i in 0..n {
                y[i] = x.coords[i] + s * xi[i];
                y2 += y[i] * y[i];
            }
            let fv = match constant {
                Some(c) => c,
                None => {
                    let v = f.eval(&y[..n]);
                    if !v.is_finite() {
                        return Err(Error::EvaluationFailed { at: y[..n].to_vec() });
                    }
                    v
                }
            };
            if fv == 0.0 {
                return Ok(());
            }
            // kernel and density exponents combined before exponentiation so
            // e^{|x|^2 (1-beta)} magnitudes never materialize on their own
            let expo = match kind {
                KernelKind::ExactV => {
                    let lv = ctx.log_v_kernel_radial(x_norm, s);
                    (beta - 1.0) * (lv - nf * s.ln()) - y2
                }
                KernelKind::ExactVAtY => {
                    let lv = ctx.log_v_kernel_radial(y2.sqrt(), s);
                    (beta - 1.0) * (lv - nf * s.ln()) - y2
                }
                KernelKind::TildeAtX => (1.0 - beta) * x_norm * x_norm - y2,
                KernelKind::TildeAtY => -beta * y2,
            };
            let weight = if weighted {
                base_weight
            } else {
                base_weight * s.powf(lambda)
            };
            *acc += wxi * weight * fv * dens_scale * expo.exp();
            Ok(())
        };
        if s0 == 0.0 {
            let cap = s1.min(2.0);
            let rule = power_weight_rule(lambda, radial_nodes);
            let scale = cap.powf(lambda + 1.0);
            for (t, w) in rule.nodes.iter().zip(rule.weights.iter()) {
                eval_node(cap * t, w * scale, true, &mut acc)?;
            }
            if s1 > cap {
                for (plo, phi_) in crate::geometry::panels(cap, s1, 1.5) {
                    let gl = gauss_legendre(radial_nodes);
                    let half = 0.5 * (phi_ - plo);
                    let mid = 0.5 * (plo + phi_);
                    for (t, w) in gl.nodes.iter().zip(gl.weights.iter()) {
                        eval_node(mid + half * t, w * half, false, &mut acc)?;
                    }
                }
            }
        } else {
            for (plo, phi_) in crate::geometry::panels(s0, s1, 1.5) {
                let gl = gauss_legendre(radial_nodes);
                let half = 0.5 * (phi_ - plo);
                let mid = 0.5 * (plo + phi_);
                for (t, w) in gl.nodes.iter().zip(gl.weights.iter()) {
                    eval_node(mid + half * t, w * half, false, &mut acc)?;
                }
            }
        }
    }
    Ok(acc)
}

/// A supremum estimate together with the ball attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct SupEstimate {
    pub value: f64,
    pub argmax: Option<Ball>,
}

/// Candidate balls of the class `a` containing `x`: directions from a fixed
/// spherical design, log-spaced radii, fractional center offsets; raw
/// candidates violating admissibility are shrunk to the feasible boundary
/// radius rather than discarded, preserving the extremal near-boundary
/// balls. Explicit candidates are appended when admissible and containing
/// `x`.
pub fn search_candidates(
    ctx: &GaussContext,
    x: &[f64],
    a: f64,
    grid: &BallSearchGrid,
) -> Result<Vec<Ball>> {
    ctx.check_dim(x)?;
    let n = ctx.dim();
    let m_x = admissibility_radius(x);
    let class = AdmissibleClass::new(a)?;
    let dirs = search_directions(n, grid.directions.max(1));
    let offsets = grid.offsets.max(1);
    let radii = grid.radii.max(2);
    let r_min = 1e-3 * a * m_x;
    let r_top = 1.5 * a * m_x;
    let mut out = Vec::new();
    for (di, d) in dirs.iter().enumerate() {
        for oj in 0..offsets {
            let s_off = oj as f64 / offsets as f64;
            if s_off == 0.0 && di > 0 {
                continue; // offset 0 yields the same centered ball for every direction
            }
            for k in 0..radii {
                let r_raw = r_min * (r_top / r_min).powf(k as f64 / (radii - 1) as f64);
                let center_at = |r: f64| -> Vec<f64> {
                    (0..n).map(|i| x[i] + s_off * r * d[i]).collect()
                };
                let feasible = |r: f64| -> bool { r <= a * admissibility_radius(&center_at(r)) };
                let r_final = if feasible(r_raw) {
                    r_raw
                } else {
                    // bisect to the feasibility boundary
                    let (mut lo, mut hi) = (0.0f64, r_raw);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if feasible(mid) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    lo * (1.0 - 1e-12)
                };
                if r_final <= 0.0 {
                    continue;
                }
                let ball = Ball {
                    center: Point { coords: center_at(r_final) },
                    radius: r_final,
                };
                debug_assert!(ball.contains(x) || s_off == 0.0);
                out.push(ball);
            }
        }
    }
    for b in &grid.explicit_candidates {
        if b.dim() == n && is_admissible(b, class) && b.contains(x) {
            out.push(b.clone());
        }
    }
    Ok(out)
}

fn maximal_core(
    ctx: &GaussContext,
    a: f64,
    beta: f64,
    f: &dyn RealFunction,
    x: &[f64],
    grid: &BallSearchGrid,
) -> Result<SupEstimate> {
    let candidates = search_candidates(ctx, x, a, grid)?;
    let mut best = SupEstimate { value: 0.0, argmax: None };
    let absf = PowAbs { inner: f, p: 1.0 };
    for b in candidates {
        let integral = crate::quadrature::integrate_gauss_value(ctx, &absf, &b)?;
        if integral <= 0.0 {
            continue;
        }
        let lgb = ctx.log_gauss_ball(&b)?;
        if !lgb.is_finite() {
            continue;
        }
        let value = ((beta - 1.0) * lgb + integral.ln()).exp();
        if value > best.value {
            best = SupEstimate { value, argmax: Some(b) };
        }
    }
    Ok(best)
}

/// Noncentered local Hardy-Littlewood maximal function: the grid maximum of
/// ball averages of `|f|`. A documented lower bound of the true supremum.
pub fn local_maximal(
    ctx: &GaussContext,
    params: &OperatorParams,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<f64> {
    // beta -> 0 of the fractional core: gamma(B)^{-1} int |f|
    Ok(maximal_core(ctx, params.a, 0.0, f, &x.coords, &params.grid)?.value)
}

/// Local fractional maximal operator: grid maximum of
/// `gamma(B)^{beta-1} int_B |f| dgamma`.
pub fn frac_maximal(
    ctx: &GaussContext,
    params: &OperatorParams,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<f64> {
    Ok(frac_maximal_detailed(ctx, params, f, x)?.value)
}

/// As [`frac_maximal`] but reporting the argmax ball.
pub fn frac_maximal_detailed(
    ctx: &GaussContext,
    params: &OperatorParams,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<SupEstimate> {
    maximal_core(ctx, params.a, params.beta, f, &x.coords, &params.grid)
}

/// Local sharp maximal function over the class with `a = 1`: grid maximum
/// of the mean oscillation `(1/gamma(B)) int_B |f - f_B|`.
pub fn sharp_maximal(
    ctx: &GaussContext,
    f: &dyn RealFunction,
    x: &Point,
    grid: &BallSearchGrid,
) -> Result<f64> {
    let candidates = search_candidates(ctx, &x.coords, 1.0, grid)?;
    let one = crate::functions::FunctionSpec::constant(1.0);
    let mut best = 0.0f64;
    for b in candidates {
        let mass = crate::quadrature::integrate_gauss_value(ctx, &one, &b)?;
        if mass <= 0.0 {
            continue;
        }
        let avg = crate::quadrature::integrate_gauss_value(ctx, f, &b)? / mass;
        let dev = crate::functions::AbsDeviation { inner: f, shift: avg };
        let osc = crate::quadrature::integrate_gauss_value(ctx, &dev, &b)? / mass;
        best = best.max(osc);
    }
    Ok(best)
}

/// Fractional-kernel integral over the local ball with either the exact
/// `V(x, .)^{beta-1}` kernel or the `[e^{-|y|^2}|x-y|^n]^{beta-1}` weight at
/// the integration variable; shared with the commutator module.
pub(crate) fn frac_kernel_integral(
    ctx: &GaussContext,
    a: f64,
    beta: f64,
    g: &dyn RealFunction,
    x: &Point,
    weight_at_y: bool,
) -> Result<f64> {
    let kind = if weight_at_y { KernelKind::TildeAtY } else { KernelKind::ExactV };
    frac_core(ctx, a, beta, g, x, kind, None)
}

/// Shared-grid evaluation of several ball functionals, used by the
/// commutator module so differenced suprema see identical candidates and
/// quadrature nodes.
pub(crate) fn maximal_on_shared_grid(
    ctx: &GaussContext,
    a: f64,
    beta: f64,
    integrands: &[&dyn RealFunction],
    x: &[f64],
    grid: &BallSearchGrid,
) -> Result<Vec<f64>> {
    let candidates = search_candidates(ctx, x, a, grid)?;
    let mut out = vec![0.0f64; integrands.len()];
    for b in candidates {
        let lgb = ctx.log_gauss_ball(&b)?;
        if !lgb.is_finite() {
            continue;
        }
        for (slot, g) in integrands.iter().enumerate() {
            let integral = crate::quadrature::integrate_gauss_value(ctx, *g, &b)?;
            if integral > 0.0 {
                let value = ((beta - 1.0) * lgb + integral.ln()).exp();
                if value > out[slot] {
                    out[slot] = value;
                }
            }
        }
    }
    Ok(out)
}
