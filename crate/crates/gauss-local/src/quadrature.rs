//! Numerical integration against the Gauss measure: deterministic polar
//! quadrature over balls, singular-kernel integration with a weighted radial
//! rule recentred at the singularity, and an independent Monte Carlo oracle
//! driven by a counter-based generator.

use crate::error::{Error, Result};
use crate::functions::RealFunction;
use crate::geometry::{Ball, GaussContext};
use crate::rules::{gauss_legendre, power_weight_rule, sphere_directions};
use crate::special::unit_ball_volume;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Window half-width (in radial distance from the center norm) outside of
/// which the Gaussian density contributes less than ~1e-31 relatively.
pub(crate) const RADIAL_WINDOW: f64 = 8.5;

const PANEL_WIDTH: f64 = 1.5;

/// Quadrature configuration shared by every deterministic and stochastic
/// integration path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            radial_nodes: 48,
            angular_nodes: 32,
            mc_samples: 20_000,
            seed: 42,
            rel_tol: 1e-6,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 8 {
            return Err(Error::Config("radial_nodes must be >= 8".into()));
        }
        if self.angular_nodes < 8 {
            return Err(Error::Config("angular_nodes must be >= 8".into()));
        }
        if self.mc_samples < 1_000 {
            return Err(Error::Config("mc_samples must be >= 1000".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 0.1) {
            return Err(Error::Config("rel_tol must lie in (0, 0.1]".into()));
        }
        Ok(())
    }

    /// One refinement doubling: quadrature nodes double, Monte Carlo samples
    /// quadruple (halving the standard error).
    pub fn refined(&self) -> Self {
        Self {
            radial_nodes: self.radial_nodes * 2,
            angular_nodes: self.angular_nodes * 2,
            mc_samples: self.mc_samples * 4,
            seed: self.seed,
            rel_tol: self.rel_tol,
        }
    }
}

/// How an integral value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Polar,
    Tensor,
    MonteCarlo,
}

/// An integral value with a two-level refinement error estimate. The
/// estimate is a stability indicator, not a rigorous bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
}

/// Deterministic counter-based generator: the k-th variate of stream `s` is
/// a pure function of `(seed, s, k)`, so parallel evaluation order cannot
/// change any result.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    #[inline]
    fn mix(mut z: u64) -> u64 {
        z ^= z >> 30;
        z = z.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z ^= z >> 27;
        z = z.wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    #[inline]
    pub fn raw(&self, stream: u64, counter: u64) -> u64 {
        let z = self
            .seed
            .wrapping_add(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
            .wrapping_add(counter.wrapping_mul(0xd1b5_4a32_d192_ed03));
        Self::mix(Self::mix(z).wrapping_add(counter ^ stream.rotate_left(32)))
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn uniform(&self, stream: u64, counter: u64) -> f64 {
        (self.raw(stream, counter) >> 11) as f64 * 1.110_223_024_625_156_5e-16
    }

    /// Uniform in `(0, 1]`.
    #[inline]
    pub fn uniform_open(&self, stream: u64, counter: u64) -> f64 {
        (((self.raw(stream, counter) >> 11) + 1) as f64) * 1.110_223_024_625_156_5e-16
    }

    /// Standard normal via Box-Muller; consumes counters `2k` and `2k+1`.
    #[inline]
    pub fn standard_normal(&self, stream: u64, k: u64) -> f64 {
        let u1 = self.uniform_open(stream, 2 * k);
        let u2 = self.uniform(stream, 2 * k + 1);
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

/// `int_B f dgamma` by polar quadrature centered at the ball center
/// (dimension 1 degenerates to the two-sided interval rule).
///
/// Dimensions above 3 fall back to the Monte Carlo path.
pub fn integrate_gauss(
    ctx: &GaussContext,
    f: &dyn RealFunction,
    ball: &Ball,
) -> Result<IntegralEstimate> {
    ctx.check_dim(&ball.center.coords)?;
    if ctx.dim() > 3 {
        return mc_integrate(ctx, f, ball);
    }
    if let Some(terms) = f.linear_terms() {
        let mut value = 0.0;
        let mut err = 0.0;
        for (coef, term) in terms {
            let e = integrate_gauss(ctx, term, ball)?;
            value += coef * e.value;
            err += coef.abs() * e.error_estimate;
        }
        return Ok(IntegralEstimate {
            value,
            error_estimate: err,
            method: if ctx.dim() == 1 { Method::Tensor } else { Method::Polar },
        });
    }
    let quad = &ctx.quad;
    let fine = polar_gauss(ctx, f, ball, quad.radial_nodes, quad.angular_nodes)?;
    let coarse = polar_gauss(
        ctx,
        f,
        ball,
        (quad.radial_nodes / 2).max(8),
        (quad.angular_nodes / 2).max(8),
    )?;
    Ok(IntegralEstimate {
        value: fine,
        error_estimate: (fine - coarse).abs(),
        method: if ctx.dim() == 1 { Method::Tensor } else { Method::Polar },
    })
}

/// Single-level integral value at the context resolution, without the
/// two-level error estimate; the sup estimators call this in their inner
/// loops.
pub(crate) fn integrate_gauss_value(
    ctx: &GaussContext,
    f: &dyn RealFunction,
    ball: &Ball,
) -> Result<f64> {
    if let Some(terms) = f.linear_terms() {
        let mut value = 0.0;
        for (coef, term) in terms {
            value += coef * integrate_gauss_value(ctx, term, ball)?;
        }
        return Ok(value);
    }
    polar_gauss(ctx, f, ball, ctx.quad.radial_nodes, ctx.quad.angular_nodes)
}

fn polar_gauss(
    ctx: &GaussContext,
    f: &dyn RealFunction,
    ball: &Ball,
    radial_nodes: usize,
    angular_nodes: usize,
) -> Result<f64> {
    let n = ctx.dim();
    let center = &ball.center.coords;
    let c_norm = ball.center.norm();
    let (constant, clip) = match f.as_scaled_indicator() {
        Some((c, b)) => (Some(c), Some(b)),
        None => (None, f.support()),
    };
    let dirs = sphere_directions(n, angular_nodes);
    let wlo = (c_norm - RADIAL_WINDOW).max(0.0);
    let whi = c_norm + RADIAL_WINDOW;
    let dens_scale = PI.powf(-(n as f64) / 2.0);
    let mut acc = 0.0;
    let mut y = [0.0f64; 3];
    for (xi, wxi) in &dirs {
        let mut s0 = wlo;
        let mut s1 = ball.radius.min(whi);
        if let Some(b) = clip {
            match ray_ball_interval(center, xi, b) {
                Some((a, b2)) => {
                    s0 = s0.max(a);
                    s1 = s1.min(b2);
                }
                None => continue,
            }
        }
        if s1 <= s0 {
            continue;
        }
        for (plo, phi_) in crate::geometry::panels(s0, s1, PANEL_WIDTH) {
            let rule = gauss_legendre(radial_nodes);
            let half = 0.5 * (phi_ - plo);
            let mid = 0.5 * (plo + phi_);
            for (t, w) in rule.nodes.iter().zip(rule.weights.iter()) {
                let s = mid + half * t;
                let mut y2 = 0.0;
                for i in 0..n {
                    y[i] = center[i] + s * xi[i];
                    y2 += y[i] * y[i];
                }
                let val = match constant {
                    Some(c) => c,
                    None => {
                        let v = f.eval(&y[..n]);
                        if !v.is_finite() {
                            return Err(Error::EvaluationFailed { at: y[..n].to_vec() });
                        }
                        v
                    }
                };
                acc += wxi * w * half * s.powi(n as i32 - 1) * val * dens_scale * (-y2).exp();
            }
        }
    }
    Ok(acc)
}

/// `int_{B(x, R)} g(y) |x - y|^{-alpha} dgamma(y)` in polar coordinates
/// centered at the singularity; the radial density `s^{n-1-alpha}` is
/// absorbed into a weighted rule so accuracy is uniform as `alpha -> n`.
pub fn integrate_singular(
    ctx: &GaussContext,
    g: &dyn RealFunction,
    x: &[f64],
    radius: f64,
    alpha: f64,
) -> Result<IntegralEstimate> {
    ctx.check_dim(x)?;
    let n = ctx.dim();
    if alpha >= n as f64 {
        return Err(Error::NonIntegrable { alpha, dim: n });
    }
    if n > 3 {
        return Err(Error::UnsupportedDimension { dim: n });
    }
    if !(radius > 0.0) {
        return Ok(IntegralEstimate { value: 0.0, error_estimate: 0.0, method: Method::Polar });
    }
    if let Some(terms) = g.linear_terms() {
        let mut value = 0.0;
        let mut err = 0.0;
        for (coef, term) in terms {
            let e = integrate_singular(ctx, term, x, radius, alpha)?;
            value += coef * e.value;
            err += coef.abs() * e.error_estimate;
        }
        return Ok(IntegralEstimate { value, error_estimate: err, method: Method::Polar });
    }
    let quad = &ctx.quad;
    let fine = polar_singular(ctx, g, x, radius, alpha, quad.radial_nodes, quad.angular_nodes)?;
    let coarse = polar_singular(
        ctx,
        g,
        x,
        radius,
        alpha,
        (quad.radial_nodes / 2).max(8),
        (quad.angular_nodes / 2).max(8),
    )?;
    Ok(IntegralEstimate {
        value: fine,
        error_estimate: (fine - coarse).abs(),
        method: Method::Polar,
    })
}

fn polar_singular(
    ctx: &GaussContext,
    g: &dyn RealFunction,
    x: &[f64],
    radius: f64,
    alpha: f64,
    radial_nodes: usize,
    angular_nodes: usize,
) -> Result<f64> {
    let n = ctx.dim();
    let lambda = n as f64 - 1.0 - alpha;
    let (constant, clip) = match g.as_scaled_indicator() {
        Some((c, b)) => (Some(c), Some(b)),
        None => (None, g.support()),
    };
    let dirs = sphere_directions(n, angular_nodes);
    let dens_scale = PI.powf(-(n as f64) / 2.0);
    let x_norm = crate::geometry::norm(x);
    let whi = x_norm + RADIAL_WINDOW;
    let mut acc = 0.0;
    let mut y = [0.0f64; 3];
    for (xi, wxi) in &dirs {
        let mut s0 = 0.0f64;
        let mut s1 = radius.min(whi);
        if let Some(b) = clip {
            match ray_ball_interval(x, xi, b) {
                Some((a, b2)) => {
                    s0 = s0.max(a);
                    s1 = s1.min(b2);
                }
                None => continue,
            }
        }
        if s1 <= s0 {
            continue;
        }
        let mut eval_at = |s: f64, weight: f64, acc: &mut f64| -> Result<()> {
            let mut y2 = 0.0;
            for i in 0..n {
                y[i] = x[i] + s * xi[i];
                y2 += y[i] * y[i];
            }
            let val = match constant {
                Some(c) => c,
                None => {
                    let v = g.eval(&y[..n]);
                    if !v.is_finite() {
                        return Err(Error::EvaluationFailed { at: y[..n].to_vec() });
                    }
                    v
                }
            };
            *acc += wxi * weight * val * dens_scale * (-y2).exp();
            Ok(())
        };
        if s0 == 0.0 {
            // weighted rule on [0, cap]: weights absorb s^lambda
            let cap = s1.min(2.0);
            let rule = power_weight_rule(lambda, radial_nodes);
            let scale = cap.powf(lambda + 1.0);
            for (t, w) in rule.nodes.iter().zip(rule.weights.iter()) {
                eval_at(cap * t, w * scale, &mut acc)?;
            }
            if s1 > cap {
                for (plo, phi_) in crate::geometry::panels(cap, s1, PANEL_WIDTH) {
                    let gl = gauss_legendre(radial_nodes);
                    let half = 0.5 * (phi_ - plo);
                    let mid = 0.5 * (plo + phi_);
                    for (t, w) in gl.nodes.iter().zip(gl.weights.iter()) {
                        let s = mid + half * t;
                        eval_at(s, w * half * s.powf(lambda), &mut acc)?;
                    }
                }
            }
        } else {
            // singularity outside the domain: plain panels with the explicit weight
            for (plo, phi_) in crate::geometry::panels(s0, s1, PANEL_WIDTH) {
                let gl = gauss_legendre(radial_nodes);
                let half = 0.5 * (phi_ - plo);
                let mid = 0.5 * (plo + phi_);
                for (t, w) in gl.nodes.iter().zip(gl.weights.iter()) {
                    let s = mid + half * t;
                    eval_at(s, w * half * s.powf(lambda), &mut acc)?;
                }
            }
        }
    }
    Ok(acc)
}

/// Importance-sampled Monte Carlo estimate of `int_B f dgamma` with a
/// uniform-in-ball proposal (exact analytic normalization, so the oracle is
/// fully independent of the error-function and Bessel paths). Deterministic
/// given the seed; `error_estimate` is three standard errors.
pub fn mc_integrate(
    ctx: &GaussContext,
    f: &dyn RealFunction,
    ball: &Ball,
) -> Result<IntegralEstimate> {
    ctx.check_dim(&ball.center.coords)?;
    let n = ctx.dim();
    let r = ball.radius;
    if r <= 0.0 {
        return Ok(IntegralEstimate {
            value: 0.0,
            error_estimate: 0.0,
            method: Method::MonteCarlo,
        });
    }
    let rng = CounterRng::new(ctx.quad.seed);
    let samples = ctx.quad.mc_samples;
    let vol = unit_ball_volume(n) * r.powi(n as i32);
    let dens_scale = PI.powf(-(n as f64) / 2.0);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut y = vec![0.0f64; n];
    for i in 0..samples {
        let stream = i as u64;
        // direction from normalized Gaussians, radius from u^{1/n}
        let mut norm2 = 0.0;
        for (j, yj) in y.iter_mut().enumerate() {
            let gj = rng.standard_normal(stream, j as u64);
            *yj = gj;
            norm2 += gj * gj;
        }
        let norm = norm2.sqrt().max(1e-300);
        let u = rng.uniform_open(stream, 2 * n as u64);
        let s = r * u.powf(1.0 / n as f64);
        let mut y2 = 0.0;
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = ball.center.coords[j] + s * *yj / norm;
            y2 += *yj * *yj;
        }
        let fv = f.eval(&y);
        if !fv.is_finite() {
            return Err(Error::EvaluationFailed { at: y.clone() });
        }
        let w = vol * fv * dens_scale * (-y2).exp();
        // Welford accumulation in a fixed order
        let k = (i + 1) as f64;
        let delta = w - mean;
        mean += delta / k;
        m2 += delta * (w - mean);
    }
    let var = if samples > 1 { m2 / (samples as f64 - 1.0) } else { 0.0 };
    let se = (var / samples as f64).sqrt();
    Ok(IntegralEstimate {
        value: mean,
        error_estimate: 3.0 * se,
        method: Method::MonteCarlo,
    })
}

/// Angular kernel `A_n(t) = int_{S^{n-1}} e^{-t xi_1} dsigma(xi)`:
/// `2 cosh t` (n=1), `2 pi I0(t)` (n=2), `4 pi sinh(t)/t` (n=3), and a
/// one-dimensional polar-angle quadrature for n >= 4.
pub fn angular_kernel(n: usize, t: f64, quad: &QuadratureConfig) -> f64 {
    debug_assert!(t >= 0.0);
    crate::geometry::angular_scaled(n, t, quad) * t.exp()
}

/// `e^{-t} A_n(t)`, safe for large `t`.
pub fn angular_kernel_scaled(n: usize, t: f64, quad: &QuadratureConfig) -> f64 {
    crate::geometry::angular_scaled(n, t, quad)
}

/// Interval of ray parameters `s >= 0` with `origin + s dir` inside `ball`,
/// or `None` if the ray misses it.
pub(crate) fn ray_ball_interval(origin: &[f64], dir: &[f64], ball: &Ball) -> Option<(f64, f64)> {
    let n = origin.len();
    let mut b_dot = 0.0;
    let mut dist2 = 0.0;
    for i in 0..n {
        let d = ball.center.coords[i] - origin[i];
        b_dot += dir[i] * d;
        dist2 += d * d;
    }
    let disc = b_dot * b_dot - (dist2 - ball.radius * ball.radius);
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let lo = (b_dot - sq).max(0.0);
    let hi = b_dot + sq;
    if hi <= lo {
        None
    } else {
        Some((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::FunctionSpec;
    use crate::geometry::Point;

    fn ctx(dim: usize) -> GaussContext {
        GaussContext::new(dim, QuadratureConfig::default()).unwrap()
    }

    fn ball(center: Vec<f64>, r: f64) -> Ball {
        Ball::new(Point::new(center).unwrap(), r).unwrap()
    }

    #[test]
    fn constant_integrates_to_ball_measure() {
        for dim in [1usize, 2, 3] {
            let c = ctx(dim);
            let mut center = vec![0.0; dim];
            center[0] = 1.2;
            let b = ball(center, 0.6);
            let one = FunctionSpec::constant(1.0);
            let est = integrate_gauss(&c, &one, &b).unwrap();
            let want = c.gauss_ball(&b).unwrap();
            assert!(
                ((est.value - want) / want).abs() < 1e-9,
                "dim {dim}: {} vs {want}",
                est.value
            );
        }
    }

    #[test]
    fn odd_function_integrates_to_zero() {
        let c = ctx(1);
        let b = ball(vec![0.0], 1.5);
        let coord = FunctionSpec::coordinate(0);
        let est = integrate_gauss(&c, &coord, &b).unwrap();
        assert!(est.value.abs() < 1e-12);
        let c2 = ctx(2);
        let b2 = ball(vec![0.0, 0.0], 1.0);
        let est2 = integrate_gauss(&c2, &FunctionSpec::coordinate(1), &b2).unwrap();
        assert!(est2.value.abs() < 1e-12);
    }

    #[test]
    fn gaussian_second_moment() {
        // int |y|^2 dgamma over R = 1/2 in dimension 1
        let c = ctx(1);
        let b = ball(vec![0.0], 12.0);
        let est = integrate_gauss(&c, &FunctionSpec::squared_norm(), &b).unwrap();
        assert!((est.value - 0.5).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn singular_golden_value_1d() {
        // 2/sqrt(pi) int_0^1 s^{-1/2} e^{-s^2} ds, minted by the adaptive oracle
        let c = ctx(1);
        let one = FunctionSpec::constant(1.0);
        let est = integrate_singular(&c, &one, &[0.0], 1.0, 0.5).unwrap();
        let want = 1.906596539764324966;
        assert!(
            ((est.value - want) / want).abs() < 1e-10,
            "{} vs {want}",
            est.value
        );
    }

    #[test]
    fn singular_zero_and_alpha_zero() {
        let c = ctx(1);
        let zero = FunctionSpec::constant(0.0);
        assert_eq!(integrate_singular(&c, &zero, &[0.3], 0.8, 0.5).unwrap().value, 0.0);
        let one = FunctionSpec::constant(1.0);
        let sing = integrate_singular(&c, &one, &[0.3], 0.8, 0.0).unwrap();
        let b = ball(vec![0.3], 0.8);
        let plain = integrate_gauss(&c, &one, &b).unwrap();
        assert!((sing.value - plain.value).abs() < 1e-10);
    }

    #[test]
    fn singular_rejects_nonintegrable() {
        let c = ctx(2);
        let one = FunctionSpec::constant(1.0);
        assert!(matches!(
            integrate_singular(&c, &one, &[0.0, 0.0], 1.0, 2.0),
            Err(Error::NonIntegrable { .. })
        ));
    }

    #[test]
    fn mc_agrees_with_closed_form() {
        let c = ctx(1);
        let b = ball(vec![0.0], 1.0);
        let one = FunctionSpec::constant(1.0);
        let est = mc_integrate(&c, &one, &b).unwrap();
        let want = 0.842700792949714869;
        assert!(
            (est.value - want).abs() <= est.error_estimate.max(1e-4),
            "{} +- {} vs {want}",
            est.value,
            est.error_estimate
        );
    }

    #[test]
    fn deterministic_and_mc_estimates_overlap() {
        // |integrate_gauss - mc_integrate| <= err(gauss) + err(mc)
        let c = ctx(2);
        let cases: Vec<(FunctionSpec, Ball)> = vec![
            (FunctionSpec::constant(1.0), ball(vec![0.0, 0.0], 1.0)),
            (FunctionSpec::squared_norm(), ball(vec![0.8, -0.3], 0.6)),
            (
                FunctionSpec::gaussian_bump(Point::new(vec![0.5, 0.5]).unwrap(), 0.5),
                ball(vec![0.4, 0.6], 0.8),
            ),
        ];
        for (f, b) in &cases {
            let det = integrate_gauss(&c, f, b).unwrap();
            let mc = mc_integrate(&c, f, b).unwrap();
            let budget = det.error_estimate + mc.error_estimate;
            assert!(
                (det.value - mc.value).abs() <= budget.max(1e-6),
                "{} vs {} (budget {budget})",
                det.value,
                mc.value
            );
        }
    }

    #[test]
    fn mc_deterministic_given_seed() {
        let c = ctx(2);
        let b = ball(vec![0.5, -0.3], 0.7);
        let f = FunctionSpec::squared_norm();
        let a = mc_integrate(&c, &f, &b).unwrap();
        let b2 = mc_integrate(&c, &f, &b).unwrap();
        assert_eq!(a.value.to_bits(), b2.value.to_bits());
        assert_eq!(a.error_estimate.to_bits(), b2.error_estimate.to_bits());
    }

    #[test]
    fn mc_scales_linearly_for_constants() {
        let c = ctx(2);
        let b = ball(vec![0.2, 0.1], 0.9);
        let one = mc_integrate(&c, &FunctionSpec::constant(1.0), &b).unwrap();
        let three = mc_integrate(&c, &FunctionSpec::constant(3.0), &b).unwrap();
        assert!((three.value - 3.0 * one.value).abs() < 1e-12);
    }

    #[test]
    fn refinement_convergence() {
        // doubling the resolution moves the result by less than rel_tol
        let mut cfg = QuadratureConfig::default();
        cfg.radial_nodes = 24;
        cfg.angular_nodes = 16;
        let c1 = GaussContext::new(2, cfg.clone()).unwrap();
        let c2 = GaussContext::new(2, cfg.refined()).unwrap();
        let b = ball(vec![0.8, -0.4], 0.5);
        let f = FunctionSpec::gaussian_bump(Point::new(vec![0.7, -0.3]).unwrap(), 0.4);
        let v1 = integrate_gauss(&c1, &f, &b).unwrap().value;
        let v2 = integrate_gauss(&c2, &f, &b).unwrap().value;
        assert!(((v1 - v2) / v2).abs() < cfg.rel_tol, "{v1} vs {v2}");
    }

    #[test]
    fn angular_kernel_values() {
        let quad = QuadratureConfig::default();
        // t = 0 gives the surface area
        assert!((angular_kernel(2, 0.0, &quad) - 2.0 * PI).abs() < 1e-12);
        assert!((angular_kernel(3, 0.0, &quad) - 4.0 * PI).abs() < 1e-12);
        // golden values
        let a2 = angular_kernel(2, 1.0, &quad);
        assert!(((a2 - 7.954926521012845275) / a2).abs() < 1e-13);
        let a3 = angular_kernel(3, 2.0, &quad);
        assert!(((a3 - 22.788236025775750908) / a3).abs() < 1e-13);
        // n = 4 numeric path vs n = 3-style sanity: positivity and monotonicity in t
        let a4a = angular_kernel(4, 0.5, &quad);
        let a4b = angular_kernel(4, 1.5, &quad);
        assert!(a4a > 0.0 && a4b > a4a);
        // scaled form consistency
        let t = 3.0;
        assert!(
            (angular_kernel_scaled(2, t, &quad) * t.exp() - angular_kernel(2, t, &quad)).abs()
                < 1e-10
        );
    }

    #[test]
    fn counter_rng_streams_are_stable() {
        let rng = CounterRng::new(7);
        let a = rng.uniform(3, 11);
        let b = rng.uniform(3, 11);
        assert_eq!(a.to_bits(), b.to_bits());
        let c = rng.uniform(3, 12);
        assert_ne!(a.to_bits(), c.to_bits());
        // rough uniformity of the mean
        let mean: f64 = (0..10_000).map(|k| rng.uniform(0, k)).sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02, "{mean}");
        // normals have mean ~ 0, variance ~ 1
        let (mut m, mut v) = (0.0, 0.0);
        let count = 10_000;
        for k in 0..count {
            let g = rng.standard_normal(1, k);
            m += g;
            v += g * g;
        }
        m /= count as f64;
        v /= count as f64;
        assert!(m.abs() < 0.05, "{m}");
        assert!((v - 1.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn ray_ball_intervals() {
        let b = ball(vec![2.0, 0.0], 1.0);
        let hit = ray_ball_interval(&[0.0, 0.0], &[1.0, 0.0], &b).unwrap();
        assert!((hit.0 - 1.0).abs() < 1e-12 && (hit.1 - 3.0).abs() < 1e-12);
        assert!(ray_ball_interval(&[0.0, 0.0], &[0.0, 1.0], &b).is_none());
        assert!(ray_ball_interval(&[0.0, 0.0], &[-1.0, 0.0], &b).is_none());
    }
}
