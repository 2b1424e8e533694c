//! Commutators of BMO functions with the local fractional integral and
//! maximal operators, plus the auxiliary kernel-weight-at-y operator.
//!
//! The maximal-operator commutators evaluate every ball functional on one
//! shared candidate grid and one shared node set per ball; the pointwise
//! inequalities between bracket and absolute variants then hold at the
//! quadrature level, not just in the limit.

use crate::error::Result;
use crate::functions::RealFunction;
use crate::geometry::{Ball, GaussContext, Point};
use crate::operators::{frac_integral_tilde, frac_kernel_integral, maximal_on_shared_grid, OperatorParams};
use serde::{Deserialize, Serialize};

/// Which commutator to evaluate (CLI dispatch surface).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommutatorKind {
    BracketITilde,
    AbsI,
    BracketM,
    AbsM,
    AuxT,
}

/// `|b(x) - b(.)| |f(.)|` with the support of `f`; every commutator
/// integrand shares this shape so differenced quantities see identical
/// quadrature nodes.
struct AbsDiffWeight<'a> {
    b: &'a dyn RealFunction,
    f: &'a dyn RealFunction,
    b_at_x: f64,
    support: Option<&'a Ball>,
}

impl RealFunction for AbsDiffWeight<'_> {
    fn eval(&self, y: &[f64]) -> f64 {
        (self.b_at_x - self.b.eval(y)).abs() * self.f.eval(y).abs()
    }
    fn support(&self) -> Option<&Ball> {
        self.support
    }
}

/// `|f|` pinned to the support of `f` itself.
struct AbsOf<'a> {
    f: &'a dyn RealFunction,
    support: Option<&'a Ball>,
}

impl RealFunction for AbsOf<'_> {
    fn eval(&self, y: &[f64]) -> f64 {
        self.f.eval(y).abs()
    }
    fn support(&self) -> Option<&Ball> {
        self.support
    }
}

/// `|b f|`, again pinned to the support of `f` so all three maximal
/// integrands use the same clipped rays.
struct AbsProduct<'a> {
    b: &'a dyn RealFunction,
    f: &'a dyn RealFunction,
    support: Option<&'a Ball>,
}

impl RealFunction for AbsProduct<'_> {
    fn eval(&self, y: &[f64]) -> f64 {
        (self.b.eval(y) * self.f.eval(y)).abs()
    }
    fn support(&self) -> Option<&Ball> {
        self.support
    }
}

/// `b f` (signed), for the integral-commutator difference.
struct SignedProduct<'a> {
    b: &'a dyn RealFunction,
    f: &'a dyn RealFunction,
    support: Option<&'a Ball>,
}

impl RealFunction for SignedProduct<'_> {
    fn eval(&self, y: &[f64]) -> f64 {
        self.b.eval(y) * self.f.eval(y)
    }
    fn support(&self) -> Option<&Ball> {
        self.support
    }
}

/// `[b, I~_a^beta](f)(x) = b(x) I~(f)(x) - I~(b f)(x)`.
pub fn commutator_bracket_i(
    ctx: &GaussContext,
    params: &OperatorParams,
    b: &dyn RealFunction,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<f64> {
    let b_at_x = b.eval(&x.coords);
    let term1 = frac_integral_tilde(ctx, params, f, x)?;
    let bf = SignedProduct { b, f, support: f.support() };
    let term2 = frac_integral_tilde(ctx, params, &bf, x)?;
    Ok(b_at_x * term1 - term2)
}

/// The nonnegative sublinear majorant
/// `int_{B(x, a m(x))} |b(x)-b(y)| |f(y)| V(x,y)^{beta-1} dgamma(y)`.
/// The factor `|b(x)-b(y)|` vanishes at the singularity for continuous `b`.
pub fn abs_commutator_i(
    ctx: &GaussContext,
    params: &OperatorParams,
    b: &dyn RealFunction,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<f64> {
    let g = AbsDiffWeight { b, f, b_at_x: b.eval(&x.coords), support: f.support() };
    frac_kernel_integral(ctx, params.a, params.beta, &g, x, false)
}

/// `[b, M_a^beta](f)(x) = b(x) M(f)(x) - M(b f)(x)`, both maxima on one
/// shared candidate grid.
pub fn commutator_bracket_m(
    ctx: &GaussContext,
    params: &OperatorParams,
    b: &dyn RealFunction,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<f64> {
    let b_at_x = b.eval(&x.coords);
    let absf = AbsOf { f, support: f.support() };
    let absbf = AbsProduct { b, f, support: f.support() };
    let maxima = maximal_on_shared_grid(
        ctx,
        params.a,
        params.beta,
        &[&absf, &absbf],
        &x.coords,
        &params.grid,
    )?;
    Ok(b_at_x * maxima[0] - maxima[1])
}

/// `sup_B gamma(B)^{beta-1} int_B |b(x)-b(y)||f(y)| dgamma(y)` over the
/// candidate grid.
pub fn abs_commutator_m(
    ctx: &GaussContext,
    params: &OperatorParams,
    b: &dyn RealFunction,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<f64> {
    let g = AbsDiffWeight { b, f, b_at_x: b.eval(&x.coords), support: f.support() };
    let maxima = maximal_on_shared_grid(ctx, params.a, params.beta, &[&g], &x.coords, &params.grid)?;
    Ok(maxima[0])
}

/// All three shared-grid maximal quantities at once:
/// `(b(x) M(f) - M(bf), abs commutator, M(f), M(bf))` computed from one
/// candidate sweep, so the bracket/abs inequalities are exact per node.
pub fn commutator_m_parts(
    ctx: &GaussContext,
    params: &OperatorParams,
    b: &dyn RealFunction,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<MaximalCommutatorParts> {
    let b_at_x = b.eval(&x.coords);
    let absf = AbsOf { f, support: f.support() };
    let absbf = AbsProduct { b, f, support: f.support() };
    let absdiff = AbsDiffWeight { b, f, b_at_x, support: f.support() };
    let maxima = maximal_on_shared_grid(
        ctx,
        params.a,
        params.beta,
        &[&absf, &absbf, &absdiff],
        &x.coords,
        &params.grid,
    )?;
    Ok(MaximalCommutatorParts {
        bracket: b_at_x * maxima[0] - maxima[1],
        abs: maxima[2],
        maximal_f: maxima[0],
        maximal_bf: maxima[1],
        b_at_x,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximalCommutatorParts {
    pub bracket: f64,
    pub abs: f64,
    pub maximal_f: f64,
    pub maximal_bf: f64,
    pub b_at_x: f64,
}

/// Auxiliary operator with the kernel weight at the integration variable:
/// `int_{B(x, a m(x))} |b(x)-b(y)||f(y)| [e^{-|y|^2}|x-y|^n]^{beta-1} dgamma(y)`.
pub fn aux_t(
    ctx: &GaussContext,
    params: &OperatorParams,
    b: &dyn RealFunction,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<f64> {
    let g = AbsDiffWeight { b, f, b_at_x: b.eval(&x.coords), support: f.support() };
    frac_kernel_integral(ctx, params.a, params.beta, &g, x, true)
}

/// Dispatch by kind.
pub fn apply_commutator(
    ctx: &GaussContext,
    params: &OperatorParams,
    kind: CommutatorKind,
    b: &dyn RealFunction,
    f: &dyn RealFunction,
    x: &Point,
) -> Result<f64> {
    match kind {
        CommutatorKind::BracketITilde => commutator_bracket_i(ctx, params, b, f, x),
        CommutatorKind::AbsI => abs_commutator_i(ctx, params, b, f, x),
        CommutatorKind::BracketM => commutator_bracket_m(ctx, params, b, f, x),
        CommutatorKind::AbsM => abs_commutator_m(ctx, params, b, f, x),
        CommutatorKind::AuxT => aux_t(ctx, params, b, f, x),
    }
}
