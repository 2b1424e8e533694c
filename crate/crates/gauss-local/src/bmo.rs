//! BMO(gamma) and BLO_a(gamma) norm estimators over deterministic admissible
//! ball samples. All suprema are sample maxima, hence lower bounds; the
//! argmax ball is reported so converse checks can reuse the extremal ball.

use crate::error::{Error, Result};
use crate::functions::{
    ball_average, ess_inf_estimate, lp_norm, AbsDeviation, FunctionSpec, NormDomain, PowAbs,
    RealFunction,
};
use crate::geometry::{admissibility_radius, is_admissible, AdmissibleClass, Ball, GaussContext, Point};
use crate::operators::SupEstimate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Deterministic family of admissible balls: centers on a cubic lattice of
/// the given spacing within `|c| <= extent`, radii at the given fractions of
/// `a * m(c)`. Every generated ball satisfies the class membership predicate
/// exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSample {
    pub a: f64,
    pub extent: f64,
    pub spacing: f64,
    pub fractions: Vec<f64>,
    pub balls: Vec<Ball>,
}

impl BallSample {
    pub fn lattice(
        dim: usize,
        a: f64,
        extent: f64,
        spacing: f64,
        fractions: &[f64],
    ) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter("class parameter must be positive".into()));
        }
        if !(spacing > 0.0) || !(extent > 0.0) {
            return Err(Error::InvalidParameter("extent and spacing must be positive".into()));
        }
        if fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
            return Err(Error::InvalidParameter(
                "radius fractions must lie in (0, 1]".into(),
            ));
        }
        let class = AdmissibleClass::new(a)?;
        let k_max = (extent / spacing).floor() as i64;
        let mut balls = Vec::new();
        let mut idx = vec![-k_max; dim];
        'outer: loop {
            let center: Vec<f64> = idx.iter().map(|&k| k as f64 * spacing).collect();
            if center.iter().map(|c| c * c).sum::<f64>() <= extent * extent {
                let m = admissibility_radius(&center);
                for &frac in fractions {
                    let ball = Ball {
                        center: Point { coords: center.clone() },
                        radius: frac * a * m,
                    };
                    debug_assert!(is_admissible(&ball, class));
                    balls.push(ball);
                }
            }
            for d in (0..dim).rev() {
                idx[d] += 1;
                if idx[d] <= k_max {
                    continue 'outer;
                }
                idx[d] = -k_max;
                if d == 0 {
                    break 'outer;
                }
            }
        }
        Ok(Self { a, extent, spacing, fractions: fractions.to_vec(), balls })
    }

    /// Default sample used by the verification harness.
    pub fn standard(dim: usize, a: f64) -> Result<Self> {
        let spacing = match dim {
            1 => 0.25,
            2 => 0.6,
            _ => 1.0,
        };
        Self::lattice(dim, a, 5.0, spacing, &[0.25, 0.5, 0.75, 1.0])
    }

    /// Halved lattice spacing (refinement evidence).
    pub fn refined(&self, dim: usize) -> Result<Self> {
        Self::lattice(dim, self.a, self.extent, self.spacing / 2.0, &self.fractions)
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }
}

/// Mean oscillation of `f` on one ball, `(1/gamma(B)) int_B |f - f_B|`.
pub fn ball_oscillation(ctx: &GaussContext, f: &dyn RealFunction, ball: &Ball) -> Result<f64> {
    ball_oscillation_p(ctx, f, ball, 1.0)
}

/// `((1/gamma(B)) int_B |f - f_B|^p)^{1/p}`.
pub fn ball_oscillation_p(
    ctx: &GaussContext,
    f: &dyn RealFunction,
    ball: &Ball,
    p: f64,
) -> Result<f64> {
    let one = FunctionSpec::constant(1.0);
    let mass = crate::quadrature::integrate_gauss_value(ctx, &one, ball)?;
    if !(mass > 0.0) {
        return Err(Error::DegenerateBall(format!(
            "ball of radius {} has vanishing computed measure",
            ball.radius
        )));
    }
    let avg = crate::quadrature::integrate_gauss_value(ctx, f, ball)? / mass;
    let dev = AbsDeviation { inner: f, shift: avg };
    let powed = PowAbs { inner: &dev, p };
    let osc = crate::quadrature::integrate_gauss_value(ctx, &powed, ball)? / mass;
    Ok(osc.max(0.0).powf(1.0 / p))
}

/// BLO bracket of `f` on one ball: `f_B - (sampled essential infimum)`.
/// The essential-infimum estimate is one-sided (an upper bound of the true
/// infimum), so the bracket is a lower bound.
pub fn ball_blo_bracket(
    ctx: &GaussContext,
    f: &dyn RealFunction,
    ball: &Ball,
    essinf_samples: usize,
) -> Result<f64> {
    let avg = ball_average(ctx, f, ball)?;
    let inf = ess_inf_estimate(ctx, f, ball, essinf_samples)?;
    Ok(avg - inf)
}

fn sup_over_sample<F>(sample: &BallSample, per_ball: F) -> Result<SupEstimate>
where
    F: Fn(&Ball) -> Result<f64> + Sync,
{
    if sample.is_empty() {
        return Err(Error::InvalidParameter("ball sample is empty".into()));
    }
    let values: Result<Vec<f64>> = sample.balls.par_iter().map(|b| per_ball(b)).collect();
    let values = values?;
    let mut best = SupEstimate { value: f64::NEG_INFINITY, argmax: None };
    for (b, v) in sample.balls.iter().zip(values) {
        if v > best.value {
            best = SupEstimate { value: v, argmax: Some(b.clone()) };
        }
    }
    Ok(best)
}

/// `||f||_*`: the sampled mean-oscillation supremum over the class-1 family.
pub fn bmo_star_norm(ctx: &GaussContext, f: &dyn RealFunction, sample: &BallSample) -> Result<f64> {
    Ok(bmo_star_detailed(ctx, f, sample)?.value)
}

pub fn bmo_star_detailed(
    ctx: &GaussContext,
    f: &dyn RealFunction,
    sample: &BallSample,
) -> Result<SupEstimate> {
    sup_over_sample(sample, |b| ball_oscillation(ctx, f, b))
}

/// `||f||_BMO = ||f||_* + ||f||_{L^1}` (whole-space L^1 term).
pub fn bmo_norm(ctx: &GaussContext, f: &dyn RealFunction, sample: &BallSample) -> Result<f64> {
    let star = bmo_star_norm(ctx, f, sample)?;
    let l1 = lp_norm(ctx, f, 1.0, &NormDomain::whole_space())?;
    Ok(star + l1)
}

/// p-oscillation norm over a class-`a` sample.
pub fn bmo_star_p_norm(
    ctx: &GaussContext,
    f: &dyn RealFunction,
    sample: &BallSample,
    p: f64,
) -> Result<f64> {
    if p < 1.0 {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    Ok(sup_over_sample(sample, |b| ball_oscillation_p(ctx, f, b, p))?.value)
}

/// Detailed BLO norm: the sampled bracket supremum plus the L^1 term. A
/// negative bracket on some ball is a sampling artifact and is flagged, not
/// clamped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BloDetail {
    pub value: f64,
    pub l1_term: f64,
    pub max_bracket: f64,
    pub min_bracket: f64,
    pub negative_bracket_seen: bool,
}

pub fn blo_norm(
    ctx: &GaussContext,
    f: &dyn RealFunction,
    sample: &BallSample,
    essinf_samples: usize,
) -> Result<f64> {
    Ok(blo_norm_detailed(ctx, f, sample, essinf_samples)?.value)
}

pub fn blo_norm_detailed(
    ctx: &GaussContext,
    f: &dyn RealFunction,
    sample: &BallSample,
    essinf_samples: usize,
) -> Result<BloDetail> {
    if sample.is_empty() {
        return Err(Error::InvalidParameter("ball sample is empty".into()));
    }
    let brackets: Result<Vec<f64>> = sample
        .balls
        .par_iter()
        .map(|b| ball_blo_bracket(ctx, f, b, essinf_samples))
        .collect();
    let brackets = brackets?;
    let max_bracket = brackets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_bracket = brackets.iter().copied().fold(f64::INFINITY, f64::min);
    let l1 = lp_norm(ctx, f, 1.0, &NormDomain::whole_space())?;
    Ok(BloDetail {
        value: l1 + max_bracket,
        l1_term: l1,
        max_bracket,
        min_bracket,
        negative_bracket_seen: min_bracket < 0.0,
    })
}
