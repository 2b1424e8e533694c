//! Gauss-measure geometry: the admissibility function `m`, admissible ball
//! classes, ball measures, the volume kernel `V(x, y)` with its radial
//! derivative, doubling ratios, and the greedy covering construction.
//!
//! Everything measure-valued is available in log form; magnitudes are only
//! exponentiated at the end so that far-out centers never overflow.

use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::rules::gauss_legendre;
use crate::special::{erf, ln_erfc, sphere_area};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Covering-lemma contraction constant.
pub const KAPPA: f64 = 1.0 / 20.0;

/// Beyond this distance from the center norm, the Gaussian factor of a
/// radial integrand is below 1e-31 and the window is clipped.
const RADIAL_WINDOW: f64 = 8.5;

/// A point of Euclidean space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("point coordinates {coords:?}")));
        }
        Ok(Self { coords })
    }

    pub fn origin(dim: usize) -> Self {
        Self { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn dist(&self, other: &Point) -> f64 {
        dist(&self.coords, &other.coords)
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn dist(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// A Euclidean ball given by center and radius. Radius zero is permitted
/// only as a degenerate query value; it is never an admissible ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be finite and nonnegative, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        dist(&self.center.coords, x) < self.radius
    }

    /// Concentric dilate `kappa * B`.
    pub fn dilate(&self, kappa: f64) -> Ball {
        Ball { center: self.center.clone(), radius: kappa * self.radius }
    }
}

/// The class parameter `a > 0` of the admissible balls: `B` belongs to the
/// class iff `0 < r_B <= a * m(c_B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleClass {
    pub a: f64,
}

impl AdmissibleClass {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "class parameter must be positive and finite, got {a}"
            )));
        }
        Ok(Self { a })
    }
}

/// Admissibility function `m(x) = min(1, 1/|x|)`: the maximal scale of a
/// local ball centered at `x`.
pub fn admissibility_radius(x: &[f64]) -> f64 {
    let r = norm(x);
    if r <= 1.0 {
        1.0
    } else {
        1.0 / r
    }
}

/// Membership predicate of the class: `0 < r_B <= a * m(c_B)`.
pub fn is_admissible(ball: &Ball, class: AdmissibleClass) -> bool {
    ball.radius > 0.0 && ball.radius <= class.a * admissibility_radius(&ball.center.coords)
}

/// Dimension plus quadrature configuration; evaluates all Gauss-measure
/// quantities. Immutable after construction and safe to share across
/// threads.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussContext {
    dim: usize,
    pub quad: QuadratureConfig,
}

impl GaussContext {
    /// Builds a context and verifies that the computed total mass of the
    /// measure is 1 within quadrature tolerance.
    pub fn new(dim: usize, quad: QuadratureConfig) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        quad.validate()?;
        let ctx = Self { dim, quad };
        let total = ctx.gauss_ball(&Ball {
            center: Point::origin(dim),
            radius: 20.0,
        })?;
        let tol = ctx.quad.rel_tol.max(1e-10);
        if (total - 1.0).abs() > tol {
            return Err(Error::Config(format!(
                "total measure check failed: gamma(R^n) computed as {total}"
            )));
        }
        Ok(ctx)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(())
    }

    /// Gauss measure of a ball, in `[0, 1]`.
    ///
    /// Dimension 1 reduces to the error-function closed form; higher
    /// dimensions use the radial-angular reduction with the scaled angular
    /// kernel, so no intermediate quantity overflows.
    pub fn gauss_ball(&self, ball: &Ball) -> Result<f64> {
        self.check_dim(&ball.center.coords)?;
        if !ball.radius.is_finite() {
            return Err(Error::NonFinite(format!("ball radius {}", ball.radius)));
        }
        Ok(self.ball_measure_radial(ball.center.norm(), ball.radius))
    }

    /// `ln gamma(B)`; `-inf` for a degenerate radius.
    pub fn log_gauss_ball(&self, ball: &Ball) -> Result<f64> {
        self.check_dim(&ball.center.coords)?;
        if !ball.radius.is_finite() {
            return Err(Error::NonFinite(format!("ball radius {}", ball.radius)));
        }
        Ok(self.log_ball_measure_radial(ball.center.norm(), ball.radius))
    }

    /// Measure of a ball at center distance `c >= 0` from the origin.
    pub(crate) fn ball_measure_radial(&self, c: f64, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if self.dim == 1 {
            return gauss_interval_1d(c - r, c + r);
        }
        self.log_ball_measure_radial(c, r).exp()
    }

    pub(crate) fn log_ball_measure_radial(&self, c: f64, r: f64) -> f64 {
        if r <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if self.dim == 1 {
            return log_gauss_interval_1d(c - r, c + r);
        }
        let n = self.dim;
        let lo = (c - RADIAL_WINDOW).max(0.0);
        let hi = r.min(c + RADIAL_WINDOW);
        if hi <= lo {
            // Entire ball sits beyond the clip window; evaluate on the
            // nearest sliver instead of returning zero mass.
            let lo2 = r * (1.0 - 1e-6);
            let v = self.radial_mass_log(c, lo2, r, n);
            return v;
        }
        self.radial_mass_log(c, lo, hi, n)
    }

    /// `ln of pi^{-n/2} int_lo^hi s^{n-1} e^{-(s-c)^2} \hat A_n(2cs) ds`
    /// with the peak factored out for stability.
    fn radial_mass_log(&self, c: f64, lo: f64, hi: f64, n: usize) -> f64 {
        // distance from c to the integration window
        let d = if c < lo {
            lo - c
        } else if c > hi {
            c - hi
        } else {
            0.0
        };
        let nodes = self.quad.radial_nodes.max(8);
        let mut acc = 0.0;
        for (a, b) in panels(lo, hi, 2.0) {
            let gl = gauss_legendre(nodes);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (t, w) in gl.nodes.iter().zip(gl.weights.iter()) {
                let s = mid + half * t;
                let u = s - c;
                let expo = d * d - u * u;
                acc += w * half * s.powi(n as i32 - 1) * expo.exp() * angular_scaled(n, 2.0 * c * s, &self.quad);
            }
        }
        if acc <= 0.0 {
            return f64::NEG_INFINITY;
        }
        -(n as f64 / 2.0) * PI.ln() - d * d + acc.ln()
    }

    /// `V(x, y) = gamma(B(x, |x-y|))`.
    pub fn v_kernel(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_dim(&x.coords)?;
        self.check_dim(&y.coords)?;
        Ok(self.ball_measure_radial(x.norm(), x.dist(y)))
    }

    pub fn log_v_kernel(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_dim(&x.coords)?;
        self.check_dim(&y.coords)?;
        Ok(self.log_ball_measure_radial(x.norm(), x.dist(y)))
    }

    /// Radial form of the kernel: `V` as a function of `|x|` and `s = |x-y|`.
    pub fn v_kernel_radial(&self, x_norm: f64, s: f64) -> f64 {
        self.ball_measure_radial(x_norm, s)
    }

    pub fn log_v_kernel_radial(&self, x_norm: f64, s: f64) -> f64 {
        self.log_ball_measure_radial(x_norm, s)
    }

    /// The `i`-th partial derivative of `V(x, y)` in `y`, by analytic radial
    /// differentiation:
    ///
    /// `dV/dy_i = pi^{-n/2} (y_i - x_i) |x-y|^{n-2} e^{-(s-|x|)^2} \hat A_n(2|x|s)`.
    ///
    /// The sign is the one validated by the finite-difference oracle; it is
    /// the derivative of `s -> gamma(B(x, s))` composed with `ds/dy_i`.
    pub fn v_kernel_partial(&self, x: &Point, y: &Point, i: usize) -> Result<f64> {
        self.check_dim(&x.coords)?;
        self.check_dim(&y.coords)?;
        if i >= self.dim {
            return Err(Error::InvalidParameter(format!(
                "coordinate index {i} out of range for dimension {}",
                self.dim
            )));
        }
        let s = x.dist(y);
        if s == 0.0 {
            return Err(Error::DegenerateBall(
                "kernel derivative undefined at y = x".into(),
            ));
        }
        let c = x.norm();
        let n = self.dim;
        let u = s - c;
        let val = PI.powf(-(n as f64) / 2.0)
            * (y.coords[i] - x.coords[i])
            * s.powi(n as i32 - 2)
            * (-u * u).exp()
            * angular_scaled(n, 2.0 * c * s, &self.quad);
        Ok(val)
    }

    /// `gamma(B*_tau) / gamma(B)` where the enlargement is the exact
    /// concentric ball `B(c_B, (2 tau + 1) r_B)`.
    pub fn doubling_ratio(&self, ball: &Ball, tau: f64) -> Result<f64> {
        self.check_dim(&ball.center.coords)?;
        if ball.radius <= 0.0 {
            return Err(Error::DegenerateBall(
                "doubling ratio needs a positive radius".into(),
            ));
        }
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be >= 0, got {tau}")));
        }
        let c = ball.center.norm();
        let lg_big = self.log_ball_measure_radial(c, (2.0 * tau + 1.0) * ball.radius);
        let lg = self.log_ball_measure_radial(c, ball.radius);
        Ok((lg_big - lg).exp())
    }
}

/// Upper bound `(2 tau + 1)^n e^{4a(tau+1) + a^2}` for the doubling ratio
/// over the class with parameter `a`.
pub fn doubling_bound(n: usize, a: f64, tau: f64) -> f64 {
    (2.0 * tau + 1.0).powi(n as i32) * (4.0 * a * (tau + 1.0) + a * a).exp()
}

/// Scaled angular kernel `\hat A_n(t) = e^{-t} A_n(t)` where
/// `A_n(t) = int_{S^{n-1}} e^{-t xi_1} dsigma(xi)`.
pub(crate) fn angular_scaled(n: usize, t: f64, quad: &QuadratureConfig) -> f64 {
    debug_assert!(t >= 0.0);
    match n {
        1 => 1.0 + (-2.0 * t).exp(),
        2 => 2.0 * PI * crate::special::bessel_i0_scaled(t),
        3 => {
            // 4 pi sinh(t)/t scaled: 4 pi (1 - e^{-2t}) / (2t)
            if t < 1e-8 {
                4.0 * PI * (1.0 - t + 2.0 * t * t / 3.0)
            } else {
                4.0 * PI * (-(-2.0 * t).exp_m1()) / (2.0 * t)
            }
        }
        _ => {
            // |S^{n-2}| int_0^pi e^{-t(1 + cos th)} sin^{n-2} th dth
            let rule = gauss_legendre(quad.angular_nodes.max(16));
            let area = sphere_area(n - 1);
            let half = PI / 2.0;
            let mut acc = 0.0;
            for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
                let th = half * (1.0 + x);
                acc += w * half * (-t * (1.0 + th.cos())).exp() * th.sin().powi(n as i32 - 2);
            }
            area * acc
        }
    }
}

/// Splits `[lo, hi]` into panels of width at most `max_width`.
pub(crate) fn panels(lo: f64, hi: f64, max_width: f64) -> Vec<(f64, f64)> {
    if hi <= lo {
        return vec![];
    }
    let count = ((hi - lo) / max_width).ceil().max(1.0) as usize;
    let step = (hi - lo) / count as f64;
    (0..count)
        .map(|k| (lo + k as f64 * step, lo + (k + 1) as f64 * step))
        .collect()
}

/// One-dimensional Gauss measure of the interval `[lo, hi]`,
/// `(erf(hi) - erf(lo)) / 2`, with cancellation-safe branches.
pub(crate) fn gauss_interval_1d(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    // reduce to 0 <= |lo| <= hi by symmetry
    let (lo, hi) = if lo.abs() > hi.abs() { (-hi, -lo) } else { (lo, hi) };
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    if h * (1.0 + c.abs()) < 0.01 {
        return narrow_interval_mass(c.abs(), h);
    }
    if lo >= 0.0 {
        0.5 * (crate::special::erfc(lo) - crate::special::erfc(hi))
    } else {
        0.5 * (erf(hi) - erf(lo))
    }
}

pub(crate) fn log_gauss_interval_1d(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return f64::NEG_INFINITY;
    }
    let (lo, hi) = if lo.abs() > hi.abs() { (-hi, -lo) } else { (lo, hi) };
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    if h * (1.0 + c.abs()) < 0.01 {
        let c = c.abs();
        return narrow_interval_mass_scaled(c, h).ln() - c * c;
    }
    if lo >= 3.0 {
        // deep same-sign tail: difference of scaled erfc values
        let la = ln_erfc(lo);
        let lb = ln_erfc(hi);
        la + (-(lb - la).exp()).ln_1p() - std::f64::consts::LN_2
    } else {
        gauss_interval_1d(lo, hi).ln()
    }
}

/// Mass of `[c-h, c+h]` for small `h`:
/// `(2h e^{-c^2}/sqrt(pi)) (1 + (2c^2-1) h^2/3 + ...)`.
fn narrow_interval_mass(c: f64, h: f64) -> f64 {
    narrow_interval_mass_scaled(c, h) * (-c * c).exp()
}

fn narrow_interval_mass_scaled(c: f64, h: f64) -> f64 {
    let c2 = c * c;
    let h2 = h * h;
    let series = 1.0
        + (2.0 * c2 - 1.0) * h2 / 3.0
        + (2.0 * c2 * c2 / 3.0 - 2.0 * c2 + 0.5) * h2 * h2 / 5.0
        + (4.0 * c2 * c2 * c2 / 45.0 - 2.0 * c2 * c2 / 3.0 + c2 - 1.0 / 6.0) * h2 * h2 * h2 / 7.0;
    2.0 * h / PI.sqrt() * series
}

/// Axis-aligned box region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn cube(dim: usize, half_width: f64) -> Self {
        Self { lo: vec![-half_width; dim], hi: vec![half_width; dim] }
    }
}

/// Result of the greedy covering construction: disjoint inner balls
/// `B(x_j, kappa m(x_j)/4)` whose concentric dilates `B(x_j, kappa m(x_j))`
/// cover every lattice test point of the region.
#[derive(Debug, Clone)]
pub struct CoveringFamily {
    pub centers: Vec<Vec<f64>>,
    pub kappa: f64,
    pub inner_radii: Vec<f64>,
    pub cover_radii: Vec<f64>,
    pub region: BoxRegion,
    pub spacing: f64,
}

impl CoveringFamily {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

struct CellGrid {
    cell: f64,
    map: HashMap<[i64; 3], Vec<usize>>,
}

impl CellGrid {
    fn new(cell: f64) -> Self {
        Self { cell, map: HashMap::new() }
    }

    fn key(&self, p: &[f64]) -> [i64; 3] {
        let mut k = [0i64; 3];
        for (i, c) in p.iter().enumerate().take(3) {
            k[i] = (c / self.cell).floor() as i64;
        }
        k
    }

    fn insert(&mut self, p: &[f64], idx: usize) {
        self.map.entry(self.key(p)).or_default().push(idx);
    }

    /// Visits indices in all cells within `radius` of `p` (in the sup metric).
    fn query<'a>(&'a self, p: &[f64], radius: f64, dim: usize) -> impl Iterator<Item = usize> + 'a {
        let reach = (radius / self.cell).ceil() as i64;
        let base = self.key(p);
        let mut cells = Vec::new();
        let range = |d: usize| -> std::ops::RangeInclusive<i64> {
            if d < dim {
                (base[d] - reach)..=(base[d] + reach)
            } else {
                0..=0
            }
        };
        for i in range(0) {
            for j in range(1) {
                for k in range(2) {
                    cells.push([i, j, k]);
                }
            }
        }
        cells
            .into_iter()
            .filter_map(move |c| self.map.get(&c))
            .flatten()
            .copied()
    }
}

/// Greedy covering construction on a lattice of candidate centers.
///
/// Candidates are visited by increasing `|x|` (ties broken lexicographically)
/// and accepted when the inner ball `B(x, kappa m(x)/4)` is disjoint from
/// every previously accepted inner ball. After selection, every lattice
/// point must lie in some cover ball `B(x_j, kappa m(x_j))`; otherwise the
/// construction fails, signalling that the spacing is too coarse.
pub fn build_covering(
    ctx: &GaussContext,
    region: &BoxRegion,
    spacing: f64,
) -> Result<CoveringFamily> {
    let n = ctx.dim();
    if region.lo.len() != n || region.hi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: region.lo.len() });
    }
    if !(spacing > 0.0) {
        return Err(Error::InvalidParameter("spacing must be positive".into()));
    }
    if n > 3 {
        return Err(Error::UnsupportedDimension { dim: n });
    }

    // lattice sizes per axis
    let mut counts = Vec::with_capacity(n);
    for d in 0..n {
        if region.hi[d] <= region.lo[d] {
            return Err(Error::InvalidParameter("region must have positive extent".into()));
        }
        counts.push(((region.hi[d] - region.lo[d]) / spacing).floor() as usize + 1);
    }
    let total: usize = counts.iter().product();

    // candidate order: |x|^2 ascending, then lexicographic
    let mut order: Vec<(f64, u32)> = Vec::with_capacity(total);
    let coords_of = |mut flat: u32| -> Vec<f64> {
        let mut p = vec![0.0; n];
        for d in (0..n).rev() {
            let c = counts[d] as u32;
            p[d] = region.lo[d] + (flat % c) as f64 * spacing;
            flat /= c;
        }
        p
    };
    if total > u32::MAX as usize {
        return Err(Error::InvalidParameter("lattice too large".into()));
    }
    for flat in 0..total as u32 {
        let p = coords_of(flat);
        order.push((p.iter().map(|c| c * c).sum::<f64>(), flat));
    }
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // greedy acceptance with a spatial hash on inner balls
    let max_inner = KAPPA / 4.0;
    let mut grid = CellGrid::new(2.0 * max_inner);
    let mut centers: Vec<Vec<f64>> = Vec::new();
    let mut inner_radii: Vec<f64> = Vec::new();
    for &(_, flat) in &order {
        let p = coords_of(flat);
        let r = KAPPA * admissibility_radius(&p) / 4.0;
        let mut ok = true;
        for j in grid.query(&p, r + max_inner, n) {
            if dist(&p, &centers[j]) < r + inner_radii[j] {
                ok = false;
                break;
            }
        }
        if ok {
            grid.insert(&p, centers.len());
            centers.push(p);
            inner_radii.push(r);
        }
    }

    let cover_radii: Vec<f64> = inner_radii.iter().map(|r| 4.0 * r).collect();

    // coverage check over the lattice
    let mut covered = vec![false; total];
    let strides = {
        let mut s = vec![1usize; n];
        for d in (0..n - 1).rev() {
            s[d] = s[d + 1] * counts[d + 1];
        }
        s
    };
    for (j, c) in centers.iter().enumerate() {
        let rc = cover_radii[j];
        // lattice index window around the ball
        let mut idx_lo = vec![0usize; n];
        let mut idx_hi = vec![0usize; n];
        for d in 0..n {
            let lo_f = ((c[d] - rc - region.lo[d]) / spacing).floor().max(0.0);
            let hi_f = ((c[d] + rc - region.lo[d]) / spacing).ceil();
            idx_lo[d] = lo_f as usize;
            idx_hi[d] = (hi_f as usize).min(counts[d] - 1);
        }
        let mut idx = idx_lo.clone();
        'outer: loop {
            let p: Vec<f64> = (0..n)
                .map(|d| region.lo[d] + idx[d] as f64 * spacing)
                .collect();
            if dist(&p, c) < rc {
                let flat: usize = (0..n).map(|d| idx[d] * strides[d]).sum();
                covered[flat] = true;
            }
            for d in (0..n).rev() {
                idx[d] += 1;
                if idx[d] <= idx_hi[d] {
                    continue 'outer;
                }
                idx[d] = idx_lo[d];
                if d == 0 {
                    break 'outer;
                }
            }
        }
    }
    if let Some(flat) = covered.iter().position(|c| !c) {
        let p = coords_of(flat as u32);
        return Err(Error::CoveringFailed(format!(
            "lattice point {p:?} is not covered; spacing {spacing} too coarse"
        )));
    }

    Ok(CoveringFamily {
        centers,
        kappa: KAPPA,
        inner_radii,
        cover_radii,
        region: region.clone(),
        spacing,
    })
}

/// Maximum over lattice test points of the number of dilated cover balls
/// `tau * B_j` containing the point.
pub fn covering_overlap_count(family: &CoveringFamily, tau: f64) -> usize {
    let n = family.centers.first().map_or(0, |c| c.len());
    if n == 0 {
        return 0;
    }
    let region = &family.region;
    let spacing = family.spacing;
    let mut counts_axis = Vec::with_capacity(n);
    for d in 0..n {
        counts_axis.push(((region.hi[d] - region.lo[d]) / spacing).floor() as usize + 1);
    }
    let total: usize = counts_axis.iter().product();
    let strides = {
        let mut s = vec![1usize; n];
        for d in (0..n - 1).rev() {
            s[d] = s[d + 1] * counts_axis[d + 1];
        }
        s
    };
    let mut hits = vec![0u32; total];
    for (j, c) in family.centers.iter().enumerate() {
        let rc = tau * family.cover_radii[j];
        let mut idx_lo = vec![0usize; n];
        let mut idx_hi = vec![0usize; n];
        let mut empty = false;
        for d in 0..n {
            let lo_f = ((c[d] - rc - region.lo[d]) / spacing).ceil().max(0.0);
            let hi_f = ((c[d] + rc - region.lo[d]) / spacing).floor();
            if hi_f < lo_f {
                empty = true;
                break;
            }
            idx_lo[d] = lo_f as usize;
            idx_hi[d] = (hi_f as usize).min(counts_axis[d] - 1);
        }
        if empty {
            continue;
        }
        let mut idx = idx_lo.clone();
        'outer: loop {
            let p: Vec<f64> = (0..n)
                .map(|d| region.lo[d] + idx[d] as f64 * spacing)
                .collect();
            if dist(&p, c) < rc {
                let flat: usize = (0..n).map(|d| idx[d] * strides[d]).sum();
                hits[flat] += 1;
            }
            for d in (0..n).rev() {
                idx[d] += 1;
                if idx[d] <= idx_hi[d] {
                    continue 'outer;
                }
                idx[d] = idx_lo[d];
                if d == 0 {
                    break 'outer;
                }
            }
        }
    }
    hits.iter().copied().max().unwrap_or(0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureConfig;

    fn ctx(dim: usize) -> GaussContext {
        GaussContext::new(dim, QuadratureConfig::default()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn admissibility_radius_matches_definition() {
        assert_eq!(admissibility_radius(&[0.0, 0.0]), 1.0);
        assert_eq!(admissibility_radius(&[2.0]), 0.5);
        assert_eq!(admissibility_radius(&[3.0, 4.0]), 0.2);
        assert_eq!(admissibility_radius(&[0.5]), 1.0);
    }

    #[test]
    fn admissibility_predicate() {
        let a1 = AdmissibleClass::new(1.0).unwrap();
        let b = Ball::new(Point::origin(2), 1.0).unwrap();
        assert!(is_admissible(&b, a1));
        let far = Ball::new(Point::new(vec![2.0, 0.0]).unwrap(), 0.6).unwrap();
        assert!(!is_admissible(&far, a1));
        let degenerate = Ball::new(Point::origin(2), 0.0).unwrap();
        assert!(!is_admissible(&degenerate, a1));
    }

    #[test]
    fn gauss_ball_1d_closed_forms() {
        let c = ctx(1);
        let b = Ball::new(Point::origin(1), 1.0).unwrap();
        assert!(rel(c.gauss_ball(&b).unwrap(), 0.842700792949714869) < 1e-14);
        let b2 = Ball::new(Point::new(vec![2.0]).unwrap(), 0.5).unwrap();
        assert!(rel(c.gauss_ball(&b2).unwrap(), 0.016743950753622157) < 1e-13);
        let zero = Ball::new(Point::origin(1), 0.0).unwrap();
        assert_eq!(c.gauss_ball(&zero).unwrap(), 0.0);
        let big = Ball::new(Point::origin(1), 12.0).unwrap();
        assert!((c.gauss_ball(&big).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_ball_nd_reference_values() {
        // minted with 25-digit quadrature of the radial-angular reduction
        let c2 = ctx(2);
        let cases2 = [
            (vec![0.0, 0.0], 1.0, 0.632120558828557678),
            (vec![1.5, 0.0], 0.5, 0.030202536804344821),
            (vec![2.5, 0.0], 0.4, 4.491651609763044e-4),
            (vec![3.0, 4.0], 0.15, 4.040585809652672e-13),
        ];
        for (center, r, want) in cases2 {
            let b = Ball::new(Point::new(center).unwrap(), r).unwrap();
            let got = c2.gauss_ball(&b).unwrap();
            assert!(rel(got, want) < 1e-11, "n=2 {got} vs {want}");
        }
        let c3 = ctx(3);
        let cases3 = [
            (vec![0.0, 0.0, 0.0], 1.0, 0.427593295529120166),
            (vec![1.0, 1.0, 1.0], 0.4, 0.002619107488010504),
            (vec![2.0, 0.0, 0.0], 0.5, 0.002149950129462574),
        ];
        for (center, r, want) in cases3 {
            let b = Ball::new(Point::new(center).unwrap(), r).unwrap();
            let got = c3.gauss_ball(&b).unwrap();
            assert!(rel(got, want) < 1e-11, "n=3 {got} vs {want}");
        }
    }

    #[test]
    fn gauss_ball_total_mass() {
        for dim in [1, 2, 3] {
            let c = ctx(dim);
            let b = Ball::new(Point::origin(dim), 15.0).unwrap();
            assert!((c.gauss_ball(&b).unwrap() - 1.0).abs() < 1e-12, "dim {dim}");
        }
    }

    #[test]
    fn gauss_ball_monotone_in_radius() {
        for dim in [1, 2, 3] {
            let c = ctx(dim);
            let mut center = vec![0.0; dim];
            center[0] = 1.3;
            let mut prev = 0.0;
            for k in 1..=20 {
                let b = Ball::new(Point::new(center.clone()).unwrap(), 0.1 * k as f64).unwrap();
                let v = c.gauss_ball(&b).unwrap();
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn log_gauss_ball_consistent_and_far_out_finite() {
        for dim in [1, 2, 3] {
            let c = ctx(dim);
            let mut center = vec![0.0; dim];
            center[0] = 2.0;
            let b = Ball::new(Point::new(center.clone()).unwrap(), 0.3).unwrap();
            let lg = c.log_gauss_ball(&b).unwrap();
            assert!(rel(lg.exp(), c.gauss_ball(&b).unwrap()) < 1e-11);
            // far out: measure underflows but the log stays finite
            center[0] = 40.0;
            let far = Ball::new(Point::new(center).unwrap(), 0.02).unwrap();
            let lg_far = c.log_gauss_ball(&far).unwrap();
            assert!(lg_far.is_finite());
            assert!(lg_far < -1000.0);
        }
    }

    #[test]
    fn v_kernel_properties() {
        let c = ctx(2);
        let x = Point::new(vec![0.3, -0.2]).unwrap();
        assert_eq!(c.v_kernel(&x, &x).unwrap(), 0.0);
        // rotational slice: depends on y only through |x - y|
        let y1 = Point::new(vec![0.3 + 0.4, -0.2]).unwrap();
        let y2 = Point::new(vec![0.3, -0.2 + 0.4]).unwrap();
        let v1 = c.v_kernel(&x, &y1).unwrap();
        let v2 = c.v_kernel(&x, &y2).unwrap();
        assert!(rel(v1, v2) < 1e-12);
        // 1-d value
        let c1 = ctx(1);
        let v = c1
            .v_kernel(&Point::origin(1), &Point::new(vec![1.0]).unwrap())
            .unwrap();
        assert!(rel(v, 0.842700792949714869) < 1e-14);
    }

    #[test]
    fn v_kernel_partial_closed_form_1d() {
        let c = ctx(1);
        let x = Point::origin(1);
        let y = Point::new(vec![1.0]).unwrap();
        let d = c.v_kernel_partial(&x, &y, 0).unwrap();
        assert!(rel(d, 0.415107497420594703) < 1e-13, "{d}");
        assert!(c.v_kernel_partial(&x, &x, 0).is_err());
    }

    #[test]
    fn v_kernel_partial_matches_finite_differences() {
        for dim in [1usize, 2, 3] {
            let c = ctx(dim);
            // a few deterministic configurations per dimension
            let configs: Vec<(Vec<f64>, Vec<f64>)> = match dim {
                1 => vec![
                    (vec![0.0], vec![0.7]),
                    (vec![1.2], vec![0.9]),
                    (vec![-2.0], vec![-1.6]),
                ],
                2 => vec![
                    (vec![0.1, -0.3], vec![0.5, 0.2]),
                    (vec![1.5, 0.5], vec![1.2, 0.9]),
                ],
                _ => vec![
                    (vec![0.2, 0.1, -0.4], vec![0.5, -0.2, 0.1]),
                    (vec![1.0, 1.0, 0.5], vec![0.8, 1.2, 0.3]),
                ],
            };
            for (xc, yc) in configs {
                let x = Point::new(xc).unwrap();
                let y = Point::new(yc).unwrap();
                let s = x.dist(&y);
                let h = 1e-5 * s;
                for i in 0..dim {
                    let an = c.v_kernel_partial(&x, &y, i).unwrap();
                    let mut yp = y.clone();
                    let mut ym = y.clone();
                    yp.coords[i] += h;
                    ym.coords[i] -= h;
                    let fd =
                        (c.v_kernel(&x, &yp).unwrap() - c.v_kernel(&x, &ym).unwrap()) / (2.0 * h);
                    let denom = an.abs().max(1e-30);
                    assert!(
                        ((an - fd) / denom).abs() < 1e-4,
                        "dim {dim} i={i}: analytic {an} vs fd {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn doubling_ratio_examples() {
        let c = ctx(1);
        let b = Ball::new(Point::origin(1), 1.0).unwrap();
        // tau = 0: identical ball
        assert!(rel(c.doubling_ratio(&b, 0.0).unwrap(), 1.0) < 1e-13);
        // erf(3)/erf(1)
        let r = c.doubling_ratio(&b, 1.0).unwrap();
        assert!(rel(r, 1.186634589487886586) < 1e-12, "{r}");
        assert!(r <= doubling_bound(1, 1.0, 1.0));
        let zero = Ball::new(Point::origin(1), 0.0).unwrap();
        assert!(c.doubling_ratio(&zero, 1.0).is_err());
    }

    #[test]
    fn covering_single_center_near_origin() {
        let c = ctx(2);
        let region = BoxRegion::cube(2, 0.05);
        let fam = build_covering(&c, &region, 0.01).unwrap();
        // m = 1 on the region, cover radius kappa = 1/20 covers [-0.05, 0.05]^2
        assert!(!fam.is_empty());
        assert!(fam.cover_radii.iter().all(|&r| (r - KAPPA).abs() < 1e-12));
    }

    #[test]
    fn covering_1d_range() {
        let c = ctx(1);
        let region = BoxRegion::cube(1, 5.0);
        let fam = build_covering(&c, &region, 0.002).unwrap();
        // inner balls pairwise disjoint
        for i in 0..fam.len() {
            for j in (i + 1)..fam.len() {
                let d = dist(&fam.centers[i], &fam.centers[j]);
                assert!(d >= fam.inner_radii[i] + fam.inner_radii[j] - 1e-12);
            }
        }
        let overlap = covering_overlap_count(&fam, 4.0);
        assert!(overlap >= 1);
        assert!(overlap <= 64, "overlap {overlap}");
    }
}
