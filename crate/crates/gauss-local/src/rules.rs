//! Quadrature rule construction: Gauss-Legendre and Gauss-Jacobi nodes via
//! the Golub-Welsch eigenvalue method, plus deterministic direction sets on
//! the unit sphere. Rules are cached globally; construction is O(n^2) per
//! rule and happens once.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// A one-dimensional quadrature rule: paired nodes and positive weights.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss-Legendre rule on `[-1, 1]` with `n` nodes.
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    jacobi_rule(0.0, 0.0, n)
}

/// Gauss-Jacobi rule for the weight `(1-x)^a (1+x)^b` on `[-1, 1]`.
///
/// The returned weights absorb the weight function: `sum w_i f(x_i)`
/// approximates `int_{-1}^{1} (1-x)^a (1+x)^b f(x) dx`, exactly for
/// polynomials `f` of degree `< 2n`.
pub fn jacobi_rule(a: f64, b: f64, n: usize) -> Arc<Rule> {
    assert!(n >= 1);
    assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64, usize), Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (a.to_bits(), b.to_bits(), n);
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return Arc::clone(r);
    }
    let rule = Arc::new(build_jacobi(a, b, n));
    cache.lock().unwrap().insert(key, Arc::clone(&rule));
    rule
}

/// Rule for `int_0^1 s^lambda f(s) ds` with `lambda > -1`, weights again
/// absorbing the power weight. Scale by `R^(lambda+1)` and map `s -> R s`
/// for an interval `[0, R]`.
pub fn power_weight_rule(lambda: f64, n: usize) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (lambda.to_bits(), n);
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return Arc::clone(r);
    }
    // int_0^1 s^lambda f(s) ds with s = (1+x)/2:
    // = 2^{-lambda-1} int_{-1}^{1} (1+x)^lambda f((1+x)/2) dx
    let base = jacobi_rule(0.0, lambda, n);
    let scale = 0.5f64.powf(lambda + 1.0);
    let rule = Arc::new(Rule {
        nodes: base.nodes.iter().map(|x| 0.5 * (1.0 + x)).collect(),
        weights: base.weights.iter().map(|w| w * scale).collect(),
    });
    cache.lock().unwrap().insert(key, Arc::clone(&rule));
    rule
}

fn build_jacobi(a: f64, b: f64, n: usize) -> Rule {
    // Recurrence coefficients of the monic Jacobi polynomials.
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let ab = a + b;
    diag[0] = (b - a) / (ab + 2.0);
    for k in 1..n {
        let kk = k as f64;
        let denom = (2.0 * kk + ab) * (2.0 * kk + ab + 2.0);
        diag[k] = (b * b - a * a) / denom;
    }
    // mu0 = int (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
    let mu0 = 2f64.powf(ab + 1.0) * beta_fn(a + 1.0, b + 1.0);
    for k in 1..n {
        let kk = k as f64;
        let num = 4.0 * kk * (kk + a) * (kk + b) * (kk + ab);
        let den =
            (2.0 * kk + ab).powi(2) * (2.0 * kk + ab + 1.0) * (2.0 * kk + ab - 1.0);
        off[k - 1] = (num / den).sqrt();
    }
    let (nodes, first_components) = tridiag_eigen(&mut diag, &mut off);
    let mut pairs: Vec<(f64, f64)> = nodes
        .iter()
        .zip(first_components.iter())
        .map(|(&x, &z)| (x, mu0 * z * z))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

fn beta_fn(p: f64, q: f64) -> f64 {
    (ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)).exp()
}

/// Lanczos approximation of `ln Gamma`, accurate to ~1e-14 for `x > 0`.
fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    debug_assert!(x > 0.0);
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// Returns eigenvalues and the first component of each normalized
/// eigenvector (all that Golub-Welsch needs).
fn tridiag_eigen(diag: &mut [f64], off: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    if n == 1 {
        return (diag.to_vec(), z);
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tridiagonal QL failed to converge");
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - bb;
                // rotate the tracked eigenvector row
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    (diag.to_vec(), z)
}

/// Deterministic unit direction set on `S^{n-1}` with per-direction surface
/// weights summing to `|S^{n-1}|`.
///
/// - `n = 1`: the two points, weight 1 each;
/// - `n = 2`: `count` equally spaced angles (midpoint rule, spectrally
///   accurate for periodic integrands);
/// - `n = 3`: Gauss-Legendre in the polar cosine crossed with equally spaced
///   azimuths.
pub fn sphere_directions(n: usize, count: usize) -> Vec<(Vec<f64>, f64)> {
    match n {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => {
            let m = count.max(4);
            let w = 2.0 * std::f64::consts::PI / m as f64;
            (0..m)
                .map(|j| {
                    let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
                    (vec![th.cos(), th.sin()], w)
                })
                .collect()
        }
        3 => {
            let mp = (count / 2).max(4);
            let ma = count.max(8);
            let gl = gauss_legendre(mp);
            let wphi = 2.0 * std::f64::consts::PI / ma as f64;
            let mut out = Vec::with_capacity(mp * ma);
            for (u, wu) in gl.nodes.iter().zip(gl.weights.iter()) {
                let rho = (1.0 - u * u).max(0.0).sqrt();
                for j in 0..ma {
                    let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / ma as f64;
                    out.push((vec![rho * phi.cos(), rho * phi.sin(), *u], wu * wphi));
                }
            }
            out
        }
        _ => panic!("deterministic sphere directions support n in {{1,2,3}}"),
    }
}

/// Fibonacci-lattice unit directions (no weights), used for deterministic
/// search grids rather than quadrature.
pub fn search_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let m = count.max(2);
            (0..m)
                .map(|j| {
                    let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect()
        }
        3 => {
            let m = count.max(3);
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            (0..m)
                .map(|j| {
                    let u = 1.0 - 2.0 * (j as f64 + 0.5) / m as f64;
                    let rho = (1.0 - u * u).max(0.0).sqrt();
                    let phi = 2.0 * std::f64::consts::PI * (j as f64 / golden).fract();
                    vec![rho * phi.cos(), rho * phi.sin(), u]
                })
                .collect()
        }
        _ => panic!("search directions support n in {{1,2,3}}"),
    }
}
