//! Independent reference integrators used by the verification suites. These
//! deliberately share no code with the production quadrature paths: adaptive
//! Simpson refinement on plain closures.

/// Adaptive Simpson integration of `f` on `[a, b]` to absolute tolerance
/// `tol`. Panics only on NaN evaluations.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    simpson_step(f, a, b, fa, fb, fm, simpson_val(a, b, fa, fm, fb), tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_val(a, m, fa, flm, fm);
    let right = simpson_val(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1)
    }
}

fn simpson_val(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}
