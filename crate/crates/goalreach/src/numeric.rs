//! Scalar numerical routines: adaptive Simpson quadrature, monotone
//! bisection, golden-section search, and grid-then-refine maximization.
//!
//! All solvers in this crate are deterministic compositions of these
//! primitives, so identical inputs always produce identical outputs.

use crate::error::{Error, Result};

/// Default tolerances and grid sizes used by the scalar solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Points in the dense scan of a scalar objective.
    pub grid_points: usize,
    /// Absolute quadrature tolerance.
    pub quad_tol: f64,
    /// Absolute x-tolerance for bisection and golden-section refinement.
    pub root_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_points: 4001,
            quad_tol: 1e-9,
            root_tol: 1e-10,
        }
    }
}

pub const MAX_SIMPSON_DEPTH: u32 = 50;

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`, with Richardson extrapolation of the final panel.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    debug_assert!(a < b, "adaptive_simpson: a={a} > b={b}");
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, MAX_SIMPSON_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Largest `x` in `[lo, hi]` with `pred(x)` true, assuming `pred` is
/// monotone (true on the left, false on the right) and `pred(lo)` holds.
/// Returns `hi` when `pred(hi)` holds.
pub fn sup_true<P: Fn(f64) -> bool>(pred: P, lo: f64, hi: f64, xtol: f64) -> f64 {
    debug_assert!(pred(lo), "sup_true: pred(lo) must hold");
    if pred(hi) {
        return hi;
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval no longer splits in f64
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Smallest `x` in `[lo, hi]` with `pred(x)` true, assuming `pred` is
/// monotone (false on the left, true on the right) and `pred(hi)` holds.
/// Returns `lo` when `pred(lo)` holds.
pub fn inf_true<P: Fn(f64) -> bool>(pred: P, lo: f64, hi: f64, xtol: f64) -> f64 {
    debug_assert!(pred(hi), "inf_true: pred(hi) must hold");
    if pred(lo) {
        return lo;
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Root of an increasing map `f` on `[lo, hi]`, located as the smallest
/// point where `f` becomes nonnegative. Errors when the root is not
/// bracketed.
pub fn root_increasing<F: Fn(f64) -> f64>(
    op: &'static str,
    f: F,
    lo: f64,
    hi: f64,
    xtol: f64,
) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::numeric(
            op,
            format!("root not bracketed on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}"),
        ));
    }
    Ok(inf_true(|x| f(x) >= 0.0, lo, hi, xtol))
}

/// Rightmost root of a continuous `f` on `[lo, hi]`: scan downward from
/// `hi` in `steps` uniform steps to bracket the rightmost sign change,
/// then bisect the bracket.
pub fn largest_root_scan<F: Fn(f64) -> f64>(
    op: &'static str,
    f: F,
    lo: f64,
    hi: f64,
    steps: usize,
    xtol: f64,
) -> Result<f64> {
    debug_assert!(steps >= 1);
    let h = (hi - lo) / steps as f64;
    let mut x_right = hi;
    let mut f_right = f(hi);
    if f_right == 0.0 {
        return Ok(hi);
    }
    for k in 1..=steps {
        let x_left = if k == steps { lo } else { hi - k as f64 * h };
        let f_left = f(x_left);
        if f_left * f_right <= 0.0 {
            let (mut a, mut b) = (x_left, x_right);
            let mut fa = f_left;
            while b - a > xtol {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = f(mid);
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            return Ok(0.5 * (a + b));
        }
        x_right = x_left;
        f_right = f_left;
    }
    Err(Error::numeric(
        op,
        format!("no sign change of the target map found on [{lo}, {hi}]"),
    ))
}

/// Golden-section maximization of `f` on `[a, b]`. Assumes `f` unimodal on
/// the interval; returns `(x, f(x))`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5)-1)/2
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > xtol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if !(a < c && c < d && d < b) {
            break;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Maximum of `f` over `[lo, hi]`: a dense scan of `n` uniform points plus
/// the points in `extra`, followed by golden-section refinement around the
/// best scanned point. Ties are broken toward the smallest `x`.
pub fn grid_refine_max<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    n: usize,
    extra: &[f64],
    xtol: f64,
) -> (f64, f64) {
    debug_assert!(n >= 2 && lo <= hi);
    if lo == hi {
        return (lo, f(lo));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut xs: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    xs.extend(extra.iter().copied().filter(|x| (lo..=hi).contains(x)));
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut best_x = xs[0];
    let mut best_f = f(best_x);
    for &x in &xs[1..] {
        let fx = f(x);
        if fx > best_f {
            best_f = fx;
            best_x = x;
        }
    }

    let (a, b) = ((best_x - step).max(lo), (best_x + step).min(hi));
    let (gx, gf) = golden_max(&f, a, b, xtol);
    if gf > best_f {
        (gx, gf)
    } else {
        (best_x, best_f)
    }
}
