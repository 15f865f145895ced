//! Scalar solvers shared by the norm and conjugate machinery: bisection,
//! golden-section search on unimodal functions, and a log-log least
//! squares fit for decay exponents.

const GOLDEN: f64 = 0.618_033_988_749_894_8; // 1/phi

/// Smallest `x` in `[lo, hi]` with `pred(x)` true, assuming `pred` is
/// monotone (false then true). Both endpoints are trusted: `pred(hi)`
/// must hold.
pub fn bisect_boundary(pred: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    debug_assert!(lo <= hi);
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    hi
}

/// Solve `f(x) = target` for nondecreasing `f` by bisection.
pub fn bisect_increasing(
    f: impl Fn(f64) -> f64,
    target: f64,
    lo: f64,
    hi: f64,
    iters: usize,
) -> f64 {
    bisect_boundary(|x| f(x) >= target, lo, hi, iters)
}

/// Maximize a unimodal `f` on `[lo, hi]` by golden-section search.
/// Returns `(argmax, max)`.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        }
        if b - a <= f64::EPSILON * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
    }
    let xm = 0.5 * (a + b);
    let fm = f(xm);
    // keep the best of the three probes
    if f1 >= f2 && f1 >= fm {
        (x1, f1)
    } else if f2 >= fm {
        (x2, f2)
    } else {
        (xm, fm)
    }
}

/// Minimize a unimodal `f` on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let (x, v) = golden_max(|t| -f(t), lo, hi, iters);
    (x, -v)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    assert!(points.len() >= 2, "need at least two points for a fit");
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
