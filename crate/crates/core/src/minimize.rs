// Bounded scalar minimization: golden-section narrowing followed by
// bisection on the sign of the derivative.

const INV_PHI: f64 = 0.618_033_988_749_894_9;
// golden phase stops once the bracket is this fraction of the interval
const GOLDEN_WIDTH: f64 = 1e-4;
const MAX_STEPS: usize = 400;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Minimum {
    pub x: f64,
    pub fx: f64,
}

/// Minimizes a unimodal `f` on `[lo, hi]`. `df` only needs the right sign.
///
/// The golden phase also stops when the two interior values agree to
/// `objective_tol`; bisection then refines to a relative width of 1e-13.
pub(crate) fn minimize<F, D>(f: F, df: D, lo: f64, hi: f64, objective_tol: f64) -> Minimum
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..MAX_STEPS {
        if b - a <= GOLDEN_WIDTH * (hi - lo) || (fc - fd).abs() <= objective_tol {
            break;
        }
        if fc < fd || fd.is_nan() {
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
    }

    if !(df(a) < 0.0) {
        return Minimum { x: a, fx: f(a) };
    }
    if !(df(b) > 0.0) {
        return Minimum { x: b, fx: f(b) };
    }
    for _ in 0..MAX_STEPS {
        if b - a <= 1e-13 * a.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (a + b);
        let slope = df(mid);
        if slope > 0.0 {
            b = mid;
        } else if slope < 0.0 {
            a = mid;
        } else {
            a = mid;
            b = mid;
        }
    }
    let x = 0.5 * (a + b);
    Minimum { x, fx: f(x) }
}
