// f64 transcendental functions through libm so the crate builds without std
// and produces the same bits on every platform.

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `(e^x - 1) / x`, continuous through `x = 0`.
pub(crate) fn exprel(x: f64) -> f64 {
    if abs(x) < 1e-8 {
        1.0 + x / 2.0 + x * x / 6.0
    } else {
        libm::expm1(x) / x
    }
}

/// `(q^a - p^a) / a` for `0 < p <= q`, equal to `ln(q/p)` at `a = 0`.
pub(crate) fn power_difference(p: f64, q: f64, a: f64) -> f64 {
    let log_ratio = ln(q / p);
    pow(p, a) * log_ratio * exprel(a * log_ratio)
}
