// Float helpers that `core` does not provide without std.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `a <= b` up to [`crate::EPS`] scaled by the magnitude of the operands.
#[inline]
pub(crate) fn le(a: f64, b: f64) -> bool {
    a <= b + crate::EPS * (1.0 + b.abs().max(a.abs()))
}
