//! Special functions.

/// Complementary error function, `1 − erf(x)`.
///
/// Backed by the msun algorithm (via `libm`), accurate to a few ulp over the
/// whole real line.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
