//! Finite-difference oracles used by the test suites.
//!
//! These stay independent of the tape implementation on purpose: they are
//! the reference that gradients and jets are checked against.

/// Central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Five-point stencil for the first derivative, O(h⁴) truncation.
pub fn stencil_d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Five-point stencil for the second derivative, O(h⁴) truncation.
pub fn stencil_d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

/// Relative error with an absolute floor so that near-zero expected values
/// do not blow up the ratio.
pub fn rel_err(got: f64, expected: f64) -> f64 {
    let denom = expected.abs().max(got.abs()).max(1e-12);
    (got - expected).abs() / denom
}

/// Step size scaled to the magnitude of `x`, as used by the gradient checks.
pub fn fd_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}
