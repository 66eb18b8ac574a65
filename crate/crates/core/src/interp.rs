//! Cubic interpolation and low-order integration helpers shared by the
//! table modules.
//!
//! All tables in this crate are piecewise-smooth with derivative kinks at
//! integer arguments, so every stencil here is confined to a caller-supplied
//! index range that never straddles a kink.

/// Three-point Gauss-Legendre rule on [-1, 1]; exact through degree 5.
pub const GL3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// Cubic Lagrange interpolation of equally spaced `values` at fractional
/// index `x`, with the 4-point stencil confined to the inclusive index
/// range `[lo, hi]`.
pub fn cubic_confined(values: &[f64], lo: usize, hi: usize, x: f64) -> f64 {
    debug_assert!(hi >= lo + 3 && hi < values.len());
    debug_assert!(x >= lo as f64 - 1e-9 && x <= hi as f64 + 1e-9);
    let mut base = (x.floor() as usize).max(lo + 1) - 1;
    if base + 3 > hi {
        base = hi - 3;
    }
    let t = x - base as f64;
    let y = &values[base..base + 4];
    let t0 = t;
    let t1 = t - 1.0;
    let t2 = t - 2.0;
    let t3 = t - 3.0;
    (-y[0] * t1 * t2 * t3 + 3.0 * y[1] * t0 * t2 * t3 - 3.0 * y[2] * t0 * t1 * t3
        + y[3] * t0 * t1 * t2)
        / 6.0
}

/// Integral of the interpolating cubic over one grid step `[j, j+1]`
/// (in index units), stencil confined to `[lo, hi]`.
///
/// The weights are the exact integrals of the Lagrange basis over the
/// first, middle, or last step of a 4-point stencil.
pub fn cubic_step_integral(values: &[f64], lo: usize, hi: usize, j: usize) -> f64 {
    debug_assert!(j >= lo && j < hi && hi >= lo + 3);
    let mut base = j.max(lo + 1) - 1;
    if base + 3 > hi {
        base = hi - 3;
    }
    let y = &values[base..base + 4];
    let w: [f64; 4] = match j - base {
        0 => [9.0, 19.0, -5.0, 1.0],
        1 => [-1.0, 13.0, 13.0, -1.0],
        2 => [1.0, -5.0, 19.0, 9.0],
        _ => unreachable!(),
    };
    (w[0] * y[0] + w[1] * y[1] + w[2] * y[2] + w[3] * y[3]) / 24.0
}
