//! Reconstructed order-3 filters for the stability experiment: a low-pass
//! polynomial, a low-pass Cayley filter and an all-pass rational filter.

use super::FilterSpec;
use crate::error::{Error, Result};
use crate::linalg::{solve_complex, CMatrix, Cx};

const FIT_GRID: usize = 256;

/// Least-squares polynomial of degree `order` fitted to `exp(-2λ / hi)` on
/// a uniform grid of `[lo, hi]`.
pub fn lowpass_polynomial(order: usize, band: (f64, f64)) -> Result<FilterSpec> {
    let (lo, hi) = band;
    if !(hi > 0.0) || !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "low-pass fit needs 0 < hi and lo < hi, got [{lo}, {hi}]"
        )));
    }
    // fit in t = λ / hi to keep the normal equations well conditioned
    let ts: Vec<f64> = (0..FIT_GRID)
        .map(|k| (lo + (hi - lo) * k as f64 / (FIT_GRID - 1) as f64) / hi)
        .collect();
    let m = order + 1;
    let gram = CMatrix::from_fn(m, m, |i, j| {
        Cx::real(ts.iter().map(|t| t.powi((i + j) as i32)).sum())
    });
    let rhs = CMatrix::from_fn(m, 1, |i, _| {
        Cx::real(ts.iter().map(|t| t.powi(i as i32) * (-2.0 * t).exp()).sum())
    });
    let a = solve_complex(&gram, &rhs)?;
    let coeffs = (0..m)
        .map(|k| Cx::real(a[(k, 0)].re / hi.powi(k as i32)))
        .collect();
    FilterSpec::polynomial(coeffs)
}

/// Coefficients of `(1 + iλ/ρ)^order`.
fn binomial_imag(order: usize, rho: f64) -> Vec<Cx> {
    let mut coeffs = vec![Cx::ONE];
    let step = Cx::new(0.0, 1.0 / rho);
    for _ in 0..order {
        let mut next = vec![Cx::ZERO; coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k] += c;
            next[k + 1] += c * step;
        }
        coeffs = next;
    }
    coeffs
}

/// All-pass `(1 - iλ/ρ)^order / (1 + iλ/ρ)^order`: `|g(λ)| = 1` on the real line.
pub fn allpass_rational(order: usize, rho: f64) -> Result<FilterSpec> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "all-pass scale must be positive, got {rho}"
        )));
    }
    let den = binomial_imag(order, rho);
    let num = den.iter().map(|c| c.conj()).collect();
    FilterSpec::rational(num, den)
}

/// Low-pass Cayley filter `Re Σ_l (-1)^l (L+1-l) / S · C(λ)^l`, `S = Σ (L+1-l)`:
/// value 1 at `λ = 0` (where `C = -1`).
pub fn lowpass_cayley(order: usize) -> Result<FilterSpec> {
    let total: f64 = (1..=order + 1).map(|k| k as f64).sum();
    let coeffs = (0..=order)
        .map(|l| {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            Cx::real(sign * (order + 1 - l) as f64 / total)
        })
        .collect();
    FilterSpec::cayley(coeffs, true)
}
