//! Perturbation bounds for functional-calculus filters and the checks that
//! exercise them.
//!
//! The central estimate is [`theorem1_bound`]. The `check_*` functions
//! measure both sides of each intermediate inequality on concrete matrices,
//! [`stability_sweep`] runs the perturbation experiment and
//! [`per_index_instability_demo`] contrasts index-based filters with
//! functional calculus near a degenerate eigenvalue pair.

mod demo;
mod sweep;
mod verify;

pub use demo::{per_index_instability_demo, ControlReport, InstabilityReport};
pub use sweep::{
    certified_seminorm, loglog_slope, magnitude_summary, random_signals, stability_sweep,
    MagnitudeSummary, SeminormSource, SignalSource, StabilityRecord, SweepConfig,
    DEFAULT_RANDOM_SIGNALS, PROJECTION_ORDER, PROJECTION_POINTS,
};
pub use verify::{
    path_difference, random_rational, random_spec, random_symmetric, run_verify, SuiteFailure,
    SuiteResult, VerifyConfig, VerifyReport,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filters::apply_exact;
use crate::filters::{filter_matrix, FilterSpec, SpectralContext};
use crate::graph::{permute_shift, permute_signal, Permutation, ShiftOperator};
use crate::linalg::{
    cayley_transform, resolvent_at_minus_i, spectral_norm, spectral_norm_real,
    spectral_norm_symmetric, vec_dist, vec_norm, Cx, Matrix,
};

/// Relative slack granted to every certified inequality.
pub const CERTIFICATION_TOL: f64 = 1e-9;

/// `seminorm · ((norm_shift + 1) · norm_e / (1 - norm_e) + norm_e)`.
pub fn theorem1_bound(seminorm: f64, norm_shift: f64, norm_e: f64) -> Result<f64> {
    if !(norm_e >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "perturbation norm must be nonnegative, got {norm_e}"
        )));
    }
    if norm_e >= 1.0 {
        return Err(Error::PerturbationTooLarge(norm_e));
    }
    if !(seminorm >= 0.0) || !(norm_shift >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "seminorm and shift norm must be nonnegative, got {seminorm} and {norm_shift}"
        )));
    }
    Ok(seminorm * (cayley_distance_bound(norm_shift, norm_e)))
}

fn cayley_distance_bound(norm_shift: f64, norm_e: f64) -> f64 {
    (norm_shift + 1.0) * norm_e / (1.0 - norm_e) + norm_e
}

/// `||g(Δ) - g(Δ')||` in the spectral norm.
pub fn op_distance(spec: &FilterSpec, s: &ShiftOperator, s2: &ShiftOperator) -> Result<f64> {
    if s.n() != s2.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: s2.n(),
        });
    }
    let a = filter_matrix(spec, s)?;
    let b = filter_matrix(spec, s2)?;
    Ok(spectral_norm(&a.sub(&b)))
}

/// Both sides of an inequality `lhs <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarginReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl MarginReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        MarginReport {
            lhs,
            rhs,
            holds: lhs <= rhs * (1.0 + CERTIFICATION_TOL),
        }
    }
}

/// Both sides of an equality and their absolute difference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EqualityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl EqualityReport {
    /// `residual <= tol · (1 + lhs)`.
    pub fn within(&self, tol: f64) -> bool {
        self.residual <= tol * (1.0 + self.lhs)
    }
}

fn same_square(a: &Matrix, b: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.rows(),
        });
    }
    Ok(())
}

/// `||B^l - D^l|| <= l · C^{l-1} · ||B - D||` with `C = max(||B||, ||D||)`.
pub fn check_lemma1(b: &Matrix, d: &Matrix, l: u32) -> Result<MarginReport> {
    same_square(b, d)?;
    if l == 0 {
        return Ok(MarginReport::new(0.0, 0.0));
    }
    let c = spectral_norm_symmetric(b).max(spectral_norm_symmetric(d));
    // powers built by matmul are symmetric only up to rounding
    let lhs = spectral_norm_real(&b.pow(l).sub(&d.pow(l)));
    let rhs = l as f64 * c.powi(l as i32 - 1) * spectral_norm_symmetric(&b.sub(d));
    Ok(MarginReport::new(lhs, rhs))
}

/// `||f(Δ) - g(Δ)||` against `max_k |f(λ_k) - g(λ_k)|`.
pub fn check_lemma2(f: &FilterSpec, g: &FilterSpec, s: &ShiftOperator) -> Result<EqualityReport> {
    let ctx = SpectralContext::new(s)?;
    let cf = ctx.coefficients(f)?;
    let cg = ctx.coefficients(g)?;
    let diff: Vec<Cx> = cf.iter().zip(&cg).map(|(a, b)| *a - *b).collect();
    let lhs = spectral_norm(&ctx.matrix_from_coefficients(&diff));
    let rhs = diff.iter().map(|z| z.abs()).fold(0.0, f64::max);
    Ok(EqualityReport {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

fn perturbation_norm(s: &ShiftOperator, s2: &ShiftOperator) -> Result<f64> {
    same_square(s.matrix(), s2.matrix())?;
    let e = spectral_norm_symmetric(&s2.matrix().sub(s.matrix()));
    if e >= 1.0 {
        return Err(Error::PerturbationTooLarge(e));
    }
    Ok(e)
}

/// `||(Δ + i)^{-1} - (Δ' + i)^{-1}|| <= ||E|| / (1 - ||E||)`.
pub fn check_resolvent_bound(s: &ShiftOperator, s2: &ShiftOperator) -> Result<MarginReport> {
    let e = perturbation_norm(s, s2)?;
    let r1 = resolvent_at_minus_i(s.matrix())?;
    let r2 = resolvent_at_minus_i(s2.matrix())?;
    Ok(MarginReport::new(
        spectral_norm(&r1.sub(&r2)),
        e / (1.0 - e),
    ))
}

/// `||C(Δ) - C(Δ')|| <= (||Δ|| + 1) ||E|| / (1 - ||E||) + ||E||`.
pub fn check_cayley_contraction(s: &ShiftOperator, s2: &ShiftOperator) -> Result<MarginReport> {
    let e = perturbation_norm(s, s2)?;
    let c1 = cayley_transform(s.matrix())?;
    let c2 = cayley_transform(s2.matrix())?;
    let norm_shift = spectral_norm_symmetric(s.matrix());
    Ok(MarginReport::new(
        spectral_norm(&c1.sub(&c2)),
        cayley_distance_bound(norm_shift, e),
    ))
}

/// `||g(PΔPᵀ) Pf - P g(Δ) f|| / ||g(Δ) f||`, with `0/0` read as 0.
pub fn check_equivariance(
    spec: &FilterSpec,
    s: &ShiftOperator,
    p: &Permutation,
    f: &[Cx],
) -> Result<f64> {
    if matches!(spec, FilterSpec::PerIndex(_)) {
        return Err(Error::WrongVariant {
            expected: "a filter with a scalar response",
        });
    }
    let base = apply_exact(spec, s, f)?;
    let moved = apply_exact(spec, &permute_shift(s, p)?, &permute_signal(f, p)?)?;
    let expected = permute_signal(&base, p)?;
    let num = vec_dist(&moved, &expected);
    let den = vec_norm(&base);
    Ok(if num == 0.0 { 0.0 } else { num / den })
}
