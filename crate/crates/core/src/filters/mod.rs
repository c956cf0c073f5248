//! Filter specifications and their application paths.
//!
//! * exact: eigendecompose `Δ` and scale each graph-Fourier coefficient,
//!   either by index ([`FilterSpec::PerIndex`]) or by `g(λ_n)`;
//! * spatial: compose, combine and invert `Δ` directly (Horner in `Δ`,
//!   one dense solve for rational responses, Horner in `C(Δ)` for Cayley
//!   responses), with no eigendecomposition.

mod apply;
mod cayley;
mod json;
pub mod presets;

pub use apply::{apply_exact, apply_spatial, filter_matrix, SpectralContext};
pub use cayley::{
    cayley_project, cayley_project_real, cayley_seminorm, circle_coefficients, pad_polynomial,
    pad_response, pad_support, projected_seminorm, CayleySeminorm, ScalarResponse,
    SeminormEstimate, Tail, DEFAULT_PAD_TRANSITION, DEFAULT_QUADRATURE_POINTS,
};
pub use json::FilterFile;

use crate::error::{Error, Result};
use crate::linalg::Cx;

/// Denominator magnitudes at or below this count as poles.
pub const POLE_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub enum FilterSpec {
    /// Coefficient `g_n` for the `n`-th eigenpair (eigenvalues ascending).
    PerIndex(Vec<Cx>),
    /// `Σ c_l λ^l`
    Polynomial(Vec<Cx>),
    /// `(Σ c_l λ^l) / (Σ d_l λ^l)`
    Rational { num: Vec<Cx>, den: Vec<Cx> },
    /// `Σ c_l C(λ)^l`, or its real part when `real_part` is set.
    Cayley { coeffs: Vec<Cx>, real_part: bool },
}

impl FilterSpec {
    pub fn polynomial(coeffs: Vec<Cx>) -> Result<Self> {
        non_empty(&coeffs, "polynomial")?;
        Ok(FilterSpec::Polynomial(coeffs))
    }

    pub fn polynomial_real(coeffs: &[f64]) -> Result<Self> {
        Self::polynomial(coeffs.iter().map(|&c| Cx::real(c)).collect())
    }

    pub fn rational(num: Vec<Cx>, den: Vec<Cx>) -> Result<Self> {
        non_empty(&num, "numerator")?;
        non_empty(&den, "denominator")?;
        if den.iter().all(|d| *d == Cx::ZERO) {
            return Err(Error::InvalidArgument(
                "denominator is identically zero".into(),
            ));
        }
        Ok(FilterSpec::Rational { num, den })
    }

    pub fn cayley(coeffs: Vec<Cx>, real_part: bool) -> Result<Self> {
        non_empty(&coeffs, "cayley")?;
        Ok(FilterSpec::Cayley { coeffs, real_part })
    }

    pub fn per_index(coeffs: Vec<Cx>) -> Self {
        FilterSpec::PerIndex(coeffs)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FilterSpec::PerIndex(_) => Ok(()),
            FilterSpec::Polynomial(c) => non_empty(c, "polynomial"),
            FilterSpec::Rational { num, den } => {
                Self::rational(num.clone(), den.clone()).map(|_| ())
            }
            FilterSpec::Cayley { coeffs, .. } => non_empty(coeffs, "cayley"),
        }?;
        let finite = match self {
            FilterSpec::PerIndex(c)
            | FilterSpec::Polynomial(c)
            | FilterSpec::Cayley { coeffs: c, .. } => c.iter().all(|z| z.is_finite()),
            FilterSpec::Rational { num, den } => num.iter().chain(den).all(|z| z.is_finite()),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "non-finite filter coefficient".into(),
            ))
        }
    }

    /// Order of the response (highest power).
    pub fn order(&self) -> usize {
        match self {
            FilterSpec::PerIndex(c) => c.len(),
            FilterSpec::Polynomial(c) | FilterSpec::Cayley { coeffs: c, .. } => {
                c.len().saturating_sub(1)
            }
            FilterSpec::Rational { num, den } => num.len().max(den.len()).saturating_sub(1),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            FilterSpec::PerIndex(_) => "per_index",
            FilterSpec::Polynomial(_) => "polynomial",
            FilterSpec::Rational { .. } => "rational",
            FilterSpec::Cayley { .. } => "cayley",
        }
    }

    /// True when `g` maps reals to reals, so real signals stay real.
    pub fn is_real_valued(&self) -> bool {
        let real = |c: &[Cx]| c.iter().all(|z| z.im == 0.0);
        match self {
            FilterSpec::PerIndex(c) | FilterSpec::Polynomial(c) => real(c),
            FilterSpec::Rational { num, den } => real(num) && real(den),
            FilterSpec::Cayley { real_part, .. } => *real_part,
        }
    }
}

fn non_empty(c: &[Cx], what: &str) -> Result<()> {
    if c.is_empty() {
        Err(Error::InvalidArgument(format!(
            "{what} coefficient list is empty"
        )))
    } else {
        Ok(())
    }
}

pub(crate) fn horner(coeffs: &[Cx], z: Cx) -> Cx {
    coeffs.iter().rev().fold(Cx::ZERO, |acc, &c| acc * z + c)
}

/// The scalar response `g(λ)`.
pub fn evaluate_scalar(spec: &FilterSpec, lambda: f64) -> Result<Cx> {
    match spec {
        FilterSpec::PerIndex(_) => Err(Error::NoScalarResponse),
        FilterSpec::Polynomial(c) => Ok(horner(c, Cx::real(lambda))),
        FilterSpec::Rational { num, den } => {
            let d = horner(den, Cx::real(lambda));
            if d.abs() <= POLE_TOL {
                return Err(Error::PoleAtLambda(lambda));
            }
            Ok(horner(num, Cx::real(lambda)) / d)
        }
        FilterSpec::Cayley { coeffs, real_part } => {
            let v = horner(coeffs, Cx::cayley(lambda));
            Ok(if *real_part { Cx::real(v.re) } else { v })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_examples() {
        let p = FilterSpec::polynomial_real(&[0.0, 1.0]).unwrap();
        assert_eq!(evaluate_scalar(&p, 5.0).unwrap(), Cx::real(5.0));

        let c = FilterSpec::cayley(vec![Cx::ZERO, Cx::ONE], false).unwrap();
        assert!((evaluate_scalar(&c, 1.0).unwrap() - Cx::new(0.0, -1.0)).abs() < 1e-15);

        let r = FilterSpec::rational(vec![Cx::ONE], vec![Cx::ONE, Cx::ONE]).unwrap();
        assert_eq!(evaluate_scalar(&r, 3.0).unwrap(), Cx::real(0.25));
    }

    #[test]
    fn scalar_errors() {
        let r = FilterSpec::rational(vec![Cx::ONE], vec![Cx::ONE, Cx::ONE]).unwrap();
        assert!(matches!(
            evaluate_scalar(&r, -1.0),
            Err(Error::PoleAtLambda(_))
        ));
        let pi = FilterSpec::per_index(vec![Cx::ONE; 3]);
        assert!(matches!(
            evaluate_scalar(&pi, 0.0),
            Err(Error::NoScalarResponse)
        ));
        assert!(FilterSpec::rational(vec![Cx::ONE], vec![Cx::ZERO, Cx::ZERO]).is_err());
        assert!(FilterSpec::polynomial(vec![]).is_err());
    }

    #[test]
    fn real_part_flag() {
        let c = FilterSpec::cayley(vec![Cx::ZERO, Cx::ONE], true).unwrap();
        // Re C(x) = (x^2 - 1) / (x^2 + 1)
        for &x in &[-2.0, 0.0, 0.5, 3.0] {
            let v = evaluate_scalar(&c, x).unwrap();
            assert_eq!(v.im, 0.0);
            assert!((v.re - (x * x - 1.0) / (x * x + 1.0)).abs() < 1e-15);
        }
        assert!(c.is_real_valued());
        assert!(!FilterSpec::cayley(vec![Cx::ONE, Cx::ONE], false)
            .unwrap()
            .is_real_valued());
    }
}
