use super::{evaluate_scalar, FilterSpec};
use crate::error::{Error, Result};
use crate::graph::ShiftOperator;
use crate::linalg::{
    cayley_transform, eig_symmetric, solve_complex_vec, CMatrix, Cx, EigenDecomposition, Matrix,
};

/// A shift operator's eigendecomposition, reusable across filters and signals.
#[derive(Clone, Debug)]
pub struct SpectralContext {
    eig: EigenDecomposition,
}

impl SpectralContext {
    pub fn new(s: &ShiftOperator) -> Result<Self> {
        Ok(SpectralContext {
            eig: eig_symmetric(s.matrix())?,
        })
    }

    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        Ok(SpectralContext {
            eig: eig_symmetric(m)?,
        })
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    pub fn n(&self) -> usize {
        self.eig.n()
    }

    /// Multiplier applied to each eigenpair: `g_n` or `g(λ_n)`.
    pub fn coefficients(&self, spec: &FilterSpec) -> Result<Vec<Cx>> {
        match spec {
            FilterSpec::PerIndex(g) => {
                if g.len() != self.n() {
                    return Err(Error::DimensionMismatch {
                        expected: self.n(),
                        found: g.len(),
                    });
                }
                Ok(g.clone())
            }
            _ => self
                .eig
                .eigenvalues
                .iter()
                .map(|&l| {
                    evaluate_scalar(spec, l).map_err(|e| match e {
                        Error::PoleAtLambda(x) => Error::PoleAtEigenvalue(x),
                        other => other,
                    })
                })
                .collect(),
        }
    }

    /// `Σ_n coef_n <f, φ_n> φ_n` with the standard dot product.
    pub fn apply(&self, spec: &FilterSpec, f: &[Cx]) -> Result<Vec<Cx>> {
        let coef = self.coefficients(spec)?;
        self.apply_coefficients(&coef, f)
    }

    pub fn apply_coefficients(&self, coef: &[Cx], f: &[Cx]) -> Result<Vec<Cx>> {
        let n = self.n();
        if f.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.len(),
            });
        }
        let v = &self.eig.eigenvectors;
        // forward transform, scale, inverse transform
        let spectrum: Vec<Cx> = (0..n)
            .map(|k| {
                let proj = (0..n).fold(Cx::ZERO, |acc, i| acc + f[i].scale(v[(i, k)]));
                proj * coef[k]
            })
            .collect();
        Ok((0..n)
            .map(|i| (0..n).fold(Cx::ZERO, |acc, k| acc + spectrum[k].scale(v[(i, k)])))
            .collect())
    }

    /// `V diag(coef) V^T`
    pub fn filter_matrix(&self, spec: &FilterSpec) -> Result<CMatrix> {
        let coef = self.coefficients(spec)?;
        Ok(self.matrix_from_coefficients(&coef))
    }

    pub fn matrix_from_coefficients(&self, coef: &[Cx]) -> CMatrix {
        let n = self.n();
        let v = &self.eig.eigenvectors;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Cx::ZERO;
                for k in 0..n {
                    acc += coef[k].scale(v[(i, k)] * v[(j, k)]);
                }
                m[(i, j)] = acc;
                m[(j, i)] = acc;
            }
        }
        m
    }
}

/// Applies `spec` through the eigendecomposition of `Δ`.
pub fn apply_exact(spec: &FilterSpec, s: &ShiftOperator, f: &[Cx]) -> Result<Vec<Cx>> {
    if f.len() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: f.len(),
        });
    }
    SpectralContext::new(s)?.apply(spec, f)
}

/// Materializes `g(Δ)`.
pub fn filter_matrix(spec: &FilterSpec, s: &ShiftOperator) -> Result<CMatrix> {
    SpectralContext::new(s)?.filter_matrix(spec)
}

/// `Σ c_l A^l f` by Horner's rule, for any operator `A` given as a mat-vec.
fn horner_apply(coeffs: &[Cx], f: &[Cx], op: impl Fn(&[Cx]) -> Vec<Cx>) -> Vec<Cx> {
    let last = *coeffs.last().expect("non-empty coefficients");
    let mut y: Vec<Cx> = f.iter().map(|&x| x * last).collect();
    for &c in coeffs.iter().rev().skip(1) {
        y = op(&y);
        for (yi, &fi) in y.iter_mut().zip(f) {
            *yi += fi * c;
        }
    }
    y
}

/// Applies `spec` in the vertex domain, without any eigendecomposition.
pub fn apply_spatial(spec: &FilterSpec, s: &ShiftOperator, f: &[Cx]) -> Result<Vec<Cx>> {
    spec.validate()?;
    let n = s.n();
    if f.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.len(),
        });
    }
    let delta = s.matrix();
    match spec {
        FilterSpec::PerIndex(_) => Err(Error::NoSpatialForm),
        FilterSpec::Polynomial(c) => Ok(horner_apply(c, f, |x| delta.matvec_cx(x))),
        FilterSpec::Rational { num, den } => {
            let u = horner_apply(num, f, |x| delta.matvec_cx(x));
            let den_matrix = polynomial_of_matrix(den, delta);
            solve_complex_vec(&den_matrix, &u).map_err(|e| match e {
                Error::SingularMatrix { .. } => Error::SingularDenominator,
                other => other,
            })
        }
        FilterSpec::Cayley { coeffs, real_part } => {
            let c = cayley_transform(delta)?;
            let y = horner_apply(coeffs, f, |x| c.matvec(x));
            if !real_part {
                return Ok(y);
            }
            // Re(G) f = (G f + conj(G conj(f))) / 2 since Re(G) = (G + conj(G)) / 2
            let fc: Vec<Cx> = f.iter().map(|z| z.conj()).collect();
            let yc = horner_apply(coeffs, &fc, |x| c.matvec(x));
            Ok(y.iter()
                .zip(&yc)
                .map(|(&a, &b)| (a + b.conj()).scale(0.5))
                .collect())
        }
    }
}

/// `Σ c_l A^l` as a dense complex matrix (Horner).
fn polynomial_of_matrix(coeffs: &[Cx], a: &Matrix) -> CMatrix {
    let n = a.rows();
    let last = *coeffs.last().expect("non-empty coefficients");
    let mut acc = CMatrix::identity(n).scale(last);
    for &c in coeffs.iter().rev().skip(1) {
        acc = acc.matmul_real(a).shift_diag(c);
    }
    acc
}
