//! Spectral (operator 2-) norms.
//!
//! The general route forms the Hermitian Gram matrix `A^H A` and takes the
//! square root of its largest eigenvalue. The Gram matrix `X + iY` is
//! diagonalized through its real symmetric embedding `[[X, -Y], [Y, X]]`,
//! whose spectrum is that of `X + iY` with every eigenvalue doubled.

use super::eigen::eigvals_symmetric;
use super::matrix::{CMatrix, Matrix};

/// Largest singular value of a complex matrix.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    if a.is_real() {
        return spectral_norm_real(&a.real_part());
    }
    let gram = a.adjoint().matmul(a);
    let n = gram.rows();
    let x = gram.real_part();
    let y = gram.imag_part();
    let mut embed = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            // exact Hermitian symmetry before embedding
            let (re, im) = if i <= j {
                (x[(i, j)], y[(i, j)])
            } else {
                (x[(j, i)], -y[(j, i)])
            };
            embed[(i, j)] = re;
            embed[(i + n, j + n)] = re;
            embed[(i, j + n)] = -im;
            embed[(i + n, j)] = im;
        }
    }
    largest_sqrt(&embed)
}

/// Largest singular value of a real matrix via `A^T A`.
pub fn spectral_norm_real(a: &Matrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    let mut gram = a.transpose().matmul(a);
    gram.mirror_upper();
    largest_sqrt(&gram)
}

/// Spectral norm of a real symmetric matrix as its largest |eigenvalue|.
///
/// Avoids squaring, so it is the accurate choice for perturbation norms.
pub fn spectral_norm_symmetric(a: &Matrix) -> f64 {
    if a.rows() == 0 {
        return 0.0;
    }
    let vals = eigvals_symmetric(a).expect("symmetric input");
    vals.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn largest_sqrt(gram: &Matrix) -> f64 {
    let vals = eigvals_symmetric(gram).expect("Gram matrices are symmetric and Jacobi converges");
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// `||A^H A - I||_max`, the unitarity defect.
pub fn unitarity_defect(a: &CMatrix) -> f64 {
    a.adjoint()
        .matmul(a)
        .sub(&CMatrix::identity(a.cols()))
        .max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex::Cx;
    use crate::linalg::matrix::vec_norm;
    use crate::rng::Rng;

    fn rayleigh_lower_bound(a: &CMatrix, x: &[Cx]) -> f64 {
        vec_norm(&a.matvec(x)) / vec_norm(x)
    }

    fn random_cmatrix(n: usize, rng: &mut Rng) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| Cx::new(rng.normal(), rng.normal()))
    }

    /// Independent oracle: power iteration on A^H A.
    fn power_iteration_norm(a: &CMatrix, seed: u64) -> f64 {
        let mut rng = Rng::new(seed);
        let ah = a.adjoint();
        let mut x: Vec<Cx> = (0..a.cols())
            .map(|_| Cx::new(rng.normal(), rng.normal()))
            .collect();
        let mut est = 0.0;
        for _ in 0..20_000 {
            let y = ah.matvec(&a.matvec(&x));
            let ny = vec_norm(&y);
            let nx = vec_norm(&x);
            let next = (ny / nx).sqrt();
            x = y.iter().map(|z| z.scale(1.0 / ny)).collect();
            if (next - est).abs() <= 1e-15 * next {
                return next;
            }
            est = next;
        }
        est
    }

    #[test]
    fn diagonal() {
        let a = Matrix::diag(&[1.0, -3.0]);
        assert!((spectral_norm(&a.to_complex()) - 3.0).abs() < 1e-14);
        assert!((spectral_norm_symmetric(&a) - 3.0).abs() < 1e-15);
        let c = CMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                Cx::new(0.0, [1.0, -3.0][i])
            } else {
                Cx::ZERO
            }
        });
        assert!((spectral_norm(&c) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn unitary_has_unit_norm() {
        // rotation times a phase
        let t: f64 = 0.7;
        let u = CMatrix::from_fn(2, 2, |i, j| {
            let r = [[t.cos(), -t.sin()], [t.sin(), t.cos()]][i][j];
            Cx::new(0.0, 1.0).scale(r) * Cx::cis(0.3)
        });
        assert!((spectral_norm(&u) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn matches_power_iteration() {
        let mut rng = Rng::new(31);
        for k in 0..5 {
            let a = random_cmatrix(8, &mut rng);
            let fast = spectral_norm(&a);
            let oracle = power_iteration_norm(&a, 100 + k);
            assert!(
                (fast - oracle).abs() <= 1e-10 * oracle,
                "{fast} vs {oracle}"
            );
        }
    }

    #[test]
    fn real_route_matches_symmetric_route() {
        let mut rng = Rng::new(6);
        let mut s = Matrix::from_fn(9, 9, |_, _| rng.normal());
        s.mirror_upper();
        let a = spectral_norm_real(&s);
        let b = spectral_norm_symmetric(&s);
        assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn bounds_every_rayleigh_quotient() {
        let mut rng = Rng::new(12);
        let a = random_cmatrix(6, &mut rng);
        let norm = spectral_norm(&a);
        for _ in 0..100 {
            let x: Vec<Cx> = (0..6)
                .map(|_| Cx::new(rng.normal(), rng.normal()))
                .collect();
            assert!(rayleigh_lower_bound(&a, &x) <= norm * (1.0 + 1e-12));
        }
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(spectral_norm(&CMatrix::zeros(0, 0)), 0.0);
        assert_eq!(spectral_norm(&CMatrix::zeros(3, 3)), 0.0);
    }
}
