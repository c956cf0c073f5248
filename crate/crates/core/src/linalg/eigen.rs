//! Cyclic Jacobi eigensolver for real symmetric matrices.
//!
//! Sweeps visit pairs `(p, q)`, `p < q`, in row order. Iteration stops when
//! the off-diagonal Frobenius mass drops to `1e-13 * ||A||_F`; 64 sweeps
//! without reaching that is reported as [`Error::NoConvergence`].

use super::matrix::Matrix;
use crate::error::{Error, Result};

const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 64;
const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
///
/// Column `k` of `eigenvectors` pairs with `eigenvalues[k]`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(values) V^T`
    pub fn reconstruct_with(&self, values: &[f64]) -> Matrix {
        let n = self.n();
        let v = &self.eigenvectors;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let s: f64 = (0..n).map(|k| v[(i, k)] * values[k] * v[(j, k)]).sum();
                out[(i, j)] = s;
            }
        }
        out.mirror_upper();
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.reconstruct_with(&self.eigenvalues)
    }

    /// Largest absolute eigenvalue, i.e. the spectral norm of the source matrix.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn check_input(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let asym = a.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::AsymmetricInput(format!(
            "matrix asymmetry {asym:e} exceeds {SYMMETRY_TOL:e}"
        )));
    }
    Ok(())
}

pub fn eig_symmetric(a: &Matrix) -> Result<EigenDecomposition> {
    check_input(a)?;
    let (values, vectors) = jacobi(a, true)?;
    let vectors = vectors.expect("vectors requested");
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let eigenvectors = Matrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending.
pub fn eigvals_symmetric(a: &Matrix) -> Result<Vec<f64>> {
    check_input(a)?;
    let (mut values, _) = jacobi(a, false)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

fn jacobi(input: &Matrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Matrix>)> {
    let n = input.rows();
    // work on the exact symmetrization
    let mut a: Vec<f64> = Matrix::from_fn(n, n, |i, j| 0.5 * (input[(i, j)] + input[(j, i)]))
        .as_slice()
        .to_vec();
    let mut v = want_vectors.then(|| Matrix::identity(n));
    let threshold = OFF_DIAGONAL_TOL * input.frobenius();

    let mut converged = false;
    for _sweep in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // A <- A J  (columns p, q)
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                // A <- J^T A  (rows p, q)
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok((values, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn random_symmetric(n: usize, seed: u64) -> Matrix {
        let mut rng = Rng::new(seed);
        let mut m = Matrix::from_fn(n, n, |_, _| rng.normal());
        m.mirror_upper();
        m
    }

    fn orthogonality_error(v: &Matrix) -> f64 {
        v.transpose()
            .matmul(v)
            .sub(&Matrix::identity(v.rows()))
            .max_abs()
    }

    #[test]
    fn diagonal_input() {
        let e = eig_symmetric(&Matrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0, 3.0]);
        // permuted identity columns
        let expected = Matrix::from_rows(&[
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ]);
        assert_eq!(e.eigenvectors, expected);
    }

    #[test]
    fn two_vertex_path_laplacian() {
        let a = Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let e = eig_symmetric(&a).unwrap();
        assert!(e.eigenvalues[0].abs() < 1e-15);
        assert!((e.eigenvalues[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn reconstruction_random_16() {
        let a = random_symmetric(16, 11);
        let e = eig_symmetric(&a).unwrap();
        assert!(e.reconstruct().sub(&a).max_abs() <= 1e-9);
        assert!(orthogonality_error(&e.eigenvectors) <= 1e-10);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let av = a.matmul(&e.eigenvectors);
        let vl = e.eigenvectors.matmul(&Matrix::diag(&e.eigenvalues));
        let norm = e.spectral_radius();
        assert!(av.sub(&vl).max_abs() <= 1e-9 * (1.0 + norm));
    }

    #[test]
    fn eigenvalues_only_agree() {
        let a = random_symmetric(12, 5);
        let full = eig_symmetric(&a).unwrap();
        let vals = eigvals_symmetric(&a).unwrap();
        for (x, y) in full.eigenvalues.iter().zip(&vals) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_and_empty_matrices() {
        let e = eig_symmetric(&Matrix::zeros(4, 4)).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 4]);
        assert_eq!(e.eigenvectors, Matrix::identity(4));
        let e = eig_symmetric(&Matrix::zeros(0, 0)).unwrap();
        assert!(e.eigenvalues.is_empty());
    }

    #[test]
    fn rejects_asymmetric() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.1, 1.0]]);
        assert!(matches!(eig_symmetric(&a), Err(Error::AsymmetricInput(_))));
        let a = Matrix::zeros(2, 3);
        assert!(matches!(
            eig_symmetric(&a),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn repeated_eigenvalues() {
        // all-ones 5x5: eigenvalues 0 (x4) and 5
        let a = Matrix::from_fn(5, 5, |_, _| 1.0);
        let e = eig_symmetric(&a).unwrap();
        for &x in &e.eigenvalues[..4] {
            assert!(x.abs() < 1e-13);
        }
        assert!((e.eigenvalues[4] - 5.0).abs() < 1e-13);
        assert!(orthogonality_error(&e.eigenvectors) <= 1e-10);
    }

    #[test]
    fn deterministic() {
        let a = random_symmetric(10, 2);
        let x = eig_symmetric(&a).unwrap();
        let y = eig_symmetric(&a).unwrap();
        assert_eq!(x.eigenvalues, y.eigenvalues);
        assert_eq!(x.eigenvectors, y.eigenvectors);
    }
}
