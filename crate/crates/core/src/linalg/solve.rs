use super::complex::Cx;
use super::matrix::CMatrix;
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-14;

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
///
/// A pivot whose modulus is at most `1e-14 * max|a_ij|` is reported as
/// [`Error::SingularMatrix`].
pub fn solve_complex(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.cols(),
        });
    }
    if b.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.rows(),
        });
    }
    let m = b.cols();
    let tol = PIVOT_TOL * a.max_abs();
    let mut lu = a.clone();
    let mut x = b.clone();

    for col in 0..n {
        let (piv_row, piv_abs) =
            (col..n)
                .map(|r| (r, lu[(r, col)].abs()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if piv_abs <= tol {
            return Err(Error::SingularMatrix {
                column: col,
                pivot: piv_abs,
            });
        }
        if piv_row != col {
            for j in 0..n {
                let t = lu[(col, j)];
                lu[(col, j)] = lu[(piv_row, j)];
                lu[(piv_row, j)] = t;
            }
            for j in 0..m {
                let t = x[(col, j)];
                x[(col, j)] = x[(piv_row, j)];
                x[(piv_row, j)] = t;
            }
        }
        let pivot = lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] / pivot;
            if factor == Cx::ZERO {
                continue;
            }
            lu[(r, col)] = Cx::ZERO;
            for j in col + 1..n {
                let v = lu[(col, j)];
                lu[(r, j)] -= factor * v;
            }
            for j in 0..m {
                let v = x[(col, j)];
                x[(r, j)] -= factor * v;
            }
        }
    }
    // back substitution
    for col in (0..n).rev() {
        let pivot = lu[(col, col)];
        for j in 0..m {
            let mut acc = x[(col, j)];
            for k in col + 1..n {
                acc -= lu[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = acc / pivot;
        }
    }
    Ok(x)
}

pub fn solve_complex_vec(a: &CMatrix, b: &[Cx]) -> Result<Vec<Cx>> {
    let rhs = CMatrix::from_fn(b.len(), 1, |i, _| b[i]);
    Ok(solve_complex(a, &rhs)?.column(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigen::eig_symmetric;
    use crate::linalg::matrix::Matrix;
    use crate::rng::Rng;

    fn random_cmatrix(rows: usize, cols: usize, rng: &mut Rng) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| Cx::new(rng.normal(), rng.normal()))
    }

    #[test]
    fn identity_returns_rhs() {
        let mut rng = Rng::new(1);
        let b = random_cmatrix(5, 3, &mut rng);
        let x = solve_complex(&CMatrix::identity(5), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn singular_detected() {
        let a = CMatrix::from_fn(3, 3, |i, _| Cx::real(i as f64 + 1.0));
        let b = CMatrix::identity(3);
        assert!(matches!(
            solve_complex(&a, &b),
            Err(Error::SingularMatrix { .. })
        ));
        assert!(matches!(
            solve_complex(&CMatrix::zeros(2, 2), &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn shifted_symmetric_never_singular() {
        let mut rng = Rng::new(4);
        for n in [1, 2, 5, 12] {
            let mut d = Matrix::from_fn(n, n, |_, _| rng.normal());
            d.mirror_upper();
            let a = d.to_complex().shift_diag(Cx::I);
            solve_complex(&a, &CMatrix::identity(n)).unwrap();
        }
        // even the zero matrix
        solve_complex(
            &CMatrix::zeros(3, 3).shift_diag(Cx::I),
            &CMatrix::identity(3),
        )
        .unwrap();
    }

    #[test]
    fn hermitian_system_matches_eigen_route() {
        // A = S + 3I with S real symmetric: solution V diag(1/lambda) V^T B
        let mut rng = Rng::new(8);
        let mut s = Matrix::from_fn(8, 8, |_, _| rng.normal() * 0.3);
        s.mirror_upper();
        let a = s.add(&Matrix::identity(8).scale(3.0));
        let b = random_cmatrix(8, 2, &mut rng);
        let x = solve_complex(&a.to_complex(), &b).unwrap();
        let e = eig_symmetric(&a).unwrap();
        let inv = e.reconstruct_with(&e.eigenvalues.iter().map(|l| 1.0 / l).collect::<Vec<_>>());
        let oracle = inv.to_complex().matmul(&b);
        assert!(x.sub(&oracle).max_abs() < 1e-12);
    }

    #[test]
    fn residual_bound_random() {
        let mut rng = Rng::new(2);
        for _ in 0..50 {
            let n = 1 + rng.below(10);
            let a = random_cmatrix(n, n, &mut rng);
            let b = random_cmatrix(n, 2, &mut rng);
            let x = solve_complex(&a, &b).unwrap();
            let r = a.matmul(&x).sub(&b).max_abs();
            assert!(r <= 1e-9 * (1.0 + a.frobenius() * x.frobenius()));
        }
    }
}
