//! Dense numerical kernels.

pub mod complex;
pub mod eigen;
pub mod matrix;
pub mod norm;
pub mod solve;

pub use complex::Cx;
pub use eigen::{eig_symmetric, eigvals_symmetric, EigenDecomposition};
pub use matrix::{to_cx, vec_dist, vec_max_diff, vec_norm, CMatrix, Matrix};
pub use norm::{spectral_norm, spectral_norm_real, spectral_norm_symmetric, unitarity_defect};
pub use solve::{solve_complex, solve_complex_vec};

use crate::error::{Error, Result};
use crate::graph::ShiftOperator;

/// `C(A) = (A - iI)(A + iI)^{-1}` for a real symmetric `A`, by one complex solve.
///
/// The two factors commute, so the solve computes `(A + iI)^{-1}(A - iI)`.
pub fn cayley_transform(a: &Matrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let ac = a.to_complex();
    let plus = ac.shift_diag(Cx::I);
    let minus = ac.shift_diag(-Cx::I);
    solve_complex(&plus, &minus)
}

pub fn cayley_of_operator(s: &ShiftOperator) -> Result<CMatrix> {
    cayley_transform(s.matrix())
}

/// `(A + iI)^{-1}` for a real symmetric `A`.
pub fn resolvent_at_minus_i(a: &Matrix) -> Result<CMatrix> {
    solve_complex(
        &a.to_complex().shift_diag(Cx::I),
        &CMatrix::identity(a.rows()),
    )
}
