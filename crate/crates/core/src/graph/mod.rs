//! Graphs, shift operators, perturbations and vertex relabelling.

mod perturb;

pub use perturb::{drop_edges, perturb, Perturbation, PerturbationMode};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Cx, Matrix};
use crate::rng::Rng;

/// Gaussian-kernel weights below this are set to zero.
pub const SPARSITY_THRESHOLD: f64 = 1e-4;

/// Undirected weighted graph with a dense symmetric weight matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    weights: Matrix,
    coords: Option<Vec<[f64; 2]>>,
}

impl Graph {
    /// Validates symmetry (exact), nonnegativity and a zero diagonal.
    pub fn new(weights: Matrix, coords: Option<Vec<[f64; 2]>>) -> Result<Self> {
        let n = weights.rows();
        if n == 0 || !weights.is_square() {
            return Err(Error::DimensionMismatch {
                expected: n.max(1),
                found: weights.cols(),
            });
        }
        if let Some(c) = &coords {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.len(),
                });
            }
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "self-loop weight at vertex {i}"
                )));
            }
            for j in 0..n {
                let w = weights[(i, j)];
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "weight ({i}, {j}) = {w} is not a finite nonnegative number"
                    )));
                }
                if w != weights[(j, i)] {
                    return Err(Error::AsymmetricInput(format!(
                        "w[{i}][{j}] != w[{j}][{i}]"
                    )));
                }
            }
        }
        Ok(Graph { weights, coords })
    }

    /// Builds from `(i, j, w)` triples with `i < j`, `w > 0`, no duplicates.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize, f64)],
        coords: Option<Vec<[f64; 2]>>,
    ) -> Result<Self> {
        let mut w = Matrix::zeros(n, n);
        for &(i, j, wij) in edges {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: i.max(j) + 1,
                });
            }
            if i >= j {
                return Err(Error::AsymmetricInput(format!(
                    "edge ({i}, {j}) must be listed with i < j"
                )));
            }
            if !(wij > 0.0) || !wij.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "edge ({i}, {j}) has non-positive weight {wij}"
                )));
            }
            if w[(i, j)] != 0.0 {
                return Err(Error::DuplicateEdge(i, j));
            }
            w[(i, j)] = wij;
            w[(j, i)] = wij;
        }
        Graph::new(w, coords)
    }

    pub fn n(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    /// Edges `(i, j, w)` with `i < j` in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let w = self.weights[(i, j)];
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn degrees(&self) -> Vec<f64> {
        degrees_of(&self.weights)
    }
}

fn degrees_of(w: &Matrix) -> Vec<f64> {
    (0..w.rows()).map(|i| w.row(i).iter().sum()).collect()
}

/// Which matrix of the graph plays the role of the shift operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftKind {
    /// `D - W`
    Unnormalized,
    /// `I - D^{-1/2} W D^{-1/2}`
    Normalized,
    /// `-D^{-1/2} W D^{-1/2}`, the normalized Laplacian minus the identity
    NormalizedTranslated,
    /// `W`
    Adjacency,
}

impl ShiftKind {
    /// True when the operator is a linear function of the weights.
    pub fn is_linear(self) -> bool {
        matches!(self, ShiftKind::Unnormalized | ShiftKind::Adjacency)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ShiftKind::Unnormalized => "unnormalized",
            ShiftKind::Normalized => "normalized",
            ShiftKind::NormalizedTranslated => "normalized-translated",
            ShiftKind::Adjacency => "adjacency",
        }
    }
}

/// A real symmetric shift operator, optionally remembering the weights it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftOperator {
    matrix: Matrix,
    kind: ShiftKind,
    weights: Option<Matrix>,
}

impl ShiftOperator {
    /// Wraps an arbitrary matrix; it must be symmetric within `1e-12` and is
    /// stored exactly symmetrized.
    pub fn from_matrix(matrix: Matrix, kind: ShiftKind) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let asym = matrix.asymmetry();
        if asym > 1e-12 {
            return Err(Error::AsymmetricInput(format!(
                "shift operator asymmetry {asym:e}"
            )));
        }
        let mut m = matrix;
        m.mirror_upper();
        Ok(ShiftOperator {
            matrix: m,
            kind,
            weights: None,
        })
    }

    pub(crate) fn with_weights(matrix: Matrix, kind: ShiftKind, weights: Option<Matrix>) -> Self {
        debug_assert!(matrix.is_symmetric_exact());
        ShiftOperator {
            matrix,
            kind,
            weights,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn weights(&self) -> Option<&Matrix> {
        self.weights.as_ref()
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }
}

/// Assembles the shift operator of `g`.
pub fn build_shift(g: &Graph, kind: ShiftKind) -> Result<ShiftOperator> {
    let matrix = shift_from_weights(g.weights(), kind)?;
    Ok(ShiftOperator::with_weights(
        matrix,
        kind,
        Some(g.weights().clone()),
    ))
}

/// Shift operator of a symmetric weight matrix without graph validation
/// (used for jittered weights, which may go slightly negative).
pub(crate) fn shift_from_weights(w: &Matrix, kind: ShiftKind) -> Result<Matrix> {
    let n = w.rows();
    if !w.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.cols(),
        });
    }
    let deg = degrees_of(w);
    let mut m = Matrix::zeros(n, n);
    match kind {
        ShiftKind::Adjacency => {
            for i in 0..n {
                for j in i + 1..n {
                    m[(i, j)] = w[(i, j)];
                }
            }
        }
        ShiftKind::Unnormalized => {
            for i in 0..n {
                m[(i, i)] = deg[i];
                for j in i + 1..n {
                    m[(i, j)] = -w[(i, j)];
                }
            }
        }
        ShiftKind::Normalized | ShiftKind::NormalizedTranslated => {
            let mut inv_sqrt = Vec::with_capacity(n);
            for (i, &d) in deg.iter().enumerate() {
                if !(d > 0.0) {
                    return Err(Error::IsolatedVertex(i));
                }
                inv_sqrt.push(1.0 / d.sqrt());
            }
            let diag = if kind == ShiftKind::Normalized {
                1.0
            } else {
                0.0
            };
            for i in 0..n {
                m[(i, i)] = diag - w[(i, i)] * inv_sqrt[i] * inv_sqrt[i];
                for j in i + 1..n {
                    m[(i, j)] = -w[(i, j)] * (inv_sqrt[i] * inv_sqrt[j]);
                }
            }
        }
    }
    m.mirror_upper();
    Ok(m)
}

/// `n` uniform points in the unit square joined by Gaussian-kernel weights
/// `exp(-d^2 / (2 width^2))`, zeroed below [`SPARSITY_THRESHOLD`].
pub fn gen_geometric_graph(n: usize, seed: u64, kernel_width: f64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 vertices, got {n}"
        )));
    }
    if !(kernel_width > 0.0) || !kernel_width.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "kernel width must be positive, got {kernel_width}"
        )));
    }
    let mut rng = Rng::new(seed);
    let coords: Vec<[f64; 2]> = (0..n).map(|_| [rng.uniform(), rng.uniform()]).collect();
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let w_ij = gaussian_kernel(coords[i], coords[j], kernel_width);
            if w_ij >= SPARSITY_THRESHOLD {
                w[(i, j)] = w_ij;
            }
        }
    }
    w.mirror_upper();
    Graph::new(w, Some(coords))
}

pub fn gaussian_kernel(a: [f64; 2], b: [f64; 2], width: f64) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (-(dx * dx + dy * dy) / (2.0 * width * width)).exp()
}

/// A bijection on `{0, .., n-1}`; vertex `j` is relabelled `perm[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    perm: Vec<usize>,
}

impl Permutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidArgument(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        Ok(Permutation { perm })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            perm: (0..n).collect(),
        }
    }

    pub fn random(n: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        Rng::new(seed).shuffle(&mut perm);
        Permutation { perm }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.perm.len()];
        for (j, &p) in self.perm.iter().enumerate() {
            inv[p] = j;
        }
        Permutation { perm: inv }
    }

    /// `P A P^T`: entry `(perm[i], perm[j])` of the result is `a[i][j]`.
    pub fn apply_matrix(&self, a: &Matrix) -> Result<Matrix> {
        let n = self.len();
        if a.rows() != n || a.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.rows(),
            });
        }
        let inv = self.inverse();
        Ok(Matrix::from_fn(n, n, |i, j| a[(inv.perm[i], inv.perm[j])]))
    }

    /// `P f`: entry `perm[j]` of the result is `f[j]`.
    pub fn apply_signal<T: Copy + Default>(&self, f: &[T]) -> Result<Vec<T>> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: f.len(),
            });
        }
        let mut out = vec![T::default(); f.len()];
        for (j, &p) in self.perm.iter().enumerate() {
            out[p] = f[j];
        }
        Ok(out)
    }
}

pub fn permute_shift(s: &ShiftOperator, p: &Permutation) -> Result<ShiftOperator> {
    let matrix = p.apply_matrix(s.matrix())?;
    let weights = s.weights().map(|w| p.apply_matrix(w)).transpose()?;
    Ok(ShiftOperator::with_weights(matrix, s.kind(), weights))
}

pub fn permute_signal(f: &[Cx], p: &Permutation) -> Result<Vec<Cx>> {
    p.apply_signal(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvals_symmetric;

    fn two_vertex(w: f64) -> Graph {
        Graph::from_edges(2, &[(0, 1, w)], None).unwrap()
    }

    #[test]
    fn two_vertex_unnormalized() {
        let s = build_shift(&two_vertex(1.0), ShiftKind::Unnormalized).unwrap();
        assert_eq!(
            s.matrix(),
            &Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]])
        );
        let ev = eigvals_symmetric(s.matrix()).unwrap();
        assert!(ev[0].abs() < 1e-15 && (ev[1] - 2.0).abs() < 1e-15);
        let s = build_shift(&two_vertex(2.5), ShiftKind::Unnormalized).unwrap();
        assert_eq!(
            s.matrix(),
            &Matrix::from_rows(&[vec![2.5, -2.5], vec![-2.5, 2.5]])
        );
    }

    #[test]
    fn empty_edge_graph() {
        let g = Graph::new(Matrix::zeros(4, 4), None).unwrap();
        let s = build_shift(&g, ShiftKind::Unnormalized).unwrap();
        assert_eq!(s.matrix(), &Matrix::zeros(4, 4));
        assert!(matches!(
            build_shift(&g, ShiftKind::Normalized),
            Err(Error::IsolatedVertex(0))
        ));
        assert!(matches!(
            build_shift(&g, ShiftKind::NormalizedTranslated),
            Err(Error::IsolatedVertex(0))
        ));
    }

    #[test]
    fn normalized_spectra_in_range() {
        for seed in 0..200 {
            let g = gen_geometric_graph(12, seed, 0.4).unwrap();
            if g.degrees().contains(&0.0) {
                continue;
            }
            let s = build_shift(&g, ShiftKind::Normalized).unwrap();
            let ev = eigvals_symmetric(s.matrix()).unwrap();
            assert!(ev[0] >= -1e-10 && *ev.last().unwrap() <= 2.0 + 1e-10);
            let t = build_shift(&g, ShiftKind::NormalizedTranslated).unwrap();
            let ev = eigvals_symmetric(t.matrix()).unwrap();
            assert!(ev[0] >= -1.0 - 1e-10 && *ev.last().unwrap() <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn all_kinds_exactly_symmetric() {
        let g = gen_geometric_graph(20, 3, 0.3).unwrap();
        for kind in [
            ShiftKind::Unnormalized,
            ShiftKind::Normalized,
            ShiftKind::NormalizedTranslated,
            ShiftKind::Adjacency,
        ] {
            let s = build_shift(&g, kind).unwrap();
            assert_eq!(s.matrix(), &s.matrix().transpose(), "{kind:?}");
        }
    }

    #[test]
    fn geometric_graph_kernel_recomputed_from_coords() {
        let g = gen_geometric_graph(2, 99, 1.0).unwrap();
        let c = g.coords().unwrap();
        let d2 = (c[0][0] - c[1][0]).powi(2) + (c[0][1] - c[1][1]).powi(2);
        let expected = (-d2 / 2.0).exp();
        assert!((g.weights()[(0, 1)] - expected).abs() <= 1e-15);
    }

    #[test]
    fn geometric_graph_shape_and_determinism() {
        let a = gen_geometric_graph(32, 7, 0.25).unwrap();
        assert_eq!(a.n(), 32);
        let b = gen_geometric_graph(32, 7, 0.25).unwrap();
        assert_eq!(a, b);
        let c = gen_geometric_graph(32, 8, 0.25).unwrap();
        assert_ne!(a, c);
        assert!(a.edges().iter().all(|&(_, _, w)| w >= SPARSITY_THRESHOLD));
        assert!(gen_geometric_graph(1, 0, 0.2).is_err());
        assert!(gen_geometric_graph(5, 0, 0.0).is_err());
    }

    #[test]
    fn edge_list_validation() {
        assert!(matches!(
            Graph::from_edges(3, &[(0, 1, 1.0), (0, 1, 2.0)], None),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::from_edges(3, &[(1, 0, 1.0)], None),
            Err(Error::AsymmetricInput(_))
        ));
        assert!(matches!(
            Graph::from_edges(3, &[(0, 3, 1.0)], None),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Graph::from_edges(3, &[(0, 1, -1.0)], None).is_err());
        let asym = Matrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert!(matches!(
            Graph::new(asym, None),
            Err(Error::AsymmetricInput(_))
        ));
    }

    #[test]
    fn permutation_identity_swap_inverse() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]]);
        let id = Permutation::identity(2);
        assert_eq!(id.apply_matrix(&a).unwrap(), a);
        let swap = Permutation::new(vec![1, 0]).unwrap();
        assert_eq!(
            swap.apply_matrix(&a).unwrap(),
            Matrix::from_rows(&[vec![3.0, 2.0], vec![2.0, 1.0]])
        );

        let g = gen_geometric_graph(10, 1, 0.3).unwrap();
        let s = build_shift(&g, ShiftKind::Unnormalized).unwrap();
        let p = Permutation::random(10, 5);
        let back = permute_shift(&permute_shift(&s, &p).unwrap(), &p.inverse()).unwrap();
        assert_eq!(back, s);

        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(matches!(
            id.apply_signal(&[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn permuted_signal_follows_labels() {
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(p.apply_signal(&[10, 20, 30]).unwrap(), vec![20, 30, 10]);
    }
}
