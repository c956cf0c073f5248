use serde::Serialize;

use super::{op_distance, theorem1_bound, MarginReport};
use crate::error::{Error, Result};
use crate::filters::{cayley_seminorm, presets, FilterSpec, SpectralContext};
use crate::graph::{build_shift, Graph, ShiftKind, ShiftOperator};
use crate::linalg::{spectral_norm, spectral_norm_symmetric, Cx, Matrix};
use crate::rng::{derive_seed, Rng};

const DEMO_PERTURBATION: f64 = 1e-4;
const NUDGE: f64 = 1e-7;
const MAX_GAP: f64 = 1e-6;
const CONTROL_PERTURBATION: f64 = 1e-6;

/// Outcome of the near-degenerate comparison and its well-separated control.
#[derive(Clone, Debug, Serialize)]
pub struct InstabilityReport {
    pub n: usize,
    pub seed: u64,
    /// Eigenvalue indices `(k, k + 1)` of the near-degenerate pair.
    pub pair: (usize, usize),
    pub gap: f64,
    pub norm_e: f64,
    pub seminorm: f64,
    pub bound: f64,
    /// Error of the functional-calculus filter against [`Self::bound`].
    pub functional: MarginReport,
    /// Error of the per-index filter.
    pub per_index_err: f64,
    pub control: ControlReport,
}

impl InstabilityReport {
    /// `per_index_err / bound`.
    pub fn excess_factor(&self) -> f64 {
        self.per_index_err / self.bound
    }
}

/// Errors of both filters on a graph whose spectrum is well separated.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ControlReport {
    pub norm_e: f64,
    pub functional_err: f64,
    pub per_index_err: f64,
}

impl ControlReport {
    /// `|per_index - functional| / functional`.
    pub fn relative_difference(&self) -> f64 {
        (self.per_index_err - self.functional_err).abs() / self.functional_err
    }
}

/// Cycle graph whose edge `(k, k + 1)` carries weight `1 + NUDGE`.
fn nudged_cycle(n: usize, edge: usize) -> Result<Graph> {
    let edges: Vec<(usize, usize, f64)> = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            let w = if i == edge { 1.0 + NUDGE } else { 1.0 };
            (i.min(j), i.max(j), w)
        })
        .collect();
    Graph::from_edges(n, &edges, None)
}

fn path_graph(n: usize) -> Result<Graph> {
    let edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    Graph::from_edges(n, &edges, None)
}

fn per_index_distance(coef: &[Cx], a: &SpectralContext, b: &SpectralContext) -> f64 {
    spectral_norm(
        &a.matrix_from_coefficients(coef)
            .sub(&b.matrix_from_coefficients(coef)),
    )
}

/// Near a degenerate eigenvalue pair the eigenvectors of `Δ` and `Δ + E`
/// differ by an O(1) rotation even when `E` is tiny. A per-index filter that
/// weights the two members differently inherits that rotation; a
/// functional-calculus filter does not.
///
/// The instance is a cycle on `n` vertices (every nonzero eigenvalue of its
/// Laplacian is doubled) with one edge nudged by `1e-7`, perturbed by a
/// symmetric `E` with `||E|| = 1e-4`: half a dense Gaussian matrix, half the
/// coupling `u_k u_{k+1}ᵀ + u_{k+1} u_kᵀ` of the pair's eigenvectors. A
/// purely random `E` occasionally leaves the pair almost uncoupled, and then
/// nothing rotates. The per-index filter uses
/// `g(λ_n)` of the smooth filter, plus 1 on the upper member of the pair.
/// The control uses a path graph and `E = V K Vᵀ` with `K` zero on the
/// diagonal, so eigenvalues move only to second order and both filters
/// should err alike.
pub fn per_index_instability_demo(n: usize, seed: u64) -> Result<InstabilityReport> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "the demonstration needs n >= 4, got {n}"
        )));
    }
    let mut rng = Rng::new(derive_seed(seed, &[0]));
    let edge = rng.below(n);
    let s = build_shift(&nudged_cycle(n, edge)?, ShiftKind::Unnormalized)?;
    let ctx = SpectralContext::new(&s)?;
    let lambda = ctx.eigenvalues();
    let (k, gap) = (0..n - 1)
        .map(|k| (k, lambda[k + 1] - lambda[k]))
        // the zero eigenvalue of a connected graph is simple; skip it
        .filter(|&(k, _)| k > 0)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::DegeneracyConstructionFailed("no eigenvalue pair".into()))?;
    if !(gap <= MAX_GAP) {
        return Err(Error::DegeneracyConstructionFailed(format!(
            "closest eigenvalue pair has gap {gap:e}"
        )));
    }

    let smooth = presets::lowpass_cayley(3)?;
    let seminorm = cayley_seminorm(&smooth)?.value();
    let mut coef = ctx.coefficients(&smooth)?;
    coef[k + 1] += Cx::ONE;

    let e = demo_perturbation(&ctx, k, derive_seed(seed, &[1]));
    let norm_e = spectral_norm_symmetric(&e);
    let s2 = ShiftOperator::from_matrix(s.matrix().add(&e), s.kind())?;
    let ctx2 = SpectralContext::new(&s2)?;
    let bound = theorem1_bound(seminorm, spectral_norm_symmetric(s.matrix()), norm_e)?;
    let functional = MarginReport::new(op_distance(&smooth, &s, &s2)?, bound);
    let per_index_err = per_index_distance(&coef, &ctx, &ctx2);

    let control = control_case(n, &smooth, derive_seed(seed, &[2]))?;
    Ok(InstabilityReport {
        n,
        seed,
        pair: (k, k + 1),
        gap,
        norm_e,
        seminorm,
        bound,
        functional,
        per_index_err,
        control,
    })
}

fn demo_perturbation(ctx: &SpectralContext, k: usize, seed: u64) -> Matrix {
    let n = ctx.n();
    let v = &ctx.eigen().eigenvectors;
    let mut rng = Rng::new(seed);
    let mut dense = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            dense[(i, j)] = rng.normal();
        }
    }
    dense.mirror_upper();
    let dense = dense.scale(1.0 / spectral_norm_symmetric(&dense));
    // rank-two coupling with eigenvalues ±1
    let coupling = Matrix::from_fn(n, n, |i, j| {
        v[(i, k)] * v[(j, k + 1)] + v[(i, k + 1)] * v[(j, k)]
    });
    let mut e = dense.add(&coupling);
    e.mirror_upper();
    e.scale(DEMO_PERTURBATION / spectral_norm_symmetric(&e))
}

fn control_case(n: usize, smooth: &FilterSpec, seed: u64) -> Result<ControlReport> {
    let s = build_shift(&path_graph(n)?, ShiftKind::Unnormalized)?;
    let ctx = SpectralContext::new(&s)?;
    let v = &ctx.eigen().eigenvectors;
    let mut rng = Rng::new(seed);
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let x = rng.normal();
            k[(i, j)] = x;
            k[(j, i)] = x;
        }
    }
    let e = v.matmul(&k).matmul(&v.transpose());
    let e = e.scale(CONTROL_PERTURBATION / spectral_norm_symmetric(&e));
    let mut shifted = s.matrix().add(&e);
    shifted.mirror_upper();
    let s2 = ShiftOperator::from_matrix(shifted, s.kind())?;
    let ctx2 = SpectralContext::new(&s2)?;
    let coef = ctx.coefficients(smooth)?;
    Ok(ControlReport {
        norm_e: spectral_norm_symmetric(&s2.matrix().sub(s.matrix())),
        functional_err: op_distance(smooth, &s, &s2)?,
        per_index_err: per_index_distance(&coef, &ctx, &ctx2),
    })
}
