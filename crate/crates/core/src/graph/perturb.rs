use serde::{Deserialize, Serialize};

use super::{shift_from_weights, ShiftOperator};
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm_symmetric, Matrix};
use crate::rng::Rng;

/// How the symmetric error matrix `E` is generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationMode {
    /// `(G + G^T) / 2` with standard normal `G`, rescaled.
    DenseGaussian,
    /// Multiplicative normal jitter on existing edges only.
    EdgeJitter,
    /// Removal of randomly chosen edges.
    EdgeDrop,
}

impl PerturbationMode {
    pub const ALL: [PerturbationMode; 3] = [
        PerturbationMode::DenseGaussian,
        PerturbationMode::EdgeJitter,
        PerturbationMode::EdgeDrop,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PerturbationMode::DenseGaussian => "dense-gaussian",
            PerturbationMode::EdgeJitter => "edge-jitter",
            PerturbationMode::EdgeDrop => "edge-drop",
        }
    }
}

/// A symmetric perturbation `E = Δ' - Δ` with its measured spectral norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    e: Matrix,
    op_norm: f64,
    mode: PerturbationMode,
    seed: u64,
}

impl Perturbation {
    pub fn matrix(&self) -> &Matrix {
        &self.e
    }

    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    pub fn mode(&self) -> PerturbationMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

const EDGE_TOLERANCE: f64 = 0.1;

/// Draws a perturbation of spectral norm `target_norm` and returns `(Δ + E, E)`.
///
/// Dense-gaussian and linear-kind edge-jitter hit the target to rounding.
/// Normalized-kind jitter and edge-drop can only approach it; they aim for
/// 10% and, when `strict` is set, fail with [`Error::NormTargetInfeasible`]
/// otherwise. Without `strict` the achieved norm is returned as measured.
pub fn perturb(
    s: &ShiftOperator,
    mode: PerturbationMode,
    target_norm: f64,
    seed: u64,
    strict: bool,
) -> Result<(ShiftOperator, Perturbation)> {
    if !(target_norm > 0.0) || !target_norm.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "target norm must be positive, got {target_norm}"
        )));
    }
    if target_norm >= 1.0 {
        return Err(Error::PerturbationTooLarge(target_norm));
    }
    let (shifted, weights, prescribed) = match mode {
        PerturbationMode::DenseGaussian => dense_gaussian(s, target_norm, seed)?,
        PerturbationMode::EdgeJitter => edge_jitter(s, target_norm, seed, strict)?,
        PerturbationMode::EdgeDrop => edge_drop(s, target_norm, seed, strict)?,
    };
    // prescribed E when the mode has one; measured Δ' - Δ otherwise
    let e = prescribed.unwrap_or_else(|| shifted.sub(s.matrix()));
    let op_norm = spectral_norm_symmetric(&e);
    let next = ShiftOperator::with_weights(shifted, s.kind(), weights);
    Ok((
        next,
        Perturbation {
            e,
            op_norm,
            mode,
            seed,
        },
    ))
}

type Shifted = (Matrix, Option<Matrix>, Option<Matrix>);

fn dense_gaussian(s: &ShiftOperator, target: f64, seed: u64) -> Result<Shifted> {
    let n = s.n();
    let mut rng = Rng::new(seed);
    let g = Matrix::from_fn(n, n, |_, _| rng.normal());
    let e = Matrix::from_fn(n, n, |i, j| 0.5 * (g[(i, j)] + g[(j, i)]));
    let norm = spectral_norm_symmetric(&e);
    if norm == 0.0 {
        return Err(Error::InvalidArgument(
            "cannot perturb an empty operator".into(),
        ));
    }
    let e = e.scale(target / norm);
    Ok((s.matrix().add(&e), None, Some(e)))
}

fn jitter_direction(w: &Matrix, rng: &mut Rng) -> Matrix {
    let n = w.rows();
    let mut j = Matrix::zeros(n, n);
    for a in 0..n {
        for b in a + 1..n {
            if w[(a, b)] != 0.0 {
                j[(a, b)] = w[(a, b)] * rng.normal();
            }
        }
    }
    j.mirror_upper();
    j
}

fn edge_jitter(s: &ShiftOperator, target: f64, seed: u64, strict: bool) -> Result<Shifted> {
    let w = s.weights().ok_or(Error::MissingWeights("edge-jitter"))?;
    let mut rng = Rng::new(seed);
    let dir = jitter_direction(w, &mut rng);
    let kind = s.kind();

    if kind.is_linear() {
        let e0 = shift_from_weights(&dir, kind)?;
        let norm = spectral_norm_symmetric(&e0);
        if norm == 0.0 {
            return Err(Error::InvalidArgument(
                "graph has no edges to jitter".into(),
            ));
        }
        let amp = target / norm;
        let e = e0.scale(amp);
        let shifted = s.matrix().add(&e);
        return Ok((shifted, Some(w.add(&dir.scale(amp))), Some(e)));
    }

    // Normalized kinds are nonlinear in W: bisect on the jitter amplitude.
    let delta_norm = |amp: f64| -> Option<(f64, Matrix, Matrix)> {
        let w2 = w.add(&dir.scale(amp));
        let shifted = shift_from_weights(&w2, kind).ok()?;
        let norm = spectral_norm_symmetric(&shifted.sub(s.matrix()));
        Some((norm, shifted, w2))
    };
    let within = |norm: f64| (norm - target).abs() <= EDGE_TOLERANCE * target;

    let mut lo = 0.0;
    let mut hi = target;
    let mut best: Option<(f64, Matrix, Matrix)> = None;
    let consider = |cand: &(f64, Matrix, Matrix), best: &mut Option<(f64, Matrix, Matrix)>| {
        if cand.0 < 1.0
            && best
                .as_ref()
                .is_none_or(|b| (cand.0 - target).abs() < (b.0 - target).abs())
        {
            *best = Some(cand.clone());
        }
    };
    // grow the bracket until the norm overshoots (or the weights break)
    for _ in 0..60 {
        match delta_norm(hi) {
            Some(c) if c.0 < target => {
                consider(&c, &mut best);
                lo = hi;
                hi *= 2.0;
            }
            Some(c) => {
                consider(&c, &mut best);
                break;
            }
            None => break,
        }
    }
    for _ in 0..100 {
        if best.as_ref().is_some_and(|b| within(b.0)) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match delta_norm(mid) {
            Some(c) => {
                consider(&c, &mut best);
                if c.0 < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            None => hi = mid,
        }
    }
    match best {
        Some((norm, shifted, w2)) => {
            if strict && !within(norm) {
                return Err(Error::NormTargetInfeasible {
                    target,
                    achieved: norm,
                });
            }
            Ok((shifted, Some(w2), None))
        }
        None => Err(Error::NormTargetInfeasible {
            target,
            achieved: 0.0,
        }),
    }
}

fn edge_drop(s: &ShiftOperator, target: f64, seed: u64, strict: bool) -> Result<Shifted> {
    let w = s.weights().ok_or(Error::MissingWeights("edge-drop"))?;
    let kind = s.kind();
    let n = w.rows();
    let mut edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| w[(i, j)] != 0.0)
        .collect();
    let mut rng = Rng::new(seed);
    rng.shuffle(&mut edges);

    let upper = (target * (1.0 + EDGE_TOLERANCE)).min(0.5 * (1.0 + target));
    let lower = target * (1.0 - EDGE_TOLERANCE);
    let mut current = w.clone();
    let mut degrees: Vec<f64> = (0..n).map(|i| w.row(i).iter().sum()).collect();
    let mut achieved = 0.0;

    for (i, j) in edges {
        if achieved >= lower {
            break;
        }
        let wij = current[(i, j)];
        // norm of removing this edge alone, for the linear kinds
        let single = match kind {
            super::ShiftKind::Unnormalized => 2.0 * wij,
            super::ShiftKind::Adjacency => wij,
            _ => 0.0,
        };
        if single > upper {
            continue;
        }
        if !kind.is_linear() && (degrees[i] - wij <= 0.0 || degrees[j] - wij <= 0.0) {
            continue;
        }
        let mut trial = current.clone();
        trial[(i, j)] = 0.0;
        trial[(j, i)] = 0.0;
        let shifted = shift_from_weights(&trial, kind)?;
        let norm = spectral_norm_symmetric(&shifted.sub(s.matrix()));
        if norm <= upper {
            current = trial;
            degrees[i] -= wij;
            degrees[j] -= wij;
            achieved = norm;
        }
    }
    if strict && (achieved < lower || achieved > upper) {
        return Err(Error::NormTargetInfeasible { target, achieved });
    }
    let shifted = shift_from_weights(&current, kind)?;
    Ok((shifted, Some(current), None))
}

/// Removes the listed edges (`(i, j)` pairs) and rebuilds the shift operator.
pub fn drop_edges(s: &ShiftOperator, edges: &[(usize, usize)]) -> Result<ShiftOperator> {
    let w = s.weights().ok_or(Error::MissingWeights("edge-drop"))?;
    let n = w.rows();
    let mut next = w.clone();
    for &(i, j) in edges {
        if i >= n || j >= n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: i.max(j) + 1,
            });
        }
        next[(i, j)] = 0.0;
        next[(j, i)] = 0.0;
    }
    let shifted = shift_from_weights(&next, s.kind())?;
    Ok(ShiftOperator::with_weights(shifted, s.kind(), Some(next)))
}
