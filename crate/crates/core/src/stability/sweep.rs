use rayon::prelude::*;
use serde::Serialize;

use super::{theorem1_bound, CERTIFICATION_TOL};
use crate::error::{Error, Result};
use crate::filters::{
    cayley_seminorm, evaluate_scalar, pad_response, projected_seminorm, FilterSpec,
    SpectralContext, DEFAULT_PAD_TRANSITION,
};
use crate::graph::{perturb, PerturbationMode, ShiftOperator};
use crate::linalg::{spectral_norm, spectral_norm_symmetric, vec_dist, vec_norm, Cx};
use crate::rng::{derive_seed, Rng};

pub const PROJECTION_ORDER: usize = 64;
pub const PROJECTION_POINTS: usize = 8192;
pub const DEFAULT_RANDOM_SIGNALS: usize = 64;

/// Signal seeds live on a path no trial uses.
const SIGNAL_STREAM: u64 = u64::MAX;

/// One trial of the perturbation experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityRecord {
    pub magnitude_target: f64,
    pub trial: usize,
    pub norm_e: f64,
    /// `||E|| / ||Δ||`.
    pub rel_norm_e: f64,
    pub norm_shift: f64,
    pub op_err: f64,
    pub bound: f64,
    pub seminorm: f64,
    pub mean_rel_signal_err: f64,
    pub max_rel_signal_err: f64,
    pub trial_seed: u64,
}

impl StabilityRecord {
    pub fn certified(&self) -> bool {
        self.op_err <= self.bound * (1.0 + CERTIFICATION_TOL)
    }
}

#[derive(Clone, Debug)]
pub enum SignalSource {
    /// This many standard normal signals drawn from the base seed.
    Random(usize),
    Provided(Vec<Vec<Cx>>),
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub magnitudes: Vec<f64>,
    pub trials: usize,
    pub mode: PerturbationMode,
    pub base_seed: u64,
    pub signals: SignalSource,
    /// Fail instead of recording when a structured mode misses its target.
    pub strict: bool,
    /// Worker threads for the trials; 0 lets the runtime decide. Does not
    /// affect the output.
    pub threads: usize,
}

impl SweepConfig {
    pub fn new(
        magnitudes: Vec<f64>,
        trials: usize,
        mode: PerturbationMode,
        base_seed: u64,
    ) -> Self {
        SweepConfig {
            magnitudes,
            trials,
            mode,
            base_seed,
            signals: SignalSource::Random(DEFAULT_RANDOM_SIGNALS),
            strict: false,
            threads: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.magnitudes.is_empty() {
            return Err(Error::InvalidArgument("no magnitudes given".into()));
        }
        if self.magnitudes.iter().any(|&m| !(m > 0.0 && m < 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "magnitudes must lie in (0, 1), got {:?}",
                self.magnitudes
            )));
        }
        if self.magnitudes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument(format!(
                "magnitudes must be strictly ascending, got {:?}",
                self.magnitudes
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        match &self.signals {
            SignalSource::Random(0) => Err(Error::InvalidArgument(
                "random signal count must be at least 1".into(),
            )),
            SignalSource::Provided(s) if s.is_empty() => {
                Err(Error::InvalidArgument("no signals provided".into()))
            }
            _ => Ok(()),
        }
    }
}

/// `count` real standard normal signals of length `n`.
pub fn random_signals(n: usize, count: usize, seed: u64) -> Vec<Vec<Cx>> {
    let mut rng = Rng::new(seed);
    (0..count)
        .map(|_| (0..n).map(|_| Cx::real(rng.normal())).collect())
        .collect()
}

/// Where the seminorm in the bound came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum SeminormSource {
    /// Read off the filter's own Cayley coefficients.
    Exact { value: f64 },
    /// Projection of the padded response onto `order` Cayley powers.
    Projected {
        value: f64,
        tail: f64,
        order: usize,
        points: usize,
        band: (f64, f64),
        transition: f64,
    },
}

impl SeminormSource {
    pub fn value(&self) -> f64 {
        match self {
            SeminormSource::Exact { value } | SeminormSource::Projected { value, .. } => *value,
        }
    }
}

/// Seminorm entering the bound for `spec` on an operator with spectrum in
/// `[lambda_min, lambda_max]`.
///
/// Cayley filters use their coefficients directly. Polynomial and rational
/// filters are padded outside `[lambda_min - 1, lambda_max + 1]`; every
/// perturbed spectrum with `||E|| < 1` stays inside that band, so the pad
/// agrees with the filter on both operators.
pub fn certified_seminorm(
    spec: &FilterSpec,
    lambda_min: f64,
    lambda_max: f64,
) -> Result<SeminormSource> {
    match spec {
        FilterSpec::PerIndex(_) => Err(Error::NoScalarResponse),
        FilterSpec::Cayley { .. } => Ok(SeminormSource::Exact {
            value: cayley_seminorm(spec)?.value(),
        }),
        _ => {
            let band = (lambda_min - 1.0, lambda_max + 1.0);
            let owned = spec.clone();
            let g = pad_response(
                move |l| evaluate_scalar(&owned, l).unwrap_or(Cx::new(f64::NAN, f64::NAN)),
                band,
                DEFAULT_PAD_TRANSITION,
            )?;
            let est = projected_seminorm(&g, PROJECTION_ORDER, PROJECTION_POINTS)?;
            if !est.truncated.is_finite() {
                return Err(Error::InvalidArgument(
                    "filter response is unbounded near the spectrum".into(),
                ));
            }
            Ok(SeminormSource::Projected {
                value: est.truncated,
                tail: est.tail,
                order: PROJECTION_ORDER,
                points: PROJECTION_POINTS,
                band,
                transition: DEFAULT_PAD_TRANSITION,
            })
        }
    }
}

/// Runs `trials` perturbations at each magnitude and measures the filter's
/// drift, in operator norm and on the signals.
///
/// Trial `t` at magnitude index `m` draws its perturbation from
/// `derive_seed(base_seed, [m, t])`. Records come back ordered by
/// `(m, t)`, identical for every thread count.
pub fn stability_sweep(
    s: &ShiftOperator,
    spec: &FilterSpec,
    cfg: &SweepConfig,
) -> Result<(Vec<StabilityRecord>, SeminormSource)> {
    cfg.validate()?;
    let ctx = SpectralContext::new(s)?;
    let lambda = ctx.eigenvalues();
    let seminorm = certified_seminorm(spec, lambda[0], lambda[lambda.len() - 1])?;
    let g0 = ctx.filter_matrix(spec)?;
    let n = s.n();
    let signals = match &cfg.signals {
        SignalSource::Random(count) => {
            random_signals(n, *count, derive_seed(cfg.base_seed, &[SIGNAL_STREAM]))
        }
        SignalSource::Provided(v) => {
            if let Some(bad) = v.iter().find(|f| f.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: bad.len(),
                });
            }
            v.clone()
        }
    };
    let outputs: Vec<Vec<Cx>> = signals.iter().map(|f| g0.matvec(f)).collect();
    let norm_shift = spectral_norm_symmetric(s.matrix());

    let jobs: Vec<(usize, usize)> = (0..cfg.magnitudes.len())
        .flat_map(|m| (0..cfg.trials).map(move |t| (m, t)))
        .collect();
    let run = |&(m, t): &(usize, usize)| -> Result<StabilityRecord> {
        let trial_seed = derive_seed(cfg.base_seed, &[m as u64, t as u64]);
        let (s2, pert) = perturb(s, cfg.mode, cfg.magnitudes[m], trial_seed, cfg.strict)?;
        let g1 = SpectralContext::new(&s2)?.filter_matrix(spec)?;
        let op_err = spectral_norm(&g0.sub(&g1));
        let norm_e = pert.op_norm();
        let errs: Vec<f64> = signals
            .iter()
            .zip(&outputs)
            .map(|(f, y)| {
                let d = vec_dist(y, &g1.matvec(f));
                if d == 0.0 {
                    0.0
                } else {
                    d / vec_norm(y)
                }
            })
            .collect();
        Ok(StabilityRecord {
            magnitude_target: cfg.magnitudes[m],
            trial: t,
            norm_e,
            rel_norm_e: if norm_shift > 0.0 {
                norm_e / norm_shift
            } else {
                0.0
            },
            norm_shift,
            op_err,
            bound: theorem1_bound(seminorm.value(), norm_shift, norm_e)?,
            seminorm: seminorm.value(),
            mean_rel_signal_err: errs.iter().sum::<f64>() / errs.len() as f64,
            max_rel_signal_err: errs.iter().copied().fold(0.0, f64::max),
            trial_seed,
        })
    };
    let records = if cfg.threads == 0 {
        jobs.par_iter().map(run).collect::<Result<Vec<_>>>()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(|| jobs.par_iter().map(run).collect::<Result<Vec<_>>>())?
    };
    Ok((records, seminorm))
}

/// Per-magnitude means over the trials of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MagnitudeSummary {
    pub magnitude_target: f64,
    pub trials: usize,
    pub mean_norm_e: f64,
    pub mean_op_err: f64,
    pub mean_rel_signal_err: f64,
    pub violations: usize,
}

pub fn magnitude_summary(records: &[StabilityRecord]) -> Vec<MagnitudeSummary> {
    let mut out: Vec<MagnitudeSummary> = Vec::new();
    for r in records {
        if out.last().map(|s| s.magnitude_target) != Some(r.magnitude_target) {
            out.push(MagnitudeSummary {
                magnitude_target: r.magnitude_target,
                trials: 0,
                mean_norm_e: 0.0,
                mean_op_err: 0.0,
                mean_rel_signal_err: 0.0,
                violations: 0,
            });
        }
        let s = out.last_mut().expect("pushed above");
        s.trials += 1;
        s.mean_norm_e += r.norm_e;
        s.mean_op_err += r.op_err;
        s.mean_rel_signal_err += r.mean_rel_signal_err;
        s.violations += usize::from(!r.certified());
    }
    for s in &mut out {
        let k = s.trials as f64;
        s.mean_norm_e /= k;
        s.mean_op_err /= k;
        s.mean_rel_signal_err /= k;
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// usable points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}
