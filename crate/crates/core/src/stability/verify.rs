use std::fmt;

use serde::Serialize;

use super::{
    check_cayley_contraction, check_equivariance, check_lemma1, check_lemma2,
    check_resolvent_bound, per_index_instability_demo, MarginReport,
};
use crate::error::{Error, Result};
use crate::filters::{apply_exact, apply_spatial, FilterSpec};
use crate::graph::{build_shift, gen_geometric_graph, Permutation, ShiftKind, ShiftOperator};
use crate::linalg::{
    cayley_transform, spectral_norm_symmetric, unitarity_defect, vec_dist, vec_norm, Cx, Matrix,
};
use crate::rng::{derive_seed, Rng};

pub const LEMMA2_TOL: f64 = 1e-9;
pub const EQUIVARIANCE_TOL: f64 = 1e-9;
pub const PATH_TOL: f64 = 1e-8;
pub const UNITARITY_TOL: f64 = 1e-10;
pub const DEMO_EXCESS: f64 = 10.0;
pub const CONTROL_TOL: f64 = 0.1;

/// Kernel width for the random instance graphs; wide enough that every
/// pair of points in the unit square is joined, so no vertex is isolated.
const INSTANCE_KERNEL_WIDTH: f64 = 0.5;
const MAX_ORDER: usize = 6;

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub instances: usize,
    /// Flip the Lemma 1 verdict so that the run must fail.
    pub negative_self_test: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteFailure {
    pub instance: usize,
    pub seed: u64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub instances: usize,
    pub failures: usize,
    /// Largest observed ratio of measured quantity to allowed quantity;
    /// at most 1 on a pass.
    pub worst_ratio: f64,
    pub first_failure: Option<SuiteFailure>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub instances: usize,
    pub negative_self_test: bool,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            let verdict = if s.passed() { "PASS" } else { "FAIL" };
            write!(
                f,
                "{verdict} {:<22} {}/{} instances, worst ratio {:.3e}",
                s.name,
                s.instances - s.failures,
                s.instances,
                s.worst_ratio
            )?;
            if let Some(fail) = &s.first_failure {
                write!(
                    f,
                    " (first failure: instance {} seed {}: {})",
                    fail.instance, fail.seed, fail.detail
                )?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "{}",
            if self.passed {
                "all suites passed"
            } else {
                "verification FAILED"
            }
        )
    }
}

/// Symmetric `n × n` matrix with standard normal upper triangle and diagonal.
pub fn random_symmetric(n: usize, rng: &mut Rng) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = rng.normal();
        }
    }
    m.mirror_upper();
    m
}

fn random_cx(rng: &mut Rng) -> Cx {
    Cx::new(rng.normal(), rng.normal())
}

/// Rational filter of degree `order` whose denominator `Π (1 - λ / r_j)` has
/// roots at distance at least `rho / 2` from the real line, and whose
/// numerator coefficients shrink like `rho^{-k}`.
pub fn random_rational(order: usize, rho: f64, rng: &mut Rng) -> Result<FilterSpec> {
    let mut den = vec![Cx::ONE];
    for _ in 0..order {
        let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
        let root = Cx::new(2.0 * rng.uniform() - 1.0, sign * (0.5 + rng.uniform())).scale(rho);
        let step = Cx::ZERO - Cx::ONE / root;
        let mut next = vec![Cx::ZERO; den.len() + 1];
        for (k, &c) in den.iter().enumerate() {
            next[k] += c;
            next[k + 1] += c * step;
        }
        den = next;
    }
    let num = (0..=order)
        .map(|k| random_cx(rng).scale(rho.powi(-(k as i32))))
        .collect();
    FilterSpec::rational(num, den)
}

/// A polynomial, rational or Cayley filter of order `1..=max_order`, scaled
/// to an operator of norm about `rho`.
pub fn random_spec(max_order: usize, rho: f64, rng: &mut Rng) -> Result<FilterSpec> {
    let order = 1 + rng.below(max_order.max(1));
    match rng.below(3) {
        0 => FilterSpec::polynomial(
            (0..=order)
                .map(|k| random_cx(rng).scale(rho.powi(-(k as i32))))
                .collect(),
        ),
        1 => random_rational(order, rho, rng),
        _ => {
            let coeffs = (0..=order)
                .map(|l| random_cx(rng).scale(1.0 / (1 + l) as f64))
                .collect();
            FilterSpec::cayley(coeffs, rng.uniform() < 0.5)
        }
    }
}

fn random_kind(rng: &mut Rng) -> ShiftKind {
    [
        ShiftKind::Unnormalized,
        ShiftKind::Normalized,
        ShiftKind::NormalizedTranslated,
        ShiftKind::Adjacency,
    ][rng.below(4)]
}

/// Shift operator of a random geometric graph on `2..=max_n` vertices.
fn random_shift(max_n: usize, rng: &mut Rng) -> Result<ShiftOperator> {
    let n = 2 + rng.below(max_n - 1);
    let g = gen_geometric_graph(n, rng.next_u64(), INSTANCE_KERNEL_WIDTH)?;
    build_shift(&g, random_kind(rng))
}

fn random_signal(n: usize, rng: &mut Rng) -> Vec<Cx> {
    (0..n).map(|_| random_cx(rng)).collect()
}

/// `Δ + E` with `||E||` drawn uniformly from `(0, max_norm]`.
fn random_neighbour(s: &ShiftOperator, max_norm: f64, rng: &mut Rng) -> Result<ShiftOperator> {
    let e = random_symmetric(s.n(), rng);
    let target = max_norm * (1.0 - rng.uniform());
    let e = e.scale(target / spectral_norm_symmetric(&e));
    ShiftOperator::from_matrix(s.matrix().add(&e), s.kind())
}

fn rho_of(s: &ShiftOperator) -> f64 {
    spectral_norm_symmetric(s.matrix()).max(1.0)
}

/// Outcome of one instance: the ratio measured / allowed, and whether the
/// instance passes.
struct Outcome {
    ratio: f64,
    ok: bool,
    detail: String,
}

impl Outcome {
    fn margin(r: MarginReport) -> Self {
        Outcome {
            ratio: ratio(r.lhs, r.rhs),
            ok: r.holds,
            detail: format!("lhs {:e} rhs {:e}", r.lhs, r.rhs),
        }
    }

    fn below(value: f64, allowed: f64) -> Self {
        Outcome {
            ratio: ratio(value, allowed),
            ok: value <= allowed,
            detail: format!("{value:e} exceeds {allowed:e}"),
        }
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a / b
    }
}

fn run_suite(
    name: &'static str,
    cfg: &VerifyConfig,
    instances: usize,
    mut check: impl FnMut(&mut Rng, u64) -> Result<Outcome>,
) -> SuiteResult {
    let mut result = SuiteResult {
        name,
        instances,
        failures: 0,
        worst_ratio: 0.0,
        first_failure: None,
    };
    for i in 0..instances {
        let seed = derive_seed(cfg.seed, &[suite_tag(name), i as u64]);
        let mut rng = Rng::new(seed);
        let outcome = check(&mut rng, seed).unwrap_or_else(|e| Outcome {
            ratio: f64::INFINITY,
            ok: false,
            detail: format!("{}: {e}", e.name()),
        });
        result.worst_ratio = result.worst_ratio.max(outcome.ratio);
        if !outcome.ok {
            result.failures += 1;
            result.first_failure.get_or_insert(SuiteFailure {
                instance: i,
                seed,
                detail: outcome.detail,
            });
        }
    }
    result
}

fn suite_tag(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Runs every randomized check `cfg.instances` times, the per-index
/// demonstration on up to `cfg.instances` constructed graphs.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.instances == 0 {
        return Err(Error::InvalidArgument(
            "instances must be at least 1".into(),
        ));
    }
    let k = cfg.instances;
    let negative = cfg.negative_self_test;
    let suites = vec![
        run_suite("lemma1", cfg, k, |rng, _| {
            let n = 1 + rng.below(16);
            let d = random_symmetric(n, rng);
            let b = d.add(&random_symmetric(n, rng).scale(rng.uniform()));
            let l = rng.below(9) as u32;
            let mut out = Outcome::margin(check_lemma1(&b, &d, l)?);
            out.ok ^= negative;
            Ok(out)
        }),
        run_suite("lemma2", cfg, k, |rng, _| {
            let s = random_shift(16, rng)?;
            let rho = rho_of(&s);
            let f = random_spec(MAX_ORDER, rho, rng)?;
            let g = random_spec(MAX_ORDER, rho, rng)?;
            let r = check_lemma2(&f, &g, &s)?;
            Ok(Outcome::below(r.residual, LEMMA2_TOL * (1.0 + r.lhs)))
        }),
        run_suite("resolvent", cfg, k, |rng, _| {
            let s = random_shift(16, rng)?;
            let s2 = random_neighbour(&s, 0.5, rng)?;
            Ok(Outcome::margin(check_resolvent_bound(&s, &s2)?))
        }),
        run_suite("cayley-contraction", cfg, k, |rng, _| {
            let s = random_shift(16, rng)?;
            let s2 = random_neighbour(&s, 0.5, rng)?;
            Ok(Outcome::margin(check_cayley_contraction(&s, &s2)?))
        }),
        run_suite("unitarity", cfg, k, |rng, _| {
            let s = random_shift(32, rng)?;
            Ok(Outcome::below(
                unitarity_defect(&cayley_transform(s.matrix())?),
                UNITARITY_TOL,
            ))
        }),
        run_suite("equivariance", cfg, k, |rng, _| {
            let s = random_shift(32, rng)?;
            let spec = random_spec(MAX_ORDER, rho_of(&s), rng)?;
            let p = Permutation::random(s.n(), rng.next_u64());
            let f = random_signal(s.n(), rng);
            Ok(Outcome::below(
                check_equivariance(&spec, &s, &p, &f)?,
                EQUIVARIANCE_TOL,
            ))
        }),
        run_suite("path-equivalence", cfg, k, |rng, _| {
            let s = random_shift(64, rng)?;
            let spec = random_spec(MAX_ORDER, rho_of(&s), rng)?;
            let f = random_signal(s.n(), rng);
            Ok(Outcome::below(path_difference(&spec, &s, &f)?, PATH_TOL))
        }),
        run_suite("per-index-demo", cfg, k, |rng, seed| {
            let n = 4 + rng.below(13);
            let r = per_index_instability_demo(n, seed)?;
            let ratio = (r.functional.lhs / r.bound)
                .max(DEMO_EXCESS / r.excess_factor())
                .max(r.control.relative_difference() / CONTROL_TOL);
            Ok(Outcome {
                ratio,
                ok: ratio <= 1.0 && r.functional.holds,
                detail: format!(
                    "n {n}: functional {:e} bound {:e} per-index {:e} control {:.3}",
                    r.functional.lhs,
                    r.bound,
                    r.per_index_err,
                    r.control.relative_difference()
                ),
            })
        }),
    ];
    let passed = suites.iter().all(SuiteResult::passed);
    Ok(VerifyReport {
        seed: cfg.seed,
        instances: k,
        negative_self_test: negative,
        passed,
        suites,
    })
}

/// `||exact - spatial|| / ||exact||`, with `0/0` read as 0.
pub fn path_difference(spec: &FilterSpec, s: &ShiftOperator, f: &[Cx]) -> Result<f64> {
    let a = apply_exact(spec, s, f)?;
    let b = apply_spatial(spec, s, f)?;
    Ok(ratio(vec_dist(&a, &b), vec_norm(&a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_negative_fails() {
        let cfg = VerifyConfig {
            seed: 1,
            instances: 5,
            negative_self_test: false,
        };
        let report = run_verify(&cfg).unwrap();
        assert!(report.passed, "{report}");
        assert_eq!(report.suites.len(), 8);
        let neg = run_verify(&VerifyConfig {
            negative_self_test: true,
            ..cfg
        })
        .unwrap();
        assert!(!neg.passed);
        let failing: Vec<_> = neg
            .suites
            .iter()
            .filter(|s| !s.passed())
            .map(|s| s.name)
            .collect();
        assert_eq!(failing, ["lemma1"]);
        assert!(neg.to_string().contains("FAIL lemma1"));
    }

    #[test]
    fn zero_instances_rejected() {
        let cfg = VerifyConfig {
            seed: 0,
            instances: 0,
            negative_self_test: false,
        };
        assert!(run_verify(&cfg).is_err());
    }

    #[test]
    fn random_rational_has_no_real_poles_near_spectrum() {
        let mut rng = Rng::new(3);
        for _ in 0..50 {
            let FilterSpec::Rational { den, .. } = random_rational(4, 5.0, &mut rng).unwrap()
            else {
                unreachable!()
            };
            for k in 0..=100 {
                let l = -5.0 + 0.1 * k as f64;
                let d = den
                    .iter()
                    .rev()
                    .fold(Cx::ZERO, |acc, &c| acc * Cx::real(l) + c);
                assert!(d.abs() > 0.1);
            }
        }
    }
}
