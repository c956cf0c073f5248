//! Cayley smoothness: the seminorm, projection of scalar responses onto
//! powers of the Cayley transform, and compactly supported padding.
//!
//! On the unit circle `z = e^{iθ}` the inverse Cayley map is
//! `λ = i (1 + z) / (1 - z) = -cot(θ / 2)`, so a response `g` corresponds to
//! `q(e^{iθ}) = g(-cot(θ / 2))`, and `z = 1` corresponds to `λ = ±∞`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::{evaluate_scalar, FilterSpec};
use crate::error::{Error, Result};
use crate::linalg::Cx;

pub const DEFAULT_QUADRATURE_POINTS: usize = 4096;

const NOISE_FLOOR: f64 = 1e-13;

/// `Σ_{l>=1} l |c_l|`; the constant term does not enter.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct CayleySeminorm(f64);

impl CayleySeminorm {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn cayley_seminorm(spec: &FilterSpec) -> Result<CayleySeminorm> {
    match spec {
        FilterSpec::Cayley { coeffs, .. } => Ok(CayleySeminorm(
            coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(l, c)| l as f64 * c.abs())
                .sum(),
        )),
        _ => Err(Error::WrongVariant { expected: "cayley" }),
    }
}

/// What a response does as `|λ| -> ∞`, i.e. near `z = 1` on the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    /// `g(λ) -> 0`; the decay flag.
    Vanishing,
    /// `g` has one finite limit at both ends, so `q` is continuous at `z = 1`.
    Continuous,
    /// Nothing declared; projection refuses it.
    Undeclared,
}

type ResponseFn = dyn Fn(f64) -> Cx + Send + Sync;

/// A scalar response `g: R -> C` with its declared behaviour at infinity.
#[derive(Clone)]
pub struct ScalarResponse {
    f: Arc<ResponseFn>,
    tail: Tail,
}

impl fmt::Debug for ScalarResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarResponse")
            .field("tail", &self.tail)
            .finish_non_exhaustive()
    }
}

const FAR: f64 = 1e6;

impl ScalarResponse {
    /// Declares decay; checked as `|g(±1e6)| <= 1e-6 * peak`.
    pub fn decaying(f: impl Fn(f64) -> Cx + Send + Sync + 'static) -> Result<Self> {
        let r = ScalarResponse {
            f: Arc::new(f),
            tail: Tail::Vanishing,
        };
        let peak = r.peak();
        let far = r.eval(FAR).abs().max(r.eval(-FAR).abs());
        if !(far <= 1e-6 * peak) && far != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "response does not decay: |g(±1e6)| = {far:e}, peak {peak:e}"
            )));
        }
        Ok(r)
    }

    /// Declares a common finite limit at `±∞`; checked at `λ = ±1e6`.
    pub fn continuous_at_infinity(f: impl Fn(f64) -> Cx + Send + Sync + 'static) -> Result<Self> {
        let r = ScalarResponse {
            f: Arc::new(f),
            tail: Tail::Continuous,
        };
        let gap = (r.eval(FAR) - r.eval(-FAR)).abs();
        if !(gap <= 1e-5 * (1.0 + r.peak())) {
            return Err(Error::InvalidArgument(format!(
                "limits at ±infinity differ by {gap:e}"
            )));
        }
        Ok(r)
    }

    pub fn undeclared(f: impl Fn(f64) -> Cx + Send + Sync + 'static) -> Self {
        ScalarResponse {
            f: Arc::new(f),
            tail: Tail::Undeclared,
        }
    }

    /// The scalar response of a spec. Cayley responses are continuous at
    /// infinity; other variants carry no declaration.
    pub fn from_spec(spec: &FilterSpec) -> Result<Self> {
        if matches!(spec, FilterSpec::PerIndex(_)) {
            return Err(Error::NoScalarResponse);
        }
        let owned = spec.clone();
        let f = move |l: f64| evaluate_scalar(&owned, l).unwrap_or(Cx::new(f64::NAN, f64::NAN));
        match spec {
            FilterSpec::Cayley { .. } => Self::continuous_at_infinity(f),
            _ => Ok(Self::undeclared(f)),
        }
    }

    pub fn eval(&self, lambda: f64) -> Cx {
        (self.f)(lambda)
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn has_decay_flag(&self) -> bool {
        self.tail != Tail::Undeclared
    }

    /// Largest `|g|` over the quadrature nodes of the default grid.
    fn peak(&self) -> f64 {
        circle_nodes(DEFAULT_QUADRATURE_POINTS)
            .map(|(_, l)| self.eval(l).abs())
            .fold(0.0, f64::max)
    }
}

/// Midpoint nodes `θ_m = 2π(m + 1/2)/M` with their preimages `λ_m = -cot(θ_m / 2)`.
fn circle_nodes(m: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..m).map(move |k| {
        let theta = 2.0 * PI * (k as f64 + 0.5) / m as f64;
        let half = 0.5 * theta;
        (theta, -half.cos() / half.sin())
    })
}

/// Fourier coefficients `c_l = (1/M) Σ_m q(e^{iθ_m}) e^{-i l θ_m}` for every `l` in `orders`.
pub fn circle_coefficients(
    g: &ScalarResponse,
    orders: impl IntoIterator<Item = i64>,
    points: usize,
) -> Vec<Cx> {
    let samples: Vec<(f64, Cx)> = circle_nodes(points).map(|(t, l)| (t, g.eval(l))).collect();
    let inv_m = 1.0 / points as f64;
    orders
        .into_iter()
        .map(|l| {
            let acc = samples.iter().fold(Cx::ZERO, |acc, &(theta, q)| {
                acc + q * Cx::cis(-(l as f64) * theta)
            });
            acc.scale(inv_m)
        })
        .collect()
}

fn check_projection(g: &ScalarResponse, order: usize, points: usize) -> Result<()> {
    if !g.has_decay_flag() {
        return Err(Error::DecayFlagMissing);
    }
    if points == 0 || points < 8 * order {
        return Err(Error::QuadratureUnderResolved { points, order });
    }
    Ok(())
}

/// Projects `g` onto `Σ_{l=0}^{L} c_l C(λ)^l` (nonnegative frequencies only).
pub fn cayley_project(g: &ScalarResponse, order: usize, points: usize) -> Result<FilterSpec> {
    check_projection(g, order, points)?;
    let coeffs = circle_coefficients(g, 0..=order as i64, points);
    FilterSpec::cayley(coeffs, false)
}

/// Projection of a real-valued `g` as `Re(c_0 + Σ_{l>=1} 2 c_l C(λ)^l)`.
///
/// A real response has `c_{-l} = conj(c_l)`, so the one-sided real-part form
/// reproduces it exactly, negative frequencies included.
pub fn cayley_project_real(g: &ScalarResponse, order: usize, points: usize) -> Result<FilterSpec> {
    check_projection(g, order, points)?;
    let worst_im = circle_nodes(points)
        .map(|(_, l)| g.eval(l).im.abs())
        .fold(0.0, f64::max);
    let peak = circle_nodes(points)
        .map(|(_, l)| g.eval(l).abs())
        .fold(0.0, f64::max);
    if worst_im > 1e-12 * peak.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidArgument(format!(
            "response is not real-valued (|Im g| up to {worst_im:e})"
        )));
    }
    let c = circle_coefficients(g, 0..=order as i64, points);
    let coeffs = c
        .iter()
        .enumerate()
        .map(|(l, &z)| if l == 0 { Cx::real(z.re) } else { z.scale(2.0) })
        .collect();
    FilterSpec::cayley(coeffs, true)
}

/// Seminorm of a projected response with a truncation-tail estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeminormEstimate {
    /// `Σ_{0<|l|<=L} |l| |c_l|` over both frequency signs.
    pub truncated: f64,
    /// Extrapolated `Σ_{|l|>L} |l| |c_l|`; infinite when the coefficients do not visibly decay.
    pub tail: f64,
    pub order: usize,
    pub points: usize,
}

impl SeminormEstimate {
    pub fn total(&self) -> f64 {
        self.truncated + self.tail
    }

    pub fn tail_ratio(&self) -> f64 {
        if self.truncated == 0.0 {
            if self.tail == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.tail / self.truncated
        }
    }
}

/// Two-sided seminorm of `g`'s circle expansion truncated at `order`.
///
/// Negative powers are `C(Δ)^{-l} = C(Δ)^{*l}`, so they obey the same
/// Lipschitz estimate as positive ones and enter with weight `|l|`.
pub fn projected_seminorm(
    g: &ScalarResponse,
    order: usize,
    points: usize,
) -> Result<SeminormEstimate> {
    check_projection(g, order, points)?;
    let pos: Vec<f64> = circle_coefficients(g, 1..=order as i64, points)
        .iter()
        .map(|c| c.abs())
        .collect();
    let neg: Vec<f64> = circle_coefficients(g, (1..=order as i64).map(|l| -l), points)
        .iter()
        .map(|c| c.abs())
        .collect();
    let weighted = |m: &[f64]| {
        m.iter()
            .enumerate()
            .map(|(i, a)| (i + 1) as f64 * a)
            .sum::<f64>()
    };
    // coefficients at rounding level carry no decay information
    let floor = NOISE_FLOOR * pos.iter().chain(&neg).copied().fold(g.peak(), f64::max);
    Ok(SeminormEstimate {
        truncated: weighted(&pos) + weighted(&neg),
        tail: tail_estimate(&pos, floor) + tail_estimate(&neg, floor),
        order,
        points,
    })
}

/// Geometric extrapolation of `Σ_{l>L} l |c_l|` from the decay of the
/// coefficient envelope over the last two windows of width `max(2, L/8)`.
fn tail_estimate(mags: &[f64], floor: f64) -> f64 {
    let order = mags.len();
    let w = (order / 8).max(2);
    if order < 2 * w {
        return if mags.iter().all(|&m| m <= floor) {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let env = |range: std::ops::Range<usize>| mags[range].iter().copied().fold(0.0, f64::max);
    let recent = env(order - w..order);
    let prev = env(order - 2 * w..order - w);
    if recent <= floor {
        return 0.0;
    }
    if prev == 0.0 {
        return f64::INFINITY;
    }
    let r = (recent / prev).powf(1.0 / w as f64);
    if r >= 1.0 {
        return f64::INFINITY;
    }
    let l = order as f64;
    recent * (l * r / (1.0 - r) + r / ((1.0 - r) * (1.0 - r)))
}

/// `exp(-1/x)` for `x > 0`, else 0.
fn flat_exp(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// C^∞ step: 1 for `x <= 0`, 0 for `x >= 1`.
fn smooth_step_down(x: f64) -> f64 {
    let up = flat_exp(x);
    let down = flat_exp(1.0 - x);
    down / (up + down)
}

/// Circle angle of `λ`, the inverse of `θ ↦ -cot(θ/2)` on `(0, 2π)`.
fn angle_of(lambda: f64) -> f64 {
    2.0 * (1.0f64).atan2(-lambda)
}

/// Default share of each free arc used by the padding transition.
pub const DEFAULT_PAD_TRANSITION: f64 = 0.8;

/// Window that is 1 on `[a, b]` and falls smoothly to 0 in circle angle.
///
/// `[a, b]` occupies the arc `[θ_a, θ_b]`; the transitions use the share
/// `fraction` of the arcs `(0, θ_a)` and `(θ_b, 2π)` next to the band.
#[derive(Clone, Copy, Debug)]
struct AngleWindow {
    theta_a: f64,
    theta_b: f64,
    lower: f64,
    upper: f64,
}

impl AngleWindow {
    fn new(a: f64, b: f64, fraction: f64) -> Self {
        let theta_a = angle_of(a);
        let theta_b = angle_of(b);
        Self {
            theta_a,
            theta_b,
            lower: fraction * theta_a,
            upper: fraction * (2.0 * PI - theta_b),
        }
    }

    fn eval(&self, lambda: f64) -> f64 {
        let theta = angle_of(lambda);
        if theta < self.theta_a {
            smooth_step_down((self.theta_a - theta) / self.lower)
        } else if theta > self.theta_b {
            smooth_step_down((theta - self.theta_b) / self.upper)
        } else {
            1.0
        }
    }

    fn support(&self) -> (f64, f64) {
        let lam = |t: f64| -1.0 / (t / 2.0).tan();
        (
            lam(self.theta_a - self.lower),
            lam(self.theta_b + self.upper),
        )
    }
}

/// `λ ↦ base(λ) · w(λ)` with a C^∞ window `w` that is 1 on `band` and 0
/// outside a bounded interval around it.
///
/// The window is built in the circle angle `θ` with `λ = -cot(θ/2)`: it
/// falls to 0 across the share `transition` (in `(0, 1)`) of each arc between
/// the band and `z = 1`. Smoothness in `θ` is what keeps the circle
/// coefficients decaying fast. `base` is evaluated only inside the support,
/// see [`pad_support`].
pub fn pad_response(
    base: impl Fn(f64) -> Cx + Send + Sync + 'static,
    band: (f64, f64),
    transition: f64,
) -> Result<ScalarResponse> {
    let window = pad_window(band, transition)?;
    Ok(ScalarResponse {
        f: Arc::new(move |l: f64| {
            let w = window.eval(l);
            if w == 0.0 {
                Cx::ZERO
            } else {
                base(l).scale(w)
            }
        }),
        tail: Tail::Vanishing,
    })
}

/// Closed interval outside which the padded response vanishes.
pub fn pad_support(band: (f64, f64), transition: f64) -> Result<(f64, f64)> {
    Ok(pad_window(band, transition)?.support())
}

fn pad_window(band: (f64, f64), transition: f64) -> Result<AngleWindow> {
    let (a, b) = band;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("band [{a}, {b}] is empty")));
    }
    if !(transition > 0.0 && transition < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "transition share must lie in (0, 1), got {transition}"
        )));
    }
    Ok(AngleWindow::new(a, b, transition))
}

/// Compactly supported extension of a polynomial given on `band`.
pub fn pad_polynomial(poly: &[Cx], band: (f64, f64), transition: f64) -> Result<ScalarResponse> {
    let coeffs = poly.to_vec();
    pad_response(
        move |l| super::horner(&coeffs, Cx::real(l)),
        band,
        transition,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(k: u32) -> ScalarResponse {
        ScalarResponse::continuous_at_infinity(move |l| Cx::cayley(l).powi(k)).unwrap()
    }

    #[test]
    fn seminorm_examples() {
        let s = |c: &[f64]| {
            cayley_seminorm(
                &FilterSpec::cayley(c.iter().map(|&x| Cx::real(x)).collect(), false).unwrap(),
            )
            .unwrap()
            .value()
        };
        assert_eq!(s(&[7.0, 1.0, 0.5]), 2.0);
        assert_eq!(s(&[0.0]), 0.0);
        assert_eq!(s(&[0.0, 0.0, 0.0, 2.0]), 6.0);
        let poly = FilterSpec::polynomial_real(&[1.0]).unwrap();
        assert!(matches!(
            cayley_seminorm(&poly),
            Err(Error::WrongVariant { .. })
        ));
    }

    #[test]
    fn recovers_planted_powers() {
        for k in 0..=4u32 {
            let spec = cayley_project(&planted(k), 8, 64).unwrap();
            let FilterSpec::Cayley { coeffs, real_part } = spec else {
                unreachable!()
            };
            assert!(!real_part);
            for (l, c) in coeffs.iter().enumerate() {
                let want = if l == k as usize { Cx::ONE } else { Cx::ZERO };
                assert!((*c - want).abs() <= 1e-6, "k={k} l={l} c={c}");
            }
        }
    }

    #[test]
    fn zero_response_projects_to_zero() {
        let g = ScalarResponse::decaying(|_| Cx::ZERO).unwrap();
        let FilterSpec::Cayley { coeffs, .. } = cayley_project(&g, 5, 64).unwrap() else {
            unreachable!()
        };
        assert!(coeffs.iter().all(|c| *c == Cx::ZERO));
    }

    #[test]
    fn real_part_of_cayley_against_fine_quadrature() {
        // Re C(λ) = (z + 1/z) / 2: c_1 = 1/2, all other l >= 0 vanish
        let g = ScalarResponse::continuous_at_infinity(|l| Cx::real((l * l - 1.0) / (l * l + 1.0)))
            .unwrap();
        let FilterSpec::Cayley { coeffs, .. } = cayley_project(&g, 6, 4096).unwrap() else {
            unreachable!()
        };
        let oracle = circle_coefficients(&g, 0..=6, 1 << 16);
        assert!((coeffs[1] - Cx::real(0.5)).abs() < 1e-12);
        for (c, o) in coeffs.iter().zip(&oracle) {
            assert!((*c - *o).abs() < 1e-12);
        }
        for c in &coeffs[2..] {
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn projection_preconditions() {
        let g = ScalarResponse::undeclared(Cx::real);
        assert!(matches!(
            cayley_project(&g, 2, 64),
            Err(Error::DecayFlagMissing)
        ));
        assert!(matches!(
            cayley_project(&planted(1), 10, 79),
            Err(Error::QuadratureUnderResolved { .. })
        ));
        assert!(cayley_project(&planted(1), 10, 80).is_ok());
        assert!(ScalarResponse::decaying(|_| Cx::ONE).is_err());
        assert!(ScalarResponse::continuous_at_infinity(|l| Cx::real(l.signum())).is_err());
    }

    #[test]
    fn real_projection_reproduces_real_response() {
        let g = ScalarResponse::continuous_at_infinity(|l| Cx::real(1.0 / (1.0 + l * l))).unwrap();
        let spec = cayley_project_real(&g, 16, 1024).unwrap();
        for &l in &[-5.0, -1.0, 0.0, 0.3, 2.0, 40.0] {
            let v = evaluate_scalar(&spec, l).unwrap();
            assert!((v.re - 1.0 / (1.0 + l * l)).abs() < 1e-10, "λ={l}");
        }
        let complex = ScalarResponse::continuous_at_infinity(Cx::cayley).unwrap();
        assert!(cayley_project_real(&complex, 4, 64).is_err());
    }

    #[test]
    fn pad_examples() {
        let p = [Cx::real(0.3), Cx::real(-1.0), Cx::real(0.5)];
        let g = pad_polynomial(&p, (-1.0, 1.0), 0.5).unwrap();
        assert_eq!(g.eval(0.0), Cx::real(0.3));
        assert_eq!(g.eval(0.7), super::super::horner(&p, Cx::real(0.7)));
        assert_eq!(g.eval(1.0), super::super::horner(&p, Cx::real(1.0)));
        let (lo, hi) = pad_support((-1.0, 1.0), 0.5).unwrap();
        // half of the arc (3π/2, 2π) ends at θ = 7π/4, i.e. λ = cot(π/8)
        assert!((hi - 1.0 / (PI / 8.0).tan()).abs() < 1e-12);
        assert!((lo + 1.0 / (PI / 8.0).tan()).abs() < 1e-12);
        assert_eq!(g.eval(hi + 1e-9), Cx::ZERO);
        assert_eq!(g.eval(lo - 1e-9), Cx::ZERO);
        assert_eq!(g.eval(1e6), Cx::ZERO);
        assert!(g.eval(hi - 0.1).abs() > 0.0);
        // the window lies in [0, 1], so the pad never exceeds |p| pointwise
        for k in 0..=100 {
            let x = 1.0 + (hi - 1.0) * k as f64 / 100.0;
            assert!(g.eval(x).abs() <= super::super::horner(&p, Cx::real(x)).abs());
        }
        assert!(pad_polynomial(&p, (1.0, 1.0), 0.5).is_err());
        assert!(pad_polynomial(&p, (0.0, 1.0), 0.0).is_err());
        assert!(pad_polynomial(&p, (0.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn pad_is_continuous_on_dense_grid() {
        // independent of the window formula: adjacent samples of a smooth
        // function differ by about |g'| h, so second differences stay tiny
        let p = [Cx::real(1.0), Cx::real(-2.0), Cx::real(0.0), Cx::real(0.7)];
        let g = pad_polynomial(&p, (-1.0, 1.0), 0.8).unwrap();
        let (lo, hi) = pad_support((-1.0, 1.0), 0.8).unwrap();
        let h = 1e-4;
        let steps = ((hi - lo + 2.0) / h) as usize;
        let xs: Vec<f64> = (0..=steps).map(|k| lo - 1.0 + k as f64 * h).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| g.eval(x).re).collect();
        let max_jump = vals
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        let max_second = vals
            .windows(3)
            .map(|w| (w[2] - 2.0 * w[1] + w[0]).abs())
            .fold(0.0, f64::max);
        assert!(max_jump < 1e-2, "jump {max_jump}");
        assert!(max_second < 1e-5, "kink {max_second}");
    }

    #[test]
    fn chebnet_pad_has_small_tail() {
        let p = [Cx::real(0.5), Cx::real(-0.4), Cx::real(0.2), Cx::real(0.1)];
        let g = pad_polynomial(&p, (-1.0, 1.0), DEFAULT_PAD_TRANSITION).unwrap();
        let est = projected_seminorm(&g, 64, 8192).unwrap();
        let fine = projected_seminorm(&g, 1024, 16384).unwrap();
        assert!(est.tail.is_finite());
        // the extrapolated total brackets the well-resolved value
        assert!(
            est.total() >= fine.truncated * (1.0 - 1e-3),
            "{est:?} vs {fine:?}"
        );
        assert!(est.tail_ratio() < 0.01, "{est:?}");
    }

    #[test]
    fn seminorm_estimate_of_finite_expansion_has_no_tail() {
        let g = ScalarResponse::continuous_at_infinity(|l| {
            let z = Cx::cayley(l);
            z * Cx::real(0.5) + z.powi(3) * Cx::new(0.0, 0.25)
        })
        .unwrap();
        let est = projected_seminorm(&g, 32, 512).unwrap();
        assert!((est.truncated - (0.5 + 3.0 * 0.25)).abs() < 1e-12);
        assert!(est.tail < 1e-10);
    }
}
