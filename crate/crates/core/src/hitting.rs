// SPDX-License-Identifier: Apache-2.0

//! Law of the strong stationary time `T = S_1 + ... + S_m`.
//!
//! Started from `0`, the separation of a birth-and-death chain from its
//! stationary law equals `P(T > t)`, where the phases `S_i` are independent:
//! exponential with rate `λ_i` in continuous time, and with probability
//! generating function `λ_i z / (1 - (1 - λ_i) z)` in discrete time.

use astro_float::{BigFloat, Consts, RoundingMode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Spectrum;
use crate::util::{compensated_sum, PoissonWindow};

/// Poisson mass allowed outside the uniformization window.
pub const POISSON_TAIL: f64 = 1e-12;

/// Survival probabilities below this are treated as zero.
const SURVIVAL_FLOOR: f64 = 1e-18;

/// Default phase cap for [`lagrange_tail`].
pub const LAGRANGE_CAP: usize = 60;

/// Working precision (bits) of the explicit spectral sum.
const LAGRANGE_PRECISION: usize = 192;

/// Largest admissible error estimate of the explicit spectral sum.
const LAGRANGE_TOLERANCE: f64 = 1e-8;

/// Phases with `|1 - λ| <= this` are treated as deterministic one-step phases.
const THETA_ZERO: f64 = 1e-12;

/// A signed intermediate may dip below zero by this much before the law is
/// declared not to be a probability distribution.
/// Eigenvalue-level slack when matching `θ_+` against `|θ_-|`.
const PAIR_SLACK: f64 = 1e-12;
const SIGNED_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMode {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance of `T`.
///
/// In discrete mode the variance is `Σ (1 - λ_i) / λ_i²`, whose terms are
/// negative for `λ_i > 1`.
pub fn moments(spectrum: &Spectrum, mode: TimeMode) -> Moments {
    let mean = compensated_sum(spectrum.iter().map(|l| 1.0 / l));
    let variance = match mode {
        TimeMode::Continuous => compensated_sum(spectrum.iter().map(|l| 1.0 / (l * l))),
        TimeMode::Discrete => compensated_sum(spectrum.iter().map(|l| (1.0 - l) / (l * l))),
    };
    Moments { mean, variance }
}

/// The hitting-time law attached to a spectrum and a time mode.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingTimeLaw {
    spectrum: Spectrum,
    mode: TimeMode,
}

impl HittingTimeLaw {
    pub fn new(spectrum: Spectrum, mode: TimeMode) -> Self {
        Self { spectrum, mode }
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn mode(&self) -> TimeMode {
        self.mode
    }

    pub fn moments(&self) -> Moments {
        moments(&self.spectrum, self.mode)
    }

    /// `P(T > time)`; discrete mode requires an integer time.
    pub fn tail(&self, time: f64) -> Result<f64> {
        Ok(self.tail_curve(&[time])?[0])
    }

    pub fn tail_curve(&self, times: &[f64]) -> Result<Vec<f64>> {
        match self.mode {
            TimeMode::Continuous => sep_continuous_curve(&self.spectrum, times),
            TimeMode::Discrete => {
                let steps = times
                    .iter()
                    .map(|&t| integer_step(t))
                    .collect::<Result<Vec<_>>>()?;
                sep_discrete_curve(&self.spectrum, &steps)
            }
        }
    }
}

fn integer_step(t: f64) -> Result<u64> {
    check_time(t)?;
    if t.fract() != 0.0 || t > u64::MAX as f64 {
        return Err(Error::InvalidArgument(format!(
            "discrete time must be a whole number of steps, got {t}"
        )));
    }
    Ok(t as u64)
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

/// Continuous-time tail `P(T > t)` by uniformization.
///
/// The phases are run as a pure-birth chain uniformized at rate `Λ = λ_m`;
/// `a_n` is the probability that `n` uniformized steps have not completed all
/// phases, and `P(T > t) = Σ_n Poisson(Λt; n) a_n`. The survival sequence is
/// computed once and grown on demand, so many times share the work.
#[derive(Debug, Clone)]
pub struct ContinuousTail {
    rate: f64,
    advance: Vec<f64>,
    phases: Vec<f64>,
    survival: Vec<f64>,
    exhausted: bool,
}

impl ContinuousTail {
    pub fn new(spectrum: &Spectrum) -> Self {
        let rate = spectrum.max();
        let advance = spectrum.iter().map(|l| (l / rate).min(1.0)).collect();
        let mut phases = vec![0.0; spectrum.len()];
        phases[0] = 1.0;
        Self {
            rate,
            advance,
            phases,
            survival: vec![1.0],
            exhausted: false,
        }
    }

    /// Uniformization rate `Λ`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    fn extend_to(&mut self, len: usize) {
        while !self.exhausted && self.survival.len() < len {
            // Update in place from the last phase down so each entry still
            // sees its predecessor's previous value.
            let m = self.phases.len();
            for i in (1..m).rev() {
                let stay = self.phases[i] * (1.0 - self.advance[i]);
                self.phases[i] = stay + self.phases[i - 1] * self.advance[i - 1];
            }
            self.phases[0] *= 1.0 - self.advance[0];
            let alive = compensated_sum(self.phases.iter().copied());
            self.survival.push(alive);
            if alive < SURVIVAL_FLOOR {
                self.exhausted = true;
            }
        }
    }

    /// Ensures the survival sequence covers every Poisson window up to `t`.
    pub fn prepare(&mut self, t: f64) -> Result<()> {
        check_time(t)?;
        let window = PoissonWindow::new(self.rate * t, POISSON_TAIL);
        self.extend_to(window.end());
        Ok(())
    }

    /// `P(T > t)` for a time already covered by [`Self::prepare`].
    fn eval_prepared(&self, t: f64) -> f64 {
        let window = PoissonWindow::new(self.rate * t, POISSON_TAIL);
        let stored = self.survival.len();
        let terms = window
            .weights
            .iter()
            .enumerate()
            .map(|(j, w)| (window.start + j, w))
            .take_while(|(n, _)| *n < stored)
            .map(|(n, w)| w * self.survival[n]);
        compensated_sum(terms).clamp(0.0, 1.0)
    }

    pub fn sep(&mut self, t: f64) -> Result<f64> {
        self.prepare(t)?;
        Ok(self.eval_prepared(t))
    }

    /// Evaluates many times; the Poisson sums run in parallel.
    pub fn sep_many(&mut self, times: &[f64]) -> Result<Vec<f64>> {
        let mut latest = 0.0f64;
        for &t in times {
            check_time(t)?;
            latest = latest.max(t);
        }
        self.prepare(latest)?;
        let this = &*self;
        Ok(times.par_iter().map(|&t| this.eval_prepared(t)).collect())
    }
}

/// `P(T > t)` in continuous time.
pub fn sep_continuous(spectrum: &Spectrum, t: f64) -> Result<f64> {
    ContinuousTail::new(spectrum).sep(t)
}

pub fn sep_continuous_curve(spectrum: &Spectrum, times: &[f64]) -> Result<Vec<f64>> {
    ContinuousTail::new(spectrum).sep_many(times)
}

/// `P(T > k)` in discrete time.
pub fn sep_discrete(spectrum: &Spectrum, k: u64) -> Result<f64> {
    Ok(sep_discrete_curve(spectrum, &[k])?[0])
}

/// One factor of the generating function of `T`.
#[derive(Debug, Clone, Copy)]
enum Stage {
    /// `λ z / (1 - θ z)`.
    Single { theta: f64, lambda: f64 },
    /// `λ_a λ_b z² / ((1 - a z)(1 + b z))` with `a >= b >= 0`; the product has
    /// nonnegative coefficients even though the second factor alone does not.
    Pair { a: f64, b: f64, weight: f64 },
}

/// Splits the phases into factors that are probability laws where possible.
///
/// Each phase with `θ = 1 - λ < 0` is matched, largest `|θ|` first, with the
/// largest unused phase of positive `θ`; the match must satisfy `θ_+ >= |θ_-|`
/// up to [`PAIR_SLACK`], which covers spectra symmetric about 1 (such as the
/// lazy simple random walk) whose computed eigenvalues tie only to rounding.
/// Returns `None` when some negative phase cannot be matched.
fn pair_stages(spectrum: &Spectrum) -> Option<Vec<Stage>> {
    let mut positive: Vec<(f64, f64)> = Vec::new();
    let mut negative: Vec<(f64, f64)> = Vec::new();
    let mut stages = Vec::new();
    for l in spectrum.iter() {
        let theta = 1.0 - l;
        if theta < -THETA_ZERO {
            negative.push((theta, l));
        } else if theta > THETA_ZERO {
            positive.push((theta, l));
        } else {
            stages.push(Stage::Single {
                theta: 0.0,
                lambda: 1.0,
            });
        }
    }
    positive.sort_by(|x, y| y.0.total_cmp(&x.0));
    negative.sort_by(|x, y| x.0.total_cmp(&y.0));
    if negative.len() > positive.len() {
        return None;
    }
    for (i, &(theta_neg, l_neg)) in negative.iter().enumerate() {
        let (theta_pos, l_pos) = positive[i];
        if theta_pos < -theta_neg - PAIR_SLACK {
            return None;
        }
        stages.push(Stage::Pair {
            a: theta_pos,
            b: -theta_neg,
            weight: l_pos * l_neg,
        });
    }
    for &(theta, lambda) in &positive[negative.len()..] {
        stages.push(Stage::Single { theta, lambda });
    }
    Some(stages)
}

fn apply_stage(stage: Stage, f: &[f64], g: &mut [f64]) {
    match stage {
        Stage::Single { theta, lambda } => {
            g[0] = 0.0;
            for k in 1..f.len() {
                g[k] = theta * g[k - 1] + lambda * f[k - 1];
            }
        }
        Stage::Pair { a, b, weight } => {
            g[0] = 0.0;
            if g.len() > 1 {
                g[1] = 0.0;
            }
            for k in 2..f.len() {
                g[k] = (a - b) * g[k - 1] + a * b * g[k - 2] + weight * f[k - 2];
            }
        }
    }
}

/// `P(T > k)` for each requested `k`.
///
/// The probability mass function of `T` is built up to the largest `k` by
/// passing `δ_0` through one linear recurrence per factor, at cost
/// `O(m · k_max)`. Returns [`Error::SignedHittingLaw`] when the phases do not
/// combine into a probability law (possible only for non-monotone chains).
pub fn sep_discrete_curve(spectrum: &Spectrum, steps: &[u64]) -> Result<Vec<f64>> {
    let horizon = steps.iter().copied().max().unwrap_or(0) as usize;
    let stages = pair_stages(spectrum);
    let signed = stages.is_none();
    let stages = stages.unwrap_or_else(|| {
        spectrum
            .iter()
            .map(|l| Stage::Single {
                theta: 1.0 - l,
                lambda: l,
            })
            .collect()
    });

    let mut f = vec![0.0; horizon + 1];
    f[0] = 1.0;
    let mut g = vec![0.0; horizon + 1];
    for stage in stages {
        apply_stage(stage, &f, &mut g);
        std::mem::swap(&mut f, &mut g);
    }

    // Survival function from the pmf; a probability law must keep it in [0, 1].
    let mut survival = Vec::with_capacity(horizon + 1);
    let mut cdf = 0.0f64;
    let mut comp = 0.0f64;
    for (k, &mass) in f.iter().enumerate() {
        let t = cdf + mass;
        comp += if cdf.abs() >= mass.abs() {
            (cdf - t) + mass
        } else {
            (mass - t) + cdf
        };
        cdf = t;
        let tail = 1.0 - (cdf + comp);
        if signed && (mass < -SIGNED_TOLERANCE || !(-SIGNED_TOLERANCE..=1.0 + SIGNED_TOLERANCE).contains(&tail)) {
            return Err(Error::SignedHittingLaw {
                step: k as u64,
                value: if mass < -SIGNED_TOLERANCE { mass } else { tail },
            });
        }
        survival.push(tail.clamp(0.0, 1.0));
    }
    Ok(steps.iter().map(|&k| survival[k as usize]).collect())
}

/// Explicit spectral sum `Σ_i ∏_{j≠i} λ_j/(λ_j - λ_i) e^{-tλ_i}` for `P(T > t)`.
///
/// Evaluated in 192-bit arithmetic; the sum cancels heavily when eigenvalues
/// cluster, so the result is only returned if the estimated rounding error is
/// below `1e-8`. Used as an independent cross-check of [`sep_continuous`].
pub fn lagrange_tail(spectrum: &Spectrum, t: f64) -> Result<f64> {
    lagrange_tail_capped(spectrum, t, LAGRANGE_CAP)
}

pub fn lagrange_tail_capped(spectrum: &Spectrum, t: f64, cap: usize) -> Result<f64> {
    check_time(t)?;
    let m = spectrum.len();
    if m > cap {
        return Err(Error::TooManyPhases { phases: m, cap });
    }
    if spectrum.min_separation() <= 0.0 {
        return Err(Error::PrecisionLoss {
            estimate: f64::INFINITY,
        });
    }
    let p = LAGRANGE_PRECISION;
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().map_err(|e| Error::InvalidArgument(format!("{e:?}")))?;
    let lambdas: Vec<BigFloat> = spectrum.iter().map(|l| BigFloat::from_f64(l, p)).collect();
    let time = BigFloat::from_f64(t, p);

    let mut total = BigFloat::from_f64(0.0, p);
    let mut magnitude = 0.0f64;
    for (i, li) in lambdas.iter().enumerate() {
        let mut coeff = BigFloat::from_f64(1.0, p);
        for (j, lj) in lambdas.iter().enumerate() {
            if i != j {
                let ratio = lj.div(&lj.sub(li, p, rm), p, rm);
                coeff = coeff.mul(&ratio, p, rm);
            }
        }
        let decay = li.mul(&time, p, rm).neg().exp(p, rm, &mut cc);
        let term = coeff.mul(&decay, p, rm);
        magnitude += to_f64(&term).abs();
        total = total.add(&term, p, rm);
    }
    let estimate = magnitude * m as f64 * (-((p - 4) as f64)).exp2();
    if estimate.is_nan() || estimate > LAGRANGE_TOLERANCE {
        return Err(Error::PrecisionLoss { estimate });
    }
    Ok(to_f64(&total).clamp(0.0, 1.0))
}

fn to_f64(x: &BigFloat) -> f64 {
    // The decimal rendering carries far more digits than f64 needs, so the
    // parse is correctly rounded.
    x.to_string().parse().unwrap_or(f64::NAN)
}

/// `Σ_i (λ_1/λ_i)^k`.
pub fn theta(spectrum: &Spectrum, k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("theta needs k >= 2, got {k}")));
    }
    let gap = spectrum.gap();
    Ok(compensated_sum(
        spectrum.iter().map(|l| (gap / l).powi(k as i32)),
    ))
}

/// `-ln(1 - x) - x`, accurate for small `|x|`.
fn log_excess(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let mut term = x;
        let mut sum = 0.0;
        for k in 2..40 {
            term *= x;
            let next = term / k as f64;
            sum += next;
            if next.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        -(-x).ln_1p() - x
    }
}

/// `F(u) = ln E[exp(u (T - E T) / σ)]` in continuous time.
///
/// Defined for `u < σ λ_1`; returns [`Error::OutsideRadius`] otherwise.
pub fn standardized_log_mgf(spectrum: &Spectrum, u: f64) -> Result<f64> {
    let sigma = moments(spectrum, TimeMode::Continuous).variance.sqrt();
    let radius = sigma * spectrum.gap();
    if !u.is_finite() || u >= radius {
        return Err(Error::OutsideRadius { u, radius });
    }
    Ok(compensated_sum(
        spectrum.iter().map(|l| log_excess(u / (l * sigma))),
    ))
}

/// Upper envelope `Σ_{k>=3} u^k / (k θ_2^{(k-2)/2})` for `F(u) - u²/2`.
///
/// Summed in closed form as `θ_2 (-ln(1 - v) - v - v²/2)` with `v = u/√θ_2`,
/// valid for `0 <= u < √θ_2`.
pub fn log_mgf_envelope(spectrum: &Spectrum, u: f64) -> Result<f64> {
    let theta2 = theta(spectrum, 2)?;
    let radius = theta2.sqrt();
    if !(0.0..radius).contains(&u) {
        return Err(Error::OutsideRadius { u, radius });
    }
    let v = u / radius;
    Ok(theta2 * (log_excess(v) - 0.5 * v * v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(l: &[f64]) -> Spectrum {
        Spectrum::new(l.to_vec()).unwrap()
    }

    #[test]
    fn continuous_single_and_pair() {
        let ln2 = std::f64::consts::LN_2;
        assert!((sep_continuous(&spec(&[1.0]), ln2).unwrap() - 0.5).abs() < 1e-12);
        assert!((sep_continuous(&spec(&[1.0, 2.0]), ln2).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(sep_continuous(&spec(&[0.3, 1.7]), 0.0).unwrap(), 1.0);
    }

    #[test]
    fn continuous_rejects_negative_time() {
        assert_eq!(
            sep_continuous(&spec(&[1.0]), -1.0),
            Err(Error::NegativeTime(-1.0))
        );
    }

    #[test]
    fn continuous_far_tail_is_zero() {
        let v = sep_continuous(&spec(&[1.0, 2.0]), 100.0).unwrap();
        assert!(v < 1e-15);
    }

    #[test]
    fn discrete_geometric() {
        let s = spec(&[0.5]);
        assert_eq!(sep_discrete(&s, 0).unwrap(), 1.0);
        assert!((sep_discrete(&s, 2).unwrap() - 0.25).abs() < 1e-16);
    }

    #[test]
    fn discrete_pair_matches_product_formula() {
        // Phases 0.5 and 1.5: P(T > k) = Σ_i ∏_{j≠i} λ_j/(λ_j-λ_i) (1-λ_i)^k.
        let s = spec(&[0.5, 1.5]);
        let got = sep_discrete_curve(&s, &[0, 1, 2, 3, 4, 10]).unwrap();
        for (k, v) in [0, 1, 2, 3, 4, 10].iter().zip(got) {
            let exact = 1.5 * 0.5f64.powi(*k) - 0.5 * (-0.5f64).powi(*k);
            assert!((v - exact.min(1.0)).abs() < 1e-15, "k={k}: {v} vs {exact}");
        }
    }

    #[test]
    fn discrete_unpaired_negative_phase_is_signed() {
        assert!(matches!(
            sep_discrete(&spec(&[2.0]), 1),
            Err(Error::SignedHittingLaw { .. })
        ));
    }

    #[test]
    fn lagrange_agrees_with_uniformization() {
        let s = spec(&[0.1, 0.35, 0.8, 1.2, 1.9]);
        for t in [0.0, 0.5, 3.0, 12.0, 40.0] {
            let a = lagrange_tail(&s, t).unwrap();
            let b = sep_continuous(&s, t).unwrap();
            assert!((a - b).abs() < 1e-10, "t={t}: {a} vs {b}");
        }
        let ln2 = std::f64::consts::LN_2;
        assert!((lagrange_tail(&spec(&[1.0, 2.0]), ln2).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn lagrange_cap() {
        let s = Spectrum::new((1..=61).map(|i| i as f64 / 61.0).collect()).unwrap();
        assert_eq!(
            lagrange_tail(&s, 1.0),
            Err(Error::TooManyPhases { phases: 61, cap: 60 })
        );
    }

    #[test]
    fn lagrange_duplicates_lose_precision() {
        assert!(matches!(
            lagrange_tail(&spec(&[1.0, 1.0]), 1.0),
            Err(Error::PrecisionLoss { .. })
        ));
    }

    #[test]
    fn moments_examples() {
        let m = moments(&spec(&[1.0, 2.0]), TimeMode::Continuous);
        assert_eq!((m.mean, m.variance), (1.5, 1.25));
        let m = moments(&spec(&[0.5]), TimeMode::Discrete);
        assert_eq!((m.mean, m.variance), (2.0, 2.0));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&spec(&[1.0]), 5).unwrap(), 1.0);
        assert_eq!(theta(&spec(&[1.0, 2.0]), 2).unwrap(), 1.25);
        assert!(theta(&spec(&[1.0]), 1).is_err());
    }

    #[test]
    fn log_mgf_radius_and_origin() {
        let s = spec(&[1.0, 2.0]);
        assert_eq!(standardized_log_mgf(&s, 0.0).unwrap(), 0.0);
        let radius = 1.25f64.sqrt();
        assert!(matches!(
            standardized_log_mgf(&s, radius),
            Err(Error::OutsideRadius { .. })
        ));
        assert!(standardized_log_mgf(&s, 0.3).unwrap() >= 0.045);
    }

    #[test]
    fn log_excess_small_and_large() {
        for x in [1e-9f64, 1e-5, -1e-5] {
            let series = x * x / 2.0 + x * x * x / 3.0 + x.powi(4) / 4.0;
            assert!((log_excess(x) - series).abs() <= 1e-15 * series.abs());
        }
        for x in [0.2f64, 0.9, -3.0] {
            let direct = -(-x).ln_1p() - x;
            assert!((log_excess(x) - direct).abs() <= 1e-14 * direct.abs());
        }
    }

    #[test]
    fn law_wrapper() {
        let law = HittingTimeLaw::new(spec(&[0.5]), TimeMode::Discrete);
        assert!((law.tail(3.0).unwrap() - 0.125).abs() < 1e-16);
        assert!(law.tail(2.5).is_err());
        assert_eq!(law.moments().mean, 2.0);
    }
}
