// SPDX-License-Identifier: Apache-2.0

//! Cut-off statistics, tail bounds, mixing times, family scans and shapes.
//!
//! A sequence of chains started at an end point has a separation cut-off
//! exactly when `N = λ_1 · E(T)` diverges. Finite scans cannot test
//! divergence, so [`scan_family`] reports the raw `N` sequence together with a
//! heuristic verdict whose thresholds are configurable.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::hitting::{moments, theta, ContinuousTail, TimeMode};
use crate::spectral::Spectrum;
use crate::util::{gumbel_upper_tail, normal_upper_tail, ols_slope};

/// Relative width at which mixing-time bisection stops.
pub const MIXING_REL_TOL: f64 = 1e-9;

/// Largest `|c|` accepted by [`shape_profile`].
pub const MAX_PROFILE_C: f64 = 6.0;

/// Euler–Mascheroni constant, the mean of the standard Gumbel law.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Highest `k` of the `θ_k` diagnostics reported by a scan.
pub const MAX_THETA_ORDER: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffStats {
    /// `λ = λ_1`.
    pub gap: f64,
    /// `t = Σ 1/λ_i`.
    pub mean_hit: f64,
    /// `σ = (Σ 1/λ_i²)^{1/2}`.
    pub window: f64,
    /// `N = λ t`.
    #[serde(rename = "N")]
    pub product: f64,
    /// `θ_2 = (λσ)²`.
    pub theta2: f64,
}

pub fn cutoff_stats(spectrum: &Spectrum) -> CutoffStats {
    let m = moments(spectrum, TimeMode::Continuous);
    let gap = spectrum.gap();
    CutoffStats {
        gap,
        mean_hit: m.mean,
        window: m.variance.sqrt(),
        product: gap * m.mean,
        theta2: theta(spectrum, 2).expect("k = 2 is valid"),
    }
}

/// `upper` bounds `sep((1+c)t)` from above; `lower` bounds `sep((1-c)t)` from below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub upper: f64,
    pub lower: f64,
}

fn check_c(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("c must be positive, got {c}")))
    }
}

/// Chebyshev bounds `1/(1 + c²N)`.
pub fn chebyshev_bounds(stats: &CutoffStats, c: f64) -> Result<BoundPair> {
    check_c(c)?;
    let upper = 1.0 / (1.0 + c * c * stats.product);
    Ok(BoundPair {
        upper,
        lower: 1.0 - upper,
    })
}

/// Exponential bounds `exp(-(c√N - 1/2)/2)`, clamped to 1.
///
/// Since `σ ≤ t/√N`, a shift of `ct` is at least `c√N` windows, and the
/// centred log-MGF of `T` at `1/(2σ)` is at most `1/4`; Markov's inequality
/// then gives the stated tail in both directions.
pub fn exponential_bounds(stats: &CutoffStats, c: f64) -> Result<BoundPair> {
    check_c(c)?;
    Ok(exponential_pair(c * stats.product.sqrt()))
}

/// Exponential bounds in the form `exp(-(cN - 1/2)/2)`, clamped to 1.
///
/// This variant uses `N` where [`exponential_bounds`] uses `√N`. It is
/// stronger than the hypoexponential tail allows once `N` is large (for
/// example on the biased walk with `p = 0.9`, `n = 50`), and is kept only so
/// the two forms can be compared against exact separation.
pub fn exponential_bounds_as_printed(stats: &CutoffStats, c: f64) -> Result<BoundPair> {
    check_c(c)?;
    Ok(exponential_pair(c * stats.product))
}

fn exponential_pair(scaled: f64) -> BoundPair {
    let upper = (-(scaled - 0.5) / 2.0).exp().min(1.0);
    BoundPair {
        upper,
        lower: 1.0 - upper,
    }
}

/// Interval `[t - (1/ε - 1)^{-1/2} σ, t + (1/ε - 1)^{1/2} σ]` containing `τ(ε)`.
pub fn mixing_bracket(stats: &CutoffStats, eps: f64) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let k = (1.0 / eps - 1.0).sqrt();
    Ok((
        stats.mean_hit - stats.window / k,
        stats.mean_hit + k * stats.window,
    ))
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")))
    }
}

/// Continuous-time separation mixing time `inf{t : sep(t) <= ε}`.
pub fn mixing_time(spectrum: &Spectrum, eps: f64) -> Result<f64> {
    let mut tail = ContinuousTail::new(spectrum);
    mixing_time_with(&mut tail, &cutoff_stats(spectrum), eps)
}

/// [`mixing_time`] reusing an existing tail evaluator.
pub fn mixing_time_with(tail: &mut ContinuousTail, stats: &CutoffStats, eps: f64) -> Result<f64> {
    let (lo_guess, hi_guess) = mixing_bracket(stats, eps)?;
    let mut lo = lo_guess.max(0.0);
    if tail.sep(lo)? <= eps {
        lo = 0.0;
    }
    let mut hi = hi_guess.max(lo);
    let mut grown = 0;
    while tail.sep(hi)? > eps {
        hi += (hi - lo).max(stats.window);
        grown += 1;
        if grown > 64 {
            return Err(Error::InvalidSpectrum(format!(
                "separation stays above {eps} up to t = {hi}"
            )));
        }
    }
    while hi - lo > MIXING_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tail.sep(mid)? > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Decision thresholds for [`scan_family`].
///
/// `N` must be strictly increasing over the last half of the scan and its
/// least-squares slope against the log of the size parameter must reach
/// `growth_slope` for a cut-off verdict. A scan whose `N` varies by less than
/// the factor `bounded_ratio` is reported as having no cut-off. The shape is
/// Gaussian when the slope of `ln(λσ)` against the log size reaches
/// `gaussian_slope`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanThresholds {
    pub growth_slope: f64,
    pub bounded_ratio: f64,
    pub gaussian_slope: f64,
}

impl Default for ScanThresholds {
    fn default() -> Self {
        Self {
            growth_slope: 0.5,
            bounded_ratio: 2.0,
            gaussian_slope: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Cutoff,
    NoCutoff,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeClass {
    #[serde(rename = "gaussian")]
    Gaussian,
    #[serde(rename = "non-gaussian")]
    NonGaussian,
    #[serde(rename = "n/a")]
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub param: f64,
    pub m: usize,
    pub label: String,
    #[serde(flatten)]
    pub stats: CutoffStats,
    /// `θ_k` for `k = 2..=8`.
    pub thetas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanVerdict {
    pub points: Vec<ScanPoint>,
    /// `N` at each point.
    pub trend: Vec<f64>,
    pub verdict: Verdict,
    pub shape: ShapeClass,
    pub thresholds: ScanThresholds,
    /// Slope of `N` against `ln(param)`.
    pub growth_slope: f64,
    /// Slope of `ln(λσ)` against `ln(param)`.
    pub shape_slope: f64,
    pub note: String,
}

const SCAN_NOTE: &str = "pre-cut-off and cut-off are equivalent for these chains, \
so the verdict covers both; thresholds are finite-scan heuristics and the raw \
N sequence is reported for inspection";

/// Statistics at one family instance.
pub fn scan_point(spec: &FamilySpec) -> Result<ScanPoint> {
    let chain = spec.build()?;
    let spectrum = chain.spectrum()?;
    let thetas = (2..=MAX_THETA_ORDER)
        .map(|k| theta(spectrum, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanPoint {
        param: spec.size() as f64,
        m: chain.m(),
        label: spec.label(),
        stats: cutoff_stats(spectrum),
        thetas,
    })
}

/// Computes statistics along a family sequence and renders a verdict.
///
/// Points are evaluated in parallel on the current rayon pool; results keep
/// input order.
pub fn scan_family(points: &[FamilySpec], thresholds: &ScanThresholds) -> Result<ScanVerdict> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if points.windows(2).any(|w| w[1].size() <= w[0].size()) {
        return Err(Error::InvalidArgument(
            "scan points must have strictly increasing size".into(),
        ));
    }
    let evaluated = points
        .par_iter()
        .map(scan_point)
        .collect::<Result<Vec<_>>>()?;
    Ok(classify(evaluated, thresholds))
}

/// Verdict and shape for already evaluated points.
pub fn classify(points: Vec<ScanPoint>, thresholds: &ScanThresholds) -> ScanVerdict {
    let trend: Vec<f64> = points.iter().map(|p| p.stats.product).collect();
    let log_param: Vec<f64> = points.iter().map(|p| p.param.ln()).collect();
    let growth_slope = ols_slope(&log_param, &trend);
    let log_width: Vec<f64> = points.iter().map(|p| 0.5 * p.stats.theta2.ln()).collect();
    let shape_slope = ols_slope(&log_param, &log_width);

    let half = trend.len() / 2;
    let increasing = (half.max(1)..trend.len()).all(|i| trend[i] > trend[i - 1]);
    let max = trend.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = trend.iter().copied().fold(f64::INFINITY, f64::min);

    let verdict = if increasing && growth_slope >= thresholds.growth_slope {
        Verdict::Cutoff
    } else if max / min < thresholds.bounded_ratio {
        Verdict::NoCutoff
    } else {
        Verdict::Inconclusive
    };
    let shape = match verdict {
        Verdict::Cutoff if shape_slope >= thresholds.gaussian_slope => ShapeClass::Gaussian,
        Verdict::Cutoff => ShapeClass::NonGaussian,
        _ => ShapeClass::NotApplicable,
    };
    ScanVerdict {
        points,
        trend,
        verdict,
        shape,
        thresholds: *thresholds,
        growth_slope,
        shape_slope,
        note: SCAN_NOTE.to_string(),
    }
}

/// Exact separation around the cut-off time against the limit shapes.
///
/// The Gaussian comparison evaluates `sep(t + cσ)` against `1 - Φ(c)`. The
/// Gumbel comparison uses the scale `ξ = 1/λ_1` and two centerings: `s = t -
/// γξ`, which matches the mean of `T` to the mean of a Gumbel law, and `s =
/// ξ ln m`, the coupon-collector normalization. Both are reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeProfile {
    pub grid: Vec<f64>,
    pub mean_hit: f64,
    pub window: f64,
    /// `sep(t + cσ)`.
    pub sep_values: Vec<f64>,
    pub reference_gaussian: Vec<f64>,
    pub sup_deviation_gaussian: f64,
    pub gumbel_scale: f64,
    pub gumbel_center: f64,
    /// `sep(gumbel_center + cξ)`.
    pub gumbel_sep_values: Vec<f64>,
    pub reference_gumbel: Vec<f64>,
    pub sup_deviation_gumbel: f64,
    pub log_center: f64,
    /// `sep(log_center + cξ)`.
    pub log_centered_sep_values: Vec<f64>,
    pub sup_deviation_gumbel_log_centered: f64,
}

fn sup_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn shape_profile(spectrum: &Spectrum, grid: &[f64]) -> Result<ShapeProfile> {
    if let Some(&c) = grid.iter().find(|c| c.is_nan() || c.abs() > MAX_PROFILE_C) {
        return Err(Error::InvalidArgument(format!(
            "profile grid values must satisfy |c| <= {MAX_PROFILE_C}, got {c}"
        )));
    }
    let stats = cutoff_stats(spectrum);
    let xi = 1.0 / stats.gap;
    let gumbel_center = stats.mean_hit - EULER_GAMMA * xi;
    let log_center = xi * (spectrum.len() as f64).ln();
    let at = |center: f64, scale: f64| -> Vec<f64> {
        grid.iter().map(|c| (center + c * scale).max(0.0)).collect()
    };

    let gauss_times = at(stats.mean_hit, stats.window);
    let gumbel_times = at(gumbel_center, xi);
    let log_times = at(log_center, xi);
    let mut all = Vec::with_capacity(3 * grid.len());
    all.extend_from_slice(&gauss_times);
    all.extend_from_slice(&gumbel_times);
    all.extend_from_slice(&log_times);
    let seps = ContinuousTail::new(spectrum).sep_many(&all)?;
    let n = grid.len();
    let sep_values = seps[..n].to_vec();
    let gumbel_sep_values = seps[n..2 * n].to_vec();
    let log_centered_sep_values = seps[2 * n..].to_vec();

    let reference_gaussian: Vec<f64> = grid.iter().map(|&c| normal_upper_tail(c)).collect();
    let reference_gumbel: Vec<f64> = grid.iter().map(|&c| gumbel_upper_tail(c)).collect();
    Ok(ShapeProfile {
        grid: grid.to_vec(),
        mean_hit: stats.mean_hit,
        window: stats.window,
        sup_deviation_gaussian: sup_deviation(&sep_values, &reference_gaussian),
        sup_deviation_gumbel: sup_deviation(&gumbel_sep_values, &reference_gumbel),
        sup_deviation_gumbel_log_centered: sup_deviation(&log_centered_sep_values, &reference_gumbel),
        sep_values,
        reference_gaussian,
        gumbel_scale: xi,
        gumbel_center,
        gumbel_sep_values,
        reference_gumbel,
        log_center,
        log_centered_sep_values,
    })
}

/// Evenly spaced grid of `count` points on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}
