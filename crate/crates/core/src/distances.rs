// SPDX-License-Identifier: Apache-2.0

//! Direct evolution of a chain and distances to stationarity.
//!
//! This layer does not use the spectrum: `μ^k = δ_x K^k` is obtained by
//! repeated tridiagonal products and the continuous-time law
//! `γ^t = Σ_k e^{-t} t^k/k! μ^k` by uniformization at rate one. It is the
//! brute-force reference that the spectral formulas are checked against.

use serde::{Deserialize, Serialize};

use crate::chain::{BirthDeathChain, StationaryDistribution};
use crate::error::{Error, Result};
use crate::hitting::{ContinuousTail, TimeMode, POISSON_TAIL};
use crate::util::{compensated_sum, PoissonWindow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionAtTime {
    pub probs: Vec<f64>,
    pub time: f64,
    pub mode: TimeMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// `sep` from the hitting-time law of the spectrum.
    Spectral,
    /// `sep` from the evolved distribution.
    Direct,
}

/// Separation, total variation and L² distance at one time.
///
/// `method` records how `sep` was obtained; `tv` and `l2` always come from
/// direct evolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub time: f64,
    pub sep: f64,
    pub tv: f64,
    pub l2: f64,
    pub method: Method,
}

fn point_mass(chain: &BirthDeathChain, start: usize) -> Result<Vec<f64>> {
    if start > chain.m() {
        return Err(Error::InvalidArgument(format!(
            "start state {start} is outside 0..={}",
            chain.m()
        )));
    }
    let mut mu = vec![0.0; chain.num_states()];
    mu[start] = 1.0;
    Ok(mu)
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

/// `δ_0 K^k`.
pub fn evolve_discrete(chain: &BirthDeathChain, k: u64) -> DistributionAtTime {
    evolve_discrete_from(chain, 0, k).expect("state 0 always exists")
}

pub fn evolve_discrete_from(
    chain: &BirthDeathChain,
    start: usize,
    k: u64,
) -> Result<DistributionAtTime> {
    Ok(evolve_discrete_grid(chain, start, &[k])?.remove(0))
}

/// `δ_start K^k` for every requested `k`, in one pass up to the largest.
pub fn evolve_discrete_grid(
    chain: &BirthDeathChain,
    start: usize,
    steps: &[u64],
) -> Result<Vec<DistributionAtTime>> {
    let mut mu = point_mass(chain, start)?;
    let mut next = vec![0.0; mu.len()];
    let mut order: Vec<usize> = (0..steps.len()).collect();
    order.sort_by_key(|&i| steps[i]);
    let mut out = vec![None; steps.len()];
    let mut k = 0u64;
    for i in order {
        while k < steps[i] {
            chain.step(&mu, &mut next);
            std::mem::swap(&mut mu, &mut next);
            k += 1;
        }
        out[i] = Some(DistributionAtTime {
            probs: mu.clone(),
            time: steps[i] as f64,
            mode: TimeMode::Discrete,
        });
    }
    Ok(out.into_iter().map(|d| d.expect("every step visited")).collect())
}

/// `γ^t` started at 0.
pub fn evolve_continuous(chain: &BirthDeathChain, t: f64) -> Result<DistributionAtTime> {
    evolve_continuous_from(chain, 0, t)
}

pub fn evolve_continuous_from(
    chain: &BirthDeathChain,
    start: usize,
    t: f64,
) -> Result<DistributionAtTime> {
    Ok(evolve_continuous_grid(chain, start, &[t])?.remove(0))
}

/// `γ^t` for every requested `t`, sharing one sequence of powers `μ^k`.
///
/// Poisson weights outside a window of total mass below `1e-12` are dropped
/// and the kept weights renormalized.
pub fn evolve_continuous_grid(
    chain: &BirthDeathChain,
    start: usize,
    times: &[f64],
) -> Result<Vec<DistributionAtTime>> {
    for &t in times {
        check_time(t)?;
    }
    let n = chain.num_states();
    let windows: Vec<PoissonWindow> = times
        .iter()
        .map(|&t| PoissonWindow::new(t, POISSON_TAIL))
        .collect();
    let horizon = windows.iter().map(PoissonWindow::end).max().unwrap_or(0);
    let mut acc = vec![vec![0.0; n]; times.len()];
    let mut mu = point_mass(chain, start)?;
    let mut next = vec![0.0; n];
    for k in 0..horizon {
        for (w, a) in windows.iter().zip(acc.iter_mut()) {
            if k >= w.start && k < w.end() {
                let weight = w.weights[k - w.start];
                for (ax, mx) in a.iter_mut().zip(&mu) {
                    *ax += weight * mx;
                }
            }
        }
        if k + 1 < horizon {
            chain.step(&mu, &mut next);
            std::mem::swap(&mut mu, &mut next);
        }
    }
    Ok(acc
        .into_iter()
        .zip(times)
        .map(|(probs, &time)| DistributionAtTime {
            probs,
            time,
            mode: TimeMode::Continuous,
        })
        .collect())
}

fn check_support(dist: &DistributionAtTime, nu: &StationaryDistribution) {
    assert_eq!(
        dist.probs.len(),
        nu.len(),
        "distribution and stationary law have different supports"
    );
}

/// `max_x (1 - dist(x)/ν(x))`, clamped to `[0, 1]`.
pub fn separation_direct(dist: &DistributionAtTime, nu: &StationaryDistribution) -> f64 {
    check_support(dist, nu);
    dist.probs
        .iter()
        .zip(nu.nu())
        .map(|(d, v)| 1.0 - d / v)
        .fold(0.0f64, f64::max)
        .clamp(0.0, 1.0)
}

/// `(1/2) Σ |dist - ν|`.
pub fn total_variation(dist: &DistributionAtTime, nu: &StationaryDistribution) -> f64 {
    check_support(dist, nu);
    0.5 * compensated_sum(dist.probs.iter().zip(nu.nu()).map(|(d, v)| (d - v).abs()))
}

/// `(Σ (dist/ν - 1)² ν)^{1/2}`.
pub fn l2_distance(dist: &DistributionAtTime, nu: &StationaryDistribution) -> f64 {
    check_support(dist, nu);
    compensated_sum(
        dist.probs
            .iter()
            .zip(nu.nu())
            .map(|(d, v)| (d - v) * (d - v) / v),
    )
    .sqrt()
}

/// Distances from state 0 at each time, all three computed directly.
pub fn compare_distances(
    chain: &BirthDeathChain,
    times: &[f64],
    mode: TimeMode,
) -> Result<Vec<DistanceReport>> {
    let nu = chain.stationary()?;
    let dists = match mode {
        TimeMode::Continuous => evolve_continuous_grid(chain, 0, times)?,
        TimeMode::Discrete => {
            let steps = times
                .iter()
                .map(|&t| {
                    check_time(t)?;
                    if t.fract() != 0.0 {
                        return Err(Error::InvalidArgument(format!(
                            "discrete time must be a whole number of steps, got {t}"
                        )));
                    }
                    Ok(t as u64)
                })
                .collect::<Result<Vec<_>>>()?;
            evolve_discrete_grid(chain, 0, &steps)?
        }
    };
    Ok(dists
        .iter()
        .map(|d| DistanceReport {
            time: d.time,
            sep: separation_direct(d, &nu),
            tv: total_variation(d, &nu),
            l2: l2_distance(d, &nu),
            method: Method::Direct,
        })
        .collect())
}

/// As [`compare_distances`], with `sep` replaced by the spectral value.
pub fn compare_distances_spectral(
    chain: &BirthDeathChain,
    times: &[f64],
    mode: TimeMode,
) -> Result<Vec<DistanceReport>> {
    let mut reports = compare_distances(chain, times, mode)?;
    let spectrum = chain.spectrum()?;
    let seps = match mode {
        TimeMode::Continuous => ContinuousTail::new(spectrum).sep_many(times)?,
        TimeMode::Discrete => {
            let steps: Vec<u64> = times.iter().map(|&t| t as u64).collect();
            crate::hitting::sep_discrete_curve(spectrum, &steps)?
        }
    };
    for (r, s) in reports.iter_mut().zip(seps) {
        r.sep = s;
        r.method = Method::Spectral;
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lazy_two_state() -> BirthDeathChain {
        BirthDeathChain::new(vec![0.5], vec![0.5], vec![0.5, 0.5]).unwrap()
    }

    fn uniform(n: usize) -> StationaryDistribution {
        let mut r = vec![0.0; n];
        r[0] = 0.5;
        r[n - 1] = 0.5;
        BirthDeathChain::new(vec![0.5; n - 1], vec![0.5; n - 1], r)
            .unwrap()
            .stationary()
            .unwrap()
    }

    #[test]
    fn discrete_basics() {
        let c = lazy_two_state();
        assert_eq!(evolve_discrete(&c, 0).probs, vec![1.0, 0.0]);
        assert_eq!(evolve_discrete(&c, 1).probs, vec![0.5, 0.5]);
    }

    #[test]
    fn continuous_two_state_closed_form() {
        let c = lazy_two_state();
        assert_eq!(evolve_continuous(&c, 0.0).unwrap().probs, vec![1.0, 0.0]);
        for t in [0.1, 1.0, 3.7] {
            let d = evolve_continuous(&c, t).unwrap();
            assert!((d.probs[0] - 0.5 * (1.0 + (-t).exp())).abs() < 1e-13);
        }
    }

    #[test]
    fn distances_of_point_mass() {
        let nu = uniform(2);
        let delta = DistributionAtTime {
            probs: vec![1.0, 0.0],
            time: 0.0,
            mode: TimeMode::Discrete,
        };
        assert_eq!(separation_direct(&delta, &nu), 1.0);
        assert!((total_variation(&delta, &nu) - 0.5).abs() < 1e-15);
        let nu4 = uniform(4);
        let delta4 = DistributionAtTime {
            probs: vec![1.0, 0.0, 0.0, 0.0],
            time: 0.0,
            mode: TimeMode::Discrete,
        };
        assert!((l2_distance(&delta4, &nu4) - 3.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn stationary_input_is_at_distance_zero() {
        let nu = uniform(3);
        let d = DistributionAtTime {
            probs: nu.nu().to_vec(),
            time: 0.0,
            mode: TimeMode::Continuous,
        };
        assert_eq!(separation_direct(&d, &nu), 0.0);
        assert!(total_variation(&d, &nu) < 1e-16);
        assert!(l2_distance(&d, &nu) < 1e-8);
    }

    #[test]
    fn grid_matches_single_evaluations() {
        let c = BirthDeathChain::new(vec![0.3, 0.6], vec![0.2, 0.5], vec![0.7, 0.2, 0.5]).unwrap();
        let times = [4.0, 0.0, 1.5];
        let grid = evolve_continuous_grid(&c, 0, &times).unwrap();
        for (g, &t) in grid.iter().zip(&times) {
            assert_eq!(g.probs, evolve_continuous(&c, t).unwrap().probs);
        }
        let steps = [7, 2, 0];
        let grid = evolve_discrete_grid(&c, 2, &steps).unwrap();
        for (g, &k) in grid.iter().zip(&steps) {
            assert_eq!(g.probs, evolve_discrete_from(&c, 2, k).unwrap().probs);
        }
    }

    #[test]
    fn rejects_bad_start_and_time() {
        let c = lazy_two_state();
        assert!(evolve_discrete_from(&c, 2, 1).is_err());
        assert_eq!(
            evolve_continuous(&c, -0.5).unwrap_err(),
            Error::NegativeTime(-0.5)
        );
    }

    #[test]
    fn bernoulli_laplace_tv_below_sep() {
        let c = crate::FamilySpec::BernoulliLaplace { n: 4, r: 2 }.build().unwrap();
        let r = compare_distances(&c, &[3.0], TimeMode::Continuous).unwrap();
        assert!(r[0].tv <= r[0].sep);
    }
}
