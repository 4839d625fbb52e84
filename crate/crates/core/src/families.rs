// SPDX-License-Identifier: Apache-2.0

//! Parametric birth-and-death families with published spectra.
//!
//! Serialized as `{"kind": "...", "params": {...}}`.

use serde::{Deserialize, Serialize};

use crate::chain::BirthDeathChain;
use crate::error::{Error, Result};
use crate::spectral::{self, Spectrum};

/// Agreement required between a built chain's spectrum and its closed form
/// before the q-subspace builder hands the chain out.
const CLOSED_FORM_CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Simple random walk on `{0..n}` holding 1/2 at both ends.
    SrwLazyEnds { n: usize },
    /// Walk with `p_j = p`, `q_j = 1 - p`, holding `q` at 0 and `p` at `n`.
    BiasedWalk { p: f64, n: usize },
    /// Metropolis chain with the lazy-ends walk as proposal.
    Metropolis { target: MetropolisTarget },
    /// Number of red balls in the right urn, states `{0..r}`.
    BernoulliLaplace { n: usize, r: usize },
    /// Number of nonzero coordinates of the walk on `{0..n-1}^r`.
    Hamming { n: usize, r: usize },
    /// Projection of the biased hypercube walk, states `{0..r}`.
    ThetaHypercube { theta: f64, r: usize },
    /// Distance process of the walk on `m`-subspaces of `F_q^n`.
    QSubspace { q: u64, n: usize, m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum MetropolisTarget {
    /// Explicit positive weights on `{0..n}`; need not be normalized.
    Weights { weights: Vec<f64> },
    /// `target(j) ∝ (1 + j)^d` on `{0..n}`.
    Power { n: usize, d: f64 },
    /// `target(j) = C(n, j) 2^{-n}`.
    Binomial { n: usize },
    Uniform { n: usize },
}

impl MetropolisTarget {
    pub fn size(&self) -> usize {
        match self {
            Self::Weights { weights } => weights.len().saturating_sub(1),
            Self::Power { n, .. } | Self::Binomial { n } | Self::Uniform { n } => *n,
        }
    }

    pub(crate) fn uniform_size(&self) -> Option<usize> {
        match self {
            Self::Uniform { n } => Some(*n),
            _ => None,
        }
    }

    /// Unnormalized log-weights.
    pub fn log_weights(&self) -> Result<Vec<f64>> {
        match self {
            Self::Weights { weights } => {
                for (index, &value) in weights.iter().enumerate() {
                    if !(value.is_finite() && value > 0.0) {
                        return Err(Error::NonPositiveTarget { index, value });
                    }
                }
                Ok(weights.iter().map(|w| w.ln()).collect())
            }
            Self::Power { n, d } => Ok((0..=*n).map(|j| d * ((1 + j) as f64).ln()).collect()),
            Self::Binomial { n } => {
                let mut out = Vec::with_capacity(n + 1);
                let mut acc = 0.0;
                out.push(0.0);
                for j in 1..=*n {
                    acc += ((n - j + 1) as f64).ln() - (j as f64).ln();
                    out.push(acc);
                }
                Ok(out)
            }
            Self::Uniform { n } => Ok(vec![0.0; n + 1]),
        }
    }
}

impl FamilySpec {
    /// Largest state index `m` of the built chain.
    pub fn size(&self) -> usize {
        match self {
            Self::SrwLazyEnds { n } | Self::BiasedWalk { n, .. } => *n,
            Self::Metropolis { target } => target.size(),
            Self::BernoulliLaplace { r, .. }
            | Self::Hamming { r, .. }
            | Self::ThetaHypercube { r, .. } => *r,
            Self::QSubspace { m, .. } => *m,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::SrwLazyEnds { n } => format!("srw_lazy_ends(n={n})"),
            Self::BiasedWalk { p, n } => format!("biased_walk(p={p}, n={n})"),
            Self::Metropolis { target } => match target {
                MetropolisTarget::Weights { weights } => {
                    format!("metropolis(weights, n={})", weights.len().saturating_sub(1))
                }
                MetropolisTarget::Power { n, d } => format!("metropolis(power d={d}, n={n})"),
                MetropolisTarget::Binomial { n } => format!("metropolis(binomial, n={n})"),
                MetropolisTarget::Uniform { n } => format!("metropolis(uniform, n={n})"),
            },
            Self::BernoulliLaplace { n, r } => format!("bernoulli_laplace(n={n}, r={r})"),
            Self::Hamming { n, r } => format!("hamming(n={n}, r={r})"),
            Self::ThetaHypercube { theta, r } => format!("theta_hypercube(theta={theta}, r={r})"),
            Self::QSubspace { q, n, m } => format!("q_subspace(q={q}, n={n}, m={m})"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        match self {
            Self::SrwLazyEnds { n } if *n < 1 => bad(format!("srw needs n >= 1, got {n}")),
            Self::BiasedWalk { p, n } => {
                if *n < 1 {
                    bad(format!("biased walk needs n >= 1, got {n}"))
                } else if !(*p > 0.5 && *p < 1.0) {
                    bad(format!("biased walk needs 0 < q < p < 1, got p = {p}"))
                } else {
                    Ok(())
                }
            }
            Self::Metropolis { target } => {
                if target.size() < 1 {
                    return bad("metropolis target needs at least two states".into());
                }
                if let MetropolisTarget::Power { d, .. } = target {
                    if !d.is_finite() {
                        return bad(format!("power exponent must be finite, got {d}"));
                    }
                }
                target.log_weights().map(|_| ())
            }
            Self::BernoulliLaplace { n, r } => {
                if *r == 0 || 2 * r > *n {
                    bad(format!("bernoulli-laplace needs 0 < 2r <= n, got n = {n}, r = {r}"))
                } else {
                    Ok(())
                }
            }
            Self::Hamming { n, r } => {
                if *n < 2 || *r < 1 {
                    bad(format!("hamming needs n >= 2 and r >= 1, got n = {n}, r = {r}"))
                } else {
                    Ok(())
                }
            }
            Self::ThetaHypercube { theta, r } => {
                // theta = 1 is the Ehrenfest boundary case and is allowed.
                if !(*theta > 0.0 && *theta <= 1.0) || *r < 1 {
                    bad(format!(
                        "theta hypercube needs theta in (0, 1] and r >= 1, got theta = {theta}, r = {r}"
                    ))
                } else {
                    Ok(())
                }
            }
            Self::QSubspace { q, n, m } => {
                if !is_prime_power(*q) {
                    bad(format!("q = {q} is not a prime power"))
                } else if *m < 1 || 2 * m > *n {
                    bad(format!("q-subspace needs 1 <= m and 2m <= n, got n = {n}, m = {m}"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Builds the chain with the family's transition rates.
    pub fn build(&self) -> Result<BirthDeathChain> {
        self.validate()?;
        match self {
            Self::SrwLazyEnds { n } => srw_lazy_ends(*n),
            Self::BiasedWalk { p, n } => biased_walk(*p, *n),
            Self::Metropolis { target } => metropolis_log(&target.log_weights()?),
            Self::BernoulliLaplace { n, r } => bernoulli_laplace(*n, *r),
            Self::Hamming { n, r } => hamming(*n, *r),
            Self::ThetaHypercube { theta, r } => theta_hypercube(*theta, *r),
            Self::QSubspace { q, n, m } => {
                let chain = q_subspace(*q, *n, *m)?;
                verify_against_closed_form(&chain, self)?;
                Ok(chain)
            }
        }
    }

    pub fn closed_form_spectrum(&self) -> Result<Spectrum> {
        spectral::closed_form_spectrum(self)
    }
}

fn verify_against_closed_form(chain: &BirthDeathChain, spec: &FamilySpec) -> Result<()> {
    let numeric = chain.spectrum()?;
    let closed = spectral::closed_form_spectrum(spec)?;
    let worst = numeric
        .iter()
        .zip(closed.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    if numeric.len() != closed.len() || worst > CLOSED_FORM_CHECK_TOL {
        return Err(Error::InvalidParams(format!(
            "{}: collapsed chain spectrum deviates from the closed form by {worst:.3e}",
            spec.label()
        )));
    }
    Ok(())
}

pub fn srw_lazy_ends(n: usize) -> Result<BirthDeathChain> {
    let mut r = vec![0.0; n + 1];
    r[0] = 0.5;
    r[n] = 0.5;
    BirthDeathChain::new(vec![0.5; n], vec![0.5; n], r)
}

pub fn biased_walk(p: f64, n: usize) -> Result<BirthDeathChain> {
    let q = 1.0 - p;
    let mut r = vec![0.0; n + 1];
    r[0] = q;
    r[n] = p;
    BirthDeathChain::new(vec![p; n], vec![q; n], r)
}

pub fn bernoulli_laplace(n: usize, r: usize) -> Result<BirthDeathChain> {
    // Integer numerators over r(n - r) keep every row exact.
    let denom = (r * (n - r)) as f64;
    let up: Vec<f64> = (0..r)
        .map(|x| ((r - x) * (n - r - x)) as f64 / denom)
        .collect();
    let down: Vec<f64> = (1..=r).map(|x| (x * x) as f64 / denom).collect();
    let hold: Vec<f64> = (0..=r)
        .map(|x| {
            let moved = (r - x) * (n - r - x) + x * x;
            (r * (n - r) - moved) as f64 / denom
        })
        .collect();
    BirthDeathChain::new(up, down, hold)
}

pub fn hamming(n: usize, r: usize) -> Result<BirthDeathChain> {
    let rf = r as f64;
    let denom = (r * (n - 1)) as f64;
    let up = (0..r).map(|x| (r - x) as f64 / rf).collect();
    let down = (1..=r).map(|x| x as f64 / denom).collect();
    let hold = (0..=r).map(|x| (x * (n - 2)) as f64 / denom).collect();
    BirthDeathChain::new(up, down, hold)
}

pub fn theta_hypercube(theta: f64, r: usize) -> Result<BirthDeathChain> {
    let rf = r as f64;
    let up = (0..r).map(|x| (r - x) as f64 / rf).collect();
    let down = (1..=r).map(|x| x as f64 * theta / rf).collect();
    let hold = (0..=r).map(|x| x as f64 * (1.0 - theta) / rf).collect();
    BirthDeathChain::new(up, down, hold)
}

/// Distance chain of the Grassmann graph of `m`-subspaces of `F_q^n`.
///
/// With Gaussian integers `[k] = (q^k - 1)/(q - 1)`, the intersection numbers
/// are `b_i = q^{2i+1} [m-i][n-m-i]`, `c_i = [i]^2` and the valency is `b_0`.
/// The walk moves up with `b_x / b_0` and down with `c_x / b_0`; both ratios
/// are rewritten in negative powers of `q` so that large `n` does not overflow.
pub fn q_subspace(q: u64, n: usize, m: usize) -> Result<BirthDeathChain> {
    let qf = q as f64;
    let (ni, mi) = (n as i32, m as i32);
    let norm = (1.0 - qf.powi(-mi)) * (1.0 - qf.powi(mi - ni));
    let up = (0..mi)
        .map(|x| (1.0 - qf.powi(x - mi)) * (1.0 - qf.powi(x + mi - ni)) / norm)
        .collect();
    let down: Vec<f64> = (1..=mi)
        .map(|x| {
            let g = 1.0 - qf.powi(-x);
            qf.powi(2 * x - ni - 1) * g * g / norm
        })
        .collect();
    if let Some(i) = down.iter().position(|&v| v == 0.0 || !v.is_normal()) {
        return Err(Error::InvalidParams(format!(
            "q-subspace rate q[{}] underflows for q = {q}, n = {n}",
            i + 1
        )));
    }
    BirthDeathChain::from_up_down(up, down)
}

/// Metropolis chain for a positive target on `{0..n}`.
///
/// The proposal is the nearest-neighbour walk that holds with probability 1/2
/// at both ends; a move to `y` is accepted with `min(1, target(y)/target(x))`
/// and rejected mass stays put.
pub fn metropolis(target: &[f64]) -> Result<BirthDeathChain> {
    if target.len() < 2 {
        return Err(Error::InvalidParams(
            "metropolis target needs at least two states".into(),
        ));
    }
    for (index, &value) in target.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonPositiveTarget { index, value });
        }
    }
    let logs: Vec<f64> = target.iter().map(|w| w.ln()).collect();
    metropolis_log(&logs)
}

/// [`metropolis`] with the target given as log-weights.
pub fn metropolis_log(log_target: &[f64]) -> Result<BirthDeathChain> {
    let n = log_target.len().saturating_sub(1);
    if n == 0 {
        return Err(Error::InvalidParams(
            "metropolis target needs at least two states".into(),
        ));
    }
    let accept = |from: usize, to: usize| (log_target[to] - log_target[from]).min(0.0).exp();
    let up = (0..n).map(|x| 0.5 * accept(x, x + 1)).collect();
    let down = (1..=n).map(|x| 0.5 * accept(x, x - 1)).collect();
    BirthDeathChain::from_up_down(up, down)
}

pub fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut rest = q;
            while rest.is_multiple_of(p) {
                rest /= p;
            }
            return rest == 1;
        }
        p += 1;
    }
    true
}
