// SPDX-License-Identifier: Apache-2.0

//! Eigenvalues of `I - K` by Sturm-sequence bisection.
//!
//! `I - K` is similar to the symmetric tridiagonal matrix returned by
//! [`BirthDeathChain::symmetrize`], so the `k`-th smallest eigenvalue can be
//! isolated by counting sign changes of the LDLᵀ pivots. Every eigenvalue is
//! bisected independently from the Gerschgorin enclosure, which certifies the
//! bracket at every step and makes the indices parallelizable.

use rayon::prelude::*;

use crate::chain::{BirthDeathChain, SymTridiagonal};
use crate::error::{Error, Result};
use crate::families::FamilySpec;

/// Iteration cap per eigenvalue.
pub const MAX_BISECTION_STEPS: usize = 200;

/// Tolerance on the discarded zero eigenvalue, relative to `max(1, λ_max)`.
const ZERO_EIGENVALUE_TOL: f64 = 1e-10;

/// The `m` nonzero eigenvalues of `I - K` in nondecreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    lambdas: Vec<f64>,
}

impl Spectrum {
    /// Builds a spectrum from positive rates; the input is sorted.
    pub fn new(mut lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidSpectrum("spectrum is empty".into()));
        }
        if let Some(bad) = lambdas.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidSpectrum(format!(
                "eigenvalue {bad} is not a positive finite number"
            )));
        }
        lambdas.sort_by(f64::total_cmp);
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Spectral gap `λ_1`.
    pub fn gap(&self) -> f64 {
        self.lambdas[0]
    }

    /// Largest eigenvalue `λ_m`.
    pub fn max(&self) -> f64 {
        self.lambdas[self.lambdas.len() - 1]
    }

    /// Smallest difference between consecutive eigenvalues (infinite for `m = 1`).
    pub fn min_separation(&self) -> f64 {
        self.lambdas
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.lambdas.iter().copied()
    }
}

/// Number of eigenvalues of `t` strictly below `x`.
pub fn sturm_count(t: &SymTridiagonal, x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut d = t.diag[0] - x;
    if d.abs() < pivmin {
        d = -pivmin;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..t.dim() {
        d = (t.diag[i] - x) - t.off_sq[i - 1] / d;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn pivmin(t: &SymTridiagonal) -> f64 {
    let max_sq = t.off_sq.iter().copied().fold(1.0f64, f64::max);
    f64::MIN_POSITIVE * max_sq
}

/// `index`-th smallest eigenvalue (0-based) by bisection inside `[lo, hi]`.
pub fn bisect_eigenvalue(
    t: &SymTridiagonal,
    index: usize,
    lo: f64,
    hi: f64,
    abs_tol: f64,
) -> Result<f64> {
    let piv = pivmin(t);
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if sturm_count(t, mid, piv) > index {
            hi = mid;
        } else {
            lo = mid;
        }
        let width = hi - lo;
        if width <= abs_tol.min(2.0 * f64::EPSILON * lo.abs().max(hi.abs())) + piv {
            return Ok(0.5 * (lo + hi));
        }
    }
    if hi - lo <= abs_tol {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::ConvergenceFailure { index })
    }
}

/// All eigenvalues of a symmetric tridiagonal matrix, ascending.
pub fn tridiagonal_eigenvalues(t: &SymTridiagonal) -> Result<Vec<f64>> {
    let (g_lo, g_hi) = t.gerschgorin();
    let span = g_hi.abs().max(g_lo.abs()).max(1.0);
    // Widen slightly so the enclosure is strict.
    let lo = g_lo - 2.0 * f64::EPSILON * span - pivmin(t);
    let hi = g_hi + 2.0 * f64::EPSILON * span + pivmin(t);
    let abs_tol = 1e-13 * span;
    (0..t.dim())
        .into_par_iter()
        .map(|k| bisect_eigenvalue(t, k, lo, hi, abs_tol))
        .collect()
}

/// Nonzero eigenvalues of `I - K`.
///
/// The zero eigenvalue (constant eigenvector) is checked and dropped.
pub fn eigenvalues(chain: &BirthDeathChain) -> Result<Spectrum> {
    let t = chain.symmetrize();
    let all = tridiagonal_eigenvalues(&t)?;
    let scale = all[all.len() - 1].max(1.0);
    if all[0].abs() > ZERO_EIGENVALUE_TOL * scale {
        return Err(Error::ConvergenceFailure { index: 0 });
    }
    let rest: Vec<f64> = all[1..].to_vec();
    if rest.iter().any(|&l| l <= 0.0) {
        // A second eigenvalue at zero would contradict irreducibility.
        return Err(Error::ConvergenceFailure { index: 1 });
    }
    Spectrum::new(rest)
}

/// Published closed-form spectrum of a parametric family.
pub fn closed_form_spectrum(family: &FamilySpec) -> Result<Spectrum> {
    family.validate()?;
    let lambdas: Vec<f64> = match family {
        FamilySpec::SrwLazyEnds { n } => srw_spectrum(*n),
        FamilySpec::BiasedWalk { p, n } => {
            let amp = 2.0 * (p * (1.0 - p)).sqrt();
            let n1 = (*n + 1) as f64;
            (1..=*n)
                .map(|j| 1.0 - amp * (std::f64::consts::PI * j as f64 / n1).cos())
                .collect()
        }
        FamilySpec::Metropolis { target } => match target.uniform_size() {
            Some(n) => srw_spectrum(n),
            None => return Err(Error::NoClosedForm(family.label())),
        },
        FamilySpec::BernoulliLaplace { n, r } => {
            let denom = (*r as f64) * ((*n - *r) as f64);
            (1..=*r)
                .map(|i| (i as f64) * ((*n - i + 1) as f64) / denom)
                .collect()
        }
        FamilySpec::Hamming { n, r } => {
            let denom = (*r as f64) * ((*n - 1) as f64);
            (1..=*r).map(|i| (i * *n) as f64 / denom).collect()
        }
        FamilySpec::ThetaHypercube { theta, r } => (1..=*r)
            .map(|i| i as f64 * (1.0 + theta) / *r as f64)
            .collect(),
        FamilySpec::QSubspace { q, n, m } => {
            let qf = *q as f64;
            let (n, m) = (*n as i32, *m as i32);
            let denom = (1.0 - qf.powi(m - n)) * (1.0 - qf.powi(-m));
            (1..=m)
                .map(|i| (1.0 - qf.powi(-i)) * (1.0 - qf.powi(i - n - 1)) / denom)
                .collect()
        }
    };
    Spectrum::new(lambdas)
}

/// `1 - cos(πj/(n+1))`, evaluated as `2 sin²(πj/(2(n+1)))`.
fn srw_spectrum(n: usize) -> Vec<f64> {
    let n1 = (n + 1) as f64;
    (1..=n)
        .map(|j| {
            let s = (std::f64::consts::PI * j as f64 / (2.0 * n1)).sin();
            2.0 * s * s
        })
        .collect()
}
