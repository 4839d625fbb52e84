// SPDX-License-Identifier: Apache-2.0

//! Validated birth-and-death chains on `{0, ..., m}`.
//!
//! Rates follow the usual convention: `p[x] = K(x, x+1)` for `0 <= x < m`,
//! `q[x-1] = K(x, x-1)` for `0 < x <= m` (so `q` is stored shifted by one),
//! and `r[x] = K(x, x)`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{self, Spectrum};

/// Absolute tolerance on row sums.
pub const ROW_TOLERANCE: f64 = 1e-12;

/// Row-sum error left alone by renormalization (a few ulps of 1).
const EXACT_ROW_SLACK: f64 = 4.0 * f64::EPSILON;

/// Tolerance used by the monotonicity predicate `p[x] + q[x+1] <= 1`.
pub const MONOTONE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct BirthDeathChain {
    up: Vec<f64>,
    down: Vec<f64>,
    hold: Vec<f64>,
    spectrum: OnceLock<Spectrum>,
}

/// On-disk chain format: `{"m": .., "p": [..], "q": [..], "r": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFile {
    pub m: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
}

impl BirthDeathChain {
    /// Validates and builds a chain from up, down and holding rates.
    ///
    /// Rows that sum to one within [`ROW_TOLERANCE`] are renormalized.
    pub fn new(p: Vec<f64>, q: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        let m = p.len();
        if m == 0 {
            return Err(Error::Shape("a chain needs at least two states".into()));
        }
        if q.len() != m || r.len() != m + 1 {
            return Err(Error::Shape(format!(
                "expected lengths (m, m, m+1) with m = {m}, got ({}, {}, {})",
                p.len(),
                q.len(),
                r.len()
            )));
        }
        for (name, values) in [("p", &p), ("q", &q), ("r", &r)] {
            for (index, &value) in values.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::OutOfRange { name, index, value });
                }
            }
        }
        if let Some(index) = p.iter().position(|&v| v == 0.0) {
            return Err(Error::Reducible { name: "p", index });
        }
        if let Some(index) = q.iter().position(|&v| v == 0.0) {
            return Err(Error::Reducible {
                name: "q",
                index: index + 1,
            });
        }

        let mut chain = Self {
            up: p,
            down: q,
            hold: r,
            spectrum: OnceLock::new(),
        };
        for x in 0..=m {
            let (dn, st, upr) = chain.row(x);
            let sum = dn + st + upr;
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::NotStochastic { row: x, sum });
            }
            // Rows already stochastic to rounding are kept bit for bit, so that
            // rebuilding a chain from its own rates is the identity.
            if (sum - 1.0).abs() > EXACT_ROW_SLACK {
                if x > 0 {
                    chain.down[x - 1] /= sum;
                }
                if x < m {
                    chain.up[x] /= sum;
                }
                chain.hold[x] /= sum;
            }
        }
        Ok(chain)
    }

    /// Builds a chain from up and down rates, setting `r = 1 - p - q`.
    ///
    /// Holding rates within [`ROW_TOLERANCE`] below zero are clamped to zero.
    pub fn from_up_down(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        let m = p.len();
        if q.len() != m {
            return Err(Error::Shape(format!(
                "p has length {m} but q has length {}",
                q.len()
            )));
        }
        let r = (0..=m)
            .map(|x| {
                let up = if x < m { p[x] } else { 0.0 };
                let down = if x > 0 { q[x - 1] } else { 0.0 };
                let h = 1.0 - up - down;
                if h < 0.0 && h > -ROW_TOLERANCE {
                    0.0
                } else {
                    h
                }
            })
            .collect();
        Self::new(p, q, r)
    }

    pub fn from_file(file: ChainFile) -> Result<Self> {
        if file.p.len() != file.m {
            return Err(Error::Shape(format!(
                "m = {} but p has {} entries",
                file.m,
                file.p.len()
            )));
        }
        Self::new(file.p, file.q, file.r)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ChainFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn to_file(&self) -> ChainFile {
        ChainFile {
            m: self.m(),
            p: self.up.clone(),
            q: self.down.clone(),
            r: self.hold.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("chain serializes")
    }

    /// Largest state index; the chain lives on `{0, ..., m}`.
    pub fn m(&self) -> usize {
        self.up.len()
    }

    pub fn num_states(&self) -> usize {
        self.up.len() + 1
    }

    pub fn p(&self) -> &[f64] {
        &self.up
    }

    pub fn q(&self) -> &[f64] {
        &self.down
    }

    pub fn r(&self) -> &[f64] {
        &self.hold
    }

    /// `K(x, x+1)`, zero at `x = m`.
    pub fn up_rate(&self, x: usize) -> f64 {
        self.up.get(x).copied().unwrap_or(0.0)
    }

    /// `K(x, x-1)`, zero at `x = 0`.
    pub fn down_rate(&self, x: usize) -> f64 {
        if x == 0 {
            0.0
        } else {
            self.down[x - 1]
        }
    }

    /// `(K(x, x-1), K(x, x), K(x, x+1))`.
    pub fn row(&self, x: usize) -> (f64, f64, f64) {
        (self.down_rate(x), self.hold[x], self.up_rate(x))
    }

    /// Stationary law from the product formula, evaluated in log space.
    pub fn stationary(&self) -> Result<StationaryDistribution> {
        let m = self.m();
        let mut log_weights = Vec::with_capacity(m + 1);
        let mut acc = 0.0f64;
        log_weights.push(0.0);
        for x in 1..=m {
            acc += self.up[x - 1].ln() - self.down[x - 1].ln();
            log_weights.push(acc);
        }
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = log_weights.iter().copied().fold(f64::INFINITY, f64::min);
        let log_range = max - min;
        // exp(-log_range) must stay a normal number after centering at the max.
        if !log_range.is_finite() || log_range > -(f64::MIN_POSITIVE.ln()) - 40.0 {
            return Err(Error::Overflow { log_range });
        }
        let shifted: Vec<f64> = log_weights.iter().map(|w| (w - max).exp()).collect();
        let total = crate::util::compensated_sum(shifted.iter().copied());
        let log_total = total.ln() + max;
        let nu = shifted.iter().map(|w| w / total).collect();
        let log_nu = log_weights.iter().map(|w| w - log_total).collect();
        Ok(StationaryDistribution {
            nu,
            log_weights,
            log_nu,
        })
    }

    /// `p[x] + q[x+1] <= 1` for every `x < m`.
    pub fn is_monotone(&self) -> bool {
        self.up
            .iter()
            .zip(&self.down)
            .all(|(p, q)| p + q <= 1.0 + MONOTONE_TOLERANCE)
    }

    /// `r[x] = 0` everywhere, i.e. the chain has period two.
    pub fn is_periodic(&self) -> bool {
        self.hold.iter().all(|&r| r == 0.0)
    }

    /// Symmetric tridiagonal matrix similar to `I - K` (conjugation by `diag(sqrt(nu))`).
    pub fn symmetrize(&self) -> SymTridiagonal {
        let m = self.m();
        // 1 - r[x] == p[x] + q[x] for a valid chain; the rate sum avoids cancellation.
        let diag = (0..=m)
            .map(|x| self.up_rate(x) + self.down_rate(x))
            .collect();
        let off_sq: Vec<f64> = self
            .up
            .iter()
            .zip(&self.down)
            .map(|(p, q)| p * q)
            .collect();
        let off = off_sq.iter().map(|v| -v.sqrt()).collect();
        SymTridiagonal { diag, off, off_sq }
    }

    /// Nonzero eigenvalues of `I - K`, computed once and cached.
    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = spectral::eigenvalues(self)?;
        Ok(self.spectrum.get_or_init(|| s))
    }

    /// One step of the forward equation: `mu K`.
    pub fn step(&self, mu: &[f64], out: &mut [f64]) {
        let m = self.m();
        debug_assert_eq!(mu.len(), m + 1);
        debug_assert_eq!(out.len(), m + 1);
        if m == 0 {
            out[0] = mu[0];
            return;
        }
        out[0] = mu[0] * self.hold[0] + mu[1] * self.down[0];
        for x in 1..m {
            out[x] = mu[x - 1] * self.up[x - 1] + mu[x] * self.hold[x] + mu[x + 1] * self.down[x];
        }
        out[m] = mu[m - 1] * self.up[m - 1] + mu[m] * self.hold[m];
    }
}

impl PartialEq for BirthDeathChain {
    fn eq(&self, other: &Self) -> bool {
        self.up == other.up && self.down == other.down && self.hold == other.hold
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    nu: Vec<f64>,
    log_weights: Vec<f64>,
    log_nu: Vec<f64>,
}

impl StationaryDistribution {
    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// Cumulative `log(p[y-1]) - log(q[y])` before normalization.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn log_nu(&self) -> &[f64] {
        &self.log_nu
    }

    pub fn len(&self) -> usize {
        self.nu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu.is_empty()
    }
}

/// Symmetric tridiagonal matrix stored by diagonal and off-diagonal.
///
/// `off_sq` keeps the squared off-diagonal exactly as `p[x] * q[x+1]` for
/// Sturm counts, which avoids round-tripping through a square root.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub off_sq: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if off.len() + 1 != diag.len() {
            return Err(Error::Shape(format!(
                "diagonal of length {} needs {} off-diagonal entries, got {}",
                diag.len(),
                diag.len().saturating_sub(1),
                off.len()
            )));
        }
        let off_sq = off.iter().map(|v| v * v).collect();
        Ok(Self { diag, off, off_sq })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gerschgorin enclosure of the spectrum.
    pub fn gerschgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }
}
