// SPDX-License-Identifier: Apache-2.0

//! Random chains, both seeded and as proptest strategies.

use bd_cutoff::BirthDeathChain;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Chain from unnormalized positive row weights `(down, hold, up)`.
///
/// The first row has no down weight and the last no up weight.
pub fn chain_from_weights(rows: &[(f64, f64, f64)]) -> BirthDeathChain {
    let m = rows.len() - 1;
    let mut p = Vec::with_capacity(m);
    let mut q = Vec::with_capacity(m);
    let mut r = Vec::with_capacity(m + 1);
    for (x, &(d, h, u)) in rows.iter().enumerate() {
        let d = if x == 0 { 0.0 } else { d };
        let u = if x == m { 0.0 } else { u };
        let s = d + h + u;
        if x > 0 {
            q.push(d / s);
        }
        if x < m {
            p.push(u / s);
        }
        r.push(h / s);
    }
    BirthDeathChain::new(p, q, r).expect("weights give a valid chain")
}

/// Any irreducible chain; rows are random points of the simplex.
pub fn random_chain<R: Rng>(rng: &mut R, m: usize) -> BirthDeathChain {
    let rows: Vec<_> = (0..=m)
        .map(|_| {
            (
                rng.random_range(0.05..1.0),
                rng.random_range(0.0..1.0),
                rng.random_range(0.05..1.0),
            )
        })
        .collect();
    chain_from_weights(&rows)
}

/// Monotone chain with `p_x, q_x ∈ [lo, hi]`, `hi <= 1/2`.
pub fn random_monotone_chain<R: Rng>(rng: &mut R, m: usize, lo: f64, hi: f64) -> BirthDeathChain {
    assert!(hi <= 0.5 && lo > 0.0 && lo <= hi);
    let p: Vec<f64> = (0..m).map(|_| rng.random_range(lo..=hi)).collect();
    let q: Vec<f64> = (0..m).map(|_| rng.random_range(lo..=hi)).collect();
    BirthDeathChain::from_up_down(p, q).expect("rates in (0, 1/2] give a valid chain")
}

/// Strategy for arbitrary valid chains with `1 <= m <= max_m`.
pub fn any_chain(max_m: usize) -> impl Strategy<Value = BirthDeathChain> {
    (1..=max_m)
        .prop_flat_map(|m| {
            prop::collection::vec((0.05f64..1.0, 0.0f64..1.0, 0.05f64..1.0), m + 1)
        })
        .prop_map(|rows| chain_from_weights(&rows))
}

/// Strategy for monotone chains with rates in `[0.05, 0.5]`.
pub fn monotone_chain(max_m: usize) -> impl Strategy<Value = BirthDeathChain> {
    (1..=max_m)
        .prop_flat_map(|m| {
            (
                prop::collection::vec(0.05f64..=0.5, m),
                prop::collection::vec(0.05f64..=0.5, m),
            )
        })
        .prop_map(|(p, q)| BirthDeathChain::from_up_down(p, q).expect("valid rates"))
}

/// Strategy for spectra of `m` distinct values in `[lo, hi]`.
pub fn spread_spectrum(
    max_m: usize,
    lo: f64,
    hi: f64,
) -> impl Strategy<Value = bd_cutoff::Spectrum> {
    prop::collection::vec(lo..hi, 1..=max_m).prop_filter_map("distinct values", |mut v| {
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-3 * b.abs());
        bd_cutoff::Spectrum::new(v).ok()
    })
}
