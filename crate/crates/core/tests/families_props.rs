// SPDX-License-Identifier: Apache-2.0

use bd_cutoff::families::metropolis;
use bd_cutoff::{closed_form_spectrum, eigenvalues, FamilySpec};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = FamilySpec> {
    prop_oneof![
        (1usize..=120).prop_map(|n| FamilySpec::SrwLazyEnds { n }),
        (0.55f64..0.95, 1usize..=120).prop_map(|(p, n)| FamilySpec::BiasedWalk { p, n }),
        (1usize..=60, 2usize..=5)
            .prop_map(|(r, k)| FamilySpec::BernoulliLaplace { n: k * r, r }),
        (2usize..=6, 1usize..=120).prop_map(|(n, r)| FamilySpec::Hamming { n, r }),
        (0.05f64..=1.0, 1usize..=120).prop_map(|(theta, r)| FamilySpec::ThetaHypercube { theta, r }),
        (prop::sample::select(vec![2u64, 3, 4, 5]), 1usize..=15, 0usize..=6)
            .prop_map(|(q, m, extra)| FamilySpec::QSubspace { q, n: 2 * m + extra, m }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn built_chain_matches_closed_form(spec in family()) {
        let chain = spec.build().unwrap();
        prop_assert_eq!(chain.m(), spec.size());
        let numeric = eigenvalues(&chain).unwrap();
        let closed = closed_form_spectrum(&spec).unwrap();
        for (a, b) in numeric.lambdas().iter().zip(closed.lambdas()) {
            prop_assert!((a - b).abs() <= 1e-10, "{spec:?}: {a} vs {b}");
        }
    }

    #[test]
    fn metropolis_targets_its_law(weights in prop::collection::vec(0.01f64..10.0, 2..60)) {
        let chain = metropolis(&weights).unwrap();
        prop_assert!(chain.is_monotone());
        let total: f64 = weights.iter().sum();
        let nu = chain.stationary().unwrap();
        for (v, w) in nu.nu().iter().zip(&weights) {
            prop_assert!((v - w / total).abs() <= 1e-10 * (w / total));
        }
    }

    #[test]
    fn family_json_round_trips(spec in family()) {
        let text = serde_json::to_string(&spec).unwrap();
        let back: FamilySpec = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, spec);
    }
}

#[test]
fn q_subspace_gap_closed_form() {
    for (q, n, m) in [(2u64, 10usize, 5usize), (3, 9, 4), (4, 12, 3), (2, 40, 20)] {
        let qf = q as f64;
        let want = (1.0 - 1.0 / qf) * (1.0 - qf.powi(-(n as i32)))
            / ((1.0 - qf.powi(m as i32 - n as i32)) * (1.0 - qf.powi(-(m as i32))));
        let chain = FamilySpec::QSubspace { q, n, m }.build().unwrap();
        let gap = eigenvalues(&chain).unwrap().gap();
        assert!((gap - want).abs() <= 1e-12, "q = {q}, n = {n}, m = {m}: {gap} vs {want}");
    }
}
