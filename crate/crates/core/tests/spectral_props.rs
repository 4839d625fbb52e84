// SPDX-License-Identifier: Apache-2.0

use bd_cutoff::eigenvalues;
use bd_cutoff_testkit::chains::{any_chain, chain_from_weights};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_are_distinct_and_positive(chain in any_chain(80)) {
        let s = eigenvalues(&chain).unwrap();
        prop_assert_eq!(s.len(), chain.m());
        prop_assert!(s.gap() > 0.0);
        for w in s.lambdas().windows(2) {
            prop_assert!(w[1] > w[0], "{} !> {}", w[1], w[0]);
        }
    }

    #[test]
    fn trace_identity(chain in any_chain(80)) {
        let s = eigenvalues(&chain).unwrap();
        let sum: f64 = s.lambdas().iter().sum();
        let trace: f64 = chain.r().iter().map(|r| 1.0 - r).sum();
        prop_assert!((sum - trace).abs() <= 1e-10 * trace.max(1.0));
    }

    #[test]
    fn periodic_exactly_when_two_is_an_eigenvalue(
        rows in prop::collection::vec((0.05f64..1.0, 0.0f64..1.0, 0.05f64..1.0), 2..40),
        zero_hold in any::<bool>(),
    ) {
        let rows: Vec<_> = rows
            .into_iter()
            .map(|(d, h, u)| (d, if zero_hold { 0.0 } else { h + 0.01 }, u))
            .collect();
        let chain = chain_from_weights(&rows);
        let top = eigenvalues(&chain).unwrap().max();
        prop_assert_eq!((top - 2.0).abs() <= 1e-10, chain.is_periodic());
    }

    #[test]
    fn spectrum_cache_is_value_identical(chain in any_chain(30)) {
        let fresh = eigenvalues(&chain).unwrap();
        prop_assert_eq!(chain.spectrum().unwrap(), &fresh);
        prop_assert_eq!(chain.spectrum().unwrap(), &fresh);
    }
}
