// SPDX-License-Identifier: Apache-2.0

//! Exact spectral analysis of finite birth-and-death chains.
//!
//! A birth-and-death chain on `{0, ..., m}` started at `0` reaches stationarity
//! in separation exactly when a sum of independent exponentials (continuous
//! time) or geometric-type phases (discrete time) with rates given by the
//! nonzero eigenvalues of `I - K` has been exhausted. This crate computes
//! those eigenvalues with certified Sturm bisection, evaluates the resulting
//! hitting-time law, cross-checks it against brute-force evolution of the
//! chain, and turns the spectral statistics into cut-off diagnostics:
//!
//! * [`chain`]: validated chains, stationary law, monotonicity, symmetrization
//! * [`spectral`]: eigenvalues of `I - K` and closed-form family spectra
//! * [`hitting`]: separation as a hitting-time tail, moments, MGF diagnostics
//! * [`distances`]: direct evolution and separation / TV / L² distances
//! * [`cutoff`]: cut-off statistics, bounds, mixing times, scans, shapes
//! * [`families`]: parametric chain families with known spectra

pub mod chain;
pub mod cutoff;
pub mod distances;
pub mod error;
pub mod families;
pub mod hitting;
pub mod spectral;
pub mod util;

pub use chain::{BirthDeathChain, ChainFile, StationaryDistribution, SymTridiagonal};
pub use cutoff::{
    chebyshev_bounds, cutoff_stats, exponential_bounds, exponential_bounds_as_printed,
    mixing_time, scan_family, shape_profile, BoundPair, CutoffStats, ScanThresholds,
    ScanVerdict, ShapeClass, ShapeProfile, Verdict,
};
pub use distances::{DistanceReport, DistributionAtTime};
pub use error::{Error, Result};
pub use families::{FamilySpec, MetropolisTarget};
pub use hitting::{HittingTimeLaw, Moments, TimeMode};
pub use spectral::{closed_form_spectrum, eigenvalues, Spectrum};
