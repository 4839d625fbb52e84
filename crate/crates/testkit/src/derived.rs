// SPDX-License-Identifier: Apache-2.0

//! Worked examples with independently derived expected values.
//!
//! Every case first evaluates its reference (dense linear algebra, exact
//! rational arithmetic or a closed form), checks the reference against the
//! frozen value where one exists, and only then compares the library result.

use bd_cutoff::cutoff::{
    chebyshev_bounds, cutoff_stats, exponential_bounds, exponential_bounds_as_printed,
    linear_grid, mixing_bracket, mixing_time, shape_profile, CutoffStats,
};
use bd_cutoff::distances::{
    evolve_continuous, evolve_discrete, l2_distance, separation_direct, total_variation,
    DistributionAtTime,
};
use bd_cutoff::hitting::{
    lagrange_tail, log_mgf_envelope, moments, sep_continuous, sep_discrete, standardized_log_mgf,
    theta, TimeMode,
};
use bd_cutoff::{closed_form_spectrum, eigenvalues, BirthDeathChain, Error, FamilySpec, Spectrum};
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;

use crate::chains::{random_chain, random_monotone_chain, rng};
use crate::oracles::*;

pub type CaseResult = Result<(), String>;

pub struct Case {
    pub name: &'static str,
    pub run: fn() -> CaseResult,
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> CaseResult {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: got {got:e}, expected {want:e} (tolerance {tol:e})"))
    }
}

fn close_all(what: &str, got: &[f64], want: &[f64], tol: f64) -> CaseResult {
    if got.len() != want.len() {
        return Err(format!("{what}: length {} vs {}", got.len(), want.len()));
    }
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        close(&format!("{what}[{i}]"), *g, *w, tol)?;
    }
    Ok(())
}

fn check(what: &str, ok: bool) -> CaseResult {
    if ok {
        Ok(())
    } else {
        Err(format!("{what} does not hold"))
    }
}

fn spec(l: &[f64]) -> Spectrum {
    Spectrum::new(l.to_vec()).expect("valid spectrum")
}

fn lib<T>(r: bd_cutoff::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn biased_two_state() -> BirthDeathChain {
    BirthDeathChain::new(vec![2.0 / 3.0], vec![1.0 / 3.0], vec![1.0 / 3.0, 2.0 / 3.0])
        .expect("valid chain")
}

fn srw4() -> BirthDeathChain {
    FamilySpec::SrwLazyEnds { n: 3 }.build().expect("valid family")
}

pub fn chain_stationary_biased_two_state() -> CaseResult {
    let c = biased_two_state();
    let oracle = stationary_by_solve(&c);
    close_all("oracle", &oracle, &[1.0 / 3.0, 2.0 / 3.0], 1e-14)?;
    close_all("stationary", lib(c.stationary())?.nu(), &oracle, 1e-14)
}

pub fn chain_symmetrize_biased_two_state() -> CaseResult {
    let c = biased_two_state();
    let t = c.symmetrize();
    close_all("diag", &t.diag, &[2.0 / 3.0, 1.0 / 3.0], 1e-15)?;
    close_all("off", &t.off, &[-(2.0f64).sqrt() / 3.0], 1e-15)?;
    let dense = dense_eigenvalues(&c);
    close_all("dense oracle", &dense, &[0.0, 1.0], 1e-12)?;
    close_all("symmetric", &dense_symmetric_eigenvalues(&t.diag, &t.off), &dense, 1e-12)
}

pub fn chain_symmetrize_three_state() -> CaseResult {
    let c = BirthDeathChain::new(vec![0.5, 0.3], vec![0.2, 0.6], vec![0.5, 0.5, 0.4])
        .map_err(|e| e.to_string())?;
    let t = c.symmetrize();
    close_all("off", &t.off, &[-(0.1f64).sqrt(), -(0.18f64).sqrt()], 1e-15)?;
    let dense = dense_eigenvalues(&c);
    let root = 0.07f64.sqrt();
    close_all("dense oracle", &dense, &[0.0, 0.8 - root, 0.8 + root], 1e-12)?;
    close_all("symmetric", &dense_symmetric_eigenvalues(&t.diag, &t.off), &dense, 1e-12)?;
    close_all("bisection", lib(eigenvalues(&c))?.lambdas(), &dense[1..], 1e-12)
}

pub fn spectral_srw_four_states() -> CaseResult {
    let c = srw4();
    let dense = dense_eigenvalues(&c);
    let pi = std::f64::consts::PI;
    let closed = [1.0 - (pi / 4.0).cos(), 1.0, 1.0 - (3.0 * pi / 4.0).cos()];
    close_all("dense oracle", &dense[1..], &closed, 1e-12)?;
    close_all("bisection", lib(eigenvalues(&c))?.lambdas(), &closed, 1e-13)
}

pub fn spectral_random_chains_match_dense() -> CaseResult {
    let mut g = rng(11);
    for _ in 0..20 {
        let m = g.random_range(1..=50);
        let c = random_chain(&mut g, m);
        let dense = dense_eigenvalues(&c);
        close(&format!("dense zero eigenvalue (m = {m})"), dense[0], 0.0, 1e-10)?;
        close_all(&format!("m = {m}"), lib(eigenvalues(&c))?.lambdas(), &dense[1..], 1e-10)?;
    }
    Ok(())
}

pub fn spectral_q_subspace_small() -> CaseResult {
    // (1 - 2^{-i})(1 - 2^{i-5}) / ((1 - 2^{-2})(1 - 2^{-2})) for i = 1, 2.
    let q = ratio(1, 2);
    let denom = (BigRational::one() - &q * &q) * (BigRational::one() - &q * &q);
    let exact: Vec<_> = (1..=2)
        .map(|i: i32| {
            let a = BigRational::one() - num_traits::pow(q.clone(), i as usize);
            let b = BigRational::one() - num_traits::pow(q.clone(), (5 - i) as usize);
            a * b / &denom
        })
        .collect();
    if exact != vec![ratio(5, 6), ratio(7, 6)] {
        return Err(format!("rational oracle gave {exact:?}"));
    }
    let want: Vec<f64> = exact.iter().map(to_f64).collect();
    let family = FamilySpec::QSubspace { q: 2, n: 4, m: 2 };
    close_all("closed form", lib(closed_form_spectrum(&family))?.lambdas(), &want, 1e-15)?;
    close_all("bisection", lib(eigenvalues(&lib(family.build())?))?.lambdas(), &want, 1e-12)
}

pub fn hitting_single_exponential() -> CaseResult {
    let ln2 = std::f64::consts::LN_2;
    let oracle = (-ln2).exp();
    close("oracle", oracle, 0.5, 1e-16)?;
    close("sep", lib(sep_continuous(&spec(&[1.0]), ln2))?, oracle, 1e-12)
}

pub fn hitting_two_phase() -> CaseResult {
    let ln2 = std::f64::consts::LN_2;
    let oracle = two_phase_tail(1.0, 2.0, ln2);
    close("oracle", oracle, 0.75, 1e-15)?;
    close("sep", lib(sep_continuous(&spec(&[1.0, 2.0]), ln2))?, oracle, 1e-12)
}

pub fn hitting_discrete_geometric() -> CaseResult {
    let oracle = rational_geometric_tail(&[ratio(1, 2)], 2);
    if oracle != ratio(1, 4) {
        return Err(format!("rational oracle gave {oracle}"));
    }
    close("sep", lib(sep_discrete(&spec(&[0.5]), 2))?, 0.25, 1e-16)
}

/// The phase with `λ = 2` has generating function `2z/(1 + z)`, whose
/// coefficients alternate in sign; it is not a probability law, so no value in
/// `[0, 1]` can match the exact product formula.
pub fn hitting_discrete_bernoulli_phase() -> CaseResult {
    let exact = rational_discrete_tail(&[ratio(2, 1)], 1);
    if exact != ratio(-1, 1) {
        return Err(format!("product formula gave {exact}, expected -1"));
    }
    // The only chain with spectrum {2} is the deterministic flip on two states.
    let flip = BirthDeathChain::new(vec![1.0], vec![1.0], vec![0.0, 0.0]).map_err(|e| e.to_string())?;
    close_all("flip spectrum", lib(eigenvalues(&flip))?.lambdas(), &[2.0], 1e-14)?;
    let nu = lib(flip.stationary())?;
    close("direct separation", separation(&evolve_discrete(&flip, 1).probs, nu.nu()), 1.0, 0.0)?;
    match sep_discrete(&spec(&[2.0]), 1) {
        Err(Error::SignedHittingLaw { .. }) => Ok(()),
        other => Err(format!("expected SignedHittingLaw, got {other:?}")),
    }
}

pub fn hitting_discrete_matches_product_formula() -> CaseResult {
    // A mix of geometric phases and one phase above 1 that pairs with 0.3.
    let lambdas = [ratio(3, 10), ratio(1, 2), ratio(4, 5), ratio(6, 5)];
    let s = spec(&lambdas.iter().map(to_f64).collect::<Vec<_>>());
    for k in [0u32, 1, 2, 3, 5, 8, 20, 50] {
        let exact = to_f64(&rational_discrete_tail(&lambdas, k));
        close(&format!("k = {k}"), lib(sep_discrete(&s, k as u64))?, exact.min(1.0), 1e-14)?;
    }
    Ok(())
}

pub fn hitting_lagrange_two_phase() -> CaseResult {
    let coeffs = rational_lagrange_coefficients(&[ratio(1, 1), ratio(2, 1)]);
    if coeffs != vec![ratio(2, 1), ratio(-1, 1)] {
        return Err(format!("coefficients {coeffs:?}"));
    }
    let ln2 = std::f64::consts::LN_2;
    let oracle = 2.0 * (-ln2).exp() - (-2.0 * ln2).exp();
    close("oracle", oracle, 0.75, 1e-15)?;
    close("lagrange", lib(lagrange_tail(&spec(&[1.0, 2.0]), ln2))?, oracle, 1e-15)?;
    close("single phase", lib(lagrange_tail(&spec(&[1.0]), 1.3))?, (-1.3f64).exp(), 1e-16)
}

pub fn hitting_lagrange_random_m20() -> CaseResult {
    let mut g = rng(20);
    for _ in 0..5 {
        let mut l: Vec<f64> = (0..20).map(|_| g.random_range(0.05..2.0)).collect();
        l.sort_by(f64::total_cmp);
        l.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        let s = spec(&l);
        let t = moments(&s, TimeMode::Continuous).mean;
        let oracle = lib(sep_continuous(&s, t))?;
        close("lagrange", lib(lagrange_tail(&s, t))?, oracle, 1e-8)?;
    }
    Ok(())
}

pub fn hitting_moments() -> CaseResult {
    let two = [ratio(1, 1), ratio(2, 1)];
    let mean: BigRational = two.iter().map(|l| l.recip()).sum();
    let var: BigRational = two.iter().map(|l| (l * l).recip()).sum();
    if (mean.clone(), var.clone()) != (ratio(3, 2), ratio(5, 4)) {
        return Err("rational oracle for {1, 2}".into());
    }
    let m = moments(&spec(&[1.0, 2.0]), TimeMode::Continuous);
    close("mean {1,2}", m.mean, to_f64(&mean), 1e-15)?;
    close("variance {1,2}", m.variance, to_f64(&var), 1e-15)?;

    let half = ratio(1, 2);
    let dvar = (BigRational::one() - &half) / (&half * &half);
    if dvar != ratio(2, 1) {
        return Err("rational oracle for discrete {1/2}".into());
    }
    let d = moments(&spec(&[0.5]), TimeMode::Discrete);
    close("discrete mean", d.mean, 2.0, 1e-15)?;
    close("discrete variance", d.variance, 2.0, 1e-15)?;

    let bl = [ratio(1, 1), ratio(3, 2)];
    let bl_mean: BigRational = bl.iter().map(|l| l.recip()).sum();
    let bl_var: BigRational = bl.iter().map(|l| (l * l).recip()).sum();
    if (bl_mean.clone(), bl_var.clone()) != (ratio(5, 3), ratio(13, 9)) {
        return Err("rational oracle for Bernoulli-Laplace".into());
    }
    let s = lib(closed_form_spectrum(&FamilySpec::BernoulliLaplace { n: 4, r: 2 }))?;
    let b = moments(&s, TimeMode::Continuous);
    close("B-L mean", b.mean, to_f64(&bl_mean), 1e-15)?;
    close("B-L variance", b.variance, to_f64(&bl_var), 1e-15)
}

/// `F(u) = Σ_{k>=2} (u^k / k) Σ_i (λ_i σ)^{-k}` summed term by term.
fn log_mgf_series(lambdas: &[f64], u: f64) -> f64 {
    let sigma = lambdas.iter().map(|l| 1.0 / (l * l)).sum::<f64>().sqrt();
    let mut total = 0.0;
    for k in 2..400 {
        let power: f64 = lambdas.iter().map(|l| (l * sigma).powi(-k)).sum();
        total += u.powi(k) / k as f64 * power;
    }
    total
}

pub fn hitting_log_mgf_two_phase() -> CaseResult {
    let oracle = log_mgf_series(&[1.0, 2.0], 0.3);
    check("oracle >= u²/2", oracle >= 0.045)?;
    let got = lib(standardized_log_mgf(&spec(&[1.0, 2.0]), 0.3))?;
    close("F(0.3)", got, oracle, 1e-14)?;
    close("F(0)", lib(standardized_log_mgf(&spec(&[1.0, 2.0]), 0.0))?, 0.0, 0.0)
}

pub fn hitting_log_mgf_envelope() -> CaseResult {
    let lambdas: Vec<f64> = (1..=100).map(f64::from).collect();
    let s = spec(&lambdas);
    let u = 0.5;
    let f = log_mgf_series(&lambdas, u);
    let theta2: f64 = lambdas.iter().map(|l| (1.0 / l).powi(2)).sum();
    let envelope: f64 = (3..400)
        .map(|k| u.powi(k) / (k as f64 * theta2.powf((k - 2) as f64 / 2.0)))
        .sum();
    check("oracle lower envelope", f - u * u / 2.0 >= 0.0)?;
    check("oracle upper envelope", f - u * u / 2.0 <= envelope)?;
    let got = lib(standardized_log_mgf(&s, u))?;
    close("F(0.5)", got, f, 1e-14)?;
    close("envelope", lib(log_mgf_envelope(&s, u))?, envelope, 1e-14)?;
    check("library value inside envelope", got - u * u / 2.0 >= 0.0 && got - u * u / 2.0 <= envelope)
}

pub fn hitting_theta_two_phase() -> CaseResult {
    let oracle = to_f64(&(ratio(1, 1) + ratio(1, 4)));
    close("theta_2", lib(theta(&spec(&[1.0, 2.0]), 2))?, oracle, 1e-16)?;
    close("theta_k of {1}", lib(theta(&spec(&[1.0]), 7))?, 1.0, 0.0)
}

pub fn distances_srw_two_steps() -> CaseResult {
    let c = srw4();
    let dense = dense_power_row(&c, 0, 2);
    close_all("oracle", &dense, &[0.5, 0.25, 0.25, 0.0], 1e-16)?;
    close_all("evolve", &evolve_discrete(&c, 2).probs, &dense, 0.0)
}

pub fn distances_two_state_continuous() -> CaseResult {
    let c = BirthDeathChain::new(vec![0.5], vec![0.5], vec![0.5, 0.5]).map_err(|e| e.to_string())?;
    for t in [0.0, 0.25, 1.0, 4.0] {
        let dense = dense_continuous_row(&c, 0, t);
        close("oracle", dense[0], 0.5 * (1.0 + (-t).exp()), 1e-14)?;
        close_all(&format!("t = {t}"), &lib(evolve_continuous(&c, t))?.probs, &dense, 1e-12)?;
    }
    Ok(())
}

pub fn distances_long_time_is_stationary() -> CaseResult {
    let mut g = rng(50);
    for _ in 0..5 {
        let m = g.random_range(1..=8);
        let c = random_chain(&mut g, m);
        let nu = stationary_by_solve(&c);
        let t = 50.0 / lib(c.spectrum())?.gap();
        close_all(&format!("m = {m}"), &lib(evolve_continuous(&c, t))?.probs, &nu, 1e-9)?;
    }
    Ok(())
}

pub fn distances_spectral_matches_direct() -> CaseResult {
    let mut g = rng(60);
    for _ in 0..5 {
        let m = g.random_range(1..=30);
        let c = random_monotone_chain(&mut g, m, 0.1, 0.5);
        let nu = stationary_by_solve(&c);
        let s = lib(c.spectrum())?.clone();
        let mean = moments(&s, TimeMode::Continuous).mean;
        for t in linear_grid(0.0, 3.0 * mean, 7) {
            let direct = separation(&dense_continuous_row(&c, 0, t), &nu).clamp(0.0, 1.0);
            close(&format!("m = {m}, t = {t}"), lib(sep_continuous(&s, t))?, direct, 1e-8)?;
        }
    }
    Ok(())
}

pub fn distances_bernoulli_laplace_tv_below_sep() -> CaseResult {
    let c = lib(FamilySpec::BernoulliLaplace { n: 4, r: 2 }.build())?;
    let nu = [1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0];
    let dense = dense_continuous_row(&c, 0, 3.0);
    let tv: f64 = 0.5 * dense.iter().zip(&nu).map(|(d, v)| (d - v).abs()).sum::<f64>();
    let sep = separation(&dense, &nu);
    check("oracle TV <= sep", tv <= sep)?;
    let d = lib(evolve_continuous(&c, 3.0))?;
    let stat = lib(c.stationary())?;
    close("tv", total_variation(&d, &stat), tv, 1e-12)?;
    close("sep", separation_direct(&d, &stat), sep, 1e-12)?;
    check("TV <= sep", total_variation(&d, &stat) <= separation_direct(&d, &stat))
}

pub fn distances_l2_point_mass() -> CaseResult {
    let n = 3.0f64;
    let oracle = ((n * n + n) / (n + 1.0)).sqrt();
    close("oracle", oracle, 3.0f64.sqrt(), 1e-15)?;
    let nu = lib(srw4().stationary())?;
    let delta = DistributionAtTime {
        probs: vec![1.0, 0.0, 0.0, 0.0],
        time: 0.0,
        mode: TimeMode::Discrete,
    };
    close("l2", l2_distance(&delta, &nu), oracle, 1e-14)
}

pub fn distances_tv_below_half_l2() -> CaseResult {
    let mut g = rng(70);
    for _ in 0..50 {
        let m = g.random_range(1..=20);
        let c = random_chain(&mut g, m);
        let nu = lib(c.stationary())?;
        let raw: Vec<f64> = (0..=m).map(|_| g.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let d = DistributionAtTime {
            probs: raw.iter().map(|x| x / total).collect(),
            time: 0.0,
            mode: TimeMode::Discrete,
        };
        let cs: f64 = d
            .probs
            .iter()
            .zip(nu.nu())
            .map(|(p, v)| (p - v).powi(2) / v)
            .sum::<f64>()
            .sqrt();
        check("oracle Cauchy-Schwarz", total_variation(&d, &nu) <= 0.5 * cs + 1e-15)?;
        check("tv <= l2/2", total_variation(&d, &nu) <= 0.5 * l2_distance(&d, &nu) + 1e-15)?;
    }
    Ok(())
}

pub fn cutoff_stats_bernoulli_laplace() -> CaseResult {
    let s = lib(closed_form_spectrum(&FamilySpec::BernoulliLaplace { n: 4, r: 2 }))?;
    let stats = cutoff_stats(&s);
    close("gap", stats.gap, 1.0, 0.0)?;
    close("t", stats.mean_hit, to_f64(&ratio(5, 3)), 1e-15)?;
    close("sigma", stats.window, 13.0f64.sqrt() / 3.0, 1e-15)?;
    close("N", stats.product, to_f64(&ratio(5, 3)), 1e-15)
}

pub fn cutoff_stats_hamming() -> CaseResult {
    let exact: BigRational = [ratio(2, 3), ratio(4, 3), ratio(2, 1)]
        .iter()
        .map(|l| l.recip())
        .sum();
    if exact != ratio(11, 4) {
        return Err(format!("rational oracle gave {exact}"));
    }
    let s = lib(closed_form_spectrum(&FamilySpec::Hamming { n: 2, r: 3 }))?;
    close_all("spectrum", s.lambdas(), &[2.0 / 3.0, 4.0 / 3.0, 2.0], 1e-15)?;
    close("t", cutoff_stats(&s).mean_hit, 2.75, 1e-15)
}

fn stats_with_product(n: f64) -> CutoffStats {
    CutoffStats {
        gap: 1.0,
        mean_hit: n,
        window: n.sqrt(),
        product: n,
        theta2: 1.0,
    }
}

pub fn cutoff_chebyshev_arithmetic() -> CaseResult {
    let oracle = to_f64(&(ratio(1, 1) / (ratio(1, 1) + ratio(3, 1))));
    let b = lib(chebyshev_bounds(&stats_with_product(3.0), 1.0))?;
    close("upper", b.upper, oracle, 0.0)?;
    close("lower", b.lower, 1.0 - oracle, 0.0)
}

/// Chains used by the bound properties: small families and random monotone chains.
pub fn bound_test_spectra() -> Vec<Spectrum> {
    let mut out = Vec::new();
    for family in [
        FamilySpec::SrwLazyEnds { n: 20 },
        FamilySpec::BiasedWalk { p: 0.7, n: 30 },
        FamilySpec::BernoulliLaplace { n: 200, r: 20 },
        FamilySpec::Hamming { n: 4, r: 15 },
        FamilySpec::ThetaHypercube { theta: 0.5, r: 25 },
        FamilySpec::QSubspace { q: 2, n: 20, m: 10 },
    ] {
        out.push(closed_form_spectrum(&family).expect("closed form"));
    }
    let mut g = rng(80);
    for _ in 0..6 {
        let m = g.random_range(1..=40);
        let c = random_monotone_chain(&mut g, m, 0.1, 0.5);
        out.push(c.spectrum().expect("spectrum").clone());
    }
    out
}

pub fn cutoff_chebyshev_property() -> CaseResult {
    for s in bound_test_spectra() {
        let stats = cutoff_stats(&s);
        for c in [0.25, 0.5, 1.0] {
            let b = lib(chebyshev_bounds(&stats, c))?;
            let oracle_upper = 1.0 / (1.0 + c * c * stats.product);
            close("upper", b.upper, oracle_upper, 1e-15)?;
            let above = lib(sep_continuous(&s, (1.0 + c) * stats.mean_hit))?;
            let below = lib(sep_continuous(&s, ((1.0 - c) * stats.mean_hit).max(0.0)))?;
            check(&format!("sep((1+c)t) <= upper at c = {c}"), above <= b.upper)?;
            check(&format!("sep((1-c)t) >= lower at c = {c}"), below >= b.lower)?;
        }
    }
    Ok(())
}

pub fn cutoff_exponential_arithmetic() -> CaseResult {
    let oracle = (-0.75f64).exp();
    close("oracle", oracle, 0.472_366_552_741_014_7, 1e-16)?;
    let stats = stats_with_product(4.0);
    close("printed, cN = 2", lib(exponential_bounds_as_printed(&stats, 0.5))?.upper, oracle, 1e-16)?;
    close("sqrt form, c√N = 2", lib(exponential_bounds(&stats, 1.0))?.upper, oracle, 1e-16)?;
    close("cN = 1/2 clamps", lib(exponential_bounds_as_printed(&stats, 0.125))?.upper, 1.0, 0.0)
}

pub fn cutoff_exponential_bernoulli_laplace() -> CaseResult {
    let s = lib(closed_form_spectrum(&FamilySpec::BernoulliLaplace { n: 10_000, r: 50 }))?;
    let stats = cutoff_stats(&s);
    let c = 0.5;
    let exact = lib(sep_continuous(&s, (1.0 + c) * stats.mean_hit))?;
    let printed = (-(c * stats.product - 0.5) / 2.0).exp().min(1.0);
    close("printed upper", lib(exponential_bounds_as_printed(&stats, c))?.upper, printed, 1e-15)?;
    check("exact sep <= printed bound", exact <= printed)?;
    check("exact sep <= sqrt-form bound", exact <= lib(exponential_bounds(&stats, c))?.upper)
}

pub fn cutoff_mixing_time_examples() -> CaseResult {
    close("{1}, 1/4", lib(mixing_time(&spec(&[1.0]), 0.25))?, 4.0f64.ln(), 1e-8)?;
    let t = std::f64::consts::LN_2;
    close("oracle", two_phase_tail(1.0, 2.0, t), 0.75, 1e-15)?;
    close("{1,2}, 3/4", lib(mixing_time(&spec(&[1.0, 2.0]), 0.75))?, t, 1e-8)
}

pub fn cutoff_mixing_bracket_property() -> CaseResult {
    for s in bound_test_spectra() {
        let stats = cutoff_stats(&s);
        let tau = lib(mixing_time(&s, 0.25))?;
        let lo = stats.mean_hit - stats.window / 3.0f64.sqrt();
        let hi = stats.mean_hit + 3.0f64.sqrt() * stats.window;
        let (blo, bhi) = lib(mixing_bracket(&stats, 0.25))?;
        close("bracket low", blo, lo, 1e-12 * hi)?;
        close("bracket high", bhi, hi, 1e-12 * hi)?;
        check(&format!("{lo} <= tau = {tau} <= {hi}"), lo <= tau && tau <= hi)?;
    }
    Ok(())
}

pub fn cutoff_profile_coupon_collector() -> CaseResult {
    let r = 500usize;
    let s = spec(&(1..=r).map(|i| i as f64 / r as f64).collect::<Vec<_>>());
    let grid = linear_grid(-3.0, 3.0, 61);
    let profile = lib(shape_profile(&s, &grid))?;
    // Σ E_i / i over i <= r has the law of the maximum of r unit exponentials,
    // so sep(r ln r + c r) = 1 - (1 - e^{-c}/r)^r exactly.
    for (i, &c) in grid.iter().enumerate() {
        let x = (-c).exp() / r as f64;
        let exact = if x >= 1.0 { 1.0 } else { -((r as f64) * (-x).ln_1p()).exp_m1() };
        close(&format!("c = {c}"), profile.log_centered_sep_values[i], exact, 1e-9)?;
    }
    check(
        &format!("Gumbel deviation {} < 0.02", profile.sup_deviation_gumbel_log_centered),
        profile.sup_deviation_gumbel_log_centered < 0.02,
    )
}

pub fn cutoff_profile_biased_walk() -> CaseResult {
    let s = lib(closed_form_spectrum(&FamilySpec::BiasedWalk { p: 0.7, n: 2000 }))?;
    let grid = linear_grid(-4.0, 4.0, 81);
    let profile = lib(shape_profile(&s, &grid))?;
    for (i, &c) in grid.iter().enumerate() {
        close("normal tail", profile.reference_gaussian[i], normal_tail_by_quadrature(c), 1e-10)?;
    }
    check(
        &format!("Gaussian deviation {} < 0.03", profile.sup_deviation_gaussian),
        profile.sup_deviation_gaussian < 0.03,
    )
}

pub fn all() -> Vec<Case> {
    macro_rules! cases {
        ($($f:ident),* $(,)?) => { vec![$(Case { name: stringify!($f), run: $f }),*] };
    }
    cases![
        chain_stationary_biased_two_state,
        chain_symmetrize_biased_two_state,
        chain_symmetrize_three_state,
        spectral_srw_four_states,
        spectral_random_chains_match_dense,
        spectral_q_subspace_small,
        hitting_single_exponential,
        hitting_two_phase,
        hitting_discrete_geometric,
        hitting_discrete_bernoulli_phase,
        hitting_discrete_matches_product_formula,
        hitting_lagrange_two_phase,
        hitting_lagrange_random_m20,
        hitting_moments,
        hitting_log_mgf_two_phase,
        hitting_log_mgf_envelope,
        hitting_theta_two_phase,
        distances_srw_two_steps,
        distances_two_state_continuous,
        distances_long_time_is_stationary,
        distances_spectral_matches_direct,
        distances_bernoulli_laplace_tv_below_sep,
        distances_l2_point_mass,
        distances_tv_below_half_l2,
        cutoff_stats_bernoulli_laplace,
        cutoff_stats_hamming,
        cutoff_chebyshev_arithmetic,
        cutoff_chebyshev_property,
        cutoff_exponential_arithmetic,
        cutoff_exponential_bernoulli_laplace,
        cutoff_mixing_time_examples,
        cutoff_mixing_bracket_property,
        cutoff_profile_coupon_collector,
        cutoff_profile_biased_walk,
    ]
}
