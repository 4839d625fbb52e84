// SPDX-License-Identifier: Apache-2.0

//! Dense linear algebra, exact rational arithmetic and closed forms.

use bd_cutoff::BirthDeathChain;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Full transition matrix `K`.
pub fn transition_matrix(chain: &BirthDeathChain) -> DMatrix<f64> {
    let n = chain.num_states();
    let mut k = DMatrix::zeros(n, n);
    for x in 0..n {
        let (down, hold, up) = chain.row(x);
        k[(x, x)] = hold;
        if x > 0 {
            k[(x, x - 1)] = down;
        }
        if x + 1 < n {
            k[(x, x + 1)] = up;
        }
    }
    k
}

/// Eigenvalues of the nonsymmetric matrix `I - K` from a real Schur form,
/// ascending.
pub fn dense_eigenvalues(chain: &BirthDeathChain) -> Vec<f64> {
    let k = transition_matrix(chain);
    let n = k.nrows();
    let a = DMatrix::identity(n, n) - k;
    let mut ev: Vec<f64> = a
        .schur()
        .eigenvalues()
        .expect("I - K is similar to a symmetric matrix")
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a symmetric tridiagonal matrix from a dense symmetric solver.
pub fn dense_symmetric_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = diag[i];
        if i + 1 < n {
            a[(i, i + 1)] = off[i];
            a[(i + 1, i)] = off[i];
        }
    }
    let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Row `start` of `K^k`.
pub fn dense_power_row(chain: &BirthDeathChain, start: usize, k: u32) -> Vec<f64> {
    let m = transition_matrix(chain);
    let p = m.pow(k);
    p.row(start).iter().copied().collect()
}

/// Row `start` of `exp(t (K - I))`.
pub fn dense_continuous_row(chain: &BirthDeathChain, start: usize, t: f64) -> Vec<f64> {
    let k = transition_matrix(chain);
    let n = k.nrows();
    let g = (k - DMatrix::identity(n, n)) * t;
    g.exp().row(start).iter().copied().collect()
}

/// Stationary law from `ν (K - I) = 0`, `Σ ν = 1` by an LU solve.
pub fn stationary_by_solve(chain: &BirthDeathChain) -> Vec<f64> {
    let k = transition_matrix(chain);
    let n = k.nrows();
    let mut a = (k - DMatrix::identity(n, n)).transpose();
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    a.lu().solve(&b).expect("irreducible chain").iter().copied().collect()
}

pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("representable")
}

/// `Σ_i ∏_{j≠i} λ_j/(λ_j - λ_i) (1 - λ_i)^k` exactly.
pub fn rational_discrete_tail(lambdas: &[BigRational], k: u32) -> BigRational {
    let mut total = BigRational::zero();
    for (i, li) in lambdas.iter().enumerate() {
        let mut coeff = BigRational::one();
        for (j, lj) in lambdas.iter().enumerate() {
            if i != j {
                coeff *= lj / (lj - li);
            }
        }
        let theta = BigRational::one() - li;
        total += coeff * num_traits::pow(theta, k as usize);
    }
    total
}

/// Coefficients `∏_{j≠i} λ_j/(λ_j - λ_i)` exactly.
pub fn rational_lagrange_coefficients(lambdas: &[BigRational]) -> Vec<BigRational> {
    (0..lambdas.len())
        .map(|i| {
            let mut c = BigRational::one();
            for (j, lj) in lambdas.iter().enumerate() {
                if i != j {
                    c *= lj / (lj - &lambdas[i]);
                }
            }
            c
        })
        .collect()
}

/// Exact law of `T` in discrete time by convolving geometric phases with
/// rational arithmetic; only phases with `λ ∈ (0, 1]` are allowed.
pub fn rational_geometric_tail(lambdas: &[BigRational], k: usize) -> BigRational {
    let mut pmf = vec![BigRational::zero(); k + 1];
    pmf[0] = BigRational::one();
    for l in lambdas {
        assert!(l.is_positive() && *l <= BigRational::one());
        let theta = BigRational::one() - l;
        let mut next = vec![BigRational::zero(); k + 1];
        for n in 1..=k {
            next[n] = &theta * &next[n - 1] + l * &pmf[n - 1];
        }
        pmf = next;
    }
    BigRational::one() - pmf.iter().fold(BigRational::zero(), |a, b| a + b)
}

/// `P(S_1 + S_2 > t)` for independent exponentials with distinct rates.
pub fn two_phase_tail(l1: f64, l2: f64, t: f64) -> f64 {
    (l2 * (-l1 * t).exp() - l1 * (-l2 * t).exp()) / (l2 - l1)
}

/// `max_x (1 - dist(x)/ν(x))` written out independently.
pub fn separation(dist: &[f64], nu: &[f64]) -> f64 {
    dist.iter()
        .zip(nu)
        .map(|(d, v)| 1.0 - d / v)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Standard normal upper tail by Simpson integration of the density on
/// `[c, c + 12]`, independent of any erf implementation.
pub fn normal_tail_by_quadrature(c: f64) -> f64 {
    if c < 0.0 {
        return 1.0 - normal_tail_by_quadrature(-c);
    }
    let n = 4000;
    let h = 12.0 / n as f64;
    let f = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = f(c) + f(c + 12.0);
    for i in 1..n {
        let x = c + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}
