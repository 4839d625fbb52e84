// SPDX-License-Identifier: Apache-2.0

//! Small numerical helpers shared across modules.

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Truncated Poisson weights `P(N = k)` for `k` in `start..start + weights.len()`.
///
/// Both tails are dropped once their mass is provably below `tail_tol`; the
/// retained weights are renormalized to sum to one.
#[derive(Debug, Clone)]
pub struct PoissonWindow {
    pub start: usize,
    pub weights: Vec<f64>,
}

impl PoissonWindow {
    pub fn new(mean: f64, tail_tol: f64) -> Self {
        assert!(mean >= 0.0 && mean.is_finite(), "poisson mean must be finite and >= 0");
        if mean == 0.0 {
            return Self {
                start: 0,
                weights: vec![1.0],
            };
        }
        let mode = mean.floor() as usize;
        // Unnormalized weights relative to the mode; the mode weight is 1.
        let cutoff = tail_tol * 1e-4;
        let mut right = Vec::new();
        let mut w = 1.0f64;
        let mut k = mode;
        loop {
            k += 1;
            w *= mean / k as f64;
            right.push(w);
            let ratio = mean / (k + 1) as f64;
            if ratio < 1.0 && w / (1.0 - ratio) < cutoff {
                break;
            }
        }
        let mut left = Vec::new();
        let mut w = 1.0f64;
        let mut k = mode;
        while k > 0 {
            w *= k as f64 / mean;
            k -= 1;
            left.push(w);
            let ratio = k as f64 / mean;
            if ratio < 1.0 && w / (1.0 - ratio) < cutoff {
                break;
            }
        }
        let start = mode - left.len();
        let mut weights = Vec::with_capacity(left.len() + 1 + right.len());
        weights.extend(left.iter().rev());
        weights.push(1.0);
        weights.extend(right.iter());
        let total = compensated_sum(weights.iter().copied());
        for w in &mut weights {
            *w /= total;
        }
        Self { start, weights }
    }

    pub fn end(&self) -> usize {
        self.start + self.weights.len()
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Formats `x` with `digits` significant digits, `%g` style.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits.saturating_sub(1), x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Standard normal upper tail `1 - Φ(c)`.
pub fn normal_upper_tail(c: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(c / std::f64::consts::SQRT_2)
}

/// Gumbel upper tail `1 - exp(-e^{-c})`.
pub fn gumbel_upper_tail(c: f64) -> f64 {
    -(-(-c).exp()).exp_m1()
}
