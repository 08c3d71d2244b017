//! Closed forms and summary statistics used to check the simulations.

use serde::Serialize;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::graph::WeightReport;

fn check_d(d: f64) -> Result<()> {
    if d > 0.0 && d < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("d must lie in (0, 1), got {d}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaSequence {
    pub d: f64,
    /// `values[k - 1]` is `alpha_k`.
    pub values: Vec<f64>,
}

impl AlphaSequence {
    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
}

/// `a_k(x, p) = d x^2 + k d (p^2 - x^2) - x`.
pub fn a_k(k: usize, d: f64, x: f64, p: f64) -> f64 {
    let k = k as f64;
    d * x * x + k * d * (p * p - x * x) - x
}

/// `alpha_1 = 1`, and `alpha_k` is the root of `a_k(x, alpha_{k-1})` in
/// `(0, alpha_{k-1})`.
///
/// The sequence decays doubly exponentially, so late terms underflow to 0.
pub fn alpha_sequence(d: f64, k_max: usize) -> Result<AlphaSequence> {
    check_d(d)?;
    if k_max == 0 {
        return Err(Error::InvalidParams("need at least one term".into()));
    }
    let mut values = vec![1.0];
    for k in 2..=k_max {
        let prev = values[k - 2];
        // (k - 1) d x^2 + x - k d prev^2 = 0; the positive root, written to
        // avoid cancellation.
        let a = (k - 1) as f64 * d;
        let c = k as f64 * d * prev * prev;
        let x = 2.0 * c / (1.0 + (1.0 + 4.0 * a * c).sqrt());
        debug_assert!(x < prev || prev == 0.0);
        values.push(x);
    }
    Ok(AlphaSequence { d, values })
}

/// `ln Gamma(t + d) - ln Gamma(t)`, accurate for large `t` where the two
/// log-gamma values nearly cancel.
fn ln_gamma_ratio(t: f64, d: f64) -> f64 {
    if t < 20.0 {
        return ln_gamma(t + d) - ln_gamma(t);
    }
    // Stirling series for both terms, with the leading parts combined.
    let series = |x: f64| {
        let x2 = x * x;
        (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x
    };
    (t - 0.5) * (d / t).ln_1p() + d * (t + d).ln() - d + series(t + d) - series(t)
}

/// `E[S_t] = Gamma(t + d) / (Gamma(d + 1) Gamma(t))`, the expected weight of
/// the first voter after `t` steps with one nomination per delegator and no
/// indegree bias.
pub fn expected_first_voter_weight(t: u64, d: f64) -> Result<f64> {
    check_d(d)?;
    if t == 0 {
        return Err(Error::InvalidParams("t must be at least 1".into()));
    }
    Ok((ln_gamma_ratio(t as f64, d) - ln_gamma(d + 1.0)).exp())
}

/// Gautschi's inequality around `E[S_t]`: `(t (t+1)^(d-1), t^d)`, both over
/// `Gamma(d + 1)`.
pub fn first_voter_bounds(t: u64, d: f64) -> Result<(f64, f64)> {
    check_d(d)?;
    let t = t as f64;
    let g = gamma(d + 1.0);
    Ok((t * (t + 1.0).powf(d - 1.0) / g, t.powf(d) / g))
}

/// `values[k - 1]` is the total weight of voters with weight at least `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FStatistic {
    pub values: Vec<u64>,
}

impl FStatistic {
    pub fn get(&self, k: usize) -> u64 {
        self.values[k - 1]
    }
}

pub fn f_statistic_from_weights(weights: impl IntoIterator<Item = u64>, k_max: usize) -> FStatistic {
    let mut values = vec![0u64; k_max];
    for w in weights {
        for v in values.iter_mut().take((w as usize).min(k_max)) {
            *v += w;
        }
    }
    FStatistic { values }
}

pub fn f_statistic(report: &WeightReport, k_max: usize) -> FStatistic {
    f_statistic_from_weights(report.voter_weights(), k_max)
}

/// Two-sample Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsTest {
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsTest {
    assert!(!a.is_empty() && !b.is_empty(), "samples must not be empty");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut stat: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        stat = stat.max((i as f64 / n - j as f64 / m).abs());
    }
    let en = (n * m / (n + m)).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * stat;
    KsTest {
        statistic: stat,
        p_value: kolmogorov_q(lambda),
    }
}

/// Survival function of the Kolmogorov distribution.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
