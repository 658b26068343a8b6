//! Ground truth: exact entropies, closed-form estimator expectations and
//! biases, and exhaustive multinomial enumeration.
//!
//! For one box with mean occupation `z = pN`, the binomial-regime identity is
//!
//! ```text
//! E[n G_n(a)] = z ln z + z[ψ(N) − ln N] + z ∫_0^{1−(1+a)z/N} x^(N−1)/(1−x) dx
//! ```
//!
//! so the remainder integral vanishes at `a* = (1 − p)/p` and the estimator
//! `ψ(N) − (1/N) Σ n_i G_{n_i}(a_i*)` is unbiased.

mod enumerate;

use serde::Serialize;

pub use enumerate::{enumerate_moments, enumerate_moments_with, outcome_count, EnumerationOptions};

use crate::error::{Error, Result};
use crate::estimators::ParamVector;
use crate::quadrature::{integrate, Tolerance};
use crate::special_fn::{digamma, exp_integral_e1};

/// Upper limits of the remainder integral within this distance below zero
/// are treated as zero (round-off in `(1 + a*) p`).
const UPPER_LIMIT_SLACK: f64 = 1e-12;

/// Exact box weights `p_1..p_M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    p: Vec<f64>,
}

impl Distribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::domain("distribution needs at least one box"));
        }
        if let Some((i, v)) = p
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::domain(format!(
                "p[{i}] = {v} is not a positive weight"
            )));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("weights sum to {total}, not 1")));
        }
        Ok(Distribution { p })
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Expected occupations `z_i = p_i N`.
    pub fn expected_counts(&self, n: u64) -> Vec<f64> {
        self.p.iter().map(|p| p * n as f64).collect()
    }

    pub fn check_aligned(&self, a: &ParamVector) -> Result<()> {
        a.check_aligned(self.len())
    }
}

/// Exact, zero-variance summary of an estimator over all outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub mean_nats: f64,
    pub variance_nats2: f64,
    pub bias_nats: f64,
    pub outcome_count: u64,
}

impl MomentReport {
    pub fn mean_bits(&self) -> f64 {
        self.mean_nats / std::f64::consts::LN_2
    }

    pub fn variance_bits2(&self) -> f64 {
        self.variance_nats2 / (std::f64::consts::LN_2 * std::f64::consts::LN_2)
    }

    pub fn bias_bits(&self) -> f64 {
        self.bias_nats / std::f64::consts::LN_2
    }
}

/// `H = −Σ p_i ln p_i` in nats.
pub fn exact_entropy(d: &Distribution) -> f64 {
    -d.p.iter().map(|&p| p * p.ln()).sum::<f64>()
}

/// Bias-optimal parameter `a* = (1 − p)/p`.
pub fn optimal_a(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!(
            "optimal_a requires 0 < p <= 1, got {p}"
        )));
    }
    Ok((1.0 - p) / p)
}

/// `a_i* = (1 − p_i)/p_i` for every box.
pub fn optimal_params(d: &Distribution) -> ParamVector {
    ParamVector::new(d.p.iter().map(|&p| (1.0 - p) / p).collect())
        .expect("weights in (0, 1] give finite non-negative parameters")
}

fn check_binomial_args(z: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("N must be >= 1"));
    }
    if !(z > 0.0 && z < n as f64) {
        return Err(Error::domain(format!(
            "need 0 < z < N, got z = {z}, N = {n}"
        )));
    }
    Ok(z / n as f64)
}

/// `Σ_{n=0}^{N} f(n) C(N,n) p^n (1−p)^(N−n)` with `p = z/N`.
///
/// Weights come from a log-space recurrence; outcomes whose weight underflows
/// to zero are skipped without evaluating `f`.
pub fn binomial_expectation<F>(f: F, z: f64, n: u64) -> Result<f64>
where
    F: Fn(u64) -> f64,
{
    let p = check_binomial_args(z, n)?;
    let log_odds = p.ln() - (-p).ln_1p();
    let mut log_w = n as f64 * (-p).ln_1p();
    let mut sum = 0.0;
    let mut carry = 0.0;
    for k in 0..=n {
        if k > 0 {
            log_w += ((n - k + 1) as f64 / k as f64).ln() + log_odds;
        }
        let w = log_w.exp();
        if w == 0.0 {
            continue;
        }
        let fk = f(k);
        let term = w * fk;
        if !term.is_finite() {
            return Err(Error::Numerical(format!(
                "f({k}) = {fk} at binomial weight {w:e}"
            )));
        }
        let t = sum + term;
        carry += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;
    }
    Ok(sum + carry)
}

/// `∫_0^u x^(N−1)/(1−x) dx` for `0 ≤ u < 1`.
pub fn remainder_integral(n: u64, u: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::domain(format!(
            "remainder upper limit {u} is negative"
        )));
    }
    if u > 1.0 - 1e-15 {
        return Err(Error::domain(format!(
            "remainder upper limit {u} too close to the singularity at 1"
        )));
    }
    remainder_from_gap(n, 1.0 - u)
}

/// The remainder integral with upper limit `1 − gap`, by `v = ln(1 − x)`:
/// `∫_{ln gap}^0 (1 − e^v)^(N−1) dv`. The integrand is smooth and monotone,
/// whereas in `x` all the mass of a large-`N` integral sits in a spike of
/// width `1/N` below the upper limit.
fn remainder_from_gap(n: u64, gap: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("N must be >= 1"));
    }
    if gap >= 1.0 {
        return Ok(0.0);
    }
    if n == 1 {
        return Ok(-gap.ln());
    }
    let power = (n - 1) as f64;
    let tol = Tolerance::absolute(1e-15).with_rel(1e-13);
    let f = |v: f64| (power * (-v.exp()).ln_1p()).exp();
    Ok(integrate(f, gap.ln(), 0.0, tol)?.value)
}

/// `1 − u` for the upper limit `u = 1 − (1+a)z/N`, computed without
/// cancellation and clamped to at most 1.
fn limit_gap(z: f64, n: u64, a: f64) -> Result<f64> {
    let gap = (1.0 + a) * z / n as f64;
    if gap > 1.0 + UPPER_LIMIT_SLACK {
        return Err(Error::domain(format!(
            "a = {a} exceeds the bias-optimal value {} for z = {z}, N = {n}",
            (n as f64 - z) / z
        )));
    }
    if gap < 1e-15 {
        return Err(Error::domain(format!(
            "remainder upper limit too close to the singularity at 1 (gap {gap:e})"
        )));
    }
    Ok(gap.min(1.0))
}

/// Closed form of `E_{N,z}[n G_n(a)]` in the binomial regime.
pub fn expectation_ng(z: f64, n: u64, a: f64) -> Result<f64> {
    check_binomial_args(z, n)?;
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("a must be finite and >= 0, got {a}")));
    }
    let gap = limit_gap(z, n, a)?;
    let lead = z * z.ln() + z * (digamma(n)? - (n as f64).ln());
    Ok(lead + z * remainder_from_gap(n, gap)?)
}

/// `z E_1((1+a) z)`: the Poisson-regime term the Schürmann estimator drops.
pub fn poisson_bias_term(z: f64, a: f64) -> Result<f64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain(format!("z must be > 0, got {z}")));
    }
    if !(a >= 0.0) {
        return Err(Error::domain(format!("a must be >= 0, got {a}")));
    }
    if a == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(z * exp_integral_e1((1.0 + a) * z)?)
}

/// `E[Ĥ_opt] − H` for the binomial-regime estimator, from the closed form.
/// Non-positive, and zero when every `a_i = a_i*`.
pub fn exact_estimator_bias(d: &Distribution, n: u64, a: &ParamVector) -> Result<f64> {
    d.check_aligned(a)?;
    if n == 0 {
        return Err(Error::domain("N must be >= 1"));
    }
    let mut total = 0.0;
    for (&p, &ai) in d.p.iter().zip(a.values()) {
        let z = p * n as f64;
        let gap = limit_gap(z, n, ai)?;
        total += z * remainder_from_gap(n, gap)?;
    }
    Ok(-total / n as f64)
}
