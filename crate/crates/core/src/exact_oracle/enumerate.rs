//! Exhaustive enumeration of multinomial outcomes.
//!
//! Estimator values and outcome probabilities are built from exactly
//! converted inputs in extended-precision binary floating point, and all
//! moments are accumulated at that precision. With `a_i > 1` the per-outcome
//! values of the `G`-based estimators grow like `a_i^{n_i}` with alternating
//! sign, and the exact mean is the small residue of a massive cancellation
//! that double precision cannot resolve.
//!
//! The Euler constant never enters the extended-precision path: `ψ(n)` is
//! carried as the harmonic number `H_(n−1)`, which cancels `γ` against the
//! `ψ(N)` leading term, and the `ln N` leading term picks up `+γ` as an exact
//! per-outcome constant added at the end.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

use super::{Distribution, MomentReport};
use crate::error::{Error, Result};
use crate::estimators::{EstimatorConfig, LeadingTerm};
use crate::special_fn::EULER_GAMMA;

type Big = FBig<HalfEven, 2>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Refuse when the number of compositions exceeds this.
    pub max_outcomes: u128,
    /// Working precision in bits.
    pub precision_bits: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            max_outcomes: 10_000_000,
            precision_bits: 256,
        }
    }
}

/// Number of compositions of `n` into `boxes` parts, `C(n + M − 1, M − 1)`,
/// saturating at `u128::MAX`.
pub fn outcome_count(n: u64, boxes: usize) -> u128 {
    if boxes == 0 {
        return 0;
    }
    let k = (boxes - 1) as u128;
    let top = n as u128 + k;
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc = C(top − k + i, i), exact at every step
        let num = top - k + i;
        match acc.checked_mul(num) {
            Some(v) => acc = v / i,
            None => return u128::MAX,
        }
    }
    acc
}

struct Precision(usize);

impl Precision {
    fn of_f64(&self, x: f64) -> Big {
        Big::try_from(x)
            .expect("finite input")
            .with_precision(self.0)
            .value()
    }

    fn of_u64(&self, x: u64) -> Big {
        Big::from(x).with_precision(self.0).value()
    }
}

/// Per-box tables: `weight[k] = p^k / k!` and `correction[k] = k φ̃(k)`.
struct BoxTables {
    weight: Vec<Big>,
    correction: Vec<Big>,
}

fn correction_table(prec: &Precision, cfg: &EstimatorConfig, a: Option<f64>, n: u64) -> Vec<Big> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(prec.of_u64(0));
    match cfg {
        EstimatorConfig::Naive => {
            for k in 1..=n {
                out.push(prec.of_u64(k) * prec.of_u64(k).ln());
            }
        }
        EstimatorConfig::Grassberger { .. } | EstimatorConfig::Schuermann { .. } => {
            let a = prec.of_f64(a.unwrap_or(1.0));
            let one = prec.of_u64(1);
            // harmonic = H_(k−1), g = g_k(a)
            let mut harmonic = prec.of_u64(0);
            let mut g = -(&one + &a).ln();
            let mut power = one.clone();
            for k in 1..=n {
                if k > 1 {
                    let prev = prec.of_u64(k - 1);
                    harmonic += &one / &prev;
                    power *= &a;
                    let term = &power / &prev;
                    g = if (k - 1) % 2 == 1 { g + term } else { g - term };
                }
                out.push(prec.of_u64(k) * (&harmonic + &g));
            }
        }
    }
    out
}

struct Accumulator {
    mass: Big,
    first: Big,
    second: Big,
    outcomes: u64,
}

fn walk(
    tables: &[BoxTables],
    depth: usize,
    remaining: usize,
    weight: &Big,
    correction: &Big,
    acc: &mut Accumulator,
) {
    let t = &tables[depth];
    if depth + 1 == tables.len() {
        let w = weight * &t.weight[remaining];
        let s = correction + &t.correction[remaining];
        let ws = &w * &s;
        acc.second = &acc.second + &ws * &s;
        acc.first = &acc.first + ws;
        acc.mass = &acc.mass + w;
        acc.outcomes += 1;
        return;
    }
    for k in 0..=remaining {
        let w = weight * &t.weight[k];
        let s = correction + &t.correction[k];
        walk(tables, depth + 1, remaining - k, &w, &s, acc);
    }
}

/// Exact mean, variance and bias of `estimator` over every multinomial
/// outcome of `n` draws from `d`, with default options.
pub fn enumerate_moments(
    d: &Distribution,
    n: u64,
    estimator: &EstimatorConfig,
) -> Result<MomentReport> {
    enumerate_moments_with(d, n, estimator, &EnumerationOptions::default())
}

pub fn enumerate_moments_with(
    d: &Distribution,
    n: u64,
    estimator: &EstimatorConfig,
    opts: &EnumerationOptions,
) -> Result<MomentReport> {
    if n == 0 {
        return Err(Error::domain("N must be >= 1"));
    }
    if let Some(a) = estimator.params() {
        d.check_aligned(a)?;
    }
    let outcomes = outcome_count(n, d.len());
    if outcomes > opts.max_outcomes {
        return Err(Error::BudgetExceeded {
            outcomes,
            budget: opts.max_outcomes,
        });
    }
    let prec = Precision(opts.precision_bits.max(64));

    // Renormalize so the enumerated probabilities sum to one exactly.
    let raw: Vec<Big> = d.probs().iter().map(|&p| prec.of_f64(p)).collect();
    let norm = raw.iter().fold(prec.of_u64(0), |s, p| s + p);
    let probs: Vec<Big> = raw.iter().map(|p| p / &norm).collect();

    let tables: Vec<BoxTables> = probs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut weight = Vec::with_capacity(n as usize + 1);
            let mut w = prec.of_u64(1);
            weight.push(w.clone());
            for k in 1..=n {
                w = w * p / prec.of_u64(k);
                weight.push(w.clone());
            }
            let a = estimator.params().map(|a| a.values()[i]);
            BoxTables {
                weight,
                correction: correction_table(&prec, estimator, a, n),
            }
        })
        .collect();

    let mut n_factorial = prec.of_u64(1);
    for k in 2..=n {
        n_factorial *= prec.of_u64(k);
    }

    let mut acc = Accumulator {
        mass: prec.of_u64(0),
        first: prec.of_u64(0),
        second: prec.of_u64(0),
        outcomes: 0,
    };
    walk(
        &tables,
        0,
        n as usize,
        &n_factorial,
        &prec.of_u64(0),
        &mut acc,
    );

    let mass = acc.mass.to_f64().value();
    if (mass - 1.0).abs() > 1e-10 {
        return Err(Error::Numerical(format!(
            "enumerated probabilities sum to {mass}"
        )));
    }

    // Estimator value per outcome: lead − S/N (+ γ for the ln N lead).
    let big_n = prec.of_u64(n);
    let lead = match estimator {
        EstimatorConfig::Naive => big_n.ln(),
        _ => match estimator.leading_term() {
            LeadingTerm::LogN => big_n.ln(),
            LeadingTerm::PsiN => {
                let one = prec.of_u64(1);
                (1..n).fold(prec.of_u64(0), |h, k| h + &one / prec.of_u64(k))
            }
        },
    };
    let gamma_shift = match estimator {
        EstimatorConfig::Naive => 0.0,
        _ if estimator.leading_term() == LeadingTerm::LogN => EULER_GAMMA,
        _ => 0.0,
    };
    let mean_s = &acc.first / &acc.mass;
    let var_s = &acc.second / &acc.mass - &mean_s * &mean_s;
    let mean = &lead - &mean_s / &big_n;
    let variance = var_s / (&big_n * &big_n);

    let entropy = probs.iter().fold(prec.of_u64(0), |h, p| h - p * p.ln());
    let bias = (&mean - &entropy).to_f64().value() + gamma_shift;

    Ok(MomentReport {
        mean_nats: mean.to_f64().value() + gamma_shift,
        variance_nats2: variance.to_f64().value().max(0.0),
        bias_nats: bias,
        outcome_count: acc.outcomes,
    })
}
