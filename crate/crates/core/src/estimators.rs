//! Point estimators of Shannon entropy from occupation numbers.
//!
//! All estimators share the shape
//!
//! ```text
//! Ĥ = L(N) − (1/N) Σ_{n_i > 0} n_i φ_i(n_i)
//! ```
//!
//! with leading term `L(N) ∈ {ln N, ψ(N)}` and per-box correction `φ_i`:
//! `ln n` for the plug-in estimator, `G_n` for Grassberger's estimator and
//! `G_n(a_i)` for the generalized Schürmann estimator. Empty boxes never
//! contribute and their parameters are never read.
//!
//! Math is done in nats; [`EntropyEstimate`] carries bits alongside.

use std::f64::consts::LN_2;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special_fn::{big_g_a, big_g_a_table, digamma};

/// Observed occupation numbers `n_1..n_M` with total `N ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CountVector {
    counts: Vec<u64>,
    total: u64,
}

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        let total = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::domain("total count overflows u64"))?;
        if total == 0 {
            return Err(Error::domain(
                "count vector needs at least one positive count",
            ));
        }
        Ok(CountVector { counts, total })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of boxes `M`, including empty ones.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Nonzero boxes as `(box index, count)`.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, n)| n > 0)
    }
}

/// Per-box parameters `a_1..a_M`, aligned positionally with a [`CountVector`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = a
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::domain(format!(
                "a[{i}] = {v} is not a finite value >= 0"
            )));
        }
        Ok(ParamVector(a))
    }

    /// `a_i = value` for `len` boxes.
    pub fn uniform(len: usize, value: f64) -> Result<Self> {
        ParamVector::new(vec![value; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn check_aligned(&self, boxes: usize) -> Result<()> {
        if self.0.len() == boxes {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                what: "parameter vector",
                got: self.0.len(),
                expected: boxes,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    Naive,
    Grassberger,
    SchuermannPoisson,
    SchuermannBinomial,
    Phi,
}

impl EstimatorId {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorId::Naive => "naive",
            EstimatorId::Grassberger => "grassberger",
            EstimatorId::SchuermannPoisson => "schuermann_poisson",
            EstimatorId::SchuermannBinomial => "schuermann_binomial",
            EstimatorId::Phi => "phi",
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LeadingTerm {
    LogN,
    PsiN,
}

impl LeadingTerm {
    pub fn as_str(&self) -> &'static str {
        match self {
            LeadingTerm::LogN => "log_N",
            LeadingTerm::PsiN => "psi_N",
        }
    }

    pub fn eval(&self, total: u64) -> Result<f64> {
        match self {
            LeadingTerm::LogN => Ok((total as f64).ln()),
            LeadingTerm::PsiN => digamma(total),
        }
    }
}

impl fmt::Display for LeadingTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which limit the Schürmann correction was derived in; fixes the leading term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `ln N` leading term.
    Poisson,
    /// `ψ(N)` leading term; exactly unbiased at `a_i = (1 − p_i)/p_i`.
    Binomial,
}

impl Regime {
    pub fn leading_term(&self) -> LeadingTerm {
        match self {
            Regime::Poisson => LeadingTerm::LogN,
            Regime::Binomial => LeadingTerm::PsiN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub value_nats: f64,
    pub value_bits: f64,
    pub estimator_id: EstimatorId,
    pub leading_term: LeadingTerm,
}

impl EntropyEstimate {
    fn new(value_nats: f64, estimator_id: EstimatorId, leading_term: LeadingTerm) -> Self {
        EntropyEstimate {
            value_nats,
            value_bits: value_nats / LN_2,
            estimator_id,
            leading_term,
        }
    }
}

fn assemble(
    c: &CountVector,
    leading: LeadingTerm,
    mut term: impl FnMut(usize, u64) -> Result<f64>,
) -> Result<f64> {
    let mut sum = 0.0;
    for (i, n) in c.occupied() {
        sum += n as f64 * term(i, n)?;
    }
    let value = leading.eval(c.total())? - sum / c.total() as f64;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numerical(format!(
            "estimate is not finite (correction sum {sum:e})"
        )))
    }
}

/// Plug-in estimator `ln N − (1/N) Σ n_i ln n_i`.
pub fn naive_entropy(c: &CountVector) -> EntropyEstimate {
    let value = assemble(c, LeadingTerm::LogN, |_, n| Ok((n as f64).ln()))
        .expect("plug-in estimator is finite for valid counts");
    EntropyEstimate::new(value, EstimatorId::Naive, LeadingTerm::LogN)
}

/// Generic ansatz `ln N − (1/N) Σ n_i φ(n_i)`. A non-finite `φ(n_i)` is
/// reported against the box it occurred in.
pub fn phi_entropy<F>(c: &CountVector, phi: F) -> Result<EntropyEstimate>
where
    F: Fn(u64) -> f64,
{
    let value = assemble(c, LeadingTerm::LogN, |i, n| {
        let v = phi(n);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::BoxOverflow {
                box_index: i,
                count: n,
                a: f64::NAN,
                reason: format!("phi({n}) = {v}"),
            })
        }
    })?;
    Ok(EntropyEstimate::new(
        value,
        EstimatorId::Phi,
        LeadingTerm::LogN,
    ))
}

fn box_overflow(i: usize, n: u64, a: f64) -> Error {
    Error::BoxOverflow {
        box_index: i,
        count: n,
        a,
        reason: format!("G_{n}({a}) is not representable"),
    }
}

/// Generalized Schürmann estimator `L(N) − (1/N) Σ n_i G_{n_i}(a_i)`.
pub fn schuermann_entropy(
    c: &CountVector,
    a: &ParamVector,
    regime: Regime,
) -> Result<EntropyEstimate> {
    a.check_aligned(c.len())?;
    let leading = regime.leading_term();
    let value = assemble(c, leading, |i, n| {
        let ai = a.values()[i];
        big_g_a(n, ai).map_err(|e| {
            if e.is_overflow() {
                box_overflow(i, n, ai)
            } else {
                e
            }
        })
    })?;
    let id = match regime {
        Regime::Poisson => EstimatorId::SchuermannPoisson,
        Regime::Binomial => EstimatorId::SchuermannBinomial,
    };
    Ok(EntropyEstimate::new(value, id, leading))
}

/// Grassberger's estimator, `a_i ≡ 1`, with a selectable leading term.
pub fn grassberger_entropy(c: &CountVector, leading: LeadingTerm) -> Result<EntropyEstimate> {
    let value = assemble(c, leading, |_, n| big_g_a(n, 1.0))?;
    Ok(EntropyEstimate::new(
        value,
        EstimatorId::Grassberger,
        leading,
    ))
}

/// A closed, serializable description of an estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "estimator", rename_all = "snake_case")]
pub enum EstimatorConfig {
    Naive,
    Grassberger { leading_term: LeadingTerm },
    Schuermann { a: ParamVector, regime: Regime },
}

impl EstimatorConfig {
    pub fn id(&self) -> EstimatorId {
        match self {
            EstimatorConfig::Naive => EstimatorId::Naive,
            EstimatorConfig::Grassberger { .. } => EstimatorId::Grassberger,
            EstimatorConfig::Schuermann {
                regime: Regime::Poisson,
                ..
            } => EstimatorId::SchuermannPoisson,
            EstimatorConfig::Schuermann {
                regime: Regime::Binomial,
                ..
            } => EstimatorId::SchuermannBinomial,
        }
    }

    pub fn leading_term(&self) -> LeadingTerm {
        match self {
            EstimatorConfig::Naive => LeadingTerm::LogN,
            EstimatorConfig::Grassberger { leading_term } => *leading_term,
            EstimatorConfig::Schuermann { regime, .. } => regime.leading_term(),
        }
    }

    pub fn params(&self) -> Option<&ParamVector> {
        match self {
            EstimatorConfig::Schuermann { a, .. } => Some(a),
            _ => None,
        }
    }

    pub fn evaluate(&self, c: &CountVector) -> Result<EntropyEstimate> {
        match self {
            EstimatorConfig::Naive => Ok(naive_entropy(c)),
            EstimatorConfig::Grassberger { leading_term } => grassberger_entropy(c, *leading_term),
            EstimatorConfig::Schuermann { a, regime } => schuermann_entropy(c, a, *regime),
        }
    }

    /// Tabulate the per-box corrections for every total up to `n_max`.
    pub fn prepare(&self, boxes: usize, n_max: u64) -> Result<PreparedEstimator> {
        let per_box = match self {
            EstimatorConfig::Naive => {
                let t: Vec<f64> = (1..=n_max).map(|n| (n as f64).ln()).collect();
                vec![t; boxes]
            }
            EstimatorConfig::Grassberger { .. } => {
                let t = big_g_a_table(1.0, n_max)?;
                vec![t; boxes]
            }
            EstimatorConfig::Schuermann { a, .. } => {
                a.check_aligned(boxes)?;
                a.values()
                    .iter()
                    .map(|&ai| big_g_a_table(ai, n_max))
                    .collect::<Result<_>>()?
            }
        };
        let leading = (1..=n_max)
            .map(|n| self.leading_term().eval(n))
            .collect::<Result<_>>()?;
        Ok(PreparedEstimator {
            config: self.clone(),
            per_box,
            leading,
        })
    }
}

/// An [`EstimatorConfig`] with its correction tables precomputed, for
/// evaluating many count vectors with the same box layout and bounded total.
#[derive(Debug, Clone)]
pub struct PreparedEstimator {
    config: EstimatorConfig,
    per_box: Vec<Vec<f64>>,
    leading: Vec<f64>,
}

impl PreparedEstimator {
    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    /// Estimate in nats; identical to `config().evaluate(c)` whenever the
    /// tables cover `c`.
    pub fn evaluate_nats(&self, c: &CountVector) -> Result<f64> {
        if c.len() != self.per_box.len() {
            return Err(Error::LengthMismatch {
                what: "count vector",
                got: c.len(),
                expected: self.per_box.len(),
            });
        }
        let total = c.total();
        if total as usize > self.leading.len() {
            return self.config.evaluate(c).map(|e| e.value_nats);
        }
        let mut sum = 0.0;
        for (i, n) in c.occupied() {
            let g = self.per_box[i][(n - 1) as usize];
            if !g.is_finite() {
                let a = self.config.params().map_or(1.0, |p| p.values()[i]);
                return Err(box_overflow(i, n, a));
            }
            sum += n as f64 * g;
        }
        let value = self.leading[(total - 1) as usize] - sum / total as f64;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Numerical(format!(
                "estimate is not finite (correction sum {sum:e})"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::{big_g, EULER_GAMMA};

    fn cv(c: &[u64]) -> CountVector {
        CountVector::new(c.to_vec()).unwrap()
    }

    fn pv(a: &[f64]) -> ParamVector {
        ParamVector::new(a.to_vec()).unwrap()
    }

    #[test]
    fn count_vector_invariants() {
        assert!(CountVector::new(vec![0, 0]).is_err());
        assert!(CountVector::new(vec![]).is_err());
        assert!(CountVector::new(vec![u64::MAX, 1]).is_err());
        let c = cv(&[2, 0, 1]);
        assert_eq!(c.total(), 3);
        assert_eq!(c.occupied().collect::<Vec<_>>(), vec![(0, 2), (2, 1)]);
    }

    #[test]
    fn param_vector_rejects_negative_and_nan() {
        assert!(ParamVector::new(vec![1.0, -0.5]).is_err());
        assert!(ParamVector::new(vec![f64::NAN]).is_err());
        assert!(ParamVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn naive_examples() {
        assert_eq!(naive_entropy(&cv(&[3, 0])).value_nats, 0.0);
        let v = naive_entropy(&cv(&[2, 1])).value_nats;
        assert!((v - (3f64.ln() - 2.0 / 3.0 * LN_2)).abs() < 1e-15);
        assert!((v - 0.636_514_168_3).abs() < 1e-10);
        let u = naive_entropy(&cv(&[1, 1, 1]));
        assert!((u.value_nats - 3f64.ln()).abs() < 1e-15);
        assert!((u.value_bits - 3f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn phi_examples() {
        let c = cv(&[2, 1]);
        let with_ln = phi_entropy(&c, |n| (n as f64).ln()).unwrap();
        assert_eq!(with_ln.value_nats, naive_entropy(&c).value_nats);
        let with_g = phi_entropy(&c, |n| big_g(n).unwrap()).unwrap().value_nats;
        let expected = 3f64.ln() - (2.0 * big_g(2).unwrap() + big_g(1).unwrap()) / 3.0;
        assert!((with_g - expected).abs() < 1e-15);
        assert_eq!(phi_entropy(&c, |_| 0.0).unwrap().value_nats, 3f64.ln());
    }

    #[test]
    fn phi_overflow_names_box() {
        let err =
            phi_entropy(&cv(&[0, 4]), |n| if n > 3 { f64::INFINITY } else { 0.0 }).unwrap_err();
        assert!(matches!(
            err,
            Error::BoxOverflow {
                box_index: 1,
                count: 4,
                ..
            }
        ));
    }

    #[test]
    fn schuermann_examples() {
        let ones = pv(&[1.0, 1.0]);
        let v = schuermann_entropy(&cv(&[2, 1]), &ones, Regime::Binomial).unwrap();
        assert!((v.value_nats - (LN_2 + 1.0 / 6.0)).abs() < 1e-14);
        assert!((v.value_nats - 0.859_813_8).abs() < 1e-7);
        assert_eq!(v.leading_term, LeadingTerm::PsiN);
        let w = schuermann_entropy(&cv(&[3, 0]), &ones, Regime::Binomial).unwrap();
        assert!((w.value_nats - (LN_2 - 0.5)).abs() < 1e-14);
        let p = schuermann_entropy(&cv(&[2, 1]), &ones, Regime::Poisson).unwrap();
        let g = grassberger_entropy(&cv(&[2, 1]), LeadingTerm::LogN).unwrap();
        assert_eq!(p.value_nats, g.value_nats);
    }

    #[test]
    fn grassberger_examples() {
        let a = grassberger_entropy(&cv(&[2, 1]), LeadingTerm::PsiN).unwrap();
        assert!((a.value_nats - (LN_2 + 1.0 / 6.0)).abs() < 1e-14);
        let b = grassberger_entropy(&cv(&[2, 1]), LeadingTerm::LogN).unwrap();
        let expected = 3f64.ln() - (2.0 * big_g(2).unwrap() + big_g(1).unwrap()) / 3.0;
        assert!((b.value_nats - expected).abs() < 1e-15);
        let c = grassberger_entropy(&cv(&[1, 1]), LeadingTerm::PsiN).unwrap();
        assert!((c.value_nats - (1.0 + LN_2)).abs() < 1e-14);
        assert!((big_g(1).unwrap() + EULER_GAMMA + LN_2).abs() < 1e-15);
    }

    #[test]
    fn misaligned_params_are_rejected() {
        let err = schuermann_entropy(&cv(&[1, 1]), &pv(&[1.0]), Regime::Binomial).unwrap_err();
        assert!(matches!(
            err,
            Error::LengthMismatch {
                got: 1,
                expected: 2,
                ..
            }
        ));
    }

    #[test]
    fn overflow_names_box() {
        let err =
            schuermann_entropy(&cv(&[1, 900]), &pv(&[1.0, 3.0]), Regime::Binomial).unwrap_err();
        assert!(
            matches!(
                err,
                Error::BoxOverflow {
                    box_index: 1,
                    count: 900,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn empty_box_parameters_are_never_read() {
        // An overflowing parameter on an empty box is harmless.
        let c = cv(&[5, 0]);
        let v = schuermann_entropy(&c, &pv(&[0.5, 1e300]), Regime::Binomial).unwrap();
        let w = schuermann_entropy(&cv(&[5]), &pv(&[0.5]), Regime::Binomial).unwrap();
        assert_eq!(v.value_nats, w.value_nats);
    }

    #[test]
    fn prepared_matches_direct() {
        let configs = [
            EstimatorConfig::Naive,
            EstimatorConfig::Grassberger {
                leading_term: LeadingTerm::PsiN,
            },
            EstimatorConfig::Schuermann {
                a: pv(&[0.6, 2.5, 7.0]),
                regime: Regime::Binomial,
            },
            EstimatorConfig::Schuermann {
                a: pv(&[0.0, 1.0, 0.3]),
                regime: Regime::Poisson,
            },
        ];
        let vectors = [
            cv(&[2, 0, 0]),
            cv(&[1, 1, 0]),
            cv(&[3, 4, 3]),
            cv(&[0, 0, 10]),
        ];
        for cfg in &configs {
            let prepared = cfg.prepare(3, 10).unwrap();
            for c in &vectors {
                let direct = cfg.evaluate(c).unwrap().value_nats;
                assert_eq!(prepared.evaluate_nats(c).unwrap(), direct, "{cfg:?} {c:?}");
            }
        }
    }
}
