//! Monte Carlo harness: repeated multinomial draws, parameter sweeps and the
//! `a_i^{n_i}` safety heuristic.
//!
//! Replicate `r` draws from stream `seed.child(r)`. Replicates are evaluated
//! in fixed-size chunks in parallel, each chunk reduced sequentially, and the
//! chunk partials merged in index order, so results do not depend on the
//! thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{CountVector, EstimatorConfig, ParamVector, Regime};
use crate::exact_oracle::Distribution;
use crate::sampling::{MultinomialSampler, SeedSpec};

const CHUNK: usize = 4096;

/// Rows with more than this fraction of overflowed replicates are unreliable.
pub const UNRELIABLE_OVERFLOW_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateSummary {
    pub mean_bits: f64,
    /// `sqrt(variance_bits2 / completed)`.
    pub std_error_bits: f64,
    /// Population variance of the per-replicate estimates.
    pub variance_bits2: f64,
    pub replicates: u64,
    /// Replicates aborted by overflow; excluded from the moments.
    pub overflow_count: u64,
}

impl EstimateSummary {
    pub fn completed(&self) -> u64 {
        self.replicates - self.overflow_count
    }

    pub fn unreliable(&self) -> bool {
        self.overflow_count as f64 > UNRELIABLE_OVERFLOW_FRACTION * self.replicates as f64
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
    overflow: u64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Welford) -> Welford {
        let overflow = self.overflow + other.overflow;
        if other.count == 0 {
            return Welford { overflow, ..self };
        }
        if self.count == 0 {
            return Welford { overflow, ..other };
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let frac = other.count as f64 / count as f64;
        Welford {
            count,
            mean: self.mean + delta * frac,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * frac,
            overflow,
        }
    }
}

/// Mean, variance and standard error in bits of `estimator` over
/// `replicates` independent multinomial draws of `n` samples from `d`.
pub fn mc_estimate(
    d: &Distribution,
    n: u64,
    estimator: &EstimatorConfig,
    replicates: u64,
    seed: SeedSpec,
) -> Result<EstimateSummary> {
    if n == 0 {
        return Err(Error::domain("N must be >= 1"));
    }
    if replicates == 0 {
        return Err(Error::domain("replicates must be >= 1"));
    }
    let prepared = estimator.prepare(d.len(), n)?;
    let sampler = MultinomialSampler::new(d);
    let chunks = replicates.div_ceil(CHUNK as u64);
    let partials: Vec<Result<Welford>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK as u64;
            let end = (start + CHUNK as u64).min(replicates);
            let mut acc = Welford::default();
            for r in start..end {
                let counts = sampler.sample(n, &mut seed.child(r).rng());
                match prepared.evaluate_nats(&counts) {
                    Ok(v) => acc.push(v / std::f64::consts::LN_2),
                    Err(e) if e.is_overflow() => acc.overflow += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = Welford::default();
    for p in partials {
        total = total.merge(p?);
    }
    if total.count == 0 {
        return Err(Error::Numerical(format!(
            "all {replicates} replicates overflowed"
        )));
    }
    let variance = total.m2 / total.count as f64;
    Ok(EstimateSummary {
        mean_bits: total.mean,
        std_error_bits: (variance / total.count as f64).sqrt(),
        variance_bits2: variance,
        replicates,
        overflow_count: total.overflow,
    })
}

/// `a(t) = base + t · direction` for each `t` in `steps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamLine {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
    pub steps: Vec<f64>,
}

/// Parameter points of a sweep: an optional line, then explicit points.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct AGrid {
    pub line: Option<ParamLine>,
    pub points: Vec<ParamVector>,
}

impl AGrid {
    pub fn from_points(points: Vec<ParamVector>) -> Self {
        AGrid { line: None, points }
    }

    /// All grid points in order.
    pub fn expand(&self) -> Result<Vec<ParamVector>> {
        let mut out = Vec::new();
        if let Some(line) = &self.line {
            if line.base.len() != line.direction.len() {
                return Err(Error::LengthMismatch {
                    what: "line direction",
                    got: line.direction.len(),
                    expected: line.base.len(),
                });
            }
            for &t in &line.steps {
                let a = line
                    .base
                    .iter()
                    .zip(&line.direction)
                    .map(|(b, d)| b + t * d)
                    .collect();
                out.push(ParamVector::new(a)?);
            }
        }
        out.extend(self.points.iter().cloned());
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub distribution: Distribution,
    pub tuple_sizes: Vec<u64>,
    pub a_grid: AGrid,
    pub replicates: u64,
    pub regime: Regime,
    pub seed: SeedSpec,
}

impl SweepSpec {
    /// Check every precondition and return the expanded grid.
    pub fn validate(&self) -> Result<Vec<ParamVector>> {
        if self.replicates == 0 {
            return Err(Error::domain("replicates must be >= 1"));
        }
        if self.tuple_sizes.is_empty() || self.tuple_sizes.contains(&0) {
            return Err(Error::domain(
                "tuple sizes must be a nonempty list of N >= 1",
            ));
        }
        let grid = self.a_grid.expand()?;
        if grid.is_empty() {
            return Err(Error::domain("a-grid is empty"));
        }
        for a in &grid {
            self.distribution.check_aligned(a)?;
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub a: ParamVector,
    /// The summary, or the error message if the row failed.
    pub result: std::result::Result<EstimateSummary, String>,
}

/// One [`mc_estimate`] per `(N, a)` in N-major grid order; row `i` uses
/// `spec.seed.child(i)`. Row failures are recorded, not propagated.
pub fn sweep_a(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let grid = spec.validate()?;
    let mut rows = Vec::with_capacity(grid.len() * spec.tuple_sizes.len());
    for &n in &spec.tuple_sizes {
        for a in &grid {
            let index = rows.len() as u64;
            let estimator = EstimatorConfig::Schuermann {
                a: a.clone(),
                regime: spec.regime,
            };
            let result = mc_estimate(
                &spec.distribution,
                n,
                &estimator,
                spec.replicates,
                spec.seed.child(index),
            )
            .map_err(|e| e.to_string());
            rows.push(SweepRow {
                n,
                a: a.clone(),
                result,
            });
        }
    }
    Ok(rows)
}

pub const DEFAULT_SAFETY_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SafetyFlag {
    pub box_index: usize,
    pub a: f64,
    pub count: u64,
    /// `a^count`.
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SafetyReport {
    pub threshold: f64,
    pub flags: Vec<SafetyFlag>,
}

impl SafetyReport {
    pub fn pass(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Flag every box with `a_i^{n_i} > threshold`.
pub fn safety_check(a: &ParamVector, c: &CountVector, threshold: f64) -> Result<SafetyReport> {
    a.check_aligned(c.len())?;
    if !(threshold > 0.0) {
        return Err(Error::domain(format!(
            "threshold must be > 0, got {threshold}"
        )));
    }
    let flags = a
        .values()
        .iter()
        .zip(c.counts())
        .enumerate()
        .filter_map(|(box_index, (&a, &count))| {
            let power = a.powf(count as f64);
            (power > threshold).then_some(SafetyFlag {
                box_index,
                a,
                count,
                power,
            })
        })
        .collect();
    Ok(SafetyReport { threshold, flags })
}
