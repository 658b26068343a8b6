//! Mutual information between a many-valued `X` and a binary `Y`,
//! `I(X:Y) = Ĥ(Y) − Ĥ(Y|X)`.
//!
//! `Ĥ(Y|X)` averages per-context binomial-regime estimates weighted by
//! `N_x / N`. The parameters `(a_0, a_1)` of each context come from a
//! five-way classification of `x` by its `y`-bias, computed once on the full
//! dataset and kept fixed for every subsample.

use std::collections::HashMap;
use std::io::BufRead;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{schuermann_entropy, CountVector, ParamVector, Regime};
use crate::sampling::{subsample_pairs, SeedSpec};

/// i.i.d. `(x, y)` samples with `y ∈ {0, 1}` and `x < x_arity`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairDataset {
    pairs: Vec<(u32, u8)>,
    x_arity: u32,
}

impl PairDataset {
    pub fn new(pairs: Vec<(u32, u8)>, x_arity: u32) -> Result<Self> {
        if let Some(&(x, y)) = pairs.iter().find(|&&(x, y)| x >= x_arity || y > 1) {
            return Err(Error::domain(format!(
                "pair ({x}, {y}) outside x < {x_arity}, y in {{0, 1}}"
            )));
        }
        Ok(PairDataset { pairs, x_arity })
    }

    /// Dataset whose arity is one past the largest observed `x`.
    pub fn from_pairs(pairs: Vec<(u32, u8)>) -> Result<Self> {
        let arity = pairs.iter().map(|&(x, _)| x + 1).max().unwrap_or(0);
        PairDataset::new(pairs, arity)
    }

    pub fn pairs(&self) -> &[(u32, u8)] {
        &self.pairs
    }

    pub fn x_arity(&self) -> u32 {
        self.x_arity
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Marginal `y` counts `[n_0, n_1]`.
    pub fn y_counts(&self) -> [u64; 2] {
        let ones = self.pairs.iter().filter(|p| p.1 == 1).count() as u64;
        [self.pairs.len() as u64 - ones, ones]
    }

    /// The same dataset with `y` relabelled `0 ↔ 1`.
    pub fn swap_labels(&self) -> PairDataset {
        PairDataset {
            pairs: self.pairs.iter().map(|&(x, y)| (x, 1 - y)).collect(),
            x_arity: self.x_arity,
        }
    }

    /// Parse two-column text, one `x y` pair per line. The delimiter (comma,
    /// tab or space) is detected from the first data line; a non-numeric
    /// first line is taken as a header. Blank lines and `#` comments are
    /// skipped.
    pub fn parse<R: BufRead>(reader: R) -> std::result::Result<Self, ParseError> {
        let mut pairs = Vec::new();
        let mut delimiter: Option<char> = None;
        let mut first_content = true;
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| ParseError {
                line: line_no,
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let delim = *delimiter.get_or_insert_with(|| detect_delimiter(trimmed));
            let fields: Vec<&str> = if delim == ' ' {
                trimmed.split_whitespace().collect()
            } else {
                trimmed.split(delim).map(str::trim).collect()
            };
            let parsed = parse_fields(&fields);
            if first_content {
                first_content = false;
                if parsed.is_err() && fields.iter().any(|f| f.parse::<f64>().is_err()) {
                    continue;
                }
            }
            let (x, y) = parsed.map_err(|message| ParseError {
                line: line_no,
                message,
            })?;
            pairs.push((x, y));
        }
        PairDataset::from_pairs(pairs).map_err(|e| ParseError {
            line: 0,
            message: e.to_string(),
        })
    }

    /// Inverse of [`PairDataset::parse`] (comma-delimited, with header).
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.pairs.len() * 8 + 4);
        out.push_str("x,y\n");
        for &(x, y) in &self.pairs {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}

fn detect_delimiter(line: &str) -> char {
    if line.contains(',') {
        ','
    } else if line.contains('\t') {
        '\t'
    } else {
        ' '
    }
}

fn parse_fields(fields: &[&str]) -> std::result::Result<(u32, u8), String> {
    if fields.len() != 2 {
        return Err(format!("expected 2 fields, found {}", fields.len()));
    }
    let x = fields[0]
        .parse::<u32>()
        .map_err(|_| format!("x = {:?} is not a non-negative integer", fields[0]))?;
    let y = match fields[1] {
        "0" => 0,
        "1" => 1,
        other => return Err(format!("y = {other:?} is not 0 or 1")),
    };
    Ok((x, y))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum YClass {
    HeavyY1,
    ModerateY1,
    Neutral,
    ModerateY0,
    HeavyY0,
}

impl YClass {
    pub const ALL: [YClass; 5] = [
        YClass::HeavyY1,
        YClass::ModerateY1,
        YClass::Neutral,
        YClass::ModerateY0,
        YClass::HeavyY0,
    ];

    /// The class of the same context after swapping `y` labels.
    pub fn mirror(self) -> YClass {
        match self {
            YClass::HeavyY1 => YClass::HeavyY0,
            YClass::ModerateY1 => YClass::ModerateY0,
            YClass::Neutral => YClass::Neutral,
            YClass::ModerateY0 => YClass::ModerateY1,
            YClass::HeavyY0 => YClass::HeavyY1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            YClass::HeavyY1 => "heavy_y1",
            YClass::ModerateY1 => "moderate_y1",
            YClass::Neutral => "neutral",
            YClass::ModerateY0 => "moderate_y0",
            YClass::HeavyY0 => "heavy_y0",
        }
    }
}

/// `(a_0, a_1)` per class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ATable {
    pub heavy_y1: (f64, f64),
    pub moderate_y1: (f64, f64),
    pub neutral: (f64, f64),
    pub moderate_y0: (f64, f64),
    pub heavy_y0: (f64, f64),
}

impl Default for ATable {
    fn default() -> Self {
        // A context leaning towards y = 1 makes y = 0 the rare box, which
        // gets the large parameter.
        ATable {
            heavy_y1: (7.0, 1.0),
            moderate_y1: (4.0, 1.0),
            neutral: (1.0, 1.0),
            moderate_y0: (1.0, 4.0),
            heavy_y0: (1.0, 7.0),
        }
    }
}

impl ATable {
    pub fn get(&self, class: YClass) -> (f64, f64) {
        match class {
            YClass::HeavyY1 => self.heavy_y1,
            YClass::ModerateY1 => self.moderate_y1,
            YClass::Neutral => self.neutral,
            YClass::ModerateY0 => self.moderate_y0,
            YClass::HeavyY0 => self.heavy_y0,
        }
    }

    /// Table for label-swapped data.
    pub fn mirror(&self) -> ATable {
        let swap = |(a0, a1): (f64, f64)| (a1, a0);
        ATable {
            heavy_y1: swap(self.heavy_y0),
            moderate_y1: swap(self.moderate_y0),
            neutral: swap(self.neutral),
            moderate_y0: swap(self.moderate_y1),
            heavy_y0: swap(self.heavy_y1),
        }
    }
}

/// Cutoffs on the fraction of the dominant label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub moderate: f64,
    pub heavy: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            moderate: 0.65,
            heavy: 0.85,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if 0.5 < self.moderate && self.moderate < self.heavy && self.heavy <= 1.0 {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "thresholds must satisfy 0.5 < moderate < heavy <= 1, got ({}, {})",
                self.moderate, self.heavy
            )))
        }
    }

    fn classify(&self, zeros: u64, ones: u64) -> YClass {
        let total = (zeros + ones) as f64;
        let f1 = ones as f64 / total;
        let f0 = zeros as f64 / total;
        if f1 >= self.heavy {
            YClass::HeavyY1
        } else if f1 >= self.moderate {
            YClass::ModerateY1
        } else if f0 >= self.heavy {
            YClass::HeavyY0
        } else if f0 >= self.moderate {
            YClass::ModerateY0
        } else {
            YClass::Neutral
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasClassMap {
    class_of_x: Vec<YClass>,
    pub a_table: ATable,
}

impl BiasClassMap {
    pub fn new(class_of_x: Vec<YClass>, a_table: ATable) -> Self {
        BiasClassMap {
            class_of_x,
            a_table,
        }
    }

    pub fn class_of(&self, x: u32) -> Option<YClass> {
        self.class_of_x.get(x as usize).copied()
    }

    pub fn classes(&self) -> &[YClass] {
        &self.class_of_x
    }

    pub fn params_for(&self, x: u32) -> Result<ParamVector> {
        let class = self
            .class_of(x)
            .ok_or_else(|| Error::domain(format!("x = {x} has no class")))?;
        let (a0, a1) = self.a_table.get(class);
        ParamVector::new(vec![a0, a1])
    }

    /// Map for label-swapped data: classes and parameter pairs mirrored.
    pub fn mirror(&self) -> BiasClassMap {
        BiasClassMap {
            class_of_x: self.class_of_x.iter().map(|c| c.mirror()).collect(),
            a_table: self.a_table.mirror(),
        }
    }

    pub fn class_sizes(&self) -> HashMap<YClass, usize> {
        let mut out = HashMap::new();
        for &c in &self.class_of_x {
            *out.entry(c).or_insert(0) += 1;
        }
        out
    }
}

fn per_x_counts(ds: &PairDataset) -> Vec<[u64; 2]> {
    let mut counts = vec![[0u64; 2]; ds.x_arity() as usize];
    for &(x, y) in ds.pairs() {
        counts[x as usize][y as usize] += 1;
    }
    counts
}

/// Classify every `x < x_arity` by its empirical `P(y = 1 | x)` on `full`.
pub fn classify_x(full: &PairDataset, thresholds: Thresholds) -> Result<BiasClassMap> {
    classify_x_with(full, thresholds, ATable::default())
}

pub fn classify_x_with(
    full: &PairDataset,
    thresholds: Thresholds,
    a_table: ATable,
) -> Result<BiasClassMap> {
    thresholds.validate()?;
    let counts = per_x_counts(full);
    let classes = counts
        .iter()
        .enumerate()
        .map(|(x, &[zeros, ones])| {
            if zeros + ones == 0 {
                Err(Error::domain(format!(
                    "x = {x} never occurs in the dataset"
                )))
            } else {
                Ok(thresholds.classify(zeros, ones))
            }
        })
        .collect::<Result<_>>()?;
    Ok(BiasClassMap::new(classes, a_table))
}

/// `Ĥ(Y|X)` with per-context estimates clipped to `[0, 1]` bit, and without.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalEntropy {
    pub clipped_bits: f64,
    pub unclipped_bits: f64,
}

pub fn conditional_entropy(
    sub: &PairDataset,
    classes: &BiasClassMap,
) -> Result<ConditionalEntropy> {
    if sub.is_empty() {
        return Err(Error::domain("conditional entropy of an empty dataset"));
    }
    let total = sub.len() as f64;
    let mut clipped = 0.0;
    let mut unclipped = 0.0;
    for (x, &[zeros, ones]) in per_x_counts(sub).iter().enumerate() {
        let n_x = zeros + ones;
        if n_x == 0 {
            continue;
        }
        let x = x as u32;
        let a = classes.params_for(x)?;
        let c = CountVector::new(vec![zeros, ones])?;
        let h = schuermann_entropy(&c, &a, Regime::Binomial)
            .map_err(|e| Error::InContext {
                x,
                source: Box::new(e),
            })?
            .value_bits;
        let w = n_x as f64 / total;
        unclipped += w * h;
        clipped += w * h.clamp(0.0, 1.0);
    }
    Ok(ConditionalEntropy {
        clipped_bits: clipped,
        unclipped_bits: unclipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiEstimate {
    pub mi_bits: f64,
    pub mi_unclipped_bits: f64,
    pub h_y_bits: f64,
    pub h_y_given_x: ConditionalEntropy,
}

/// `Ĥ(Y) − Ĥ(Y|X)`, with `Ĥ(Y)` from the marginal `y` counts at `a = (1, 1)`.
pub fn mi_estimate(sub: &PairDataset, classes: &BiasClassMap) -> Result<MiEstimate> {
    let cond = conditional_entropy(sub, classes)?;
    let marginal = CountVector::new(sub.y_counts().to_vec())?;
    let h_y =
        schuermann_entropy(&marginal, &ParamVector::uniform(2, 1.0)?, Regime::Binomial)?.value_bits;
    Ok(MiEstimate {
        mi_bits: h_y - cond.clipped_bits,
        mi_unclipped_bits: h_y - cond.unclipped_bits,
        h_y_bits: h_y,
        h_y_given_x: cond,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiCurveRow {
    pub n: usize,
    pub replicates: usize,
    pub mean_mi_bits: f64,
    pub std_error_bits: f64,
    pub mean_mi_unclipped_bits: f64,
    pub std_error_unclipped_bits: f64,
    /// Set when the row could not be computed; the numeric fields are NaN.
    pub error: Option<String>,
}

/// Shifted by the first value, so identical replicates give exactly that
/// value and zero spread.
fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let shift = values[0];
    let d1 = values.iter().map(|v| v - shift).sum::<f64>() / r;
    let d2 = values
        .iter()
        .map(|v| (v - shift) * (v - shift))
        .sum::<f64>()
        / r;
    let var = (d2 - d1 * d1).max(0.0);
    (shift + d1, (var / r).sqrt())
}

/// Mean and standard error of the MI estimate over random subsamples of each
/// size in `n_grid`, with classes fixed from the full dataset.
pub fn mi_subsample_curve(
    full: &PairDataset,
    classes: &BiasClassMap,
    n_grid: &[usize],
    replicates: usize,
    seed: SeedSpec,
    replacement: bool,
) -> Result<Vec<MiCurveRow>> {
    if replicates == 0 {
        return Err(Error::domain("replicates must be >= 1"));
    }
    let rows = n_grid
        .iter()
        .enumerate()
        .map(|(row, &n)| {
            let row_seed = seed.child(row as u64);
            let estimates: Result<Vec<MiEstimate>> = (0..replicates)
                .into_par_iter()
                .map(|r| {
                    let sub = subsample_pairs(full, n, row_seed.child(r as u64), replacement)?;
                    mi_estimate(&sub, classes)
                })
                .collect();
            match estimates {
                Ok(est) => {
                    let clipped: Vec<f64> = est.iter().map(|e| e.mi_bits).collect();
                    let raw: Vec<f64> = est.iter().map(|e| e.mi_unclipped_bits).collect();
                    let (m, se) = mean_and_std_error(&clipped);
                    let (mu, seu) = mean_and_std_error(&raw);
                    MiCurveRow {
                        n,
                        replicates,
                        mean_mi_bits: m,
                        std_error_bits: se,
                        mean_mi_unclipped_bits: mu,
                        std_error_unclipped_bits: seu,
                        error: None,
                    }
                }
                Err(e) => MiCurveRow {
                    n,
                    replicates,
                    mean_mi_bits: f64::NAN,
                    std_error_bits: f64::NAN,
                    mean_mi_unclipped_bits: f64::NAN,
                    std_error_unclipped_bits: f64::NAN,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthProfile {
    /// `x` uniform over the id range.
    PymLike,
    /// `x` Zipf-distributed over the id range, ids weighted in equal pairs.
    SphericalLike,
}

/// Generator settings for synthetic `(x, y)` data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynthConfig {
    pub x_values: u32,
    /// Fraction of ids in each of the two heavy classes.
    pub heavy_fraction: f64,
    /// Fraction of ids in each of the two moderate classes.
    pub moderate_fraction: f64,
    /// `P(y = 1 | x)` for the heavy-towards-1 class (mirrored for towards-0).
    pub q_heavy: f64,
    pub q_moderate: f64,
    /// Zipf exponent of the spherical-like `x` law.
    pub zipf_exponent: f64,
}

impl SynthConfig {
    pub fn for_profile(profile: SynthProfile) -> Self {
        SynthConfig {
            x_values: match profile {
                SynthProfile::PymLike => 4096,
                SynthProfile::SphericalLike => 4000,
            },
            heavy_fraction: 0.2,
            moderate_fraction: 0.2,
            q_heavy: 0.95,
            q_moderate: 0.75,
            zipf_exponent: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_values < 2 {
            return Err(Error::domain("x_values must be >= 2"));
        }
        let biased = 2.0 * (self.heavy_fraction + self.moderate_fraction);
        if !(self.heavy_fraction >= 0.0 && self.moderate_fraction >= 0.0 && biased <= 1.0) {
            return Err(Error::domain(
                "class fractions must be >= 0 and biased classes at most 1",
            ));
        }
        for q in [self.q_heavy, self.q_moderate] {
            if !(0.5..=1.0).contains(&q) {
                return Err(Error::domain(format!("q = {q} must lie in [0.5, 1]")));
            }
        }
        if !(self.zipf_exponent >= 0.0) {
            return Err(Error::domain("zipf_exponent must be >= 0"));
        }
        Ok(())
    }
}

/// Everything needed to compute the generator's exact mutual information.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorTruth {
    pub profile: SynthProfile,
    pub config: SynthConfig,
    /// `p(x)` per generator id.
    pub p_x: Vec<f64>,
    /// `P(y = 1 | x)` per generator id.
    pub q: Vec<f64>,
    pub class: Vec<YClass>,
    /// Dataset id of each generator id; `None` if it was never drawn.
    pub dataset_id: Vec<Option<u32>>,
}

fn binary_entropy_bits(q: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(q) + term(1.0 - q)
}

impl GeneratorTruth {
    pub fn marginal_y1(&self) -> f64 {
        self.p_x.iter().zip(&self.q).map(|(p, q)| p * q).sum()
    }

    /// `H(Y) − Σ_x p(x) h(q(x))` in bits.
    pub fn true_mi_bits(&self) -> f64 {
        let cond: f64 = self
            .p_x
            .iter()
            .zip(&self.q)
            .map(|(&p, &q)| p * binary_entropy_bits(q))
            .sum();
        binary_entropy_bits(self.marginal_y1()) - cond
    }

    /// `Σ_{x,y} p(x,y) log2(p(x,y) / (p(x) p(y)))` from the joint table.
    pub fn true_mi_bits_joint(&self) -> f64 {
        let py1 = self.marginal_y1();
        let py = [1.0 - py1, py1];
        let mut mi = 0.0;
        for (&px, &q) in self.p_x.iter().zip(&self.q) {
            for (y, &pcond) in [1.0 - q, q].iter().enumerate() {
                let joint = px * pcond;
                if joint > 0.0 {
                    mi += joint * (joint / (px * py[y])).log2();
                }
            }
        }
        mi
    }
}

fn class_q(class: YClass, cfg: &SynthConfig) -> f64 {
    match class {
        YClass::HeavyY1 => cfg.q_heavy,
        YClass::ModerateY1 => cfg.q_moderate,
        YClass::Neutral => 0.5,
        YClass::ModerateY0 => 1.0 - cfg.q_moderate,
        YClass::HeavyY0 => 1.0 - cfg.q_heavy,
    }
}

/// Synthetic stand-in for a large `(x, binary y)` dataset with exactly
/// uniform `y` marginal. Generator ids that are never drawn are dropped and
/// the rest renumbered densely in id order.
pub fn synth_dataset(
    profile: SynthProfile,
    size: usize,
    seed: SeedSpec,
    cfg: &SynthConfig,
) -> Result<(PairDataset, GeneratorTruth)> {
    cfg.validate()?;
    if size == 0 {
        return Err(Error::domain("size must be >= 1"));
    }
    let ids = cfg.x_values as usize;
    // Mirror-symmetric class layout: ids come in pairs (2j, 2j+1) of equal
    // weight, the second carrying the mirror class of the first.
    let n_pairs = ids / 2;
    let heavy_pairs = (cfg.heavy_fraction * ids as f64).round() as usize;
    let moderate_pairs = (cfg.moderate_fraction * ids as f64).round() as usize;
    let mut pair_class: Vec<YClass> = Vec::with_capacity(n_pairs);
    pair_class.extend(std::iter::repeat_n(
        YClass::HeavyY1,
        heavy_pairs.min(n_pairs),
    ));
    pair_class.extend(std::iter::repeat_n(
        YClass::ModerateY1,
        moderate_pairs.min(n_pairs - pair_class.len()),
    ));
    pair_class.resize(n_pairs, YClass::Neutral);
    pair_class.shuffle(&mut seed.child(0).rng());

    let mut class = Vec::with_capacity(ids);
    for &c in &pair_class {
        class.push(c);
        class.push(c.mirror());
    }
    // Odd id count: the last id is neutral.
    class.resize(ids, YClass::Neutral);

    let weights: Vec<f64> = match profile {
        SynthProfile::PymLike => vec![1.0; ids],
        SynthProfile::SphericalLike => (0..ids)
            .map(|i| ((i / 2 + 1) as f64).powf(-cfg.zipf_exponent))
            .collect(),
    };
    let wsum: f64 = weights.iter().sum();
    let p_x: Vec<f64> = weights.iter().map(|w| w / wsum).collect();
    let q: Vec<f64> = class.iter().map(|&c| class_q(c, cfg)).collect();

    let mut rng = seed.child(1).rng();
    let raw: Vec<(u32, u8)> = match profile {
        SynthProfile::PymLike => (0..size)
            .map(|_| {
                let x = rng.random_range(0..ids);
                (x as u32, rng.random_bool(q[x]) as u8)
            })
            .collect(),
        SynthProfile::SphericalLike => {
            let pick = WeightedIndex::new(&weights)
                .map_err(|e| Error::Numerical(format!("x law: {e}")))?;
            (0..size)
                .map(|_| {
                    let x = pick.sample(&mut rng);
                    (x as u32, rng.random_bool(q[x]) as u8)
                })
                .collect()
        }
    };

    let mut seen = vec![false; ids];
    for &(x, _) in &raw {
        seen[x as usize] = true;
    }
    let mut next = 0u32;
    let dataset_id: Vec<Option<u32>> = seen
        .iter()
        .map(|&s| {
            s.then(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    let pairs = raw
        .into_iter()
        .map(|(x, y)| (dataset_id[x as usize].expect("drawn id"), y))
        .collect();
    let dataset = PairDataset::new(pairs, next)?;
    let truth = GeneratorTruth {
        profile,
        config: *cfg,
        p_x,
        q,
        class,
        dataset_id,
    };
    Ok((dataset, truth))
}
