//! Seeded random generation.
//!
//! A [`SeedSpec`] names one ChaCha8 stream: the master seed keys the cipher
//! and the stream index selects its 64-bit stream, so replicate `r` of an
//! experiment can own stream `r` and replicates can run on any thread
//! without changing results.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution as _};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::CountVector;
use crate::exact_oracle::Distribution;
use crate::mi::PairDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// Seed of sub-task `index`: a fresh key derived from this spec, with
    /// `index` as the stream.
    pub fn child(&self, index: u64) -> SeedSpec {
        SeedSpec {
            master_seed: splitmix64(self.master_seed ^ splitmix64(self.stream_index)),
            stream_index: index,
        }
    }
}

/// Multinomial sampler by sequential conditional binomials.
#[derive(Debug, Clone)]
pub struct MultinomialSampler {
    // conditional[i] = p_i / Σ_{j ≥ i} p_j
    conditional: Vec<f64>,
}

impl MultinomialSampler {
    pub fn new(d: &Distribution) -> Self {
        let p = d.probs();
        let mut tail = 0.0;
        let mut conditional = vec![0.0; p.len()];
        for i in (0..p.len()).rev() {
            tail += p[i];
            conditional[i] = (p[i] / tail).clamp(0.0, 1.0);
        }
        MultinomialSampler { conditional }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> CountVector {
        let boxes = self.conditional.len();
        let mut counts = vec![0u64; boxes];
        let mut remaining = n;
        for (i, &q) in self.conditional.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            if i + 1 == boxes || q >= 1.0 {
                counts[i] = remaining;
                break;
            }
            let k = Binomial::new(remaining, q)
                .expect("conditional probability in [0, 1]")
                .sample(rng);
            counts[i] = k;
            remaining -= k;
        }
        CountVector::new(counts).expect("n >= 1 draws")
    }
}

/// Draw one multinomial count vector of `n` samples from `d`.
pub fn sample_counts(d: &Distribution, n: u64, seed: SeedSpec) -> Result<CountVector> {
    if n == 0 {
        return Err(Error::domain("N must be >= 1"));
    }
    Ok(MultinomialSampler::new(d).sample(n, &mut seed.rng()))
}

/// Uniform random subsample of exactly `n` pairs. Without replacement the
/// subsample is a uniformly random `n`-subset in random order.
pub fn subsample_pairs(
    ds: &PairDataset,
    n: usize,
    seed: SeedSpec,
    replacement: bool,
) -> Result<PairDataset> {
    if n == 0 {
        return Err(Error::domain("subsample size must be >= 1"));
    }
    let len = ds.len();
    if len == 0 {
        return Err(Error::domain("cannot subsample an empty dataset"));
    }
    let mut rng = seed.rng();
    let src = ds.pairs();
    let pairs = if replacement {
        (0..n).map(|_| src[rng.random_range(0..len)]).collect()
    } else {
        if n > len {
            return Err(Error::domain(format!(
                "subsample of {n} pairs exceeds dataset size {len} without replacement"
            )));
        }
        index::sample(&mut rng, len, n)
            .into_iter()
            .map(|i| src[i])
            .collect()
    };
    PairDataset::new(pairs, ds.x_arity())
}
