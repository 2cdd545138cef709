//! Shot oracles and Monte-Carlo derivative estimators.

use rand::distr::Distribution;
use rand_distr::weighted::WeightedAliasIndex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::folding::{FoldedRule, FoldingMap};
use crate::measure::AtomicMeasure;
use crate::model::ModelInstance;
use crate::numeric::RunningStats;
use crate::rng::Rng;

const PM1_TOL: f64 = 1e-9;
const ALIAS_THRESHOLD: usize = 64;
/// Shots per independently seeded work unit.
pub const CHUNK_SHOTS: u64 = 1 << 16;

/// Draw `+1` with probability `(1 + f)/2`, else `-1`.
pub fn bernoulli_pm1(f: f64, rng: &mut Rng) -> i8 {
    if rng.uniform() < 0.5 * (1.0 + f) {
        1
    } else {
        -1
    }
}

/// A ±1-valued random responder with mean `f(s)`.
#[derive(Debug, Clone)]
pub struct ShotOracle<'a> {
    model: &'a ModelInstance,
    rng: Rng,
}

impl<'a> ShotOracle<'a> {
    pub fn new(model: &'a ModelInstance, rng: Rng) -> Result<Self> {
        let deviation = model.m_pm1_deviation();
        if deviation > PM1_TOL {
            return Err(Error::SpectrumError {
                which: "M",
                deviation,
            });
        }
        Ok(Self { model, rng })
    }

    pub fn model(&self) -> &'a ModelInstance {
        self.model
    }

    pub fn rng_mut(&mut self) -> &mut Rng {
        &mut self.rng
    }

    pub fn shot(&mut self, s: f64) -> Result<i8> {
        let f = self.model.expectation(s)?;
        Ok(bernoulli_pm1(f, &mut self.rng))
    }
}

/// Summary of a Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mean: f64,
    #[serde(rename = "variance")]
    pub empirical_variance: f64,
    pub shots: u64,
    /// Largest |parameter value| passed to the oracle.
    pub max_mopv: f64,
    /// Average |parameter value| passed to the oracle.
    pub mean_mopv: f64,
}

impl EstimateReport {
    pub fn standard_error(&self) -> f64 {
        (self.empirical_variance / self.shots as f64).sqrt()
    }
}

/// Per-chunk partial results, merged in chunk order.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ChunkStats {
    pub stats: RunningStats,
    pub mopv_sum: f64,
    pub mopv_max: f64,
}

impl ChunkStats {
    pub fn push(&mut self, value: f64, mopv: f64) {
        self.stats.push(value);
        self.mopv_sum += mopv;
        self.mopv_max = self.mopv_max.max(mopv);
    }
}

/// Split `shots` into fixed-size chunks with sequentially split seeds, run
/// them in parallel and merge in order. The result does not depend on the
/// number of worker threads.
pub(crate) fn run_chunked(
    rng: &mut Rng,
    shots: u64,
    work: impl Fn(u64, &mut Rng) -> Result<ChunkStats> + Sync,
) -> Result<EstimateReport> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let n_chunks = shots.div_ceil(CHUNK_SHOTS);
    let seeds: Vec<(u64, Rng)> = (0..n_chunks)
        .map(|i| {
            let len = CHUNK_SHOTS.min(shots - i * CHUNK_SHOTS);
            (len, rng.split())
        })
        .collect();
    let parts: Vec<ChunkStats> = seeds
        .into_par_iter()
        .map(|(len, mut r)| work(len, &mut r))
        .collect::<Result<_>>()?;
    let mut stats = RunningStats::default();
    let mut mopv_sum = 0.0;
    let mut mopv_max: f64 = 0.0;
    for p in &parts {
        stats.merge(&p.stats);
        mopv_sum += p.mopv_sum;
        mopv_max = mopv_max.max(p.mopv_max);
    }
    Ok(EstimateReport {
        mean: stats.mean(),
        empirical_variance: stats.variance(),
        shots,
        max_mopv: mopv_max,
        mean_mopv: mopv_sum / shots as f64,
    })
}

enum Sampler {
    Linear { cumulative: Vec<f64> },
    Alias(WeightedAliasIndex<f64>),
}

impl Sampler {
    fn new(weights: &[f64]) -> Result<Self> {
        if weights.len() > ALIAS_THRESHOLD {
            let alias = WeightedAliasIndex::new(weights.to_vec())
                .map_err(|e| Error::InvalidArgument(format!("alias table: {e}")))?;
            Ok(Sampler::Alias(alias))
        } else {
            let mut acc = 0.0;
            let cumulative = weights
                .iter()
                .map(|w| {
                    acc += w;
                    acc
                })
                .collect();
            Ok(Sampler::Linear { cumulative })
        }
    }

    fn sample(&self, rng: &mut Rng) -> usize {
        match self {
            Sampler::Linear { cumulative } => {
                let total = *cumulative.last().unwrap();
                let u = rng.uniform() * total;
                cumulative
                    .iter()
                    .position(|&c| u < c)
                    .unwrap_or(cumulative.len() - 1)
            }
            Sampler::Alias(a) => a.sample(rng.inner_mut()),
        }
    }
}

/// Estimate `Σ_j u_j f(τ(x - s_j))` by sampling atoms from `|m|/‖m‖`.
pub fn rule_estimate(
    oracle: &mut ShotOracle<'_>,
    rule: &FoldedRule,
    x: f64,
    shots: u64,
) -> Result<EstimateReport> {
    if rule.fold().is_some() && x.abs() > rule.radius() * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "x = {x} outside compiled radius {}",
            rule.radius()
        )));
    }
    // Each entry contributes a positive and a negative item.
    let mut items: Vec<(usize, f64)> = Vec::new();
    let mut masses: Vec<f64> = Vec::new();
    for (i, e) in rule.entries().iter().enumerate() {
        if e.pos_mass > 0.0 {
            items.push((i, 1.0));
            masses.push(e.pos_mass);
        }
        if e.neg_mass > 0.0 {
            items.push((i, -1.0));
            masses.push(e.neg_mass);
        }
    }
    if items.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let queries: Vec<f64> = (0..rule.entries().len())
        .map(|i| rule.query(i, x))
        .collect();
    let sampler = Sampler::new(&masses)?;
    let norm = rule.norm();
    let model = oracle.model();
    run_chunked(oracle.rng_mut(), shots, |len, rng| {
        let mut cache: HashMap<usize, f64> = HashMap::new();
        let mut out = ChunkStats::default();
        for _ in 0..len {
            let (entry, sign) = items[sampler.sample(rng)];
            let q = queries[entry];
            let f = match cache.get(&entry) {
                Some(&v) => v,
                None => {
                    let v = model.expectation(q)?;
                    cache.insert(entry, v);
                    v
                }
            };
            let shot = bernoulli_pm1(f, rng) as f64;
            out.push(sign * norm * shot, q.abs());
        }
        Ok(out)
    })
}

/// Obvious Estimator: query the oracle at `x - S`, `S ~ |m|/‖m‖`.
pub fn obvious_estimate(
    oracle: &mut ShotOracle<'_>,
    m: &AtomicMeasure,
    x: f64,
    shots: u64,
) -> Result<EstimateReport> {
    rule_estimate(oracle, &FoldedRule::identity(m), x, shots)
}

/// Simple Folding Estimator: query the oracle at `τ(x - S)`.
pub fn folding_estimate(
    oracle: &mut ShotOracle<'_>,
    m: &AtomicMeasure,
    fold: FoldingMap,
    x: f64,
    shots: u64,
) -> Result<EstimateReport> {
    let rule = FoldedRule::compile(m, fold, x.abs())?;
    rule_estimate(oracle, &rule, x, shots)
}
