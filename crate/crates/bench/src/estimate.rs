//! Shot-based estimator dispatch for the `estimate` subcommand.

use nyquist_core::{
    aspsr_mc_estimate, folding_estimate, nyquist, obvious_estimate, AspsrConfig, EstimateReport,
    FoldingMap, ModelInstance, Rng, ShotOracle,
};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RuleKind {
    Nyquist,
    Folded,
    Aspsr,
}

#[derive(Debug, Clone)]
pub struct EstimateArgs {
    pub rule: RuleKind,
    pub x: f64,
    pub shots: u64,
    pub seed: u64,
    /// Truncation of the Nyquist rule.
    pub n: usize,
    pub p: f64,
    pub c: f64,
    pub eps: f64,
}

pub fn run_estimate(model: &ModelInstance, args: &EstimateArgs) -> Result<EstimateReport> {
    let mut oracle = ShotOracle::new(model, Rng::new(args.seed))?;
    let report = match args.rule {
        RuleKind::Nyquist => {
            let m = nyquist(model.k(), args.n)?;
            obvious_estimate(&mut oracle, &m, args.x, args.shots)?
        }
        RuleKind::Folded => {
            let m = nyquist(model.k(), args.n)?;
            let fold = FoldingMap::tau(args.p, args.c)?;
            folding_estimate(&mut oracle, &m, fold, args.x, args.shots)?
        }
        RuleKind::Aspsr => {
            let cfg = AspsrConfig::new(args.eps)?.with_mc_samples(args.shots);
            aspsr_mc_estimate(&mut oracle, args.x, &cfg)?
        }
    };
    Ok(report)
}
