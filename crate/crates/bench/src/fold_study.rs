//! Parameter-folding error and parameter-magnitude study over `c`.

use nyquist_core::folding::{folding_error_bound, mean_magnitude_bound};
use nyquist_core::measure::nyquist_tail_bound;
use nyquist_core::numeric::linspace;
use nyquist_core::{nyquist, FoldedRule, FoldingMap, ModelInstance};
use rayon::prelude::*;

use crate::csv_out::Table;
use crate::error::Result;

pub const FOLD_COLUMNS: [&str; 9] = [
    "c",
    "max_err_inside",
    "bound",
    "decay_constant",
    "truncation_tol",
    "mean_mopv",
    "mean_mopv_bound",
    "max_mopv",
    "c_plus_p",
];

/// Study parameters; the defaults match the CLI.
#[derive(Debug, Clone)]
pub struct FoldStudy {
    pub p: f64,
    pub c_list: Vec<f64>,
    /// Truncation of the Nyquist rule.
    pub n: usize,
    /// Evaluation points in `[-p, p]`.
    pub points: usize,
    /// Decay probes cover `|x| ∈ [c, c + probe_span]`.
    pub probe_span: f64,
    pub probe_step: f64,
}

impl FoldStudy {
    pub fn new(p: f64, c_list: Vec<f64>) -> Self {
        Self {
            p,
            c_list,
            n: 1_000_000,
            points: 41,
            probe_span: 128.0,
            probe_step: 1.0 / 32.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldRow {
    pub c: f64,
    pub max_err_inside: f64,
    pub bound: f64,
    pub decay_constant: f64,
    pub truncation_tol: f64,
    /// Largest expected |query| over the grid.
    pub mean_mopv: f64,
    /// Bound on the expected |query| at `|x| = p`.
    pub mean_mopv_bound: f64,
    pub max_mopv: f64,
}

impl FoldRow {
    pub fn values(&self, p: f64) -> Vec<f64> {
        vec![
            self.c,
            self.max_err_inside,
            self.bound,
            self.decay_constant,
            self.truncation_tol,
            self.mean_mopv,
            self.mean_mopv_bound,
            self.max_mopv,
            self.c + p,
        ]
    }
}

/// Compiled folded rules for each `c`, reusable across instances.
pub struct CompiledStudy {
    pub study: FoldStudy,
    rules: Vec<FoldedRule>,
    k: f64,
}

impl CompiledStudy {
    pub fn new(study: FoldStudy, k: f64) -> Result<Self> {
        let base = nyquist(k, study.n)?;
        let rules = study
            .c_list
            .iter()
            .map(|&c| Ok(FoldedRule::compile(&base, FoldingMap::tau(study.p, c)?, study.p)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { study, rules, k })
    }

    /// Folded rule for each entry of `c_list`, compiled for `|x| ≤ p`.
    pub fn rules(&self) -> &[FoldedRule] {
        &self.rules
    }

    pub fn run(&self, model: &ModelInstance) -> Result<Vec<FoldRow>> {
        let s = &self.study;
        let k = self.k;
        let decomposition = model.decompose()?;
        let xs = linspace(-s.p, s.p, s.points);
        let truncation_tol = nyquist_tail_bound(k, s.n) * model.m_norm();
        s.c_list
            .par_iter()
            .zip(self.rules.par_iter())
            .map(|(&c, rule)| {
                let steps = (s.probe_span / s.probe_step).round() as usize;
                let probes: Vec<f64> = (0..=steps)
                    .flat_map(|i| {
                        let x = c + i as f64 * s.probe_step;
                        [x, -x]
                    })
                    .collect();
                let decay = decomposition.decay_constant(&probes)?;
                let mut max_err: f64 = 0.0;
                let mut mean_mopv: f64 = 0.0;
                let mut max_mopv: f64 = 0.0;
                for &x in &xs {
                    let est = rule.evaluate(|t| model.expectation(t), x)?;
                    max_err = max_err.max((est - model.derivative(x)?).abs());
                    let (mean, max) = rule.magnitude_stats(x)?;
                    mean_mopv = mean_mopv.max(mean);
                    max_mopv = max_mopv.max(max);
                }
                Ok(FoldRow {
                    c,
                    max_err_inside: max_err,
                    bound: folding_error_bound(k, c, decay),
                    decay_constant: decay,
                    truncation_tol,
                    mean_mopv,
                    mean_mopv_bound: mean_magnitude_bound(k, s.p, c, s.p),
                    max_mopv,
                })
            })
            .collect()
    }
}

pub fn fold_table(rows: &[FoldRow], p: f64) -> Table {
    let mut t = Table::new(FOLD_COLUMNS.to_vec());
    for r in rows {
        t.push(r.values(p));
    }
    t
}
