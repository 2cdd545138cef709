//! STNySR vs ASPSR derivative sweeps over a parameter grid.

use nyquist_core::aspsr::{aspsr_derivative_with, AspsrModel};
use nyquist_core::measure::nyquist_n_covering;
use nyquist_core::numeric::{compensated_sum, linspace};
use nyquist_core::quadrature::GaussLegendre;
use nyquist_core::{nyquist, AspsrConfig, AtomicMeasure, ModelInstance};
use rayon::prelude::*;

use crate::csv_out::Table;
use crate::error::{BenchError, Result};

pub const REL_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub f: f64,
    pub fprime_exact: f64,
    pub nyquist_est: f64,
    pub aspsr_est: f64,
    pub nyquist_abs_err: f64,
    pub aspsr_abs_err: f64,
    pub nyquist_rel_err: f64,
    pub aspsr_rel_err: f64,
}

pub const SWEEP_COLUMNS: [&str; 9] = [
    "x",
    "f",
    "fprime_exact",
    "nyquist_est",
    "aspsr_est",
    "nyquist_abs_err",
    "aspsr_abs_err",
    "nyquist_rel_err",
    "aspsr_rel_err",
];

impl SweepRow {
    pub fn new(x: f64, f: f64, fprime_exact: f64, nyquist_est: f64, aspsr_est: f64) -> Self {
        let nyquist_abs_err = (nyquist_est - fprime_exact).abs();
        let aspsr_abs_err = (aspsr_est - fprime_exact).abs();
        let floor = fprime_exact.abs().max(REL_FLOOR);
        Self {
            x,
            f,
            fprime_exact,
            nyquist_est,
            aspsr_est,
            nyquist_abs_err,
            aspsr_abs_err,
            nyquist_rel_err: nyquist_abs_err / floor,
            aspsr_rel_err: aspsr_abs_err / floor,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        vec![
            self.x,
            self.f,
            self.fprime_exact,
            self.nyquist_est,
            self.aspsr_est,
            self.nyquist_abs_err,
            self.aspsr_abs_err,
            self.nyquist_rel_err,
            self.aspsr_rel_err,
        ]
    }
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(SWEEP_COLUMNS.to_vec());
    for r in rows {
        t.push(r.values());
    }
    t
}

/// Truncated Nyquist rule restricted to queries inside `[-T, T]`.
#[derive(Debug, Clone)]
pub struct Stnysr {
    rule: AtomicMeasure,
    cutoff: f64,
}

impl Stnysr {
    /// Rule reaching every query in `[-T, T]` for `|x| ≤ x_max`.
    pub fn new(k: f64, cutoff: f64, x_max: f64) -> Result<Self> {
        let n = nyquist_n_covering(k, cutoff + x_max.abs());
        Ok(Self {
            rule: nyquist(k, n)?,
            cutoff,
        })
    }

    /// `Σ u_j f(x - s_j)` over atoms with `|x - s_j| ≤ T`.
    pub fn estimate(&self, model: &ModelInstance, x: f64) -> Result<f64> {
        let mut terms = Vec::new();
        for (s, u) in self.rule.atoms() {
            let q = x - s;
            if q.abs() <= self.cutoff {
                terms.push(u * model.expectation(q)?);
            }
        }
        Ok(compensated_sum(terms))
    }
}

/// One [`SweepRow`] per grid point, in grid order.
pub fn compare(model: &ModelInstance, eps: f64, xs: &[f64]) -> Result<Vec<SweepRow>> {
    let cfg = AspsrConfig::new(eps)?;
    let am = AspsrModel::new(model, eps)?;
    let quad = GaussLegendre::new(cfg.quadrature_nodes)?;
    let x_max = xs.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let st = Stnysr::new(model.k(), cfg.cutoff(), x_max)?;
    xs.par_iter()
        .map(|&x| {
            let (f, fp) = model.value_and_derivative(x)?;
            let ny = st.estimate(model, x)?;
            let asp = aspsr_derivative_with(&am, &quad, x)?;
            Ok(SweepRow::new(x, f, fp, ny, asp))
        })
        .collect()
}

pub fn grid(x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(BenchError::BadArgs(format!("points must be >= 2, got {points}")));
    }
    if !(x_min.is_finite() && x_max.is_finite() && x_min <= x_max) {
        return Err(BenchError::BadArgs(format!("bad grid [{x_min}, {x_max}]")));
    }
    Ok(linspace(x_min, x_max, points))
}
