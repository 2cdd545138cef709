//! Distribution of `aspsr_rel_err - nyquist_rel_err` across instances.

use nyquist_core::numeric::quantile_sorted;
use nyquist_core::ModelInstance;
use rayon::prelude::*;

use crate::csv_out::Table;
use crate::error::{BenchError, Result};
use crate::sweep::compare;

pub const PERCENTILE_COLUMNS: [&str; 6] = ["x", "mean", "median", "p25", "p10", "p1"];

/// Per-x summary over instances; positive values mean STNySR was better.
pub fn percentile_table(models: &[ModelInstance], eps: f64, xs: &[f64]) -> Result<Table> {
    if models.len() < 2 {
        return Err(BenchError::BadArgs(format!(
            "need at least 2 instances, got {}",
            models.len()
        )));
    }
    let sweeps: Vec<Vec<f64>> = models
        .par_iter()
        .map(|m| {
            Ok(compare(m, eps, xs)?
                .iter()
                .map(|r| r.aspsr_rel_err - r.nyquist_rel_err)
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(summarize(xs, &sweeps))
}

/// Rows of `x, mean, median, p25, p10, p1` from per-instance difference curves.
pub fn summarize(xs: &[f64], curves: &[Vec<f64>]) -> Table {
    let mut t = Table::new(PERCENTILE_COLUMNS.to_vec());
    for (i, &x) in xs.iter().enumerate() {
        let mut col: Vec<f64> = curves.iter().map(|c| c[i]).collect();
        col.sort_by(f64::total_cmp);
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        t.push(vec![
            x,
            mean,
            quantile_sorted(&col, 0.5),
            quantile_sorted(&col, 0.25),
            quantile_sorted(&col, 0.10),
            quantile_sorted(&col, 0.01),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicated_curve_gives_identical_percentiles() {
        let xs = [0.0, 1.0, 2.0];
        let c = vec![0.5, -1.0, 3.0];
        let t = summarize(&xs, &[c.clone(), c.clone()]);
        for (row, v) in t.rows.iter().zip(&c) {
            for &q in &row[1..] {
                assert_eq!(q, *v);
            }
        }
    }
}
