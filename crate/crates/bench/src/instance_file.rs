//! JSON persistence of model instances.

use num_complex::Complex64;
use nyquist_core::{CMatrix, HermitianOperator, ModelInstance};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{BenchError, Result};

type CMat = Vec<Vec<[f64; 2]>>;

/// `{"dim", "seed", "A", "B", "rho", "M"}` with matrices as rows of `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub dim: usize,
    pub seed: Option<u64>,
    #[serde(rename = "A")]
    pub a: CMat,
    #[serde(rename = "B")]
    pub b: CMat,
    pub rho: CMat,
    #[serde(rename = "M")]
    pub m: CMat,
}

fn to_rows(m: &CMatrix) -> CMat {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn from_rows(rows: &CMat, dim: usize, name: &str) -> Result<CMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(nyquist_core::Error::InvalidInstance(format!("{name} is not {dim}x{dim}")).into());
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

impl InstanceFile {
    pub fn from_model(model: &ModelInstance, seed: Option<u64>) -> Self {
        Self {
            dim: model.dim(),
            seed,
            a: to_rows(model.a().matrix()),
            b: to_rows(model.b().matrix()),
            rho: to_rows(model.rho()),
            m: to_rows(model.m().matrix()),
        }
    }

    pub fn to_model(&self) -> Result<ModelInstance> {
        let a = HermitianOperator::new(from_rows(&self.a, self.dim, "A")?)?;
        let b = HermitianOperator::new(from_rows(&self.b, self.dim, "B")?)?;
        let rho = from_rows(&self.rho, self.dim, "rho")?;
        let m = HermitianOperator::new(from_rows(&self.m, self.dim, "M")?)?;
        Ok(ModelInstance::new(a, b, rho, m)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| BenchError::Json {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string(self).expect("instance serialization is infallible");
        std::fs::write(path, text + "\n").map_err(|e| BenchError::io(path, e))
    }
}

/// Load an instance file and validate it into a model.
pub fn load_model(path: impl AsRef<Path>) -> Result<ModelInstance> {
    InstanceFile::load(path)?.to_model()
}
