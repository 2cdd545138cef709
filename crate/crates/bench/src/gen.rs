//! Random instance generation.

use nyquist_core::{random_instance, Rng};
use std::path::{Path, PathBuf};

use crate::error::{BenchError, Result};
use crate::instance_file::InstanceFile;

pub fn instance_name(idx: usize) -> String {
    format!("inst-{idx:04}.json")
}

/// Write `count` instances; instance `i` uses the `i`-th seed split from `seed`.
pub fn generate(dim: usize, count: usize, seed: u64, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if dim < 2 {
        return Err(BenchError::BadArgs(format!("dim must be >= 2, got {dim}")));
    }
    if count < 1 {
        return Err(BenchError::BadArgs("count must be >= 1".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| BenchError::io(out_dir, e))?;
    let mut master = Rng::new(seed);
    let mut paths = Vec::with_capacity(count);
    for idx in 0..count {
        let child = master.split();
        let s = child.seed();
        let model = random_instance(dim, &mut Rng::new(s))?;
        let path = out_dir.join(instance_name(idx));
        InstanceFile::from_model(&model, Some(s)).save(&path)?;
        paths.push(path);
    }
    Ok(paths)
}
