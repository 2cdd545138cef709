//! Benchmark harness: instance files, derivative sweeps and CSV output.

pub mod csv_out;
pub mod error;
pub mod estimate;
pub mod fold_study;
pub mod gen;
pub mod instance_file;
pub mod percentiles;
pub mod sweep;

pub use error::{BenchError, Result};

/// Cap the global worker pool at `NYQ_THREADS` if set.
pub fn init_thread_pool() -> Result<()> {
    if let Ok(v) = std::env::var("NYQ_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| BenchError::BadArgs(format!("NYQ_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(BenchError::BadArgs("NYQ_THREADS must be positive".into()));
        }
        // A second initialization attempt is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
