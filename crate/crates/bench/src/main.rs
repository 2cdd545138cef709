use clap::{Parser, Subcommand};
use std::path::PathBuf;

use nyquist_bench::estimate::{run_estimate, EstimateArgs, RuleKind};
use nyquist_bench::fold_study::{fold_table, CompiledStudy, FoldStudy};
use nyquist_bench::instance_file::load_model;
use nyquist_bench::percentiles::percentile_table;
use nyquist_bench::sweep::{compare, grid, sweep_table};
use nyquist_bench::{gen, init_thread_pool, BenchError, Result};

#[derive(Parser)]
#[command(name = "nyq-bench", version, about = "Shift-rule derivative benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate random instances as inst-NNNN.json files.
    Gen {
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare STNySR and ASPSR derivatives on a parameter grid.
    Compare {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[arg(long, default_value_t = -13.0, allow_hyphen_values = true)]
        xmin: f64,
        #[arg(long, default_value_t = 13.0, allow_hyphen_values = true)]
        xmax: f64,
        #[arg(long, default_value_t = 300)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Percentiles of (aspsr_rel_err - nyquist_rel_err) across instances.
    Percentiles {
        /// Instance files.
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        xmin: f64,
        #[arg(long, default_value_t = 13.0, allow_hyphen_values = true)]
        xmax: f64,
        #[arg(long, default_value_t = 300)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parameter-folding error and parameter magnitudes for several c.
    FoldStudy {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Comma-separated list of c values (multiples of p).
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        c: Vec<f64>,
        /// Nyquist truncation.
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shot-based derivative estimate, reported as JSON.
    Estimate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = RuleKind::Nyquist)]
        rule: RuleKind,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 4.0)]
        c: f64,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        /// Output JSON path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    init_thread_pool()?;
    match cli.cmd {
        Cmd::Gen {
            dim,
            count,
            seed,
            out,
        } => {
            let paths = gen::generate(dim, count, seed, &out)?;
            eprintln!("wrote {} instance(s) to {}", paths.len(), out.display());
        }
        Cmd::Compare {
            instance,
            eps,
            xmin,
            xmax,
            points,
            out,
        } => {
            let model = load_model(&instance)?;
            let xs = grid(xmin, xmax, points)?;
            sweep_table(&compare(&model, eps, &xs)?).write_file(&out)?;
        }
        Cmd::Percentiles {
            instances,
            eps,
            xmin,
            xmax,
            points,
            out,
        } => {
            let models = instances
                .iter()
                .map(load_model)
                .collect::<Result<Vec<_>>>()?;
            let xs = grid(xmin, xmax, points)?;
            percentile_table(&models, eps, &xs)?.write_file(&out)?;
        }
        Cmd::FoldStudy {
            instance,
            p,
            c,
            n,
            points,
            out,
        } => {
            let model = load_model(&instance)?;
            let mut study = FoldStudy::new(p, c);
            study.n = n;
            study.points = points;
            let compiled = CompiledStudy::new(study, model.k())?;
            fold_table(&compiled.run(&model)?, p).write_file(&out)?;
        }
        Cmd::Estimate {
            instance,
            rule,
            x,
            shots,
            seed,
            n,
            p,
            c,
            eps,
            out,
        } => {
            let model = load_model(&instance)?;
            let args = EstimateArgs {
                rule,
                x,
                shots,
                seed,
                n,
                p,
                c,
                eps,
            };
            let report = run_estimate(&model, &args)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| BenchError::io(&path, e))?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
