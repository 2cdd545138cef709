//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p nyquist-bench --test acceptance`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use nyquist_bench::fold_study::{fold_table, CompiledStudy, FoldStudy};
use nyquist_bench::gen::generate;
use nyquist_bench::instance_file::load_model;
use nyquist_bench::percentiles::summarize;
use nyquist_bench::sweep::{compare, grid, sweep_table};
use nyquist_core::folding::mean_magnitude_bound;
use nyquist_core::linalg::{cmat, spectral_norm};
use nyquist_core::numeric::{linspace, loglog_slope};
use nyquist_core::{
    aspsr_derivative, dirichlet_rule, nyquist, obvious_estimate, random_instance, shift_fold,
    AspsrConfig, HermitianOperator, ModelInstance, Rng, ShotOracle,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random(dim: usize, seed: u64) -> ModelInstance {
    random_instance(dim, &mut Rng::new(seed)).unwrap()
}

fn cosine_instance() -> ModelInstance {
    let plus = cmat(&[&[(0.5, 0.0), (0.5, 0.0)], &[(0.5, 0.0), (0.5, 0.0)]]);
    ModelInstance::new(
        HermitianOperator::pauli_z(),
        HermitianOperator::zeros(2),
        plus,
        HermitianOperator::pauli_x(),
    )
    .unwrap()
}

fn commuting_instance_with_b() -> ModelInstance {
    let z = HermitianOperator::pauli_z();
    let id = HermitianOperator::identity(2);
    let plus = cmat(&[&[(0.5, 0.0), (0.5, 0.0)], &[(0.5, 0.0), (0.5, 0.0)]]);
    let zero = cmat(&[&[(1.0, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (0.0, 0.0)]]);
    ModelInstance::new(
        z.kron(&id),
        id.kron(&z).scale(0.7),
        plus.kronecker(&zero),
        HermitianOperator::pauli_x().kron(&id),
    )
    .unwrap()
}

fn out_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target/acceptance")
}

fn norm_optimality() -> Outcome {
    let gap = PI - nyquist(0.5, 10_000).unwrap().norm();
    let tol = 4.0 * 0.5 / (PI * 9999.5);
    let gaps: Vec<f64> = [10, 100, 1000, 10_000]
        .iter()
        .map(|&n| 2.0 * PI * 3.0 - nyquist(3.0, n).unwrap().norm())
        .collect();
    let converging = gaps.windows(2).all(|w| w[1] < w[0]);
    outcome(
        gap > 0.0 && gap <= tol && converging,
        format!("gap={gap:.3e} <= {tol:.3e}; K=3 gaps [{}]", gaps.iter().map(|g| format!("{g:.2e}")).collect::<Vec<_>>().join(", ")),
    )
}

/// `f` on the lattice `{j/400}`, filled on demand.
struct LatticeCache<'a> {
    model: &'a ModelInstance,
    values: HashMap<i64, f64>,
}

impl LatticeCache<'_> {
    const SCALE: f64 = 400.0;

    fn get(&mut self, q: f64) -> f64 {
        let j = (q * Self::SCALE).round();
        assert!((q * Self::SCALE - j).abs() < 1e-6, "{q} is off the lattice");
        let model = self.model;
        *self
            .values
            .entry(j as i64)
            .or_insert_with(|| model.expectation(j / Self::SCALE).unwrap())
    }
}

fn near_feasibility() -> Outcome {
    // Grid spacing 1/50 and atom spacing 1/4 keep every query on the 1/400 lattice.
    let xs: Vec<f64> = (0..200).map(|i| (i as f64 - 100.0) / 50.0).collect();
    let ns = [100usize, 1000];
    let rules: Vec<_> = ns.iter().map(|&n| nyquist(2.0, n).unwrap()).collect();
    let per_instance: Vec<[f64; 2]> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let model = random(4, 1000 + seed);
            let mut cache = LatticeCache {
                model: &model,
                values: HashMap::new(),
            };
            let mut errs = [0.0f64; 2];
            for &x in &xs {
                let fp = model.derivative(x).unwrap();
                for (k, rule) in rules.iter().enumerate() {
                    let est = rule.convolve(|q| cache.get(q), x);
                    errs[k] = errs[k].max((est - fp).abs());
                }
            }
            errs
        })
        .collect();
    let mut pass = true;
    let mut worst = [0.0f64; 2];
    let mut ratios = Vec::new();
    for errs in &per_instance {
        for (k, &n) in ns.iter().enumerate() {
            pass &= errs[k] <= 8.0 / (PI * (n as f64 - 0.5));
            worst[k] = worst[k].max(errs[k]);
        }
        ratios.push(errs[0] / errs[1]);
    }
    let agg = worst[0] / worst[1];
    let scaling = (10.0 / 3.0..=30.0).contains(&agg);
    ratios.sort_by(f64::total_cmp);
    outcome(
        pass && scaling,
        format!(
            "max err N=100 {:.3e} (tol {:.3e}), N=1000 {:.3e} (tol {:.3e}); err ratio {agg:.2} in [3.33, 30]; per-instance ratios {:.2}..{:.2}",
            worst[0],
            8.0 / (PI * 99.5),
            worst[1],
            8.0 / (PI * 999.5),
            ratios[0],
            ratios[ratios.len() - 1]
        ),
    )
}

fn fourier_characterization() -> Outcome {
    let n = 10_000;
    let mu = nyquist(0.5, n).unwrap().reflect_at_half();
    let tol = 4.0 / (PI * (n as f64 - 0.5));
    let err = linspace(-0.5, 0.5, 101)
        .into_iter()
        .map(|xi| {
            let want = Complex64::new(0.0, -2.0 * PI * xi) * Complex64::from_polar(1.0, -PI * xi);
            (mu.fourier_stieltjes(xi) - want).norm()
        })
        .fold(0.0, f64::max);
    outcome(err <= tol, format!("max err {err:.3e} <= {tol:.3e}"))
}

fn shift_fold_identity() -> Outcome {
    let folded = shift_fold(&nyquist(1.0, 1_000_000).unwrap(), 2.0).unwrap();
    let want = dirichlet_rule(1.0, 0.5).unwrap();
    let same_support = folded.shifts() == want.shifts();
    let err = folded
        .weights()
        .iter()
        .zip(want.weights())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    outcome(
        same_support && err <= 3e-6,
        format!("{} atoms, same support {same_support}, max weight err {err:.3e} <= 3e-6", folded.len()),
    )
}

fn parameter_folding() -> Outcome {
    let p = 0.5;
    let cs = vec![2.0, 4.0, 8.0, 16.0];
    let compiled = CompiledStudy::new(FoldStudy::new(p, cs.clone()), 2.0).unwrap();
    let xs = linspace(-p, p, compiled.study.points);
    let mut pass = true;
    let mut slopes = Vec::new();
    let mut worst = vec![0.0f64; cs.len()];
    let mut notes = Vec::new();
    for seed in 0..10u64 {
        let model = random(4, 2000 + seed);
        let rows = compiled.run(&model).unwrap();
        if seed == 0 {
            fold_table(&rows, p)
                .write_file(out_dir().join("fold_study.csv"))
                .unwrap();
        }
        for r in &rows {
            if r.max_err_inside > r.bound + r.truncation_tol {
                pass = false;
                notes.push(format!("seed {seed} c {}: err {:.3e} > bound {:.3e}", r.c, r.max_err_inside, r.bound));
            }
            if r.max_mopv >= r.c + p {
                pass = false;
                notes.push(format!("seed {seed} c {}: max mopv {}", r.c, r.max_mopv));
            }
        }
        for (rule, &c) in compiled.rules().iter().zip(&cs) {
            for &x in &xs {
                let (mean, _) = rule.magnitude_stats(x).unwrap();
                if mean > mean_magnitude_bound(2.0, p, c, x) {
                    pass = false;
                    notes.push(format!("c {c} x {x}: mean mopv {mean}"));
                }
            }
        }
        let errs: Vec<f64> = rows.iter().map(|r| r.max_err_inside).collect();
        for (w, e) in worst.iter_mut().zip(&errs) {
            *w = w.max(*e);
        }
        slopes.push(loglog_slope(&cs, &errs));
    }
    let slope = loglog_slope(&cs, &worst);
    if !(-2.5..=-1.5).contains(&slope) {
        pass = false;
    }
    let (lo, hi) = slopes
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &s| (a.min(s), b.max(s)));
    outcome(
        pass,
        format!("worst-case err [{}] slope {slope:.3} in [-2.5, -1.5] (per-instance slopes {lo:.2}..{hi:.2}); bounds and magnitudes hold{}",
            worst.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", "), if notes.is_empty() { String::new() } else { format!("; {}", notes.join("; ")) }),
    )
}

fn aspsr_correctness() -> Outcome {
    let grid100 = linspace(-3.0, 3.0, 100);
    let mut comm_err: f64 = 0.0;
    for model in [cosine_instance(), commuting_instance_with_b()] {
        for eps in [1e-1, 3e-2, 1e-2, 3e-3, 1e-3] {
            let cfg = AspsrConfig::new(eps).unwrap();
            for &x in &grid100 {
                let d = aspsr_derivative(&model, x, &cfg).unwrap();
                comm_err = comm_err.max((d - model.derivative(x).unwrap()).abs());
            }
        }
    }
    let eps = [1e-1, 3e-2, 1e-2, 3e-3];
    let grid41 = linspace(-2.0, 2.0, 41);
    let slopes: Vec<f64> = (0..5u64)
        .map(|seed| {
            let model = random(4, 3000 + seed);
            let errs: Vec<f64> = eps
                .iter()
                .map(|&e| {
                    let cfg = AspsrConfig::new(e).unwrap();
                    grid41
                        .iter()
                        .map(|&x| (aspsr_derivative(&model, x, &cfg).unwrap() - model.derivative(x).unwrap()).abs())
                        .fold(0.0, f64::max)
                })
                .collect();
            loglog_slope(&eps, &errs)
        })
        .collect();
    let slopes_ok = slopes.iter().all(|s| (s - 1.0).abs() <= 0.3);
    outcome(
        comm_err <= 1e-9 && slopes_ok,
        format!("commuting max err {comm_err:.2e} <= 1e-9; slopes {slopes:.3?} in [0.7, 1.3]"),
    )
}

fn estimator_statistics() -> Outcome {
    let shots = 1_000_000;
    let mut pass = true;
    let mut details = Vec::new();
    for (seed, x, n) in [(1u64, 0.0, 64usize), (2, 0.37, 1000), (3, -1.2, 10_000)] {
        let model = random(4, 4000 + seed);
        let phi = nyquist(2.0, n).unwrap();
        let target = phi.try_convolve(|q| model.expectation(q), x).unwrap();
        let mut oracle = ShotOracle::new(&model, Rng::new(seed)).unwrap();
        let r = obvious_estimate(&mut oracle, &phi, x, shots).unwrap();
        let z = (r.mean - target).abs() / r.standard_error();
        let predicted = phi.norm().powi(2) - target * target;
        let rel = (r.empirical_variance - predicted).abs() / predicted;
        pass &= z <= 5.0 && rel <= 0.02;
        details.push(format!("z={z:.2} var gap {:.3}%", 100.0 * rel));
    }
    outcome(pass, format!("10^6 shots: {} (limits z<=5, 2%)", details.join(", ")))
}

fn derivative_oracle() -> Outcome {
    let mut rng = Rng::new(5000);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let dim = 2 + (rng.next_u64() % 7) as usize;
        let model = random_instance(dim, &mut rng.split()).unwrap();
        let x = 20.0 * rng.uniform() - 10.0;
        let fd = (model.expectation(x + h).unwrap() - model.expectation(x - h).unwrap()) / (2.0 * h);
        worst = worst.max((model.derivative(x).unwrap() - fd).abs());
    }
    outcome(worst <= 1e-6, format!("max |DK - FD| {worst:.2e} <= 1e-6"))
}

/// Max of `|t f₀(t)|` over `±[x, x+1]` sampled at spacing 1/64.
fn decay_envelope(d: &nyquist_core::Decomposition, x: f64) -> f64 {
    (0..=64)
        .flat_map(|i| {
            let t = x + i as f64 / 64.0;
            [t, -t]
        })
        .map(|t| (t * d.f0(t).unwrap()).abs())
        .fold(0.0, f64::max)
}

fn decomposition_bounds() -> Outcome {
    let xs = linspace(-20.0, 20.0, 200);
    let probes = [10.0, 20.0, 40.0, 80.0];
    let mut pass = true;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_slope = f64::MIN;
    for seed in 0..20u64 {
        let model = random(4, 6000 + seed);
        let d = model.decompose().unwrap();
        let g = model.gamma().unwrap();
        for &x in &xs {
            let dist = spectral_norm(&(model.unitary(x).unwrap() - d.unitary_tilde(x)));
            worst_ratio = worst_ratio.max(dist / (2.0 * PI * g.value));
            pass &= dist <= 2.0 * PI * g.value + 1e-12;
        }
        let env: Vec<f64> = probes.iter().map(|&x| decay_envelope(&d, x)).collect();
        let slope = loglog_slope(&probes, &env);
        worst_slope = worst_slope.max(slope);
        pass &= slope <= 0.5;
    }
    outcome(
        pass,
        format!("max ||U-Ũ||/(2πΓ) {worst_ratio:.3} <= 1; max log-log slope of |x f₀| envelope {worst_slope:.2} <= 0.5"),
    )
}

fn experiment_reproduction() -> Outcome {
    let dir = out_dir();
    let inst_dir = dir.join("instances");
    let paths = generate(8, 200, 20_240_101, &inst_dir).unwrap();
    let models: Vec<ModelInstance> = paths.iter().map(|p| load_model(p).unwrap()).collect();
    let eps = 1e-2;
    let xs = grid(0.0, 13.0, 300).unwrap();
    let sweeps: Vec<_> = models
        .par_iter()
        .map(|m| compare(m, eps, &xs).unwrap())
        .collect();
    sweep_table(&sweeps[0])
        .write_file(dir.join("compare_inst0.csv"))
        .unwrap();
    let curves: Vec<Vec<f64>> = sweeps
        .iter()
        .map(|rows| rows.iter().map(|r| r.aspsr_rel_err - r.nyquist_rel_err).collect())
        .collect();
    let table = summarize(&xs, &curves);
    table.write_file(dir.join("percentiles.csv")).unwrap();
    let upto9: Vec<&Vec<f64>> = table.rows.iter().filter(|r| r[0] <= 9.0).collect();
    let p10_pos = upto9.iter().filter(|r| r[4] > 0.0).count() as f64 / upto9.len() as f64;
    let median_ok = table
        .rows
        .iter()
        .filter(|r| r[0] <= 12.0)
        .all(|r| r[2] > 0.0);
    let first_bad_median = table
        .rows
        .iter()
        .find(|r| r[2] <= 0.0)
        .map_or(f64::NAN, |r| r[0]);
    outcome(
        p10_pos >= 0.9 && median_ok,
        format!(
            "p10 > 0 at {:.1}% of x <= 9 (need 90%); median > 0 for all x <= 12: {median_ok} (first non-positive at x={first_bad_median:.3}); CSVs in target/acceptance",
            100.0 * p10_pos
        ),
    )
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; a name filter
    // selects criteria by substring.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    std::fs::create_dir_all(out_dir()).unwrap();
    type Check = fn() -> Outcome;
    let criteria: [(&str, &str, Check, u64); 10] = [
        ("C1", "norm-optimality", norm_optimality, 1),
        ("C2", "near-feasibility", near_feasibility, 30),
        ("C3", "fourier-characterization", fourier_characterization, 1),
        ("C4", "shift-fold-identity", shift_fold_identity, 5),
        ("C5", "parameter-folding", parameter_folding, 120),
        ("C6", "aspsr-correctness", aspsr_correctness, 60),
        ("C7", "estimator-statistics", estimator_statistics, 60),
        ("C8", "derivative-oracle", derivative_oracle, 10),
        ("C9", "decomposition-bounds", decomposition_bounds, 30),
        ("C10", "experiment-reproduction", experiment_reproduction, 600),
    ];
    let mut failures = 0;
    let mut ran = 0;
    for (id, name, check, limit) in criteria {
        if let Some(f) = &filter {
            if !name.contains(f.as_str()) && id != f {
                continue;
            }
        }
        ran += 1;
        let t = Instant::now();
        let o = check();
        let dt = t.elapsed();
        let fast = dt < Duration::from_secs(limit);
        let ok = o.pass && fast;
        if !ok {
            failures += 1;
        }
        println!(
            "{} {id} {name}: {} [{:.2}s, limit {limit}s]",
            if ok { "PASS" } else { "FAIL" },
            o.detail,
            dt.as_secs_f64()
        );
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
