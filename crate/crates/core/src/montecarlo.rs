//! Seeded batch experiments and their aggregation.
//!
//! Trial `i` of size `n_t` draws its instance from
//! `trial_seed(master, n_t, i)`, a SplitMix64 hash of the three values, so
//! results do not depend on how trials are scheduled across workers.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::baseline::plan_sequential;
use crate::config::PlannerConfig;
use crate::cost::{time_demand, CostParams};
use crate::error::{Error, Result};
use crate::grid::{count_target_vacancies, random_grid, total_side, InstanceSpec};
use crate::moves::move_distance_sites;
use crate::sequencer::{plan, FailureReason};

/// Header of the benchmark CSV.
pub const CSV_HEADER: &str = "Qubit,AMC,MCStd,AMD,MDStd,AMT13,MTStd13,AMT55,MTStd55,SRate,CTime";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// The composite-move sequencer.
    #[default]
    Parallel,
    /// The single-trap baseline.
    Sequential,
}

/// Instance sizes and draw parameters of a benchmark sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub sizes: Vec<usize>,
    pub ratio: f64,
    pub fill: f64,
    pub master_seed: u64,
}

/// Metrics of one successful plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub move_count: usize,
    /// Summed per-substep maxima, in sites.
    pub distance_sites: f64,
    /// µs under the `tm` preset (with the configured site pitch).
    pub time_tm: f64,
    /// µs under the `tm2` preset.
    pub time_tm2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub seed: u64,
    pub initial_vacancies: usize,
    pub result: std::result::Result<TrialMetrics, FailureReason>,
    pub walltime_us: f64,
}

/// Aggregates over the trials of one size. Averages and standard deviations
/// (sample, n − 1) cover successful trials only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub n_t: usize,
    pub trials: usize,
    pub successes: usize,
    pub no_progress: usize,
    pub success_rate: f64,
    pub avg_move_count: f64,
    pub move_count_std: f64,
    /// Sites.
    pub avg_distance: f64,
    pub distance_std: f64,
    pub avg_time_tm: f64,
    pub time_tm_std: f64,
    pub avg_time_tm2: f64,
    pub time_tm2_std: f64,
    pub avg_planner_walltime_us: f64,
    /// Over all trials.
    pub avg_initial_vacancies: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` at size `n_t`.
pub fn trial_seed(master: u64, n_t: usize, index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ n_t as u64) ^ index as u64)
}

/// Plans one instance and measures the outcome.
pub fn run_trial(spec: &InstanceSpec, config: &PlannerConfig, algorithm: Algorithm) -> Result<TrialOutcome> {
    let (grid, region) = random_grid(spec)?;
    let initial_vacancies = count_target_vacancies(&grid, &region);
    let start = Instant::now();
    let outcome = match algorithm {
        Algorithm::Parallel => plan(&grid, &region, config)?,
        Algorithm::Sequential => plan_sequential(&grid, &region, config)?,
    };
    let walltime_us = start.elapsed().as_secs_f64() * 1e6;
    let pitch = config.cost.site_pitch;
    let tm = CostParams { site_pitch: pitch, ..CostParams::preset_tm() };
    let tm2 = CostParams { site_pitch: pitch, ..CostParams::preset_tm2() };
    let result = outcome
        .map(|p| TrialMetrics {
            move_count: p.move_count,
            distance_sites: p.moves.iter().map(move_distance_sites).sum(),
            time_tm: p.moves.iter().map(|m| time_demand(&tm, m)).sum(),
            time_tm2: p.moves.iter().map(|m| time_demand(&tm2, m)).sum(),
        })
        .map_err(|f| f.reason);
    Ok(TrialOutcome { seed: spec.seed, initial_vacancies, result, walltime_us })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Folds trial outcomes, in trial order, into statistics.
pub fn aggregate(n_t: usize, outcomes: &[TrialOutcome]) -> TrialStats {
    let ok: Vec<&TrialMetrics> = outcomes.iter().filter_map(|o| o.result.as_ref().ok()).collect();
    let column = |f: fn(&TrialMetrics) -> f64| mean_std(&ok.iter().map(|m| f(m)).collect::<Vec<_>>());
    let (avg_move_count, move_count_std) = column(|m| m.move_count as f64);
    let (avg_distance, distance_std) = column(|m| m.distance_sites);
    let (avg_time_tm, time_tm_std) = column(|m| m.time_tm);
    let (avg_time_tm2, time_tm2_std) = column(|m| m.time_tm2);
    let walltimes: Vec<f64> = outcomes.iter().filter(|o| o.result.is_ok()).map(|o| o.walltime_us).collect();
    let vacancies: Vec<f64> = outcomes.iter().map(|o| o.initial_vacancies as f64).collect();
    let trials = outcomes.len();
    TrialStats {
        n_t,
        trials,
        successes: ok.len(),
        no_progress: outcomes
            .iter()
            .filter(|o| o.result == Err(FailureReason::NoProgress))
            .count(),
        success_rate: if trials == 0 { 0.0 } else { ok.len() as f64 / trials as f64 },
        avg_move_count,
        move_count_std,
        avg_distance,
        distance_std,
        avg_time_tm,
        time_tm_std,
        avg_time_tm2,
        time_tm2_std,
        avg_planner_walltime_us: mean_std(&walltimes).0,
        avg_initial_vacancies: mean_std(&vacancies).0,
    }
}

/// Runs `trials` instances per size on up to `workers` threads.
pub fn run_trials(
    sweep: &Sweep,
    config: &PlannerConfig,
    trials: usize,
    workers: usize,
    algorithm: Algorithm,
) -> Result<Vec<TrialStats>> {
    if trials == 0 || workers == 0 {
        return Err(Error::Config("trials and workers must be at least 1".into()));
    }
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        sweep
            .sizes
            .iter()
            .map(|&n_t| {
                let outcomes = (0..trials)
                    .into_par_iter()
                    .map(|i| {
                        let spec = InstanceSpec::new(n_t, sweep.ratio, sweep.fill, trial_seed(sweep.master_seed, n_t, i))?;
                        run_trial(&spec, config, algorithm)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(aggregate(n_t, &outcomes))
            })
            .collect()
    })
}

/// P[Binomial(total_sites, f) ≥ n_t].
pub fn binomial_success_probability(total_sites: usize, f: f64, n_t: usize) -> f64 {
    if n_t == 0 {
        return 1.0;
    }
    if n_t > total_sites || f <= 0.0 {
        return 0.0;
    }
    if f >= 1.0 {
        return 1.0;
    }
    let dist = Binomial::new(f, total_sites as u64).expect("probability checked above");
    dist.sf(n_t as u64 - 1)
}

/// Chance that a freshly loaded square array of side ⌈√n_t·r⌉ holds at
/// least `n_t` atoms, for each size.
pub fn feasibility_curve(ratio: f64, f: f64, sizes: &[usize]) -> Vec<(usize, f64)> {
    sizes
        .iter()
        .map(|&n| {
            let side = total_side(n, ratio);
            (n, binomial_success_probability(side * side, f, n))
        })
        .collect()
}

/// Benchmark table; `CTime` is written as 0 when `walltime` is false so the
/// output is reproducible byte for byte.
pub fn stats_to_csv(stats: &[TrialStats], walltime: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in stats {
        let ctime = if walltime { s.avg_planner_walltime_us } else { 0.0 };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            s.n_t,
            s.avg_move_count,
            s.move_count_std,
            s.avg_distance,
            s.distance_std,
            s.avg_time_tm,
            s.time_tm_std,
            s.avg_time_tm2,
            s.time_tm2_std,
            s.success_rate,
            ctime
        );
    }
    out
}
