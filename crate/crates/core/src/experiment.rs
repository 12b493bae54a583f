//! Seeded Monte Carlo driver: one task per (grid point, run), executed on a
//! worker pool and folded back in a fixed order.

use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{realize_links, sample_los_state, LinkRealization};
use crate::config::{ExperimentConfig, GridPoint, PolicyKind, QuotaRule};
use crate::error::{Error, Result};
use crate::los::{update_with_mode, EstimatorMode, LosEstimate};
use crate::matching::{deferred_acceptance, describe, mmq_match, verify_with_budget, Matching, MatchingInstance};
use crate::metrics::RunMetrics;
use crate::policy::{association_instance, biased_argmax, compute_utilities, rssi_table, sinr_table, PolicyConfig, Tier};
use crate::rng::{self, Tag};
use crate::scenario::{generate_scenario, Scenario, ScenarioConfig};

/// One CSV row: a policy's outcome on one run of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRow {
    pub grid: usize,
    pub n_ue: usize,
    pub n_mmw: usize,
    pub n_muw: usize,
    pub c_th: f64,
    pub bias_rssi_db: f64,
    pub bias_sinr_db: f64,
    pub run: usize,
    pub seed: u64,
    pub policy: PolicyKind,
    /// Smallest minimum quota among the uW BSs in this run.
    pub muw_q_min: usize,
    /// Sum of the uW minimum quotas.
    pub muw_q_min_total: usize,
    /// CRE bias actually applied (baselines only).
    pub bias_db: Option<f64>,
    pub sum_rate_bps: f64,
    pub delta_kappa: usize,
    pub delta_kappa_mmw: usize,
    pub delta_kappa_muw: usize,
    pub load_mmw: usize,
    pub load_muw: usize,
    pub feasible: bool,
    pub blocking_pairs: usize,
    pub literal_blocking_pairs: usize,
    pub mean_rate_bps: f64,
    pub min_rate_bps: f64,
    pub p5_rate_bps: f64,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub row: RunRow,
    pub metrics: RunMetrics,
}

/// Means and standard errors per (grid point, policy).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub grid: usize,
    pub n_ue: usize,
    pub c_th: f64,
    pub bias_rssi_db: f64,
    pub bias_sinr_db: f64,
    pub policy: PolicyKind,
    pub runs: usize,
    pub mean_muw_q_min_total: f64,
    pub mean_bias_db: Option<f64>,
    pub mean_sum_rate_bps: f64,
    pub se_sum_rate_bps: f64,
    pub mean_delta_kappa: f64,
    pub se_delta_kappa: f64,
    pub mean_load_mmw: f64,
    pub mean_load_muw: f64,
    pub feasible_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub rows_path: PathBuf,
    pub aggregate_path: PathBuf,
    pub aggregates: Vec<AggregateRow>,
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.into_iter().collect();
    let n = v.len() as f64;
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn run_seed(base: u64, run: usize) -> u64 {
    base.wrapping_add(run as u64)
}

/// Per-BS quotas and policy knobs for one run.
pub fn resolve_policy(point: &GridPoint, scenario: &Scenario, seed: u64) -> Result<PolicyConfig> {
    let p = &point.policy;
    let (m, n1, n2) = (scenario.n_ue(), scenario.n_mmw(), scenario.n_muw());
    let n = n1 + n2;
    let mut policy = match p.quota {
        QuotaRule::Tiered => PolicyConfig::tiered(
            n1,
            n2,
            (p.mmw_q_min, p.mmw_q_max.unwrap_or(m)),
            (p.muw_q_min, p.muw_q_max.unwrap_or(m)),
        ),
        QuotaRule::Balanced => PolicyConfig::balanced(n, m),
        QuotaRule::Floor => PolicyConfig::with_quotas(vec![m / n; n], vec![m; n]),
        QuotaRule::RandomMuw | QuotaRule::RandomMuwShared => {
            let shared = p.quota == QuotaRule::RandomMuwShared;
            let draw = |i: usize| {
                let index = if shared { 0 } else { i as u64 };
                rng::stream(seed, Tag::Quota, index).random_range(0..=m / n2)
            };
            let mut q_min = vec![0; n];
            for (i, q) in q_min[n1..].iter_mut().enumerate() {
                *q = draw(i);
            }
            PolicyConfig::with_quotas(q_min, vec![m; n])
        }
    };
    policy.c_th = p.c_th.unwrap_or(f64::NEG_INFINITY);
    policy.bias_rssi_db = p.bias_rssi_db;
    policy.bias_sinr_db = p.bias_sinr_db;
    policy.rssi_bias_tier = p.rssi_bias_tier;
    policy.sinr_bias_tier = p.sinr_bias_tier;
    policy.validate(n)?;

    let sum_min: usize = policy.q_min.iter().sum();
    let sum_max: usize = policy.q_max.iter().sum();
    if !(sum_min <= m && m <= sum_max) {
        return Err(Error::config(
            "policy",
            format!("quotas admit no full assignment of {m} UEs (sum q_min {sum_min}, sum q_max {sum_max})"),
        ));
    }
    Ok(policy)
}

/// LoS observations a run is measured against.
struct Frames {
    /// LoS-slot counts per mmW pair for every frame but the last.
    counts: Vec<Array2<u32>>,
    /// LoS states of the slots of the measured (last) frame.
    measured: Vec<Array2<bool>>,
}

impl Frames {
    fn sample(scenario: &Scenario, seed: u64, frames: u32, slots: u32) -> Self {
        let slot = |i: u64| sample_los_state(scenario, &mut rng::stream(seed, Tag::Slots, i));
        let slots = u64::from(slots);
        let counts = (0..u64::from(frames) - 1)
            .map(|t| {
                let mut c = Array2::<u32>::zeros(scenario.los_prob.dim());
                for i in t * slots..(t + 1) * slots {
                    c.zip_mut_with(&slot(i), |acc, &los| *acc += u32::from(los));
                }
                c
            })
            .collect();
        let last = u64::from(frames) - 1;
        let measured = (last * slots..(last + 1) * slots).map(slot).collect();
        Frames { counts, measured }
    }
}

/// Runs a matching-based policy through the estimator frames; returns the
/// instance and matching of the last frame.
fn matching_policy(
    kind: PolicyKind,
    scenario: &Scenario,
    links: &LinkRealization,
    frames: &Frames,
    cfg: &ExperimentConfig,
    policy: &PolicyConfig,
) -> Result<(MatchingInstance, Matching)> {
    let est = &cfg.estimator;
    let solve = |f: &Array2<f64>| -> Result<(MatchingInstance, Matching)> {
        let util = compute_utilities(scenario, links, f)?;
        let instance = association_instance(&util, policy)?;
        let matching = match kind {
            PolicyKind::Mmq => mmq_match(&instance)?,
            _ => deferred_acceptance(&instance),
        };
        Ok((instance, matching))
    };
    if est.mode == EstimatorMode::Oracle {
        return solve(&scenario.los_prob);
    }

    let prior = LosEstimate::prior(est.smoothing, est.window_slots)?;
    let mut f = Array2::from_elem(scenario.los_prob.dim(), prior);
    for counts in &frames.counts {
        let (_, matching) = solve(&f.mapv(|e| e.value))?;
        for ((m, n), e) in f.indexed_iter_mut() {
            *e = update_with_mode(e, counts[[m, n]], matching.host_of(m) == Some(n), est.mode)?;
        }
    }
    solve(&f.mapv(|e| e.value))
}

/// The CRE bias to apply: fixed, or the candidate minimizing the load
/// difference (first one on ties).
fn baseline(metric: &Array2<f64>, n_mmw: usize, tier: Tier, fixed: f64, auto: Option<&[f64]>) -> (Matching, f64) {
    let Some(candidates) = auto else {
        return (biased_argmax(metric, n_mmw, fixed, tier), fixed);
    };
    let mut best: Option<(usize, Matching, f64)> = None;
    for &bias in candidates {
        let m = biased_argmax(metric, n_mmw, bias, tier);
        let dk = m.loads.iter().max().unwrap_or(&0) - m.loads.iter().min().unwrap_or(&0);
        if best.as_ref().is_none_or(|(b, _, _)| dk < *b) {
            best = Some((dk, m, bias));
        }
    }
    let (_, m, bias) = best.expect("non-empty candidates");
    (m, bias)
}

/// Simulates one run of one grid point for every enabled policy.
pub fn run_once(cfg: &ExperimentConfig, point: &GridPoint, run: usize) -> Result<Vec<RunRecord>> {
    let seed = run_seed(cfg.scenario.seed, run);
    let scenario_cfg = ScenarioConfig {
        seed,
        ..point.scenario.clone()
    };
    let scenario = generate_scenario(&scenario_cfg)?;
    let policy = resolve_policy(point, &scenario, seed)?;
    let links = realize_links(&scenario, &mut rng::stream(seed, Tag::Slots, 0));
    let frames = Frames::sample(&scenario, seed, cfg.estimator.frames, cfg.estimator.window_slots);
    let n1 = scenario.n_mmw();

    // Quota and stability checks of the baselines use the true-probability preferences.
    let reference = association_instance(&compute_utilities(&scenario, &links, &scenario.los_prob)?, &policy)?;
    let muw_q_min = policy.q_min[n1..].iter().copied().min().unwrap_or(0);
    let muw_q_min_total = policy.q_min[n1..].iter().sum();
    let auto = |c: &[f64]| point.policy.auto_bias.then_some(c.to_vec());

    let mut records = Vec::with_capacity(cfg.policies.len());
    for &kind in &cfg.policies {
        let (instance, matching, bias_db) = match kind {
            PolicyKind::Mmq | PolicyKind::Da => {
                let (instance, matching) = matching_policy(kind, &scenario, &links, &frames, cfg, &policy)?;
                (instance, matching, None)
            }
            PolicyKind::MaxRssi => {
                let cands = auto(&point.policy.rssi_bias_candidates_db);
                let (m, b) = baseline(&rssi_table(&scenario), n1, policy.rssi_bias_tier, policy.bias_rssi_db, cands.as_deref());
                (reference.clone(), m, Some(b))
            }
            PolicyKind::MaxSinr => {
                let cands = auto(&point.policy.sinr_bias_candidates_db);
                let (m, b) = baseline(&sinr_table(&scenario), n1, policy.sinr_bias_tier, policy.bias_sinr_db, cands.as_deref());
                (reference.clone(), m, Some(b))
            }
        };

        let report = verify_with_budget(&instance, &matching, 0)?;
        if kind == PolicyKind::Mmq && !(report.feasible && report.blocking_pairs.is_empty()) {
            return Err(Error::Verification {
                policy: kind.to_string(),
                run,
                detail: format!(
                    "grid point {}, seed {seed}\n{}instance:\n{}",
                    point.index,
                    describe(&matching, &report),
                    instance.to_text()
                ),
            });
        }

        let metrics = RunMetrics::compute(&matching, &links, &frames.measured, &scenario_cfg)?;
        let load_mmw = metrics.loads[..n1].iter().sum();
        records.push(RunRecord {
            row: RunRow {
                grid: point.index,
                n_ue: scenario.n_ue(),
                n_mmw: n1,
                n_muw: scenario.n_muw(),
                c_th: policy.c_th,
                bias_rssi_db: point.policy.bias_rssi_db,
                bias_sinr_db: point.policy.bias_sinr_db,
                run,
                seed,
                policy: kind,
                muw_q_min,
                muw_q_min_total,
                bias_db,
                sum_rate_bps: metrics.sum_rate_bps,
                delta_kappa: metrics.delta_kappa,
                delta_kappa_mmw: metrics.delta_kappa_mmw,
                delta_kappa_muw: metrics.delta_kappa_muw,
                load_mmw,
                load_muw: scenario.n_ue() - load_mmw,
                feasible: report.feasible,
                blocking_pairs: report.blocking_pairs.len(),
                literal_blocking_pairs: report.literal_blocking_pairs.len(),
                mean_rate_bps: metrics.mean_rate_bps(),
                min_rate_bps: metrics.min_rate_bps(),
                p5_rate_bps: metrics.p5_rate_bps(),
            },
            metrics,
        });
    }
    Ok(records)
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))
}

/// Runs every (grid point, run) task. Records come back ordered by grid
/// point, run, then policy, whatever the worker count.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let grid = cfg.grid();
    let tasks: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..cfg.n_runs).map(move |r| (g, r)))
        .collect();
    log::info!("{} grid points x {} runs on {} workers", grid.len(), cfg.n_runs, cfg.workers);
    let per_task: Vec<Vec<RunRecord>> = thread_pool(cfg.workers)?.install(|| {
        tasks
            .par_iter()
            .map(|&(g, r)| run_once(cfg, &grid[g], r))
            .collect::<Result<_>>()
    })?;
    Ok(per_task.into_iter().flatten().collect())
}

pub fn aggregate(cfg: &ExperimentConfig, records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut out = Vec::new();
    for point in cfg.grid() {
        for &kind in &cfg.policies {
            let rows: Vec<&RunRow> = records
                .iter()
                .map(|r| &r.row)
                .filter(|r| r.grid == point.index && r.policy == kind)
                .collect();
            let Some(first) = rows.first() else { continue };
            let n = rows.len() as f64;
            let (mean_sum_rate_bps, se_sum_rate_bps) = mean_and_se(rows.iter().map(|r| r.sum_rate_bps));
            let (mean_delta_kappa, se_delta_kappa) = mean_and_se(rows.iter().map(|r| r.delta_kappa as f64));
            let biases: Vec<f64> = rows.iter().filter_map(|r| r.bias_db).collect();
            out.push(AggregateRow {
                grid: point.index,
                n_ue: first.n_ue,
                c_th: first.c_th,
                bias_rssi_db: first.bias_rssi_db,
                bias_sinr_db: first.bias_sinr_db,
                policy: kind,
                runs: rows.len(),
                mean_muw_q_min_total: rows.iter().map(|r| r.muw_q_min_total as f64).sum::<f64>() / n,
                mean_bias_db: (!biases.is_empty()).then(|| biases.iter().sum::<f64>() / biases.len() as f64),
                mean_sum_rate_bps,
                se_sum_rate_bps,
                mean_delta_kappa,
                se_delta_kappa,
                mean_load_mmw: rows.iter().map(|r| r.load_mmw as f64).sum::<f64>() / n,
                mean_load_muw: rows.iter().map(|r| r.load_muw as f64).sum::<f64>() / n,
                feasible_fraction: rows.iter().filter(|r| r.feasible).count() as f64 / n,
            });
        }
    }
    out
}

/// `results.csv` -> `results.aggregate.csv`.
pub fn aggregate_path(rows_path: &Path) -> PathBuf {
    let stem = rows_path.file_stem().map_or_else(|| "results".into(), |s| s.to_string_lossy().into_owned());
    rows_path.with_file_name(format!("{stem}.aggregate.csv"))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Simulates, then writes the per-run CSV to `cfg.output` and the aggregate
/// next to it.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let records = simulate(cfg)?;
    let aggregates = aggregate(cfg, &records);
    let rows_path = cfg.output.clone();
    let aggregate_path = aggregate_path(&rows_path);
    write_csv(&rows_path, records.iter().map(|r| &r.row))?;
    write_csv(&aggregate_path, &aggregates)?;
    Ok(ExperimentSummary {
        rows_path,
        aggregate_path,
        aggregates,
    })
}

/// Best uW minimum quota for one network size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotaOptimum {
    pub n_ue: usize,
    pub q_star: usize,
    pub mean_sum_rate_bps: f64,
    /// `(q, mean sum rate)` for every feasible candidate.
    #[serde(skip)]
    pub candidates: Vec<(usize, f64)>,
}

/// For each `M`, runs MMQ with every candidate minimum quota on the uW BSs
/// (mmW minimum 0, maxima `M`) and returns the quota with the highest mean
/// sum rate. Candidates needing more UEs than exist are skipped.
pub fn optimal_min_quota_sweep(
    base: &ExperimentConfig,
    m_values: &[usize],
    quota_candidates: &[usize],
) -> Result<Vec<QuotaOptimum>> {
    let mut out = Vec::new();
    for &m in m_values {
        let n2 = base.scenario.n_muw;
        let (feasible, skipped): (Vec<usize>, Vec<usize>) = quota_candidates.iter().partition(|&&q| n2 * q <= m);
        if !skipped.is_empty() {
            log::warn!("M = {m}: skipping infeasible uW minimum quotas {skipped:?}");
        }
        if feasible.is_empty() {
            log::warn!("M = {m}: no feasible quota candidate");
            continue;
        }
        let mut cfg = base.clone();
        cfg.scenario.n_ue = m;
        cfg.policies = vec![PolicyKind::Mmq];
        cfg.policy.quota = QuotaRule::Tiered;
        cfg.policy.mmw_q_min = 0;
        cfg.policy.mmw_q_max = None;
        cfg.policy.muw_q_max = None;
        cfg.sweep = Default::default();
        cfg.sweep.muw_q_min = feasible.clone();
        let agg = aggregate(&cfg, &simulate(&cfg)?);
        let candidates: Vec<(usize, f64)> = feasible.iter().zip(&agg).map(|(&q, a)| (q, a.mean_sum_rate_bps)).collect();
        let &(q_star, best) = candidates
            .iter()
            .fold(None, |acc: Option<&(usize, f64)>, c| match acc {
                Some(b) if b.1 >= c.1 => Some(b),
                _ => Some(c),
            })
            .expect("non-empty");
        out.push(QuotaOptimum {
            n_ue: m,
            q_star,
            mean_sum_rate_bps: best,
            candidates,
        });
    }
    Ok(out)
}
