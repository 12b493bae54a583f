//! Canned sweeps that produce plot-ready CSV for the five result figures.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ExperimentConfig, PolicyKind, QuotaRule};
use crate::error::{Error, Result};
use crate::experiment::{aggregate, optimal_min_quota_sweep, simulate, write_csv, AggregateRow, QuotaOptimum};
use crate::metrics::rate_cdf;

pub const FIGURE_IDS: [&str; 5] = ["fig3", "fig4", "fig5", "fig6", "fig7"];
pub const DEFAULT_FIGURE_RUNS: usize = 200;

#[derive(Debug, Clone)]
pub struct FigureOptions {
    pub n_runs: usize,
    pub seed: u64,
    /// 0 uses every core.
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            n_runs: DEFAULT_FIGURE_RUNS,
            seed: 0,
            workers: 0,
            out_dir: PathBuf::from("."),
        }
    }
}

fn base(opts: &FigureOptions) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        n_runs: opts.n_runs,
        workers: opts.workers,
        ..Default::default()
    };
    cfg.scenario.seed = opts.seed;
    cfg
}

fn step(from: usize, to: usize, by: usize) -> Vec<usize> {
    (from..=to).step_by(by).collect()
}

/// Sum rate vs. M: random uW minimum quotas for MMQ, load-balancing biases
/// for the baselines.
pub fn fig3_config(opts: &FigureOptions, m_values: &[usize]) -> ExperimentConfig {
    let mut cfg = base(opts);
    cfg.policies = vec![PolicyKind::Mmq, PolicyKind::MaxRssi, PolicyKind::MaxSinr];
    cfg.policy.quota = QuotaRule::RandomMuw;
    cfg.policy.auto_bias = true;
    cfg.sweep.n_ue = m_values.to_vec();
    cfg
}

pub fn fig3(opts: &FigureOptions, m_values: &[usize]) -> Result<Vec<AggregateRow>> {
    let cfg = fig3_config(opts, m_values);
    Ok(aggregate(&cfg, &simulate(&cfg)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotaRow {
    pub n_bs_per_tier: usize,
    pub n_ue: usize,
    pub q_star: usize,
    pub mean_sum_rate_bps: f64,
}

/// Sum-rate-optimal uW minimum quota vs. M with `N1 = N2 = n_bs`.
pub fn fig4(opts: &FigureOptions, n_bs: usize, m_values: &[usize]) -> Result<Vec<QuotaOptimum>> {
    let mut cfg = base(opts);
    cfg.scenario.n_mmw = n_bs;
    cfg.scenario.n_muw = n_bs;
    let max_q = m_values.iter().max().copied().unwrap_or(0) / n_bs.max(1);
    let candidates: Vec<usize> = (0..=max_q).collect();
    optimal_min_quota_sweep(&cfg, m_values, &candidates)
}

/// Mean load difference of MMQ and of one biased baseline over a bias grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasSweep {
    pub baseline: PolicyKind,
    pub m_values: Vec<usize>,
    pub biases_db: Vec<f64>,
    pub mmq_delta_kappa: Vec<f64>,
    /// `[m][bias]`.
    pub baseline_delta_kappa: Vec<Vec<f64>>,
}

impl BiasSweep {
    /// Lowest mean load difference of the baseline at `m_values[i]`.
    pub fn best_baseline(&self, i: usize) -> (f64, f64) {
        self.biases_db
            .iter()
            .zip(&self.baseline_delta_kappa[i])
            .map(|(&b, &d)| (b, d))
            .fold((f64::NAN, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
    }

    fn write(&self, path: &Path) -> Result<()> {
        let prefix = match self.baseline {
            PolicyKind::MaxRssi => "rssi",
            _ => "sinr",
        };
        let mut header = vec!["n_ue".to_string(), "mmq".to_string()];
        header.extend(self.biases_db.iter().map(|b| format!("{prefix}_{b}db")));
        let rows = self.m_values.iter().enumerate().map(|(i, m)| {
            let mut row = vec![m.to_string(), self.mmq_delta_kappa[i].to_string()];
            row.extend(self.baseline_delta_kappa[i].iter().map(f64::to_string));
            row
        });
        write_table(path, &header, rows)
    }
}

/// MMQ with every BS holding `floor(M/N)` minimum quota vs. a CRE baseline
/// at each fixed bias.
pub fn bias_sweep(opts: &FigureOptions, baseline: PolicyKind, m_values: &[usize], biases_db: &[f64]) -> Result<BiasSweep> {
    let mut mmq = base(opts);
    mmq.policies = vec![PolicyKind::Mmq];
    mmq.policy.quota = QuotaRule::Floor;
    mmq.sweep.n_ue = m_values.to_vec();
    let mmq_agg = aggregate(&mmq, &simulate(&mmq)?);

    let mut bl = base(opts);
    bl.policies = vec![baseline];
    bl.sweep.n_ue = m_values.to_vec();
    match baseline {
        PolicyKind::MaxRssi => bl.sweep.bias_rssi_db = biases_db.to_vec(),
        PolicyKind::MaxSinr => bl.sweep.bias_sinr_db = biases_db.to_vec(),
        other => return Err(Error::config("baseline", format!("{other} takes no bias"))),
    }
    let bl_agg = aggregate(&bl, &simulate(&bl)?);

    Ok(BiasSweep {
        baseline,
        m_values: m_values.to_vec(),
        biases_db: biases_db.to_vec(),
        mmq_delta_kappa: mmq_agg.iter().map(|a| a.mean_delta_kappa).collect(),
        baseline_delta_kappa: bl_agg
            .chunks(biases_db.len())
            .map(|c| c.iter().map(|a| a.mean_delta_kappa).collect())
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfRow {
    pub policy: PolicyKind,
    pub rate_bps: f64,
    pub cdf: f64,
}

/// Empirical CDF of per-UE rates on the uW band at M = 100 with gating.
pub fn fig7(opts: &FigureOptions) -> Result<Vec<CdfRow>> {
    let mut cfg = base(opts);
    cfg.scenario.n_ue = 100;
    cfg.policies = vec![PolicyKind::Mmq, PolicyKind::MaxRssi, PolicyKind::MaxSinr];
    cfg.policy.c_th = Some(0.5);
    cfg.policy.muw_q_min = 8;
    cfg.policy.auto_bias = true;
    let records = simulate(&cfg)?;
    let mut rows = Vec::new();
    for &kind in &cfg.policies {
        let samples: Vec<f64> = records
            .iter()
            .filter(|r| r.row.policy == kind)
            .flat_map(|r| r.metrics.muw_rate_samples.iter().copied())
            .collect();
        if samples.is_empty() {
            log::warn!("{kind}: no UE served on the uW band");
            continue;
        }
        rows.extend(rate_cdf(&samples)?.into_iter().map(|(rate_bps, cdf)| CdfRow {
            policy: kind,
            rate_bps,
            cdf,
        }));
    }
    Ok(rows)
}

fn write_table(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Runs the named figure's sweep and writes `<out_dir>/<id>.csv`.
pub fn run_figure(id: &str, opts: &FigureOptions) -> Result<PathBuf> {
    let path = opts.out_dir.join(format!("{id}.csv"));
    match id {
        "fig3" => write_csv(&path, fig3(opts, &step(10, 100, 10))?)?,
        "fig4" => {
            let mut rows = Vec::new();
            for n_bs in [5, 10, 15] {
                rows.extend(fig4(opts, n_bs, &step(20, 100, 10))?.into_iter().map(|q| QuotaRow {
                    n_bs_per_tier: n_bs,
                    n_ue: q.n_ue,
                    q_star: q.q_star,
                    mean_sum_rate_bps: q.mean_sum_rate_bps,
                }));
            }
            write_csv(&path, rows)?
        }
        "fig5" => {
            let biases: Vec<f64> = (0..=6).map(|k| 10.0 * f64::from(k)).collect();
            bias_sweep(opts, PolicyKind::MaxRssi, &[30, 50, 70, 90], &biases)?.write(&path)?
        }
        "fig6" => {
            let biases: Vec<f64> = (0..=10).map(|k| 2.0 * f64::from(k)).collect();
            bias_sweep(opts, PolicyKind::MaxSinr, &[30, 50, 70, 90], &biases)?.write(&path)?
        }
        "fig7" => write_csv(&path, fig7(opts)?)?,
        other => return Err(Error::UnknownFigure(other.to_string())),
    }
    Ok(path)
}
