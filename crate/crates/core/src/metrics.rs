//! Loads, load imbalance and achievable rates under equal bandwidth sharing.

use ndarray::Array2;

use crate::channel::LinkRealization;
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::scenario::ScenarioConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub loads: Vec<usize>,
    /// Max minus min load over all BSs.
    pub delta_kappa: usize,
    pub delta_kappa_mmw: usize,
    pub delta_kappa_muw: usize,
    pub per_ue_rate_bps: Vec<f64>,
    pub sum_rate_bps: f64,
    /// Rates of the UEs served by uW BSs.
    pub muw_rate_samples: Vec<f64>,
}

impl RunMetrics {
    /// Metrics of `matching` with rates averaged over the LoS states of
    /// `slots`; with no slots the realization's own LoS state is used.
    pub fn compute(
        matching: &Matching,
        links: &LinkRealization,
        slots: &[Array2<bool>],
        config: &ScenarioConfig,
    ) -> Result<Self> {
        let n1 = links.se_mmw_los.ncols();
        let loads = load_vector(matching);
        let per_ue_rate_bps = if slots.is_empty() {
            achievable_rates(matching, links, config)
        } else {
            frame_rates(matching, links, slots, config)
        };
        let muw_rate_samples = per_ue_rate_bps
            .iter()
            .zip(&matching.agent_to_host)
            .filter(|(_, h)| h.is_some_and(|h| h >= n1))
            .map(|(r, _)| *r)
            .collect();
        let tier_delta = |part: &[usize]| max_load_difference(part).unwrap_or(0);
        Ok(RunMetrics {
            delta_kappa: max_load_difference(&loads)?,
            delta_kappa_mmw: tier_delta(&loads[..n1]),
            delta_kappa_muw: tier_delta(&loads[n1..]),
            sum_rate_bps: per_ue_rate_bps.iter().sum(),
            loads,
            per_ue_rate_bps,
            muw_rate_samples,
        })
    }

    pub fn mean_rate_bps(&self) -> f64 {
        if self.per_ue_rate_bps.is_empty() {
            return 0.0;
        }
        self.sum_rate_bps / self.per_ue_rate_bps.len() as f64
    }

    pub fn min_rate_bps(&self) -> f64 {
        self.per_ue_rate_bps.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// 5th percentile per-UE rate (nearest rank).
    pub fn p5_rate_bps(&self) -> f64 {
        let mut r = self.per_ue_rate_bps.clone();
        if r.is_empty() {
            return 0.0;
        }
        r.sort_by(f64::total_cmp);
        let rank = (0.05 * r.len() as f64).ceil().max(1.0) as usize;
        r[rank - 1]
    }
}

/// Number of UEs on each BS, counted from the UE side.
pub fn load_vector(matching: &Matching) -> Vec<usize> {
    let mut loads = vec![0; matching.n_hosts()];
    for h in matching.agent_to_host.iter().flatten() {
        loads[*h] += 1;
    }
    loads
}

pub fn max_load_difference(loads: &[usize]) -> Result<usize> {
    let max = loads.iter().max().ok_or_else(|| Error::Domain("no base stations".into()))?;
    let min = loads.iter().min().expect("non-empty");
    Ok(max - min)
}

/// Per-UE rate in bit/s for one slot: each BS splits its bandwidth equally
/// among its UEs. Unassigned UEs get zero.
pub fn achievable_rates(matching: &Matching, links: &LinkRealization, config: &ScenarioConfig) -> Vec<f64> {
    slot_rates(matching, links, &links.los_state, config)
}

fn slot_rates(matching: &Matching, links: &LinkRealization, los: &Array2<bool>, config: &ScenarioConfig) -> Vec<f64> {
    let n1 = links.se_mmw_los.ncols();
    let loads = load_vector(matching);
    matching
        .agent_to_host
        .iter()
        .enumerate()
        .map(|(m, host)| match *host {
            None => 0.0,
            Some(n) if n < n1 => config.bandwidth_mmw_hz / loads[n] as f64 * links.se_mmw(m, n, los[[m, n]]),
            Some(n) => config.bandwidth_muw_hz / loads[n] as f64 * links.se_muw[[m, n - n1]],
        })
        .collect()
}

/// Per-UE rates averaged over the slots of a frame.
pub fn frame_rates(
    matching: &Matching,
    links: &LinkRealization,
    slots: &[Array2<bool>],
    config: &ScenarioConfig,
) -> Vec<f64> {
    let mut acc = vec![0.0; matching.n_agents()];
    for los in slots {
        for (a, r) in acc.iter_mut().zip(slot_rates(matching, links, los, config)) {
            *a += r;
        }
    }
    let n = slots.len().max(1) as f64;
    acc.into_iter().map(|a| a / n).collect()
}

/// Empirical CDF as `(value, F(value))` at each distinct sample value.
pub fn rate_cdf(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::Domain("empirical CDF of no samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        let f = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 = f,
            _ => out.push((x, f)),
        }
    }
    Ok(out)
}

/// Evaluates a CDF from [`rate_cdf`] at `x` (right-continuous step function).
pub fn eval_cdf(cdf: &[(f64, f64)], x: f64) -> f64 {
    let idx = cdf.partition_point(|&(v, _)| v <= x);
    if idx == 0 {
        0.0
    } else {
        cdf[idx - 1].1
    }
}
