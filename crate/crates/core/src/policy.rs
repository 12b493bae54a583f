//! UE utilities, preference lists, the shared master list, and the
//! association policies built on them.
//!
//! Base stations are indexed mmW first (`0..N1`) and uW after (`N1..N)`).

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, linear_to_db, mmw_snr, muw_sinr, LinkRealization, PathLossTable};
use crate::error::{Error, Result};
use crate::matching::{deferred_acceptance, mmq_match, Matching, MatchingInstance};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Mmw,
    Muw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConfig {
    pub q_min: Vec<usize>,
    pub q_max: Vec<usize>,
    /// Utility below which a non-top uW BS is only used when forced.
    pub c_th: f64,
    pub bias_rssi_db: f64,
    pub bias_sinr_db: f64,
    pub rssi_bias_tier: Tier,
    pub sinr_bias_tier: Tier,
}

impl PolicyConfig {
    /// No quotas binding: `q_min = 0`, `q_max = M` everywhere.
    pub fn unconstrained(n_bs: usize, n_ue: usize) -> Self {
        Self::with_quotas(vec![0; n_bs], vec![n_ue; n_bs])
    }

    /// Per-tier quotas.
    pub fn tiered(n_mmw: usize, n_muw: usize, mmw: (usize, usize), muw: (usize, usize)) -> Self {
        let q_min = [vec![mmw.0; n_mmw], vec![muw.0; n_muw]].concat();
        let q_max = [vec![mmw.1; n_mmw], vec![muw.1; n_muw]].concat();
        Self::with_quotas(q_min, q_max)
    }

    /// `q_min = floor(M/N)`, `q_max = ceil(M/N)` on every BS.
    pub fn balanced(n_bs: usize, n_ue: usize) -> Self {
        let lo = n_ue / n_bs;
        let hi = n_ue.div_ceil(n_bs);
        Self::with_quotas(vec![lo; n_bs], vec![hi; n_bs])
    }

    pub fn with_quotas(q_min: Vec<usize>, q_max: Vec<usize>) -> Self {
        PolicyConfig {
            q_min,
            q_max,
            c_th: f64::NEG_INFINITY,
            bias_rssi_db: 0.0,
            bias_sinr_db: 0.0,
            rssi_bias_tier: Tier::Mmw,
            sinr_bias_tier: Tier::Muw,
        }
    }

    pub fn validate(&self, n_bs: usize) -> Result<()> {
        if self.q_min.len() != n_bs || self.q_max.len() != n_bs {
            return Err(Error::config("q_min", format!("needs one quota per BS ({n_bs})")));
        }
        if let Some(n) = (0..n_bs).find(|&n| self.q_min[n] > self.q_max[n]) {
            return Err(Error::config("q_min", format!("exceeds q_max at BS {n}")));
        }
        if self.c_th.is_nan() {
            return Err(Error::config("c_th", "must not be NaN"));
        }
        for (name, b) in [("bias_rssi_db", self.bias_rssi_db), ("bias_sinr_db", self.bias_sinr_db)] {
            if !(b >= 0.0) {
                return Err(Error::config(name, "must be non-negative"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilityTable {
    /// M x N utilities; `-inf` for links with zero expected rate.
    pub u: Array2<f64>,
    /// Each UE's utility at its favourite BS.
    pub u_ml: Vec<f64>,
    pub n_mmw: usize,
}

impl UtilityTable {
    /// Builds the table from raw utilities, deriving `u_ml`.
    pub fn from_utilities(u: Array2<f64>, n_mmw: usize) -> Self {
        let u_ml = u
            .rows()
            .into_iter()
            .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        UtilityTable { u, u_ml, n_mmw }
    }

    pub fn n_ue(&self) -> usize {
        self.u.nrows()
    }

    pub fn n_bs(&self) -> usize {
        self.u.ncols()
    }

    pub fn is_muw(&self, bs: usize) -> bool {
        bs >= self.n_mmw
    }
}

/// Log of the expected spectral efficiency of every UE-BS pair. mmW links
/// mix LoS and NLoS rates by the LoS estimate `f` (M x N1); uW links use
/// their interference-limited rate.
pub fn compute_utilities(scenario: &Scenario, links: &LinkRealization, f: &Array2<f64>) -> Result<UtilityTable> {
    let (m, n1, n2) = (scenario.n_ue(), scenario.n_mmw(), scenario.n_muw());
    if f.dim() != (m, n1) {
        return Err(Error::Domain(format!("LoS estimates are {:?}, expected ({m}, {n1})", f.dim())));
    }
    if let Some(v) = f.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!("LoS estimate {v} outside [0, 1]")));
    }
    let u = Array2::from_shape_fn((m, n1 + n2), |(i, n)| {
        let expected_se = if n < n1 {
            let p = f[[i, n]];
            p * links.se_mmw_los[[i, n]] + (1.0 - p) * links.se_mmw_nlos[[i, n]]
        } else {
            links.se_muw[[i, n - n1]]
        };
        // ln(0) = -inf ranks the BS last.
        expected_se.ln()
    });
    Ok(UtilityTable::from_utilities(u, n1))
}

fn descending(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preferences {
    /// BSs by descending utility, per UE.
    pub ranking: Vec<Vec<usize>>,
    /// `gated[m][n]`: BS `n` is a non-top uW BS below the threshold for UE `m`.
    pub gated: Vec<Vec<bool>>,
}

impl Preferences {
    /// Ranking with gated BSs moved behind all others (relative order kept);
    /// this is the order the matching engine sees.
    pub fn effective(&self, ue: usize) -> Vec<usize> {
        let gated = &self.gated[ue];
        let (open, closed): (Vec<usize>, Vec<usize>) = self.ranking[ue].iter().partition(|&&n| !gated[n]);
        [open, closed].concat()
    }
}

pub fn build_preferences(util: &UtilityTable, c_th: f64) -> Preferences {
    let mut ranking = Vec::with_capacity(util.n_ue());
    let mut gated = Vec::with_capacity(util.n_ue());
    for row in util.u.rows() {
        let row = row.to_vec();
        let order = descending(&row);
        let top = order.first().copied();
        gated.push(
            (0..util.n_bs())
                .map(|n| Some(n) != top && util.is_muw(n) && row[n] < c_th)
                .collect(),
        );
        ranking.push(order);
    }
    Preferences { ranking, gated }
}

/// UEs by descending best-case utility.
pub fn build_master_list(util: &UtilityTable) -> Vec<usize> {
    descending(&util.u_ml)
}

/// The matching instance the MMQ policy solves.
pub fn association_instance(util: &UtilityTable, policy: &PolicyConfig) -> Result<MatchingInstance> {
    policy.validate(util.n_bs())?;
    let prefs = build_preferences(util, policy.c_th);
    let agent_prefs = (0..util.n_ue()).map(|m| prefs.effective(m)).collect();
    MatchingInstance::new(
        util.n_bs(),
        agent_prefs,
        build_master_list(util),
        policy.q_min.clone(),
        policy.q_max.clone(),
    )
}

pub fn mmq_policy(
    scenario: &Scenario,
    links: &LinkRealization,
    f: &Array2<f64>,
    policy: &PolicyConfig,
) -> Result<Matching> {
    let util = compute_utilities(scenario, links, f)?;
    mmq_match(&association_instance(&util, policy)?)
}

/// Deferred acceptance on the same preferences and maximum quotas.
pub fn da_policy(
    scenario: &Scenario,
    links: &LinkRealization,
    f: &Array2<f64>,
    policy: &PolicyConfig,
) -> Result<Matching> {
    let util = compute_utilities(scenario, links, f)?;
    Ok(deferred_acceptance(&association_instance(&util, policy)?))
}

/// Average received power (dBm) of every UE-BS pair. The mmW entries average
/// the linear path loss over the LoS probability and include the antenna gain.
pub fn rssi_table(scenario: &Scenario) -> Array2<f64> {
    let cfg = &scenario.config;
    let pl = PathLossTable::new(scenario);
    let n1 = scenario.n_mmw();
    Array2::from_shape_fn((scenario.n_ue(), scenario.n_bs()), |(m, n)| {
        if n < n1 {
            let rho = scenario.los_prob[[m, n]];
            let loss = rho * db_to_linear(pl.mmw_los_db[[m, n]]) + (1.0 - rho) * db_to_linear(pl.mmw_nlos_db[[m, n]]);
            cfg.tx_power_dbm + cfg.antenna_gain_dbi - linear_to_db(loss)
        } else {
            cfg.tx_power_dbm - pl.muw_db[[m, n - n1]]
        }
    })
}

/// Average SINR (dB) of every UE-BS pair. mmW entries average the linear
/// SNR over the LoS probability; uW entries include interference from every
/// other uW BS.
pub fn sinr_table(scenario: &Scenario) -> Array2<f64> {
    let cfg = &scenario.config;
    let pl = PathLossTable::new(scenario);
    let n1 = scenario.n_mmw();
    Array2::from_shape_fn((scenario.n_ue(), scenario.n_bs()), |(m, n)| {
        let linear = if n < n1 {
            let rho = scenario.los_prob[[m, n]];
            let snr = |l: f64| {
                mmw_snr(cfg.tx_power_dbm, cfg.antenna_gain_dbi, l, cfg.bandwidth_mmw_hz, cfg.noise_psd_dbm_hz)
                    .expect("validated bandwidth")
            };
            rho * snr(pl.mmw_los_db[[m, n]]) + (1.0 - rho) * snr(pl.mmw_nlos_db[[m, n]])
        } else {
            let j = n - n1;
            muw_sinr(
                cfg.tx_power_dbm,
                pl.muw_db[[m, j]],
                &pl.muw_interferers(m, j),
                cfg.bandwidth_muw_hz,
                cfg.noise_psd_dbm_hz,
            )
            .expect("validated bandwidth")
        };
        linear_to_db(linear)
    })
}

/// Each UE independently takes the BS with the largest metric after adding
/// `bias_db` to every BS of `tier`. Ties go to the lower index.
pub fn biased_argmax(metric: &Array2<f64>, n_mmw: usize, bias_db: f64, tier: Tier) -> Matching {
    let n_bs = metric.ncols();
    let assignment: Vec<Option<usize>> = metric
        .rows()
        .into_iter()
        .map(|row| {
            let mut best: Option<(usize, f64)> = None;
            for (n, &v) in row.iter().enumerate() {
                let boosted = match (tier, n < n_mmw) {
                    (Tier::Mmw, true) | (Tier::Muw, false) => v + bias_db,
                    _ => v,
                };
                if best.is_none_or(|(_, b)| boosted > b) {
                    best = Some((n, boosted));
                }
            }
            best.map(|(n, _)| n)
        })
        .collect();
    Matching::from_assignment(n_bs, &assignment).expect("indices in range")
}

/// Max-RSSI with cell range expansion toward the mmW tier.
pub fn max_rssi_policy(scenario: &Scenario, bias_db: f64) -> Matching {
    biased_argmax(&rssi_table(scenario), scenario.n_mmw(), bias_db, Tier::Mmw)
}

/// Max-SINR with cell range expansion toward the uW tier.
pub fn max_sinr_policy(scenario: &Scenario, bias_db: f64) -> Matching {
    biased_argmax(&sinr_table(scenario), scenario.n_mmw(), bias_db, Tier::Muw)
}
