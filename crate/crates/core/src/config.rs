//! Experiment configuration files.
//!
//! The format is TOML restricted to flat `key = value` pairs, optionally
//! grouped by dotted prefixes (`scenario.n_ue = 50`) or `[section]`
//! headers. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::los::{EstimatorMode, DEFAULT_SMOOTHING, DEFAULT_WINDOW_SLOTS};
use crate::policy::Tier;
use crate::scenario::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Mmq,
    Da,
    MaxRssi,
    MaxSinr,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [PolicyKind::Mmq, PolicyKind::Da, PolicyKind::MaxRssi, PolicyKind::MaxSinr];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Mmq => "mmq",
            PolicyKind::Da => "da",
            PolicyKind::MaxRssi => "max_rssi",
            PolicyKind::MaxSinr => "max_sinr",
        }
    }

    pub fn is_baseline(self) -> bool {
        matches!(self, PolicyKind::MaxRssi | PolicyKind::MaxSinr)
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How per-BS quotas are derived for a given number of UEs `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuotaRule {
    /// Per-tier minima from `mmw_q_min`/`muw_q_min`, maxima from
    /// `mmw_q_max`/`muw_q_max` (default `M`).
    #[default]
    Tiered,
    /// `floor(M/N)` and `ceil(M/N)` on every BS.
    Balanced,
    /// `floor(M/N)` minimum on every BS, maximum `M`.
    Floor,
    /// Each uW BS draws its minimum uniformly from `0..=floor(M/N2)`, per
    /// run; mmW minimum 0; maxima `M`.
    RandomMuw,
    /// As `RandomMuw`, but one draw shared by all uW BSs.
    RandomMuwShared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicySection {
    pub quota: QuotaRule,
    pub mmw_q_min: usize,
    pub muw_q_min: usize,
    pub mmw_q_max: Option<usize>,
    pub muw_q_max: Option<usize>,
    /// Utility threshold for non-top uW BSs; absent means no gating.
    pub c_th: Option<f64>,
    pub bias_rssi_db: f64,
    pub bias_sinr_db: f64,
    pub rssi_bias_tier: Tier,
    pub sinr_bias_tier: Tier,
    /// Pick, per run, the candidate bias that minimizes the load difference.
    pub auto_bias: bool,
    pub rssi_bias_candidates_db: Vec<f64>,
    pub sinr_bias_candidates_db: Vec<f64>,
}

impl Default for PolicySection {
    fn default() -> Self {
        PolicySection {
            quota: QuotaRule::Tiered,
            mmw_q_min: 0,
            muw_q_min: 0,
            mmw_q_max: None,
            muw_q_max: None,
            c_th: None,
            bias_rssi_db: 0.0,
            bias_sinr_db: 0.0,
            rssi_bias_tier: Tier::Mmw,
            sinr_bias_tier: Tier::Muw,
            auto_bias: false,
            rssi_bias_candidates_db: (0..=12).map(|k| 5.0 * f64::from(k)).collect(),
            sinr_bias_candidates_db: (0..=15).map(|k| 2.0 * f64::from(k)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorSection {
    pub mode: EstimatorMode,
    pub smoothing: f64,
    /// Slots per association frame; rates are averaged over them.
    pub window_slots: u32,
    /// Association frames per run (only the last one is measured).
    pub frames: u32,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        EstimatorSection {
            mode: EstimatorMode::Oracle,
            smoothing: DEFAULT_SMOOTHING,
            window_slots: DEFAULT_WINDOW_SLOTS,
            frames: 1,
        }
    }
}

/// Parameter grid; the cartesian product of all non-empty lists.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub n_ue: Vec<usize>,
    pub muw_q_min: Vec<usize>,
    pub bias_rssi_db: Vec<f64>,
    pub bias_sinr_db: Vec<f64>,
    pub c_th: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `scenario.seed` is the base seed; run `i` uses `seed + i`. Path-loss
    /// tables, when given, must be given in full.
    pub scenario: ScenarioConfig,
    pub policy: PolicySection,
    pub estimator: EstimatorSection,
    pub policies: Vec<PolicyKind>,
    pub n_runs: usize,
    pub sweep: SweepSection,
    pub output: PathBuf,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: ScenarioConfig::default(),
            policy: PolicySection::default(),
            estimator: EstimatorSection::default(),
            policies: PolicyKind::ALL.to_vec(),
            n_runs: 200,
            sweep: SweepSection::default(),
            output: PathBuf::from("results.csv"),
            workers: 0,
        }
    }
}

/// One point of the parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub scenario: ScenarioConfig,
    pub policy: PolicySection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)
            .map_err(|e| Error::config("config file", e.to_string().trim_end().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::config("n_runs", "must be at least 1"));
        }
        if self.policies.is_empty() {
            return Err(Error::config("policies", "must enable at least one policy"));
        }
        let est = &self.estimator;
        if !(0.0..=1.0).contains(&est.smoothing) {
            return Err(Error::config("estimator.smoothing", "must lie in [0, 1]"));
        }
        if est.window_slots == 0 {
            return Err(Error::config("estimator.window_slots", "must be at least 1"));
        }
        if est.frames == 0 {
            return Err(Error::config("estimator.frames", "must be at least 1"));
        }
        let p = &self.policy;
        for (name, v) in [("policy.bias_rssi_db", p.bias_rssi_db), ("policy.bias_sinr_db", p.bias_sinr_db)] {
            if !(v >= 0.0) {
                return Err(Error::config(name, "must be non-negative"));
            }
        }
        if p.c_th.is_some_and(f64::is_nan) {
            return Err(Error::config("policy.c_th", "must not be NaN"));
        }
        if p.auto_bias && (p.rssi_bias_candidates_db.is_empty() || p.sinr_bias_candidates_db.is_empty()) {
            return Err(Error::config("policy.auto_bias", "needs non-empty bias candidate lists"));
        }
        for v in p.rssi_bias_candidates_db.iter().chain(&p.sinr_bias_candidates_db) {
            if !(*v >= 0.0) {
                return Err(Error::config("policy.*_bias_candidates_db", "must be non-negative"));
            }
        }
        let s = &self.sweep;
        if s.n_ue.contains(&0) {
            return Err(Error::config("sweep.n_ue", "values must be at least 1"));
        }
        if s.bias_rssi_db.iter().chain(&s.bias_sinr_db).any(|v| !(*v >= 0.0)) {
            return Err(Error::config("sweep.bias_*_db", "values must be non-negative"));
        }
        if s.c_th.iter().any(|v| v.is_nan()) {
            return Err(Error::config("sweep.c_th", "values must not be NaN"));
        }
        for point in self.grid() {
            point.scenario.validate()?;
        }
        Ok(())
    }

    /// Grid points in a fixed order (later sweep keys vary fastest).
    pub fn grid(&self) -> Vec<GridPoint> {
        fn axis<T: Clone>(values: &[T]) -> Vec<Option<T>> {
            if values.is_empty() {
                vec![None]
            } else {
                values.iter().cloned().map(Some).collect()
            }
        }
        let s = &self.sweep;
        let mut points = Vec::new();
        for n_ue in axis(&s.n_ue) {
            for muw_q_min in axis(&s.muw_q_min) {
                for rssi in axis(&s.bias_rssi_db) {
                    for sinr in axis(&s.bias_sinr_db) {
                        for c_th in axis(&s.c_th) {
                            let mut scenario = self.scenario.clone();
                            let mut policy = self.policy.clone();
                            if let Some(v) = n_ue {
                                scenario.n_ue = v;
                            }
                            if let Some(v) = muw_q_min {
                                policy.muw_q_min = v;
                            }
                            if let Some(v) = rssi {
                                policy.bias_rssi_db = v;
                            }
                            if let Some(v) = sinr {
                                policy.bias_sinr_db = v;
                            }
                            if let Some(v) = c_th {
                                policy.c_th = Some(v);
                            }
                            points.push(GridPoint {
                                index: points.len(),
                                scenario,
                                policy,
                            });
                        }
                    }
                }
            }
        }
        points
    }
}
