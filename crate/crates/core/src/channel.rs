//! Path loss, LoS sampling and per-unit-bandwidth rates of mmW and uW links.

use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scenario::{distance, PathLossParams, Scenario};

/// Distances below this are evaluated at this distance (the path-loss
/// intercept is referenced to 1 m).
pub const MIN_DISTANCE_M: f64 = 1.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// `intercept + slope * 10 log10(d) + shadow`, all in dB.
pub fn path_loss_db(params: &PathLossParams, d: f64, shadow_db: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!("path loss distance must be positive, got {d}")));
    }
    Ok(params.intercept_db + params.slope * 10.0 * d.log10() + shadow_db)
}

/// Path loss for a UE-BS link, with the distance clamped to [`MIN_DISTANCE_M`].
pub fn link_path_loss_db(params: &PathLossParams, d: f64, shadow_db: f64) -> f64 {
    path_loss_db(params, d.max(MIN_DISTANCE_M), shadow_db).expect("clamped distance is positive")
}

pub fn sample_los<R: Rng + ?Sized>(rho: f64, rng: &mut R) -> Result<bool> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("LoS probability {rho} outside [0, 1]")));
    }
    Ok(rng.random::<f64>() < rho)
}

fn check_bandwidth(w_hz: f64) -> Result<()> {
    if w_hz > 0.0 && w_hz.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("bandwidth must be positive, got {w_hz}")))
    }
}

/// Noise-limited mmW SNR (linear).
pub fn mmw_snr(p_dbm: f64, psi_dbi: f64, pathloss_db: f64, w1_hz: f64, n0_dbm_hz: f64) -> Result<f64> {
    check_bandwidth(w1_hz)?;
    let signal_mw = db_to_linear(p_dbm) * db_to_linear(psi_dbi) * db_to_linear(-pathloss_db);
    Ok(signal_mw / (w1_hz * db_to_linear(n0_dbm_hz)))
}

/// uW SINR (linear). Interferers transmit at the same power as the serving BS.
pub fn muw_sinr(
    p_dbm: f64,
    pathloss_db: f64,
    interferer_pathlosses_db: &[f64],
    w2_hz: f64,
    n0_dbm_hz: f64,
) -> Result<f64> {
    check_bandwidth(w2_hz)?;
    let p_mw = db_to_linear(p_dbm);
    let interference_mw: f64 = interferer_pathlosses_db
        .iter()
        .map(|&l| p_mw * db_to_linear(-l))
        .sum();
    let noise_mw = w2_hz * db_to_linear(n0_dbm_hz);
    Ok(p_mw * db_to_linear(-pathloss_db) / (interference_mw + noise_mw))
}

/// bit/s/Hz of a mmW link.
pub fn mmw_spectral_efficiency(
    p_dbm: f64,
    psi_dbi: f64,
    pathloss_db: f64,
    w1_hz: f64,
    n0_dbm_hz: f64,
) -> Result<f64> {
    Ok(mmw_snr(p_dbm, psi_dbi, pathloss_db, w1_hz, n0_dbm_hz)?.ln_1p() / std::f64::consts::LN_2)
}

/// bit/s/Hz of a uW link under interference from the other uW BSs.
pub fn muw_spectral_efficiency(
    p_dbm: f64,
    pathloss_db: f64,
    interferer_pathlosses_db: &[f64],
    w2_hz: f64,
    n0_dbm_hz: f64,
) -> Result<f64> {
    let sinr = muw_sinr(p_dbm, pathloss_db, interferer_pathlosses_db, w2_hz, n0_dbm_hz)?;
    Ok(sinr.ln_1p() / std::f64::consts::LN_2)
}

/// Static per-link path losses (dB) of a scenario, shadowing included.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLossTable {
    pub mmw_los_db: Array2<f64>,
    pub mmw_nlos_db: Array2<f64>,
    pub muw_db: Array2<f64>,
}

impl PathLossTable {
    pub fn new(scenario: &Scenario) -> Self {
        let cfg = &scenario.config;
        let (m, n1, n2) = (scenario.n_ue(), scenario.n_mmw(), scenario.n_muw());
        let ues = &scenario.ue_positions;
        let mmw_d = |i: usize, j: usize| distance(ues[i], scenario.mmw_positions[j]);
        PathLossTable {
            mmw_los_db: Array2::from_shape_fn((m, n1), |(i, j)| {
                link_path_loss_db(&cfg.pathloss_mmw_los, mmw_d(i, j), scenario.shadow_mmw_los_db[[i, j]])
            }),
            mmw_nlos_db: Array2::from_shape_fn((m, n1), |(i, j)| {
                link_path_loss_db(&cfg.pathloss_mmw_nlos, mmw_d(i, j), scenario.shadow_mmw_nlos_db[[i, j]])
            }),
            muw_db: Array2::from_shape_fn((m, n2), |(i, j)| {
                link_path_loss_db(
                    &cfg.pathloss_muw,
                    distance(ues[i], scenario.muw_positions[j]),
                    scenario.shadow_muw_db[[i, j]],
                )
            }),
        }
    }

    /// Path losses from every uW BS other than `serving` to `ue`.
    pub fn muw_interferers(&self, ue: usize, serving: usize) -> Vec<f64> {
        self.muw_db
            .row(ue)
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != serving)
            .map(|(_, &l)| l)
            .collect()
    }
}

/// One time slot's LoS outcome together with the link spectral efficiencies.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRealization {
    /// M x N1, `true` = LoS.
    pub los_state: Array2<bool>,
    pub se_mmw_los: Array2<f64>,
    pub se_mmw_nlos: Array2<f64>,
    pub se_muw: Array2<f64>,
}

impl LinkRealization {
    /// Spectral efficiency the mmW link actually delivers under `los`.
    pub fn se_mmw(&self, ue: usize, bs: usize, los: bool) -> f64 {
        if los {
            self.se_mmw_los[[ue, bs]]
        } else {
            self.se_mmw_nlos[[ue, bs]]
        }
    }
}

pub fn sample_los_state<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Array2<bool> {
    let mut state = Array2::from_elem(scenario.los_prob.dim(), false);
    for (s, &rho) in state.iter_mut().zip(scenario.los_prob.iter()) {
        *s = sample_los(rho, rng).expect("scenario probabilities lie in [0, 1]");
    }
    state
}

pub fn realize_links<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> LinkRealization {
    let cfg = &scenario.config;
    let table = PathLossTable::new(scenario);
    let mmw_se = |pl: f64| {
        mmw_spectral_efficiency(
            cfg.tx_power_dbm,
            cfg.antenna_gain_dbi,
            pl,
            cfg.bandwidth_mmw_hz,
            cfg.noise_psd_dbm_hz,
        )
        .expect("bandwidth validated")
    };
    let se_muw = Array2::from_shape_fn(table.muw_db.dim(), |(i, j)| {
        muw_spectral_efficiency(
            cfg.tx_power_dbm,
            table.muw_db[[i, j]],
            &table.muw_interferers(i, j),
            cfg.bandwidth_muw_hz,
            cfg.noise_psd_dbm_hz,
        )
        .expect("bandwidth validated")
    });
    LinkRealization {
        los_state: sample_los_state(scenario, rng),
        se_mmw_los: table.mmw_los_db.mapv(mmw_se),
        se_mmw_nlos: table.mmw_nlos_db.mapv(mmw_se),
        se_muw,
    }
}
