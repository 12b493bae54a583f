//! Random network topology and the static per-link randomness of one run.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Tag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Log-distance path loss: `intercept_db + slope * 10 log10(d) + shadowing`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossParams {
    pub slope: f64,
    pub intercept_db: f64,
    pub shadow_sigma_db: f64,
}

impl PathLossParams {
    pub const fn new(slope: f64, intercept_db: f64, shadow_sigma_db: f64) -> Self {
        PathLossParams {
            slope,
            intercept_db,
            shadow_sigma_db,
        }
    }

    fn validate(&self, field: &str) -> Result<()> {
        if !(self.slope > 0.0 && self.slope.is_finite()) {
            return Err(Error::config(format!("{field}.slope"), "must be positive"));
        }
        if !self.intercept_db.is_finite() {
            return Err(Error::config(format!("{field}.intercept_db"), "must be finite"));
        }
        if !(self.shadow_sigma_db >= 0.0 && self.shadow_sigma_db.is_finite()) {
            return Err(Error::config(
                format!("{field}.shadow_sigma_db"),
                "must be non-negative",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_mmw: usize,
    pub n_muw: usize,
    pub n_ue: usize,
    pub area_radius: f64,
    pub tx_power_dbm: f64,
    pub bandwidth_mmw_hz: f64,
    pub bandwidth_muw_hz: f64,
    pub noise_psd_dbm_hz: f64,
    pub antenna_gain_dbi: f64,
    pub pathloss_mmw_los: PathLossParams,
    pub pathloss_mmw_nlos: PathLossParams,
    pub pathloss_muw: PathLossParams,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_mmw: 10,
            n_muw: 10,
            n_ue: 50,
            area_radius: 500.0,
            tx_power_dbm: 30.0,
            bandwidth_mmw_hz: 1e9,
            bandwidth_muw_hz: 10e6,
            noise_psd_dbm_hz: -174.0,
            antenna_gain_dbi: 18.0,
            pathloss_mmw_los: PathLossParams::new(2.0, 70.0, 5.2),
            pathloss_mmw_nlos: PathLossParams::new(4.0, 70.0, 7.6),
            pathloss_muw: PathLossParams::new(3.0, 38.0, 10.0),
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn n_bs(&self) -> usize {
        self.n_mmw + self.n_muw
    }

    /// Either tier may be empty, but not both.
    pub fn validate(&self) -> Result<()> {
        if self.n_ue == 0 {
            return Err(Error::config("n_ue", "must be at least 1"));
        }
        if self.n_bs() == 0 {
            return Err(Error::config("n_mmw", "n_mmw + n_muw must be at least 1"));
        }
        if !(self.area_radius > 0.0 && self.area_radius.is_finite()) {
            return Err(Error::config("area_radius", "must be positive"));
        }
        if !(self.bandwidth_mmw_hz > 0.0 && self.bandwidth_mmw_hz.is_finite()) {
            return Err(Error::config("bandwidth_mmw_hz", "must be positive"));
        }
        if !(self.bandwidth_muw_hz > 0.0 && self.bandwidth_muw_hz.is_finite()) {
            return Err(Error::config("bandwidth_muw_hz", "must be positive"));
        }
        for (name, v) in [
            ("tx_power_dbm", self.tx_power_dbm),
            ("noise_psd_dbm_hz", self.noise_psd_dbm_hz),
            ("antenna_gain_dbi", self.antenna_gain_dbi),
        ] {
            if !v.is_finite() {
                return Err(Error::config(name, "must be finite"));
            }
        }
        self.pathloss_mmw_los.validate("pathloss_mmw_los")?;
        self.pathloss_mmw_nlos.validate("pathloss_mmw_nlos")?;
        self.pathloss_muw.validate("pathloss_muw")?;
        Ok(())
    }
}

/// Immutable network snapshot. Shadowing is drawn once per (pair, LoS state)
/// and held for the whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub mmw_positions: Vec<Point>,
    pub muw_positions: Vec<Point>,
    pub ue_positions: Vec<Point>,
    /// M x N1 LoS probabilities.
    pub los_prob: Array2<f64>,
    /// M x N1 shadowing (dB) applied when the mmW link is LoS.
    pub shadow_mmw_los_db: Array2<f64>,
    /// M x N1 shadowing (dB) applied when the mmW link is NLoS.
    pub shadow_mmw_nlos_db: Array2<f64>,
    /// M x N2 shadowing (dB) of the uW links.
    pub shadow_muw_db: Array2<f64>,
}

impl Scenario {
    pub fn n_ue(&self) -> usize {
        self.ue_positions.len()
    }

    pub fn n_mmw(&self) -> usize {
        self.mmw_positions.len()
    }

    pub fn n_muw(&self) -> usize {
        self.muw_positions.len()
    }

    /// BSs are indexed mmW first (`0..N1`), then uW (`N1..N1+N2`).
    pub fn n_bs(&self) -> usize {
        self.n_mmw() + self.n_muw()
    }

    pub fn is_mmw(&self, bs: usize) -> bool {
        bs < self.n_mmw()
    }
}

/// Uniform point on the disk of `radius` around the origin.
pub fn uniform_in_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Point::new(r * theta.cos(), r * theta.sin())
}

fn positions(seed: u64, tag: Tag, count: usize, radius: f64) -> Vec<Point> {
    (0..count)
        .map(|i| uniform_in_disk(&mut rng::stream(seed, tag, i as u64), radius))
        .collect()
}

fn shadowing(seed: u64, tag: Tag, rows: usize, cols: usize, sigma: f64) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |(m, n)| {
        if sigma == 0.0 {
            return 0.0;
        }
        let normal = Normal::new(0.0, sigma).expect("sigma validated");
        normal.sample(&mut rng::stream(seed, tag, rng::pair_index(m, n, cols)))
    })
}

pub fn generate_scenario(config: &ScenarioConfig) -> Result<Scenario> {
    config.validate()?;
    let seed = config.seed;
    let (m, n1, n2) = (config.n_ue, config.n_mmw, config.n_muw);
    let radius = config.area_radius;

    let los_prob = Array2::from_shape_fn((m, n1), |(i, j)| {
        rng::stream(seed, Tag::LosProb, rng::pair_index(i, j, n1)).random::<f64>()
    });

    Ok(Scenario {
        config: config.clone(),
        mmw_positions: positions(seed, Tag::MmwPosition, n1, radius),
        muw_positions: positions(seed, Tag::MuwPosition, n2, radius),
        ue_positions: positions(seed, Tag::UePosition, m, radius),
        los_prob,
        shadow_mmw_los_db: shadowing(
            seed,
            Tag::ShadowMmwLos,
            m,
            n1,
            config.pathloss_mmw_los.shadow_sigma_db,
        ),
        shadow_mmw_nlos_db: shadowing(
            seed,
            Tag::ShadowMmwNlos,
            m,
            n1,
            config.pathloss_mmw_nlos.shadow_sigma_db,
        ),
        shadow_muw_db: shadowing(
            seed,
            Tag::ShadowMuw,
            m,
            n2,
            config.pathloss_muw.shadow_sigma_db,
        ),
    })
}
