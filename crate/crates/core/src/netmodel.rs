//! Physical layer: geometry, path loss, small-scale fading and the
//! round-robin TDMA schedule of the primary users.
//!
//! Channel gains are raw power gains. The receiver noise power is kept
//! explicit in [`NetworkConfig::noise_power`] instead of being folded into
//! the gains, so the harvested energy and the rate use the same numbers.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream, StreamRng};

/// Reference gain at 1 m of the calibrated power law, `10^-3.17`.
pub const DEFAULT_PATHLOSS_REF: f64 = 6.760_829_753_919_819e-4;

/// Position in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// All physical and scheduling constants of the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub bs_position: Point,
    pub secondary_position: Point,
    /// One entry per primary user; `num_primary()` is its length.
    pub primary_positions: Vec<Point>,
    /// Transmit power of every primary user, W.
    pub primary_tx_power: f64,
    /// Battery capacity of the secondary user, J.
    pub battery_capacity: f64,
    /// Slot duration, s.
    pub slot_duration: f64,
    /// Maximum transmit power of the secondary user, W.
    pub secondary_max_power: f64,
    pub harvest_efficiency: f64,
    /// Receiver noise power over the full band, W.
    pub noise_power: f64,
    pub pathloss_ref: f64,
    pub pathloss_exponent: f64,
    pub discount: f64,
    /// Carrier frequency, Hz. Recorded for reference; the calibrated
    /// power law does not use it.
    pub carrier_frequency: f64,
}

impl Default for NetworkConfig {
    /// Two primary users at (0, 1) and (0, 1000), secondary at (1, 1).
    fn default() -> Self {
        Self::with_primaries(vec![Point::new(0.0, 1.0), Point::new(0.0, 1000.0)])
    }
}

impl NetworkConfig {
    /// Default physical constants with the given primary-user layout.
    pub fn with_primaries(primary_positions: Vec<Point>) -> Self {
        Self {
            bs_position: Point::new(0.0, 0.0),
            secondary_position: Point::new(1.0, 1.0),
            primary_positions,
            primary_tx_power: 1.0,
            battery_capacity: 0.1,
            slot_duration: 1.0,
            secondary_max_power: 0.1,
            harvest_efficiency: 0.7,
            // -170 dBm/Hz over 1 MHz
            noise_power: 1e-14,
            pathloss_ref: DEFAULT_PATHLOSS_REF,
            pathloss_exponent: 3.0,
            discount: 0.9,
            carrier_frequency: 914e6,
        }
    }

    pub fn num_primary(&self) -> usize {
        self.primary_positions.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.primary_positions.is_empty() {
            return bad("at least one primary user is required");
        }
        let positive = [
            ("primary_tx_power", self.primary_tx_power),
            ("battery_capacity", self.battery_capacity),
            ("slot_duration", self.slot_duration),
            ("secondary_max_power", self.secondary_max_power),
            ("noise_power", self.noise_power),
            ("pathloss_exponent", self.pathloss_exponent),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.harvest_efficiency > 0.0 && self.harvest_efficiency <= 1.0) {
            return bad("harvest_efficiency must lie in (0, 1]");
        }
        if !(self.discount >= 0.0 && self.discount < 1.0) {
            return bad("discount must lie in [0, 1)");
        }
        if !(self.pathloss_ref > 0.0 && self.pathloss_ref <= 1.0) {
            return bad("pathloss_ref must lie in (0, 1]");
        }
        for link in self.link_distances() {
            if !(link > 0.0) {
                return Err(Error::InvalidGeometry(link));
            }
        }
        Ok(())
    }

    /// Path-loss gain `pathloss_ref * d^-exponent`.
    pub fn path_loss(&self, distance: f64) -> Result<f64> {
        path_loss(distance, self.pathloss_ref, self.pathloss_exponent)
    }

    /// Every link the model uses: secondary-BS, then for each primary user
    /// its BS link and its link to the secondary user.
    pub fn link_distances(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(1 + 2 * self.num_primary());
        out.push(self.secondary_position.distance(&self.bs_position));
        for p in &self.primary_positions {
            out.push(p.distance(&self.bs_position));
            out.push(p.distance(&self.secondary_position));
        }
        out
    }

    /// Energy harvested over a full slot from primary user with gain `h0_gain`.
    pub fn full_slot_harvest(&self, h0_gain: f64) -> f64 {
        self.slot_duration * self.harvest_efficiency * self.primary_tx_power * h0_gain
    }
}

/// `count` points equally spaced on the segment from `start` to `end`,
/// both endpoints included.
pub fn equally_spaced(start: Point, end: Point, count: usize) -> Vec<Point> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| {
                let t = i as f64 / (count - 1) as f64;
                Point::new(start.x + t * (end.x - start.x), start.y + t * (end.y - start.y))
            })
            .collect(),
    }
}

/// Index `m ∈ [1, M]` of the primary user transmitting in slot `n ≥ 1`.
pub fn scheduled_user(slot_index: u64, num_primary: usize) -> usize {
    debug_assert!(slot_index >= 1 && num_primary >= 1);
    ((slot_index - 1) % num_primary as u64) as usize + 1
}

pub fn path_loss(distance: f64, reference: f64, exponent: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::InvalidGeometry(distance));
    }
    Ok(reference * distance.powf(-exponent))
}

/// Raw power gains seen by the secondary user in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    /// Secondary user to base station.
    pub g0_gain: f64,
    /// Scheduled primary user to base station.
    pub h_gain: f64,
    /// Scheduled primary user to secondary user.
    pub h0_gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingMode {
    /// Path loss only.
    None,
    /// One fading draw per (user, link) for the whole experiment.
    ConstantPerExperiment,
    /// Fresh fading draw at every episode boundary.
    PerEpisode,
}

impl FadingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FadingMode::None => "none",
            FadingMode::ConstantPerExperiment => "constant",
            FadingMode::PerEpisode => "per-episode",
        }
    }
}

impl fmt::Display for FadingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FadingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(FadingMode::None),
            "constant" | "constant_per_experiment" => Ok(FadingMode::ConstantPerExperiment),
            "per-episode" | "per_episode" | "time-varying" => Ok(FadingMode::PerEpisode),
            other => Err(Error::InvalidConfig(format!("unknown fading mode `{other}`"))),
        }
    }
}

/// Squared magnitude of a unit-variance circularly symmetric complex
/// Gaussian, i.e. an Exp(1) variate.
pub fn rayleigh_power<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    0.5 * (re * re + im * im)
}

/// Draws the channels of `slot_index` with fresh fading from `rng`
/// (no fading at all in mode `None`).
pub fn draw_channels<R: Rng + ?Sized>(
    config: &NetworkConfig,
    slot_index: u64,
    mode: FadingMode,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let m = scheduled_user(slot_index, config.num_primary()) - 1;
    let primary = config.primary_positions[m];
    let mut fade = || match mode {
        FadingMode::None => 1.0,
        _ => rayleigh_power(rng),
    };
    Ok(ChannelRealization {
        g0_gain: config.path_loss(config.secondary_position.distance(&config.bs_position))? * fade(),
        h_gain: config.path_loss(primary.distance(&config.bs_position))? * fade(),
        h0_gain: config.path_loss(primary.distance(&config.secondary_position))? * fade(),
    })
}

#[derive(Debug, Clone, PartialEq)]
struct FadingTable {
    secondary_bs: f64,
    primary_bs: Vec<f64>,
    primary_secondary: Vec<f64>,
}

impl FadingTable {
    fn unit(m: usize) -> Self {
        Self { secondary_bs: 1.0, primary_bs: vec![1.0; m], primary_secondary: vec![1.0; m] }
    }

    fn draw(m: usize, rng: &mut StreamRng) -> Self {
        let secondary_bs = rayleigh_power(rng);
        let mut primary_bs = Vec::with_capacity(m);
        let mut primary_secondary = Vec::with_capacity(m);
        for _ in 0..m {
            primary_bs.push(rayleigh_power(rng));
            primary_secondary.push(rayleigh_power(rng));
        }
        Self { secondary_bs, primary_bs, primary_secondary }
    }
}

/// Channel source for one experiment. Holds the path-loss gains of every
/// link and the current quasi-static fading table.
///
/// The table depends only on `(seed, episode)` (or only on `seed` for
/// constant fading), never on how many slots were simulated before.
#[derive(Debug, Clone)]
pub struct Channels {
    mode: FadingMode,
    seed: u64,
    pl_secondary_bs: f64,
    pl_primary_bs: Vec<f64>,
    pl_primary_secondary: Vec<f64>,
    fading: FadingTable,
}

impl Channels {
    pub fn new(config: &NetworkConfig, mode: FadingMode, seed: u64) -> Result<Self> {
        config.validate()?;
        let pl_secondary_bs = config.path_loss(config.secondary_position.distance(&config.bs_position))?;
        let mut pl_primary_bs = Vec::with_capacity(config.num_primary());
        let mut pl_primary_secondary = Vec::with_capacity(config.num_primary());
        for p in &config.primary_positions {
            pl_primary_bs.push(config.path_loss(p.distance(&config.bs_position))?);
            pl_primary_secondary.push(config.path_loss(p.distance(&config.secondary_position))?);
        }
        let m = config.num_primary();
        let fading = match mode {
            FadingMode::None => FadingTable::unit(m),
            FadingMode::ConstantPerExperiment => {
                FadingTable::draw(m, &mut rng::stream(seed, Stream::Fading))
            }
            FadingMode::PerEpisode => FadingTable::draw(m, &mut rng::substream(seed, Stream::Fading, 0)),
        };
        Ok(Self { mode, seed, pl_secondary_bs, pl_primary_bs, pl_primary_secondary, fading })
    }

    pub fn mode(&self) -> FadingMode {
        self.mode
    }

    /// Moves to episode `episode` (0-based); redraws fading in per-episode mode.
    pub fn begin_episode(&mut self, episode: u64) {
        if self.mode == FadingMode::PerEpisode {
            let mut rng = rng::substream(self.seed, Stream::Fading, episode);
            self.fading = FadingTable::draw(self.pl_primary_bs.len(), &mut rng);
        }
    }

    pub fn realization(&self, slot_index: u64) -> ChannelRealization {
        let m = scheduled_user(slot_index, self.pl_primary_bs.len()) - 1;
        ChannelRealization {
            g0_gain: self.pl_secondary_bs * self.fading.secondary_bs,
            h_gain: self.pl_primary_bs[m] * self.fading.primary_bs[m],
            h0_gain: self.pl_primary_secondary[m] * self.fading.primary_secondary[m],
        }
    }
}
