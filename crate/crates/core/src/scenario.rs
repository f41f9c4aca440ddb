//! Scenario generation: Rayleigh-faded channels with distance path loss,
//! user ordering by channel strength, and power-budget conversions.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::noma::PowerModel;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("channel list is empty")]
    EmptyChannels,
    #[error("channel vectors have inconsistent lengths")]
    RaggedChannels,
    #[error("channel entry is not finite")]
    NonFiniteEntry,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Full description of one simulation setup. Field names double as the keys
/// of the flat `key=value` config-file format (see [`SystemConfig::parse`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Transmit antennas N at the base station.
    pub num_antennas: usize,
    /// Users K, each with a single receive antenna.
    pub num_users: usize,
    /// Base-station-to-user distances in meters, one per user.
    pub distances_m: Vec<f64>,
    /// Path loss exponent κ (≥ 0).
    pub path_loss_exponent: f64,
    /// Receiver noise variance σ² in watts, shared by all users.
    pub noise_var_w: f64,
    /// Bandwidth in hertz. Applied at presentation time only; the solvers
    /// work with normalized rates (bandwidth 1).
    pub bandwidth_hz: f64,
    /// Per-user minimum SINR targets γ_min (dimensionless, ≥ 0).
    pub min_sinr: Vec<f64>,
    /// Power-amplifier efficiency ε₀ in (0, 1].
    pub amp_efficiency: f64,
    /// Static power loss in watts.
    pub p_sta_w: f64,
    /// Dynamic power loss in watts per antenna.
    pub p_dyn_w: f64,
    /// Available transmit power budget in watts.
    pub p_ava_w: f64,
    /// Convergence threshold ε for the SCA objective.
    pub sca_tolerance: f64,
    /// Convergence threshold ς for the outer parametric iteration.
    pub dinkelbach_tolerance: f64,
    /// Iteration cap per SCA loop.
    pub max_iterations: usize,
    /// RNG seed for channel generation.
    pub seed: u64,
}

impl Default for SystemConfig {
    /// Reference three-user setup: N = 3, distances (1.0, 5.5, 10.0) m,
    /// κ = 1, σ² = 2 W, ε₀ = 0.65, γ_min = 10⁻², 1 MHz bandwidth,
    /// 10 W static loss, and a budget corresponding to TX-SNR 10 dB.
    fn default() -> Self {
        Self {
            num_antennas: 3,
            num_users: 3,
            distances_m: vec![1.0, 5.5, 10.0],
            path_loss_exponent: 1.0,
            noise_var_w: 2.0,
            bandwidth_hz: 1.0e6,
            min_sinr: vec![1.0e-2; 3],
            amp_efficiency: 0.65,
            p_sta_w: 10.0,
            p_dyn_w: 0.0,
            p_ava_w: txsnr_to_budget(10.0, 2.0),
            sca_tolerance: 0.01,
            dinkelbach_tolerance: 0.01,
            max_iterations: 50,
            seed: 1,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let err = |msg: &str| Err(ScenarioError::InvalidConfig(msg.to_string()));
        if self.num_users < 1 || self.num_antennas < 1 {
            return err("num_users and num_antennas must be >= 1");
        }
        if self.distances_m.len() != self.num_users {
            return err("distances_m must have one entry per user");
        }
        if self.min_sinr.len() != self.num_users {
            return err("min_sinr must have one entry per user");
        }
        if self.distances_m.iter().any(|d| !(*d > 0.0)) {
            return err("distances must be positive");
        }
        if self.min_sinr.iter().any(|g| !(*g >= 0.0)) {
            return err("min_sinr entries must be >= 0");
        }
        if !(self.path_loss_exponent >= 0.0) {
            return err("path_loss_exponent must be >= 0");
        }
        if !(self.noise_var_w > 0.0) {
            return err("noise_var_w must be > 0");
        }
        if !(self.amp_efficiency > 0.0 && self.amp_efficiency <= 1.0) {
            return err("amp_efficiency must be in (0, 1]");
        }
        if !(self.p_sta_w >= 0.0) || !(self.p_dyn_w >= 0.0) {
            return err("power losses must be >= 0");
        }
        if !(self.p_ava_w > 0.0) {
            return err("p_ava_w must be > 0");
        }
        if !(self.sca_tolerance > 0.0) || !(self.dinkelbach_tolerance > 0.0) {
            return err("tolerances must be > 0");
        }
        if !(self.bandwidth_hz > 0.0) {
            return err("bandwidth_hz must be > 0");
        }
        if self.max_iterations == 0 {
            return err("max_iterations must be >= 1");
        }
        Ok(())
    }

    pub fn power_model(&self) -> PowerModel {
        PowerModel {
            amp_efficiency: self.amp_efficiency,
            p_sta_w: self.p_sta_w,
            p_dyn_w: self.p_dyn_w,
            num_antennas: self.num_antennas,
        }
    }

    /// Set the power budget from a TX-SNR value in dB.
    pub fn with_txsnr_db(mut self, txsnr_db: f64) -> Self {
        self.p_ava_w = txsnr_to_budget(txsnr_db, self.noise_var_w);
        self
    }

    /// Serialize as flat `key=value` lines (lists comma-separated).
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = writeln!(s, "num_antennas={}", self.num_antennas);
        let _ = writeln!(s, "num_users={}", self.num_users);
        let _ = writeln!(s, "distances_m={}", join(&self.distances_m));
        let _ = writeln!(s, "path_loss_exponent={}", self.path_loss_exponent);
        let _ = writeln!(s, "noise_var_w={}", self.noise_var_w);
        let _ = writeln!(s, "bandwidth_hz={}", self.bandwidth_hz);
        let _ = writeln!(s, "min_sinr={}", join(&self.min_sinr));
        let _ = writeln!(s, "amp_efficiency={}", self.amp_efficiency);
        let _ = writeln!(s, "p_sta_w={}", self.p_sta_w);
        let _ = writeln!(s, "p_dyn_w={}", self.p_dyn_w);
        let _ = writeln!(s, "p_ava_w={}", self.p_ava_w);
        let _ = writeln!(s, "sca_tolerance={}", self.sca_tolerance);
        let _ = writeln!(s, "dinkelbach_tolerance={}", self.dinkelbach_tolerance);
        let _ = writeln!(s, "max_iterations={}", self.max_iterations);
        let _ = writeln!(s, "seed={}", self.seed);
        s
    }

    /// Parse flat `key=value` text. Unknown keys are rejected; missing keys
    /// keep their defaults. Lines starting with `#` are comments.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut cfg = SystemConfig::default();
        cfg.apply_key_values(text)?;
        // Resize per-user lists if only K was given.
        if cfg.distances_m.len() != cfg.num_users && cfg.distances_m.len() == 3 {
            return Err(ScenarioError::Parse(format!(
                "distances_m has {} entries for {} users",
                cfg.distances_m.len(),
                cfg.num_users
            )));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_key_values(&mut self, text: &str) -> Result<(), ScenarioError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ScenarioError::Parse(format!("line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| ScenarioError::Parse(format!("{key}: invalid {what}: {value}"));
            let parse_f64 = |v: &str| v.parse::<f64>().map_err(|_| bad("number"));
            let parse_list = |v: &str| -> Result<Vec<f64>, ScenarioError> {
                v.split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| bad("list")))
                    .collect()
            };
            match key {
                "num_antennas" => self.num_antennas = value.parse().map_err(|_| bad("integer"))?,
                "num_users" => self.num_users = value.parse().map_err(|_| bad("integer"))?,
                "distances_m" => self.distances_m = parse_list(value)?,
                "path_loss_exponent" => self.path_loss_exponent = parse_f64(value)?,
                "noise_var_w" => self.noise_var_w = parse_f64(value)?,
                "bandwidth_hz" => self.bandwidth_hz = parse_f64(value)?,
                "min_sinr" => self.min_sinr = parse_list(value)?,
                "amp_efficiency" => self.amp_efficiency = parse_f64(value)?,
                "p_sta_w" => self.p_sta_w = parse_f64(value)?,
                "p_dyn_w" => self.p_dyn_w = parse_f64(value)?,
                "p_ava_w" => self.p_ava_w = parse_f64(value)?,
                "sca_tolerance" => self.sca_tolerance = parse_f64(value)?,
                "dinkelbach_tolerance" => self.dinkelbach_tolerance = parse_f64(value)?,
                "max_iterations" => {
                    self.max_iterations = value.parse().map_err(|_| bad("integer"))?
                }
                "seed" => self.seed = value.parse().map_err(|_| bad("integer"))?,
                other => {
                    return Err(ScenarioError::Parse(format!("unknown key: {other}")));
                }
            }
        }
        Ok(())
    }
}

/// Channel vectors ordered by descending squared norm (user 1 strongest),
/// together with provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    channels: Vec<Vec<Complex64>>,
    gains: Vec<f64>,
    distances_m: Vec<f64>,
    permutation: Vec<usize>,
    seed: Option<u64>,
}

impl ChannelSet {
    pub fn num_users(&self) -> usize {
        self.channels.len()
    }

    pub fn num_antennas(&self) -> usize {
        self.channels[0].len()
    }

    pub fn channel(&self, user: usize) -> &[Complex64] {
        &self.channels[user]
    }

    pub fn channels(&self) -> &[Vec<Complex64>] {
        &self.channels
    }

    /// Squared Euclidean norms ‖h_i‖², non-increasing in the user index.
    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Original index of each ordered slot.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn distances_m(&self) -> &[f64] {
        &self.distances_m
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Serialize one record per user: slot index, distance, then N `re,im`
    /// entries at 17 significant digits, so a run can be replayed exactly.
    /// An optional config is embedded as a header for self-contained files.
    pub fn dump(&self, config: Option<&SystemConfig>) -> String {
        let mut s = String::from("# noma-gee channels v1\n");
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "# seed={seed}");
        }
        let _ = writeln!(
            s,
            "# permutation={}",
            self.permutation
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        if let Some(cfg) = config {
            for line in cfg.to_key_values().lines() {
                let _ = writeln!(s, "# config {line}");
            }
        }
        for (i, h) in self.channels.iter().enumerate() {
            let _ = write!(s, "{} {:.16e}", i, self.distances_m[i]);
            for z in h {
                let _ = write!(s, " {:.16e},{:.16e}", z.re, z.im);
            }
            s.push('\n');
        }
        s
    }

    /// Parse the [`ChannelSet::dump`] format. Returns the channels and the
    /// embedded config, when one is present.
    pub fn parse(text: &str) -> Result<(Self, Option<SystemConfig>), ScenarioError> {
        let mut channels = Vec::new();
        let mut distances = Vec::new();
        let mut seed = None;
        let mut permutation: Option<Vec<usize>> = None;
        let mut config_lines = String::new();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("seed=") {
                    seed = Some(
                        v.trim()
                            .parse()
                            .map_err(|_| ScenarioError::Parse("bad seed".into()))?,
                    );
                } else if let Some(v) = rest.strip_prefix("permutation=") {
                    let p: Result<Vec<usize>, _> =
                        v.split(',').map(|t| t.trim().parse::<usize>()).collect();
                    permutation =
                        Some(p.map_err(|_| ScenarioError::Parse("bad permutation".into()))?);
                } else if let Some(v) = rest.strip_prefix("config ") {
                    config_lines.push_str(v);
                    config_lines.push('\n');
                }
                continue;
            }
            let mut tok = line.split_whitespace();
            let _index: usize = tok
                .next()
                .ok_or_else(|| ScenarioError::Parse("missing index".into()))?
                .parse()
                .map_err(|_| ScenarioError::Parse("bad index".into()))?;
            let dist: f64 = tok
                .next()
                .ok_or_else(|| ScenarioError::Parse("missing distance".into()))?
                .parse()
                .map_err(|_| ScenarioError::Parse("bad distance".into()))?;
            let mut h = Vec::new();
            for pair in tok {
                let (re, im) = pair
                    .split_once(',')
                    .ok_or_else(|| ScenarioError::Parse("expected re,im".into()))?;
                let re: f64 = re
                    .parse()
                    .map_err(|_| ScenarioError::Parse("bad re".into()))?;
                let im: f64 = im
                    .parse()
                    .map_err(|_| ScenarioError::Parse("bad im".into()))?;
                h.push(Complex64::new(re, im));
            }
            distances.push(dist);
            channels.push(h);
        }
        if channels.is_empty() {
            return Err(ScenarioError::EmptyChannels);
        }
        let n = channels[0].len();
        if channels.iter().any(|h| h.len() != n) {
            return Err(ScenarioError::RaggedChannels);
        }
        let k = channels.len();
        let gains = channels.iter().map(|h| norm_sq(h)).collect::<Vec<_>>();
        if gains.windows(2).any(|w| w[0] < w[1]) {
            return Err(ScenarioError::Parse(
                "records are not ordered by descending channel gain".into(),
            ));
        }
        let config = if config_lines.is_empty() {
            None
        } else {
            Some(SystemConfig::parse(&config_lines)?)
        };
        Ok((
            Self {
                channels,
                gains,
                distances_m: distances,
                permutation: permutation.unwrap_or_else(|| (0..k).collect()),
                seed,
            },
            config,
        ))
    }
}

fn norm_sq(h: &[Complex64]) -> f64 {
    h.iter().map(|z| z.norm_sqr()).sum()
}

/// Deterministic per-trial RNG stream: trial index selects a ChaCha stream
/// under the master seed, so Monte-Carlo trials are reproducible under any
/// parallel schedule.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Draw the small-scale fading g_i with i.i.d. zero-mean circularly-symmetric
/// complex Gaussian unit-variance entries, scale by √(d_i^{−κ}), and order
/// users by descending channel gain.
pub fn generate_channels(config: &SystemConfig) -> Result<ChannelSet, ScenarioError> {
    let mut rng = trial_rng(config.seed, 0);
    generate_channels_with_rng(config, &mut rng)
}

/// Same as [`generate_channels`] but with a caller-provided RNG (used by the
/// sweep harness to assign one stream per trial).
pub fn generate_channels_with_rng(
    config: &SystemConfig,
    rng: &mut ChaCha8Rng,
) -> Result<ChannelSet, ScenarioError> {
    config.validate()?;
    let half = 0.5f64.sqrt();
    let mut raw = Vec::with_capacity(config.num_users);
    for &d in &config.distances_m {
        let scale = d.powf(-config.path_loss_exponent).sqrt();
        let h: Vec<Complex64> = (0..config.num_antennas)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re * half * scale, im * half * scale)
            })
            .collect();
        raw.push(h);
    }
    let mut set = order_users(&raw)?;
    set.distances_m = set
        .permutation
        .iter()
        .map(|&p| config.distances_m[p])
        .collect();
    set.seed = Some(config.seed);
    Ok(set)
}

/// Sort channels by descending squared norm; ties keep the original order.
/// The applied permutation is recorded in the result.
pub fn order_users(raw_channels: &[Vec<Complex64>]) -> Result<ChannelSet, ScenarioError> {
    if raw_channels.is_empty() {
        return Err(ScenarioError::EmptyChannels);
    }
    let n = raw_channels[0].len();
    if n == 0 || raw_channels.iter().any(|h| h.len() != n) {
        return Err(ScenarioError::RaggedChannels);
    }
    if raw_channels
        .iter()
        .any(|h| h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()))
    {
        return Err(ScenarioError::NonFiniteEntry);
    }
    let norms: Vec<f64> = raw_channels.iter().map(|h| norm_sq(h)).collect();
    let mut order: Vec<usize> = (0..raw_channels.len()).collect();
    order.sort_by(|&a, &b| {
        norms[b]
            .partial_cmp(&norms[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let channels: Vec<Vec<Complex64>> = order.iter().map(|&i| raw_channels[i].clone()).collect();
    let gains = order.iter().map(|&i| norms[i]).collect();
    let k = raw_channels.len();
    Ok(ChannelSet {
        channels,
        gains,
        distances_m: vec![0.0; k],
        permutation: order,
        seed: None,
    })
}

/// Power budget from a normalized transmit SNR: σ² · 10^(dB/10).
pub fn txsnr_to_budget(txsnr_db: f64, noise_var: f64) -> f64 {
    noise_var * 10f64.powf(txsnr_db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn generate_shape_contract() {
        let cfg = SystemConfig::default();
        let set = generate_channels(&cfg).unwrap();
        assert_eq!(set.num_users(), 3);
        assert_eq!(set.num_antennas(), 3);
        for h in set.channels() {
            assert_eq!(h.len(), 3);
            assert!(h.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        }
    }

    #[test]
    fn path_loss_scaling() {
        // Same seed draws identical small-scale fading, so dividing only the
        // second distance by 4 with κ = 2 scales that vector by 1/4.
        let mut a = SystemConfig {
            num_users: 2,
            distances_m: vec![1.0, 1.0],
            min_sinr: vec![0.01; 2],
            path_loss_exponent: 2.0,
            seed: 7,
            ..SystemConfig::default()
        };
        let base = generate_channels(&a).unwrap();
        a.distances_m = vec![1.0, 4.0];
        let scaled = generate_channels(&a).unwrap();
        // Find the slot holding original user 1 in each set.
        let slot_base = base.permutation().iter().position(|&p| p == 1).unwrap();
        let slot_scaled = scaled.permutation().iter().position(|&p| p == 1).unwrap();
        for (z_base, z_scaled) in base
            .channel(slot_base)
            .iter()
            .zip(scaled.channel(slot_scaled))
        {
            assert_relative_eq!(z_scaled.re, z_base.re * 0.25, max_relative = 1e-12);
            assert_relative_eq!(z_scaled.im, z_base.im * 0.25, max_relative = 1e-12);
        }
    }

    #[test]
    fn generate_is_deterministic() {
        let cfg = SystemConfig {
            seed: 42,
            ..SystemConfig::default()
        };
        let a = generate_channels(&cfg).unwrap();
        let b = generate_channels(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ordering_by_norm() {
        let c = |x: f64| Complex64::new(x, 0.0);
        // norms (1, 3, 2) → order (b, c, a)
        let raw = vec![vec![c(1.0)], vec![c(3.0f64.sqrt())], vec![c(2.0f64.sqrt())]];
        let set = order_users(&raw).unwrap();
        assert_eq!(set.permutation(), &[1, 2, 0]);
        assert!(set.gains().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn ordering_identity_when_sorted() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let raw = vec![vec![c(3.0)], vec![c(2.0)], vec![c(1.0)]];
        let set = order_users(&raw).unwrap();
        assert_eq!(set.permutation(), &[0, 1, 2]);
    }

    #[test]
    fn ordering_tie_break_preserves_original_order() {
        let raw = vec![
            vec![Complex64::new(2.0f64.sqrt(), 0.0)],
            vec![Complex64::new(0.0, 2.0f64.sqrt())],
        ];
        let set = order_users(&raw).unwrap();
        assert_eq!(set.permutation(), &[0, 1]);
    }

    #[test]
    fn ordering_rejects_bad_input() {
        assert!(matches!(
            order_users(&[]),
            Err(ScenarioError::EmptyChannels)
        ));
        let ragged = vec![
            vec![Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        ];
        assert!(matches!(
            order_users(&ragged),
            Err(ScenarioError::RaggedChannels)
        ));
    }

    #[test]
    fn txsnr_conversion() {
        assert_relative_eq!(txsnr_to_budget(0.0, 1.0), 1.0);
        assert_relative_eq!(txsnr_to_budget(2.0, 2.0), 3.1698, max_relative = 1e-4);
        assert_relative_eq!(txsnr_to_budget(25.0, 2.0), 632.456, max_relative = 1e-5);
    }

    #[test]
    fn dbm_conversion() {
        assert_relative_eq!(dbm_to_watts(40.0), 10.0, max_relative = 1e-12);
        assert_relative_eq!(dbm_to_watts(10.0), 0.01, max_relative = 1e-12);
        assert_relative_eq!(dbm_to_watts(5.0), 0.0031623, max_relative = 1e-4);
    }

    #[test]
    fn dump_parse_round_trip_is_bit_exact() {
        let cfg = SystemConfig {
            seed: 99,
            ..SystemConfig::default()
        };
        let set = generate_channels(&cfg).unwrap();
        let text = set.dump(Some(&cfg));
        let (back, parsed_cfg) = ChannelSet::parse(&text).unwrap();
        assert_eq!(set, back);
        assert_eq!(parsed_cfg.unwrap(), cfg);
    }

    #[test]
    fn config_key_value_round_trip() {
        let cfg = SystemConfig {
            num_users: 2,
            num_antennas: 4,
            distances_m: vec![1.5, 3.0],
            min_sinr: vec![0.0, 0.5],
            seed: 17,
            ..SystemConfig::default()
        };
        let text = cfg.to_key_values();
        let back = SystemConfig::parse(&text).unwrap();
        assert_eq!(cfg, back);
        assert!(SystemConfig::parse("nonsense_key=1").is_err());
    }

    proptest! {
        #[test]
        fn ordering_is_idempotent(
            entries in proptest::collection::vec(
                proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3),
                1..6,
            )
        ) {
            let raw: Vec<Vec<Complex64>> = entries
                .iter()
                .map(|h| h.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
                .collect();
            let once = order_users(&raw).unwrap();
            let twice = order_users(once.channels()).unwrap();
            prop_assert_eq!(once.channels(), twice.channels());
            prop_assert!(twice.permutation().iter().enumerate().all(|(i, &p)| i == p));
        }

        #[test]
        fn path_loss_monotone_in_distance(d1 in 0.5f64..20.0, d2 in 0.5f64..20.0, seed in 0u64..100) {
            prop_assume!((d1 - d2).abs() > 1e-9);
            let mk = |d: f64| SystemConfig {
                num_users: 1,
                distances_m: vec![d],
                min_sinr: vec![0.01],
                path_loss_exponent: 2.0,
                seed,
                ..SystemConfig::default()
            };
            let g1 = generate_channels(&mk(d1)).unwrap().gains()[0];
            let g2 = generate_channels(&mk(d2)).unwrap().gains()[0];
            if d1 > d2 {
                prop_assert!(g1 < g2);
            } else {
                prop_assert!(g1 > g2);
            }
        }
    }
}
