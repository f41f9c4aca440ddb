//! Ground-truth evaluation of candidate beamformer sets: pairwise and
//! effective SINRs, achievable rates, power consumption, energy efficiency,
//! and constraint validation. Every solver in this crate is checked against
//! these direct evaluations.

use num_complex::Complex64;
use thiserror::Error;

use crate::scenario::{ChannelSet, SystemConfig};

/// Relative tolerance for the feasibility flags in [`validate_solution`].
/// Sits well above interior-point accuracy and well below any
/// performance-relevant scale.
pub const FLAG_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("user index out of range")]
    IndexOutOfRange,
    #[error("dimension mismatch between channels and beams")]
    DimensionMismatch,
    #[error("SINR values must be nonnegative")]
    NegativeSinr,
    #[error("beamformer entries must be finite")]
    NonFiniteBeam,
    #[error("total power is zero")]
    ZeroTotalPower,
}

/// One beamforming vector per user, each of length N.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet {
    beams: Vec<Vec<Complex64>>,
}

impl BeamformerSet {
    pub fn new(beams: Vec<Vec<Complex64>>) -> Result<Self, EvalError> {
        if beams.is_empty() {
            return Err(EvalError::DimensionMismatch);
        }
        let n = beams[0].len();
        if n == 0 || beams.iter().any(|w| w.len() != n) {
            return Err(EvalError::DimensionMismatch);
        }
        if beams
            .iter()
            .any(|w| w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()))
        {
            return Err(EvalError::NonFiniteBeam);
        }
        Ok(Self { beams })
    }

    pub fn zeros(num_users: usize, num_antennas: usize) -> Self {
        Self {
            beams: vec![vec![Complex64::new(0.0, 0.0); num_antennas]; num_users],
        }
    }

    pub fn num_users(&self) -> usize {
        self.beams.len()
    }

    pub fn num_antennas(&self) -> usize {
        self.beams[0].len()
    }

    pub fn beam(&self, user: usize) -> &[Complex64] {
        &self.beams[user]
    }

    pub fn beams(&self) -> &[Vec<Complex64>] {
        &self.beams
    }

    /// Total transmit power Σ‖w_i‖².
    pub fn transmit_power(&self) -> f64 {
        self.beams
            .iter()
            .map(|w| w.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            beams: self
                .beams
                .iter()
                .map(|w| w.iter().map(|z| z * factor).collect())
                .collect(),
        }
    }
}

/// Base-station power model: amplifier efficiency and static/dynamic losses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    pub amp_efficiency: f64,
    pub p_sta_w: f64,
    pub p_dyn_w: f64,
    pub num_antennas: usize,
}

impl PowerModel {
    /// P_loss = p_sta + N·p_dyn.
    pub fn p_loss(&self) -> f64 {
        self.p_sta_w + self.num_antennas as f64 * self.p_dyn_w
    }

    /// P_total = P_tr/ε₀ + P_loss.
    pub fn total(&self, p_tr: f64) -> f64 {
        p_tr / self.amp_efficiency + self.p_loss()
    }
}

/// Everything a solver run is judged on.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceReport {
    /// pair_sinrs[i][k] = SINR of user k decoding message i, for k ≤ i.
    pub pair_sinrs: Vec<Vec<f64>>,
    /// Effective SINR of each user: min over k ≤ i of pair_sinrs[i][k].
    pub effective_sinrs: Vec<f64>,
    /// Achievable per-user rates.
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    pub p_tr_w: f64,
    pub p_total_w: f64,
    /// Sum rate divided by total consumed power.
    pub gee: f64,
    pub sic_ok: bool,
    pub min_rate_ok: bool,
    pub budget_ok: bool,
}

impl PerformanceReport {
    pub fn all_ok(&self) -> bool {
        self.sic_ok && self.min_rate_ok && self.budget_ok
    }
}

/// h^H w with the physics convention (conjugate on the channel side).
pub fn channel_beam_product(h: &[Complex64], w: &[Complex64]) -> Complex64 {
    h.iter().zip(w).map(|(hj, wj)| hj.conj() * wj).sum()
}

fn check_dims(channels: &ChannelSet, beams: &BeamformerSet) -> Result<(), EvalError> {
    if channels.num_users() != beams.num_users()
        || channels.num_antennas() != beams.num_antennas()
    {
        return Err(EvalError::DimensionMismatch);
    }
    Ok(())
}

/// SINR of user `k` when decoding the message of user `i` (0-based indices,
/// `k ≤ i`). Interference comes only from messages 0..i that are decoded
/// later in the SIC order.
pub fn pair_sinr(
    channels: &ChannelSet,
    beams: &BeamformerSet,
    i: usize,
    k: usize,
    noise_var: f64,
) -> Result<f64, EvalError> {
    check_dims(channels, beams)?;
    if i >= channels.num_users() || k > i {
        return Err(EvalError::IndexOutOfRange);
    }
    let h_k = channels.channel(k);
    let signal = channel_beam_product(h_k, beams.beam(i)).norm_sqr();
    let interference: f64 = (0..i)
        .map(|j| channel_beam_product(h_k, beams.beam(j)).norm_sqr())
        .sum();
    Ok(signal / (interference + noise_var))
}

/// Effective SINRs γ_i = min over k ≤ i of the pair SINRs.
pub fn effective_sinr(
    channels: &ChannelSet,
    beams: &BeamformerSet,
    noise_var: f64,
) -> Result<Vec<f64>, EvalError> {
    let table = pair_sinr_table(channels, beams, noise_var)?;
    Ok(table
        .iter()
        .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
        .collect())
}

/// All pair SINRs, row i holding k = 0..=i.
pub fn pair_sinr_table(
    channels: &ChannelSet,
    beams: &BeamformerSet,
    noise_var: f64,
) -> Result<Vec<Vec<f64>>, EvalError> {
    check_dims(channels, beams)?;
    let k_users = channels.num_users();
    let mut table = Vec::with_capacity(k_users);
    for i in 0..k_users {
        let mut row = Vec::with_capacity(i + 1);
        for k in 0..=i {
            row.push(pair_sinr(channels, beams, i, k, noise_var)?);
        }
        table.push(row);
    }
    Ok(table)
}

/// R_i = B_w · log₂(1 + γ_i).
pub fn rates(effective_sinrs: &[f64], bandwidth: f64) -> Result<Vec<f64>, EvalError> {
    if effective_sinrs.iter().any(|g| *g < 0.0 || !g.is_finite()) {
        return Err(EvalError::NegativeSinr);
    }
    Ok(effective_sinrs
        .iter()
        .map(|g| bandwidth * (1.0 + g).log2())
        .collect())
}

/// (P_tr, P_total) for a beamformer set under the given power model.
pub fn total_power(beams: &BeamformerSet, model: &PowerModel) -> (f64, f64) {
    let p_tr = beams.transmit_power();
    (p_tr, model.total(p_tr))
}

/// Global energy efficiency: Σ R_i / P_total.
pub fn gee(
    channels: &ChannelSet,
    beams: &BeamformerSet,
    model: &PowerModel,
    noise_var: f64,
    bandwidth: f64,
) -> Result<f64, EvalError> {
    let sinrs = effective_sinr(channels, beams, noise_var)?;
    let sum_rate: f64 = rates(&sinrs, bandwidth)?.iter().sum();
    let (_, p_total) = total_power(beams, model);
    if p_total <= 0.0 {
        return Err(EvalError::ZeroTotalPower);
    }
    Ok(sum_rate / p_total)
}

/// Re-evaluate every constraint of the beamforming design directly from the
/// raw inputs (normalized bandwidth): the SIC power chain
/// |h_iᴴw_K|² ≥ … ≥ |h_iᴴw_1|² at every receiver, the per-user minimum SINR,
/// and the transmit power budget, each within [`FLAG_TOL`] relative.
pub fn validate_solution(
    channels: &ChannelSet,
    beams: &BeamformerSet,
    config: &SystemConfig,
) -> Result<PerformanceReport, EvalError> {
    check_dims(channels, beams)?;
    let noise_var = config.noise_var_w;
    let pair_sinrs = pair_sinr_table(channels, beams, noise_var)?;
    let effective: Vec<f64> = pair_sinrs
        .iter()
        .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let user_rates = rates(&effective, 1.0)?;
    let sum_rate: f64 = user_rates.iter().sum();
    let model = config.power_model();
    let (p_tr, p_total) = total_power(beams, &model);

    let k_users = channels.num_users();
    let mut sic_ok = true;
    for i in 0..k_users {
        let h_i = channels.channel(i);
        let powers: Vec<f64> = (0..k_users)
            .map(|j| channel_beam_product(h_i, beams.beam(j)).norm_sqr())
            .collect();
        for j in 0..k_users.saturating_sub(1) {
            // later users (weaker channels) must carry at least as much
            // received power at every receiver
            if powers[j + 1] < powers[j] * (1.0 - FLAG_TOL) {
                sic_ok = false;
            }
        }
    }
    let min_rate_ok = effective
        .iter()
        .zip(&config.min_sinr)
        .all(|(g, gmin)| *g >= gmin * (1.0 - FLAG_TOL));
    let budget_ok = p_tr <= config.p_ava_w * (1.0 + FLAG_TOL);

    Ok(PerformanceReport {
        pair_sinrs,
        effective_sinrs: effective,
        rates: user_rates,
        sum_rate,
        p_tr_w: p_tr,
        p_total_w: p_total,
        gee: sum_rate / p_total,
        sic_ok,
        min_rate_ok,
        budget_ok,
    })
}

/// Evaluation for orthogonal (ZF-style) designs: each user decodes only its
/// own message, residual cross-beam power counts as noise, and no SIC chain
/// applies (the flag is vacuously true).
pub fn oma_report(
    channels: &ChannelSet,
    beams: &BeamformerSet,
    config: &SystemConfig,
) -> Result<PerformanceReport, EvalError> {
    check_dims(channels, beams)?;
    let noise_var = config.noise_var_w;
    let k_users = channels.num_users();
    let mut sinrs = Vec::with_capacity(k_users);
    for i in 0..k_users {
        let h_i = channels.channel(i);
        let signal = channel_beam_product(h_i, beams.beam(i)).norm_sqr();
        let interference: f64 = (0..k_users)
            .filter(|&j| j != i)
            .map(|j| channel_beam_product(h_i, beams.beam(j)).norm_sqr())
            .sum();
        sinrs.push(signal / (interference + noise_var));
    }
    let user_rates = rates(&sinrs, 1.0)?;
    let sum_rate: f64 = user_rates.iter().sum();
    let model = config.power_model();
    let (p_tr, p_total) = total_power(beams, &model);
    let min_rate_ok = sinrs
        .iter()
        .zip(&config.min_sinr)
        .all(|(g, gmin)| *g >= gmin * (1.0 - FLAG_TOL));
    Ok(PerformanceReport {
        pair_sinrs: sinrs.iter().map(|&g| vec![g]).collect(),
        effective_sinrs: sinrs,
        rates: user_rates,
        sum_rate,
        p_tr_w: p_tr,
        p_total_w: p_total,
        gee: sum_rate / p_total,
        sic_ok: true,
        min_rate_ok,
        budget_ok: p_tr <= config.p_ava_w * (1.0 + FLAG_TOL),
    })
}
