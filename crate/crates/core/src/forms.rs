//! Shared conic building blocks for the beamforming solvers.
//!
//! Complex beamformers enter the programs as stacked real vectors of
//! dimension 2N: coordinates 0..N hold the real parts, N..2N the imaginary
//! parts. Every h_kᴴw expression then becomes a real affine form in those
//! coordinates.

use num_complex::Complex64;

use crate::conic::{AffExpr, ConicProgram, VarHandle};
use crate::noma::BeamformerSet;
use crate::scenario::ChannelSet;
use crate::sca::{linearize_abs_sq, SolveError};

/// Re(hᴴw) as an affine form over the stacked beam variable.
pub fn re_product(prog: &ConicProgram, h: &[Complex64], w: VarHandle) -> AffExpr {
    let n = h.len();
    let mut expr = AffExpr::default();
    for (j, hj) in h.iter().enumerate() {
        // conj(h_j)·w_j: Re = h_re·w_re + h_im·w_im
        expr = expr
            .plus(&prog.var(w, j).scaled(hj.re))
            .plus(&prog.var(w, n + j).scaled(hj.im));
    }
    expr
}

/// Im(hᴴw) as an affine form over the stacked beam variable.
pub fn im_product(prog: &ConicProgram, h: &[Complex64], w: VarHandle) -> AffExpr {
    let n = h.len();
    let mut expr = AffExpr::default();
    for (j, hj) in h.iter().enumerate() {
        // conj(h_j)·w_j: Im = h_re·w_im − h_im·w_re
        expr = expr
            .plus(&prog.var(w, n + j).scaled(hj.re))
            .plus(&prog.var(w, j).scaled(-hj.im));
    }
    expr
}

/// Register `‖v‖² ≤ bound` as the cone `‖[v, (bound−1)/2]‖ ≤ (bound+1)/2`.
pub fn quad_le_affine(
    prog: &mut ConicProgram,
    mut v: Vec<AffExpr>,
    bound: AffExpr,
) -> Result<(), SolveError> {
    let rhs = bound.scaled(0.5).add_constant(0.5);
    v.push(bound.scaled(0.5).add_constant(-0.5));
    prog.add_soc(rhs, v)?;
    Ok(())
}

/// Both components of h_kᴴw_j for every interfering user j < i.
fn interference_entries(
    prog: &ConicProgram,
    channels: &ChannelSet,
    ws: &[VarHandle],
    i: usize,
    k: usize,
) -> Vec<AffExpr> {
    let h_k = channels.channel(k);
    let mut v = Vec::with_capacity(2 * i);
    for j in 0..i {
        v.push(re_product(prog, h_k, ws[j]));
        v.push(im_product(prog, h_k, ws[j]));
    }
    v
}

/// Interference upper bound Σ_{j<i} |h_kᴴw_j|² + σ² ≤ θ in cone form:
/// (θ − σ² + 1)/2 ≥ ‖[h_kᴴw_1 … h_kᴴw_{i−1}, (θ − σ² − 1)/2]‖.
pub fn add_interference_soc(
    prog: &mut ConicProgram,
    channels: &ChannelSet,
    ws: &[VarHandle],
    i: usize,
    k: usize,
    theta: AffExpr,
    noise_var: f64,
) -> Result<(), SolveError> {
    let v = interference_entries(prog, channels, ws, i, k);
    quad_le_affine(prog, v, theta.add_constant(-noise_var))
}

/// Minimum-SINR cone for decoder k of message i:
/// (1/√γ_min)·Re(h_kᴴw_i) ≥ ‖[h_kᴴw_1 … h_kᴴw_{i−1}, σ]‖.
pub fn add_min_rate_soc(
    prog: &mut ConicProgram,
    channels: &ChannelSet,
    ws: &[VarHandle],
    i: usize,
    k: usize,
    gamma_min: f64,
    noise_var: f64,
) -> Result<(), SolveError> {
    let h_k = channels.channel(k);
    let mut v = interference_entries(prog, channels, ws, i, k);
    v.push(AffExpr::constant(noise_var.sqrt()));
    let rhs = re_product(prog, h_k, ws[i]).scaled(1.0 / gamma_min.sqrt());
    prog.add_soc(rhs, v)?;
    Ok(())
}

/// SIC power-ordering chain at every receiver m:
/// |h_mᴴw_{j+1}|² ≥ |h_mᴴw_j|² with the greater (left) side replaced by its
/// affine tangent at the previous beams, keeping the right side an exact
/// convex quadratic. The tangent under-estimates the left side, so any point
/// satisfying the surrogate satisfies the original chain.
pub fn add_sic_chain(
    prog: &mut ConicProgram,
    channels: &ChannelSet,
    ws: &[VarHandle],
    previous: &BeamformerSet,
) -> Result<(), SolveError> {
    let k_users = channels.num_users();
    for m in 0..k_users {
        let h_m = channels.channel(m);
        for j in 0..k_users.saturating_sub(1) {
            let tangent = linearize_abs_sq(h_m, previous.beam(j + 1))?;
            let lin = tangent.to_expr(prog, ws[j + 1]);
            let v = vec![
                re_product(prog, h_m, ws[j]),
                im_product(prog, h_m, ws[j]),
            ];
            quad_le_affine(prog, v, lin)?;
        }
    }
    Ok(())
}

/// Per-user transmit power epigraph t ≥ ‖w‖².
pub fn add_power_epigraph(
    prog: &mut ConicProgram,
    w: VarHandle,
    t: AffExpr,
) -> Result<(), SolveError> {
    let dim = prog.dim_of(w);
    let v: Vec<AffExpr> = (0..dim).map(|j| prog.var(w, j)).collect();
    quad_le_affine(prog, v, t)
}

/// Unstack a solved 2N-real beam variable back into a complex vector.
pub fn unstack_beam(values: &[f64]) -> Vec<Complex64> {
    let n = values.len() / 2;
    (0..n)
        .map(|j| Complex64::new(values[j], values[n + j]))
        .collect()
}

/// Interference-plus-noise levels θ[i][k] = Σ_{j<i}|h_kᴴw_j|² + σ² and the
/// per-user effective SINRs measured in the rotated-phase gauge the cone
/// programs use: the signal term is max(Re(h_kᴴw_i), 0)². The gauge value
/// never exceeds the true SINR, so states built from it stay feasible for
/// the constructed subproblems.
pub fn gauge_from_beams(
    channels: &ChannelSet,
    beams: &BeamformerSet,
    noise_var: f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k_users = channels.num_users();
    let mut theta = Vec::with_capacity(k_users);
    let mut sinr = Vec::with_capacity(k_users);
    for i in 0..k_users {
        let mut row = Vec::with_capacity(i + 1);
        let mut worst = f64::INFINITY;
        for k in 0..=i {
            let h_k = channels.channel(k);
            let interference: f64 = (0..i)
                .map(|j| crate::noma::channel_beam_product(h_k, beams.beam(j)).norm_sqr())
                .sum();
            let level = interference + noise_var;
            let re = crate::noma::channel_beam_product(h_k, beams.beam(i))
                .re
                .max(0.0);
            worst = worst.min(re * re / level);
            row.push(level);
        }
        theta.push(row);
        sinr.push(worst);
    }
    (theta, sinr)
}
