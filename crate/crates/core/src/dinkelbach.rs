//! GEE maximization through the parametric route: the fractional objective
//! f₁/f₂ (sum rate over total power) is replaced by f₁ − χ·f₂ for a
//! non-negative parameter χ. The outer loop updates χ to the efficiency of
//! the current beams; the parametrized problem is itself non-convex, so each
//! outer step runs an inner SCA with the same surrogate machinery as the
//! direct design. At the optimum the parametric objective F = f₁ − χf₂
//! reaches zero and χ equals the maximal efficiency; χ never decreases from
//! one outer iteration to the next.

use crate::conic::{AffExpr, ConicProgram, Sense, SolveStatusKind, VarHandle};
use crate::forms;
use crate::noma::{self, BeamformerSet, PowerModel};
use crate::scenario::{ChannelSet, SystemConfig};
use crate::sca::{
    convergence_threshold, linearize_sqrt_product, InnerTraceRow, IterRecord, Solution,
    SolveError, SolveStatus, SLACK_FLOOR,
};

/// Cap on outer (χ-update) iterations.
pub const OUTER_ITERATION_CAP: usize = 30;

/// Expansion point of the inner SCA: beams plus the rate-side slacks.
#[derive(Debug, Clone)]
pub struct InnerState {
    pub beams: BeamformerSet,
    pub nu: f64,
    pub z: Vec<f64>,
    /// rho[i][k] for k ≤ i.
    pub rho: Vec<Vec<f64>>,
    pub q: Vec<f64>,
}

impl InnerState {
    /// Back-fill feasible slack values from a beam set, in the same rotated
    /// gauge as the cone programs.
    pub fn from_beams(beams: BeamformerSet, channels: &ChannelSet, noise_var: f64) -> Self {
        let (rho, gauge_sinr) = forms::gauge_from_beams(channels, &beams, noise_var);
        let z: Vec<f64> = gauge_sinr
            .iter()
            .map(|g| 1.0 + g.max(SLACK_FLOOR))
            .collect();
        let q: Vec<f64> = z.iter().map(|zi| zi.log2()).collect();
        let nu = q.iter().sum();
        Self { beams, nu, z, rho, q }
    }
}

/// Outer state of the parametric iteration.
#[derive(Debug, Clone)]
pub struct DinkelbachState {
    pub outer: usize,
    pub chi: f64,
    pub inner: InnerState,
}

/// χ update: the efficiency f₁/f₂ of the given beams, identical to the
/// direct evaluation.
pub fn chi_update(
    beams: &BeamformerSet,
    channels: &ChannelSet,
    model: &PowerModel,
    noise_var: f64,
    bandwidth: f64,
) -> Result<f64, SolveError> {
    Ok(noma::gee(channels, beams, model, noise_var, bandwidth)?)
}

/// Handles into a built inner subproblem.
pub struct InnerVars {
    pub ws: Vec<VarHandle>,
    pub nu: VarHandle,
    pub z: Vec<VarHandle>,
    pub q: Vec<VarHandle>,
    pub rho: Vec<Vec<VarHandle>>,
    pub t: Vec<VarHandle>,
}

/// The convexified parametrized subproblem at the given expansion point:
/// maximize ν − χ(Σtᵢ/ε₀ + P_loss) with per-user power epigraphs tᵢ ≥ ‖wᵢ‖²,
/// Σqᵢ ≥ ν, zᵢ ≥ 2^{qᵢ}, tangent rate cones, interference cones, the
/// minimum-SINR cones (for users with positive targets), the linearized SIC
/// chain, and the power budget. With χ = 0 the objective reduces to the
/// sum-rate surrogate ν.
pub fn build_inner_subproblem(
    state: &InnerState,
    chi: f64,
    channels: &ChannelSet,
    config: &SystemConfig,
) -> Result<(ConicProgram, InnerVars), SolveError> {
    let k_users = channels.num_users();
    let n = channels.num_antennas();
    let sigma2 = config.noise_var_w;
    let mut prog = ConicProgram::new();

    let ws: Vec<VarHandle> = (0..k_users)
        .map(|i| prog.add_variable(&format!("w_{i}"), 2 * n))
        .collect::<Result<_, _>>()?;
    let nu = prog.add_variable("nu", 1)?;
    let z: Vec<VarHandle> = (0..k_users)
        .map(|i| prog.add_variable(&format!("z_{i}"), 1))
        .collect::<Result<_, _>>()?;
    let q: Vec<VarHandle> = (0..k_users)
        .map(|i| prog.add_variable(&format!("q_{i}"), 1))
        .collect::<Result<_, _>>()?;
    let mut rho = Vec::with_capacity(k_users);
    for i in 0..k_users {
        let mut row = Vec::with_capacity(i + 1);
        for k in 0..=i {
            row.push(prog.add_variable(&format!("rho_{i}_{k}"), 1)?);
        }
        rho.push(row);
    }
    let t: Vec<VarHandle> = (0..k_users)
        .map(|i| prog.add_variable(&format!("t_{i}"), 1))
        .collect::<Result<_, _>>()?;

    let p_loss = config.power_model().p_loss();
    let mut objective = prog.var(nu, 0).add_constant(-chi * p_loss);
    for ti in &t {
        objective = objective.plus(&prog.var(*ti, 0).scaled(-chi / config.amp_efficiency));
    }
    prog.set_objective(objective, Sense::Maximize);

    // Σq ≥ ν and ν ≥ 0.
    let sum_q = q
        .iter()
        .fold(AffExpr::default(), |acc, qi| acc.plus(&prog.var(*qi, 0)));
    prog.add_ge(sum_q, prog.var(nu, 0))?;
    prog.add_linear_ge(prog.var(nu, 0))?;

    for i in 0..k_users {
        prog.add_exp_bound(prog.var(z[i], 0), prog.var(q[i], 0))?;
        prog.add_linear_ge(prog.var(z[i], 0).add_constant(-1.0))?;
        prog.add_linear_ge(prog.var(q[i], 0))?;
    }

    for i in 0..k_users {
        let s0 = (state.z[i] - 1.0).max(SLACK_FLOOR);
        for k in 0..=i {
            let tangent = linearize_sqrt_product(s0, state.rho[i][k])?;
            let z_minus_one = prog.var(z[i], 0).add_constant(-1.0);
            let rhs = tangent.to_expr(&z_minus_one, &prog.var(rho[i][k], 0));
            let lhs = forms::re_product(&prog, channels.channel(k), ws[i]);
            prog.add_ge(lhs, rhs)?;
            forms::add_interference_soc(
                &mut prog,
                channels,
                &ws,
                i,
                k,
                prog.var(rho[i][k], 0),
                sigma2,
            )?;
            if config.min_sinr[i] > 0.0 {
                forms::add_min_rate_soc(
                    &mut prog,
                    channels,
                    &ws,
                    i,
                    k,
                    config.min_sinr[i],
                    sigma2,
                )?;
            }
        }
    }

    forms::add_sic_chain(&mut prog, channels, &ws, &state.beams)?;

    // Per-user power epigraphs and the budget on their sum.
    let mut sum_t = AffExpr::default();
    for i in 0..k_users {
        forms::add_power_epigraph(&mut prog, ws[i], prog.var(t[i], 0))?;
        sum_t = sum_t.plus(&prog.var(t[i], 0));
    }
    prog.add_ge(AffExpr::constant(config.p_ava_w), sum_t)?;

    Ok((
        prog,
        InnerVars {
            ws,
            nu,
            z,
            q,
            rho,
            t,
        },
    ))
}

fn inner_state_from_solution(
    prog: &ConicProgram,
    vars: &InnerVars,
    x: &[f64],
    sigma2: f64,
) -> Result<InnerState, SolveError> {
    let beams = BeamformerSet::new(
        vars.ws
            .iter()
            .map(|w| forms::unstack_beam(prog.read(*w, x)))
            .collect(),
    )?;
    let rho = vars
        .rho
        .iter()
        .map(|row| {
            row.iter()
                .map(|r| prog.read(*r, x)[0].max(sigma2))
                .collect()
        })
        .collect();
    let z = vars
        .z
        .iter()
        .map(|zi| prog.read(*zi, x)[0].max(1.0 + SLACK_FLOOR))
        .collect();
    let q = vars.q.iter().map(|qi| prog.read(*qi, x)[0].max(0.0)).collect();
    Ok(InnerState {
        beams,
        nu: prog.read(vars.nu, x)[0].max(0.0),
        z,
        rho,
        q,
    })
}

pub(crate) struct InnerLoopOutcome {
    pub iterations: usize,
    pub converged: bool,
}

/// Run the inner SCA at fixed χ until the surrogate objective stabilizes
/// with two consecutive clean solves. The state is updated in place
/// (warm-started across outer iterations).
pub(crate) fn inner_sca_loop(
    state: &mut InnerState,
    chi: f64,
    channels: &ChannelSet,
    config: &SystemConfig,
    outer: usize,
    trace: &mut Vec<InnerTraceRow>,
    iterates: &mut Vec<IterRecord>,
) -> Result<InnerLoopOutcome, SolveError> {
    let model = config.power_model();
    let mut prev_obj = f64::NAN;
    let mut prev_opt = false;
    let mut prev_nu = f64::NAN;
    let mut iterations = 0;
    let mut converged = false;
    for n in 1..=config.max_iterations {
        let (prog, vars) = build_inner_subproblem(state, chi, channels, config)?;
        let res = prog.solve();
        if res.status != SolveStatusKind::Optimal {
            if n == 1 && res.status == SolveStatusKind::Infeasible {
                return Err(SolveError::Infeasible);
            }
            break;
        }
        let x = res.variable_values.as_ref().expect("optimal has values");
        *state = inner_state_from_solution(&prog, &vars, x, config.noise_var_w)?;
        iterations = n;
        let obj = res.objective_value;

        let sinrs = noma::effective_sinr(channels, &state.beams, config.noise_var_w)?;
        let f1: f64 = noma::rates(&sinrs, 1.0)?.iter().sum();
        let (p_tr, f2) = noma::total_power(&state.beams, &model);
        trace.push(InnerTraceRow {
            outer,
            inner: n,
            chi,
            nu: state.nu,
            p_tr_w: p_tr,
            f_gap: f1 - chi * f2,
        });
        iterates.push(IterRecord {
            objective: obj,
            p_tr_w: p_tr,
            sum_rate: f1,
            beams: state.beams.clone(),
        });

        // The surrogate objective shrinks toward zero as χ approaches the
        // optimum, so the stopping scale comes from ν rather than the
        // objective itself.
        if prev_opt
            && (obj - prev_obj).abs() < convergence_threshold(config.sca_tolerance, prev_nu)
        {
            converged = true;
            break;
        }
        prev_obj = obj;
        prev_nu = state.nu;
        prev_opt = true;
    }
    Ok(InnerLoopOutcome {
        iterations,
        converged,
    })
}

/// GEE maximization by the parametric iteration: gate on feasibility,
/// initialize the slacks from the power-minimization beams, start with
/// χ = 0, and alternate inner SCA solves with χ updates until two
/// consecutive χ values agree within the configured tolerance (equivalently,
/// until |f₁ − χf₂| ≤ ς·f₂).
pub fn run_dinkelbach(
    channels: &ChannelSet,
    config: &SystemConfig,
) -> Result<Solution, SolveError> {
    config.validate()?;
    let verdict = crate::baselines::feasibility_gate(channels, config)?;
    if !verdict.feasible {
        return Solution::infeasible(channels, config);
    }
    let pmin = verdict.pmin.ok_or(SolveError::Infeasible)?;
    let model = config.power_model();
    let mut inner = InnerState::from_beams(pmin.beams, channels, config.noise_var_w);

    let mut chi = 0.0;
    let mut chi_trace = Vec::new();
    let mut trace = Vec::new();
    let mut iterates = Vec::new();
    let mut status = SolveStatus::IterationLimit;
    let mut total_inner = 0;

    for m in 1..=OUTER_ITERATION_CAP {
        let outcome = inner_sca_loop(&mut inner, chi, channels, config, m, &mut trace, &mut iterates)?;
        total_inner += outcome.iterations;
        if outcome.iterations == 0 {
            break;
        }
        let chi_new = chi_update(&inner.beams, channels, &model, config.noise_var_w, 1.0)?;
        chi_trace.push(chi_new);
        let gap = (chi_new - chi).abs();
        let done = gap < convergence_threshold(config.dinkelbach_tolerance, chi_new);
        chi = chi_new;
        if done && outcome.converged {
            status = SolveStatus::Converged;
            break;
        }
    }

    let report = noma::validate_solution(channels, &inner.beams, config)?;
    Ok(Solution {
        beams: inner.beams,
        report,
        objective_trace: chi_trace,
        iterations_used: total_inner,
        status,
        iterates,
        inner_trace: trace,
    })
}
