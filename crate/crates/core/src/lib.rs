//! Energy-efficient downlink beamforming for multiuser MISO-NOMA systems.
//!
//! A base station with `N` antennas serves `K` single-antenna users on the
//! same time-frequency resource. Users are separated in the power domain and
//! apply successive interference cancellation (SIC). This crate designs the
//! per-user beamforming vectors to maximize the global energy efficiency
//! (GEE): the achievable sum rate divided by the total consumed power
//! (amplifier-scaled transmit power plus static/dynamic losses).
//!
//! Two iterative designs are provided, together with reference baselines:
//!
//! - [`sca::run_sca`] — epigraph reformulation of the GEE objective solved by
//!   sequential convex approximation over second-order-cone subproblems.
//! - [`dinkelbach::run_dinkelbach`] — parametric (fractional-programming)
//!   outer iteration on the rate/power ratio with an inner SCA solve.
//! - [`baselines`] — power minimization (SOCP chain and an SDP relaxation
//!   with rank-one extraction), sum-rate maximization, and zero-forcing OMA
//!   with water-filling.
//! - [`experiments`] — Monte-Carlo sweep harness with CSV emission.
//!
//! Conic subproblems are assembled in a backend-agnostic form by [`conic`]
//! and solved with an interior-point method.

pub mod baselines;
pub mod conic;
pub mod dinkelbach;
pub mod experiments;
mod forms;
pub mod noma;
pub mod scenario;
pub mod sca;

pub use noma::{BeamformerSet, PerformanceReport, PowerModel};
pub use scenario::{ChannelSet, SystemConfig};
pub use sca::{Solution, SolveError, SolveStatus};
