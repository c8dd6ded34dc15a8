//! Normalized flow in the radial reduction, its boundary ODEs, and barrier decay runs.

mod decay;
mod flow;
mod ode;

pub use decay::{decay_certificate, integrate_linear, DecayCertificate, DecayProblem, DecayTrajectory};
pub use flow::{boundary_constant, omega_t_schedule, run_flow, FlowProblem, FlowState, FlowSummary};
pub use ode::{
    adaptive_simpson, cusp_constant_evolution, cusp_constant_rk4, restricted_ode_solution, restricted_source, rk4,
    RestrictedOdeSolution,
};
