use std::fmt::Write as _;
use std::path::Path;

use cuspkit::geometry::ModelMetric;
use cuspkit::newton::NewtonParams;
use cuspkit::parabolic::{cusp_constant_evolution, restricted_ode_solution, run_flow, FlowProblem, FlowState, FlowSummary};
use cuspkit::terms::TermList;
use serde::{Deserialize, Serialize};

use crate::config::{self, GridConfig, ModelConfig};
use crate::error::{CliError, CliResult};
use crate::output::Output;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub model: ModelConfig,
    /// Conformal factor `φ` of the initial metric `e^{2φ}·model`.
    #[serde(default)]
    pub phi: TermList,
    pub t_final: f64,
    pub dt: f64,
    /// Defaults to `dt/1024`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_min: Option<f64>,
    /// Defaults to `[t_final]`.
    #[serde(default)]
    pub output_times: Vec<f64>,
    #[serde(default)]
    pub newton: NewtonParams,
}

#[derive(Serialize)]
struct StateReport {
    #[serde(flatten)]
    summary: FlowSummary,
    snapshot: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    predicted_boundary_constant: Option<f64>,
    x_deep: f64,
    u_deep: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    restricted_ode: Option<f64>,
}

#[derive(Serialize)]
struct FlowReport<'a> {
    config: &'a FlowConfig,
    /// `x → 0` limit of the initial density, when `φ` has one.
    cusp_constant: Option<f64>,
    states: Vec<StateReport>,
}

fn snapshot_csv(s: &FlowState) -> String {
    let mut out = String::from("x,u,omega_t_density,flow_density\n");
    for (i, x) in s.u.grid().xs().enumerate() {
        let _ = writeln!(
            out,
            "{x:.16e},{:.16e},{:.16e},{:.16e}",
            s.u.values()[i],
            s.omega_t_density.values()[i],
            s.flow_density.values()[i]
        );
    }
    out
}

pub fn run(path: &Path, out: &Output) -> CliResult<String> {
    let cfg: FlowConfig = config::load(path)?;
    execute(&cfg, out)
}

pub fn execute(cfg: &FlowConfig, out: &Output) -> CliResult<String> {
    let grid = cfg.grid.build()?;
    let phi = cfg.phi.on_grid(&grid);
    let omega0 = ModelMetric::new(cfg.model.a, cfg.model.b, Some(phi))?;
    let mut p = FlowProblem::new(omega0, grid.clone(), cfg.t_final, cfg.dt);
    if let Some(m) = cfg.dt_min {
        p.dt_min = m;
    }
    if !cfg.output_times.is_empty() {
        p.output_times = cfg.output_times.clone();
    }
    p.newton = cfg.newton;
    let states = run_flow(&p)?;

    let c = cfg.phi.limit_at_cusp().map(|l| (2.0 * l).exp());
    let deep = grid.len() / 20;
    let mut reports = Vec::with_capacity(states.len());
    for (k, s) in states.iter().enumerate() {
        let name = format!("snapshot_{k:03}.csv");
        out.write_text(&name, &snapshot_csv(s))?;
        let restricted = match c {
            Some(c) if s.t > 0.0 => {
                let sol = restricted_ode_solution(&[c], s.t, cfg.dt.min(s.t))?;
                sol.quadrature.last().copied()
            }
            Some(_) => Some(0.0),
            None => None,
        };
        reports.push(StateReport {
            summary: s.summary.clone(),
            snapshot: name,
            predicted_boundary_constant: c.map(|c| cusp_constant_evolution(c, s.t)).transpose()?,
            x_deep: grid.x(deep),
            u_deep: s.u.values()[deep],
            restricted_ode: restricted,
        });
    }
    let file = out.write_json(
        "flow.json",
        &FlowReport {
            config: cfg,
            cusp_constant: c,
            states: reports,
        },
    )?;
    let last = states.last().ok_or_else(|| CliError::Config("no states recorded".into()))?;
    Ok(format!(
        "t = {}: sup|u| {:.3e}, min positivity {:.3e}; wrote {}",
        last.t,
        last.summary.sup_u,
        last.summary.min_positivity,
        file.display()
    ))
}
