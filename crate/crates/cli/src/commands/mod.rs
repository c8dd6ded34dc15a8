use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliResult;
use crate::output::Output;

pub mod chern;
pub mod elliptic;
pub mod fit;
pub mod flow;
pub mod indicial;
pub mod sweep;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Indicial,
    ChernCoeff,
    SolveLinear,
    SolveMa,
    Flow,
    FitExpansion,
    LogtermPipeline,
    Sweep,
}

/// Run one non-sweep subcommand.
pub fn run(kind: Kind, config: &Path, out: &Output) -> CliResult<String> {
    match kind {
        Kind::Indicial => indicial::run(config, out),
        Kind::ChernCoeff => chern::run(config, out),
        Kind::SolveLinear => elliptic::run_linear(config, out),
        Kind::SolveMa => elliptic::run_ma(config, out),
        Kind::Flow => flow::run(config, out),
        Kind::FitExpansion => fit::run(config, out),
        Kind::LogtermPipeline => elliptic::run_pipeline(config, out),
        Kind::Sweep => sweep::run(config, out).map(|(msg, _)| msg),
    }
}
