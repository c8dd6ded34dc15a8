use std::io::BufReader;
use std::path::{Path, PathBuf};

use cuspkit::fitter::{fit_polyhom, remainder_check, FittedTerm, RemainderReport};
use cuspkit::geometry::RadialField;
use cuspkit::index_algebra::{IndexSet, IndexSetJson};
use serde::{Deserialize, Serialize};

use crate::config;
use crate::error::{io_error, CliError, CliResult};
use crate::output::Output;

/// Paths are relative to the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub samples: PathBuf,
    pub index_set: PathBuf,
    /// `[x_lo, x_hi]`.
    pub window: (f64, f64),
    /// Decay rate tested by the remainder check; defaults to the index-set cutoff.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remainder_n: Option<f64>,
}

#[derive(Serialize)]
struct FitReport<'a> {
    config: &'a FitConfig,
    samples_in_window: usize,
    z_min: f64,
    coefficients: &'a [FittedTerm],
    residual_sup: f64,
    residual_sup_cutoff: f64,
    remainder: RemainderReport,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn run(path: &Path, out: &Output) -> CliResult<String> {
    let cfg: FitConfig = config::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    execute(&cfg, base, out)
}

pub fn execute(cfg: &FitConfig, base: &Path, out: &Output) -> CliResult<String> {
    let samples_path = resolve(base, &cfg.samples);
    let file = std::fs::File::open(&samples_path).map_err(io_error(&samples_path))?;
    let samples = RadialField::from_csv(BufReader::new(file))?;
    let set_path = resolve(base, &cfg.index_set);
    let text = std::fs::read_to_string(&set_path).map_err(io_error(&set_path))?;
    let json: IndexSetJson =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", set_path.display())))?;
    let set = IndexSet::from_json(&json)?;
    let fit = fit_polyhom(&samples, &set, cfg.window)?;
    let n = cfg.remainder_n.unwrap_or_else(|| fit.cutoff());
    let remainder = remainder_check(&fit, &samples, n)?;
    let report = FitReport {
        config: cfg,
        samples_in_window: fit.samples,
        z_min: fit.z_min,
        coefficients: &fit.terms,
        residual_sup: fit.residual_sup,
        residual_sup_cutoff: fit.residual_sup_cutoff,
        remainder,
    };
    let file = out.write_json("fit.json", &report)?;
    Ok(format!(
        "{} terms, residual {:.3e}; wrote {}",
        fit.terms.len(),
        fit.residual_sup,
        file.display()
    ))
}
