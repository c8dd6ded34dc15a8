use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::Kind;
use crate::config;
use crate::error::{CliError, CliResult};
use crate::output::Output;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRun {
    /// Output subdirectory; must be a plain file name.
    pub name: String,
    pub command: Kind,
    /// Relative to the sweep config.
    pub config: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Worker threads; 0 picks the available parallelism.
    #[serde(default)]
    pub jobs: usize,
    pub run: Vec<SweepRun>,
}

#[derive(Clone, Debug, Serialize)]
struct RunOutcome {
    name: String,
    command: Kind,
    exit_code: i32,
    message: String,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    config: &'a SweepConfig,
    runs: Vec<RunOutcome>,
}

fn validate(cfg: &SweepConfig) -> CliResult<()> {
    let mut seen = std::collections::BTreeSet::new();
    for r in &cfg.run {
        let plain = !r.name.is_empty()
            && r.name != "."
            && r.name != ".."
            && !r.name.contains(['/', '\\']);
        if !plain {
            return Err(CliError::Config(format!("run name {:?} is not a plain directory name", r.name)));
        }
        if !seen.insert(&r.name) {
            return Err(CliError::Config(format!("duplicate run name {:?}", r.name)));
        }
        if r.command == Kind::Sweep {
            return Err(CliError::Config("sweeps cannot be nested".into()));
        }
    }
    Ok(())
}

pub fn run(path: &Path, out: &Output) -> CliResult<(String, i32)> {
    let cfg: SweepConfig = config::load(path)?;
    validate(&cfg)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let jobs = match cfg.jobs {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        j => j,
    }
    .min(cfg.run.len().max(1));

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<RunOutcome>>> = Mutex::new(vec![None; cfg.run.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(r) = cfg.run.get(i) else { break };
                let cfg_path = if r.config.is_absolute() { r.config.clone() } else { base.join(&r.config) };
                let (exit_code, message) = match super::run(r.command, &cfg_path, &out.child(&r.name)) {
                    Ok(msg) => (0, msg),
                    Err(e) => (e.exit_code(), e.to_string()),
                };
                results.lock().expect("sweep worker panicked")[i] = Some(RunOutcome {
                    name: r.name.clone(),
                    command: r.command,
                    exit_code,
                    message,
                });
            });
        }
    });
    let runs: Vec<RunOutcome> = results
        .into_inner()
        .expect("sweep worker panicked")
        .into_iter()
        .map(|r| r.expect("every run is visited"))
        .collect();
    let failed = runs.iter().filter(|r| r.exit_code != 0).count();
    let code = runs.iter().map(|r| r.exit_code).max().unwrap_or(0);
    let file = out.write_json("sweep.json", &SweepReport { config: &cfg, runs })?;
    Ok((
        format!("{} runs, {failed} failed; wrote {}", cfg.run.len(), file.display()),
        code,
    ))
}
