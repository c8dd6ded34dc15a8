use std::path::PathBuf;

use serde::Serialize;

use crate::error::{io_error, CliError, CliResult};

pub const OUT_DIR_ENV: &str = "CUSP_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "cuspkit-out";

/// Directory receiving every file a command writes.
#[derive(Clone, Debug)]
pub struct Output {
    dir: PathBuf,
}

impl Output {
    /// `--out`, then `$CUSP_OUT_DIR`, then `./cuspkit-out`.
    pub fn resolve(flag: Option<PathBuf>) -> Self {
        let dir = flag
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        Self { dir }
    }

    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn child(&self, name: &str) -> Self {
        Self::new(self.dir.join(name))
    }

    fn ensure(&self) -> CliResult<()> {
        std::fs::create_dir_all(&self.dir).map_err(io_error(&self.dir))
    }

    pub fn write_text(&self, name: &str, text: &str) -> CliResult<PathBuf> {
        self.ensure()?;
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(io_error(&path))?;
        Ok(path)
    }

    pub fn write_json(&self, name: &str, value: &impl Serialize) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        self.write_text(name, &text)
    }
}
