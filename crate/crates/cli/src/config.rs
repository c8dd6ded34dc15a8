//! TOML configuration shared by the subcommands.

use std::fmt;
use std::path::Path;

use cuspkit::elliptic::LeftBoundary;
use cuspkit::geometry::{ModelMetric, RadialGrid, DEFAULT_NODES, DEFAULT_T_MIN};
use cuspkit::rational;
use num::BigRational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{io_error, CliError, CliResult};

pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    toml::from_str(text).map_err(|e| e.message().to_string())
}

/// Exact rational accepted as `"2/3"`, `"0.5"`, `2` or `0.5`.
#[derive(Clone, PartialEq, Eq)]
pub struct Rational(pub BigRational);

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::display(&self.0))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational::display(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Str(String),
        }
        let q = match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(rational::int(v)),
            Raw::Float(v) => rational::from_f64_decimal(v),
            Raw::Str(s) => rational::parse(&s),
        };
        q.map(Rational).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub nodes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            t_min: DEFAULT_T_MIN,
            t_max: 0.5f64.ln(),
            nodes: DEFAULT_NODES,
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> CliResult<RadialGrid> {
        Ok(RadialGrid::new(self.t_min, self.t_max, self.nodes)?)
    }
}

/// Constants `a, b` of the model `a dx²/x² + b x² dθ²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub a: f64,
    pub b: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { a: 1.0, b: 1.0 }
    }
}

impl ModelConfig {
    pub fn build(&self) -> CliResult<ModelMetric> {
        Ok(ModelMetric::new(self.a, self.b, None)?)
    }
}

pub fn default_left() -> LeftBoundary {
    LeftBoundary::default()
}

pub fn asymptotic_left() -> LeftBoundary {
    LeftBoundary::Asymptotic { exponent: 1.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Deserialize)]
    struct Holder {
        q: Vec<Rational>,
    }

    #[test]
    fn rationals_from_strings_and_numbers() {
        let h: Holder = parse(r#"q = ["2/3", 4, 0.25, "-1.5e1"]"#).unwrap();
        let shown: Vec<String> = h.q.iter().map(|q| format!("{q:?}")).collect();
        assert_eq!(shown, ["2/3", "4", "1/4", "-15"]);
        assert!(parse::<Holder>(r#"q = ["x"]"#).is_err());
    }

    #[test]
    fn grid_defaults_and_unknown_keys() {
        let g: GridConfig = parse("nodes = 100").unwrap();
        assert_eq!(g.t_min, DEFAULT_T_MIN);
        let err = parse::<GridConfig>("nodez = 100").unwrap_err();
        assert!(err.contains("nodez"), "{err}");
    }
}
