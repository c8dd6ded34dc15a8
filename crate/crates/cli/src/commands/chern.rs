use std::path::Path;

use cuspkit::chern::{log_coefficient, plane_curve_chern, predicted_sign, ChernData};
use cuspkit::rational;
use num::{BigRational, ToPrimitive};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{self, Rational};
use crate::error::{CliError, CliResult};
use crate::output::Output;

/// Either a plane-curve degree `d` or explicit Chern data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChernConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub td_top: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub td_mixed: Option<Rational>,
}

impl ChernConfig {
    fn data(&self) -> CliResult<ChernData> {
        match (self.d, self.n, &self.td_top, &self.td_mixed) {
            (Some(d), None, None, None) => Ok(plane_curve_chern(d)?),
            (None, Some(n), Some(top), Some(mixed)) => Ok(ChernData::new(n, top.0.clone(), mixed.0.clone())?),
            _ => Err(CliError::Config(
                "give either `d` alone or all of `n`, `td_top`, `td_mixed`".into(),
            )),
        }
    }
}

/// Integers as JSON numbers when they fit in `i64`, strings otherwise.
fn int_value(v: &num::BigInt) -> Value {
    v.to_i64().map_or_else(|| Value::String(v.to_string()), Value::from)
}

fn rational_value(q: &BigRational) -> Value {
    serde_json::json!({ "num": int_value(q.numer()), "den": int_value(q.denom()) })
}

pub fn run(path: &Path, out: &Output) -> CliResult<String> {
    let cfg: ChernConfig = config::load(path)?;
    execute(&cfg, out)
}

pub fn execute(cfg: &ChernConfig, out: &Output) -> CliResult<String> {
    let data = cfg.data()?;
    let b = log_coefficient(&data)?;
    let mut report = serde_json::Map::new();
    if let Some(d) = cfg.d {
        report.insert("d".into(), Value::from(d));
    }
    report.insert("n".into(), Value::from(data.n));
    report.insert("td_top".into(), rational_value(&data.td_top));
    report.insert("td_mixed".into(), rational_value(&data.td_mixed));
    report.insert("b_tilde".into(), rational_value(&b));
    report.insert("b_tilde_float".into(), Value::from(rational::to_f64(&b)));
    report.insert("predicted_sign".into(), Value::from(predicted_sign(&data)));
    let file = out.write_json("chern.json", &report)?;
    Ok(format!("b_tilde = {}; wrote {}", rational::display(&b), file.display()))
}
