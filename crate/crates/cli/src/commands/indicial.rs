use std::path::Path;

use cuspkit::index_algebra::{
    closure, extended_union, index_set_eplus, index_set_hat_eplus, Eigenvalue, IndexSetJson, IndicialFamily,
    IndicialRoot,
};
use serde::{Deserialize, Serialize};

use crate::config::{self, Rational};
use crate::error::CliResult;
use crate::output::Output;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub lambda: Rational,
    pub c: Rational,
    /// Values `ν` with `−ν` an eigenvalue of the divisor Laplacian, strictly increasing.
    pub spectrum: Vec<Rational>,
    /// Multiplicities matching `spectrum`; all 1 when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u32>>,
}

impl FamilyConfig {
    fn build(&self) -> CliResult<IndicialFamily> {
        let mults = match &self.multiplicities {
            Some(m) if m.len() != self.spectrum.len() => {
                return Err(crate::error::CliError::Config(format!(
                    "multiplicities has {} entries but spectrum has {}",
                    m.len(),
                    self.spectrum.len()
                )))
            }
            Some(m) => m.clone(),
            None => vec![1; self.spectrum.len()],
        };
        let spectrum = self
            .spectrum
            .iter()
            .zip(mults)
            .map(|(nu, m)| Eigenvalue::new(nu.0.clone(), m))
            .collect();
        Ok(IndicialFamily::new(self.lambda.0.clone(), self.c.0.clone(), spectrum)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicialConfig {
    pub lambda: Rational,
    pub c: Rational,
    pub spectrum: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u32>>,
    pub alpha: Rational,
    pub cutoff: Rational,
    /// Families whose `Ê⁺` is combined with this one's by extended union.
    #[serde(default)]
    pub extended_union: Vec<FamilyConfig>,
}

impl IndicialConfig {
    fn family(&self) -> FamilyConfig {
        FamilyConfig {
            lambda: self.lambda.clone(),
            c: self.c.clone(),
            spectrum: self.spectrum.clone(),
            multiplicities: self.multiplicities.clone(),
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a IndicialConfig,
    roots: Vec<IndicialRoot>,
    roots_float: Vec<f64>,
    complex_eigenvalues: usize,
    eplus: IndexSetJson,
    eplus_closure: IndexSetJson,
    hat_eplus: IndexSetJson,
    extended_unions: Vec<IndexSetJson>,
}

pub fn run(path: &Path, out: &Output) -> CliResult<String> {
    let cfg: IndicialConfig = config::load(path)?;
    execute(&cfg, out)
}

pub fn execute(cfg: &IndicialConfig, out: &Output) -> CliResult<String> {
    let fam = cfg.family().build()?;
    let (alpha, cutoff) = (&cfg.alpha.0, &cfg.cutoff.0);
    let sb = fam.spec_b_roots();
    let eplus = index_set_eplus(&fam, alpha, cutoff)?;
    let hat = index_set_hat_eplus(&fam, alpha, cutoff)?;
    let mut unions = Vec::new();
    for other in &cfg.extended_union {
        let other_hat = index_set_hat_eplus(&other.build()?, alpha, cutoff)?;
        unions.push(extended_union(&hat, &other_hat)?.to_json());
    }
    let report = Report {
        config: cfg,
        roots_float: sb.roots.iter().map(|r| r.z.to_f64()).collect(),
        roots: sb.roots,
        complex_eigenvalues: sb.complex_eigenvalues,
        eplus: IndexSetJson::from_terms(&eplus),
        eplus_closure: closure(&eplus).to_json(),
        hat_eplus: hat.to_json(),
        extended_unions: unions,
    };
    let file = out.write_json("indicial.json", &report)?;
    Ok(format!("{} terms in hat E+; wrote {}", hat.len(), file.display()))
}
