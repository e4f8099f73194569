//! JSON run configuration. Every field has a default; the resolved
//! configuration is echoed next to each output file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Potential file; the unit box `𝟙_[0,1]` when absent.
    pub potential: Option<PathBuf>,
    pub p: f64,
    pub grid: GridConfig,
    /// Relative stopping tolerance for ξ-range doubling.
    pub rtol: f64,
    pub hypotheses: HypothesesConfig,
    pub sweep: Vec<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub transform: TransformConfig,
    pub expansion: ExpansionConfig,
    pub search: SearchConfig,
    pub dist: DistConfig,
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            potential: None,
            p: 4.0 / 3.0,
            grid: GridConfig::default(),
            rtol: 1e-6,
            hypotheses: HypothesesConfig::default(),
            sweep: (1..=8).map(|i| 0.05 * i as f64).collect(),
            seed: 1,
            out: None,
            transform: TransformConfig::default(),
            expansion: ExpansionConfig::default(),
            search: SearchConfig::default(),
            dist: DistConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub xi_max: f64,
    /// Odd node count.
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { xi_max: 4.0, n: 201 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HypothesesConfig {
    #[serde(rename = "A")]
    pub a: f64,
    pub lambda: f64,
    pub delta: f64,
    /// Interval-set file; the support hull of the potential when absent.
    pub set: Option<PathBuf>,
}

impl Default for HypothesesConfig {
    fn default() -> Self {
        Self { a: 1.0, lambda: 0.5, delta: 0.1, set: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table {
    Scattering,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformConfig {
    pub table: Table,
    /// Interior samples per layer for the ℱ⋆ bracket in the linear table.
    pub fstar_refine: usize,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self { table: Table::Scattering, fstar_refine: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpansionConfig {
    pub tol: f64,
    pub fstar_refine: usize,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        Self { tol: 1e-13, fstar_refine: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub iterations: usize,
    pub layers: usize,
    pub width: f64,
    pub max_abs: f64,
    pub l1_floor: f64,
    pub restarts: usize,
    pub temperature: f64,
    pub step: f64,
    pub rtol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            iterations: 100,
            layers: 6,
            width: 0.25,
            max_abs: 2.0,
            l1_floor: 0.05,
            restarts: 4,
            temperature: 1e-3,
            step: 0.3,
            rtol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistConfig {
    pub starts: usize,
    pub max_evals: usize,
}

impl Default for DistConfig {
    fn default() -> Self {
        Self { starts: 8, max_evals: 6000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub potentials: usize,
    pub xi_count: usize,
    pub heavy_potentials: usize,
    pub plancherel_potentials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { potentials: 12, xi_count: 41, heavy_potentials: 3, plancherel_potentials: 3 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.p > 1.0 && self.p < 2.0) {
            return Err(format!("p = {} must lie in (1, 2)", self.p));
        }
        if !(self.rtol > 0.0) {
            return Err("rtol must be positive".into());
        }
        if self.sweep.is_empty()
            || self.sweep.iter().any(|&c| !(c > 0.0))
            || self.sweep.windows(2).any(|w| w[1] <= w[0])
        {
            return Err("sweep must be a nonempty increasing list of positive amplitudes".into());
        }
        if self.search.iterations == 0 || self.search.restarts == 0 {
            return Err("search needs iterations >= 1 and restarts >= 1".into());
        }
        if self.dist.starts == 0 {
            return Err("dist needs starts >= 1".into());
        }
        if self.verify.potentials == 0 || self.verify.heavy_potentials > self.verify.potentials {
            return Err("verify needs potentials >= 1 and heavy_potentials <= potentials".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_fills_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"p": 1.5, "grid": {"n": 11}}"#).unwrap();
        assert_eq!(c.p, 1.5);
        assert_eq!(c.grid.n, 11);
        assert_eq!(c.grid.xi_max, 4.0);
        assert_eq!(c.search, SearchConfig::default());
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unknown_fields_and_bad_ranges_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"q": 3}"#).is_err());
        let c = RunConfig { p: 2.0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { sweep: vec![0.2, 0.1], ..Default::default() };
        assert!(c.validate().is_err());
    }
}
