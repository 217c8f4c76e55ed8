//! Experiment configuration: a JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stozeta_core::ensembles::{EnsembleKind, EnsembleSpec, Scaling};
use stozeta_core::holo::Prefactor;
use stozeta_core::Complex64;

use crate::complex::parse_complex;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    Evaluate,
    Converge,
    Propcrit,
    Kernels,
    ZetaCompare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingName {
    CircleUnfold,
    Bulk,
    Edge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PrefactorName {
    None,
    ExpIPiS,
}

impl From<PrefactorName> for Prefactor {
    fn from(p: PrefactorName) -> Self {
        match p {
            PrefactorName::None => Prefactor::None,
            PrefactorName::ExpIPiS => Prefactor::ExpIPiS,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub max: Option<f64>,
    pub step: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationConfig {
    pub r: Option<usize>,
    pub window: Option<f64>,
    pub width: Option<f64>,
    pub max_separation: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaConfig {
    pub zeros: Option<PathBuf>,
    #[serde(rename = "T")]
    pub t_max: Option<f64>,
    pub windows: Option<usize>,
    pub cap: Option<f64>,
    pub dpp_replicas: Option<usize>,
    pub dpp_grid: Option<usize>,
}

/// Everything a run can be configured with. Every field is optional here;
/// defaults and requirements are applied per command.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub ensemble: Option<EnsembleSpec>,
    pub seed: Option<u64>,
    pub replicas: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub s: Option<Vec<String>>,
    pub n_list: Option<Vec<usize>>,
    pub schedule: Option<Vec<f64>>,
    pub rel_tol: Option<f64>,
    pub prefactor: Option<PrefactorName>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub correlation: CorrelationConfig,
    #[serde(default)]
    pub zeta: ZetaConfig,
}

/// Ensemble fields settable from flags.
#[derive(Clone, Debug, Default)]
pub struct EnsembleOverrides {
    pub kind: Option<String>,
    pub n: Option<usize>,
    pub beta: Option<f64>,
    pub psi: Option<f64>,
    pub scaling: Option<ScalingName>,
    pub energy: Option<f64>,
    pub window_a: Option<f64>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::config(msg)
}

pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

macro_rules! overlay {
    ($dst:expr, $src:expr, $($field:ident),+) => {
        $(if $src.$field.is_some() { $dst.$field = $src.$field.clone(); })+
    };
}

impl ExperimentConfig {
    /// Fields set in `flags` replace those of `self`.
    pub fn overlay(mut self, flags: &ExperimentConfig) -> Self {
        overlay!(self, flags, command, ensemble, seed, replicas, out, format, threads, s, n_list, schedule, rel_tol, prefactor);
        overlay!(self.grid, flags.grid, max, step);
        overlay!(self.correlation, flags.correlation, r, window, width, max_separation);
        overlay!(self.zeta, flags.zeta, zeros, t_max, windows, cap, dpp_replicas, dpp_grid);
        self
    }

    pub fn apply_ensemble(&mut self, o: &EnsembleOverrides) -> Result<(), CliError> {
        let mut spec = match (&self.ensemble, &o.kind) {
            (_, Some(kind)) => {
                let kind: EnsembleKind = serde_json::from_value(serde_json::Value::String(kind.clone()))
                    .map_err(|_| config_err(format!("unknown ensemble {kind:?}")))?;
                let n = o
                    .n
                    .or(self.ensemble.as_ref().map(|e| e.n))
                    .or(self.n_list.as_ref().and_then(|l| l.first().copied()))
                    .ok_or_else(|| config_err("--n is required with --ensemble"))?;
                EnsembleSpec::new(kind, n)
            }
            (Some(spec), None) => spec.clone(),
            (None, None) => {
                if o.n.is_some() || o.beta.is_some() || o.scaling.is_some() {
                    return Err(config_err("ensemble flags given without --ensemble"));
                }
                return Ok(());
            }
        };
        if let Some(n) = o.n {
            spec.n = n;
        }
        if let Some(b) = o.beta {
            spec.beta = b;
        }
        if let Some(p) = o.psi {
            spec.psi = p;
        }
        if let Some(a) = o.window_a {
            spec.window_a = Some(a);
        }
        match (o.scaling, o.energy) {
            (Some(ScalingName::CircleUnfold), None) => spec.scaling = Scaling::CircleUnfold,
            (Some(ScalingName::Edge), None) => spec.scaling = Scaling::Edge,
            (Some(ScalingName::Bulk), e) => {
                let e = e.or(match spec.scaling {
                    Scaling::Bulk { e } => Some(e),
                    _ => None,
                });
                spec.scaling = Scaling::Bulk { e: e.unwrap_or(0.0) };
            }
            (None, Some(e)) => match spec.scaling {
                Scaling::Bulk { .. } => spec.scaling = Scaling::Bulk { e },
                _ => return Err(config_err("--energy applies only to bulk scaling")),
            },
            (Some(_), Some(_)) => return Err(config_err("--energy applies only to bulk scaling")),
            (None, None) => {}
        }
        self.ensemble = Some(spec);
        Ok(())
    }

    pub fn ensemble(&self) -> Result<EnsembleSpec, CliError> {
        let spec = self
            .ensemble
            .clone()
            .ok_or_else(|| config_err("no ensemble given; use --ensemble or the config file"))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn s_points(&self, default: &[&str]) -> Result<Vec<Complex64>, CliError> {
        let owned: Vec<String>;
        let list: Vec<&str> = match &self.s {
            Some(v) => {
                owned = v.clone();
                owned.iter().map(String::as_str).collect()
            }
            None => default.to_vec(),
        };
        if list.is_empty() {
            return Err(config_err("at least one s point is required"));
        }
        list.iter().map(|t| parse_complex(t).map_err(config_err)).collect()
    }

    pub fn replicas(&self, default: usize) -> Result<usize, CliError> {
        match self.replicas.unwrap_or(default) {
            0 => Err(config_err("replicas must be at least 1")),
            r => Ok(r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"sed": 1}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"grid": {"maximum": 1}}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"ensemble": {"kind": "cue", "n": 5, "b": 2}}"#).is_err());
    }

    #[test]
    fn flags_win() {
        let file: ExperimentConfig = serde_json::from_str(
            r#"{"seed": 1, "replicas": 10, "ensemble": {"kind": "cue", "n": 50}, "grid": {"max": 20}}"#,
        )
        .unwrap();
        let flags = ExperimentConfig {
            seed: Some(2),
            grid: GridConfig { max: None, step: Some(0.5) },
            ..Default::default()
        };
        let mut merged = file.overlay(&flags);
        assert_eq!(merged.seed, Some(2));
        assert_eq!(merged.replicas, Some(10));
        assert_eq!(merged.grid, GridConfig { max: Some(20.0), step: Some(0.5) });
        merged
            .apply_ensemble(&EnsembleOverrides {
                n: Some(80),
                ..Default::default()
            })
            .unwrap();
        assert_eq!(merged.ensemble().unwrap(), EnsembleSpec::cue(80));
    }

    #[test]
    fn ensemble_from_flags() {
        let mut c = ExperimentConfig::default();
        c.apply_ensemble(&EnsembleOverrides {
            kind: Some("gue".into()),
            n: Some(100),
            scaling: Some(ScalingName::Bulk),
            energy: Some(1.0),
            ..Default::default()
        })
        .unwrap();
        let spec = c.ensemble().unwrap();
        assert_eq!(spec.kind, EnsembleKind::GBetaE);
        assert_eq!(spec.scaling, Scaling::Bulk { e: 1.0 });
        c.apply_ensemble(&EnsembleOverrides {
            energy: Some(3.0),
            ..Default::default()
        })
        .unwrap();
        assert!(c.ensemble().is_err());
        let mut d = ExperimentConfig::default();
        assert!(d
            .apply_ensemble(&EnsembleOverrides {
                kind: Some("nope".into()),
                n: Some(3),
                ..Default::default()
            })
            .is_err());
    }
}
