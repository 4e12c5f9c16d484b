//! Experiment configuration.
//!
//! A config is one JSON document. Every field except `experiment` may be
//! omitted; missing fields take the defaults below.
//!
//! | field                          | default                     |
//! |--------------------------------|-----------------------------|
//! | `input_state.kind`             | `coherent`                  |
//! | `input_state.alpha`            | `[1.0, 0.0]`                |
//! | `input_state.n`                | `0`                         |
//! | `input_state.amps`             | `[]`                        |
//! | `scheme.operator`              | `creation`                  |
//! | `scheme.c`                     | `[[1,0],[-1,0],[0,1],[0,-1]]` |
//! | `scheme.theta`                 | tuned from the input state  |
//! | `scheme.beta`                  | `[0.0, 0.0]`                |
//! | `scheme.phi`                   | `0.0`                       |
//! | `scheme.herald_trunc`          | `min(trunc, 12)`            |
//! | `scheme.family_size`           | `0`                         |
//! | `trunc`                        | `40`                        |
//! | `eta`                          | `1.0`                       |
//! | `grid`                         | `[-6, 6]^2`, 241 x 241      |
//! | `marginal_phases`              | `[0.0]`                     |
//! | `sampling.phases`              | 10 equally spaced in [0, pi) |
//! | `sampling.num_phases`          | `10`                        |
//! | `sampling.samples_per_phase`   | `50000`                     |
//! | `sampling.seed`                | `0`                         |
//! | `tomography.prepare`           | `input`                     |
//! | `tomography.dim`               | `15`                        |
//! | `tomography.max_iter`          | `2000`                      |
//! | `tomography.tol`               | `1e-10`                     |
//! | `output_dir`                   | `out`                       |

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use orthosim_core::fock::{coherent_dim_for, Truncation, C64};
use orthosim_core::homodyne::{SamplingPlan, DEFAULT_MAX_ITER, DEFAULT_TOL, MAX_DIM};
use orthosim_core::phase_space::PhaseGrid;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Orthogonalize,
    QubitWigner,
    NumberScheme,
    Tomography,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Coherent,
    Fock,
    CustomAmps,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputState {
    pub kind: StateKind,
    /// Coherent amplitude as `[re, im]`.
    pub alpha: [f64; 2],
    /// Fock level.
    pub n: usize,
    /// Custom amplitudes as `[re, im]` pairs, one per level.
    pub amps: Vec<[f64; 2]>,
}

impl Default for InputState {
    fn default() -> Self {
        Self {
            kind: StateKind::Coherent,
            alpha: [1.0, 0.0],
            n: 0,
            amps: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorChoice {
    Creation,
    Number,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeParams {
    pub operator: OperatorChoice,
    /// Qubit-generator constants, `[re, im]` each.
    pub c: Vec<[f64; 2]>,
    pub theta: Option<f64>,
    pub beta: [f64; 2],
    pub phi: f64,
    pub herald_trunc: Option<usize>,
    /// Extra orthogonal family members emitted by `orthogonalize`.
    pub family_size: usize,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            operator: OperatorChoice::Creation,
            c: vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
            theta: None,
            beta: [0.0, 0.0],
            phi: 0.0,
            herald_trunc: None,
            family_size: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridParams {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl Default for GridParams {
    fn default() -> Self {
        let g = PhaseGrid::default();
        Self {
            x_min: g.x_min,
            x_max: g.x_max,
            nx: g.nx,
            p_min: g.p_min,
            p_max: g.p_max,
            np: g.np,
        }
    }
}

impl GridParams {
    pub fn grid(&self) -> PhaseGrid {
        PhaseGrid {
            x_min: self.x_min,
            x_max: self.x_max,
            nx: self.nx,
            p_min: self.p_min,
            p_max: self.p_max,
            np: self.np,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingParams {
    /// Explicit phases; when absent, `num_phases` equally spaced ones.
    pub phases: Option<Vec<f64>>,
    pub num_phases: usize,
    pub samples_per_phase: usize,
    pub seed: u64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self {
            phases: None,
            num_phases: 10,
            samples_per_phase: 50_000,
            seed: 0,
        }
    }
}

impl SamplingParams {
    pub fn phases(&self) -> Vec<f64> {
        match &self.phases {
            Some(p) => p.clone(),
            None => (0..self.num_phases).map(|k| k as f64 * PI / self.num_phases as f64).collect(),
        }
    }

    pub fn plan(&self, eta: f64) -> SamplingPlan {
        SamplingPlan {
            phases: self.phases(),
            samples_per_phase: self.samples_per_phase,
            seed: self.seed,
            eta,
        }
    }
}

/// Which state the tomography experiment measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preparation {
    /// The input state itself.
    Input,
    /// Its orthogonalized partner.
    Orthogonal,
    /// The qubit generated with the first `scheme.c`.
    Qubit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TomographyParams {
    pub prepare: Preparation,
    pub dim: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for TomographyParams {
    fn default() -> Self {
        Self {
            prepare: Preparation::Input,
            dim: 15,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub input_state: InputState,
    #[serde(default)]
    pub scheme: SchemeParams,
    #[serde(default = "default_trunc")]
    pub trunc: usize,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default = "default_marginal_phases")]
    pub marginal_phases: Vec<f64>,
    #[serde(default)]
    pub sampling: SamplingParams,
    #[serde(default)]
    pub tomography: TomographyParams,
    /// Not echoed into the manifest, so that runs into different
    /// directories stay byte-identical.
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: PathBuf,
}

fn default_trunc() -> usize {
    40
}

fn default_eta() -> f64 {
    1.0
}

fn default_marginal_phases() -> Vec<f64> {
    vec![0.0]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        serde_json::from_value(serde_json::json!({ "experiment": experiment })).expect("defaults deserialize")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Read {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    pub fn alpha(&self) -> C64 {
        c64(self.input_state.alpha)
    }

    pub fn c_values(&self) -> Vec<C64> {
        self.scheme.c.iter().copied().map(c64).collect()
    }

    /// Every violated precondition, in field order. Empty means valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut bad = |field: &str, message: String| v.push(Violation::new(field, message));

        if self.trunc < 2 {
            bad("trunc", format!("must be at least 2, got {}", self.trunc));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            bad("eta", format!("must lie in [0, 1], got {}", self.eta));
        }

        let s = &self.input_state;
        match s.kind {
            StateKind::Coherent => {
                if !s.alpha.iter().all(|a| a.is_finite()) {
                    bad("input_state.alpha", "must be finite".into());
                } else if self.trunc >= 2 {
                    let need = coherent_dim_for(self.alpha(), Truncation::DEFAULT_TAIL_TOL);
                    if need > self.trunc {
                        bad("input_state.alpha", format!("|alpha| = {} needs trunc >= {need}", self.alpha().norm()));
                    }
                }
            }
            StateKind::Fock => {
                if s.n >= self.trunc {
                    bad("input_state.n", format!("level {} is not below trunc {}", s.n, self.trunc));
                }
            }
            StateKind::CustomAmps => {
                if s.amps.len() != self.trunc {
                    bad("input_state.amps", format!("has {} entries, trunc is {}", s.amps.len(), self.trunc));
                }
                if !s.amps.iter().flatten().all(|a| a.is_finite()) {
                    bad("input_state.amps", "entries must be finite".into());
                } else if s.amps.iter().map(|a| a[0] * a[0] + a[1] * a[1]).sum::<f64>() < 1e-24 {
                    bad("input_state.amps", "zero vector".into());
                }
            }
        }

        let g = &self.grid;
        if self.grid.grid().validate().is_err() {
            bad(
                "grid",
                format!(
                    "needs x_min < x_max, p_min < p_max and nx, np >= 2; got x [{}, {}] x {}, p [{}, {}] x {}",
                    g.x_min, g.x_max, g.nx, g.p_min, g.p_max, g.np
                ),
            );
        }
        for (i, p) in self.marginal_phases.iter().enumerate() {
            if !p.is_finite() {
                bad(&format!("marginal_phases[{i}]"), "must be finite".into());
            }
        }

        match self.experiment {
            Experiment::Orthogonalize => {
                if self.scheme.family_size > 0 && self.scheme.operator != OperatorChoice::Creation {
                    bad("scheme.family_size", "families need the creation operator".into());
                }
            }
            Experiment::QubitWigner => {
                if self.scheme.c.is_empty() {
                    bad("scheme.c", "needs at least one value".into());
                }
            }
            Experiment::NumberScheme => {
                if let Some(theta) = self.scheme.theta {
                    if (theta.cos() - theta.sin()).abs() < 1e-12 {
                        bad("scheme.theta", format!("singular configuration: t = r at theta = {theta}"));
                    }
                }
                if let Some(h) = self.scheme.herald_trunc {
                    if h < 2 {
                        bad("scheme.herald_trunc", format!("must be at least 2, got {h}"));
                    }
                }
            }
            Experiment::Tomography => {
                let t = &self.tomography;
                if !(2..=MAX_DIM).contains(&t.dim) {
                    bad("tomography.dim", format!("must lie in [2, {MAX_DIM}], got {}", t.dim));
                }
                if t.max_iter == 0 {
                    bad("tomography.max_iter", "must be positive".into());
                }
                if !(t.tol >= 0.0) {
                    bad("tomography.tol", format!("must be >= 0, got {}", t.tol));
                }
                if t.prepare == Preparation::Qubit && self.scheme.c.is_empty() {
                    bad("scheme.c", "qubit preparation needs a value".into());
                }
                let sp = &self.sampling;
                if sp.phases.is_none() && sp.num_phases == 0 {
                    bad("sampling.num_phases", "must be positive".into());
                }
                if let Err(e) = self.sampling.plan(self.eta.clamp(0.0, 1.0)).validate() {
                    bad("sampling", e.to_string());
                }
            }
            Experiment::Verify => {}
        }
        v
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CliError::Invalid(v))
        }
    }
}

pub fn c64(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

/// One failed precondition, tied to the config field that carries it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: &str, message: String) -> Self {
        Self {
            field: field.to_string(),
            message,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"experiment": "qubit_wigner"}"#).unwrap();
        assert_eq!(cfg.trunc, 40);
        assert_eq!(cfg.eta, 1.0);
        assert_eq!(cfg.grid.nx, 241);
        assert_eq!(cfg.sampling.phases().len(), 10);
        assert_eq!(cfg.c_values().len(), 4);
        assert!(cfg.violations().is_empty());
        assert_eq!(cfg, ExperimentConfig::new(Experiment::QubitWigner));
    }

    #[test]
    fn unknown_field_is_a_parse_error() {
        let err = ExperimentConfig::from_json(r#"{"experiment": "verify", "trnc": 3}"#).unwrap_err();
        assert!(err.to_string().contains("trnc"));
    }

    #[test]
    fn every_violation_is_listed() {
        let cfg = ExperimentConfig::from_json(
            r#"{"experiment": "number_scheme", "trunc": 1, "eta": 2.0,
                "scheme": {"theta": 0.7853981633974483, "herald_trunc": 1}}"#,
        )
        .unwrap();
        let fields: Vec<String> = cfg.violations().into_iter().map(|v| v.field).collect();
        assert_eq!(fields, ["trunc", "eta", "scheme.theta", "scheme.herald_trunc"]);
    }

    #[test]
    fn tomography_limits() {
        let mut cfg = ExperimentConfig::new(Experiment::Tomography);
        cfg.tomography.dim = 31;
        cfg.sampling.phases = Some(vec![0.0, 0.0]);
        let fields: Vec<String> = cfg.violations().into_iter().map(|v| v.field).collect();
        assert_eq!(fields, ["tomography.dim", "sampling"]);
    }
}
