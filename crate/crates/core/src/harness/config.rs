//! Experiment configuration as read from JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::BoundConstants;
use crate::ensembles::{EntryScheme, GraphRule, MatrixKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Ginibre,
    Wigner,
    Graph,
    RankProcess,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Ginibre => "ginibre",
            ExperimentKind::Wigner => "wigner",
            ExperimentKind::Graph => "graph",
            ExperimentKind::RankProcess => "rank_process",
        }
    }

    pub fn matrix_kind(self) -> Option<MatrixKind> {
        match self {
            ExperimentKind::Ginibre => Some(MatrixKind::Ginibre),
            ExperimentKind::Wigner => Some(MatrixKind::Wigner),
            _ => None,
        }
    }
}

fn default_epsilon() -> f64 {
    0.5
}

fn default_c_kr() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub scheme: EntryScheme,
    pub n_grid: Vec<usize>,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "default_c_kr")]
    pub c_kr: f64,
    /// Run the normal/abnormal and perfect/imperfect classification.
    #[serde(default)]
    pub classify: bool,
    /// Stream label; defaults to the kind name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, scheme: EntryScheme, n_grid: Vec<usize>, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            kind,
            scheme,
            n_grid,
            trials,
            seed,
            epsilon: default_epsilon(),
            output: None,
            c_kr: default_c_kr(),
            classify: false,
            experiment: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn experiment_tag(&self) -> &str {
        self.experiment.as_deref().unwrap_or(self.kind.name())
    }

    pub fn constants(&self) -> Result<BoundConstants> {
        BoundConstants::new(self.c_kr).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn graph_rule(&self) -> Option<&GraphRule> {
        match &self.scheme {
            EntryScheme::Graph { rule } => Some(rule),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_grid.is_empty() || self.n_grid[0] == 0 {
            return bad("n_grid must be non-empty with positive sizes".into());
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n_grid must be strictly increasing".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon {} outside (0,1)", self.epsilon));
        }
        self.constants()?;
        let symmetric = self.scheme.is_symmetric();
        match self.kind {
            ExperimentKind::Graph => {
                let Some(rule) = self.graph_rule() else {
                    return bad("graph experiments need a scheme of kind \"graph\"".into());
                };
                if let GraphRule::Homogeneous(r) = rule {
                    if let Some((_, beta)) = r.log_power_params() {
                        if self.epsilon + beta >= 1.0 {
                            return bad(format!("epsilon + beta = {} must be below 1", self.epsilon + beta));
                        }
                    }
                }
            }
            ExperimentKind::Wigner | ExperimentKind::RankProcess if !symmetric => {
                return bad("symmetric experiments need a symmetric scheme".into());
            }
            _ => {}
        }
        for &n in &self.n_grid {
            self.scheme.at_size(n).map_err(|e| Error::Config(format!("scheme at n={n}: {e}")))?;
        }
        Ok(())
    }
}
