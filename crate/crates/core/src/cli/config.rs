//! TOML run configuration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::Prior;
use crate::error::{Error, Result};
use crate::models::{ArmDistribution, MeanSpace, OutcomeModel, DEFAULT_BERNOULLI_CLIP};
use crate::policy::PolicyKind;
use crate::sim::{Engine, ExperimentConfig};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub campaign: Option<CampaignSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Prior>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<BoundRequest>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub arm1: ArmSection,
    pub arm0: ArmSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ArmSection {
    Gaussian {
        variance: f64,
        mean_space: [f64; 2],
    },
    Bernoulli {
        #[serde(default = "default_clip")]
        clip: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mean_space: Option<[f64; 2]>,
    },
}

fn default_clip() -> f64 {
    DEFAULT_BERNOULLI_CLIP
}

impl ArmSection {
    fn build(&self) -> Result<ArmDistribution> {
        match *self {
            ArmSection::Gaussian { variance, mean_space: [lo, hi] } => {
                ArmDistribution::gaussian(variance, MeanSpace::new(lo, hi)?)
            }
            ArmSection::Bernoulli { clip, mean_space: None } => ArmDistribution::bernoulli(clip),
            ArmSection::Bernoulli { clip, mean_space: Some([lo, hi]) } => {
                ArmDistribution::bernoulli_on(clip, MeanSpace::new(lo, hi)?)
            }
        }
    }
}

impl ModelSection {
    pub fn build(&self) -> Result<OutcomeModel> {
        OutcomeModel::new(self.arm1.build()?, self.arm0.build()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default = "default_policy")]
    pub policy: PolicyKind,
    pub replications: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu0: Option<f64>,
}

fn default_policy() -> PolicyKind {
    PolicyKind::Tsna
}

impl ExperimentSection {
    /// Experiment config at budget `horizon`, with `default_split` when `r` is unset.
    pub fn config(&self, horizon: u64, default_split: f64) -> ExperimentConfig {
        ExperimentConfig {
            horizon,
            split: self.r.unwrap_or(default_split),
            policy: self.policy,
            seed: self.seed,
            replications: self.replications,
            engine: self.engine,
            oracle_ratio: self.oracle_ratio,
        }
    }

    pub fn horizon(&self) -> Result<u64> {
        self.horizon.ok_or_else(|| Error::config("[experiment] needs T"))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    #[serde(default)]
    pub mu_base: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_grid: Option<Vec<f64>>,
    #[serde(rename = "T_list", default, skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policies: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior_draws: Option<u64>,
    /// Oracle grid: every ordered pair of these values is a mean vector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundRequest {
    pub name: String,
    #[serde(default)]
    pub inputs: BTreeMap<String, f64>,
}

impl Config {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }
}
