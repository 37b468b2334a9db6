//! Experiment execution and Monte Carlo regret estimation.
//!
//! Replication `i` of a configuration with master seed `s` always draws from
//! stream `i` of the generator keyed by `s`, and the only cross-replication
//! reduction is an integer count. Estimates are therefore identical for any
//! worker count or scheduling order.

mod engine;
mod oracle;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::models::{sigma_bar, Arm, MeanVector, OutcomeModel};
use crate::policy::{self, AllocationSchedule, PolicyKind};
use crate::rng::substream;
use crate::stats::Prob;

pub use engine::{run_experiment, run_experiment_sufficient};
pub use oracle::{exact_regret_bruteforce, MAX_ORACLE_HORIZON};

/// How one replication is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Round by round: allocate, draw one outcome, update.
    #[default]
    PerRound,
    /// Draws the per-arm sufficient statistics (first-stage sum and variance,
    /// second-stage allocation count and sums) from their exact joint
    /// distribution. Same law as `PerRound`, cost independent of `T`.
    Sufficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Budget `T`.
    pub horizon: u64,
    /// Split ratio `r`.
    pub split: f64,
    pub policy: PolicyKind,
    pub seed: u64,
    pub replications: u64,
    #[serde(default)]
    pub engine: Engine,
    /// Fixed ratio for `oracle-neyman`; defaults to the true Neyman ratio at
    /// the simulated means.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_ratio: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(horizon: u64, split: f64, policy: PolicyKind, seed: u64, replications: u64) -> Self {
        ExperimentConfig {
            horizon,
            split,
            policy,
            seed,
            replications,
            engine: Engine::default(),
            oracle_ratio: None,
        }
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    /// The TSNA first-stage layout. Errors for budgets and split ratios that
    /// violate `⌈rT/2⌉ ∈ [2, T-1]`.
    pub fn schedule(&self) -> Result<AllocationSchedule> {
        AllocationSchedule::new(self.horizon, self.split)
    }

    /// Semantic validation; returns the warnings that do not block a run.
    ///
    /// The split-ratio constraints only bind for `tsna`; the baselines ignore `r`.
    pub fn validate(&self, model: &OutcomeModel) -> Result<Vec<Warning>> {
        if self.horizon < 2 {
            return Err(Error::config(format!("budget T must be at least 2, got {}", self.horizon)));
        }
        if self.replications == 0 {
            return Err(Error::config("replications must be positive"));
        }
        if let Some(w) = self.oracle_ratio {
            if !(w > 0.0 && w < 1.0) {
                return Err(Error::config(format!("oracle ratio must lie in (0, 1), got {w}")));
            }
        }
        match self.policy {
            PolicyKind::Tsna => {
                self.schedule()?;
                let bars = (sigma_bar(model, Arm::Treatment), sigma_bar(model, Arm::Control));
                Ok(policy::tsna_warnings(self.split, Some(bars)))
            }
            PolicyKind::Uniform | PolicyKind::OracleNeyman => Ok(Vec::new()),
        }
    }
}

/// Summary of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub rep: u64,
    pub seed: u64,
    pub recommended: Arm,
    /// `(N₁, N₀)`
    pub counts: [u64; 2],
    /// `(μ̂₁, μ̂₀)`
    pub means: [f64; 2],
    /// Arm-1 allocation probability in force after the first stage.
    pub pi_hat: f64,
    /// Frozen `ŵ`, TSNA only.
    pub w_hat: Option<f64>,
}

impl RunRecord {
    pub fn count(&self, arm: Arm) -> u64 {
        self.counts[arm.index()]
    }

    pub fn mean(&self, arm: Arm) -> f64 {
        self.means[arm.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretEstimate {
    /// `Δ · misid_rate`
    pub regret: f64,
    pub std_error: f64,
    pub misid_rate: Prob,
    pub gap: f64,
    pub replications: u64,
    pub misidentified: u64,
}

impl RegretEstimate {
    fn zero_gap(replications: u64) -> Self {
        RegretEstimate {
            regret: 0.0,
            std_error: 0.0,
            misid_rate: Prob::ZERO,
            gap: 0.0,
            replications,
            misidentified: 0,
        }
    }

    fn from_count(gap: f64, misidentified: u64, replications: u64) -> Self {
        let p = misidentified as f64 / replications as f64;
        RegretEstimate {
            regret: gap * p,
            std_error: gap * (p * (1.0 - p) / replications as f64).sqrt(),
            misid_rate: Prob::new(p).expect("count <= replications"),
            gap,
            replications,
            misidentified,
        }
    }

    /// `√T · regret`
    pub fn scaled(&self, horizon: u64) -> f64 {
        (horizon as f64).sqrt() * self.regret
    }

    /// Standard error of the misidentification rate.
    pub fn misid_std_error(&self) -> f64 {
        let p = self.misid_rate.value();
        (p * (1.0 - p) / self.replications as f64).sqrt()
    }
}

fn run_replication(model: &OutcomeModel, mu: MeanVector, cfg: &ExperimentConfig, rep: u64) -> Result<RunRecord> {
    let mut rng = substream(cfg.seed, rep);
    let mut record = match cfg.engine {
        Engine::PerRound => engine::run_per_round(model, mu, cfg, &mut rng)?,
        Engine::Sufficient => engine::run_sufficient(model, mu, cfg, &mut rng)?,
    };
    record.rep = rep;
    Ok(record)
}

fn prepare(model: &OutcomeModel, mu: MeanVector, cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate(model)?;
    model.check_means(mu)?;
    Ok(())
}

/// All `R` run records in replication order.
pub fn simulate_records(model: &OutcomeModel, mu: MeanVector, cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    prepare(model, mu, cfg)?;
    (0..cfg.replications)
        .into_par_iter()
        .map(|rep| run_replication(model, mu, cfg, rep))
        .collect()
}

/// Monte Carlo estimate of `Regret = Δ · P(d̂ ≠ d*)` over `R` replications.
/// A zero gap yields zero regret without simulating.
pub fn monte_carlo_regret(model: &OutcomeModel, mu: MeanVector, cfg: &ExperimentConfig) -> Result<RegretEstimate> {
    prepare(model, mu, cfg)?;
    let Some(best) = mu.best_arm() else {
        return Ok(RegretEstimate::zero_gap(cfg.replications));
    };
    let misidentified = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| run_replication(model, mu, cfg, rep).map(|r| u64::from(r.recommended != best)))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(RegretEstimate::from_count(mu.gap(), misidentified, cfg.replications))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::MeanSpace;

    fn gauss(v1: f64, v0: f64) -> OutcomeModel {
        OutcomeModel::gaussian(v1, v0, MeanSpace::new(-20.0, 20.0).unwrap()).unwrap()
    }

    #[test]
    fn zero_gap_is_zero_regret() {
        let cfg = ExperimentConfig::new(100, 0.2, PolicyKind::Tsna, 1, 50);
        let est = monte_carlo_regret(&gauss(1.0, 1.0), MeanVector::new(0.3, 0.3), &cfg).unwrap();
        assert_eq!(est.regret, 0.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.misid_rate.value(), 0.0);
    }

    #[test]
    fn huge_gap_is_always_identified() {
        let cfg = ExperimentConfig::new(100, 0.2, PolicyKind::Tsna, 9, 1000);
        let est = monte_carlo_regret(&gauss(1.0, 1.0), MeanVector::new(10.0, -10.0), &cfg).unwrap();
        assert!(est.misid_rate.value() <= 0.001);
    }

    #[test]
    fn regret_identity_is_exact() {
        let cfg = ExperimentConfig::new(200, 0.2, PolicyKind::Tsna, 4, 3000);
        let mu = MeanVector::new(0.0, 0.1);
        let est = monte_carlo_regret(&gauss(1.0, 1.0), mu, &cfg).unwrap();
        assert_eq!(est.regret, est.gap * est.misid_rate.value());
        assert!(est.regret <= est.gap);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = ExperimentConfig::new(10, 0.2, PolicyKind::Tsna, 1, 10);
        assert!(matches!(
            monte_carlo_regret(&gauss(1.0, 1.0), MeanVector::new(0.0, 0.1), &cfg),
            Err(Error::Config(_))
        ));
        let cfg = ExperimentConfig::new(10, 0.2, PolicyKind::Uniform, 1, 0);
        assert!(cfg.validate(&gauss(1.0, 1.0)).is_err());
        // uniform ignores r
        let cfg = ExperimentConfig::new(4, 0.5, PolicyKind::Uniform, 1, 10);
        assert!(cfg.validate(&gauss(1.0, 1.0)).is_ok());
    }

    #[test]
    fn d5_violation_is_a_warning() {
        let cfg = ExperimentConfig::new(10, 0.9, PolicyKind::Tsna, 1, 10);
        let warnings = cfg.validate(&gauss(9.0, 1.0)).unwrap();
        assert!(warnings.iter().any(|w| w.0.contains("optimality guarantee")));
    }

    #[test]
    fn records_are_deterministic() {
        let model = gauss(4.0, 1.0);
        let mu = MeanVector::new(0.1, 0.0);
        for engine in [Engine::PerRound, Engine::Sufficient] {
            let cfg = ExperimentConfig::new(300, 0.2, PolicyKind::Tsna, 77, 20).with_engine(engine);
            let a = simulate_records(&model, mu, &cfg).unwrap();
            let b = simulate_records(&model, mu, &cfg).unwrap();
            assert_eq!(a, b);
            assert!(a.iter().all(|r| r.counts[0] + r.counts[1] == 300));
        }
    }

    #[test]
    fn estimates_do_not_depend_on_worker_count() {
        let model = gauss(1.0, 1.0);
        let mu = MeanVector::new(0.05, 0.0);
        let cfg = ExperimentConfig::new(400, 0.2, PolicyKind::Tsna, 5, 2000);
        let run = |n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(|| monte_carlo_regret(&model, mu, &cfg).unwrap())
        };
        assert_eq!(run(1), run(3));
    }
}
