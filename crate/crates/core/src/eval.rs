//! Campaigns: worst-case sweeps over local alternatives, prior-averaged
//! regret, policy comparisons, exact-vs-Monte-Carlo grids and the CLT check.
//!
//! Every cell gets its own seed derived from the campaign seed and the cell
//! index, so results do not depend on execution order or worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, local_alternative, Prior, Sign};
use crate::error::{Error, Result, Warning};
use crate::models::{sigma_bar, Arm, MeanVector, OutcomeModel};
use crate::policy::PolicyKind;
use crate::rng::{derive_seed, derive_tagged_seed, substream};
use crate::sim::{exact_regret_bruteforce, monte_carlo_regret, simulate_records, ExperimentConfig};
use crate::stats::{self, KsTest, Prob};

/// `{0.25, 0.5, …, 4.0}`
pub fn default_h_grid() -> Vec<f64> {
    (1..=16).map(|i| 0.25 * i as f64).collect()
}

pub const MINIMAX_SPLIT: f64 = 0.2;
pub const BAYES_SPLIT: f64 = 0.05;

/// Grid of local alternatives `μ_base + h/√T` over budgets and offsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub mu_base: f64,
    pub h_grid: Vec<f64>,
    pub horizons: Vec<u64>,
    /// Template; `horizon` is overwritten per cell and `seed` is the campaign seed.
    pub cfg: ExperimentConfig,
    pub model: OutcomeModel,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<Vec<Warning>> {
        if self.h_grid.is_empty() {
            return Err(Error::config("h_grid is empty"));
        }
        if self.horizons.is_empty() {
            return Err(Error::config("list of budgets T is empty"));
        }
        if self.h_grid.iter().any(|h| !(h.is_finite() && *h >= 0.0)) {
            return Err(Error::config("h_grid values must be finite and nonnegative"));
        }
        if self.h_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("h_grid must be strictly increasing"));
        }
        let mut warnings = Vec::new();
        for &t in &self.horizons {
            let cfg = self.cell_config(t, 0);
            for w in cfg.validate(&self.model)? {
                if !warnings.contains(&w) {
                    warnings.push(w);
                }
            }
            for &h in &self.h_grid {
                for sign in Sign::BOTH {
                    local_alternative(self.mu_base, h, t, sign, self.model.mean_space())?;
                }
            }
        }
        Ok(warnings)
    }

    fn cell_config(&self, horizon: u64, seed: u64) -> ExperimentConfig {
        ExperimentConfig { horizon, seed, ..self.cfg }
    }

    /// `V(w*) = (σ₁(μ) + σ₀(μ))²` at the base mean.
    pub fn optimal_variance(&self) -> f64 {
        let s: f64 = Arm::BOTH
            .iter()
            .map(|&a| self.model.arm(a).variance_at(self.mu_base).sqrt())
            .sum();
        s * s
    }
}

/// One cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    #[serde(rename = "T")]
    pub horizon: u64,
    pub h: f64,
    pub sign: Sign,
    pub regret: f64,
    pub std_error: f64,
    /// `√T · regret`
    pub scaled: f64,
    /// `g_worstcase(h, V(w*))`
    pub theory: f64,
}

/// Largest scaled regret over the h-grid at one budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepMax {
    #[serde(rename = "T")]
    pub horizon: u64,
    pub h: f64,
    pub sign: Sign,
    pub max_scaled_regret: f64,
    /// Standard error of the scaled regret at the maximising cell.
    pub std_error: f64,
}

/// Analytic constants shown alongside a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryOverlay {
    pub optimal_variance: f64,
    pub minimax_lower_bound: f64,
    /// Stated maximiser `(√V, √V Φ(-1))`.
    pub g_maximizer: (f64, f64),
    /// Numerical maximiser of `h Φ(-h/√V)`.
    pub g_argmax: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub policy: PolicyKind,
    /// Both signs of every `(T, h)` cell, in grid order.
    pub cells: Vec<SweepCell>,
    /// Per `(T, h)`, the sign with the larger regret.
    pub worst: Vec<SweepCell>,
    pub summary: Vec<SweepMax>,
    pub theory: TheoryOverlay,
}

impl SweepResult {
    pub fn max_for(&self, horizon: u64) -> Option<&SweepMax> {
        self.summary.iter().find(|m| m.horizon == horizon)
    }
}

fn cell_seed(campaign_seed: u64, t_idx: usize, h_idx: usize, sign: Sign, n_h: usize) -> u64 {
    let s = match sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    };
    derive_seed(campaign_seed, ((t_idx * n_h + h_idx) * 2 + s) as u64)
}

/// Monte Carlo regret on every cell of the grid for both signs of the gap.
pub fn worst_case_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let v = spec.optimal_variance();
    let n_h = spec.h_grid.len();
    let jobs: Vec<(usize, usize, Sign)> = (0..spec.horizons.len())
        .flat_map(|ti| (0..n_h).flat_map(move |hi| Sign::BOTH.map(|s| (ti, hi, s))))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(ti, hi, sign)| {
            let t = spec.horizons[ti];
            let h = spec.h_grid[hi];
            let mu = local_alternative(spec.mu_base, h, t, sign, spec.model.mean_space())?;
            let cfg = spec.cell_config(t, cell_seed(spec.cfg.seed, ti, hi, sign, n_h));
            let est = monte_carlo_regret(&spec.model, mu, &cfg)?;
            Ok(SweepCell {
                horizon: t,
                h,
                sign,
                regret: est.regret,
                std_error: est.std_error,
                scaled: est.scaled(t),
                theory: bounds::g_worstcase(h, v)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let worst: Vec<SweepCell> = cells
        .chunks(2)
        .map(|pair| if pair[1].regret > pair[0].regret { pair[1] } else { pair[0] })
        .collect();
    let summary = worst
        .chunks(n_h)
        .map(|row| {
            let best = row.iter().fold(row[0], |acc, c| if c.scaled > acc.scaled { *c } else { acc });
            SweepMax {
                horizon: best.horizon,
                h: best.h,
                sign: best.sign,
                max_scaled_regret: best.scaled,
                std_error: (best.horizon as f64).sqrt() * best.std_error,
            }
        })
        .collect();
    let theory = TheoryOverlay {
        optimal_variance: v,
        minimax_lower_bound: bounds::minimax_lower_bound(
            sigma_bar(&spec.model, Arm::Treatment),
            sigma_bar(&spec.model, Arm::Control),
        )?,
        g_maximizer: bounds::g_maximizer(v)?,
        g_argmax: bounds::g_argmax(v)?,
    };
    Ok(SweepResult {
        policy: spec.cfg.policy,
        cells,
        worst,
        summary,
        theory,
    })
}

/// The same sweep for each named policy, with identical per-cell seeds.
pub fn policy_comparison<S: AsRef<str>>(spec: &SweepSpec, policies: &[S]) -> Result<Vec<SweepResult>> {
    let kinds = policies
        .iter()
        .map(|p| p.as_ref().parse::<PolicyKind>())
        .collect::<Result<Vec<_>>>()?;
    kinds
        .into_iter()
        .map(|policy| {
            let spec = SweepSpec {
                cfg: ExperimentConfig { policy, ..spec.cfg },
                ..spec.clone()
            };
            worst_case_sweep(&spec)
        })
        .collect()
}

/// Prior-averaged regret scaled by `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesEstimate {
    /// `T · (1/n) Σ regret(μᵢ)`
    pub scaled_regret: f64,
    /// Two-level standard error of `scaled_regret`.
    pub std_error: f64,
    /// Between-draw part of the standard error.
    pub between_se: f64,
    /// Within-draw part of the standard error.
    pub within_se: f64,
    pub bound: f64,
    pub prior_draws: u64,
    pub replications: u64,
    #[serde(rename = "T")]
    pub horizon: u64,
}

const PRIOR_TAG: u64 = 1;
const INNER_TAG: u64 = 2;

/// Outer Monte Carlo over prior draws, inner [`monte_carlo_regret`] per draw.
pub fn bayes_campaign(prior: &Prior, model: &OutcomeModel, cfg: &ExperimentConfig, prior_draws: u64) -> Result<BayesEstimate> {
    if prior_draws == 0 {
        return Err(Error::config("prior_draws must be positive"));
    }
    let bound = bounds::bayes_lower_bound(prior, model)?;
    cfg.validate(model)?;
    let prior_seed = derive_tagged_seed(cfg.seed, PRIOR_TAG, 0);
    let draws = (0..prior_draws)
        .into_par_iter()
        .map(|i| {
            let mu = prior.sample(&mut substream(prior_seed, i));
            let inner = ExperimentConfig {
                seed: derive_tagged_seed(cfg.seed, INNER_TAG, i),
                ..*cfg
            };
            let est = monte_carlo_regret(model, mu, &inner)?;
            Ok((est.regret, est.std_error))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = prior_draws as f64;
    let mean = draws.iter().map(|d| d.0).sum::<f64>() / n;
    let between_var = if prior_draws > 1 {
        draws.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / (n - 1.0) / n
    } else {
        0.0
    };
    let within_var = draws.iter().map(|d| d.1 * d.1).sum::<f64>() / n / n;
    let t = cfg.horizon as f64;
    Ok(BayesEstimate {
        scaled_regret: t * mean,
        std_error: t * (between_var + within_var).sqrt(),
        between_se: t * between_var.sqrt(),
        within_se: t * within_var.sqrt(),
        bound,
        prior_draws,
        replications: cfg.replications,
        horizon: cfg.horizon,
    })
}

/// Exact and Monte Carlo regret at one mean vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub mu1: f64,
    pub mu0: f64,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub exact: f64,
    pub mc: f64,
    pub mc_se: f64,
    /// `|exact - mc| / mc_se`; zero when both agree exactly.
    pub z: f64,
}

/// Compares [`exact_regret_bruteforce`] with [`monte_carlo_regret`] on every
/// `(μ, T)` pair.
pub fn oracle_grid(model: &OutcomeModel, means: &[MeanVector], horizons: &[u64], cfg: &ExperimentConfig) -> Result<Vec<OracleRow>> {
    let jobs: Vec<(usize, MeanVector, u64)> = horizons
        .iter()
        .flat_map(|&t| means.iter().map(move |&mu| (t, mu)))
        .enumerate()
        .map(|(i, (t, mu))| (i, mu, t))
        .collect();
    // fail fast on non-enumerable instances before any Monte Carlo work
    for &(_, mu, t) in &jobs {
        exact_regret_bruteforce(model, mu, &ExperimentConfig { horizon: t, ..*cfg })?;
    }
    jobs.par_iter()
        .map(|&(i, mu, t)| {
            let cell = ExperimentConfig {
                horizon: t,
                seed: derive_seed(cfg.seed, i as u64),
                ..*cfg
            };
            let exact = exact_regret_bruteforce(model, mu, &cell)?;
            let est = monte_carlo_regret(model, mu, &cell)?;
            let diff = (exact - est.regret).abs();
            let z = if diff == 0.0 { 0.0 } else { diff / est.std_error };
            Ok(OracleRow {
                mu1: mu.treatment,
                mu0: mu.control,
                horizon: t,
                exact,
                mc: est.regret,
                mc_se: est.std_error,
                z,
            })
        })
        .collect()
}

/// Distribution of `√T (μ̂₁ - μ̂₀)` against `Normal(0, V(w*))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub ks: KsTest,
    pub optimal_variance: f64,
    pub sample_variance: f64,
    /// Mean of `N₁ / T` over replications.
    pub treatment_fraction: f64,
    pub neyman_ratio: Prob,
}

pub fn clt_check(model: &OutcomeModel, mu: MeanVector, cfg: &ExperimentConfig) -> Result<CltReport> {
    let s1 = model.arm(Arm::Treatment).variance(mu.treatment)?.sqrt();
    let s0 = model.arm(Arm::Control).variance(mu.control)?.sqrt();
    let v = (s1 + s0) * (s1 + s0);
    let records = simulate_records(model, mu, cfg)?;
    let t = cfg.horizon as f64;
    let z: Vec<f64> = records
        .iter()
        .map(|r| t.sqrt() * (r.means[0] - r.means[1] - (mu.treatment - mu.control)))
        .collect();
    let sd = v.sqrt();
    let ks = stats::ks_test(&z, |x| stats::std_normal_cdf(x / sd))?;
    let fraction = records.iter().map(|r| r.counts[0] as f64 / t).sum::<f64>() / records.len() as f64;
    Ok(CltReport {
        ks,
        optimal_variance: v,
        sample_variance: stats::unbiased_variance(&z)?,
        treatment_fraction: fraction,
        neyman_ratio: bounds::neyman_ratio(s1, s0)?,
    })
}
