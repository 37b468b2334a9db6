//! Exact regret for small Bernoulli instances by enumerating every path.
//!
//! A path is the full sequence of (allocated arm, observed outcome) pairs.
//! First-stage allocations are deterministic; each second-stage round
//! branches on the allocation (`π̂` / `1 - π̂`) and then on the outcome
//! (`μ_d` / `1 - μ_d`). The misidentification probability is the total
//! weight of the leaves whose recommendation is wrong. Enumeration order is
//! fixed, so the result is bit-for-bit reproducible.

use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::models::{Arm, MeanVector, OutcomeModel};
use crate::policy::{estimate_w, recommend_from_means, second_stage_prob, PolicyKind};

/// Largest budget the enumeration accepts.
pub const MAX_ORACLE_HORIZON: u64 = 16;

pub fn exact_regret_bruteforce(model: &OutcomeModel, mu: MeanVector, cfg: &ExperimentConfig) -> Result<f64> {
    if !model.is_bernoulli() {
        return Err(Error::domain("exact enumeration needs Bernoulli outcomes on both arms"));
    }
    if cfg.horizon > MAX_ORACLE_HORIZON {
        return Err(Error::domain(format!(
            "exact enumeration is capped at T = {MAX_ORACLE_HORIZON}, got T = {}",
            cfg.horizon
        )));
    }
    if cfg.policy == PolicyKind::OracleNeyman {
        return Err(Error::domain(
            "exact enumeration supports tsna and uniform; oracle-neyman can leave an arm unsampled",
        ));
    }
    cfg.validate(model)?;
    model.check_means(mu)?;
    let Some(best) = mu.best_arm() else {
        return Ok(0.0);
    };
    let mut walker = Walker {
        horizon: cfg.horizon as u32,
        mu: [mu.treatment, mu.control],
        best,
        misid: 0.0,
    };
    match cfg.policy {
        PolicyKind::Tsna => {
            let schedule = cfg.schedule()?;
            let plan = TsnaPlan {
                per_arm: schedule.n1_first as u32,
                split: schedule.split,
            };
            walker.tsna(&plan, 1, Tally::default(), None, 1.0)?;
        }
        PolicyKind::Uniform => walker.uniform(1, Tally::default(), 1.0),
        PolicyKind::OracleNeyman => unreachable!(),
    }
    Ok(mu.gap() * walker.misid)
}

#[derive(Clone, Copy, Default)]
struct Tally {
    counts: [u32; 2],
    ones: [u32; 2],
}

impl Tally {
    fn push(mut self, arm: usize, y: u32) -> Self {
        self.counts[arm] += 1;
        self.ones[arm] += y;
        self
    }
}

struct TsnaPlan {
    per_arm: u32,
    split: f64,
}

struct Walker {
    horizon: u32,
    mu: [f64; 2],
    best: Arm,
    misid: f64,
}

impl Walker {
    fn leaf(&mut self, tally: Tally, prob: f64) {
        let m1 = f64::from(tally.ones[0]) / f64::from(tally.counts[0]);
        let m0 = f64::from(tally.ones[1]) / f64::from(tally.counts[1]);
        if recommend_from_means(m1, m0) != self.best {
            self.misid += prob;
        }
    }

    /// Both outcomes of one observation on `arm`.
    fn outcomes(&self, arm: usize) -> [(u32, f64); 2] {
        [(1, self.mu[arm]), (0, 1.0 - self.mu[arm])]
    }

    fn uniform(&mut self, t: u32, tally: Tally, prob: f64) {
        if t > self.horizon {
            self.leaf(tally, prob);
            return;
        }
        let arm = if t % 2 == 1 { 0 } else { 1 };
        for (y, p) in self.outcomes(arm) {
            if p > 0.0 {
                self.uniform(t + 1, tally.push(arm, y), prob * p);
            }
        }
    }

    fn tsna(&mut self, plan: &TsnaPlan, t: u32, tally: Tally, pi_hat: Option<f64>, prob: f64) -> Result<()> {
        if t > self.horizon {
            self.leaf(tally, prob);
            return Ok(());
        }
        let first_len = 2 * plan.per_arm;
        if t <= first_len {
            let arm = if t <= plan.per_arm { 0 } else { 1 };
            for (y, p) in self.outcomes(arm) {
                if p > 0.0 {
                    self.tsna(plan, t + 1, tally.push(arm, y), None, prob * p)?;
                }
            }
            return Ok(());
        }
        let pi = match pi_hat {
            Some(pi) => pi,
            None => frozen_pi_hat(tally, plan)?,
        };
        for (arm, pa) in [(0, pi), (1, 1.0 - pi)] {
            if pa == 0.0 {
                continue;
            }
            for (y, p) in self.outcomes(arm) {
                if p > 0.0 {
                    self.tsna(plan, t + 1, tally.push(arm, y), Some(pi), prob * pa * p)?;
                }
            }
        }
        Ok(())
    }
}

/// `π̂` from first-stage counts of ones: for `n` binary observations with `k`
/// ones the unbiased variance is `k(n-k) / (n(n-1))`.
fn frozen_pi_hat(tally: Tally, plan: &TsnaPlan) -> Result<f64> {
    let n = f64::from(plan.per_arm);
    let sd = |k: u32| {
        let k = f64::from(k);
        (k * (n - k) / (n * (n - 1.0))).sqrt()
    };
    let w = estimate_w(sd(tally.ones[0]), sd(tally.ones[1]))?;
    Ok(second_stage_prob(w, plan.split)?.pi_hat.value())
}
