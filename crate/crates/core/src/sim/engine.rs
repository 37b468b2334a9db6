use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::{ExperimentConfig, RunRecord};
use crate::error::{Error, Result};
use crate::models::{Arm, MeanVector, OutcomeModel};
use crate::policy::{recommend_from_means, FrozenEstimate, PolicyKind, PolicyState};
use crate::stats::Prob;

/// `w*` used by the oracle baseline: the configured ratio, or
/// `σ₁(μ₁) / (σ₁(μ₁) + σ₀(μ₀))` at the simulated means.
fn oracle_ratio(model: &OutcomeModel, mu: MeanVector, cfg: &ExperimentConfig) -> Result<Prob> {
    if let Some(w) = cfg.oracle_ratio {
        return Prob::new(w);
    }
    let s1 = model.arm(Arm::Treatment).variance(mu.treatment)?.sqrt();
    let s0 = model.arm(Arm::Control).variance(mu.control)?.sqrt();
    Prob::new(s1 / (s1 + s0))
}

/// One experiment, executed round by round with the per-round policy state.
/// Validates the configuration and means first.
pub fn run_experiment<R: Rng + ?Sized>(
    model: &OutcomeModel,
    mu: MeanVector,
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<RunRecord> {
    super::prepare(model, mu, cfg)?;
    run_per_round(model, mu, cfg, rng)
}

/// One experiment drawn through its sufficient statistics.
pub fn run_experiment_sufficient<R: Rng + ?Sized>(
    model: &OutcomeModel,
    mu: MeanVector,
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<RunRecord> {
    super::prepare(model, mu, cfg)?;
    run_sufficient(model, mu, cfg, rng)
}

pub(super) fn run_per_round<R: Rng + ?Sized>(
    model: &OutcomeModel,
    mu: MeanVector,
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<RunRecord> {
    let mut state = match cfg.policy {
        PolicyKind::Tsna => PolicyState::tsna(cfg.schedule()?),
        PolicyKind::Uniform => PolicyState::uniform(cfg.horizon),
        PolicyKind::OracleNeyman => PolicyState::oracle_neyman(cfg.horizon, oracle_ratio(model, mu, cfg)?)?,
    };
    let arms = [model.arm(Arm::Treatment), model.arm(Arm::Control)];
    for t in 1..=cfg.horizon {
        let arm = state.allocate(t, rng)?;
        let y = arms[arm.index()].draw(mu.get(arm), rng);
        state.observe(arm, y)?;
    }
    let recommended = state.recommend()?;
    Ok(RunRecord {
        rep: 0,
        seed: cfg.seed,
        recommended,
        counts: [state.count(Arm::Treatment), state.count(Arm::Control)],
        means: [
            state.mean(Arm::Treatment).expect("sampled"),
            state.mean(Arm::Control).expect("sampled"),
        ],
        pi_hat: state.pi_hat().map_or(f64::NAN, Prob::value),
        w_hat: state.frozen().map(|f| f.w_hat.value()),
    })
}

pub(super) fn run_sufficient<R: Rng + ?Sized>(
    model: &OutcomeModel,
    mu: MeanVector,
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<RunRecord> {
    let arm1 = model.arm(Arm::Treatment);
    let arm0 = model.arm(Arm::Control);
    let (mu1, mu0) = (mu.treatment, mu.control);

    let (counts, sums, pi_hat, w_hat) = match cfg.policy {
        PolicyKind::Tsna => {
            let schedule = cfg.schedule()?;
            let n = schedule.n1_first;
            let (s1, v1) = arm1.draw_sum_and_variance(mu1, n, rng);
            let (s0, v0) = arm0.draw_sum_and_variance(mu0, n, rng);
            let frozen = FrozenEstimate::from_sigma_hats(v1.sqrt(), v0.sqrt(), schedule.split)?;
            let pi = frozen.second_stage.pi_hat.value();
            let m = schedule.second_stage_len();
            let k1 = binomial(m, pi, rng);
            let sums = [s1 + arm1.draw_sum(mu1, k1, rng), s0 + arm0.draw_sum(mu0, m - k1, rng)];
            ([n + k1, n + m - k1], sums, pi, Some(frozen.w_hat.value()))
        }
        PolicyKind::Uniform => {
            let k1 = cfg.horizon.div_ceil(2);
            let k0 = cfg.horizon - k1;
            ([k1, k0], [arm1.draw_sum(mu1, k1, rng), arm0.draw_sum(mu0, k0, rng)], 0.5, None)
        }
        PolicyKind::OracleNeyman => {
            let w = oracle_ratio(model, mu, cfg)?.value();
            let k1 = binomial(cfg.horizon, w, rng);
            let k0 = cfg.horizon - k1;
            ([k1, k0], [arm1.draw_sum(mu1, k1, rng), arm0.draw_sum(mu0, k0, rng)], w, None)
        }
    };
    if counts.contains(&0) {
        return Err(Error::domain("an arm was never sampled; no sample mean to compare"));
    }
    let means = [sums[0] / counts[0] as f64, sums[1] / counts[1] as f64];
    Ok(RunRecord {
        rep: 0,
        seed: cfg.seed,
        recommended: recommend_from_means(means[0], means[1]),
        counts,
        means,
        pi_hat,
        w_hat,
    })
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    Binomial::new(n, p).expect("probability in [0, 1]").sample(rng)
}
