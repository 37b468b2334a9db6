//! Allocation and recommendation policies.
//!
//! `tsna` runs a uniform first stage of `2·⌈rT/2⌉` rounds (a block of arm 1
//! followed by a block of arm 0), freezes the estimated Neyman ratio `ŵ` and
//! the clipped second-stage probability `π̂`, then allocates the remaining
//! rounds i.i.d. Bernoulli(`π̂`). `uniform` alternates arms and
//! `oracle-neyman` draws i.i.d. Bernoulli(`w*`) with the true ratio. All three
//! recommend the arm with the larger sample mean.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::models::Arm;
use crate::stats::{self, Prob};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyKind {
    #[serde(rename = "tsna")]
    Tsna,
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "oracle-neyman")]
    OracleNeyman,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [PolicyKind::Tsna, PolicyKind::Uniform, PolicyKind::OracleNeyman];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Tsna => "tsna",
            PolicyKind::Uniform => "uniform",
            PolicyKind::OracleNeyman => "oracle-neyman",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown policy '{s}' (expected tsna, uniform or oracle-neyman)")))
    }
}

/// `⌈x⌉` that ignores representation error just above an integer
/// (`0.1 * 30 = 3.0000000000000004` rounds to 3, not 4).
fn ceil_tolerant(x: f64) -> u64 {
    (x - 1e-9).ceil().max(0.0) as u64
}

/// First-stage layout for budget `T` and split ratio `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocationSchedule {
    pub horizon: u64,
    pub split: f64,
    /// `⌈rT/2⌉`: first-stage rounds per arm.
    pub n1_first: u64,
    /// `⌈rT⌉`
    pub n_first: u64,
}

impl AllocationSchedule {
    pub fn new(horizon: u64, split: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::config("budget T must be positive"));
        }
        if !(split > 0.0 && split < 1.0) {
            return Err(Error::config(format!("split ratio r must lie in (0, 1), got {split}")));
        }
        let n1_first = ceil_tolerant(split * horizon as f64 / 2.0);
        let n_first = ceil_tolerant(split * horizon as f64);
        if n1_first < 2 || n1_first > horizon - 1 {
            return Err(Error::config(format!(
                "ceil(rT/2) = {n1_first} outside [2, T-1] for T = {horizon}, r = {split}"
            )));
        }
        if n_first >= horizon {
            return Err(Error::config(format!(
                "first stage ceil(rT) = {n_first} leaves no second stage for T = {horizon}"
            )));
        }
        if 2 * n1_first > horizon {
            return Err(Error::config(format!(
                "balanced first stage needs 2*ceil(rT/2) = {} rounds, more than T = {horizon}",
                2 * n1_first
            )));
        }
        Ok(AllocationSchedule {
            horizon,
            split,
            n1_first,
            n_first,
        })
    }

    /// Rounds actually spent in the first stage: `2·⌈rT/2⌉`, which is `⌈rT⌉`
    /// or `⌈rT⌉ + 1`. Both arms receive exactly `⌈rT/2⌉` observations.
    pub fn first_stage_len(&self) -> u64 {
        2 * self.n1_first
    }

    pub fn second_stage_len(&self) -> u64 {
        self.horizon - self.first_stage_len()
    }

    /// `r / ((1 - r)·2)`, the clipping offset in the second-stage probability.
    pub fn clip_offset(&self) -> f64 {
        clip_offset(self.split)
    }
}

fn clip_offset(r: f64) -> f64 {
    r / ((1.0 - r) * 2.0)
}

/// Non-fatal checks on a TSNA configuration.
///
/// Warns when `r ≥ 1/2` (both clipped probabilities can vanish) and, when
/// `sigma_bars` is given, when `r/2 > min_d σ̄_d / (σ̄₁ + σ̄₀)`, the condition
/// under which the worst-case guarantee is stated.
pub fn tsna_warnings(split: f64, sigma_bars: Option<(f64, f64)>) -> Vec<Warning> {
    let mut out = Vec::new();
    if clip_offset(split) >= 0.5 {
        out.push(Warning(format!(
            "r = {split}: clip offset r/((1-r)2) = {:.4} >= 0.5, second-stage probabilities can both clip to 0 (pi_hat falls back to 0.5)",
            clip_offset(split)
        )));
    }
    if let Some((s1, s0)) = sigma_bars {
        let limit = s1.min(s0) / (s1 + s0);
        if split / 2.0 > limit {
            out.push(Warning(format!(
                "r/2 = {} exceeds min_d sigma_bar_d / (sigma_bar_1 + sigma_bar_0) = {limit:.6}; the worst-case optimality guarantee does not apply",
                split / 2.0
            )));
        }
    }
    out
}

/// First-stage arm for round `t` (1-based): arm 1 for `t ≤ ⌈rT/2⌉`, then arm 0.
pub fn first_stage_arm(t: u64, schedule: &AllocationSchedule) -> Result<Arm> {
    if t == 0 || t > schedule.first_stage_len() {
        return Err(Error::domain(format!(
            "round {t} is not in the first stage (rounds 1..={})",
            schedule.first_stage_len()
        )));
    }
    Ok(if t <= schedule.n1_first {
        Arm::Treatment
    } else {
        Arm::Control
    })
}

/// `ŵ = σ̂₁ / (σ̂₁ + σ̂₀)`, or 1/2 when both estimates are zero.
pub fn estimate_w(sigma1_hat: f64, sigma0_hat: f64) -> Result<Prob> {
    for s in [sigma1_hat, sigma0_hat] {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::domain(format!("standard deviation estimate must be finite and >= 0, got {s}")));
        }
    }
    let total = sigma1_hat + sigma0_hat;
    if total == 0.0 {
        return Ok(Prob::HALF);
    }
    Prob::new(sigma1_hat / total)
}

/// The second-stage allocation probability together with its clipped parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondStageProb {
    pub pi_hat: Prob,
    /// `π̃₁ = max{ŵ - r/((1-r)2), 0}`
    pub tilde_treatment: f64,
    /// `π̃₀ = max{1 - ŵ - r/((1-r)2), 0}`
    pub tilde_control: f64,
    /// Both `π̃` vanished and `π̂` fell back to 1/2.
    pub double_clipped: bool,
}

impl SecondStageProb {
    /// Expected fraction of all rounds on arm 1: `r/2 + (1 - r)·π̂`.
    ///
    /// With the clipping offset `r/((1-r)2)` this generally differs from `ŵ`
    /// even when no clipping is active (ŵ = 0.7, r = 0.2 gives 0.7133).
    pub fn overall_treatment_fraction(&self, split: f64) -> f64 {
        split / 2.0 + (1.0 - split) * self.pi_hat.value()
    }
}

/// `π̂ = π̃₁ / (π̃₁ + π̃₀)`.
pub fn second_stage_prob(w_hat: Prob, split: f64) -> Result<SecondStageProb> {
    if !(split > 0.0 && split < 1.0) {
        return Err(Error::domain(format!("split ratio r must lie in (0, 1), got {split}")));
    }
    let offset = clip_offset(split);
    let w = w_hat.value();
    let tilde_treatment = (w - offset).max(0.0);
    let tilde_control = (1.0 - w - offset).max(0.0);
    let total = tilde_treatment + tilde_control;
    let (pi_hat, double_clipped) = if total > 0.0 {
        (Prob::new((tilde_treatment / total).clamp(0.0, 1.0))?, false)
    } else {
        (Prob::HALF, true)
    };
    Ok(SecondStageProb {
        pi_hat,
        tilde_treatment,
        tilde_control,
        double_clipped,
    })
}

/// Alternation: odd rounds to arm 1, even rounds to arm 0.
pub fn baseline_uniform_allocate(t: u64, horizon: u64) -> Result<Arm> {
    if t == 0 || t > horizon {
        return Err(Error::domain(format!("round {t} outside 1..={horizon}")));
    }
    Ok(if t % 2 == 1 { Arm::Treatment } else { Arm::Control })
}

/// One i.i.d. Bernoulli(`w*`) allocation.
pub fn baseline_oracle_neyman_allocate<R: Rng + ?Sized>(t: u64, horizon: u64, w_star: Prob, rng: &mut R) -> Result<Arm> {
    if t == 0 || t > horizon {
        return Err(Error::domain(format!("round {t} outside 1..={horizon}")));
    }
    let w = w_star.value();
    if w <= 0.0 || w >= 1.0 {
        return Err(Error::domain(format!("oracle ratio w* must lie in (0, 1), got {w}")));
    }
    Ok(if rng.random_bool(w) { Arm::Treatment } else { Arm::Control })
}

/// Larger sample mean wins; an exact tie goes to arm 1.
pub fn recommend_from_means(mean_treatment: f64, mean_control: f64) -> Arm {
    if mean_control > mean_treatment {
        Arm::Control
    } else {
        Arm::Treatment
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    FirstStage,
    SecondStage,
    Done,
}

/// Quantities frozen at the end of the first stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrozenEstimate {
    /// `(σ̂₁, σ̂₀)`
    pub sigma_hat: [f64; 2],
    pub w_hat: Prob,
    pub second_stage: SecondStageProb,
}

impl FrozenEstimate {
    /// Estimate from the first-stage outcomes of each arm.
    pub fn from_first_stage(treatment: &[f64], control: &[f64], split: f64) -> Result<Self> {
        if treatment.len() < 2 || control.len() < 2 {
            // Too few observations for a variance estimate: symmetric fallback.
            return Ok(FrozenEstimate {
                sigma_hat: [0.0, 0.0],
                w_hat: Prob::HALF,
                second_stage: second_stage_prob(Prob::HALF, split)?,
            });
        }
        let s1 = stats::unbiased_variance(treatment)?.sqrt();
        let s0 = stats::unbiased_variance(control)?.sqrt();
        Self::from_sigma_hats(s1, s0, split)
    }

    pub fn from_sigma_hats(sigma1_hat: f64, sigma0_hat: f64, split: f64) -> Result<Self> {
        let w_hat = estimate_w(sigma1_hat, sigma0_hat)?;
        Ok(FrozenEstimate {
            sigma_hat: [sigma1_hat, sigma0_hat],
            w_hat,
            second_stage: second_stage_prob(w_hat, split)?,
        })
    }
}

/// Running state of one experiment under one policy.
///
/// Drive it with alternating [`allocate`](Self::allocate) and
/// [`observe`](Self::observe) calls for `t = 1..=T`.
#[derive(Debug, Clone)]
pub struct PolicyState {
    kind: PolicyKind,
    horizon: u64,
    schedule: Option<AllocationSchedule>,
    oracle_ratio: Option<Prob>,
    rounds: u64,
    pending: Option<Arm>,
    counts: [u64; 2],
    sums: [f64; 2],
    first_stage: [Vec<f64>; 2],
    frozen: Option<FrozenEstimate>,
}

impl PolicyState {
    pub fn tsna(schedule: AllocationSchedule) -> Self {
        Self::with_kind(PolicyKind::Tsna, schedule.horizon, Some(schedule), None)
    }

    pub fn uniform(horizon: u64) -> Self {
        Self::with_kind(PolicyKind::Uniform, horizon, None, None)
    }

    pub fn oracle_neyman(horizon: u64, w_star: Prob) -> Result<Self> {
        if w_star.value() <= 0.0 || w_star.value() >= 1.0 {
            return Err(Error::domain(format!("oracle ratio w* must lie in (0, 1), got {}", w_star.value())));
        }
        Ok(Self::with_kind(PolicyKind::OracleNeyman, horizon, None, Some(w_star)))
    }

    fn with_kind(kind: PolicyKind, horizon: u64, schedule: Option<AllocationSchedule>, oracle_ratio: Option<Prob>) -> Self {
        let cap = schedule.map_or(0, |s| s.n1_first as usize);
        PolicyState {
            kind,
            horizon,
            schedule,
            oracle_ratio,
            rounds: 0,
            pending: None,
            counts: [0; 2],
            sums: [0.0; 2],
            first_stage: [Vec::with_capacity(cap), Vec::with_capacity(cap)],
            frozen: None,
        }
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    /// The first-stage layout; present for TSNA only.
    pub fn schedule(&self) -> Option<&AllocationSchedule> {
        self.schedule.as_ref()
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn stage(&self) -> Stage {
        if self.rounds >= self.horizon {
            Stage::Done
        } else if self.kind == PolicyKind::Tsna && self.frozen.is_none() {
            Stage::FirstStage
        } else {
            Stage::SecondStage
        }
    }

    /// `N_d`
    pub fn count(&self, arm: Arm) -> u64 {
        self.counts[arm.index()]
    }

    pub fn sum(&self, arm: Arm) -> f64 {
        self.sums[arm.index()]
    }

    pub fn mean(&self, arm: Arm) -> Option<f64> {
        let n = self.count(arm);
        (n > 0).then(|| self.sum(arm) / n as f64)
    }

    /// Outcomes recorded during the TSNA first stage.
    pub fn first_stage_outcomes(&self, arm: Arm) -> &[f64] {
        &self.first_stage[arm.index()]
    }

    pub fn frozen(&self) -> Option<&FrozenEstimate> {
        self.frozen.as_ref()
    }

    /// Probability of allocating arm 1 in the current regime: `π̂` for TSNA
    /// once frozen, `w*` for the oracle, 1/2 for alternation.
    pub fn pi_hat(&self) -> Option<Prob> {
        match self.kind {
            PolicyKind::Tsna => self.frozen.map(|f| f.second_stage.pi_hat),
            PolicyKind::Uniform => Some(Prob::HALF),
            PolicyKind::OracleNeyman => self.oracle_ratio,
        }
    }

    /// Arm for round `t`, which must be the next unprocessed round.
    pub fn allocate<R: Rng + ?Sized>(&mut self, t: u64, rng: &mut R) -> Result<Arm> {
        if t > self.horizon {
            return Err(Error::domain(format!("round {t} beyond budget T = {}", self.horizon)));
        }
        if self.pending.is_some() || t != self.rounds + 1 {
            return Err(Error::domain(format!(
                "round {t} requested but state is at round {} (pending observation: {})",
                self.rounds,
                self.pending.is_some()
            )));
        }
        let arm = match self.kind {
            PolicyKind::Tsna => match self.frozen {
                None => first_stage_arm(t, self.schedule.as_ref().expect("tsna carries a schedule"))?,
                Some(f) => {
                    if rng.random_bool(f.second_stage.pi_hat.value()) {
                        Arm::Treatment
                    } else {
                        Arm::Control
                    }
                }
            },
            PolicyKind::Uniform => baseline_uniform_allocate(t, self.horizon)?,
            PolicyKind::OracleNeyman => {
                let w = self.oracle_ratio.expect("oracle policy carries w*");
                baseline_oracle_neyman_allocate(t, self.horizon, w, rng)?
            }
        };
        self.pending = Some(arm);
        Ok(arm)
    }

    /// Record the outcome of the arm returned by the last `allocate`.
    pub fn observe(&mut self, arm: Arm, outcome: f64) -> Result<()> {
        match self.pending.take() {
            Some(expected) if expected == arm => {}
            other => {
                self.pending = other;
                return Err(Error::domain(format!("observation for arm {arm} does not match the pending allocation")));
            }
        }
        let i = arm.index();
        self.rounds += 1;
        self.counts[i] += 1;
        self.sums[i] += outcome;
        if let (Some(schedule), None) = (self.schedule, self.frozen) {
            self.first_stage[i].push(outcome);
            if self.rounds == schedule.first_stage_len() {
                self.freeze(schedule.split)?;
            }
        }
        Ok(())
    }

    fn freeze(&mut self, split: f64) -> Result<()> {
        self.frozen = Some(FrozenEstimate::from_first_stage(&self.first_stage[0], &self.first_stage[1], split)?);
        Ok(())
    }

    /// Recommended arm after all `T` rounds.
    pub fn recommend(&self) -> Result<Arm> {
        if self.stage() != Stage::Done {
            return Err(Error::domain(format!(
                "experiment not complete: {} of {} rounds processed",
                self.rounds, self.horizon
            )));
        }
        match (self.mean(Arm::Treatment), self.mean(Arm::Control)) {
            (Some(m1), Some(m0)) => Ok(recommend_from_means(m1, m0)),
            _ => Err(Error::domain("an arm was never sampled; no sample mean to compare")),
        }
    }
}
