//! Outcome models in mean parameterization.
//!
//! Each arm is a one-parameter family indexed by its mean `μ ∈ M` with a
//! prescribed variance function `σ²(μ)`. Two families ship: Gaussian with a
//! fixed variance and Bernoulli with means clipped away from `{0, 1}`.

use std::fmt;

use rand::Rng;
use rand_distr::{Binomial, ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default clip for Bernoulli arms: means live in `[c, 1 - c]`.
pub const DEFAULT_BERNOULLI_CLIP: f64 = 0.05;

/// Treatment index `d ∈ {1, 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Arm {
    /// `d = 1`
    Treatment,
    /// `d = 0`
    Control,
}

impl Arm {
    pub const BOTH: [Arm; 2] = [Arm::Treatment, Arm::Control];

    /// Position in per-arm arrays: treatment first.
    pub fn index(self) -> usize {
        match self {
            Arm::Treatment => 0,
            Arm::Control => 1,
        }
    }

    /// The label `d` used in reports.
    pub fn label(self) -> u8 {
        match self {
            Arm::Treatment => 1,
            Arm::Control => 0,
        }
    }

    pub fn other(self) -> Arm {
        match self {
            Arm::Treatment => Arm::Control,
            Arm::Control => Arm::Treatment,
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Closed interval of admissible means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSpace {
    pub lo: f64,
    pub hi: f64,
}

impl MeanSpace {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::domain(format!("mean space [{lo}, {hi}] is not a compact interval")));
        }
        Ok(MeanSpace { lo, hi })
    }

    pub fn contains(&self, mu: f64) -> bool {
        self.lo <= mu && mu <= self.hi
    }

    pub fn check(&self, mu: f64) -> Result<f64> {
        if self.contains(mu) {
            Ok(mu)
        } else {
            Err(Error::domain(format!("mean {mu} outside mean space [{}, {}]", self.lo, self.hi)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    GaussianFixedVariance { variance: f64 },
    Bernoulli { clip: f64 },
}

/// One arm's outcome distribution family together with its mean space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmDistribution {
    family: Family,
    mean_space: MeanSpace,
}

impl ArmDistribution {
    pub fn gaussian(variance: f64, mean_space: MeanSpace) -> Result<Self> {
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::domain(format!("Gaussian variance must be positive, got {variance}")));
        }
        Ok(ArmDistribution {
            family: Family::GaussianFixedVariance { variance },
            mean_space,
        })
    }

    /// Bernoulli arm on the full clipped space `[c, 1 - c]`.
    pub fn bernoulli(clip: f64) -> Result<Self> {
        Self::bernoulli_on(clip, MeanSpace { lo: clip, hi: 1.0 - clip })
    }

    /// Bernoulli arm restricted to `mean_space ⊆ [c, 1 - c]`.
    pub fn bernoulli_on(clip: f64, mean_space: MeanSpace) -> Result<Self> {
        if !(clip > 0.0 && clip < 0.5) {
            return Err(Error::domain(format!("Bernoulli clip must lie in (0, 0.5), got {clip}")));
        }
        if mean_space.lo < clip || mean_space.hi > 1.0 - clip {
            return Err(Error::domain(format!(
                "Bernoulli mean space [{}, {}] not inside [{clip}, {}]",
                mean_space.lo,
                mean_space.hi,
                1.0 - clip
            )));
        }
        Ok(ArmDistribution {
            family: Family::Bernoulli { clip },
            mean_space,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn mean_space(&self) -> MeanSpace {
        self.mean_space
    }

    pub fn is_bernoulli(&self) -> bool {
        matches!(self.family, Family::Bernoulli { .. })
    }

    /// `σ²(μ)` without range checking.
    pub(crate) fn variance_at(&self, mu: f64) -> f64 {
        match self.family {
            Family::GaussianFixedVariance { variance } => variance,
            Family::Bernoulli { .. } => mu * (1.0 - mu),
        }
    }

    pub fn variance(&self, mu: f64) -> Result<f64> {
        self.mean_space.check(mu).map(|mu| self.variance_at(mu))
    }

    /// Sub-Gaussian variance proxy of `Y - μ`.
    pub fn variance_proxy(&self) -> f64 {
        match self.family {
            Family::GaussianFixedVariance { variance } => variance,
            // Hoeffding's lemma for a variable supported on an interval of width 1.
            Family::Bernoulli { .. } => 0.25,
        }
    }

    /// `sup_{μ ∈ M} σ²(μ)`.
    pub fn sup_variance(&self) -> f64 {
        match self.family {
            Family::GaussianFixedVariance { variance } => variance,
            Family::Bernoulli { .. } => {
                let MeanSpace { lo, hi } = self.mean_space;
                let mu = 0.5f64.clamp(lo, hi);
                mu * (1.0 - mu)
            }
        }
    }

    /// One outcome with mean `mu`, no range check.
    pub(crate) fn draw<R: Rng + ?Sized>(&self, mu: f64, rng: &mut R) -> f64 {
        match self.family {
            Family::GaussianFixedVariance { variance } => {
                let z: f64 = StandardNormal.sample(rng);
                mu + variance.sqrt() * z
            }
            Family::Bernoulli { .. } => {
                if rng.random::<f64>() < mu {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Sum of `n` independent outcomes, drawn from its exact distribution.
    pub(crate) fn draw_sum<R: Rng + ?Sized>(&self, mu: f64, n: u64, rng: &mut R) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self.family {
            Family::GaussianFixedVariance { variance } => {
                let z: f64 = StandardNormal.sample(rng);
                n as f64 * mu + (n as f64 * variance).sqrt() * z
            }
            Family::Bernoulli { .. } => binomial(n, mu, rng) as f64,
        }
    }

    /// Sum and unbiased sample variance of `n >= 2` independent outcomes,
    /// drawn jointly from their exact distribution.
    ///
    /// Gaussian: the mean and `(n-1)s²/σ²` are independent normal and
    /// chi-square variables. Bernoulli: both are functions of the number of
    /// ones `K`, with `s² = K(n-K) / (n(n-1))`.
    pub(crate) fn draw_sum_and_variance<R: Rng + ?Sized>(&self, mu: f64, n: u64, rng: &mut R) -> (f64, f64) {
        debug_assert!(n >= 2);
        match self.family {
            Family::GaussianFixedVariance { variance } => {
                let sum = self.draw_sum(mu, n, rng);
                let dof = (n - 1) as f64;
                let chi2: f64 = ChiSquared::new(dof).expect("dof >= 1").sample(rng);
                (sum, variance * chi2 / dof)
            }
            Family::Bernoulli { .. } => {
                let k = binomial(n, mu, rng);
                let nf = n as f64;
                let kf = k as f64;
                (kf, kf * (nf - kf) / (nf * (nf - 1.0)))
            }
        }
    }
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    Binomial::new(n, p).expect("p validated against the mean space").sample(rng)
}

/// Pair of arm distributions sharing one mean space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeModel {
    arms: [ArmDistribution; 2],
}

impl OutcomeModel {
    pub fn new(treatment: ArmDistribution, control: ArmDistribution) -> Result<Self> {
        if treatment.mean_space != control.mean_space {
            return Err(Error::domain(format!(
                "arms must share one mean space: [{}, {}] vs [{}, {}]",
                treatment.mean_space.lo, treatment.mean_space.hi, control.mean_space.lo, control.mean_space.hi
            )));
        }
        Ok(OutcomeModel { arms: [treatment, control] })
    }

    /// Both arms Gaussian with the given variances on a common mean space.
    pub fn gaussian(var1: f64, var0: f64, mean_space: MeanSpace) -> Result<Self> {
        Self::new(
            ArmDistribution::gaussian(var1, mean_space)?,
            ArmDistribution::gaussian(var0, mean_space)?,
        )
    }

    pub fn bernoulli(clip: f64) -> Result<Self> {
        Self::new(ArmDistribution::bernoulli(clip)?, ArmDistribution::bernoulli(clip)?)
    }

    pub fn arm(&self, arm: Arm) -> &ArmDistribution {
        &self.arms[arm.index()]
    }

    pub fn mean_space(&self) -> MeanSpace {
        self.arms[0].mean_space
    }

    pub fn is_bernoulli(&self) -> bool {
        self.arms.iter().all(ArmDistribution::is_bernoulli)
    }

    pub fn check_means(&self, mu: MeanVector) -> Result<MeanVector> {
        let space = self.mean_space();
        space.check(mu.treatment)?;
        space.check(mu.control)?;
        Ok(mu)
    }
}

/// `(μ₁, μ₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanVector {
    pub treatment: f64,
    pub control: f64,
}

impl MeanVector {
    pub fn new(treatment: f64, control: f64) -> Self {
        MeanVector { treatment, control }
    }

    pub fn get(&self, arm: Arm) -> f64 {
        match arm {
            Arm::Treatment => self.treatment,
            Arm::Control => self.control,
        }
    }

    /// `Δ = |μ₁ - μ₀|`.
    pub fn gap(&self) -> f64 {
        (self.treatment - self.control).abs()
    }

    /// The better arm, or `None` when the means tie.
    pub fn best_arm(&self) -> Option<Arm> {
        if self.treatment > self.control {
            Some(Arm::Treatment)
        } else if self.control > self.treatment {
            Some(Arm::Control)
        } else {
            None
        }
    }
}

/// One outcome of `arm` under means `mu`.
pub fn sample_outcome<R: Rng + ?Sized>(model: &OutcomeModel, arm: Arm, mu: MeanVector, rng: &mut R) -> Result<f64> {
    let mu_d = model.mean_space().check(mu.get(arm))?;
    Ok(model.arm(arm).draw(mu_d, rng))
}

/// `σ_d²(μ_d)`.
pub fn variance_fn(model: &OutcomeModel, arm: Arm, mu_d: f64) -> Result<f64> {
    model.arm(arm).variance(mu_d)
}

pub fn variance_proxy(model: &OutcomeModel, arm: Arm) -> f64 {
    model.arm(arm).variance_proxy()
}

/// `σ̄_d = sqrt(sup_{μ ∈ M} σ_d²(μ))`.
pub fn sigma_bar(model: &OutcomeModel, arm: Arm) -> f64 {
    model.arm(arm).sup_variance().sqrt()
}
