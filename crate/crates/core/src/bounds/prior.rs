//! Product priors on the mean vector.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Arm, MeanSpace, MeanVector};
use crate::stats::{std_normal_cdf, std_normal_pdf};

/// One arm's prior marginal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Marginal {
    Uniform { lo: f64, hi: f64 },
    TruncatedGaussian { center: f64, scale: f64, lo: f64, hi: f64 },
}

impl Marginal {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.support();
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::domain(format!(
                "prior support [{lo}, {hi}] must be a non-degenerate interval (a density is required)"
            )));
        }
        if let Marginal::TruncatedGaussian { center, scale, .. } = *self {
            if !(center.is_finite() && scale.is_finite() && scale > 0.0) {
                return Err(Error::domain(format!("truncated Gaussian needs finite center and positive scale, got ({center}, {scale})")));
            }
            if self.mass() <= 1e-300 {
                return Err(Error::domain("truncated Gaussian support carries no mass"));
            }
        }
        Ok(())
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Marginal::Uniform { lo, hi } | Marginal::TruncatedGaussian { lo, hi, .. } => (lo, hi),
        }
    }

    /// Untruncated Gaussian mass on the support.
    fn mass(&self) -> f64 {
        match *self {
            Marginal::Uniform { .. } => 1.0,
            Marginal::TruncatedGaussian { center, scale, lo, hi } => {
                std_normal_cdf((hi - center) / scale) - std_normal_cdf((lo - center) / scale)
            }
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        match *self {
            Marginal::Uniform { lo, hi } => 1.0 / (hi - lo),
            Marginal::TruncatedGaussian { center, scale, .. } => {
                std_normal_pdf((x - center) / scale) / (scale * self.mass())
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        match *self {
            Marginal::Uniform { lo, hi } => lo + (hi - lo) * u,
            Marginal::TruncatedGaussian { center, scale, lo, hi } => {
                let a = std_normal_cdf((lo - center) / scale);
                let b = std_normal_cdf((hi - center) / scale);
                let target = a + u * (b - a);
                // bisection on the distribution function over the support
                let (mut x_lo, mut x_hi) = (lo, hi);
                for _ in 0..80 {
                    let mid = 0.5 * (x_lo + x_hi);
                    if std_normal_cdf((mid - center) / scale) < target {
                        x_lo = mid;
                    } else {
                        x_hi = mid;
                    }
                }
                0.5 * (x_lo + x_hi)
            }
        }
    }
}

/// Prior `H` on `(μ₁, μ₀)` with independent marginals, so the conditional
/// density `h_d(μ | μ_other)` equals the marginal density of arm `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prior {
    pub arm1: Marginal,
    pub arm0: Marginal,
}

impl Prior {
    pub fn new(arm1: Marginal, arm0: Marginal) -> Result<Self> {
        arm1.validate()?;
        arm0.validate()?;
        Ok(Prior { arm1, arm0 })
    }

    pub fn product_uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Marginal::Uniform { lo, hi }, Marginal::Uniform { lo, hi })
    }

    pub fn marginal(&self, arm: Arm) -> &Marginal {
        match arm {
            Arm::Treatment => &self.arm1,
            Arm::Control => &self.arm0,
        }
    }

    /// `h_d(μ | μ_other)`
    pub fn conditional_density(&self, arm: Arm, mu: f64, _given: f64) -> f64 {
        self.marginal(arm).density(mu)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MeanVector {
        let m1 = self.arm1.sample(rng);
        let m0 = self.arm0.sample(rng);
        MeanVector::new(m1, m0)
    }

    /// Errors unless both marginals are supported inside `space`.
    pub fn check_support(&self, space: MeanSpace) -> Result<()> {
        self.arm1.validate()?;
        self.arm0.validate()?;
        for m in [self.arm1, self.arm0] {
            let (lo, hi) = m.support();
            if lo < space.lo || hi > space.hi {
                return Err(Error::domain(format!(
                    "prior support [{lo}, {hi}] not inside mean space [{}, {}]",
                    space.lo, space.hi
                )));
            }
        }
        Ok(())
    }
}
