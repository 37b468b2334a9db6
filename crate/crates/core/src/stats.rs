//! Scalar statistics and standard normal special functions.
//!
//! `Φ` is evaluated through `erfc`: a positive-term series for small
//! arguments and a Lentz continued fraction in the tail. The lower tail is
//! computed directly and the upper value as its complement, so
//! `Φ(x) + Φ(-x) = 1` holds to rounding.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Prob(f64);

impl Prob {
    pub const HALF: Prob = Prob(0.5);
    pub const ZERO: Prob = Prob(0.0);
    pub const ONE: Prob = Prob(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Prob(value))
        } else {
            Err(Error::domain(format!("probability {value} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Prob {
        Prob(1.0 - self.0)
    }
}

impl TryFrom<f64> for Prob {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Prob::new(value)
    }
}

impl From<Prob> for f64 {
    fn from(p: Prob) -> f64 {
        p.0
    }
}

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Switch point between the series and the continued fraction for `erfc`.
const ERFC_CF_THRESHOLD: f64 = 3.0;

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::domain(format!("{what}: non-finite argument {x}")))
    }
}

/// Standard normal density `φ(x)`.
pub fn normal_pdf(x: f64) -> Result<f64> {
    finite(x, "normal_pdf").map(std_normal_pdf)
}

/// Standard normal distribution function `Φ(x)`, absolute error below 1e-15.
pub fn normal_cdf(x: f64) -> Result<Prob> {
    finite(x, "normal_cdf").map(|x| Prob(std_normal_cdf(x)))
}

pub(crate) fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

pub(crate) fn std_normal_cdf(x: f64) -> f64 {
    let tail = 0.5 * erfc_nonneg(x.abs() * FRAC_1_SQRT_2);
    if x < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// `erfc(z)` for `z >= 0`.
fn erfc_nonneg(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z < ERFC_CF_THRESHOLD {
        1.0 - erf_series(z)
    } else {
        erfc_continued_fraction(z)
    }
}

/// `erf(z) = 2/√π · e^{-z²} · Σ_n (2z²)^n z / (1·3·…·(2n+1))`. All terms are
/// positive, so there is no cancellation.
fn erf_series(z: f64) -> f64 {
    let two_z2 = 2.0 * z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= two_z2 / f64::from(2 * n + 1);
        sum += term;
        if term <= sum * 1e-17 || n > 500 {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI * (-z * z).exp() * sum
}

/// `erfc(z) = e^{-z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …))))`,
/// modified Lentz evaluation.
fn erfc_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for n in 1..1000u32 {
        let a = f64::from(n) * 0.5;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    FRAC_1_SQRT_PI * (-z * z).exp() / f
}

/// Arithmetic mean.
pub fn sample_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("sample_mean of an empty sequence"));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Unbiased sample variance `Σ(y - ȳ)² / (n - 1)`, two-pass.
///
/// The second pass carries the compensation term `Σ(y - ȳ)` so the result
/// stays accurate when the mean is large relative to the spread.
pub fn unbiased_variance(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::domain(format!(
            "unbiased_variance needs at least 2 values, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = sample_mean(values)?;
    let (ss, comp) = values.iter().fold((0.0, 0.0), |(ss, comp), &y| {
        let dev = y - mean;
        (ss + dev * dev, comp + dev)
    });
    Ok(((ss - comp * comp / n) / (n - 1.0)).max(0.0))
}

/// Result of a one-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample KS test of `samples` against the continuous distribution `cdf`.
/// The p-value uses the asymptotic Kolmogorov distribution with Stephens'
/// small-sample correction.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsTest> {
    if samples.is_empty() {
        return Err(Error::domain("ks_test on an empty sample"));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("ks_test sample contains NaN"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
    Ok(KsTest {
        statistic,
        p_value: kolmogorov_survival(lambda),
        n: sorted.len(),
    })
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // P(K ≤ λ) = √(2π)/λ · Σ_{k≥1} exp(-(2k-1)² π² / (8λ²))
        let y = -PI * PI / (8.0 * lambda * lambda);
        let cdf: f64 = (1..=20)
            .map(|k: i32| (f64::from((2 * k - 1).pow(2)) * y).exp())
            .sum::<f64>()
            * (2.0 * PI).sqrt()
            / lambda;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        // P(K > λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2k²λ²)
        let sum: f64 = (1..=100)
            .map(|k: i32| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * f64::from(k * k) * lambda * lambda).exp()
            })
            .sum();
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Φ(x) for x < 0 by composite Simpson on φ over [x - 40, x]; independent of erfc.
    fn cdf_by_quadrature(x: f64) -> f64 {
        let (a, b) = (x - 40.0, x);
        let n = 400_000;
        let h = (b - a) / n as f64;
        let mut s = std_normal_pdf(a) + std_normal_pdf(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * std_normal_pdf(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn cdf_reference_values() {
        assert_eq!(normal_cdf(0.0).unwrap().value(), 0.5);
        assert!((normal_cdf(-1.0).unwrap().value() - 0.15865525393146).abs() < 1e-13);
        assert!((normal_cdf(1.0).unwrap().value() - 0.84134474606854).abs() < 1e-13);
    }

    #[test]
    fn cdf_matches_quadrature_oracle() {
        for &x in &[-0.3, -1.0, -2.0, -2.9, -3.1, -4.5, -6.0, -8.0] {
            let q = cdf_by_quadrature(x);
            let c = std_normal_cdf(x);
            assert!((q - c).abs() < 1e-12, "x={x}: quad {q} vs {c}");
        }
    }

    #[test]
    fn cdf_is_symmetric_and_monotone() {
        let mut prev = 0.0;
        for i in -8000..=8000 {
            let x = i as f64 * 1e-3;
            let p = std_normal_cdf(x);
            assert!(p >= prev, "not monotone at {x}");
            prev = p;
            assert!((p + std_normal_cdf(-x) - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn cdf_derivative_is_pdf() {
        let h = 1e-5;
        for i in -40..=40 {
            let x = i as f64 * 0.1;
            let fd = (std_normal_cdf(x + h) - std_normal_cdf(x - h)) / (2.0 * h);
            let pdf = std_normal_pdf(x);
            assert!(((fd - pdf) / pdf).abs() < 1e-6, "x={x}: {fd} vs {pdf}");
        }
    }

    #[test]
    fn pdf_values() {
        assert!((normal_pdf(0.0).unwrap() - 0.3989422804014327).abs() < 1e-16);
        assert!((normal_pdf(1.0).unwrap() - 0.24197072451914337).abs() < 1e-16);
        assert_eq!(normal_pdf(3.0).unwrap(), normal_pdf(-3.0).unwrap());
    }

    #[test]
    fn non_finite_inputs_are_rejected() {
        assert!(normal_cdf(f64::NAN).is_err());
        assert!(normal_cdf(f64::INFINITY).is_err());
        assert!(normal_pdf(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn mean_examples() {
        assert_eq!(sample_mean(&[5.0]).unwrap(), 5.0);
        assert_eq!(sample_mean(&[0.0, 2.0]).unwrap(), 1.0);
        assert_eq!(sample_mean(&[1.0; 4]).unwrap(), 1.0);
        assert!(sample_mean(&[]).is_err());
    }

    #[test]
    fn variance_examples() {
        assert_eq!(unbiased_variance(&[1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(unbiased_variance(&[0.0, 2.0]).unwrap(), 2.0);
        assert_eq!(unbiased_variance(&[1e9, 1e9 + 2.0]).unwrap(), 2.0);
        assert!(unbiased_variance(&[1.0]).is_err());
    }

    #[test]
    fn prob_rejects_out_of_range() {
        assert!(Prob::new(-0.1).is_err());
        assert!(Prob::new(1.0000001).is_err());
        assert!(Prob::new(f64::NAN).is_err());
        assert_eq!(Prob::new(0.25).unwrap().complement().value(), 0.75);
    }

    #[test]
    fn kolmogorov_branches_agree_at_switch() {
        let lo = kolmogorov_survival(1.18 - 1e-9);
        let hi = kolmogorov_survival(1.18 + 1e-9);
        assert!((lo - hi).abs() < 1e-8);
        // Classical critical value: P(K > 1.628) ≈ 0.01.
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 2e-4);
    }

    #[test]
    fn ks_accepts_exact_quantiles_and_rejects_shift() {
        let n = 2000;
        let uniform: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let t = ks_test(&uniform, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(t.p_value > 0.99);
        let shifted: Vec<f64> = uniform.iter().map(|u| u * 0.9).collect();
        let t = ks_test(&shifted, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(t.p_value < 1e-6);
    }
}
