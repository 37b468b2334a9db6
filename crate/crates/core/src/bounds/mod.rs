//! Closed-form calculators for the optimal allocation, asymptotic variances,
//! regret constants and concentration bounds.

mod prior;
pub mod quadrature;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Arm, MeanSpace, MeanVector, OutcomeModel};
use crate::stats::{std_normal_cdf, std_normal_pdf, Prob};

pub use prior::{Marginal, Prior};

/// Relative tolerance of the Bayes-constant quadrature.
pub const BAYES_TOLERANCE: f64 = 1e-6;

/// `Φ(-1)`
fn phi_minus_one() -> f64 {
    std_normal_cdf(-1.0)
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {x}")))
    }
}

/// `σ₁ / (σ₁ + σ₀)`, the variance-minimising treatment fraction.
pub fn neyman_ratio(sigma1: f64, sigma0: f64) -> Result<Prob> {
    let s1 = positive("sigma1", sigma1)?;
    let s0 = positive("sigma0", sigma0)?;
    Prob::new(s1 / (s1 + s0))
}

/// `V(w) = var₁/w + var₀/(1-w)`: asymptotic variance of the scaled
/// difference in means when a fraction `w` goes to arm 1.
pub fn ate_variance(w: Prob, var1: f64, var0: f64) -> Result<f64> {
    let w = w.value();
    if w <= 0.0 || w >= 1.0 {
        return Err(Error::domain(format!("allocation fraction must lie in (0, 1), got {w}")));
    }
    Ok(positive("var1", var1)? / w + positive("var0", var0)? / (1.0 - w))
}

/// `(σ̄₁ + σ̄₀) Φ(-1)`
pub fn minimax_lower_bound(sigma1_bar: f64, sigma0_bar: f64) -> Result<f64> {
    Ok((positive("sigma1_bar", sigma1_bar)? + positive("sigma0_bar", sigma0_bar)?) * phi_minus_one())
}

/// `h Φ(-h/√V)`: limiting `√T`·regret at gap `h/√T` when the scaled
/// difference in means has variance `V`.
pub fn g_worstcase(h: f64, v: f64) -> Result<f64> {
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::domain(format!("h must be nonnegative and finite, got {h}")));
    }
    let v = positive("V", v)?;
    Ok(h * std_normal_cdf(-h / v.sqrt()))
}

/// The stated maximiser of [`g_worstcase`]: `h = √V`, value `√V Φ(-1)`.
pub fn g_maximizer(v: f64) -> Result<(f64, f64)> {
    let s = positive("V", v)?.sqrt();
    Ok((s, s * phi_minus_one()))
}

/// The numerical maximiser of [`g_worstcase`]: `h = x √V` where `x` solves
/// `Φ(-x) = x φ(x)`; returns `(h, g(h))`.
pub fn g_argmax(v: f64) -> Result<(f64, f64)> {
    let s = positive("V", v)?.sqrt();
    // the stationarity condition is decreasing in x on (0, 2)
    let (mut lo, mut hi) = (0.0_f64, 2.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if std_normal_cdf(-mid) - mid * std_normal_pdf(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x * s, x * s * std_normal_cdf(-x)))
}

/// `J(a) = ∫₀ᵃ x Φ(-x) dx = ½(a²-1)Φ(-a) - ½aφ(a) + ¼`.
pub fn j_integral(a: f64) -> Result<f64> {
    if a.is_nan() || a < 0.0 {
        return Err(Error::domain(format!("J(a) needs a >= 0, got {a}")));
    }
    if a.is_infinite() {
        return Ok(0.25);
    }
    Ok(0.5 * (a * a - 1.0) * std_normal_cdf(-a) - 0.5 * a * std_normal_pdf(a) + 0.25)
}

/// `min{1, 2 exp(-rTΔ²/(16v))}`: bound on the misidentification probability
/// for sub-Gaussian outcomes with variance proxy `v`.
pub fn chernoff_bound(split: f64, horizon: u64, delta: f64, v: f64) -> Result<Prob> {
    if !(split > 0.0 && split < 1.0) {
        return Err(Error::domain(format!("split ratio must lie in (0, 1), got {split}")));
    }
    if horizon == 0 {
        return Err(Error::domain("T must be positive"));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::domain(format!("gap must be nonnegative, got {delta}")));
    }
    let v = positive("v", v)?;
    let raw = 2.0 * (-split * horizon as f64 * delta * delta / (16.0 * v)).exp();
    Prob::new(raw.min(1.0))
}

/// Bayes regret constant for a product prior:
/// `¼ Σ_d ∫ h_d(μ | μ) (σ₁(μ) + σ₀(μ))² dH_{other}(μ)`, both variance
/// functions taken at the common diagonal point.
pub fn bayes_lower_bound(prior: &Prior, model: &OutcomeModel) -> Result<f64> {
    bayes_lower_bound_with_tolerance(prior, model, BAYES_TOLERANCE)
}

pub fn bayes_lower_bound_with_tolerance(prior: &Prior, model: &OutcomeModel, rel_tol: f64) -> Result<f64> {
    prior.check_support(model.mean_space())?;
    let s1 = model.arm(Arm::Treatment);
    let s0 = model.arm(Arm::Control);
    let spread = |mu: f64| {
        let s = s1.variance_at(mu).sqrt() + s0.variance_at(mu).sqrt();
        s * s
    };
    let mut total = 0.0;
    for arm in Arm::BOTH {
        let own = prior.marginal(arm);
        let other = prior.marginal(arm.other());
        let (a1, b1) = own.support();
        let (a0, b0) = other.support();
        let (lo, hi) = (a1.max(a0), b1.min(b0));
        if lo >= hi {
            continue;
        }
        let integrand = |mu: f64| prior.conditional_density(arm, mu, mu) * other.density(mu) * spread(mu);
        total += quadrature::integrate(integrand, lo, hi, rel_tol);
    }
    Ok(0.25 * total)
}

/// Which arm carries the positive offset of a local alternative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `(μ + h/√T, μ)` for [`Sign::Plus`], `(μ, μ + h/√T)` for [`Sign::Minus`].
pub fn local_alternative(mu_base: f64, h: f64, horizon: u64, sign: Sign, space: MeanSpace) -> Result<MeanVector> {
    if horizon == 0 {
        return Err(Error::domain("T must be positive"));
    }
    if !h.is_finite() {
        return Err(Error::domain(format!("h must be finite, got {h}")));
    }
    let shifted = mu_base + h / (horizon as f64).sqrt();
    space.check(mu_base)?;
    space.check(shifted)?;
    Ok(match sign {
        Sign::Plus => MeanVector::new(shifted, mu_base),
        Sign::Minus => MeanVector::new(mu_base, shifted),
    })
}

/// One evaluated bound with its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub value: f64,
    pub inputs: BTreeMap<String, f64>,
    /// True when a probability bound was capped at 1.
    pub clamped: bool,
}

/// Names accepted by [`evaluate`], with their required inputs.
pub const BOUND_NAMES: [(&str, &[&str]); 8] = [
    ("neyman_ratio", &["sigma1", "sigma0"]),
    ("ate_variance", &["w", "var1", "var0"]),
    ("minimax_lower_bound", &["sigma1_bar", "sigma0_bar"]),
    ("g_worstcase", &["h", "V"]),
    ("g_maximizer", &["V"]),
    ("g_argmax", &["V"]),
    ("j_integral", &["a"]),
    ("chernoff_bound", &["r", "T", "delta", "v"]),
];

/// Evaluates a bound by name. Unknown names and missing inputs are domain errors.
pub fn evaluate(name: &str, inputs: &BTreeMap<String, f64>) -> Result<BoundReport> {
    let Some((_, keys)) = BOUND_NAMES.iter().find(|(n, _)| *n == name) else {
        let known: Vec<&str> = BOUND_NAMES.iter().map(|(n, _)| *n).collect();
        return Err(Error::domain(format!("unknown bound `{name}` (known: {})", known.join(", "))));
    };
    let arg = |k: &str| {
        inputs
            .get(k)
            .copied()
            .ok_or_else(|| Error::domain(format!("bound `{name}` needs input `{k}`")))
    };
    if let Some(extra) = inputs.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(Error::domain(format!("bound `{name}` does not take input `{extra}`")));
    }
    let mut clamped = false;
    let value = match name {
        "neyman_ratio" => neyman_ratio(arg("sigma1")?, arg("sigma0")?)?.value(),
        "ate_variance" => ate_variance(Prob::new(arg("w")?)?, arg("var1")?, arg("var0")?)?,
        "minimax_lower_bound" => minimax_lower_bound(arg("sigma1_bar")?, arg("sigma0_bar")?)?,
        "g_worstcase" => g_worstcase(arg("h")?, arg("V")?)?,
        "g_maximizer" => g_maximizer(arg("V")?)?.1,
        "g_argmax" => g_argmax(arg("V")?)?.1,
        "j_integral" => j_integral(arg("a")?)?,
        "chernoff_bound" => {
            let t = arg("T")?;
            if !(t >= 1.0 && t.fract() == 0.0 && t <= u64::MAX as f64) {
                return Err(Error::domain(format!("T must be a positive integer, got {t}")));
            }
            let (r, d, v) = (arg("r")?, arg("delta")?, arg("v")?);
            let p = chernoff_bound(r, t as u64, d, v)?;
            clamped = 2.0 * (-r * t * d * d / (16.0 * v)).exp() > 1.0;
            p.value()
        }
        _ => unreachable!(),
    };
    Ok(BoundReport {
        name: name.to_owned(),
        value,
        inputs: inputs.clone(),
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::quadrature::integrate;
    use crate::rng::substream;
    use rand::Rng;

    const TWO_PHI_M1: f64 = 0.317_310_507_862_914_1;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn neyman_ratio_examples() {
        assert_eq!(neyman_ratio(1.0, 1.0).unwrap().value(), 0.5);
        assert_eq!(neyman_ratio(3.0, 1.0).unwrap().value(), 0.75);
        assert_eq!(neyman_ratio(1.0, 3.0).unwrap().value(), 0.25);
        assert!(neyman_ratio(0.0, 1.0).is_err());
        assert!(neyman_ratio(1.0, -2.0).is_err());
    }

    #[test]
    fn ate_variance_examples() {
        assert_eq!(ate_variance(Prob::HALF, 1.0, 1.0).unwrap(), 4.0);
        assert!(close(ate_variance(Prob::new(0.75).unwrap(), 9.0, 1.0).unwrap(), 16.0, 1e-12));
        assert!(ate_variance(Prob::ZERO, 1.0, 1.0).is_err());
        assert!(ate_variance(Prob::ONE, 1.0, 1.0).is_err());
    }

    #[test]
    fn ate_variance_grid_minimum_sits_at_neyman_ratio() {
        for (s1, s0) in [(1.0, 1.0), (3.0, 1.0), (0.5, 2.0), (0.2, 0.3)] {
            let w_star = neyman_ratio(s1, s0).unwrap().value();
            let (mut best_w, mut best_v) = (f64::NAN, f64::INFINITY);
            for i in 1..10_000 {
                let w = i as f64 * 1e-4;
                let v = ate_variance(Prob::new(w).unwrap(), s1 * s1, s0 * s0).unwrap();
                if v < best_v {
                    best_v = v;
                    best_w = w;
                }
            }
            assert!((best_w - w_star).abs() <= 1e-3, "{best_w} vs {w_star}");
            let at_star = ate_variance(Prob::new(w_star).unwrap(), s1 * s1, s0 * s0).unwrap();
            let target = (s1 + s0) * (s1 + s0);
            assert!(((at_star - target) / target).abs() < 1e-9);
        }
    }

    #[test]
    fn minimax_examples() {
        assert!(close(minimax_lower_bound(1.0, 1.0).unwrap(), 0.31731050786292, 1e-13));
        assert!(close(minimax_lower_bound(3.0, 1.0).unwrap(), 0.63462101572585, 1e-13));
        let k = 2.5;
        let base = minimax_lower_bound(0.7, 1.3).unwrap();
        assert!(close(minimax_lower_bound(0.7 * k, 1.3 * k).unwrap(), k * base, 1e-14));
    }

    #[test]
    fn g_worstcase_examples() {
        assert!(close(g_worstcase(2.0, 4.0).unwrap(), TWO_PHI_M1, 1e-15));
        assert!(g_worstcase(1e-12, 1.0).unwrap() < 1e-12);
        assert_eq!(g_worstcase(0.0, 1.0).unwrap(), 0.0);
        let (h, g) = g_maximizer(4.0).unwrap();
        assert_eq!(h, 2.0);
        assert!(close(g, TWO_PHI_M1, 1e-15));
    }

    #[test]
    fn g_argmax_is_a_stationary_maximum() {
        for v in [1.0, 4.0, 9.0] {
            let (h, g) = g_argmax(v).unwrap();
            let eps = 1e-4;
            assert!(g >= g_worstcase(h - eps, v).unwrap());
            assert!(g >= g_worstcase(h + eps, v).unwrap());
            // dense grid oracle
            let grid_max = (1..40_000)
                .map(|i| g_worstcase(i as f64 * 1e-4 * v.sqrt(), v).unwrap())
                .fold(0.0, f64::max);
            assert!(close(g, grid_max, 1e-9), "{g} vs {grid_max}");
        }
        let (h, g) = g_argmax(1.0).unwrap();
        assert!(close(h, 0.751_791_524, 1e-6), "{h}");
        assert!(close(g, 0.169_971_148, 1e-6), "{g}");
    }

    #[test]
    fn j_integral_examples() {
        assert!(j_integral(0.0).unwrap().abs() < 1e-16);
        assert!(close(j_integral(50.0).unwrap(), 0.25, 1e-12));
        let quad = integrate(|x| x * std_normal_cdf(-x), 0.0, 1.0, 1e-14);
        assert!(close(j_integral(1.0).unwrap(), quad, 1e-10));
        assert!(j_integral(-0.1).is_err());
        assert!(j_integral(f64::NAN).is_err());
    }

    #[test]
    fn j_integral_derivative_is_integrand() {
        let h = 1e-5;
        for a in [0.5, 1.0, 2.0, 4.0] {
            let d = (j_integral(a + h).unwrap() - j_integral(a - h).unwrap()) / (2.0 * h);
            assert!(close(d, a * std_normal_cdf(-a), 1e-6), "a = {a}: {d}");
        }
        let mut prev = 0.0;
        for i in 0..500 {
            let j = j_integral(i as f64 * 0.02).unwrap();
            assert!(j >= prev - 1e-16);
            prev = j;
        }
    }

    #[test]
    fn chernoff_examples() {
        assert_eq!(chernoff_bound(0.2, 500, 0.0, 1.0).unwrap().value(), 1.0);
        let b = chernoff_bound(0.2, 500, 1.0, 1.0).unwrap().value();
        assert!(close(b, 2.0 * (-6.25f64).exp(), 1e-16));
        assert!(close(b, 0.003_860_908_272, 1e-12));
        let mut prev = 1.0;
        for t in (100..2000).step_by(100) {
            let p = chernoff_bound(0.2, t, 0.5, 1.0).unwrap().value();
            assert!(p <= 1.0);
            if prev < 1.0 {
                assert!(p < prev);
            }
            prev = p;
        }
    }

    #[test]
    fn bayes_uniform_gaussian_is_one() {
        let space = MeanSpace::new(-1.0, 1.0).unwrap();
        let model = OutcomeModel::gaussian(1.0, 1.0, space).unwrap();
        let prior = Prior::product_uniform(-1.0, 1.0).unwrap();
        assert!(close(bayes_lower_bound(&prior, &model).unwrap(), 1.0, 1e-12));
        let k: f64 = 1.7;
        let scaled = OutcomeModel::gaussian(k * k, k * k, space).unwrap();
        assert!(close(bayes_lower_bound(&prior, &scaled).unwrap(), k * k, 1e-12));
    }

    #[test]
    fn bayes_bernoulli_matches_monte_carlo_integral() {
        let model = OutcomeModel::bernoulli(0.05).unwrap();
        let prior = Prior::product_uniform(0.2, 0.8).unwrap();
        let quad = bayes_lower_bound(&prior, &model).unwrap();
        // ¼ · 2 · ∫ (1/0.6)² (2√(μ(1-μ)))² dμ as an expectation over U(0.2, 0.8)
        let mut rng = substream(11, 0);
        let n = 1_000_000;
        let vals: Vec<f64> = (0..n)
            .map(|_| {
                let mu: f64 = rng.random_range(0.2..0.8);
                0.5 * 0.6 * (1.0 / 0.36) * 4.0 * mu * (1.0 - mu)
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((quad - mean).abs() <= 3.0 * se, "{quad} vs {mean} ± {se}");
    }

    #[test]
    fn bayes_quadrature_is_tolerance_stable() {
        let model = OutcomeModel::bernoulli(0.05).unwrap();
        let prior = Prior::new(
            Marginal::TruncatedGaussian { center: 0.4, scale: 0.15, lo: 0.1, hi: 0.9 },
            Marginal::Uniform { lo: 0.2, hi: 0.7 },
        )
        .unwrap();
        let a = bayes_lower_bound_with_tolerance(&prior, &model, 1e-6).unwrap();
        let b = bayes_lower_bound_with_tolerance(&prior, &model, 5e-7).unwrap();
        assert!(((a - b) / a).abs() < 1e-5);
        assert!(a > 0.0);
    }

    #[test]
    fn bayes_rejects_prior_outside_space() {
        let model = OutcomeModel::bernoulli(0.05).unwrap();
        let prior = Prior::product_uniform(-1.0, 1.0).unwrap();
        assert!(bayes_lower_bound(&prior, &model).is_err());
    }

    #[test]
    fn local_alternative_examples() {
        let wide = MeanSpace::new(-10.0, 10.0).unwrap();
        let mu = local_alternative(0.0, 2.0, 400, Sign::Plus, wide).unwrap();
        assert!(close(mu.treatment, 0.1, 1e-15) && mu.control == 0.0);
        let mu = local_alternative(0.0, 2.0, 400, Sign::Minus, wide).unwrap();
        assert!(mu.treatment == 0.0 && close(mu.control, 0.1, 1e-15));
        for s in Sign::BOTH {
            let mu = local_alternative(0.0, 0.0, 77, s, wide).unwrap();
            assert_eq!((mu.treatment, mu.control), (0.0, 0.0));
        }
        let unit = MeanSpace::new(0.0, 1.0).unwrap();
        assert!(local_alternative(0.95, 2.0, 400, Sign::Plus, unit).is_err());
    }

    #[test]
    fn evaluate_by_name() {
        let inputs = |kv: &[(&str, f64)]| kv.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>();
        let r = evaluate("minimax_lower_bound", &inputs(&[("sigma1_bar", 1.0), ("sigma0_bar", 1.0)])).unwrap();
        assert!(close(r.value, 0.31731050786292, 1e-13));
        assert!(evaluate("j_integral", &inputs(&[("a", 0.0)])).unwrap().value.abs() < 1e-16);
        assert_eq!(evaluate("neyman_ratio", &inputs(&[("sigma1", 3.0), ("sigma0", 1.0)])).unwrap().value, 0.75);
        let c = evaluate("chernoff_bound", &inputs(&[("r", 0.2), ("T", 500.0), ("delta", 0.0), ("v", 1.0)])).unwrap();
        assert!(c.clamped && c.value == 1.0);
        assert!(evaluate("nonsense", &inputs(&[])).is_err());
        assert!(evaluate("j_integral", &inputs(&[])).is_err());
        assert!(evaluate("j_integral", &inputs(&[("a", 1.0), ("b", 2.0)])).is_err());
    }

    #[test]
    fn outputs_are_nonnegative() {
        let mut rng = substream(5, 0);
        for _ in 0..2000 {
            let x: f64 = rng.random_range(0.0..10.0);
            let y: f64 = rng.random_range(0.01..10.0);
            assert!(g_worstcase(x, y).unwrap() >= 0.0);
            assert!(j_integral(x).unwrap() >= 0.0);
            let c = chernoff_bound(rng.random_range(0.01..0.99), rng.random_range(1..10_000), x, y).unwrap();
            assert!((0.0..=1.0).contains(&c.value()));
            assert!(minimax_lower_bound(y, x + 0.01).unwrap() >= 0.0);
        }
    }
}
