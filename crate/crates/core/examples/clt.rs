//! Normality of `√T (μ̂₁ - μ̂₀)` under TSNA with variance `(σ₁ + σ₀)²`.

use tsna::eval::clt_check;
use tsna::{ExperimentConfig, MeanSpace, MeanVector, OutcomeModel, PolicyKind};

fn main() -> tsna::Result<()> {
    let model = OutcomeModel::gaussian(4.0, 1.0, MeanSpace::new(-10.0, 10.0)?)?;
    let cfg = ExperimentConfig::new(10_000, 0.2, PolicyKind::Tsna, 99, 2000);
    let rep = clt_check(&model, MeanVector::new(0.0, 0.0), &cfg)?;
    println!("KS statistic {:.4}, p-value {:.3} (n = {})", rep.ks.statistic, rep.ks.p_value, rep.ks.n);
    println!("sample variance {:.3} vs (σ₁+σ₀)² = {}", rep.sample_variance, rep.optimal_variance);
    println!("arm-1 fraction {:.4} vs Neyman ratio {:.4}", rep.treatment_fraction, rep.neyman_ratio.value());
    Ok(())
}
