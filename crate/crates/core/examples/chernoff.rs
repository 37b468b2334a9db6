//! Empirical misidentification rate under the sub-Gaussian tail bound.

use tsna::bounds::chernoff_bound;
use tsna::sim::monte_carlo_regret;
use tsna::{Engine, ExperimentConfig, MeanSpace, MeanVector, OutcomeModel, PolicyKind};

fn main() -> tsna::Result<()> {
    let model = OutcomeModel::gaussian(1.0, 1.0, MeanSpace::new(-10.0, 10.0)?)?;
    let cfg = ExperimentConfig::new(500, 0.2, PolicyKind::Tsna, 8, 50_000).with_engine(Engine::Sufficient);
    for k in 1..=5 {
        let delta = 0.2 * k as f64;
        let est = monte_carlo_regret(&model, MeanVector::new(delta, 0.0), &cfg)?;
        let bound = chernoff_bound(cfg.split, cfg.horizon, delta, 1.0)?;
        println!(
            "Δ = {delta:.1}: misid {:.5} ± {:.5}  bound {:.5}",
            est.misid_rate.value(),
            est.misid_std_error(),
            bound.value()
        );
    }
    Ok(())
}
