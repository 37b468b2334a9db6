//! TSNA against uniform and oracle allocation on the same sweep grid.

use tsna::eval::{default_h_grid, policy_comparison, SweepSpec};
use tsna::{Engine, ExperimentConfig, MeanSpace, OutcomeModel, PolicyKind};

fn main() -> tsna::Result<()> {
    let h_grid: Vec<f64> = default_h_grid().into_iter().map(|h| 2.0 * h).collect();
    let spec = SweepSpec {
        mu_base: 0.0,
        h_grid,
        horizons: vec![4000],
        cfg: ExperimentConfig::new(4000, 0.2, PolicyKind::Tsna, 5, 20_000).with_engine(Engine::Sufficient),
        model: OutcomeModel::gaussian(9.0, 1.0, MeanSpace::new(-10.0, 10.0)?)?,
    };
    for res in policy_comparison(&spec, &["tsna", "uniform", "oracle-neyman"])? {
        let m = res.max_for(4000).unwrap();
        println!(
            "{:<14} max √T·regret {:.4} ± {:.4} at h = {}",
            res.policy.name(),
            m.max_scaled_regret,
            m.std_error,
            m.h
        );
    }
    Ok(())
}
