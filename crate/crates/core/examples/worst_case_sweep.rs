//! Scaled regret over local alternatives `h/√T`, against the analytic curve.

use tsna::eval::{default_h_grid, worst_case_sweep, SweepSpec, MINIMAX_SPLIT};
use tsna::{Engine, ExperimentConfig, MeanSpace, OutcomeModel, PolicyKind};

fn main() -> tsna::Result<()> {
    let spec = SweepSpec {
        mu_base: 0.0,
        h_grid: default_h_grid(),
        horizons: vec![4000],
        cfg: ExperimentConfig::new(4000, MINIMAX_SPLIT, PolicyKind::Tsna, 7, 20_000).with_engine(Engine::Sufficient),
        model: OutcomeModel::gaussian(1.0, 1.0, MeanSpace::new(-10.0, 10.0)?)?,
    };
    let res = worst_case_sweep(&spec)?;
    println!("{:>5} {:>10} {:>10} {:>10}", "h", "scaled", "se", "theory");
    for c in &res.worst {
        let se = (c.horizon as f64).sqrt() * c.std_error;
        println!("{:>5.2} {:>10.5} {:>10.5} {:>10.5}", c.h, c.scaled, se, c.theory);
    }
    let m = res.max_for(4000).unwrap();
    println!("max scaled regret {:.5} ± {:.5} at h = {}", m.max_scaled_regret, m.std_error, m.h);
    println!("(σ̄₁+σ̄₀)Φ(-1) = {:.5}", res.theory.minimax_lower_bound);
    println!("peak of hΦ(-h/√V): {:.5} at h = {:.4}", res.theory.g_argmax.1, res.theory.g_argmax.0);
    Ok(())
}
