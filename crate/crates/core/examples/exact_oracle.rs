//! Exact regret by path enumeration next to the Monte Carlo estimate.

use tsna::eval::oracle_grid;
use tsna::{ExperimentConfig, MeanVector, OutcomeModel, PolicyKind};

fn main() -> tsna::Result<()> {
    let model = OutcomeModel::bernoulli(0.05)?;
    let grid = [0.3, 0.5, 0.7];
    let means: Vec<MeanVector> = grid
        .iter()
        .flat_map(|&a| grid.iter().map(move |&b| MeanVector::new(a, b)))
        .collect();
    for policy in [PolicyKind::Tsna, PolicyKind::Uniform] {
        let cfg = ExperimentConfig::new(8, 0.5, policy, 3, 100_000);
        println!("{policy}");
        for r in oracle_grid(&model, &means, &[8], &cfg)? {
            println!(
                "  μ = ({:.1}, {:.1})  exact {:.6}  mc {:.6} ± {:.6}  z = {:.2}",
                r.mu1, r.mu0, r.exact, r.mc, r.mc_se, r.z
            );
        }
    }
    Ok(())
}
