//! One TSNA experiment, round by round, with unequal arm variances.

use tsna::rng::substream;
use tsna::sim::run_experiment;
use tsna::{ExperimentConfig, MeanSpace, MeanVector, OutcomeModel, PolicyKind};

fn main() -> tsna::Result<()> {
    let model = OutcomeModel::gaussian(9.0, 1.0, MeanSpace::new(-10.0, 10.0)?)?;
    let mu = MeanVector::new(0.05, 0.0);
    let cfg = ExperimentConfig::new(10_000, 0.2, PolicyKind::Tsna, 42, 1);
    for w in cfg.validate(&model)? {
        eprintln!("warning: {w}");
    }
    let rec = run_experiment(&model, mu, &cfg, &mut substream(cfg.seed, 0))?;
    println!("recommended arm {}", rec.recommended);
    println!("draws (arm 1, arm 0) = {:?}", rec.counts);
    println!("sample means = {:?}", rec.means);
    println!("frozen w_hat = {:.4}, second-stage pi_hat = {:.4}", rec.w_hat.unwrap(), rec.pi_hat);
    println!("Neyman ratio = 0.75");
    Ok(())
}
