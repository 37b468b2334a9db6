//! Prior-averaged regret `T · BayesRegret` against the Bayes constant.

use tsna::bounds::Prior;
use tsna::eval::{bayes_campaign, BAYES_SPLIT};
use tsna::{Engine, ExperimentConfig, MeanSpace, OutcomeModel, PolicyKind};

fn main() -> tsna::Result<()> {
    let model = OutcomeModel::gaussian(1.0, 1.0, MeanSpace::new(-1.0, 1.0)?)?;
    let prior = Prior::product_uniform(-1.0, 1.0)?;
    let cfg = ExperimentConfig::new(10_000, BAYES_SPLIT, PolicyKind::Tsna, 11, 200).with_engine(Engine::Sufficient);
    let est = bayes_campaign(&prior, &model, &cfg, 2000)?;
    println!("T · Bayes regret = {:.4} ± {:.4}", est.scaled_regret, est.std_error);
    println!("  between-draw se {:.4}, within-draw se {:.4}", est.between_se, est.within_se);
    println!("Bayes constant    = {:.4}", est.bound);
    Ok(())
}
