//! The closed-form quantities: optimal allocation, variances, constants.

use tsna::bounds::{
    ate_variance, bayes_lower_bound, chernoff_bound, g_argmax, g_maximizer, j_integral, minimax_lower_bound,
    neyman_ratio, Prior,
};
use tsna::{MeanSpace, OutcomeModel, Prob};

fn main() -> tsna::Result<()> {
    let w = neyman_ratio(3.0, 1.0)?;
    println!("Neyman ratio for σ = (3, 1): {}", w.value());
    println!("V(w*) = {}   V(1/2) = {}", ate_variance(w, 9.0, 1.0)?, ate_variance(Prob::HALF, 9.0, 1.0)?);
    println!("minimax constant, σ̄ = (1, 1): {:.14}", minimax_lower_bound(1.0, 1.0)?);
    println!("minimax constant, σ̄ = (3, 1): {:.14}", minimax_lower_bound(3.0, 1.0)?);
    for v in [1.0, 4.0, 16.0] {
        let (h0, g0) = g_maximizer(v)?;
        let (h1, g1) = g_argmax(v)?;
        println!("V = {v:>4}: g(√V) = {g0:.6} at h = {h0:.4}; peak {g1:.6} at h = {h1:.4}");
    }
    println!("J(0) = {}, J(1) = {:.12}, J(50) = {}", j_integral(0.0)?, j_integral(1.0)?, j_integral(50.0)?);
    println!("Chernoff bound r=0.2, T=500, Δ=1: {:.6}", chernoff_bound(0.2, 500, 1.0, 1.0)?.value());
    let model = OutcomeModel::gaussian(1.0, 1.0, MeanSpace::new(-1.0, 1.0)?)?;
    let prior = Prior::product_uniform(-1.0, 1.0)?;
    println!("Bayes constant, uniform prior on [-1, 1]²: {:.10}", bayes_lower_bound(&prior, &model)?);
    let bern = OutcomeModel::bernoulli(0.05)?;
    let prior = Prior::product_uniform(0.2, 0.8)?;
    println!("Bayes constant, Bernoulli, uniform on [0.2, 0.8]²: {:.10}", bayes_lower_bound(&prior, &bern)?);
    Ok(())
}
