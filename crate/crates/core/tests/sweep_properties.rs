//! Scaled-regret curves from worst-case sweeps against the analytic curve,
//! across budgets, signs and policies.

use tsna::bounds::{g_worstcase, Prior};
use tsna::eval::{bayes_campaign, default_h_grid, policy_comparison, worst_case_sweep, SweepResult, SweepSpec};
use tsna::{Engine, ExperimentConfig, MeanSpace, OutcomeModel, PolicyKind};

fn spec(var1: f64, h_grid: Vec<f64>, horizons: Vec<u64>, reps: u64, seed: u64) -> SweepSpec {
    SweepSpec {
        mu_base: 0.0,
        h_grid,
        horizons,
        cfg: ExperimentConfig::new(1000, 0.2, PolicyKind::Tsna, seed, reps).with_engine(Engine::Sufficient),
        model: OutcomeModel::gaussian(var1, 1.0, MeanSpace::new(-10.0, 10.0).unwrap()).unwrap(),
    }
}

fn pooled(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

#[test]
fn scaled_regret_plateaus_across_budgets() {
    let res = worst_case_sweep(&spec(1.0, default_h_grid(), vec![1000, 4000, 16000], 100_000, 1)).unwrap();
    let maxima: Vec<_> = res.summary.clone();
    for (i, a) in maxima.iter().enumerate() {
        for b in &maxima[i + 1..] {
            let diff = (a.max_scaled_regret - b.max_scaled_regret).abs();
            assert!(diff < 3.0 * pooled(a.std_error, b.std_error), "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn empirical_curve_tracks_analytic_curve() {
    let res = worst_case_sweep(&spec(1.0, default_h_grid(), vec![4000], 100_000, 2)).unwrap();
    let v = res.theory.optimal_variance;
    for c in &res.worst {
        let se = (c.horizon as f64).sqrt() * c.std_error;
        assert_eq!(c.theory, g_worstcase(c.h, v).unwrap());
        assert!((c.scaled - c.theory).abs() <= 3.0 * se + 0.01, "{c:?}");
    }
}

#[test]
fn arm_exchange_symmetry() {
    let res = worst_case_sweep(&spec(1.0, vec![0.0, 1.0, 2.0, 3.0], vec![4000], 50_000, 3)).unwrap();
    for pair in res.cells.chunks(2) {
        let (p, m) = (pair[0], pair[1]);
        assert_eq!(p.h, m.h);
        if p.h == 0.0 {
            assert_eq!((p.regret, m.regret), (0.0, 0.0));
        }
        assert!((p.regret - m.regret).abs() <= 3.0 * pooled(p.std_error, m.std_error) + 1e-15, "{p:?} {m:?}");
    }
}

fn max_of(res: &SweepResult) -> (f64, f64) {
    let m = res.max_for(4000).unwrap();
    (m.max_scaled_regret, m.std_error)
}

#[test]
fn tsna_beats_uniform_under_unequal_variances() {
    let h_grid: Vec<f64> = (1..=32).map(|i| 0.25 * i as f64).collect();
    let res = policy_comparison(&spec(9.0, h_grid, vec![4000], 100_000, 4), &["tsna", "uniform", "oracle-neyman"]).unwrap();
    let (tsna, uniform, oracle) = (max_of(&res[0]), max_of(&res[1]), max_of(&res[2]));
    assert!(tsna.0 <= uniform.0 - 2.0 * pooled(tsna.1, uniform.1), "{tsna:?} vs {uniform:?}");
    assert!((tsna.0 - oracle.0).abs() <= 3.0 * pooled(tsna.1, oracle.1), "{tsna:?} vs {oracle:?}");
}

#[test]
fn tsna_matches_uniform_under_equal_variances() {
    let res = policy_comparison(&spec(1.0, default_h_grid(), vec![4000], 100_000, 5), &["tsna", "uniform"]).unwrap();
    let (a, b) = (max_of(&res[0]), max_of(&res[1]));
    assert!((a.0 - b.0).abs() <= 3.0 * pooled(a.1, b.1), "{a:?} vs {b:?}");
}

#[test]
fn comparison_shares_seeds_across_policies() {
    let s = spec(1.0, vec![1.0], vec![4000], 1000, 6);
    let res = policy_comparison(&s, &["tsna", "tsna"]).unwrap();
    assert_eq!(res[0], res[1]);
}

#[test]
fn bayes_estimate_is_stable_when_draws_double() {
    let model = OutcomeModel::gaussian(1.0, 1.0, MeanSpace::new(-1.0, 1.0).unwrap()).unwrap();
    let prior = Prior::product_uniform(-1.0, 1.0).unwrap();
    let cfg = ExperimentConfig::new(4000, 0.05, PolicyKind::Tsna, 7, 200).with_engine(Engine::Sufficient);
    let a = bayes_campaign(&prior, &model, &cfg, 2000).unwrap();
    let b = bayes_campaign(&prior, &model, &cfg, 4000).unwrap();
    assert!((a.scaled_regret - b.scaled_regret).abs() < 3.0 * pooled(a.std_error, b.std_error), "{a:?} {b:?}");
}
