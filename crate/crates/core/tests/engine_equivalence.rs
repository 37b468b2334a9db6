//! The sufficient-statistic engine draws from the same law as the per-round engine.

use tsna::sim::simulate_records;
use tsna::{Engine, ExperimentConfig, MeanSpace, MeanVector, OutcomeModel, PolicyKind, RunRecord};

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}

/// Two-sample z statistic for the difference of means.
fn z(a: &[f64], b: &[f64]) -> f64 {
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let se = (va / a.len() as f64 + vb / b.len() as f64).sqrt();
    if se == 0.0 {
        return if ma == mb { 0.0 } else { f64::INFINITY };
    }
    (ma - mb).abs() / se
}

fn column(records: &[RunRecord], f: impl Fn(&RunRecord) -> f64) -> Vec<f64> {
    records.iter().map(f).collect()
}

fn compare(model: &OutcomeModel, mu: MeanVector, cfg: ExperimentConfig) {
    let a = simulate_records(model, mu, &cfg.with_engine(Engine::PerRound)).unwrap();
    let b = simulate_records(model, mu, &ExperimentConfig { seed: cfg.seed + 1, ..cfg.with_engine(Engine::Sufficient) }).unwrap();
    let best = mu.best_arm();
    type Stat = (&'static str, fn(&RunRecord) -> f64);
    let stats: [Stat; 4] = [
        ("n1", |r| r.counts[0] as f64),
        ("mean1", |r| r.means[0]),
        ("mean0", |r| r.means[1]),
        ("pi_hat", |r| r.pi_hat),
    ];
    for (name, f) in stats {
        let za = z(&column(&a, f), &column(&b, f));
        assert!(za < 4.0, "{name}: z = {za} for {cfg:?}");
    }
    if let Some(best) = best {
        let wrong = |r: &RunRecord| f64::from(u8::from(r.recommended != best));
        let zm = z(&column(&a, wrong), &column(&b, wrong));
        assert!(zm < 4.0, "misidentification: z = {zm} for {cfg:?}");
    }
    // spread of the sample means, not only their centre
    let sq = |r: &RunRecord| (r.means[0] - mu.treatment).powi(2);
    let zs = z(&column(&a, sq), &column(&b, sq));
    assert!(zs < 4.0, "second moment of mean1: z = {zs}");
    assert!(a.iter().chain(&b).all(|r| r.counts[0] + r.counts[1] == cfg.horizon));
}

#[test]
fn gaussian_tsna() {
    let model = OutcomeModel::gaussian(4.0, 1.0, MeanSpace::new(-10.0, 10.0).unwrap()).unwrap();
    compare(&model, MeanVector::new(0.1, 0.0), ExperimentConfig::new(400, 0.2, PolicyKind::Tsna, 10, 20_000));
}

#[test]
fn gaussian_tsna_odd_first_stage() {
    let model = OutcomeModel::gaussian(1.0, 9.0, MeanSpace::new(-10.0, 10.0).unwrap()).unwrap();
    compare(&model, MeanVector::new(0.0, 0.3), ExperimentConfig::new(75, 0.3, PolicyKind::Tsna, 20, 20_000));
}

#[test]
fn bernoulli_tsna() {
    let model = OutcomeModel::bernoulli(0.05).unwrap();
    compare(&model, MeanVector::new(0.6, 0.45), ExperimentConfig::new(60, 0.2, PolicyKind::Tsna, 30, 20_000));
}

#[test]
fn baselines() {
    let model = OutcomeModel::gaussian(9.0, 1.0, MeanSpace::new(-10.0, 10.0).unwrap()).unwrap();
    let mu = MeanVector::new(0.2, 0.0);
    compare(&model, mu, ExperimentConfig::new(300, 0.2, PolicyKind::Uniform, 40, 20_000));
    compare(&model, mu, ExperimentConfig::new(300, 0.2, PolicyKind::OracleNeyman, 50, 20_000));
}
