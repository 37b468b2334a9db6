//! Command-line front end behind the `tsna` binary.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 unparsable command line or
//! config, 3 config that parses but fails validation.

mod config;
mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{self, BoundReport};
use crate::error::{Error, Warning};
use crate::eval::{self, SweepResult, SweepSpec};
use crate::models::{MeanVector, OutcomeModel};
use crate::policy::PolicyKind;
use crate::sim::{simulate_records, ExperimentConfig};

pub use config::{ArmSection, BoundRequest, CampaignSection, Config, ExperimentSection, ModelSection};
pub use output::{csv_float, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tsna", version, about = "Two-stage Neyman allocation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides `[experiment] seed`
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to available parallelism
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// One row per replication of a single experiment
    Simulate,
    /// Worst-case sweep over local alternatives
    Sweep,
    /// Prior-averaged regret against the Bayes constant
    Bayes,
    /// Evaluate closed-form bounds
    Bounds,
    /// Exact enumeration against Monte Carlo for small Bernoulli instances
    Oracle,
    /// The same sweep for several policies
    Compare,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Bayes => "bayes",
            Command::Bounds => "bounds",
            Command::Oracle => "oracle",
            Command::Compare => "compare",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Parse(String),
    Invalid(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match cli.workers {
        Some(0) => {
            eprintln!("error: --workers must be positive");
            return EXIT_PARSE;
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_IO;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(()) => EXIT_OK,
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            EXIT_PARSE
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            EXIT_IO
        }
    }
}

fn load_config(cli: &Cli) -> Outcome<Config> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Parse("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut cfg = Config::parse(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    if let (Some(seed), Some(exp)) = (cli.seed, cfg.experiment.as_mut()) {
        exp.seed = seed;
    }
    Ok(cfg)
}

fn required<'a, T>(section: &'a Option<T>, name: &str) -> Outcome<&'a T> {
    section
        .as_ref()
        .ok_or_else(|| Failure::Parse(format!("missing [{name}] section")))
}

fn warn(warnings: &[Warning]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

/// Seconds since the Unix epoch.
fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: Option<u64>,
    started_unix: f64,
    finished_unix: f64,
    config: &'a Config,
    outputs: Vec<String>,
}

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Outcome<()> {
        std::fs::create_dir_all(self.dir)?;
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    fn table(&mut self, stem: &str, table: &Table, format: Format) -> Outcome<()> {
        match format {
            Format::Csv => self.write(&format!("{stem}.csv"), &table.to_csv()),
            Format::Json => self.write(&format!("{stem}.json"), &table.to_json()),
        }
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Outcome<()> {
        let mut text = serde_json::to_string_pretty(value).expect("report serialises");
        text.push('\n');
        self.write(name, &text)
    }
}

fn execute(cli: &Cli) -> Outcome<()> {
    let started = now();
    let cfg = load_config(cli)?;
    let mut out = Writer {
        dir: &cli.out,
        written: Vec::new(),
    };
    match cli.command {
        Command::Simulate => simulate(&cfg, cli.format, &mut out)?,
        Command::Sweep => sweep(&cfg, cli.format, &mut out)?,
        Command::Bayes => bayes(&cfg, cli.format, &mut out)?,
        Command::Bounds => bounds_table(&cfg, cli.format, &mut out)?,
        Command::Oracle => oracle(&cfg, cli.format, &mut out)?,
        Command::Compare => compare(&cfg, cli.format, &mut out)?,
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        seed: cfg.experiment.map(|e| e.seed),
        started_unix: started,
        finished_unix: now(),
        config: &cfg,
        outputs: out.written.iter().map(|p| p.display().to_string()).collect(),
    };
    out.json("manifest.json", &manifest)?;
    Ok(())
}

fn model_of(cfg: &Config) -> Outcome<OutcomeModel> {
    Ok(required(&cfg.model, "model")?.build()?)
}

fn simulate(cfg: &Config, format: Format, out: &mut Writer) -> Outcome<()> {
    let model = model_of(cfg)?;
    let exp = required(&cfg.experiment, "experiment")?;
    let (Some(mu1), Some(mu0)) = (exp.mu1, exp.mu0) else {
        return Err(Error::config("[experiment] needs mu1 and mu0 for simulate").into());
    };
    let run = exp.config(exp.horizon()?, eval::MINIMAX_SPLIT);
    warn(&run.validate(&model)?);
    let records = simulate_records(&model, MeanVector::new(mu1, mu0), &run)?;
    let mut table = Table::new(&["rep", "seed", "recommended", "n1", "n0", "mean1", "mean0", "pi_hat"]);
    for r in &records {
        table.row(vec![
            r.rep.into(),
            r.seed.into(),
            u64::from(r.recommended.label()).into(),
            r.counts[0].into(),
            r.counts[1].into(),
            r.means[0].into(),
            r.means[1].into(),
            r.pi_hat.into(),
        ]);
    }
    out.table("records", &table, format)
}

fn sweep_spec(cfg: &Config) -> Outcome<SweepSpec> {
    let model = model_of(cfg)?;
    let exp = required(&cfg.experiment, "experiment")?;
    let campaign = cfg.campaign.clone().unwrap_or_default();
    let horizons = match (&campaign.horizons, exp.horizon) {
        (Some(list), _) => list.clone(),
        (None, Some(t)) => vec![t],
        (None, None) => return Err(Error::config("sweep needs [campaign] T_list or [experiment] T").into()),
    };
    let template = exp.config(horizons.first().copied().unwrap_or(0), eval::MINIMAX_SPLIT);
    let spec = SweepSpec {
        mu_base: campaign.mu_base,
        h_grid: campaign.h_grid.unwrap_or_else(eval::default_h_grid),
        horizons,
        cfg: template,
        model,
    };
    warn(&spec.validate()?);
    Ok(spec)
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    policy: PolicyKind,
    /// Largest scaled regret over every budget in the sweep.
    max_scaled_regret: f64,
    max_std_error: f64,
    argmax_h: f64,
    #[serde(rename = "argmax_T")]
    argmax_horizon: u64,
    per_budget: &'a [eval::SweepMax],
    minimax_lower_bound: f64,
    optimal_variance: f64,
    g_maximizer: (f64, f64),
    g_argmax: (f64, f64),
}

fn summarize(res: &SweepResult) -> SweepSummary<'_> {
    let best = res
        .summary
        .iter()
        .fold(res.summary[0], |a, m| if m.max_scaled_regret > a.max_scaled_regret { *m } else { a });
    SweepSummary {
        policy: res.policy,
        max_scaled_regret: best.max_scaled_regret,
        max_std_error: best.std_error,
        argmax_h: best.h,
        argmax_horizon: best.horizon,
        per_budget: &res.summary,
        minimax_lower_bound: res.theory.minimax_lower_bound,
        optimal_variance: res.theory.optimal_variance,
        g_maximizer: res.theory.g_maximizer,
        g_argmax: res.theory.g_argmax,
    }
}

const CELL_HEADER: [&str; 7] = ["T", "h", "sign", "regret", "se", "scaled", "theory"];

fn cell_row(c: &eval::SweepCell) -> Vec<output::Value> {
    vec![
        c.horizon.into(),
        c.h.into(),
        c.sign.symbol().into(),
        c.regret.into(),
        c.std_error.into(),
        c.scaled.into(),
        c.theory.into(),
    ]
}

fn sweep(cfg: &Config, format: Format, out: &mut Writer) -> Outcome<()> {
    let spec = sweep_spec(cfg)?;
    let res = eval::worst_case_sweep(&spec)?;
    let mut table = Table::new(&CELL_HEADER);
    for c in &res.cells {
        table.row(cell_row(c));
    }
    out.table("cells", &table, format)?;
    out.json("summary.json", &summarize(&res))
}

fn compare(cfg: &Config, format: Format, out: &mut Writer) -> Outcome<()> {
    let spec = sweep_spec(cfg)?;
    let names = cfg
        .campaign
        .as_ref()
        .and_then(|c| c.policies.clone())
        .unwrap_or_else(|| PolicyKind::ALL.iter().map(|p| p.name().to_owned()).collect());
    let results = eval::policy_comparison(&spec, &names)?;
    let mut header = vec!["policy"];
    header.extend(CELL_HEADER);
    let mut table = Table::new(&header);
    for res in &results {
        for c in &res.cells {
            let mut row = vec![res.policy.name().into()];
            row.extend(cell_row(c));
            table.row(row);
        }
    }
    out.table("compare", &table, format)?;
    let summaries: Vec<SweepSummary> = results.iter().map(summarize).collect();
    out.json("summary.json", &summaries)
}

fn bayes(cfg: &Config, format: Format, out: &mut Writer) -> Outcome<()> {
    let model = model_of(cfg)?;
    let exp = required(&cfg.experiment, "experiment")?;
    let prior = required(&cfg.prior, "prior")?;
    let draws = cfg
        .campaign
        .as_ref()
        .and_then(|c| c.prior_draws)
        .ok_or_else(|| Error::config("bayes needs [campaign] prior_draws"))?;
    let run = exp.config(exp.horizon()?, eval::BAYES_SPLIT);
    warn(&run.validate(&model)?);
    let est = eval::bayes_campaign(prior, &model, &run, draws)?;
    let mut table = Table::new(&[
        "T",
        "r",
        "prior_draws",
        "replications",
        "scaled_regret",
        "se",
        "between_se",
        "within_se",
        "bound",
    ]);
    table.row(vec![
        est.horizon.into(),
        run.split.into(),
        est.prior_draws.into(),
        est.replications.into(),
        est.scaled_regret.into(),
        est.std_error.into(),
        est.between_se.into(),
        est.within_se.into(),
        est.bound.into(),
    ]);
    out.table("bayes", &table, format)
}

fn bound_report(cfg: &Config, req: &BoundRequest) -> Outcome<BoundReport> {
    if req.name == "bayes_lower_bound" {
        if !req.inputs.is_empty() {
            return Err(Error::config("bayes_lower_bound takes its inputs from [prior] and [model]").into());
        }
        let model = model_of(cfg)?;
        let prior = required(&cfg.prior, "prior")?;
        return Ok(BoundReport {
            name: req.name.clone(),
            value: bounds::bayes_lower_bound(prior, &model)?,
            inputs: Default::default(),
            clamped: false,
        });
    }
    Ok(bounds::evaluate(&req.name, &req.inputs)?)
}

fn bounds_table(cfg: &Config, format: Format, out: &mut Writer) -> Outcome<()> {
    if cfg.bounds.is_empty() {
        return Err(Error::config("no [[bounds]] requested").into());
    }
    let reports = cfg
        .bounds
        .iter()
        .map(|req| bound_report(cfg, req))
        .collect::<Outcome<Vec<_>>>()?;
    let mut table = Table::new(&["name", "value", "clamped", "inputs"]);
    for r in &reports {
        let inputs: Vec<String> = r.inputs.iter().map(|(k, v)| format!("{k}={}", csv_float(*v))).collect();
        table.row(vec![
            r.name.as_str().into(),
            r.value.into(),
            r.clamped.to_string().as_str().into(),
            inputs.join(";").as_str().into(),
        ]);
    }
    out.table("bounds", &table, format)
}

fn oracle(cfg: &Config, format: Format, out: &mut Writer) -> Outcome<()> {
    let model = model_of(cfg)?;
    let exp = required(&cfg.experiment, "experiment")?;
    let campaign = cfg.campaign.clone().unwrap_or_default();
    let grid = campaign
        .mu_grid
        .ok_or_else(|| Error::config("oracle needs [campaign] mu_grid"))?;
    let horizons = match (campaign.horizons, exp.horizon) {
        (Some(list), _) => list,
        (None, Some(t)) => vec![t],
        (None, None) => return Err(Error::config("oracle needs [campaign] T_list or [experiment] T").into()),
    };
    let means: Vec<MeanVector> = grid
        .iter()
        .flat_map(|&a| grid.iter().map(move |&b| MeanVector::new(a, b)))
        .collect();
    let run: ExperimentConfig = exp.config(horizons[0], 0.5);
    for &t in &horizons {
        warn(&ExperimentConfig { horizon: t, ..run }.validate(&model)?);
    }
    let rows = eval::oracle_grid(&model, &means, &horizons, &run)?;
    let mut table = Table::new(&["mu1", "mu0", "T", "exact", "mc", "mc_se", "z"]);
    for r in &rows {
        table.row(vec![
            r.mu1.into(),
            r.mu0.into(),
            r.horizon.into(),
            r.exact.into(),
            r.mc.into(),
            r.mc_se.into(),
            r.z.into(),
        ]);
    }
    out.table("oracle", &table, format)
}
