//! Batch front-end: load models or data, compute or estimate causal
//! strength and the baseline measures, and regenerate the experiment preset
//! datasets as plot-ready CSV.
//!
//! Exit status is 0 only if every output row was computed; numeric failures
//! are reported per row in an `error` column without aborting the sweep.

mod repro;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use causal_strength::discrete::{
    ace, causal_strength, information_flow, information_flow_source_exclusion,
    joint_from_model, observed_influence, transfer_entropy_exact, DiscreteModel,
};
use causal_strength::estimation::{estimate_causal_strength, EstimationConfig};
use causal_strength::gaussian::causal_strength_linear;
use causal_strength::graph::{Dag, EdgeSet};
use causal_strength::timeseries::{
    estimate_strength_ts, exact_strength_var, simulate_var1, transfer_entropy_var1, Trajectory,
};
use causal_strength::{io, Base};

#[derive(Parser)]
#[command(
    name = "causal-strength",
    version,
    about = "Causal strength of arrow sets in causal Bayesian networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact measures on a discrete model file.
    StrengthDiscrete(StrengthDiscreteArgs),
    /// Closed-form strength on a linear Gaussian SEM file.
    StrengthLinear(StrengthLinearArgs),
    /// Sample-based estimate from a data CSV and a DAG file.
    Estimate(EstimateArgs),
    /// Simulate and/or analyze a bivariate VAR(1) model.
    Timeseries(TimeseriesArgs),
    /// Regenerate an experiment preset as CSV.
    Repro(ReproArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Measure {
    CausalStrength,
    ObservedInfluence,
    Cmi,
    Te,
    InfoFlowAp,
    InfoFlowSe,
    Ace,
}

impl Measure {
    fn name(self) -> &'static str {
        match self {
            Measure::CausalStrength => "causal-strength",
            Measure::ObservedInfluence => "observed-influence",
            Measure::Cmi => "cmi",
            Measure::Te => "te",
            Measure::InfoFlowAp => "info-flow-ap",
            Measure::InfoFlowSe => "info-flow-se",
            Measure::Ace => "ace",
        }
    }
}

#[derive(Args)]
struct StrengthDiscreteArgs {
    /// Discrete model JSON file.
    #[arg(long)]
    model: PathBuf,
    /// Edge selector: "A->B;C->D", "all-single-arrows", "all-into:<node>",
    /// or "empty".
    #[arg(long, default_value = "all-single-arrows")]
    edges: String,
    #[arg(long, value_enum, default_value = "causal-strength")]
    measure: Measure,
    #[arg(long, default_value = "bits")]
    base: String,
    /// Past horizon for the te measure on unrolled chain models.
    #[arg(long, default_value_t = 16)]
    horizon: usize,
    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StrengthLinearArgs {
    /// SEM JSON file.
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value = "all-single-arrows")]
    edges: String,
    #[arg(long, value_enum, default_value = "causal-strength")]
    measure: Measure,
    #[arg(long, default_value = "nats")]
    base: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// DAG JSON file.
    #[arg(long)]
    model: PathBuf,
    /// Samples CSV (header = variable names, one row per observation).
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "all-single-arrows")]
    edges: String,
    #[arg(long, value_enum, default_value = "causal-strength")]
    measure: Measure,
    #[arg(long, default_value = "nats")]
    base: String,
    #[arg(long, default_value_t = 4)]
    knn_r: usize,
    /// Ridge penalty; defaults to 1e-3 times the sample count.
    #[arg(long)]
    ridge_lambda: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of columns kept as the comparison part.
    #[arg(long, default_value_t = 0.5)]
    split: f64,
    /// Clamp negative estimates to zero in the output.
    #[arg(long)]
    clamp: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TimeseriesArgs {
    /// VAR(1) model JSON; needed for computed strength and transfer entropy.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Trajectory CSV (columns t, X, Y); simulated from the model if absent.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Length of the simulated trajectory when no data file is given.
    #[arg(long, default_value_t = 50_000)]
    t_len: usize,
    #[arg(long, default_value_t = 1_000)]
    burn_in: usize,
    /// Embedding lag order for estimation.
    #[arg(long, default_value_t = 1)]
    lag: usize,
    /// Window stride; defaults to 10 times the lag order.
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long, default_value = "nats")]
    base: String,
    #[arg(long, default_value_t = 4)]
    knn_r: usize,
    #[arg(long)]
    ridge_lambda: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    split: f64,
    #[arg(long)]
    clamp: bool,
    /// Write the (simulated) trajectory to this CSV path.
    #[arg(long)]
    save_trajectory: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproArgs {
    /// Preset: fig6, fig7, fig9, example7, xor, code, broadcast.
    preset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::StrengthDiscrete(args) => strength_discrete(args),
        Command::StrengthLinear(args) => strength_linear(args),
        Command::Estimate(args) => estimate(args),
        Command::Timeseries(args) => timeseries(args),
        Command::Repro(args) => {
            let (header, rows) = repro::run(&args.preset, args.seed)?;
            write_csv(args.out.as_deref(), &header, &rows)?;
            Ok(true)
        }
    }
}

fn parse_base(s: &str) -> Result<Base> {
    s.parse::<Base>().map_err(|e| anyhow::anyhow!("{e}"))
}

/// Resolve an edge selector against a DAG into one edge set per output row.
fn resolve_edge_sets(spec: &str, dag: &Dag) -> Result<Vec<EdgeSet>> {
    let spec = spec.trim();
    if spec == "all-single-arrows" {
        return Ok(dag.edges().into_iter().map(|(s, t)| EdgeSet::single(&s, &t)).collect());
    }
    if let Some(node) = spec.strip_prefix("all-into:") {
        return Ok(vec![dag.edges_into(node.trim())?]);
    }
    if spec.is_empty() || spec == "empty" || spec == "none" {
        return Ok(vec![EdgeSet::empty()]);
    }
    let mut pairs = Vec::new();
    for item in spec.split([';', ',']).filter(|s| !s.trim().is_empty()) {
        let Some((src, tgt)) = item.split_once("->") else {
            bail!("bad edge {item:?}: expected \"src->tgt\"");
        };
        pairs.push((src.trim().to_owned(), tgt.trim().to_owned()));
    }
    let set = EdgeSet::from_pairs(pairs);
    dag.validate_edge_set(&set)?;
    Ok(vec![set])
}

pub(crate) fn fmt(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        v.to_string()
    }
}

fn write_csv(out: Option<&std::path::Path>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut writer: csv::Writer<Box<dyn std::io::Write>> = match out {
        Some(path) => csv::Writer::from_writer(Box::new(
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => csv::Writer::from_writer(Box::new(std::io::stdout().lock())),
    };
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

fn all_ok(rows: &[Vec<String>]) -> bool {
    rows.iter().all(|r| r.last().is_none_or(String::is_empty))
}

fn discrete_measure(
    model: &DiscreteModel,
    s: &EdgeSet,
    measure: Measure,
    base: Base,
    horizon: usize,
) -> causal_strength::Result<f64> {
    match measure {
        Measure::CausalStrength => causal_strength(model, s, base),
        Measure::ObservedInfluence => observed_influence(model, s, base),
        Measure::InfoFlowSe => information_flow_source_exclusion(model, s, base),
        Measure::Te => transfer_entropy_exact(model, "X", "Y", horizon, base),
        Measure::InfoFlowAp => {
            let sources: Vec<String> =
                s.iter().map(|(src, _)| src.clone()).collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .collect();
            let targets = s.targets();
            information_flow(
                model,
                &sources.iter().map(String::as_str).collect::<Vec<_>>(),
                &targets.iter().map(String::as_str).collect::<Vec<_>>(),
                &[],
                base,
            )
        }
        Measure::Cmi => {
            let [(src, tgt)] = s.iter().collect::<Vec<_>>()[..] else {
                return Err(causal_strength::Error::Usage(
                    "cmi is defined per single arrow".into(),
                ));
            };
            let joint = joint_from_model(model)?;
            let others: Vec<String> =
                model.dag().parents(tgt)?.into_iter().filter(|p| p != src).collect();
            joint.conditional_mutual_information(
                &[src.as_str()],
                &[tgt.as_str()],
                &others.iter().map(String::as_str).collect::<Vec<_>>(),
                base,
            )
        }
        Measure::Ace => {
            let [(src, tgt)] = s.iter().collect::<Vec<_>>()[..] else {
                return Err(causal_strength::Error::Usage(
                    "ace is defined per single arrow".into(),
                ));
            };
            ace(model, src, tgt)
        }
    }
}

fn strength_discrete(args: StrengthDiscreteArgs) -> Result<bool> {
    let base = parse_base(&args.base)?;
    let model = io::load_discrete_model(&args.model)
        .with_context(|| format!("loading {}", args.model.display()))?;
    let sets = resolve_edge_sets(&args.edges, model.dag())?;
    let rows: Vec<Vec<String>> = sets
        .iter()
        .map(|s| {
            let (value, error) =
                match discrete_measure(&model, s, args.measure, base, args.horizon) {
                    Ok(v) => (fmt(v), String::new()),
                    Err(e) => (String::new(), e.to_string()),
                };
            vec![s.to_string(), args.measure.name().to_owned(), value, error]
        })
        .collect();
    write_csv(args.out.as_deref(), &["edge_set", "measure", "value", "error"], &rows)?;
    Ok(all_ok(&rows))
}

fn strength_linear(args: StrengthLinearArgs) -> Result<bool> {
    let base = parse_base(&args.base)?;
    let sem = io::load_sem(&args.model)
        .with_context(|| format!("loading {}", args.model.display()))?;
    let sets = resolve_edge_sets(&args.edges, sem.dag())?;
    let rows: Vec<Vec<String>> = sets
        .iter()
        .map(|s| {
            let result = match args.measure {
                Measure::CausalStrength => causal_strength_linear(&sem, s, base),
                other => Err(causal_strength::Error::Usage(format!(
                    "measure {} has no closed form in the linear engine",
                    other.name()
                ))),
            };
            let (value, error) = match result {
                Ok(v) => (fmt(v), String::new()),
                Err(e) => (String::new(), e.to_string()),
            };
            vec![s.to_string(), args.measure.name().to_owned(), value, error]
        })
        .collect();
    write_csv(args.out.as_deref(), &["edge_set", "measure", "value", "error"], &rows)?;
    Ok(all_ok(&rows))
}

fn estimate(args: EstimateArgs) -> Result<bool> {
    let base = parse_base(&args.base)?;
    let dag =
        io::load_dag(&args.model).with_context(|| format!("loading {}", args.model.display()))?;
    let data =
        io::load_samples(&args.data).with_context(|| format!("loading {}", args.data.display()))?;
    let sets = resolve_edge_sets(&args.edges, &dag)?;
    let cfg = EstimationConfig {
        ridge_lambda: args.ridge_lambda,
        knn_r: args.knn_r,
        split_fraction: args.split,
        seed: args.seed,
        base,
    };
    let rows: Vec<Vec<String>> = sets
        .iter()
        .map(|s| {
            let result = match args.measure {
                Measure::CausalStrength => estimate_causal_strength(&data, &dag, s, &cfg),
                other => Err(causal_strength::Error::Usage(format!(
                    "only causal-strength can be estimated from data, not {}",
                    other.name()
                ))),
            };
            let (value, error) = match result {
                Ok(v) => {
                    let v = if args.clamp { v.max(0.0) } else { v };
                    (fmt(v), String::new())
                }
                Err(e) => (String::new(), e.to_string()),
            };
            vec![
                s.to_string(),
                args.measure.name().to_owned(),
                value,
                String::new(), // no ground truth available from data alone
                args.seed.to_string(),
                error,
            ]
        })
        .collect();
    write_csv(
        args.out.as_deref(),
        &["edge_set", "measure", "estimated", "computed", "seed", "error"],
        &rows,
    )?;
    Ok(all_ok(&rows))
}

fn timeseries(args: TimeseriesArgs) -> Result<bool> {
    let base = parse_base(&args.base)?;
    if args.model.is_none() && args.data.is_none() {
        bail!("timeseries needs --model and/or --data");
    }
    let model = args
        .model
        .as_ref()
        .map(|p| io::load_var_model(p).with_context(|| format!("loading {}", p.display())))
        .transpose()?;
    let traj: Trajectory = match (&args.data, &model) {
        (Some(path), _) => io::load_trajectory(path)
            .with_context(|| format!("loading {}", path.display()))?,
        (None, Some(m)) => simulate_var1(m, args.t_len, args.seed, args.burn_in),
        (None, None) => unreachable!(),
    };
    if let Some(path) = &args.save_trajectory {
        io::save_trajectory(path, &traj)?;
    }
    let cfg = EstimationConfig {
        ridge_lambda: args.ridge_lambda,
        knn_r: args.knn_r,
        split_fraction: args.split,
        seed: args.seed,
        base,
    };
    let names = traj.component_names().to_vec();
    let mut rows = Vec::new();
    for target in 0..2usize.min(names.len()) {
        let source = 1 - target;
        let direction = format!("{}->{}", names[source], names[target]);
        let mut error = String::new();
        let computed = match &model {
            Some(m) => match exact_strength_var(m, target, base) {
                Ok(v) => fmt(v),
                Err(e) => {
                    error = e.to_string();
                    String::new()
                }
            },
            None => String::new(),
        };
        let te = match &model {
            Some(m) => match transfer_entropy_var1(m, target, base) {
                Ok(v) => fmt(v),
                Err(e) => {
                    error = e.to_string();
                    String::new()
                }
            },
            None => String::new(),
        };
        let estimated = match estimate_strength_ts(&traj, args.lag, target, args.stride, &cfg) {
            Ok(v) => fmt(if args.clamp { v.max(0.0) } else { v }),
            Err(e) => {
                error = e.to_string();
                String::new()
            }
        };
        rows.push(vec![
            direction,
            computed,
            estimated,
            te,
            args.seed.to_string(),
            error,
        ]);
    }
    write_csv(
        args.out.as_deref(),
        &["direction", "computed", "estimated", "transfer_entropy", "seed", "error"],
        &rows,
    )?;
    Ok(all_ok(&rows))
}
