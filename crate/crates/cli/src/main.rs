use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ising_hightemp::dynamics::{hamming_trace, mixing_schedule, sample_replicas, ChainEnsemble};
use ising_hightemp::estimation::{mple_fit, mple_fit_zero_field, MpleOptions};
use ising_hightemp::io::{
    couple_rows, format_observations, key_value_text, load_coefficients, load_model, load_observations, write_csv_to,
    write_records,
};
use ising_hightemp::statistics::{tail_report, TailOptions};
use ising_hightemp::testing::{power_curve, run_test, StatisticSpec, TestOptions, Threshold};

#[derive(Parser)]
#[command(name = "ising", version, about = "Simulate, estimate and test high-temperature Ising models")]
struct Cli {
    /// Master seed; every run is reproducible from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for replica-parallel work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the main output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw configurations with Glauber dynamics, one `+-` string per line.
    Sample(SampleArgs),
    /// Run greedily coupled chains and emit the pairwise Hamming trace as CSV.
    Couple(CoupleArgs),
    /// Fit (h, theta) by maximum pseudo-likelihood.
    Estimate(EstimateArgs),
    /// Goodness-of-fit test against a high-temperature null.
    Test(TestArgs),
    /// Power curve on synthetic grid departures, as CSV.
    Power(PowerArgs),
    /// Empirical tails of a multilinear function next to the concentration bound, as CSV.
    Tails(TailsArgs),
    /// Dobrushin report for a model.
    Check(CheckArgs),
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    model: PathBuf,
    /// Fixed number of steps (overrides the mixing schedule).
    #[arg(long)]
    steps: Option<u64>,
    /// Run (zeta + 2) t_mix steps.
    #[arg(long = "mix-multiplier", default_value_t = 1.0)]
    mix_multiplier: f64,
    #[arg(long, default_value_t = 1)]
    replicas: usize,
}

#[derive(Args)]
struct CoupleArgs {
    #[arg(long)]
    model: PathBuf,
    /// Number of chains (ignored when --starts is given).
    #[arg(long, short = 'k', default_value_t = 2)]
    chains: usize,
    /// Start configurations, one per chain; uniform random starts otherwise.
    #[arg(long)]
    starts: Option<PathBuf>,
    #[arg(long)]
    steps: u64,
}

#[derive(Args)]
struct EstimateArgs {
    /// Model or graph file; only its graph is used.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    observations: PathBuf,
    /// Pin h = 0.
    #[arg(long)]
    zero_field: bool,
    /// Also write JSON-lines records here.
    #[arg(long)]
    record: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatisticKind {
    Zlocal,
    Zk,
    Coefficients,
}

#[derive(Args)]
struct StatisticArgs {
    #[arg(long, value_enum, default_value = "zlocal")]
    statistic: StatisticKind,
    /// Distance for `zk`.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Coefficient file for `coefficients`.
    #[arg(long)]
    coefficients: Option<PathBuf>,
}

#[derive(Args)]
struct TestKnobs {
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long = "null-samples", default_value_t = 100)]
    null_samples: usize,
    #[arg(long = "mix-multiplier", default_value_t = 1.0)]
    mix_multiplier: f64,
    /// `grid-critical`, `dobrushin` or a numeric coupling.
    #[arg(long, default_value = "grid-critical")]
    threshold: Threshold,
    /// Null with h = 0.
    #[arg(long)]
    zero_field: bool,
    /// Slack floor for the null's step budget outside Dobrushin mode.
    #[arg(long = "eta-floor", default_value_t = 0.1)]
    eta_floor: f64,
}

impl TestKnobs {
    fn options(&self, seed: u64) -> TestOptions {
        TestOptions {
            alpha: self.alpha,
            null_samples: self.null_samples,
            mix_multiplier: self.mix_multiplier,
            threshold: self.threshold,
            zero_field: self.zero_field,
            eta_floor: self.eta_floor,
            mple: MpleOptions::default(),
            seed,
        }
    }
}

#[derive(Args)]
struct TestArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    observations: PathBuf,
    #[command(flatten)]
    statistic: StatisticArgs,
    #[command(flatten)]
    knobs: TestKnobs,
    #[arg(long)]
    record: Option<PathBuf>,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long, default_value_t = 20)]
    width: usize,
    #[arg(long, default_value_t = 20)]
    height: usize,
    /// Comma-separated departure strengths.
    #[arg(long, value_delimiter = ',', default_value = "0,0.04,0.08,0.2,0.5")]
    taus: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[command(flatten)]
    statistic: StatisticArgs,
    #[command(flatten)]
    knobs: TestKnobs,
}

#[derive(Args)]
struct TailsArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    coefficients: PathBuf,
    #[arg(long, default_value_t = 1000)]
    replicas: usize,
    /// Comma-separated radii.
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<f64>,
    #[arg(long = "mix-multiplier", default_value_t = 1.0)]
    mix_multiplier: f64,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    record: Option<PathBuf>,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    configure_threads(cli.threads)?;
    let mut out = open_output(cli.output.as_deref())?;
    match cli.command {
        Command::Sample(a) => sample(a, cli.seed, &mut out)?,
        Command::Couple(a) => couple(a, cli.seed, &mut out)?,
        Command::Estimate(a) => estimate(a, &mut out)?,
        Command::Test(a) => test(a, cli.seed, &mut out)?,
        Command::Power(a) => power(a, cli.seed, &mut out)?,
        Command::Tails(a) => tails(a, cli.seed, &mut out)?,
        Command::Check(a) => check(a, &mut out)?,
    }
    out.flush().context("flushing output")?;
    Ok(())
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(threads: Option<usize>) -> Result<()> {
    if threads.is_some_and(|n| n != 1) {
        log::warn!("built without the `parallel` feature; --threads is ignored");
    }
    Ok(())
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sample(a: SampleArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let model = load_model(&a.model)?;
    let steps = match a.steps {
        Some(s) => s,
        None => mixing_schedule(&model, a.mix_multiplier)
            .context("no --steps given and the model has no mixing schedule")?
            .t_star,
    };
    let configs = sample_replicas(&model, steps, a.replicas, seed, |x| x.clone());
    out.write_all(format_observations(&configs).as_bytes())?;
    Ok(())
}

fn couple(a: CoupleArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let model = load_model(&a.model)?;
    let mut ensemble = match &a.starts {
        Some(p) => ChainEnsemble::new(&model, load_observations(p, Some(model.node_count()))?, seed)?,
        None => ChainEnsemble::random_starts(&model, a.chains, seed)?,
    };
    let trace = hamming_trace(&mut ensemble, a.steps);
    write_csv_to(&couple_rows(&trace), out)?;
    Ok(())
}

fn estimate(a: EstimateArgs, out: &mut dyn Write) -> Result<()> {
    let graph = load_model(&a.graph)?.graph();
    let observations = load_observations(&a.observations, Some(graph.node_count()))?;
    let mut records = Vec::new();
    for (i, x) in observations.iter().enumerate() {
        let fit = if a.zero_field {
            mple_fit_zero_field(&graph, x, &MpleOptions::default())?
        } else {
            mple_fit(&graph, x, &MpleOptions::default())?
        };
        if observations.len() > 1 {
            writeln!(out, "observation={i}")?;
        }
        out.write_all(key_value_text(&fit).as_bytes())?;
        records.push(fit);
    }
    if let Some(p) = &a.record {
        write_records(&records, p)?;
    }
    Ok(())
}

fn statistic_spec(s: &StatisticArgs, graph: &ising_hightemp::Graph) -> Result<StatisticSpec> {
    Ok(match s.statistic {
        StatisticKind::Zlocal => StatisticSpec::ZLocal,
        StatisticKind::Zk => StatisticSpec::Zk(s.k),
        StatisticKind::Coefficients => {
            let Some(p) = &s.coefficients else {
                bail!("--statistic coefficients needs --coefficients <file>");
            };
            StatisticSpec::Coefficients(load_coefficients(p, graph)?)
        }
    })
}

fn test(a: TestArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let graph = load_model(&a.graph)?.graph();
    let observations = load_observations(&a.observations, Some(graph.node_count()))?;
    if observations.len() != 1 {
        bail!(
            "{}: expected exactly one configuration, found {}",
            a.observations.display(),
            observations.len()
        );
    }
    let spec = statistic_spec(&a.statistic, &graph)?;
    let report = run_test(&graph, &observations[0], &spec, &a.knobs.options(seed))?;
    writeln!(out, "statistic={}", report.statistic_name)?;
    writeln!(out, "h_hat={}", report.mple.h_hat)?;
    writeln!(out, "theta_hat={}", report.mple.theta_hat)?;
    writeln!(out, "threshold={}", report.threshold_used)?;
    writeln!(out, "gate_rejected={}", report.gate_rejected)?;
    writeln!(out, "observed={}", report.observed_value)?;
    match report.p_value {
        Some(p) => writeln!(out, "p_value={p}")?,
        None => writeln!(out, "p_value=none")?,
    }
    writeln!(out, "null_samples={}", report.null_values.len())?;
    writeln!(out, "verdict={}", key_value_verdict(&report))?;
    if let Some(note) = &report.note {
        writeln!(out, "note={note}")?;
    }
    if let Some(p) = &a.record {
        write_records(&[&report], p)?;
    }
    Ok(())
}

fn key_value_verdict(report: &ising_hightemp::testing::TestReport) -> &'static str {
    match report.verdict {
        ising_hightemp::testing::Verdict::Reject => "reject",
        ising_hightemp::testing::Verdict::Retain => "retain",
    }
}

fn power(a: PowerArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let graph = ising_hightemp::Graph::grid(a.width, a.height);
    let spec = statistic_spec(&a.statistic, &graph)?;
    let rows = power_curve(a.width, a.height, &a.taus, a.reps, &spec, &a.knobs.options(seed))?;
    write_csv_to(&rows, out)?;
    Ok(())
}

fn tails(a: TailsArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let model = load_model(&a.model)?;
    let f = load_coefficients(&a.coefficients, &model.graph())?;
    let schedule = mixing_schedule(&model, a.mix_multiplier)?;
    let report = tail_report(&model, &f, &a.radii, &TailOptions::new(a.replicas, schedule, seed))?;
    log::info!(
        "center {} ({})",
        report.center,
        if report.center_is_exact { "exact" } else { "estimated" }
    );
    write_csv_to(&report.rows, out)?;
    Ok(())
}

fn check(a: CheckArgs, out: &mut dyn Write) -> Result<()> {
    let model = load_model(&a.model)?;
    let report = model.dobrushin_slack();
    writeln!(out, "nodes={}", model.node_count())?;
    writeln!(out, "edges={}", model.edge_count())?;
    writeln!(out, "max_influence={}", report.max_influence())?;
    writeln!(out, "slack={}", report.slack)?;
    writeln!(out, "worst_node={}", report.worst_node)?;
    writeln!(out, "high_temperature={}", report.is_high_temperature())?;
    if let Some(p) = &a.record {
        write_records(&[&report], p)?;
    }
    Ok(())
}
