//! Command-line interface: `simulate`, `fit`, `diagnose`, and `theory`.
//!
//! Every subcommand is a pure function of its arguments, the configuration
//! file bytes, and the seed — running the same invocation twice produces
//! byte-identical output files. Numeric file output carries 17 significant
//! digits; human-facing summaries are rounded to 6.
//!
//! Multiple chains (`fit --chains k`) run concurrently, one RNG stream per
//! chain derived from `(seed, chain index)`; the `EPIMC_THREADS`
//! environment variable caps how many run at once. Each chain writes its
//! own trace file and the per-chain files are merged, in chain order, into
//! the final trace with a leading `chain` column.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{RunConfig, SamplerChoice};
use crate::dataio;
use crate::diagnostics::{summarize, TraceSummary};
use crate::error::{Error, Result};
use crate::likelihood::{SeirParams, SirParams};
use crate::path::InitialState;
use crate::rng::RngStream;
use crate::sampler::{run_benchmark_chain, run_new_chain, ChainTrace, NewSamplerConfig};
use crate::simulate::{gillespie_seir, gillespie_sir, Outbreak};
use crate::theory;

/// Writes a line to stdout; a closed pipe (e.g. `epimc ... | head`) ends
/// the process quietly instead of panicking.
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if writeln!(std::io::stdout().lock(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

/// [`outln!`] without the trailing newline.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let mut stdout = std::io::stdout().lock();
        if write!(stdout, $($arg)*).and_then(|()| stdout.flush()).is_err() {
            std::process::exit(0);
        }
    }};
}

/// Exact-event-time inference for stochastic epidemic models.
#[derive(Parser, Debug)]
#[command(name = "epimc", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate an outbreak and emit its exact event times as CSV.
    Simulate(SimulateArgs),
    /// Run an MCMC fit described by a configuration file.
    Fit(FitArgs),
    /// Summarize a trace file and emit plot-ready tables.
    Diagnose(DiagnoseArgs),
    /// Closed-form, grid, and Monte-Carlo divergence calculations.
    Theory(TheoryArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Model family: sir or seir.
    #[arg(long)]
    model: String,
    /// Total population size.
    #[arg(long = "N")]
    n: u64,
    /// Initially infectious individuals.
    #[arg(long = "I0")]
    i0: u64,
    /// Initially exposed individuals (seir only).
    #[arg(long = "E0", default_value_t = 0)]
    e0: u64,
    /// Initially removed individuals.
    #[arg(long = "R0", default_value_t = 0)]
    r0: u64,
    /// Transmission rate (per-contact, frequency dependent).
    #[arg(long)]
    beta: f64,
    /// Post-change transmission rate (with --change-point).
    #[arg(long)]
    beta2: Option<f64>,
    /// Time at which the transmission rate switches to --beta2.
    #[arg(long = "change-point")]
    change_point: Option<f64>,
    /// Progression rate E -> I (seir only).
    #[arg(long)]
    alpha: Option<f64>,
    /// Removal rate.
    #[arg(long)]
    gamma: f64,
    /// Observation horizon.
    #[arg(long = "T")]
    horizon: f64,
    /// RNG seed (runs are reproducible given the same seed).
    #[arg(long)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Run configuration file (flat key = value format).
    #[arg(long)]
    config: PathBuf,
    /// RNG seed; overrides the config's `seed` key.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of chains; chain k uses RNG stream (seed, k).
    #[arg(long, default_value_t = 1)]
    chains: usize,
    /// Trace output file; overrides the config's `trace` key.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Iteration count override.
    #[arg(long)]
    iters: Option<usize>,
    /// Burn-in override.
    #[arg(long = "burn-in")]
    burn_in: Option<usize>,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    /// Trace CSV produced by `fit`.
    #[arg(long)]
    trace: PathBuf,
    /// Rows discarded before summarizing.
    #[arg(long = "burn-in", default_value_t = 0)]
    burn_in: usize,
    /// Prefix for plot-data CSVs (trace, histogram, autocorrelation per
    /// parameter); no files are written when omitted.
    #[arg(long = "plot-data")]
    plot_data: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    #[command(subcommand)]
    op: TheoryOp,
}

#[derive(Subcommand, Debug)]
enum TheoryOp {
    /// Closed-form squared divergence for a rate-gamma driver.
    Hellinger {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long = "T")]
        horizon: f64,
    },
    /// Monte-Carlo estimate of the same quantity, with standard error.
    Mc {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        beta0: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long = "T")]
        horizon: f64,
        #[arg(long)]
        nsim: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Grid-product expectations of the silence weight and its square root.
    Discrete {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        beta0: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long = "T")]
        horizon: f64,
    },
}

/// Entry point for the `epimc` binary; returns the process exit code.
pub fn cli_main<I>(args: I) -> u8
where
    I: IntoIterator<Item = OsString>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version on stdout (exit 0) and usage
            // errors on stderr (exit 2).
            let _ = e.print();
            return if e.exit_code() == 0 { 0 } else { 2 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Fit(args) => run_fit(args),
        Command::Diagnose(args) => run_diagnose(args),
        Command::Theory(args) => run_theory(args),
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn run_simulate(args: SimulateArgs) -> Result<()> {
    if args.beta2.is_some() != args.change_point.is_some() {
        return Err(Error::invalid("--beta2 and --change-point must be given together"));
    }
    let mut rng = RngStream::new(args.seed, 0);
    let outbreak: Outbreak = match args.model.as_str() {
        "sir" => {
            if args.alpha.is_some() || args.e0 != 0 {
                return Err(Error::invalid("--alpha/--E0 are seir options"));
            }
            if args.beta2.is_some() {
                return Err(Error::invalid(
                    "transmission change points are wired for seir simulation only",
                ));
            }
            let init = InitialState::sir(args.n, args.i0, args.r0)?;
            let p = SirParams::new(args.beta, args.gamma)?;
            gillespie_sir(init, &p, args.horizon, &mut rng)?
        }
        "seir" => {
            let alpha = args
                .alpha
                .ok_or_else(|| Error::invalid("seir simulation needs --alpha"))?;
            let init = InitialState::seir(args.n, args.e0, args.i0, args.r0)?;
            let beta_change = match (args.beta2, args.change_point) {
                (Some(b2), Some(cp)) => Some((b2, cp)),
                _ => None,
            };
            let p = SeirParams::new(args.beta, beta_change, alpha, args.gamma)?;
            gillespie_seir(init, &p, args.horizon, &mut rng)?
        }
        other => return Err(Error::invalid(format!("unknown model {other:?}"))),
    };
    let counts = match &outbreak.z {
        Some(z) => format!(
            "simulated {} infections, {} progressions, {} removals",
            outbreak.x.len(),
            outbreak.y.len(),
            z.len()
        ),
        None => format!(
            "simulated {} infections, {} removals",
            outbreak.x.len(),
            outbreak.y.len()
        ),
    };
    eprintln!("{counts}");
    match args.out {
        Some(path) => {
            ensure_parent(&path)?;
            dataio::write_events(&path, &outbreak)
        }
        None => {
            out!("{}", dataio::events_to_csv(&outbreak)?);
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

fn run_fit(args: FitArgs) -> Result<()> {
    let mut cfg = RunConfig::from_file(&args.config)?;
    if let Some(iters) = args.iters {
        cfg.iters = iters;
    }
    if let Some(burn_in) = args.burn_in {
        cfg.burn_in = burn_in;
    }
    if cfg.iters == 0 || cfg.burn_in >= cfg.iters {
        return Err(Error::invalid(format!(
            "need burn_in < iters, got {} >= {}",
            cfg.burn_in, cfg.iters
        )));
    }
    let seed = args
        .seed
        .or(cfg.seed)
        .ok_or_else(|| Error::invalid("a seed is required (config key seed or --seed)"))?;
    if args.chains == 0 {
        return Err(Error::invalid("--chains must be at least 1"));
    }
    let trace_path = args.trace.unwrap_or_else(|| cfg.trace.clone());

    let model_cfg = cfg.model_config();
    let (obs, warnings) = cfg.load_observation()?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let traces = run_chains(&cfg, &model_cfg, &obs, seed, args.chains)?;

    ensure_parent(&trace_path)?;
    if traces.len() == 1 {
        dataio::write_trace(&trace_path, &traces[0])?;
    } else {
        merge_chain_traces(&trace_path, &traces)?;
    }
    outln!("wrote {} ({} chains x {} iterations)", trace_path.display(), traces.len(), cfg.iters);
    for (i, trace) in traces.iter().enumerate() {
        let summary = summarize(trace, cfg.burn_in)?;
        outln!("\nchain {i} (post burn-in):");
        print_summary(&summary);
    }
    Ok(())
}

/// Runs `chains` chains concurrently (capped by `EPIMC_THREADS`, default
/// the machine's parallelism), chain `k` on RNG stream `(seed, k)`.
fn run_chains(
    cfg: &RunConfig,
    model_cfg: &crate::sampler::ModelConfig,
    obs: &crate::sampler::Observation,
    seed: u64,
    chains: usize,
) -> Result<Vec<ChainTrace>> {
    let cap = thread_cap()?.min(chains).max(1);
    let run_one = |chain: usize| -> Result<ChainTrace> {
        let mut rng = RngStream::new(seed, chain as u64);
        match cfg.sampler {
            SamplerChoice::Benchmark => run_benchmark_chain(model_cfg, obs, cfg.iters, &mut rng),
            SamplerChoice::New => {
                let ncfg = NewSamplerConfig {
                    update_fraction: cfg.update_fraction,
                    targets: None,
                    iters: cfg.iters,
                    burn_in: cfg.burn_in,
                    tune_target: cfg.tune_target,
                };
                run_new_chain(model_cfg, obs, &ncfg, &mut rng)
            }
        }
    };
    if cap == 1 {
        return (0..chains).map(run_one).collect();
    }
    let mut results: Vec<Option<Result<ChainTrace>>> = (0..chains).map(|_| None).collect();
    for wave in (0..chains).collect::<Vec<_>>().chunks(cap) {
        std::thread::scope(|scope| {
            let mut handles = Vec::with_capacity(wave.len());
            for &chain in wave {
                handles.push((chain, scope.spawn(move || run_one(chain))));
            }
            for (chain, handle) in handles {
                let out = handle
                    .join()
                    .unwrap_or_else(|_| Err(Error::invalid(format!("chain {chain} panicked"))));
                results[chain] = Some(out);
            }
        });
    }
    results
        .into_iter()
        .map(|r| r.expect("every chain scheduled"))
        .collect()
}

/// Largest number of chains allowed to run at once.
fn thread_cap() -> Result<usize> {
    match std::env::var("EPIMC_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| {
                Error::invalid(format!("EPIMC_THREADS must be a positive integer, got {v:?}"))
            })?;
            if n == 0 {
                return Err(Error::invalid("EPIMC_THREADS must be at least 1"));
            }
            Ok(n)
        }
        Err(std::env::VarError::NotPresent) => Ok(std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)),
        Err(e) => Err(Error::invalid(format!("EPIMC_THREADS: {e}"))),
    }
}

/// Writes each chain to `<path>.chain<k>`, then merges them in chain order
/// into `path` with a leading `chain` column and removes the per-chain
/// files.
fn merge_chain_traces(path: &Path, traces: &[ChainTrace]) -> Result<()> {
    let mut chain_files = Vec::with_capacity(traces.len());
    for (i, trace) in traces.iter().enumerate() {
        let mut name = path.as_os_str().to_owned();
        name.push(format!(".chain{i}"));
        let chain_path = PathBuf::from(name);
        dataio::write_trace(&chain_path, trace)?;
        chain_files.push(chain_path);
    }
    let mut merged = String::new();
    for (i, chain_path) in chain_files.iter().enumerate() {
        let text = std::fs::read_to_string(chain_path)
            .map_err(|e| Error::io(format!("reading {}", chain_path.display()), e))?;
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if i == 0 {
            merged.push_str("chain,");
            merged.push_str(header);
            merged.push('\n');
        }
        for line in lines {
            merged.push_str(&i.to_string());
            merged.push(',');
            merged.push_str(line);
            merged.push('\n');
        }
    }
    std::fs::write(path, merged).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    for chain_path in chain_files {
        let _ = std::fs::remove_file(chain_path);
    }
    Ok(())
}

fn print_summary(summary: &TraceSummary) {
    outln!(
        "{:<12} {:>13} {:>13} {:>13} {:>13} {:>13} {:>10}",
        "parameter", "mean", "variance", "q2.5", "median", "q97.5", "ess"
    );
    for (name, s) in &summary.parameters {
        outln!(
            "{:<12} {:>13} {:>13} {:>13} {:>13} {:>13} {:>10.1}",
            name,
            sig6(s.mean),
            sig6(s.variance),
            sig6(s.quantiles[0]),
            sig6(s.quantiles[1]),
            sig6(s.quantiles[2]),
            s.ess,
        );
    }
    if !summary.acceptance_rates.is_empty() {
        let rates: Vec<String> = summary
            .acceptance_rates
            .iter()
            .map(|(name, r)| format!("{name} {r:.3}"))
            .collect();
        outln!("acceptance: {}", rates.join(", "));
    }
}

/// Six significant figures, plain decimal where that stays compact.
fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-4..1e7).contains(&a) {
        let digits = (a.log10().floor() as i32).max(-4);
        let decimals = (5 - digits).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}

// ---------------------------------------------------------------------------
// diagnose
// ---------------------------------------------------------------------------

fn run_diagnose(args: DiagnoseArgs) -> Result<()> {
    let trace = dataio::read_trace(&args.trace)?;
    let summary = summarize(&trace, args.burn_in)?;
    outln!(
        "{} rows, {} after burn-in:",
        trace.len(),
        trace.len() - args.burn_in
    );
    print_summary(&summary);
    if let Some(prefix) = args.plot_data {
        write_plot_data(&prefix, &trace, args.burn_in, &summary)?;
    }
    Ok(())
}

/// Emits plot-ready tables per parameter: the post-burn-in series, a
/// 40-bin histogram, and autocorrelations to lag 50.
fn write_plot_data(
    prefix: &Path,
    trace: &ChainTrace,
    burn_in: usize,
    summary: &TraceSummary,
) -> Result<()> {
    ensure_parent(prefix)?;
    let stem = prefix.as_os_str().to_owned();
    let file = |suffix: String| -> PathBuf {
        let mut name = stem.clone();
        name.push(suffix);
        PathBuf::from(name)
    };
    for (name, _) in &summary.parameters {
        let col = trace
            .column(name)
            .ok_or_else(|| Error::invalid(format!("column {name} vanished")))?;
        let series = &col[burn_in..];

        let mut out = String::from("iteration,value\n");
        for (i, v) in series.iter().enumerate() {
            out.push_str(&format!(
                "{},{}\n",
                burn_in + i + 1,
                dataio::format_full(*v)
            ));
        }
        write_file(&file(format!("_trace_{name}.csv")), &out)?;

        let (lo, hi) = series
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let mut out = String::from("bin_left,bin_right,count\n");
        if lo == hi {
            out.push_str(&format!(
                "{},{},{}\n",
                dataio::format_full(lo),
                dataio::format_full(hi),
                series.len()
            ));
        } else {
            const BINS: usize = 40;
            let width = (hi - lo) / BINS as f64;
            let mut counts = [0u64; BINS];
            for &v in series {
                let idx = (((v - lo) / width) as usize).min(BINS - 1);
                counts[idx] += 1;
            }
            for (b, count) in counts.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{count}\n",
                    dataio::format_full(lo + b as f64 * width),
                    dataio::format_full(lo + (b + 1) as f64 * width),
                ));
            }
        }
        write_file(&file(format!("_hist_{name}.csv")), &out)?;

        let mut out = String::from("lag,autocorrelation\n");
        for (lag, rho) in autocorrelations(series, 50).into_iter().enumerate() {
            out.push_str(&format!("{lag},{}\n", dataio::format_full(rho)));
        }
        write_file(&file(format!("_acf_{name}.csv")), &out)?;
    }
    Ok(())
}

/// Sample autocorrelations at lags `0..=max_lag` (clipped to the series
/// length); a constant series reports 1 at lag 0 and 0 beyond.
fn autocorrelations(series: &[f64], max_lag: usize) -> Vec<f64> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let denom: f64 = series.iter().map(|v| (v - mean).powi(2)).sum();
    let max_lag = max_lag.min(n.saturating_sub(1));
    (0..=max_lag)
        .map(|lag| {
            if denom == 0.0 {
                return if lag == 0 { 1.0 } else { 0.0 };
            }
            let num: f64 = (0..n - lag)
                .map(|i| (series[i] - mean) * (series[i + lag] - mean))
                .sum();
            num / denom
        })
        .collect()
}

// ---------------------------------------------------------------------------
// theory
// ---------------------------------------------------------------------------

fn run_theory(args: TheoryArgs) -> Result<()> {
    match args.op {
        TheoryOp::Hellinger { gamma, eps, horizon } => {
            let h2 = theory::hellinger_exact(gamma, eps, horizon)?;
            outln!("{}", sig6(h2));
        }
        TheoryOp::Mc { gamma, beta0, eps, horizon, nsim, seed } => {
            let mut rng = RngStream::new(seed, 0);
            let (estimate, se) = theory::hellinger_mc(gamma, beta0, eps, horizon, nsim, &mut rng)?;
            outln!("estimate = {}", sig6(estimate));
            outln!("se = {}", sig6(se));
        }
        TheoryOp::Discrete { n, gamma, beta0, eps, horizon } => {
            let d = theory::discrete_expectation(n, gamma, beta0, eps, horizon)?;
            if d.step_warning {
                eprintln!(
                    "warning: gamma * T / n >= 1; the grid is too coarse for a \
                     probabilistic reading — increase --n"
                );
            }
            outln!("e_f = {}", sig6(d.e_f));
            outln!("e_sqrt_f = {}", sig6(d.e_sqrt_f));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
        }
    }
    Ok(())
}
