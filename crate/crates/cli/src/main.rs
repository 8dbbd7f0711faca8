//! `gdev` — command-line laboratory for subgraph-count deviations in the
//! Erdős–Rényi models `G(n,m)` and `G(n,p)`.
//!
//! Every invocation emits a JSON envelope `{schema_version, manifest, result}`
//! (or CSV with an embedded manifest hash). The `result` section depends only
//! on the manifest hash (timestamps and runtime live in the manifest), so
//! re-running a command reproduces it byte for byte regardless of `--threads`.
//!
//! Exit codes: 0 success, 2 validation error, 3 resource limit.

mod output;

use clap::{Args, Parser, Subcommand};
use gdev_core::bounds;
use gdev_core::covariance::{cond_cov_exact, v_surrogate, w_correction, CovConfig};
use gdev_core::gnp;
use gdev_core::graph::{GraphState, Pattern};
use gdev_core::martingale::{
    lambda_combination, lambda_star_accumulate, trace_summary, verify_decomposition,
    write_trace_csv, LatticeTrace, WedgeTriangleTrace,
};
use gdev_core::montecarlo::{
    empirical_distribution, estimate_tail, gamma_rate, rate_prediction, TailConfig, TailDirection,
};
use gdev_core::{Error as CoreError, Exact};
use output::{emit_csv, emit_json, envelope, ManifestBuilder};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gdev",
    version,
    about = "Subgraph-count deviation laboratory for G(n,m) and G(n,p)"
)]
struct Cli {
    /// TOML config file with optional `seed` and `threads` keys
    /// (precedence: flags > config file > GDEV_* environment)
    #[arg(long, global = true)]
    config: Option<String>,
    /// Worker threads (0 = all logical cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the primary output to this path instead of stdout
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded trajectory and summarise its deviation statistics
    Simulate(SimulateArgs),
    /// Exact identity checks (zero-tolerance rational arithmetic)
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Exact conditional covariances along a trajectory, with surrogates (CSV)
    Covariance(CovarianceArgs),
    /// Concentration-inequality evaluators
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// G(n,p) analytics: binomial tails and moderate-deviation rates
    #[command(subcommand)]
    Gnp(GnpCmd),
    /// Seeded parallel Monte Carlo over G(n,m)
    #[command(subcommand)]
    Mc(McCmd),
    /// Rate-function predictions for deviation events in G(n,m)
    Rates(RatesArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    /// Edge density t in (0,1); the prefix length is floor(t N)
    #[arg(long, conflicts_with = "m")]
    t: Option<f64>,
    /// Explicit prefix length (alternative to --t)
    #[arg(long)]
    m: Option<usize>,
    /// Built-in name (edge|wedge|triangle|path3|c4|k4) or `v=..; edges=..`
    #[arg(long, default_value = "triangle")]
    pattern: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Write the per-step lattice trace as CSV to this path
    #[arg(long)]
    trace: Option<String>,
    /// Force the full-lattice trace (default: only when n <= 64)
    #[arg(long)]
    lattice: bool,
    /// Track the exact quadratic variation of the accumulant (lattice mode)
    #[arg(long)]
    variance: bool,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Exact decomposition of D_H(G_m): residual must be literally zero
    Mart(VerifyMartArgs),
    /// Complement identity on random hosts
    Complement(VerifyComplementArgs),
    /// Expected-count increment identity
    Lident(VerifyLidentArgs),
    /// Edge-count conditioning identity by exhaustive enumeration
    Conditioning(VerifyConditioningArgs),
}

#[derive(Args)]
struct VerifyMartArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "triangle")]
    pattern: String,
    /// A prefix length, or `all` for every m in 1..=N
    #[arg(long, default_value = "all")]
    m: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    stream: u64,
}

#[derive(Args)]
struct VerifyComplementArgs {
    /// Host vertex count
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "triangle")]
    pattern: String,
    /// Number of random hosts
    #[arg(long, default_value_t = 10)]
    hosts: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyLidentArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value = "triangle")]
    pattern: String,
    #[arg(long, default_value = "all")]
    m: String,
}

#[derive(Args)]
struct VerifyConditioningArgs {
    /// Host vertex count (exhaustive over all 2^N graphs; capped at 7)
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value = "triangle")]
    pattern: String,
    /// Comma-separated thresholds on D_H(G_p)
    #[arg(long, value_delimiter = ',')]
    thresholds: Vec<f64>,
}

#[derive(Args)]
struct CovarianceArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Number of evenly spaced steps to sample
    #[arg(long, default_value_t = 50)]
    steps: usize,
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Evaluate one bound: `--kind freedman_upper --params alpha=2,beta=1,r=1`
    Eval(BoundsEvalArgs),
}

#[derive(Args)]
struct BoundsEvalArgs {
    /// hoeffding_azuma | psi_lipschitz | freedman_upper | freedman_converse |
    /// hypergeom_upper | hypergeom_lower | upto_form
    #[arg(long)]
    kind: String,
    /// Comma-separated `key=value` pairs; list values use `;` (e.g. c=1;1)
    #[arg(long, default_value = "")]
    params: String,
}

#[derive(Subcommand)]
enum GnpCmd {
    /// Moderate-deviation rate prediction for D_H(G_p) > delta * mean
    Rate(GnpRateArgs),
    /// Binomial tail: exact vs corrective asymptotics
    Tail(GnpTailArgs),
}

#[derive(Args)]
struct GnpRateArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value = "triangle")]
    pattern: String,
    #[arg(long)]
    delta: f64,
    /// auto picks small for delta below n^{-1/2}
    #[arg(long, default_value = "auto")]
    regime: String,
}

#[derive(Args)]
struct GnpTailArgs {
    /// Number of trials
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    p: f64,
    /// Standardised deviation x
    #[arg(long)]
    x: f64,
}

#[derive(Subcommand)]
enum McCmd {
    /// Estimate a deviation-tail probability with a Clopper–Pearson interval
    Tail(McTailArgs),
    /// Sample the joint deviation statistics (CSV by default)
    Dist(McDistArgs),
}

#[derive(Args)]
struct McTailArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value = "wedge")]
    pattern: String,
    /// Deviation threshold in units of n^{v-3/2}
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long, default_value = "upper")]
    direction: String,
}

#[derive(Args)]
struct McDistArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value = "triangle")]
    pattern: String,
    #[arg(long, default_value_t = 1_000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// csv (samples) or json (summary)
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long, default_value = "triangle")]
    pattern: String,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    n: Option<usize>,
    /// Optional deviation size; adds the -gamma alpha^2 prediction
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug)]
enum CliError {
    Core(CoreError),
    Io(std::io::Error),
    Usage(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Core(CoreError::ResourceLimit(_)) => 3,
        _ => 2,
    }
}

#[derive(Default)]
struct FileConfig {
    seed: Option<u64>,
    threads: Option<usize>,
}

fn load_config(path: Option<&str>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)?;
    let value: toml::Value = text
        .parse()
        .map_err(|e| CliError::Usage(format!("bad config {path}: {e}")))?;
    let get_u64 = |key: &str| {
        value
            .get(key)
            .and_then(|v| v.as_integer())
            .map(|v| v as u64)
    };
    Ok(FileConfig {
        seed: get_u64("seed"),
        threads: get_u64("threads").map(|v| v as usize),
    })
}

fn env_u64(key: &str) -> Option<u64> {
    std::env::var(key).ok().and_then(|v| v.parse().ok())
}

/// flags > config file > environment > default
fn resolve_seed(flag: Option<u64>, cfg: &FileConfig) -> u64 {
    flag.or(cfg.seed)
        .or_else(|| env_u64("GDEV_SEED"))
        .unwrap_or(0)
}

fn resolve_threads(flag: Option<usize>, cfg: &FileConfig) -> usize {
    flag.or(cfg.threads)
        .or_else(|| env_u64("GDEV_THREADS").map(|v| v as usize))
        .unwrap_or(0)
}

fn parse_pattern(text: &str) -> Result<Pattern, CliError> {
    Ok(Pattern::parse(text)?)
}

fn parse_direction(text: &str) -> Result<TailDirection, CliError> {
    match text {
        "upper" => Ok(TailDirection::Upper),
        "lower" => Ok(TailDirection::Lower),
        other => Err(CliError::Usage(format!(
            "direction must be upper|lower, got {other}"
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(cli.config.as_deref())?;
    let threads = resolve_threads(cli.threads, &cfg);
    let out = cli.out.as_deref();
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args, &cfg, threads, out),
        Command::Verify(VerifyCmd::Mart(args)) => cmd_verify_mart(args, &cfg, threads, out),
        Command::Verify(VerifyCmd::Complement(args)) => {
            cmd_verify_complement(args, &cfg, threads, out)
        }
        Command::Verify(VerifyCmd::Lident(args)) => cmd_verify_lident(args, threads, out),
        Command::Verify(VerifyCmd::Conditioning(args)) => {
            cmd_verify_conditioning(args, threads, out)
        }
        Command::Covariance(args) => cmd_covariance(args, &cfg, threads, out),
        Command::Bounds(BoundsCmd::Eval(args)) => cmd_bounds(args, threads, out),
        Command::Gnp(GnpCmd::Rate(args)) => cmd_gnp_rate(args, threads, out),
        Command::Gnp(GnpCmd::Tail(args)) => cmd_gnp_tail(args, threads, out),
        Command::Mc(McCmd::Tail(args)) => cmd_mc_tail(args, &cfg, threads, out),
        Command::Mc(McCmd::Dist(args)) => cmd_mc_dist(args, &cfg, threads, out),
        Command::Rates(args) => cmd_rates(args, threads, out),
    }
}

fn prefix_length(n: usize, t: Option<f64>, m: Option<usize>) -> Result<(usize, f64), CliError> {
    let bign = n * (n - 1) / 2;
    match (t, m) {
        (Some(t), None) => {
            if !(0.0 < t && t < 1.0) {
                return Err(CliError::Usage(format!("need t in (0,1), got {t}")));
            }
            let m = (t * bign as f64).floor() as usize;
            Ok((m, m as f64 / bign as f64))
        }
        (None, Some(m)) => {
            if m == 0 || m > bign {
                return Err(CliError::Usage(format!("need 1 <= m <= {bign}, got {m}")));
            }
            Ok((m, m as f64 / bign as f64))
        }
        _ => Err(CliError::Usage(
            "exactly one of --t or --m is required".into(),
        )),
    }
}

fn cmd_simulate(
    args: SimulateArgs,
    cfg: &FileConfig,
    threads: usize,
    out: Option<&str>,
) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, cfg);
    let h = parse_pattern(&args.pattern)?;
    let (m, t_eff) = prefix_length(args.n, args.t, args.m)?;
    let mut mb = ManifestBuilder::new("simulate", seed, threads);
    mb.param("n", args.n)
        .param("m", m)
        .param("pattern", &args.pattern)
        .param("stream", args.stream);
    if let Some(path) = &args.trace {
        mb.output(path);
    }
    let use_lattice = args.lattice || args.n <= 64;
    let result = if use_lattice {
        let trace_cfg = gdev_core::martingale::TraceConfig {
            track_variance: args.variance,
            ..Default::default()
        };
        let trace = LatticeTrace::<f64>::record_with(&h, args.n, seed, args.stream, m, trace_cfg)?;
        if let Some(path) = &args.trace {
            let mut buf = Vec::new();
            write_trace_csv(&trace, &mut buf)?;
            let body = String::from_utf8(buf).expect("csv is utf8");
            emit_csv(&mb.hash(), &body, Some(path))?;
        }
        trace_summary(&trace, t_eff)?
    } else {
        let trace = WedgeTriangleTrace::record(args.n, seed, args.stream, m)?;
        let lambda = lambda_combination(
            &h,
            t_eff,
            args.n,
            trace.d_wedge_final,
            trace.d_triangle_final,
        )?;
        let lambda_star =
            lambda_star_accumulate(&h, t_eff, args.n, &trace.x_wedge, &trace.x_triangle)?;
        if let Some(path) = &args.trace {
            let mut body = String::from("i,x_wedge,x_triangle\n");
            for (i, (xw, xt)) in trace.x_wedge.iter().zip(&trace.x_triangle).enumerate() {
                writeln!(body, "{},{xw},{xt}", i + 1).expect("string write");
            }
            emit_csv(&mb.hash(), &body, Some(path))?;
        }
        serde_json::json!({
            "n": args.n,
            "m": m,
            "t": t_eff,
            "seed": seed,
            "stream": args.stream,
            "rng_family": gdev_core::rng::RNG_FAMILY,
            "d_wedge": trace.d_wedge_final,
            "d_triangle": trace.d_triangle_final,
            "lambda": lambda,
            "lambda_star": lambda_star,
            "mode": "wedge_triangle_only",
        })
    };
    emit_json(&envelope(mb.finish(), &result), out)?;
    Ok(())
}

fn cmd_verify_mart(
    args: VerifyMartArgs,
    cfg: &FileConfig,
    threads: usize,
    out: Option<&str>,
) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, cfg);
    let h = parse_pattern(&args.pattern)?;
    let mut mb = ManifestBuilder::new("verify mart", seed, threads);
    mb.param("n", args.n)
        .param("pattern", &args.pattern)
        .param("m", &args.m)
        .param("stream", args.stream);
    let bign = args.n * (args.n - 1) / 2;
    let targets: Vec<usize> = if args.m == "all" {
        (1..=bign).collect()
    } else {
        let m: usize = args.m.parse().map_err(|_| {
            CliError::Usage(format!("--m must be `all` or an integer, got {}", args.m))
        })?;
        vec![m]
    };
    let deepest = *targets.iter().max().unwrap();
    let trace = LatticeTrace::<Exact>::record(&h, args.n, seed, args.stream, deepest)?;
    let mut worst = Exact::from_integer(0.into());
    let mut all_zero = true;
    for &m in &targets {
        let rep = verify_decomposition(&trace, m)?;
        let mag = if rep.residual < Exact::from_integer(0.into()) {
            -rep.residual.clone()
        } else {
            rep.residual.clone()
        };
        if mag > worst {
            worst = mag;
        }
        all_zero &= rep.residual == Exact::from_integer(0.into());
    }
    let result = serde_json::json!({
        "residual": worst.to_string(),
        "residual_zero": all_zero,
        "checked_prefixes": targets.len(),
    });
    emit_json(&envelope(mb.finish(), &result), out)?;
    if !all_zero {
        return Err(CliError::Core(CoreError::Internal(format!(
            "nonzero decomposition residual {worst}"
        ))));
    }
    Ok(())
}

fn cmd_verify_complement(
    args: VerifyComplementArgs,
    cfg: &FileConfig,
    threads: usize,
    out: Option<&str>,
) -> Result<(), CliError> {
    use gdev_core::graph::{complement_identity_sides, DenseGraph};
    let seed = resolve_seed(args.seed, cfg);
    let h = parse_pattern(&args.pattern)?;
    let mut mb = ManifestBuilder::new("verify complement", seed, threads);
    mb.param("n", args.n)
        .param("pattern", &args.pattern)
        .param("hosts", args.hosts);
    let mut rng = gdev_core::rng::StreamRng::new(seed, 0);
    let total = args.n * (args.n - 1) / 2;
    let mut all_equal = true;
    for _ in 0..args.hosts {
        let m = rng.below(total as u64 + 1) as usize;
        let g = DenseGraph::random_gnm(args.n, m, &mut rng)?;
        let (direct, alternating) = complement_identity_sides(&g, &h)?;
        all_equal &= direct == alternating;
    }
    let result = serde_json::json!({
        "identity_exact": all_equal,
        "hosts": args.hosts,
    });
    emit_json(&envelope(mb.finish(), &result), out)?;
    if !all_equal {
        return Err(CliError::Core(CoreError::Internal(
            "complement identity violated".into(),
        )));
    }
    Ok(())
}

fn cmd_verify_lident(
    args: VerifyLidentArgs,
    threads: usize,
    out: Option<&str>,
) -> Result<(), CliError> {
    let h = parse_pattern(&args.pattern)?;
    let mut mb = ManifestBuilder::new("verify lident", 0, threads);
    mb.param("n", args.n)
        .param("pattern", &args.pattern)
        .param("m", &args.m);
    let bign = args.n * (args.n - 1) / 2;
    let targets: Vec<u64> = if args.m == "all" {
        (1..=bign).collect()
    } else {
        vec![args.m.parse().map_err(|_| {
            CliError::Usage(format!("--m must be `all` or an integer, got {}", args.m))
        })?]
    };
    let mut holds = true;
    for &m in &targets {
        holds &= gdev_core::graph::l_increment_identity_check(&h, args.n, m)?;
    }
    let result = serde_json::json!({"identity_exact": holds, "checked": targets.len()});
    emit_json(&envelope(mb.finish(), &result), out)?;
    if !holds {
        return Err(CliError::Core(CoreError::Internal(
            "increment identity violated".into(),
        )));
    }
    Ok(())
}

fn cmd_verify_conditioning(
    args: VerifyConditioningArgs,
    threads: usize,
    out: Option<&str>,
) -> Result<(), CliError> {
    if args.thresholds.is_empty() {
        return Err(CliError::Usage(
            "need at least one --thresholds value".into(),
        ));
    }
    let h = parse_pattern(&args.pattern)?;
    let mut mb = ManifestBuilder::new("verify conditioning", 0, threads);
    mb.param("n", args.n)
        .param("p", args.p)
        .param("pattern", &args.pattern)
        .param("thresholds", format!("{:?}", args.thresholds));
    let mut checks = Vec::new();
    let mut worst: f64 = 0.0;
    for &threshold in &args.thresholds {
        let rep = gnp::conditioning_identity_check(args.n, args.p, &h, threshold)?;
        worst = worst.max(rep.residual.abs());
        checks.push(serde_json::json!({
            "threshold": threshold,
            "lhs": rep.lhs,
            "rhs": rep.rhs,
            "residual": rep.residual,
        }));
    }
    let result = serde_json::json!({"checks": checks, "max_abs_residual": worst});
    emit_json(&envelope(mb.finish(), &result), out)?;
    Ok(())
}

fn cmd_covariance(
    args: CovarianceArgs,
    cfg: &FileConfig,
    threads: usize,
    out: Option<&str>,
) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, cfg);
    let mut mb = ManifestBuilder::new("covariance", seed, threads);
    mb.param("n", args.n)
        .param("t", args.t)
        .param("steps", args.steps)
        .param("stream", args.stream);
    let bign = args.n * (args.n - 1) / 2;
    let (m, _) = prefix_length(args.n, Some(args.t), None)?;
    let wedge = Pattern::wedge();
    let tri = Pattern::triangle();
    let cov_cfg = CovConfig::default();
    let mut st = GraphState::with_config(
        args.n,
        seed,
        gdev_core::graph::ProcessConfig {
            materialize_codegrees: false,
            stream: args.stream,
        },
    )?;
    let sample_at: Vec<usize> = (1..=args.steps)
        .map(|k| ((k as f64 / args.steps as f64) * m as f64).round() as usize)
        .collect();
    let mut body = String::from(
        "i,s,cov_ww,cov_wt,cov_tt,v_ww,v_wt,v_tt,w_ww,w_wt,w_tt,resid_ww,resid_wt,resid_tt\n",
    );
    let mut next = 0usize;
    for i in 1..=m {
        if next < sample_at.len() && sample_at[next] == i {
            while next < sample_at.len() && sample_at[next] == i {
                next += 1;
            }
            let s = i as f64 / bign as f64;
            let d_wedge = st.wedge_deviation();
            let cww = cond_cov_exact(&wedge, &wedge, &st, cov_cfg)?;
            let cwt = cond_cov_exact(&wedge, &tri, &st, cov_cfg)?;
            let ctt = cond_cov_exact(&tri, &tri, &st, cov_cfg)?;
            let vww = v_surrogate(&wedge, &wedge, i, args.n);
            let vwt = v_surrogate(&wedge, &tri, i, args.n);
            let vtt = v_surrogate(&tri, &tri, i, args.n);
            let www = w_correction(&wedge, &wedge, i, args.n, d_wedge);
            let wwt = w_correction(&wedge, &tri, i, args.n, d_wedge);
            let wtt = w_correction(&tri, &tri, i, args.n, d_wedge);
            writeln!(
                body,
                "{i},{s},{cww},{cwt},{ctt},{vww},{vwt},{vtt},{www},{wwt},{wtt},{},{},{}",
                cww - vww - www,
                cwt - vwt - wwt,
                ctt - vtt - wtt
            )
            .expect("string write");
        }
        st.step()?;
    }
    if let Some(path) = out {
        mb.output(path);
    }
    emit_csv(&mb.hash(), &body, out)?;
    Ok(())
}

fn parse_params(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for field in text.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        let (k, v) = field.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("expected key=value in --params, got `{field}`"))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn need_f64(map: &BTreeMap<String, String>, key: &str) -> Result<f64, CliError> {
    map.get(key)
        .ok_or_else(|| CliError::Usage(format!("missing parameter `{key}`")))?
        .parse()
        .map_err(|_| CliError::Usage(format!("parameter `{key}` is not a number")))
}

fn cmd_bounds(args: BoundsEvalArgs, threads: usize, out: Option<&str>) -> Result<(), CliError> {
    let params = parse_params(&args.params)?;
    let mut mb = ManifestBuilder::new("bounds eval", 0, threads);
    mb.param("kind", &args.kind).param("params", &args.params);
    let mut extra = serde_json::Map::new();
    let value = match args.kind.as_str() {
        "hoeffding_azuma" => {
            let a = need_f64(&params, "a")?;
            let c: Vec<f64> = params
                .get("c")
                .ok_or_else(|| CliError::Usage("missing parameter `c` (use c=1;1)".into()))?
                .split(';')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Usage("bad entry in the c-list".into()))?;
            bounds::hoeffding_azuma(a, &c)?
        }
        "psi_lipschitz" => {
            bounds::psi_lipschitz(need_f64(&params, "a")?, need_f64(&params, "psi_sq")?)?
        }
        "freedman_upper" => bounds::freedman_upper(
            need_f64(&params, "alpha")?,
            need_f64(&params, "beta")?,
            need_f64(&params, "r")?,
        )?,
        "freedman_converse" => {
            let delta_max = params
                .get("delta_max")
                .map(|v| v.parse::<f64>())
                .transpose()
                .map_err(|_| CliError::Usage("bad delta_max".into()))?
                .unwrap_or(bounds::DEFAULT_DELTA_MAX);
            let cf = bounds::freedman_converse(
                need_f64(&params, "alpha")?,
                need_f64(&params, "beta")?,
                need_f64(&params, "r")?,
                delta_max,
            )?;
            extra.insert("delta".into(), serde_json::json!(cf.delta));
            bounds::BoundValue {
                log_bound: cf.log_bound,
                bound: cf.bound,
            }
        }
        "hypergeom_upper" => {
            let side = if params
                .get("sharp")
                .map(|s| s == "1" || s == "true")
                .unwrap_or(false)
            {
                bounds::HyperTailSide::UpperSharp
            } else {
                bounds::HyperTailSide::Upper
            };
            bounds::hypergeometric_tail(need_f64(&params, "mu")?, need_f64(&params, "a")?, side)?
        }
        "hypergeom_lower" => bounds::hypergeometric_tail(
            need_f64(&params, "mu")?,
            need_f64(&params, "a")?,
            bounds::HyperTailSide::Lower,
        )?,
        "upto_form" => bounds::upto_bound(
            need_f64(&params, "alpha")?,
            need_f64(&params, "n")?,
            need_f64(&params, "c")?,
        )?,
        other => {
            return Err(CliError::Usage(format!("unknown bound kind `{other}`")));
        }
    };
    let mut result = serde_json::json!({
        "kind": args.kind,
        "bound": value.bound,
        "log_bound": value.log_bound,
        "params": params,
    });
    if let serde_json::Value::Object(obj) = &mut result {
        obj.extend(extra);
    }
    emit_json(&envelope(mb.finish(), &result), out)?;
    Ok(())
}

fn cmd_gnp_rate(args: GnpRateArgs, threads: usize, out: Option<&str>) -> Result<(), CliError> {
    let h = parse_pattern(&args.pattern)?;
    let mut mb = ManifestBuilder::new("gnp rate", 0, threads);
    mb.param("n", args.n)
        .param("p", args.p)
        .param("pattern", &args.pattern)
        .param("delta", args.delta)
        .param("regime", &args.regime);
    let regime_used = match args.regime.as_str() {
        "auto" => {
            if args.delta < (args.n as f64).powf(-0.5) {
                "small"
            } else {
                "large"
            }
        }
        "small" => "small",
        "large" => "large",
        other => {
            return Err(CliError::Usage(format!(
                "regime must be auto|small|large, got {other}"
            )));
        }
    };
    let diagnostics = gnp::delta_regime(args.n, args.p, &h, args.delta)?;
    let (components, prediction): (serde_json::Value, f64) = match regime_used {
        "small" => {
            let r = gnp::rate_small_delta(args.n, args.p, &h, args.delta)?;
            let log_prob = r.log_prob;
            (serde_json::to_value(r).expect("serialize"), log_prob)
        }
        _ => {
            let r = gnp::rate_larger_delta(args.n, args.p, &h, args.delta)?;
            let log_prob = r.log_prob;
            (serde_json::to_value(r).expect("serialize"), log_prob)
        }
    };
    mb.param("regime_used", regime_used);
    let result = serde_json::json!({
        "regime_used": regime_used,
        "components": components,
        "prediction_log_prob": prediction,
        "regime_diagnostics": diagnostics,
    });
    emit_json(&envelope(mb.finish(), &result), out)?;
    Ok(())
}

fn cmd_gnp_tail(args: GnpTailArgs, threads: usize, out: Option<&str>) -> Result<(), CliError> {
    let mut mb = ManifestBuilder::new("gnp tail", 0, threads);
    mb.param("trials", args.trials)
        .param("p", args.p)
        .param("x", args.x);
    let spec = gnp::BinomialSpec::new(args.trials, args.p)?;
    let asym = gnp::bahadur_tail(&spec, args.x)?;
    let k = (spec.mean() + args.x * spec.sigma()).ceil() as u64;
    let exact_ln = spec.ln_upper_tail(k.min(args.trials))?;
    let result = serde_json::json!({
        "asymptotic": asym,
        "exact_ln_tail_at_ceil": exact_ln,
        "ratio": (asym.ln_tail - exact_ln).exp(),
        "k": k,
    });
    emit_json(&envelope(mb.finish(), &result), out)?;
    Ok(())
}

fn cmd_mc_tail(
    args: McTailArgs,
    cfg: &FileConfig,
    threads: usize,
    out: Option<&str>,
) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, cfg);
    let h = parse_pattern(&args.pattern)?;
    let mut mb = ManifestBuilder::new("mc tail", seed, threads);
    mb.param("n", args.n)
        .param("t", args.t)
        .param("pattern", &args.pattern)
        .param("alpha", args.alpha)
        .param("samples", args.samples)
        .param("direction", &args.direction)
        .param("stream", args.stream);
    let tail_cfg = TailConfig {
        direction: parse_direction(&args.direction)?,
        base_stream: args.stream,
        threads,
        ..TailConfig::new(args.n, args.t, args.alpha, args.samples, seed)
    };
    let estimate = estimate_tail(&h, &tail_cfg)?;
    emit_json(&envelope(mb.finish(), &estimate), out)?;
    Ok(())
}

fn cmd_mc_dist(
    args: McDistArgs,
    cfg: &FileConfig,
    threads: usize,
    out: Option<&str>,
) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, cfg);
    let h = parse_pattern(&args.pattern)?;
    let mut mb = ManifestBuilder::new("mc dist", seed, threads);
    mb.param("n", args.n)
        .param("t", args.t)
        .param("pattern", &args.pattern)
        .param("samples", args.samples)
        .param("format", &args.format)
        .param("stream", args.stream);
    let tail_cfg = TailConfig {
        base_stream: args.stream,
        threads,
        ..TailConfig::new(args.n, args.t, 0.0, args.samples, seed)
    };
    let dist = empirical_distribution(&h, &tail_cfg)?;
    match args.format.as_str() {
        "csv" => {
            let mut body = String::from("replica,d_wedge,d_triangle,lambda,d_h\n");
            for (r, s) in dist.joint.iter().enumerate() {
                writeln!(
                    body,
                    "{r},{},{},{},{}",
                    s.d_wedge, s.d_triangle, s.lambda, s.d_h
                )
                .expect("string write");
            }
            if let Some(path) = out {
                mb.output(path);
            }
            emit_csv(&mb.hash(), &body, out)?;
        }
        "json" => {
            emit_json(&envelope(mb.finish(), &dist), out)?;
        }
        other => {
            return Err(CliError::Usage(format!(
                "format must be json|csv, got {other}"
            )));
        }
    }
    Ok(())
}

fn cmd_rates(args: RatesArgs, threads: usize, out: Option<&str>) -> Result<(), CliError> {
    let h = parse_pattern(&args.pattern)?;
    let mut mb = ManifestBuilder::new("rates", 0, threads);
    mb.param("pattern", &args.pattern).param("t", args.t);
    if let Some(n) = args.n {
        mb.param("n", n);
    }
    if let Some(alpha) = args.alpha {
        mb.param("alpha", alpha);
    }
    let rate = gamma_rate(&h, args.t)?;
    let prediction = match (args.n, args.alpha) {
        (Some(n), Some(alpha)) => Some(rate_prediction(&h, args.t, n, alpha)?),
        _ => None,
    };
    let result = serde_json::json!({
        "rate_function": rate,
        "prediction": prediction,
    });
    emit_json(&envelope(mb.finish(), &result), out)?;
    Ok(())
}
