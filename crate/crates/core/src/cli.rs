//! Command-line front end behind the `rtp` binary.
//!
//! Every subcommand takes its parameters as flags. `--config FILE` reads the
//! same flags from a `flag = value` file (command-line flags win), and
//! `--dump-config FILE` writes the resolved parameters in that format.
//! Numeric flags accept decimals or fractions such as `1/3`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::higher::{pool_stats, solve_hl_rde, HlSummary};
use crate::meanfield::{default_dt, solve_ode};
use crate::model::{Dist, MapFamily, Preset, StructuredFamily};
use crate::particle::{run, run_coupled, CoupledStates, RunManifest, SystemState};
use crate::tree::{duality_scan, mc_estimate_tt_with, uniqueness_scan_with, DEFAULT_NODE_BUDGET};
use crate::variate::{bivariate_ode, PrPoint};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Parses a decimal or a fraction `a/b`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("`{s}` is not a number or fraction"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("`{s}` is not a number or fraction"))?;
            if b == 0.0 {
                return Err(format!("`{s}` divides by zero"));
            }
            a / b
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number or fraction"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// Comma-separated list of numbers or fractions, given as one flag value.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NumList(pub Vec<f64>);

/// Parses a comma-separated list of numbers or fractions.
pub fn parse_list(s: &str) -> Result<NumList, String> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(parse_number).collect::<Result<_, _>>().map(NumList)
}

#[derive(Parser, Debug)]
#[command(name = "rtp", version, about = "Mean-field experiments for recursive tree processes")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Integrate the mean-field equation.
    Meanfield(MeanfieldArgs),
    /// Integrate the (p, r) system of the bivariate equation for cooperative branching.
    Bivariate(BivariateArgs),
    /// Monte Carlo estimate of T_t(mu0) from sampled trees.
    TreeEstimate(TreeEstimateArgs),
    /// Fraction of trees whose root value does not depend on the boundary.
    UniquenessScan(ScanArgs),
    /// Population dynamics for the higher-level equation of cooperative branching.
    Hlrde(HlrdeArgs),
    /// Finite-N particle system on the complete graph.
    Particle(ParticleArgs),
    /// Two particle systems driven by one stochastic flow.
    Coupled(CoupledArgs),
    /// Open-subtree estimates of the upper and lower solutions.
    Duality(ScanArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Meanfield(_) => "meanfield",
            Command::Bivariate(_) => "bivariate",
            Command::TreeEstimate(_) => "tree-estimate",
            Command::UniquenessScan(_) => "uniqueness-scan",
            Command::Hlrde(_) => "hlrde",
            Command::Particle(_) => "particle",
            Command::Coupled(_) => "coupled",
            Command::Duality(_) => "duality",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    Coop,
    CoopBirth,
    Moran,
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    #[arg(long, value_enum, default_value = "coop")]
    pub preset: PresetName,
    /// Rate of cooperative branching.
    #[arg(long, default_value = "4.5", value_parser = parse_number)]
    pub alpha: f64,
    /// Rate of births (coop-birth).
    #[arg(long, default_value = "0", value_parser = parse_number)]
    pub beta: f64,
    #[arg(long, default_value = "1", value_parser = parse_number)]
    pub gamma: f64,
    #[arg(long, default_value = "0", value_parser = parse_number)]
    pub s: f64,
    #[arg(long, default_value = "1", value_parser = parse_number)]
    pub u: f64,
    #[arg(long, default_value = "1/2", value_parser = parse_number)]
    pub nu0: f64,
    #[arg(long, default_value = "1/2", value_parser = parse_number)]
    pub nu1: f64,
    /// Family file (`states`, `order`, `map` and `entry` lines); overrides the preset.
    #[arg(long)]
    pub family: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CommonArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Main output file (CSV).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the resolved parameters to this file (`-` for stdout).
    #[arg(long)]
    #[serde(skip)]
    pub dump_config: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct InitArgs {
    /// Initial probability of state 1 (two-state families).
    #[arg(long, value_parser = parse_number)]
    pub p0: Option<f64>,
    /// Initial law as comma-separated weights; overrides --p0.
    #[arg(long, value_parser = parse_list)]
    pub mu0: Option<NumList>,
}

#[derive(Args, Debug, Serialize)]
pub struct MeanfieldArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub init: InitArgs,
    #[arg(long, value_parser = parse_number)]
    pub t: f64,
    #[arg(long, value_parser = parse_number)]
    pub dt: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct BivariateArgs {
    #[arg(long, default_value = "4.5", value_parser = parse_number)]
    pub alpha: f64,
    #[arg(long, value_parser = parse_number)]
    pub p0: f64,
    #[arg(long, value_parser = parse_number)]
    pub r0: f64,
    #[arg(long, value_parser = parse_number)]
    pub t: f64,
    #[arg(long, default_value = "1/100", value_parser = parse_number)]
    pub dt: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct TreeEstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub init: InitArgs,
    #[arg(long, value_parser = parse_number)]
    pub t: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Largest number of tree nodes sampled per tree.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    /// Increasing comma-separated horizons.
    #[arg(long, value_parser = parse_list)]
    pub times: NumList,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct HlrdeArgs {
    /// Only cooperative branching is supported.
    #[arg(long, value_enum, default_value = "coop")]
    pub preset: PresetName,
    #[arg(long, default_value = "4.5", value_parser = parse_number)]
    pub alpha: f64,
    /// Pool size M.
    #[arg(long, default_value_t = 200_000)]
    pub pool: usize,
    #[arg(long, default_value_t = 300)]
    pub sweeps: usize,
    /// Also write the summary JSON here.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct ParticleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub init: InitArgs,
    /// Number of sites N.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    /// Rescaled end time.
    #[arg(long, value_parser = parse_number)]
    pub t: f64,
    /// Rescaled checkpoint times; 20 equal steps up to --t by default.
    #[arg(long, value_parser = parse_list)]
    pub checkpoints: Option<NumList>,
    /// Run manifest (JSON).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct CoupledArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: ParticleArgs,
    /// Probability of state 1 in the second replica; defaults to --p0.
    #[arg(long, value_parser = parse_number)]
    pub p1: Option<f64>,
}

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag or config value (exit code 2).
    Config { flag: String, message: String },
    /// The experiment itself failed (exit code 1).
    Runtime(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config { flag, message } => write!(f, "config error in {flag}: {message}"),
            CliError::Runtime(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

fn bad(flag: &str, e: impl ToString) -> CliError {
    CliError::Config { flag: flag.to_string(), message: e.to_string() }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn build_family(args: &FamilyArgs) -> CliResult<MapFamily> {
    if let Some(path) = &args.family {
        let text = std::fs::read_to_string(path).map_err(|e| bad("--family", format!("{}: {e}", path.display())))?;
        return MapFamily::from_config(&text).map_err(|e| bad("--family", e));
    }
    let preset = match args.preset {
        PresetName::Coop => Preset::Coop { alpha: args.alpha },
        PresetName::CoopBirth => Preset::CoopBirth { alpha: args.alpha, beta: args.beta },
        PresetName::Moran => Preset::Moran { gamma: args.gamma, s: args.s, u: args.u, nu0: args.nu0, nu1: args.nu1 },
    };
    MapFamily::preset(preset).map_err(|e| bad("--preset", e))
}

fn build_init(args: &InitArgs, n_states: usize) -> CliResult<Dist> {
    let mu = match (&args.mu0, args.p0) {
        (Some(w), _) => Dist::new(w.0.clone()).map_err(|e| bad("--mu0", e))?,
        (None, Some(p)) => Dist::bernoulli(p).map_err(|e| bad("--p0", e))?,
        (None, None) => return Err(bad("--p0", "one of --p0 or --mu0 is required")),
    };
    if mu.len() != n_states {
        let flag = if args.mu0.is_some() { "--mu0" } else { "--p0" };
        return Err(bad(flag, format!("initial law has {} states, family has {n_states}", mu.len())));
    }
    Ok(mu)
}

fn check_time(flag: &str, t: f64) -> CliResult<()> {
    if t < 0.0 {
        return Err(bad(flag, format!("must be >= 0, got {t}")));
    }
    Ok(())
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Runtime(Error::Io(format!("{}: {e}", path.display()))))
}

fn g(x: f64) -> String {
    format!("{x:.8}")
}

/// Resolved parameters as `flag = value` lines, starting with `command = …`.
pub fn dump_config(command: &Command) -> String {
    let value = serde_json::to_value(command).expect("arguments serialize");
    let (name, fields) = value
        .as_object()
        .and_then(|o| o.iter().next())
        .map(|(k, v)| (k.clone(), v.clone()))
        .expect("externally tagged enum");
    let mut out = format!("command = {name}\n");
    if let Some(map) = fields.as_object() {
        for (key, v) in map {
            let flag = key.replace('_', "-");
            let text = match v {
                serde_json::Value::Null => continue,
                serde_json::Value::Bool(false) => continue,
                serde_json::Value::Bool(true) => "true".to_string(),
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => match n.as_f64() {
                    Some(x) if n.is_f64() => format!("{x:e}"),
                    _ => n.to_string(),
                },
                serde_json::Value::Array(items) => items
                    .iter()
                    .map(|i| i.as_f64().map(|x| format!("{x:e}")).unwrap_or_else(|| i.to_string()))
                    .collect::<Vec<_>>()
                    .join(","),
                serde_json::Value::Object(_) => continue,
            };
            writeln!(out, "{flag} = {text}").unwrap();
        }
    }
    out
}

// Turns a config file into command-line tokens: `command = X` becomes the
// subcommand, every other `key = value` line becomes `--key value`.
fn config_tokens(text: &str) -> CliResult<(Option<String>, Vec<String>)> {
    let mut command = None;
    let mut tokens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad("--config", format!("line {}: expected `key = value`", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "command" {
            command = Some(value.to_string());
        } else if value == "true" {
            tokens.push(format!("--{key}"));
        } else {
            tokens.push(format!("--{key}"));
            tokens.push(value.to_string());
        }
    }
    Ok((command, tokens))
}

// Expands `--config FILE`: the file's flags go right after the subcommand so
// that flags given on the command line take precedence.
fn expand_config(argv: Vec<String>) -> CliResult<Vec<String>> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let mut argv = argv;
    let path = if let Some(p) = argv[pos].strip_prefix("--config=") {
        let p = p.to_string();
        argv.remove(pos);
        p
    } else {
        if pos + 1 >= argv.len() {
            return Err(bad("--config", "missing file name"));
        }
        let p = argv.remove(pos + 1);
        argv.remove(pos);
        p
    };
    let text = std::fs::read_to_string(&path).map_err(|e| bad("--config", format!("{path}: {e}")))?;
    let (command, tokens) = config_tokens(&text)?;
    let program = argv.first().cloned().unwrap_or_else(|| "rtp".into());
    let rest: Vec<String> = argv.into_iter().skip(1).collect();
    let (sub, rest) = match rest.first() {
        Some(first) if !first.starts_with('-') => (first.clone(), rest[1..].to_vec()),
        _ => (command.ok_or_else(|| bad("--config", "no subcommand given and no `command` line in the file"))?, rest),
    };
    let mut out = vec![program, sub];
    out.extend(tokens);
    out.extend(rest);
    Ok(out)
}

/// Runs one command and returns its one-line summary.
pub fn execute(command: &Command) -> CliResult<String> {
    match command {
        Command::Meanfield(a) => meanfield(a),
        Command::Bivariate(a) => bivariate(a),
        Command::TreeEstimate(a) => tree_estimate(a),
        Command::UniquenessScan(a) => uniqueness(a),
        Command::Hlrde(a) => hlrde(a),
        Command::Particle(a) => particle(a),
        Command::Coupled(a) => coupled(a),
        Command::Duality(a) => duality(a),
    }
}

fn common_of(command: &Command) -> &CommonArgs {
    match command {
        Command::Meanfield(a) => &a.common,
        Command::Bivariate(a) => &a.common,
        Command::TreeEstimate(a) => &a.common,
        Command::UniquenessScan(a) | Command::Duality(a) => &a.common,
        Command::Hlrde(a) => &a.common,
        Command::Particle(a) => &a.common,
        Command::Coupled(a) => &a.run.common,
    }
}

fn meanfield(a: &MeanfieldArgs) -> CliResult<String> {
    let family = build_family(&a.family)?;
    let mu0 = build_init(&a.init, family.space().size())?;
    check_time("--t", a.t)?;
    let dt = a.dt.unwrap_or_else(|| default_dt(&family));
    if !(dt > 0.0) {
        return Err(bad("--dt", "must be > 0"));
    }
    let traj = solve_ode(&family, &mu0, a.t, dt)?;
    if let Some(path) = &a.common.out {
        traj.write_csv(create(path)?)?;
    }
    let last = traj.last();
    Ok(if last.len() == 2 {
        format!("t={} p={}", g(a.t), g(last.prob(1)))
    } else {
        let w: Vec<String> = last.weights().iter().map(|&x| g(x)).collect();
        format!("t={} mu=[{}]", g(a.t), w.join(","))
    })
}

fn bivariate(a: &BivariateArgs) -> CliResult<String> {
    let start = PrPoint::new(a.p0, a.r0).map_err(|e| bad("--r0", e))?;
    check_time("--t", a.t)?;
    if !(a.dt > 0.0) {
        return Err(bad("--dt", "must be > 0"));
    }
    let traj = bivariate_ode(a.alpha, start, a.t, a.dt)?;
    if let Some(path) = &a.common.out {
        traj.write_csv(create(path)?)?;
    }
    let end = traj.last();
    Ok(format!("t={} p={} r={}", g(a.t), g(end.p), g(end.r)))
}

fn tree_estimate(a: &TreeEstimateArgs) -> CliResult<String> {
    let family = build_family(&a.family)?;
    let mu0 = build_init(&a.init, family.space().size())?;
    check_time("--t", a.t)?;
    if a.samples == 0 {
        return Err(bad("--samples", "must be positive"));
    }
    let est = mc_estimate_tt_with(&family, &mu0, a.t, a.samples, a.common.seed, a.budget)?;
    if let Some(path) = &a.common.out {
        est.write_csv(create(path)?)?;
    }
    Ok(if est.dist.len() == 2 {
        format!("t={} p={}±{} samples={}", g(a.t), g(est.dist.prob(1)), g(est.stderr[1]), est.n_samples)
    } else {
        let w: Vec<String> = est.dist.weights().iter().zip(&est.stderr).map(|(p, s)| format!("{}±{}", g(*p), g(*s))).collect();
        format!("t={} mu=[{}] samples={}", g(a.t), w.join(","), est.n_samples)
    })
}

fn check_scan(a: &ScanArgs) -> CliResult<()> {
    if a.times.0.is_empty() {
        return Err(bad("--times", "at least one horizon is required"));
    }
    if a.times.0.iter().any(|&t| t < 0.0) || a.times.0.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("--times", "horizons must be >= 0 and increasing"));
    }
    if a.samples == 0 {
        return Err(bad("--samples", "must be positive"));
    }
    Ok(())
}

fn uniqueness(a: &ScanArgs) -> CliResult<String> {
    let family = build_family(&a.family)?;
    check_scan(a)?;
    let scan = uniqueness_scan_with(&family, &a.times.0, a.samples, a.common.seed, a.budget)?;
    if let Some(path) = &a.common.out {
        let mut w = create(path)?;
        std::io::Write::write_all(&mut w, b"t,fraction,stderr\n").map_err(Error::from)?;
        for pt in &scan {
            std::io::Write::write_all(
                &mut w,
                format!("{},{},{}\n", crate::io::fmt17(pt.t), crate::io::fmt17(pt.fraction), crate::io::fmt17(pt.stderr))
                    .as_bytes(),
            )
            .map_err(Error::from)?;
        }
    }
    let last = scan.last().expect("non-empty grid");
    Ok(format!("t={} constant_fraction={}±{}", g(last.t), g(last.fraction), g(last.stderr)))
}

fn duality(a: &ScanArgs) -> CliResult<String> {
    let family = build_family(&a.family)?;
    check_scan(a)?;
    let scan = duality_scan(&family, &a.times.0, a.samples, a.common.seed)?;
    if let Some(path) = &a.common.out {
        let mut w = create(path)?;
        let f = crate::io::fmt17;
        let mut text = String::from("t,upper,upper_se,lower,lower_se\n");
        for d in &scan {
            writeln!(text, "{},{},{},{},{}", f(d.t), f(d.upper), f(d.upper_se), f(d.lower), f(d.lower_se)).unwrap();
        }
        std::io::Write::write_all(&mut w, text.as_bytes()).map_err(Error::from)?;
    }
    let last = scan.last().expect("non-empty grid");
    Ok(format!(
        "t={} upper={}±{} lower={}±{}",
        g(last.t),
        g(last.upper),
        g(last.upper_se),
        g(last.lower),
        g(last.lower_se)
    ))
}

fn hlrde(a: &HlrdeArgs) -> CliResult<String> {
    if a.preset != PresetName::Coop {
        return Err(bad("--preset", "the higher-level solver supports only coop"));
    }
    if !(a.alpha > 4.0) {
        return Err(bad("--alpha", format!("needs alpha > 4, got {}", a.alpha)));
    }
    if a.pool < 10_000 {
        return Err(bad("--pool", format!("needs at least 10000 samples, got {}", a.pool)));
    }
    let solution = solve_hl_rde(a.alpha, a.pool, a.sweeps, a.common.seed)?;
    let stats = pool_stats(&solution.pool);
    if let Some(path) = &a.common.out {
        stats.write_cdf_csv(create(path)?)?;
    }
    if let Some(path) = &a.summary {
        let mut w = create(path)?;
        std::io::Write::write_all(&mut w, HlSummary::new(&solution, &stats).to_json().as_bytes()).map_err(Error::from)?;
    }
    let m = solution.pool.len() as f64;
    let values = solution.pool.values();
    let var = |f: &dyn Fn(f64) -> f64, mean: f64| values.iter().map(|&x| (f(x) - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let se_mean = (var(&|x| x, stats.mean) / m).sqrt();
    let se_m2 = (var(&|x| x * x, stats.m2) / m).sqrt();
    let se_atom = (stats.atom0 * (1.0 - stats.atom0) / m).sqrt();
    Ok(format!(
        "mean={}±{}, m2={}±{}, atom0={}±{}, converged={}",
        g(stats.mean),
        g(se_mean),
        g(stats.m2),
        g(se_m2),
        g(stats.atom0),
        g(se_atom),
        solution.converged
    ))
}

fn checkpoints(a: &ParticleArgs) -> CliResult<Vec<f64>> {
    check_time("--t", a.t)?;
    if a.n == 0 {
        return Err(bad("--n", "must be positive"));
    }
    let cps = match &a.checkpoints {
        Some(c) => c.0.clone(),
        None => (0..=20).map(|k| a.t * k as f64 / 20.0).collect(),
    };
    if cps.windows(2).any(|w| w[1] < w[0]) || cps.iter().any(|&c| c < 0.0 || c > a.t) {
        return Err(bad("--checkpoints", "must be nondecreasing and within [0, t]"));
    }
    Ok(cps)
}

fn particle(a: &ParticleArgs) -> CliResult<String> {
    let family = build_family(&a.family)?;
    let mu0 = build_init(&a.init, family.space().size())?;
    let cps = checkpoints(a)?;
    let structured = StructuredFamily::from_flat(&family)?;
    let init = SystemState::iid(a.n, &mu0, a.common.seed, 0)?;
    let (_, traj) = run(&structured, &init, a.t, a.common.seed, &cps)?;
    if let Some(path) = &a.common.out {
        traj.write_csv(create(path)?)?;
    }
    let manifest = RunManifest::new(&structured, &traj, a.common.seed, a.t);
    if let Some(path) = &a.manifest {
        let mut w = create(path)?;
        std::io::Write::write_all(&mut w, manifest.to_json().as_bytes()).map_err(Error::from)?;
    }
    let last = traj.laws.last();
    let p = last.map(|w| w.get(1).copied().unwrap_or(f64::NAN)).unwrap_or(f64::NAN);
    let se = (p * (1.0 - p) / a.n as f64).sqrt();
    Ok(format!("t={} p={}±{} N={} events={}", g(a.t), g(p), g(se), a.n, manifest.event_count))
}

fn coupled(c: &CoupledArgs) -> CliResult<String> {
    let a = &c.run;
    let family = build_family(&a.family)?;
    if family.space().size() != 2 {
        return Err(bad("--family", "coupled runs need a two-state family"));
    }
    let mu0 = build_init(&a.init, 2)?;
    let mu1 = match c.p1 {
        Some(p) => Dist::bernoulli(p).map_err(|e| bad("--p1", e))?,
        None => mu0.clone(),
    };
    let cps = checkpoints(a)?;
    let structured = StructuredFamily::from_flat(&family)?;
    let inits = CoupledStates::iid_product(a.n, &[mu0, mu1], a.common.seed)?;
    let (_, traj) = run_coupled(&structured, &inits, a.t, a.common.seed, &cps)?;
    if let Some(path) = &a.common.out {
        traj.write_csv(create(path)?)?;
    }
    let manifest = RunManifest::new(&structured, &traj, a.common.seed, a.t);
    if let Some(path) = &a.manifest {
        let mut w = create(path)?;
        std::io::Write::write_all(&mut w, manifest.to_json().as_bytes()).map_err(Error::from)?;
    }
    let last = traj.pr()?.last().copied().ok_or_else(|| bad("--checkpoints", "no checkpoints"))?;
    Ok(format!("t={} p={} r={} r-p={} N={}", g(a.t), g(last.p), g(last.r), g(last.r - last.p), a.n))
}

/// Parses `argv`, runs the command, prints the summary and returns the exit code.
pub fn main_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<String> = argv.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(path) = &common_of(&cli.command).dump_config {
        let text = dump_config(&cli.command);
        let written = if path.as_os_str() == "-" {
            print!("{text}");
            Ok(())
        } else {
            std::fs::write(path, text)
        };
        if let Err(e) = written {
            eprintln!("config error in --dump-config: {}: {e}", path.display());
            return 2;
        }
    }
    match execute(&cli.command) {
        Ok(summary) => {
            println!("{} {summary}", cli.command.name());
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
