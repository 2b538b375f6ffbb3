//! Command-line front end. Every subcommand is a thin wrapper over the
//! library; `run_with` is the testable entry point.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analyze::{
    find_fixed_points, group_stats, read_rows_csv, run_sweep, write_rows_csv, write_stats_csv,
};
use crate::config::{load_config, preset, Figure, PresetOverrides, SweepConfig};
use crate::error::{Error, Result};
use crate::graph::{gen_ba, gen_er, gen_sw, load_edge_list_path, Graph};
use crate::models::{
    assign_edge_types, build_model, sample_recovery_rates, EdgeTypeMode, ModelKind, NodeRates,
};
use crate::reduce::{
    build_effective_system, default_poly_domain, effective_params, fit_subfunctions, ReductionMode,
};
use crate::seeds::{self, stream};
use crate::simulate::{initial_state, integrate_to_steady, InitRegime, IntegratorOptions};

pub const LOG_ENV: &str = "NETREDUCE_LOG";

#[derive(Parser, Debug)]
#[command(
    name = "netreduce",
    version,
    about = "One-dimensional reduction of networked dynamics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic network and write it as an edge list.
    Generate(GenerateArgs),
    /// Integrate the full system once from a random start.
    Simulate(SimulateArgs),
    /// Effective parameters and fixed points of the effective equation.
    Reduce(ReduceArgs),
    /// Run a sweep described by a JSON config.
    Sweep(SweepArgs),
    /// Recompute grouped error statistics from a results CSV.
    Stats(StatsArgs),
    /// Run one of the figure presets.
    Repro(ReproArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GraphKind {
    Er,
    Ba,
    Sw,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    pub kind: GraphKind,
    #[arg(long)]
    pub n: usize,
    /// ER edge probability.
    #[arg(long, default_value_t = 0.5)]
    pub c: f64,
    /// BA edges per new node.
    #[arg(long, default_value_t = 25)]
    pub m: usize,
    /// SW lattice degree.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// SW rewiring probability.
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SystemArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Keep edge direction (src -> dst) instead of symmetrizing.
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub binarize: bool,
    #[arg(long, value_enum, default_value_t = ModelArg::Sis)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Mean of the uniform recovery-rate distribution on [0, 2 mu_e].
    #[arg(long, default_value_t = 1.0)]
    pub mu_e: f64,
    /// Use the same rate at every node instead of sampling.
    #[arg(long)]
    pub uniform_e: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub weight_mult: f64,
    #[arg(long)]
    pub annealed: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModelArg {
    Sis,
    Mm,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Sis => ModelKind::Sis,
            ModelArg::Mm => ModelKind::Mm,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Paper,
    Mixture,
    Polynomial,
}

impl From<ModeArg> for ReductionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Paper => ReductionMode::Paper,
            ModeArg::Mixture => ReductionMode::Mixture,
            ModeArg::Polynomial => ReductionMode::Polynomial,
        }
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, value_enum, default_value_t = RegimeArg::Low)]
    pub init: RegimeArg,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Per-node steady state as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RegimeArg {
    Low,
    High,
}

impl From<RegimeArg> for InitRegime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Low => InitRegime::Low,
            RegimeArg::High => InitRegime::High,
        }
    }
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Paper)]
    pub mode: ModeArg,
    /// Chebyshev terms in polynomial mode.
    #[arg(long, default_value_t = 6)]
    pub terms: usize,
    #[arg(long, default_value_t = 1024)]
    pub root_grid: usize,
    /// Directory for the fitted coefficient CSVs (polynomial mode).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; defaults to the config's `output`, then `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Results CSV written by `sweep` or `repro`.
    #[arg(long)]
    pub input: PathBuf,
    /// Stats CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReproArgs {
    /// fig1 .. fig5
    pub figure: String,
    /// Edge list for fig4 (infect-dublin) or fig5 (bio-diseasome).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Comma-separated sizes overriding 100,200,300.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Number of network seeds (default 50).
    #[arg(long)]
    pub seeds: Option<u64>,
    /// First network seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sweep the 24-point A_eff/e_eff grid instead of unit weights.
    #[arg(long)]
    pub ratio_grid: bool,
    #[arg(long)]
    pub binarize: bool,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

/// Written next to every results CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: SweepConfig,
    pub tool_version: String,
    pub timestamp_unix: u64,
    pub rows: usize,
    pub non_converged: usize,
    pub errored: usize,
    pub runtime_secs: f64,
}

/// What a command produced, for the exit status.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub hard_errors: usize,
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    let _ = env_logger::Builder::from_env(env).try_init();
}

/// Process entry point: parse `std::env::args`, run, map to an exit code.
pub fn run() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(o) if o.hard_errors == 0 => ExitCode::SUCCESS,
        Ok(o) => {
            eprintln!("{} cells failed; see the error column", o.hard_errors);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

pub fn run_with<I, T>(args: I) -> Result<Outcome>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    dispatch(cli)
}

pub fn dispatch(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Generate(a) => generate(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Reduce(a) => reduce(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Stats(a) => stats(&a),
        Command::Repro(a) => repro(&a),
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn generate(a: &GenerateArgs) -> Result<Outcome> {
    let g = match a.kind {
        GraphKind::Er => gen_er(a.n, a.c, a.seed)?,
        GraphKind::Ba => gen_ba(a.n, a.m, a.seed)?,
        GraphKind::Sw => gen_sw(a.n, a.k, a.beta, a.seed)?,
    };
    log::info!("generated {} nodes, {} edges", g.n_nodes(), g.edge_count());
    write_text(a.out.as_deref(), &g.to_edge_list())?;
    Ok(Outcome::default())
}

struct System {
    graph: Arc<Graph>,
    rates: NodeRates,
    model: crate::models::SeparableModel,
    kind: ModelKind,
}

fn load_system(a: &SystemArgs) -> Result<System> {
    let report = load_edge_list_path(&a.graph, !a.directed)?;
    let mut g = report.graph;
    if a.binarize {
        g = g.binarized();
    }
    if a.weight_mult != 1.0 {
        g = g.scaled(a.weight_mult)?;
    }
    let graph = Arc::new(g);
    let n = graph.n_nodes();
    let rates = match a.uniform_e {
        Some(e0) => NodeRates::uniform(n, e0),
        None => sample_recovery_rates(n, a.mu_e, seeds::derive(&[a.seed, 0, stream::RATES]))?,
    };
    let mode = if a.annealed {
        EdgeTypeMode::Annealed
    } else {
        EdgeTypeMode::Quenched
    };
    let types = assign_edge_types(
        &graph,
        a.p,
        seeds::derive(&[a.seed, 0, stream::EDGE_TYPES]),
        mode,
    )?;
    let kind = ModelKind::from(a.model);
    let model = build_model(kind, Arc::clone(&graph), rates.clone(), types)?;
    Ok(System {
        graph,
        rates,
        model,
        kind,
    })
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let sys = load_system(&a.system)?;
    let regime = InitRegime::from(a.init);
    let x0 = initial_state(
        sys.graph.n_nodes(),
        regime,
        seeds::derive(&[a.system.seed, 0, stream::INITIAL, regime as u64]),
    );
    let opts = IntegratorOptions {
        t_max: a.t_max,
        ..IntegratorOptions::default()
    };
    let ss = integrate_to_steady(&sys.model, &x0, &opts)?;
    println!(
        "x_eff_num={:.16e} converged={} t_final={:.6e} residual={:.3e} steps={}",
        ss.x_eff_num, ss.converged, ss.t_final, ss.residual, ss.steps
    );
    if let Some(path) = &a.out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["node", "x"])?;
        for (i, x) in ss.x.iter().enumerate() {
            w.write_record([i.to_string(), format!("{x:.16e}")])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    Ok(Outcome::default())
}

fn reduce(a: &ReduceArgs) -> Result<Outcome> {
    let sys = load_system(&a.system)?;
    let mode = ReductionMode::from(a.mode);
    let params = effective_params(&sys.graph, &sys.rates, a.system.p, Some(sys.kind))?;
    let polys = match mode {
        ReductionMode::Polynomial => {
            let (lo, hi) = default_poly_domain(params.kind, &params);
            Some(fit_subfunctions(&sys.model, a.terms, lo, hi)?)
        }
        _ => None,
    };
    let eff = build_effective_system(params, mode, polys)?;
    let fps = find_fixed_points(&eff, eff.domain(), a.root_grid)?;
    println!("model={} mode={} p={}", sys.kind, mode.as_str(), params.p);
    println!("e_eff={:.16e}", params.e_eff);
    println!("A_eff={:.16e}", params.a_eff);
    for fp in &fps {
        println!(
            "x_star={:.16e} derivative={:.6e} {}",
            fp.x_star,
            fp.derivative,
            if fp.stable { "stable" } else { "unstable" }
        );
    }
    if let (Some(dir), Some(s)) = (&a.out, &eff.polys) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, poly) in [
            ("f_eff", &s.f_eff),
            ("p_eff", &s.p_eff),
            ("q_eff", &s.q_eff),
        ] {
            let path = dir.join(format!("{name}.csv"));
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            poly.write_csv(file)?;
        }
    }
    Ok(Outcome::default())
}

/// Run `cfg`, then write `results.csv`, `stats.csv` and `manifest.json` into `dir`.
pub fn execute_sweep(cfg: &SweepConfig, dir: &Path, jobs: usize) -> Result<Outcome> {
    let start = Instant::now();
    let outcome = run_sweep(cfg, jobs)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let results = dir.join("results.csv");
    let file = fs::File::create(&results).map_err(|e| Error::io(&results, e))?;
    write_rows_csv(io::BufWriter::new(file), &outcome.rows)?;

    let stats_path = dir.join("stats.csv");
    let file = fs::File::create(&stats_path).map_err(|e| Error::io(&stats_path, e))?;
    write_stats_csv(io::BufWriter::new(file), &group_stats(&outcome.rows))?;

    let manifest = RunManifest {
        config: cfg.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        rows: outcome.rows.len(),
        non_converged: outcome.non_converged,
        errored: outcome.errored,
        runtime_secs: start.elapsed().as_secs_f64(),
    };
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;

    log::info!(
        "{} rows ({} not converged, {} failed) in {:.1}s",
        manifest.rows,
        manifest.non_converged,
        manifest.errored,
        manifest.runtime_secs
    );
    if outcome.non_converged > 0 {
        log::warn!("{} cells did not reach steady state", outcome.non_converged);
    }
    Ok(Outcome {
        hard_errors: outcome.errored,
    })
}

fn sweep(a: &SweepArgs) -> Result<Outcome> {
    let mut cfg = load_config(&a.config)?;
    if let Some(mode) = a.mode {
        cfg.mode = mode.into();
    }
    let dir = a
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    execute_sweep(&cfg, &dir, a.jobs)
}

fn stats(a: &StatsArgs) -> Result<Outcome> {
    let file = fs::File::open(&a.input).map_err(|e| Error::io(&a.input, e))?;
    let rows = read_rows_csv(io::BufReader::new(file))?;
    if rows.is_empty() {
        return Err(Error::NoData);
    }
    let mut buf = Vec::new();
    write_stats_csv(&mut buf, &group_stats(&rows))?;
    write_text(a.out.as_deref(), &String::from_utf8_lossy(&buf))?;
    Ok(Outcome::default())
}

/// Preset for `figure` with the command-line overrides applied.
pub fn repro_config(a: &ReproArgs) -> Result<SweepConfig> {
    let figure: Figure = a.figure.parse()?;
    let mut cfg = preset(figure, a.dataset.as_deref())?;
    PresetOverrides {
        sizes: a.sizes.clone(),
        seed_count: a.seeds,
        seed_start: a.seed,
        mode: a.mode.map(Into::into),
        binarize: a.binarize,
        ratio_grid: a.ratio_grid,
    }
    .apply(&mut cfg)?;
    Ok(cfg)
}

fn repro(a: &ReproArgs) -> Result<Outcome> {
    let cfg = repro_config(a)?;
    let dir = a
        .out
        .clone()
        .unwrap_or_else(|| Path::new("out").join(&a.figure));
    execute_sweep(&cfg, &dir, a.jobs)
}
