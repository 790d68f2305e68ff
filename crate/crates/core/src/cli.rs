//! `tipctl` front end. [`run`] parses arguments, executes one subcommand and
//! returns the process exit code.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::analysis::{transition_bound_eps, transition_bound_limit};
use crate::config::{Overrides, RunConfig};
use crate::engine::simulate_ensemble;
use crate::error::{Error, Result};
use crate::gain::tune_gain;
use crate::io::{density_csv, histogram_csv, scan_csv, trajectory_csv, Manifest, OutputDir};
use crate::presets::DEFAULT_REPRODUCE_SEED;
use crate::reproduce::{analytic_for_config, reproduce, summarize, ReproduceOptions};
use crate::systems::SystemKind;

pub const THREADS_ENV: &str = "TIPCTL_THREADS";

#[derive(Debug, Parser)]
#[command(name = "tipctl", version, about = "Delayed-feedback control of noise-induced tipping")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an ensemble and write one CSV per trajectory.
    Simulate(CommonArgs),
    /// Write the analytic stationary density, optionally with an empirical histogram.
    Density {
        #[command(flatten)]
        common: CommonArgs,
        /// Also simulate the configured ensemble and compare.
        #[arg(long)]
        ensemble: bool,
    },
    /// Write the transition-ratio bound report.
    Bound {
        #[command(flatten)]
        common: CommonArgs,
        /// Ball radius for the finite-radius bound (overrides the config).
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Recommend a control gain for the configured delay.
    Tune(CommonArgs),
    /// Regenerate the data behind one figure from built-in presets.
    Reproduce {
        /// fig3, fig4, fig6 or fig7
        figure: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub quick: bool,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides { alpha: self.alpha, tau: self.tau, sigma: self.sigma, quick: self.quick }
    }

    fn resolve(&self) -> Result<RunConfig> {
        RunConfig::load(&self.config)?.with_overrides(&self.overrides())
    }

    fn out_dir(&self, cfg: &RunConfig, command: &str) -> PathBuf {
        out_dir(self.out.as_deref(), cfg.output_dir.as_deref(), command)
    }

    fn require_seed(&self, command: &str) -> Result<u64> {
        self.seed.ok_or_else(|| Error::Config {
            path: "--seed".into(),
            message: format!("{command} is randomized and needs an explicit --seed"),
        })
    }
}

fn out_dir(flag: Option<&Path>, configured: Option<&str>, command: &str) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| configured.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("tipctl_out").join(command))
}

/// What a subcommand reports back besides errors.
struct Outcome {
    dir: PathBuf,
    summary: serde_json::Value,
    exit_code: i32,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match execute(&cli.command) {
        Ok(o) => {
            println!("{}", serde_json::to_string_pretty(&o.summary).unwrap_or_default());
            eprintln!("wrote {}", o.dir.display());
            o.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool built earlier in the process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Density { common, ensemble } => cmd_density(common, *ensemble),
        Command::Bound { common, epsilon } => cmd_bound(common, *epsilon),
        Command::Tune(a) => cmd_tune(a),
        Command::Reproduce { figure, seed, out, quick } => {
            cmd_reproduce(figure, seed.unwrap_or(DEFAULT_REPRODUCE_SEED), out.as_deref(), *quick)
        }
    }
}

fn manifest_for(command: &str, a: &CommonArgs, cfg: &RunConfig, seed: Option<u64>) -> Manifest<serde_json::Value> {
    Manifest::new(
        command,
        seed,
        json!({
            "resolved": cfg,
            "source": a.config.display().to_string(),
            "overrides": a.overrides(),
        }),
    )
}

fn cmd_simulate(a: &CommonArgs) -> Result<Outcome> {
    let seed = a.require_seed("simulate")?;
    let cfg = a.resolve()?;
    let ens = simulate_ensemble(&cfg.system, &cfg.initial_data(), &cfg.integrator_config(seed)?, cfg.integrator.n_traj)?;
    let dir = a.out_dir(&cfg, "simulate");
    let mut out = OutputDir::create(&dir)?;
    out.write_json("config.json", &cfg)?;
    for (i, t) in ens.trajectories.iter().enumerate() {
        out.write_text(&format!("trajectory_{i:04}.csv"), &trajectory_csv(t))?;
    }
    out.write_json("aborted.json", &ens.aborted)?;
    let dir = out.finish(&manifest_for("simulate", a, &cfg, Some(seed)))?;
    let summary = json!({ "trajectories": ens.trajectories.len(), "aborted": ens.aborted.len(), "seed": seed });
    Ok(Outcome { dir, summary, exit_code: 0 })
}

fn cmd_density(a: &CommonArgs, ensemble: bool) -> Result<Outcome> {
    let cfg = a.resolve()?;
    let seed = if ensemble { Some(a.require_seed("density --ensemble")?) } else { a.seed };
    let grid = analytic_for_config(&cfg)?;
    let mut summary = json!({
        "integral": grid.integral(),
        "argmax": grid.argmax(),
        "domain": grid.domain,
    });
    let mut extra = Vec::new();
    if let (true, Some(seed)) = (ensemble, seed) {
        let ens = simulate_ensemble(&cfg.system, &cfg.initial_data(), &cfg.integrator_config(seed)?, cfg.integrator.n_traj)?;
        let (h, diag) = summarize(&ens, &cfg, Some(&grid))?;
        extra.push(("histogram.csv".to_string(), histogram_csv(&h)));
        extra.push(("diagnostics.json".to_string(), serde_json::to_string_pretty(&diag)?));
        summary["diagnostics"] = diag;
    }
    let dir = a.out_dir(&cfg, "density");
    let mut out = OutputDir::create(&dir)?;
    out.write_json("config.json", &cfg)?;
    out.write_text("density.csv", &density_csv(&grid))?;
    for (name, text) in &extra {
        out.write_text(name, text)?;
    }
    let dir = out.finish(&manifest_for("density", a, &cfg, seed))?;
    Ok(Outcome { dir, summary, exit_code: 0 })
}

fn cmd_bound(a: &CommonArgs, epsilon: Option<f64>) -> Result<Outcome> {
    let cfg = a.resolve()?;
    let sys = &cfg.system;
    let sigma = sys.diffusion().constant_sigma().ok_or(Error::RequiresConstantDiffusion)?;
    let xb = cfg.analysis.xb.clone().ok_or_else(|| Error::Config {
        path: "analysis.xb".into(),
        message: "bound needs the undesirable equilibrium".into(),
    })?;
    let limit = transition_bound_limit(sys.potential(), sys.control(), sigma, &xb)?;
    let eps = epsilon
        .or(cfg.analysis.bound_epsilon)
        .map(|e| transition_bound_eps(sys.potential(), sys.control(), sigma, e, &xb))
        .transpose()?;
    let report = json!({ "limit": limit, "epsilon_bound": eps });
    let dir = a.out_dir(&cfg, "bound");
    let mut out = OutputDir::create(&dir)?;
    out.write_json("config.json", &cfg)?;
    out.write_json("bound.json", &report)?;
    let dir = out.finish(&manifest_for("bound", a, &cfg, None))?;
    Ok(Outcome { dir, summary: report, exit_code: 0 })
}

fn cmd_tune(a: &CommonArgs) -> Result<Outcome> {
    let cfg = a.resolve()?;
    let sys = &cfg.system;
    if sys.kind() == SystemKind::Uncontrolled {
        return Err(Error::Config { path: "system.kind".into(), message: "tune needs a controlled system (xa and tau)".into() });
    }
    let sigma = sys.diffusion().constant_sigma().ok_or(Error::RequiresConstantDiffusion)?;
    let xb = cfg.analysis.xb.clone().ok_or_else(|| Error::Config {
        path: "analysis.xb".into(),
        message: "tune needs the undesirable equilibrium".into(),
    })?;
    let c = sys.control();
    let outcome = tune_gain(sys.potential(), &c.xa, &xb, c.tau, sigma, cfg.tune.target_bound, cfg.tune.alpha_step)?;
    let dir = a.out_dir(&cfg, "tune");
    let mut out = OutputDir::create(&dir)?;
    out.write_json("config.json", &cfg)?;
    out.write_json("recommendation.json", &outcome)?;
    out.write_text("scan.csv", &scan_csv(outcome.scan()))?;
    let dir = out.finish(&manifest_for("tune", a, &cfg, None))?;
    let summary = match outcome.recommendation() {
        Some(r) => json!({
            "status": "feasible",
            "alpha_star": r.alpha_star,
            "bound_at_alpha_star": r.bound_at_alpha_star,
            "unimodality_threshold": r.unimodality_threshold,
            "sigma_tilde_at_alpha_star": r.sigma_tilde_at_alpha_star,
        }),
        None => json!({ "status": "infeasible" }),
    };
    Ok(Outcome { dir, summary, exit_code: outcome.exit_code() })
}

fn cmd_reproduce(figure: &str, seed: u64, out: Option<&Path>, quick: bool) -> Result<Outcome> {
    let opts = ReproduceOptions { quick, seed };
    let fig = reproduce(figure, &opts)?;
    let dir = out_dir(out, None, &format!("reproduce_{figure}"));
    let mut o = OutputDir::create(&dir)?;
    for (name, text) in &fig.files {
        o.write_text(name, text)?;
    }
    o.write_json("comparison.json", &fig.comparison)?;
    for note in &fig.notes {
        eprintln!("note: {note}");
    }
    let dir = o.finish(&Manifest::new(format!("reproduce {figure}"), Some(seed), json!({ "figure": figure, "options": opts })))?;
    Ok(Outcome { dir, summary: fig.comparison, exit_code: 0 })
}
