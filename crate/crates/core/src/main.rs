//! `isac` command line: single optimizations, Monte Carlo sweeps,
//! beampatterns and the self-test suite.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use isac_core::alternating::{optimize, OptimizerSettings, SolveStatus};
use isac_core::harness::{
    bs2_patterns, gain_db, persist_solution, run_dir, run_sweep, selftest, write_beampatterns, write_json, AngleGrid,
    SweepSpec,
};
use isac_core::sysmodel::{bs2_user_directions, generate_channels, ScenarioFile, SystemConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "isac", version, about = "Secure energy-efficient ISAC/RSMA beamforming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Scenario JSON; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output root; each run writes to `<out>/<run id>/`.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
    /// Channel and randomization seed (overrides the scenario's `rng_seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Run directory name; defaults to `<command>-s<seed>-<unix time>`.
    #[arg(long)]
    run_id: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimize one channel realization.
    Optimize(Common),
    /// Monte Carlo sweep over one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `<name>=<v1,v2,...>` with name one of P1_max, P2_max, e, M1.
        #[arg(long)]
        sweep: String,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Optimize, then tabulate BS2 beampatterns over a θ×φ grid.
    Beampattern {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 91)]
        n_theta: usize,
        #[arg(long, default_value_t = 180)]
        n_phi: usize,
    },
    /// Run the invariant self-test suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(common: &Common) -> Result<(SystemConfig, OptimizerSettings)> {
    let (mut cfg, settings) = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file = ScenarioFile::from_json(&text)?;
            let settings = match &file.optimizer {
                Some(v) => serde_json::from_value(v.clone()).context("parsing `optimizer` settings")?,
                None => OptimizerSettings::default(),
            };
            (file.into_config()?, settings)
        }
        None => (SystemConfig::default(), OptimizerSettings::default()),
    };
    if let Some(s) = common.seed {
        cfg.rng_seed = s;
    }
    cfg.validate()?;
    Ok((cfg, settings))
}

fn run_id(common: &Common, command: &str, seed: u64) -> String {
    common.run_id.clone().unwrap_or_else(|| {
        let t = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        format!("{command}-s{seed}-{t}")
    })
}

fn report_dir(dir: &Path) {
    println!("wrote {}", dir.display());
}

fn cmd_optimize(common: &Common) -> Result<u8> {
    let (cfg, settings) = load(common)?;
    let ch = generate_channels(&cfg, cfg.rng_seed);
    let sol = optimize(&cfg, &ch, &settings)?;
    let dir = run_dir(&common.out, &run_id(common, "optimize", cfg.rng_seed))?;
    persist_solution(&dir, &sol, &cfg)?;
    println!("status {:?}, {} outer iterations", sol.status, sol.iterations);
    if let Some(m) = &sol.metrics {
        println!("SEE {:.6} bit/s/Hz/W, R_S {:.4}, P1 {:.4} W, P2 {:.4} W", m.see, m.r_s, m.p1, m.p2);
    }
    if let Some(msg) = &sol.message {
        println!("{msg}");
    }
    report_dir(&dir);
    Ok(if sol.status == SolveStatus::Infeasible { EXIT_INFEASIBLE } else { 0 })
}

fn cmd_sweep(common: &Common, sweep: &str, trials: usize) -> Result<u8> {
    let (cfg, settings) = load(common)?;
    let (param, values) = SweepSpec::parse_values(sweep)?;
    let spec = SweepSpec { param, values, trials, base: cfg.clone(), seed: cfg.rng_seed, settings };
    let table = run_sweep(&spec)?;
    let dir = run_dir(&common.out, &run_id(common, "sweep", cfg.rng_seed))?;
    table.write_csv(fs::File::create(dir.join("curves.csv"))?)?;
    write_json(&dir.join("config.snapshot.json"), &spec)?;
    write_json(&dir.join("trials.json"), &table.trials)?;
    table.write_csv(std::io::stdout())?;
    report_dir(&dir);
    Ok(if table.rows.iter().all(|r| r.flagged) { EXIT_INFEASIBLE } else { 0 })
}

fn cmd_beampattern(common: &Common, n_theta: usize, n_phi: usize) -> Result<u8> {
    let (cfg, settings) = load(common)?;
    let ch = generate_channels(&cfg, cfg.rng_seed);
    let sol = optimize(&cfg, &ch, &settings)?;
    let dir = run_dir(&common.out, &run_id(common, "beampattern", cfg.rng_seed))?;
    persist_solution(&dir, &sol, &cfg)?;
    if sol.status == SolveStatus::Infeasible {
        println!("infeasible: {}", sol.message.unwrap_or_default());
        report_dir(&dir);
        return Ok(EXIT_INFEASIBLE);
    }
    let grid = AngleGrid::uniform(n_theta.max(1), n_phi.max(1));
    let patterns = bs2_patterns(&sol, &cfg, &grid);
    write_beampatterns(fs::File::create(dir.join("beampattern.csv"))?, &patterns)?;
    let array = cfg.bs2_array();
    for (k, d) in bs2_user_directions(&cfg, &ch.layout).iter().enumerate() {
        let common_db = gain_db(&sol.bf.o_c, &array, d.theta, d.phi);
        let private_db = gain_db(&sol.bf.o_p[k], &array, d.theta, d.phi);
        println!("user {}: common {common_db:.2} dB, private {private_db:.2} dB", k + 1);
    }
    report_dir(&dir);
    Ok(0)
}

fn cmd_selftest(seed: u64) -> u8 {
    let checks = selftest(seed);
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if checks.iter().all(|c| c.passed) { 0 } else { EXIT_USAGE }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Optimize(common) => cmd_optimize(common),
        Command::Sweep { common, sweep, trials } => cmd_sweep(common, sweep, *trials),
        Command::Beampattern { common, n_theta, n_phi } => cmd_beampattern(common, *n_theta, *n_phi),
        Command::Selftest { seed } => Ok(cmd_selftest(*seed)),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
