use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hetmarket_cli::checks::{parse_suite, run_criterion, CheckSettings, Status};
use hetmarket_cli::config::ExperimentConfig;
use hetmarket_cli::experiments::{self, failing_rows, summarize, EXPERIMENTS};

const USAGE: u8 = 1;
const VALIDATION: u8 = 2;

#[derive(Parser)]
#[command(name = "hetmarket", version, about = "Heterogeneous-buyer market experiments and validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV table.
    Run {
        /// Experiment name; see `hetmarket list`. Falls back to `scenario` in the config.
        scenario: Option<String>,
        /// Exit with status 2 if any checked row is outside its tolerance.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        opts: Options,
    },
    /// Run acceptance criteria: `all`, or a list such as `1,3,tau`.
    Check {
        suite: Option<String>,
        #[command(flatten)]
        opts: Options,
    },
    /// Sample against expected Kendall tau for one list scheme (A, B or C).
    Tau {
        #[arg(value_name = "SCHEME")]
        list_scheme: Option<String>,
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        opts: Options,
    },
    /// List experiments and criteria.
    List,
}

#[derive(Args, Default)]
struct Options {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override any configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Realization count R.
    #[arg(long)]
    realizations: Option<String>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep as var=a..b[:step].
    #[arg(long)]
    sweep: Option<String>,
    /// Number of buyers.
    #[arg(long = "M")]
    m: Option<String>,
    /// Number of variants.
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long = "p")]
    p: Option<String>,
    /// Initial cost per variant.
    #[arg(long = "Z")]
    z: Option<String>,
    #[arg(long = "Z1")]
    z1: Option<String>,
    #[arg(long = "Z2")]
    z2: Option<String>,
    /// Binding strength in [0, 1].
    #[arg(long = "t")]
    t: Option<String>,
    /// Coupling sign, +1 or -1.
    #[arg(long = "s", allow_hyphen_values = true)]
    s: Option<String>,
    /// List scheme A, B or C.
    #[arg(long)]
    scheme: Option<String>,
    /// Matching depth.
    #[arg(long = "d")]
    d: Option<String>,
    #[arg(long = "k")]
    k: Option<String>,
    #[arg(long = "k-max")]
    k_max: Option<String>,
    /// linear, step or constant:c.
    #[arg(long)]
    acceptance: Option<String>,
    /// Multiplies every check tolerance.
    #[arg(long = "tolerance-scale")]
    tolerance_scale: Option<String>,
}

impl Options {
    /// Defaults, then the file, then `--set`, then the dedicated flags.
    fn config(&self) -> Result<ExperimentConfig, String> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path).map_err(|e| e.to_string())?;
        }
        for pair in &self.set {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| format!("--set {pair}: expected KEY=VALUE"))?;
            cfg.apply_override("--set", key, value).map_err(|e| e.to_string())?;
        }
        let flags = [
            ("--seed", "seed", &self.seed),
            ("--realizations", "R", &self.realizations),
            ("--sweep", "sweep", &self.sweep),
            ("--M", "M", &self.m),
            ("--N", "N", &self.n),
            ("--p", "p", &self.p),
            ("--Z", "Z", &self.z),
            ("--Z1", "Z1", &self.z1),
            ("--Z2", "Z2", &self.z2),
            ("--t", "t", &self.t),
            ("--s", "s", &self.s),
            ("--scheme", "scheme", &self.scheme),
            ("--d", "d", &self.d),
            ("--k", "k", &self.k),
            ("--k-max", "k_max", &self.k_max),
            ("--acceptance", "acceptance", &self.acceptance),
            ("--tolerance-scale", "tolerance_scale", &self.tolerance_scale),
        ];
        for (flag, key, value) in flags {
            if let Some(value) = value {
                cfg.apply_override(flag, key, value).map_err(|e| e.to_string())?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("HETMARKET_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| format!("HETMARKET_THREADS must be a non-negative integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("cannot configure worker threads: {e}"))
}

fn run_experiment(cfg: &ExperimentConfig, check: bool) -> Result<u8, String> {
    let table = experiments::run(cfg).map_err(|e| e.to_string())?;
    let csv = table.to_csv();
    match &cfg.out {
        Some(path) => std::fs::write(path, &csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => emit(&csv),
    }
    let (lines, failures) = summarize(&table, cfg.tolerance_scale);
    for line in lines {
        eprintln!("{line}");
    }
    eprintln!("{}: R = {}, seed = {}", table.experiment, table.realizations, table.seed);
    if check {
        for line in failing_rows(&table, cfg.tolerance_scale) {
            eprintln!("{line}");
        }
        if failures > 0 {
            eprintln!("check: {failures} rows outside tolerance");
            return Ok(VALIDATION);
        }
        eprintln!("check: all checked rows within tolerance");
    }
    Ok(0)
}

fn run_checks(cfg: &ExperimentConfig, suite: Option<&str>) -> Result<u8, String> {
    let suite = suite.or(cfg.suite.as_deref()).unwrap_or("all");
    let ids = parse_suite(suite)?;
    let settings = CheckSettings::from_config(cfg);
    let mut failed = 0;
    for id in ids {
        let report = run_criterion(id, &settings);
        if report.status() == Status::Fail {
            failed += 1;
        }
        emit(&(report.lines().join("\n") + "\n"));
    }
    emit(&format!(
        "R = {}, seed = {}, tolerance scale = {}\n",
        settings.realizations, settings.seed, settings.scale
    ));
    if failed > 0 {
        emit(&format!("{failed} criteria failed\n"));
        return Ok(VALIDATION);
    }
    Ok(0)
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn list() {
    let mut text = String::from("experiments:\n");
    for e in EXPERIMENTS {
        let sweep = e.default_sweep.unwrap_or("single point");
        text += &format!("  {:<14} {} [sweeps: {}; default {sweep}]\n", e.name, e.about, e.vars.join(", "));
    }
    text += "criteria:\n";
    for c in hetmarket_cli::checks::CRITERIA {
        text += &format!("  {:>2} {:<12} {}\n", c.id, c.name, c.title);
    }
    emit(&text);
}

fn dispatch(command: Command) -> Result<u8, String> {
    configure_threads()?;
    match command {
        Command::Run { scenario, check, opts } => {
            let mut cfg = opts.config()?;
            if let Some(name) = scenario {
                cfg.scenario = Some(name);
            }
            if cfg.scenario.is_none() {
                return Err("no experiment named; pass one or set scenario= in the config".into());
            }
            run_experiment(&cfg, check)
        }
        Command::Check { suite, opts } => {
            let cfg = opts.config()?;
            run_checks(&cfg, suite.as_deref())
        }
        Command::Tau { list_scheme, check, opts } => {
            let mut cfg = opts.config()?;
            if let Some(scheme) = list_scheme {
                cfg.apply_override("tau", "scheme", &scheme).map_err(|e| e.to_string())?;
            }
            cfg.scenario = Some("tau".into());
            run_experiment(&cfg, check)
        }
        Command::List => {
            list();
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { USAGE } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(USAGE)
        }
    }
}
