use std::path::PathBuf;
use std::process::ExitCode;

use cantisim_core::scenario::{merge_patch, preset, run_scenario, write_bundle, Method, ScenarioConfig, PRESET_NAMES};
use cantisim_core::Error;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cantisim", version, about = "Flux-qubit / cantilever cooling and squeezing simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write series.csv, summary.csv and manifest.json.
    Run(RunArgs),
    /// Print a preset scenario as JSON (a starting point for --config files).
    Preset { name: String },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario file (JSON). With --preset it is applied as a merge patch.
    /// A manifest.json from an earlier run is accepted as well.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = PRESET_NAMES)]
    preset: Option<String>,
    #[arg(long, value_parser = ["master", "trajectory", "reduced", "rate"])]
    solver: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fock cutoff N_max.
    #[arg(long)]
    fock: Option<usize>,
    /// Exit with status 2 when a validity check fails outright.
    #[arg(long)]
    strict: bool,
    /// Output directory (defaults to output.directory in the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_IO: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => EXIT_IO,
        e if e.is_solver_failure() => EXIT_SOLVER,
        _ => EXIT_CONFIG,
    }
}

fn load_config(args: &RunArgs) -> Result<ScenarioConfig, Error> {
    let mut value = match &args.preset {
        Some(name) => preset(name)?.to_value(),
        None => serde_json::Value::Null,
    };
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        let mut patch: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(inner) = patch.get("manifest_version").and(patch.get("config")).cloned() {
            patch = inner;
        }
        merge_patch(&mut value, &patch);
    }
    if value.is_null() {
        return Err(Error::Config("give --config, --preset or both".into()));
    }
    let mut cfg = ScenarioConfig::from_value(value)?;
    if let Some(s) = &args.solver {
        cfg.solver.method = s.parse::<Method>()?;
    }
    if let Some(seed) = args.seed {
        cfg.solver.seed = seed;
    }
    if let Some(n) = args.fock {
        cfg.solver.fock_cutoff = n;
    }
    if let Some(out) = &args.out {
        cfg.output.directory = Some(out.display().to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: RunArgs) -> Result<u8, Error> {
    let cfg = load_config(&args)?;
    let dir = cfg
        .output
        .directory
        .clone()
        .map(PathBuf::from)
        .ok_or_else(|| Error::Config("no output directory: pass --out".into()))?;
    let bundle = run_scenario(&cfg)?;
    let written = write_bundle(&bundle, &dir, &cfg.output.formats)?;
    for p in &written {
        println!("wrote {}", p.display());
    }
    let m = &bundle.manifest;
    for line in m.validity.comment_lines() {
        println!("{}", line.trim_start_matches("# "));
    }
    if let Some(s) = &m.steady {
        println!("steady: n̄ = {:.6}  P = {:.6}  V = {:.6}", s.mean_phonon, s.excited_pop, s.variance_v);
    }
    if let Some(c) = &m.closed_form {
        println!("closed form: n̄ = {:.6} (large-cooling limit {:.6})", c.exact, c.approx);
    }
    for row in bundle.summary.iter().filter(|r| !r.param_value.is_nan()) {
        println!("{:>10.4}  n̄ = {:.6}  V = {:.6}", row.param_value, row.steady_phonon, row.steady_variance);
    }
    for c in &m.checks {
        println!("check {}: {} {} -> {}", c.name, c.value, c.bound, if c.pass { "ok" } else { "OUT OF RANGE" });
    }
    for f in &m.flags {
        println!("flag: {f}");
    }
    if args.strict && bundle.has_validity_failure() {
        eprintln!("error: validity report contains a failing regime check (--strict)");
        return Ok(EXIT_CONFIG);
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Preset { name } => preset(&name).map(|c| {
            println!("{}", serde_json::to_string_pretty(&c.to_value()).expect("serialisable"));
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
