use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nls_core::classifier::classify;
use nls_lab::run::{ground_state_for, initial_field};
use nls_lab::selftest::run_selftest;
use nls_lab::{emit_report, run_all, thread_count, ExperimentConfig, RunError};

const VALIDATION: u8 = 2;
const RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "nls-lab", version, about = "Experiments for NLS equations with combined nonlinearities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the model's ground state and write its profile.
    Groundstate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Classify the configured initial datum and print the verdict.
    Classify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one or more experiments.
    Evolve {
        #[arg(long, required = true, num_args = 1..)]
        config: Vec<PathBuf>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Aggregate run directories into report.csv and report.md.
    Report {
        run_dirs: Vec<PathBuf>,
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
    /// Fast built-in checks.
    Selftest,
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, ExitCode> {
    ExperimentConfig::load(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(VALIDATION)
    })
}

fn runtime(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(RUNTIME)
}

fn exit_for(e: &RunError) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        RunError::Config(_) => ExitCode::from(VALIDATION),
        _ => ExitCode::from(RUNTIME),
    }
}

fn groundstate(config: PathBuf, out: PathBuf) -> Result<(), ExitCode> {
    let cfg = load(&config)?;
    let gs = ground_state_for(&cfg).map_err(|e| exit_for(&e))?;
    let dir = out.join(&cfg.name);
    std::fs::create_dir_all(&dir).map_err(runtime)?;
    gs.save_csv(dir.join("groundstate.csv")).map_err(runtime)?;
    let grid = cfg.grid().map_err(runtime)?;
    nls_core::spectral::io::save_field(&gs.field_on(&grid), dir.join("groundstate.field")).map_err(runtime)?;
    let info = serde_json::json!({
        "which": gs.which,
        "q0": gs.q0(),
        "mass": gs.mass,
        "m_omega": gs.m_omega,
        "residual": gs.residual,
        "k_value": gs.k_value,
        "pohozaev": gs.pohozaev_check().ok(),
        "cross_check": gs.cross_check,
        "hash": gs.provenance_hash(),
    });
    let text = serde_json::to_string_pretty(&info).expect("json");
    std::fs::write(dir.join("groundstate.json"), text.clone() + "\n").map_err(runtime)?;
    println!("{text}");
    Ok(())
}

fn classify_cmd(config: PathBuf, out: Option<PathBuf>) -> Result<(), ExitCode> {
    let cfg = load(&config)?;
    let gs = ground_state_for(&cfg).map_err(|e| exit_for(&e))?;
    let u0 = initial_field(&cfg, &gs).map_err(|e| exit_for(&e))?;
    let verdict = classify(&u0, &cfg.model().map_err(runtime)?, &gs).map_err(runtime)?;
    let json = verdict.to_json();
    if let Some(out) = out {
        let dir = out.join(&cfg.name);
        std::fs::create_dir_all(&dir).map_err(runtime)?;
        std::fs::write(dir.join("verdict.json"), json.clone() + "\n").map_err(runtime)?;
    }
    println!("{json}");
    Ok(())
}

fn evolve_cmd(configs: Vec<PathBuf>, out: PathBuf, threads: Option<usize>) -> Result<(), ExitCode> {
    let cfgs = configs.iter().map(load).collect::<Result<Vec<_>, _>>()?;
    let mut code = None;
    for (cfg, res) in cfgs.iter().zip(run_all(&cfgs, &out, thread_count(threads))) {
        match res {
            Ok(s) => println!(
                "{}: {} ({}, prediction {})",
                cfg.name,
                s.outcome.as_str(),
                s.verdict.set_label.map(|l| l.as_str()).unwrap_or("unlabeled"),
                s.verdict.prediction.as_str()
            ),
            Err(e) => {
                eprint!("{}: ", cfg.name);
                code = Some(exit_for(&e));
            }
        }
    }
    code.map_or(Ok(()), Err)
}

fn report_cmd(run_dirs: Vec<PathBuf>, out: PathBuf) -> Result<(), ExitCode> {
    let report = emit_report(&run_dirs, &out).map_err(runtime)?;
    print!("{}", report.markdown());
    Ok(())
}

fn selftest() -> Result<(), ExitCode> {
    let checks = run_selftest();
    for c in &checks {
        println!("{:<22} {} {}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
    }
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(ExitCode::from(RUNTIME))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Groundstate { config, out } => groundstate(config, out),
        Command::Classify { config, out } => classify_cmd(config, out),
        Command::Evolve { config, out, threads } => evolve_cmd(config, out, threads),
        Command::Report { run_dirs, out } => report_cmd(run_dirs, out),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
