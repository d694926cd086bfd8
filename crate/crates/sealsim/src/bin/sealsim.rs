//! Command-line driver: runs disturbance scenarios and critical-angle
//! sweeps, writing CSV/VTK outputs for plotting.
//!
//! Exit codes: 0 clean completion, 2 contact termination, 1 error.

use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sealsim::diagnostics::{period_closures, phase_points};
use sealsim::dynamics::{StepObserver, TimeSeriesRecord};
use sealsim::output::{write_closures, write_phase, write_timeseries, write_vtk, TimeSeriesWriter};
use sealsim::scenario::{parse_config, parse_config_str, preset, resolved_toml, PRESET_NAMES};
use sealsim::{
    critical_angle, find_equilibrium, run_transient, AnnulusMesh, ConfigFile, DynamicsError,
    PressureField, ScenarioSpec, SweepSpec,
};

#[derive(Parser)]
#[command(name = "sealsim", version, about = "Misaligned face-seal simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the stationary-rotor equilibrium height and static force.
    Equilibrium(CommonArgs),
    /// Integrate a disturbance scenario; writes timeseries.csv and VTK
    /// pressure snapshots.
    Run(CommonArgs),
    /// Integrate a scenario and write the per-period (g, dg/dt) phase
    /// portrait with closure distances.
    Phase(CommonArgs),
    /// Bisect the critical misalignment angle for each sweep amplitude.
    CriticalAngle(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset: example1, example2 or safety-sweep.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Force single-worker execution (overrides SEALSIM_WORKERS).
    #[arg(long)]
    deterministic: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Equilibrium(args) => cmd_equilibrium(args),
        Command::Run(args) => cmd_run(args),
        Command::Phase(args) => cmd_phase(args),
        Command::CriticalAngle(args) => cmd_critical_angle(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sealsim: error: {e}");
            ExitCode::from(1)
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] sealsim::ConfigError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

fn load(args: &CommonArgs) -> Result<ConfigFile, CliError> {
    let file = match (&args.config, &args.preset) {
        (Some(path), None) => parse_config(path)?,
        (None, Some(name)) => {
            let text = preset(name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown preset `{name}`; available: {}",
                    PRESET_NAMES.join(", ")
                ))
            })?;
            parse_config_str(text)?
        }
        _ => {
            return Err(CliError::Usage(
                "exactly one of --config or --preset is required".into(),
            ))
        }
    };
    Ok(file)
}

fn scenario_of(file: ConfigFile) -> Result<ScenarioSpec, CliError> {
    match file {
        ConfigFile::Scenario(s) => Ok(s),
        ConfigFile::Sweep(_) => Err(CliError::Usage(
            "this command needs a scenario config, got a sweep".into(),
        )),
    }
}

fn prepare_out(args: &CommonArgs, file: &ConfigFile) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out)?;
    std::fs::write(args.out.join("resolved_config.toml"), resolved_toml(file))?;
    Ok(())
}

fn cmd_equilibrium(args: &CommonArgs) -> Result<ExitCode, CliError> {
    let file = load(args)?;
    prepare_out(args, &file)?;
    let eq = find_equilibrium(file.config())?;
    println!("h_s_eq = {}", eq.h_s);
    println!("residual = {:e}", eq.residual);
    println!("force = {}", eq.force);
    std::fs::write(
        args.out.join("equilibrium.csv"),
        format!(
            "h_s_eq,residual,force,iterations\n{},{},{},{}\n",
            eq.h_s, eq.residual, eq.force, eq.iterations
        ),
    )?;
    Ok(ExitCode::SUCCESS)
}

/// Streams records to timeseries.csv and writes VTK snapshots as their
/// requested times are passed.
struct RunObserver {
    writer: Option<TimeSeriesWriter>,
    stride: usize,
    seen: usize,
    snapshot_times: Vec<f64>,
    next_snapshot: usize,
    out_dir: PathBuf,
    io_error: Option<io::Error>,
}

impl RunObserver {
    fn new(out_dir: &Path, stride: usize, snapshot_times: &[f64]) -> io::Result<Self> {
        let writer = TimeSeriesWriter::create(&out_dir.join("timeseries.csv"))?;
        let mut times = snapshot_times.to_vec();
        times.sort_by(f64::total_cmp);
        Ok(RunObserver {
            writer: Some(writer),
            stride,
            seen: 0,
            snapshot_times: times,
            next_snapshot: 0,
            out_dir: out_dir.to_path_buf(),
            io_error: None,
        })
    }

    fn try_step(
        &mut self,
        record: &TimeSeriesRecord,
        mesh: &AnnulusMesh,
        field: &PressureField,
    ) -> io::Result<()> {
        if self.seen % self.stride == 0 {
            if let Some(w) = self.writer.as_mut() {
                w.write_record(record)?;
            }
        }
        self.seen += 1;
        while self.next_snapshot < self.snapshot_times.len()
            && record.t + 1e-12 >= self.snapshot_times[self.next_snapshot]
        {
            let path = self
                .out_dir
                .join(format!("pressure_{:03}.vtk", self.next_snapshot));
            write_vtk(
                &path,
                mesh,
                field,
                &format!("pressure at t = {}", record.t),
            )?;
            self.next_snapshot += 1;
        }
        Ok(())
    }

    fn finish(mut self) -> io::Result<()> {
        if let Some(e) = self.io_error.take() {
            return Err(e);
        }
        match self.writer.take() {
            Some(w) => w.finish(),
            None => Ok(()),
        }
    }
}

impl StepObserver for RunObserver {
    fn on_step(&mut self, record: &TimeSeriesRecord, mesh: &AnnulusMesh, field: &PressureField) {
        if self.io_error.is_some() {
            return;
        }
        if let Err(e) = self.try_step(record, mesh, field) {
            self.io_error = Some(e);
        }
    }
}

fn cmd_run(args: &CommonArgs) -> Result<ExitCode, CliError> {
    let file = load(args)?;
    prepare_out(args, &file)?;
    let spec = scenario_of(file)?;
    let mut observer = RunObserver::new(&args.out, spec.record_stride, &spec.snapshot_times)?;
    let result = run_transient(&spec.config, spec.motion, spec.t_end, &mut observer)?;
    observer.finish()?;
    if let Some(contact) = result.contact {
        std::fs::write(
            args.out.join("contact.csv"),
            format!(
                "t_contact,g_min\n{},{}\n",
                contact.t_contact, contact.g_min
            ),
        )?;
        println!(
            "contact at t = {} (g_min = {:e})",
            contact.t_contact, contact.g_min
        );
        return Ok(ExitCode::from(2));
    }
    println!(
        "completed {} steps to t = {}",
        result.records.len(),
        result.records.last().map(|r| r.t).unwrap_or(0.0)
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_phase(args: &CommonArgs) -> Result<ExitCode, CliError> {
    let file = load(args)?;
    prepare_out(args, &file)?;
    let spec = scenario_of(file)?;
    let result = run_transient(&spec.config, spec.motion, spec.t_end, &mut ())?;
    write_timeseries(&args.out.join("timeseries.csv"), &result.records)?;
    let period = std::f64::consts::TAU;
    let points = phase_points(&result.records, spec.motion);
    write_phase(&args.out.join("phase.csv"), &points, period)?;
    let closures = period_closures(&points, period);
    write_closures(&args.out.join("phase_closure.csv"), &closures)?;
    if let Some(contact) = result.contact {
        println!("contact at t = {}", contact.t_contact);
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn worker_count(args: &CommonArgs) -> usize {
    if args.deterministic {
        return 1;
    }
    std::env::var("SEALSIM_WORKERS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn cmd_critical_angle(args: &CommonArgs) -> Result<ExitCode, CliError> {
    let file = load(args)?;
    prepare_out(args, &file)?;
    let sweep: SweepSpec = match file {
        ConfigFile::Sweep(s) => s,
        ConfigFile::Scenario(_) => {
            return Err(CliError::Usage(
                "critical-angle needs a sweep config ([sweep] table)".into(),
            ))
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(args))
        .build()
        .expect("thread pool");
    let jobs: Vec<(f64, (f64, f64))> = sweep
        .eps_values
        .iter()
        .copied()
        .zip(sweep.brackets.iter().copied())
        .collect();
    let results: Vec<Result<sealsim::CriticalAngleResult, DynamicsError>> = pool.install(|| {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(eps, bracket)| critical_angle(&sweep.config, eps, sweep.n_periods, bracket))
            .collect()
    });

    let mut summary = String::from("eps,beta_crit,status\n");
    for ((eps, _), result) in jobs.iter().zip(results.into_iter()) {
        match result {
            Ok(r) => {
                summary.push_str(&format!("{},{:.4},ok\n", eps, r.beta_crit));
                let mut audit = String::from("beta,contact,t_contact,g_min\n");
                for p in &r.audit {
                    audit.push_str(&format!(
                        "{},{},{},{}\n",
                        p.beta,
                        p.contact,
                        p.t_contact.map(|t| t.to_string()).unwrap_or_default(),
                        p.g_min
                    ));
                }
                std::fs::write(args.out.join(format!("audit_eps_{eps}.csv")), audit)?;
                println!("eps = {eps}: beta_crit = {:.4}", r.beta_crit);
            }
            Err(e @ (DynamicsError::BadBracket { .. } | DynamicsError::NoBracket { .. })) => {
                summary.push_str(&format!("{eps},,bracket_failed\n"));
                eprintln!("eps = {eps}: {e}");
            }
            Err(e) => return Err(CliError::Dynamics(e)),
        }
    }
    std::fs::write(args.out.join("critical_angle.csv"), summary)?;
    Ok(ExitCode::SUCCESS)
}
