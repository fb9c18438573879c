use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use djcm_core::config::{eval, OutputFormat, RunConfig, SweepPhase};
use djcm_core::scenarios::{catalog, find, run_scenario, Scenario};
use djcm_core::selfcheck::run_selfcheck;
use djcm_core::{Error, Execution, Result, Solver, TimeSeriesTable};

/// Damped Jaynes-Cummings dynamics with correlated atom-mode initial states.
#[derive(Parser)]
#[command(name = "djcm", version, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in scenarios.
    List,
    /// Run a built-in scenario or a JSON run configuration.
    Run {
        /// Scenario name or path to a config file.
        target: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Sweep one relative phase over a list of values.
    Sweep {
        /// theta (one atom), theta1 or theta2 (two atoms).
        #[arg(long)]
        phase: String,
        /// Comma-separated angles, e.g. `0,0.5pi,pi`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        /// Config file supplying everything but the swept phase.
        #[arg(long)]
        base: Option<PathBuf>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the invariant suite and print one line per property.
    Selfcheck {
        #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
        tol: f64,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
struct RunOpts {
    /// csv or json; defaults to the config's choice, else csv.
    #[arg(long)]
    format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integrator tolerance.
    #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
    tol: f64,
    #[arg(long)]
    grid_points: Option<usize>,
    /// End time in units of the inverse coupling.
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Run series one after another instead of in parallel.
    #[arg(long)]
    sequential: bool,
}

impl RunOpts {
    fn solver(&self) -> Result<Solver> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Invalid {
                field: "tol".into(),
                reason: "must be positive and finite".into(),
            });
        }
        Ok(Solver::dopri5(self.tol))
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "config".into(), |s| s.to_string_lossy().into_owned())
}

fn emit(table: &TimeSeriesTable, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        OutputFormat::Csv => table.write_csv(&mut buf)?,
        OutputFormat::Json => {
            table.write_json(&mut buf)?;
            buf.push(b'\n');
        }
    }
    match out {
        Some(p) => File::create(p)
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                w.write_all(&buf)?;
                w.flush()
            })
            .map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut w = io::stdout().lock();
            match w.write_all(&buf).and_then(|()| w.flush()) {
                // A closed pipe (e.g. `| head`) is the reader's choice, not a failure.
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                other => other.map_err(Error::from),
            }
        }
    }
}

/// Run `scenario` with the flag overrides and write the table.
fn execute(scenario: Scenario, opts: &RunOpts, default_format: OutputFormat, default_out: Option<PathBuf>) -> Result<()> {
    let format = match &opts.format {
        Some(f) => f.parse()?,
        None => default_format,
    };
    let solver = opts.solver()?;
    let scenario = scenario.with_grid(opts.t_end, opts.grid_points)?;
    let table = run_scenario(&scenario, solver, opts.execution())?;
    emit(&table, format, opts.out.as_deref().or(default_out.as_deref()))
}

fn run(target: &str, opts: &RunOpts) -> Result<()> {
    if let Ok(s) = find(target) {
        return execute(s, opts, OutputFormat::Csv, None);
    }
    let path = Path::new(target);
    if !path.is_file() {
        return Err(Error::UnknownScenario(target.to_string()));
    }
    let cfg = RunConfig::load(path)?;
    let scenario = cfg.to_scenario(&stem(path))?;
    execute(scenario, opts, cfg.output.format, cfg.output.path.clone().map(PathBuf::from))
}

fn sweep(phase: &str, values: &[String], base: Option<&Path>, opts: &RunOpts) -> Result<()> {
    let phase: SweepPhase = phase.parse()?;
    let values = values.iter().map(|v| eval(v.trim())).collect::<Result<Vec<_>>>()?;
    let (cfg, name) = match base {
        Some(p) => (RunConfig::load(p)?, stem(p)),
        None if phase == SweepPhase::Theta => (RunConfig::default_one_atom(), "one-atom".to_string()),
        None => (RunConfig::default_two_atom(), "two-atom".to_string()),
    };
    let scenario = cfg.phase_sweep(&format!("{name}-{}-sweep", phase.name()), phase, &values)?;
    execute(scenario, opts, cfg.output.format, cfg.output.path.clone().map(PathBuf::from))
}

fn list() {
    for s in catalog() {
        let coupling = s.series[0].params.coupling;
        println!(
            "{:<8} {} [omega t in 0..{}, {} points, {} series]",
            s.name,
            s.description,
            s.grid.end() * coupling,
            s.grid.len(),
            s.series.len()
        );
    }
}

fn selfcheck(tol: f64, sequential: bool) -> ExitCode {
    if !(tol > 0.0 && tol.is_finite()) {
        eprintln!("error: invalid tol: must be positive and finite");
        return ExitCode::from(1);
    }
    let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
    let outcomes = run_selfcheck(Solver::dopri5(tol), exec);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} properties passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn report(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_numerical() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::List => {
            list();
            Ok(())
        }
        Command::Run { target, opts } => run(&target, &opts),
        Command::Sweep {
            phase,
            values,
            base,
            opts,
        } => sweep(&phase, &values, base.as_deref(), &opts),
        Command::Selfcheck { tol, sequential } => return selfcheck(tol, sequential),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
