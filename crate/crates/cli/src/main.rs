use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use varorbit_cli::commands::{formulas_cmd, minimize_cmd, oracle_cmd, sweep_cmd, verify_cmd};
use varorbit_cli::config::{read_config_file, Overrides, Problem, RunConfig};
use varorbit_cli::CliError;

#[derive(Parser)]
#[command(name = "varorbit", version, about = "Fixed-energy variational periodic orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the two-body action from random loops, one run per seed.
    Minimize2(Shared),
    /// Minimize the three-body action from random loops, one run per seed.
    Minimize3(Shared),
    /// Sample a closed-form orbit (Kepler or Lagrange) and check it.
    Oracle(Shared),
    /// Compare the closed-form period and action formulas with numerics.
    Formulas(Shared),
    /// Run the oracle checks plus every minimizer check and report them.
    Verify(Shared),
    /// Minimize over a list of energies (`--sweep`) times every seed.
    Sweep(Shared),
}

#[derive(Args, Default)]
struct Shared {
    /// Flat key = value file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// two_body or three_body (oracle, formulas, verify, sweep).
    #[arg(long)]
    problem: Option<String>,
    /// Kepler coupling constant.
    #[arg(long)]
    a: Option<f64>,
    /// Two-body energy, negative.
    #[arg(long, allow_negative_numbers = true)]
    h: Option<f64>,
    #[arg(long)]
    m1: Option<f64>,
    #[arg(long)]
    m2: Option<f64>,
    #[arg(long)]
    m3: Option<f64>,
    /// Three-body energy, negative.
    #[arg(long = "E", allow_negative_numbers = true)]
    energy: Option<f64>,
    /// Fourier modes per loop.
    #[arg(long)]
    modes: Option<usize>,
    /// Quadrature nodes.
    #[arg(long)]
    grid: Option<usize>,
    /// Comma-separated seeds.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    winding: Option<i64>,
    /// Relative size of the random perturbation of the start loop.
    #[arg(long)]
    noise: Option<f64>,
    /// Oracle eccentricity.
    #[arg(long)]
    ecc: Option<f64>,
    /// Comma-separated energies for `sweep`.
    #[arg(long, allow_hyphen_values = true)]
    sweep: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    plots: bool,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Gradient-norm tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

impl Shared {
    fn overrides(&self) -> Overrides {
        let mut o = Overrides::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                o.insert(k.to_string(), v);
            }
        };
        put("problem", self.problem.clone());
        put("a", self.a.map(|v| v.to_string()));
        put("h", self.h.map(|v| v.to_string()));
        put("m1", self.m1.map(|v| v.to_string()));
        put("m2", self.m2.map(|v| v.to_string()));
        put("m3", self.m3.map(|v| v.to_string()));
        put("E", self.energy.map(|v| v.to_string()));
        put("modes", self.modes.map(|v| v.to_string()));
        put("grid", self.grid.map(|v| v.to_string()));
        put("seeds", self.seeds.clone());
        put("winding", self.winding.map(|v| v.to_string()));
        put("noise", self.noise.map(|v| v.to_string()));
        put("ecc", self.ecc.map(|v| v.to_string()));
        put("sweep", self.sweep.clone());
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("max_iters", self.max_iters.map(|v| v.to_string()));
        put("tol", self.tol.map(|v| v.to_string()));
        if self.plots {
            put("plots", Some("true".into()));
        }
        o
    }

    /// Defaults, then the config file, then the problem fixed by the
    /// subcommand, then flags.
    fn resolve(&self, fixed: Option<Problem>) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply(&read_config_file(path)?)?;
        }
        let mut flags = self.overrides();
        if let Some(p) = fixed {
            if flags.get("problem").is_some_and(|v| v != p.as_str()) {
                return Err(CliError::Config(format!("--problem conflicts with the subcommand ({})", p.as_str())));
            }
            flags.insert("problem".into(), p.as_str().into());
        }
        cfg.apply(&flags)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Minimize2(s) => minimize_cmd(&s.resolve(Some(Problem::TwoBody))?),
        Command::Minimize3(s) => minimize_cmd(&s.resolve(Some(Problem::ThreeBody))?),
        Command::Oracle(s) => oracle_cmd(&s.resolve(None)?),
        Command::Formulas(s) => formulas_cmd(&s.resolve(None)?),
        Command::Verify(s) => verify_cmd(&s.resolve(None)?),
        Command::Sweep(s) => sweep_cmd(&s.resolve(None)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("varorbit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
