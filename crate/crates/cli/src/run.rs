//! Minimization runs and their records.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use varorbit::loop_space::{random_loop, random_triple};
use varorbit::minimizer::{minimize, to_physical, MinimizeResult};
use varorbit::oracles::{gordon_bound_action, kepler_loop_action, kepler_period, lagrange_action, lagrange_period, LagrangeActions, LagrangePeriods};
use varorbit::verify::{action_identity, energy_conservation, equilateral_deviation, ode_residual};
use varorbit::{
    CheckReport64, LoopSet, MinimizeOptions64, PhysicalOrbit64, QuadratureGrid64, System, ThreeBodySystem64, TwoBodySystem64,
};

use crate::config::{Problem, RunConfig};
use crate::output::{ensure_dir, fmt12, plots_dir, write_csv, write_json, write_text, CheckRow, Comparison};
use crate::plot::{convergence_svg, orbit_svg};
use crate::CliError;

/// Tolerances of the per-run checks.
pub const IDENTITY_TOL: f64 = 1e-3;
pub const PERIOD_TOL: f64 = 5e-3;
pub const RESIDUAL_TOL: f64 = 1e-3;
pub const ENERGY_TOL: f64 = 1e-4;
pub const EQUILATERAL_TOL: f64 = 1e-2;

/// Orbit samples used for checks and plots.
const ORBIT_SAMPLES: usize = 512;

pub const KEPLER_BOUND_LABEL: &str = "F ≥ 9π²·2^(−13/3)·a²/(−h)";
pub const KEPLER_QUADRATURE_LABEL: &str = "F on the Kepler loop (quadrature)";
pub const KEPLER_PERIOD_LABEL: &str = "T = 2π a (−2h)^(−3/2)";

/// Configuration actually used by one run.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub problem: Problem,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub masses: Option<[f64; 3]>,
    #[serde(rename = "E", skip_serializing_if = "Option::is_none")]
    pub energy3: Option<f64>,
    pub modes: usize,
    pub grid: usize,
    pub seed: u64,
    pub winding: i64,
    pub noise: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl ConfigEcho {
    fn new(cfg: &RunConfig, seed: u64) -> Self {
        let two = cfg.problem == Problem::TwoBody;
        Self {
            problem: cfg.problem,
            a: two.then_some(cfg.a),
            h: two.then_some(cfg.h),
            masses: (!two).then_some(cfg.masses),
            energy3: (!two).then_some(cfg.energy3),
            modes: cfg.modes,
            grid: cfg.grid,
            seed,
            winding: cfg.winding,
            noise: cfg.noise,
            max_iters: cfg.max_iters,
            tol: cfg.tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultSummary {
    pub status: String,
    pub action: f64,
    pub period: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub min_separation: f64,
    pub windings: Vec<i64>,
    pub factor_kinetic: f64,
    pub factor_potential: f64,
    pub grid_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilateral_deviation: Option<f64>,
}

/// One JSON file per run.
#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub run_id: String,
    pub config: ConfigEcho,
    pub result: ResultSummary,
    pub oracle: Vec<Comparison>,
    pub checks: Vec<CheckRow>,
}

/// A finished run: its record plus what the plots need.
pub struct RunOutcome {
    pub record: OutputRecord,
    pub orbit: PhysicalOrbit64,
    pub history: Vec<f64>,
}

fn minimize_options(cfg: &RunConfig) -> MinimizeOptions64 {
    MinimizeOptions64 { max_iters: cfg.max_iters, grad_tol: cfg.tol, ..Default::default() }
}

fn run_failed(e: impl std::fmt::Display, what: &str) -> CliError {
    CliError::Run(format!("{what}: {e}"))
}

fn summary<L: LoopSet<f64>>(r: &MinimizeResult<f64, L>, equilateral: Option<f64>) -> ResultSummary {
    ResultSummary {
        status: r.status.as_str().to_string(),
        action: r.action,
        period: r.period,
        gradient_norm: r.gradient_norm,
        iterations: r.iterations,
        min_separation: r.min_separation,
        windings: r.windings.clone(),
        factor_kinetic: r.factor_kinetic,
        factor_potential: r.factor_potential,
        grid_size: r.grid_size,
        equilateral_deviation: equilateral,
    }
}

/// Checks shared by both problems. `oracle_period` must come from a formula,
/// not from the loop, for the action identity to say anything.
fn common_checks<S: System<f64>>(
    r: &MinimizeResult<f64, S::Loop>,
    sys: &S,
    grid: &QuadratureGrid64,
    oracle_period: f64,
    period_label: &str,
) -> Result<(Vec<CheckReport64>, PhysicalOrbit64), CliError> {
    let orbit = to_physical(&r.final_loop, r.period, sys, ORBIT_SAMPLES).map_err(|e| run_failed(e, "to_physical"))?;
    let at_oracle = to_physical(&r.final_loop, oracle_period, sys, ORBIT_SAMPLES).map_err(|e| run_failed(e, "to_physical"))?;
    let grid = QuadratureGrid64::new(r.grid_size.max(grid.len())).map_err(|e| run_failed(e, "grid"))?;
    let residual = ode_residual(&r.final_loop, r.period, sys, &grid).map_err(|e| run_failed(e, "ode_residual"))?;
    let checks = vec![
        action_identity(&at_oracle, sys, r.action, IDENTITY_TOL).map_err(|e| run_failed(e, "action_identity"))?,
        CheckReport64::compare(
            "period",
            r.period,
            oracle_period,
            PERIOD_TOL,
            format!("recovered T = sqrt(∫Σm|u̇|² / ∫V′(u)·u) vs {period_label}"),
        ),
        CheckReport64::below("ode_residual", residual, RESIDUAL_TOL, "max |mq̈ + ∇V| / max |∇V| on the grid"),
        energy_conservation(&orbit.states, sys, ENERGY_TOL).map_err(|e| run_failed(e, "energy"))?,
    ];
    Ok((checks, orbit))
}

pub fn run_two_body(cfg: &RunConfig, seed: u64, run_id: String) -> Result<RunOutcome, CliError> {
    let sys = TwoBodySystem64::new(cfg.a, cfg.h).map_err(|e| CliError::Config(e.to_string()))?;
    let grid = QuadratureGrid64::new(cfg.grid).map_err(|e| CliError::Config(e.to_string()))?;
    let start = random_loop(seed, cfg.modes, cfg.winding, cfg.noise).map_err(|e| CliError::Config(e.to_string()))?;
    let r = minimize(&start, &sys, &grid, &minimize_options(cfg)).map_err(|e| run_failed(e, "minimize"))?;

    let turns = cfg.winding.unsigned_abs() as f64;
    let law = kepler_period(cfg.a, cfg.h).map_err(|e| run_failed(e, "kepler_period"))?;
    let bound = gordon_bound_action(cfg.a, cfg.h).map_err(|e| run_failed(e, "bound"))?;
    let quadrature = kepler_loop_action(cfg.a, cfg.h, 0.0, &grid).map_err(|e| run_failed(e, "kepler_loop_action"))?;

    let (mut checks, orbit) = common_checks(&r, &sys, &grid, turns * law, KEPLER_PERIOD_LABEL)?;
    checks.push(CheckReport64::at_least("action_bound", r.action, bound, 1e-9, format!("minimizer F vs {KEPLER_BOUND_LABEL}")));
    let oracle = vec![
        Comparison::new("action", KEPLER_BOUND_LABEL, bound, "minimizer", r.action),
        Comparison::new("action", KEPLER_QUADRATURE_LABEL, quadrature, "minimizer", r.action),
        Comparison::new("period", KEPLER_PERIOD_LABEL, turns * law, "minimizer", r.period),
    ];
    Ok(RunOutcome {
        record: OutputRecord {
            run_id,
            config: ConfigEcho::new(cfg, seed),
            result: summary(&r, None),
            oracle,
            checks: checks.into_iter().map(CheckRow::from).collect(),
        },
        orbit,
        history: r.history,
    })
}

pub fn run_three_body(cfg: &RunConfig, seed: u64, run_id: String) -> Result<RunOutcome, CliError> {
    let sys = ThreeBodySystem64::new(cfg.masses, cfg.energy3).map_err(|e| CliError::Config(e.to_string()))?;
    let grid = QuadratureGrid64::new(cfg.grid).map_err(|e| CliError::Config(e.to_string()))?;
    let start = random_triple(seed, cfg.modes, cfg.winding, cfg.noise, cfg.masses).map_err(|e| CliError::Config(e.to_string()))?;
    let r = minimize(&start, &sys, &grid, &minimize_options(cfg)).map_err(|e| run_failed(e, "minimize"))?;

    let turns = cfg.winding.unsigned_abs() as f64;
    let periods = lagrange_period(cfg.masses, cfg.energy3).map_err(|e| run_failed(e, "lagrange_period"))?;
    let actions = lagrange_action(cfg.masses, cfg.energy3, 0.0, &grid).map_err(|e| run_failed(e, "lagrange_action"))?;
    let labels = LagrangePeriods::<f64>::LABELS;

    let (mut checks, orbit) = common_checks(&r, &sys, &grid, turns * periods.composed, labels[2])?;
    let equilateral = equilateral_deviation(&orbit).map_err(|e| run_failed(e, "equilateral"))?;
    checks.push(CheckReport64::below(
        "equilateral_deviation",
        equilateral,
        EQUILATERAL_TOL,
        "max (max − min)/mean of the mutual distances",
    ));
    let mut oracle: Vec<Comparison> = periods
        .values()
        .iter()
        .zip(labels)
        .map(|(&v, l)| Comparison::new("period", l, turns * v, "minimizer", r.period))
        .collect();
    oracle.push(Comparison::new("action", LagrangeActions::<f64>::CLOSED_FORM_LABEL, actions.closed_form, "minimizer", r.action));
    oracle.push(Comparison::new("action", LagrangeActions::<f64>::QUADRATURE_LABEL, actions.quadrature, "minimizer", r.action));
    Ok(RunOutcome {
        record: OutputRecord {
            run_id,
            config: ConfigEcho::new(cfg, seed),
            result: summary(&r, Some(equilateral)),
            oracle,
            checks: checks.into_iter().map(CheckRow::from).collect(),
        },
        orbit,
        history: r.history,
    })
}

/// One configured run: a config variant and a seed.
pub struct Job {
    pub cfg: RunConfig,
    pub seed: u64,
    pub run_id: String,
}

/// Jobs for every seed of `cfg`, ids numbered from `first`.
pub fn jobs_for(cfg: &RunConfig, first: usize) -> Vec<Job> {
    cfg.seeds
        .iter()
        .enumerate()
        .map(|(i, &seed)| Job {
            cfg: cfg.clone(),
            seed,
            run_id: format!("{}_{:03}_s{seed}", cfg.problem.as_str(), first + i),
        })
        .collect()
}

pub fn execute(job: &Job) -> Result<RunOutcome, CliError> {
    match job.cfg.problem {
        Problem::TwoBody => run_two_body(&job.cfg, job.seed, job.run_id.clone()),
        Problem::ThreeBody => run_three_body(&job.cfg, job.seed, job.run_id.clone()),
    }
}

pub const SUMMARY_HEADER: [&str; 16] = [
    "run_id",
    "problem",
    "energy",
    "seed",
    "modes",
    "grid",
    "winding",
    "action",
    "period",
    "status",
    "gradient_norm",
    "min_separation",
    "iterations",
    "checks_passed",
    "checks_total",
    "error",
];

fn summary_row(job: &Job, outcome: &Result<RunOutcome, CliError>) -> Vec<String> {
    let mut row = vec![
        job.run_id.clone(),
        job.cfg.problem.as_str().to_string(),
        fmt12(job.cfg.energy()),
        job.seed.to_string(),
        job.cfg.modes.to_string(),
        job.cfg.grid.to_string(),
        job.cfg.winding.to_string(),
    ];
    match outcome {
        Ok(o) => {
            let r = &o.record.result;
            let passed = o.record.checks.iter().filter(|c| c.pass).count();
            row.extend([
                fmt12(r.action),
                fmt12(r.period),
                r.status.clone(),
                fmt12(r.gradient_norm),
                fmt12(r.min_separation),
                r.iterations.to_string(),
                passed.to_string(),
                o.record.checks.len().to_string(),
                String::new(),
            ]);
        }
        Err(e) => {
            row.extend(["", "", "error", "", "", "", "", ""].map(String::from));
            row.push(e.to_string());
        }
    }
    row
}

/// Runs every job (concurrently), then writes per-run JSON, plots and the
/// summary in job order. Fails with the first run error after all files
/// are written.
pub fn run_jobs(jobs: &[Job], out: &Path, plots: bool) -> Result<Vec<RunOutcome>, CliError> {
    ensure_dir(out)?;
    if plots {
        ensure_dir(&plots_dir(out))?;
    }
    let outcomes: Vec<Result<RunOutcome, CliError>> = jobs.par_iter().map(execute).collect();

    let mut rows = Vec::with_capacity(jobs.len());
    for (job, outcome) in jobs.iter().zip(&outcomes) {
        if let Err(e @ CliError::Config(_)) = outcome {
            return Err(e.clone());
        }
        rows.push(summary_row(job, outcome));
        if let Ok(o) = outcome {
            write_json(&out.join(format!("run_{}.json", job.run_id)), &o.record)?;
            if plots {
                write_plots(out, &o.record.run_id, &o.orbit, &o.history)?;
            }
        }
    }
    write_csv(&out.join("summary.csv"), &SUMMARY_HEADER, &rows)?;

    let mut done = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        done.push(o?);
    }
    Ok(done)
}

pub fn write_plots(out: &Path, run_id: &str, orbit: &PhysicalOrbit64, history: &[f64]) -> Result<(), CliError> {
    let dir = plots_dir(out);
    ensure_dir(&dir)?;
    let tracks: Vec<Vec<(f64, f64)>> = (0..orbit.bodies())
        .map(|b| orbit.track(b).iter().map(|p| (p.x, p.y)).collect())
        .collect();
    write_text(&dir.join(format!("{run_id}_orbit.svg")), &orbit_svg(&format!("{run_id}: orbit, T = {:.6}", orbit.period), &tracks))?;
    if !history.is_empty() {
        write_text(&dir.join(format!("{run_id}_convergence.svg")), &convergence_svg(&format!("{run_id}: action per accepted step"), history))?;
    }
    Ok(())
}
