//! Subcommand bodies.

use std::f64::consts::PI;

use serde::Serialize;
use varorbit::loop_space::com_project;
use varorbit::oracles::{
    integrate_ode, kepler_loop_action, kepler_orbit, kepler_period, lagrange_action, lagrange_period, lagrange_solution,
    measure_period, KeplerElements, LagrangeActions, LagrangePeriods,
};
use varorbit::verify::{action_identity, energy_conservation, equilateral_deviation, kinetic_identity, ode_residual};
use varorbit::{
    CheckReport64, FourierLoop64, PhysicalOrbit64, QuadratureGrid64, System, ThreeBodySystem64, TwoBodySystem64, Vec2f64,
};

use crate::config::{Problem, RunConfig};
use crate::output::{
    ensure_dir, fmt12, write_csv, write_json, CheckRow, Comparison, CHECK_HEADER, COMPARISON_HEADER,
};
use crate::run::{
    execute, jobs_for, run_jobs, write_plots, Job, KEPLER_BOUND_LABEL, KEPLER_PERIOD_LABEL, KEPLER_QUADRATURE_LABEL,
};
use crate::CliError;

/// Relative agreement for a period formula to count as matching RK4.
const PERIOD_MATCH_TOL: f64 = 1e-4;

/// RK4 steps per period for oracle integrations.
const STEPS_PER_PERIOD: f64 = 10_000.0;

/// Modes for refitting an oracle orbit: as many as the grid resolves.
fn oracle_fit_modes(cfg: &RunConfig) -> usize {
    (cfg.grid - 1) / 4
}

fn oracle_err(e: impl std::fmt::Display) -> CliError {
    CliError::Run(format!("oracle: {e}"))
}

/// `minimize2` / `minimize3`: every seed of one configuration.
pub fn minimize_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let jobs = jobs_for(cfg, 0);
    let outcomes = run_jobs(&jobs, &cfg.out, cfg.plots)?;
    for o in &outcomes {
        let r = &o.record.result;
        let passed = o.record.checks.iter().filter(|c| c.pass).count();
        println!(
            "{}: {} F = {} T = {} |g| = {} checks {passed}/{}",
            o.record.run_id,
            r.status,
            fmt12(r.action),
            fmt12(r.period),
            fmt12(r.gradient_norm),
            o.record.checks.len()
        );
    }
    Ok(())
}

/// `sweep`: every energy in `cfg.sweep` crossed with every seed.
pub fn sweep_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.sweep.is_empty() {
        return Err(CliError::Config("sweep must list at least one energy".into()));
    }
    let mut jobs: Vec<Job> = vec![];
    for &e in &cfg.sweep {
        let variant = cfg.with_energy(e);
        let n = jobs.len();
        jobs.extend(jobs_for(&variant, n));
    }
    let outcomes = run_jobs(&jobs, &cfg.out, cfg.plots)?;
    println!("{} runs written to {}", outcomes.len(), cfg.out.join("summary.csv").display());
    Ok(())
}

#[derive(Serialize)]
struct OracleRecord {
    kind: &'static str,
    parameters: Vec<(String, f64)>,
    eccentricity: f64,
    period: f64,
    action: f64,
    checks: Vec<CheckRow>,
}

fn rk4_period<S: System<f64>>(sys: &S, orbit: &PhysicalOrbit64, guess: f64) -> Result<(f64, f64), CliError> {
    let steps = (1.2 * STEPS_PER_PERIOD) as usize;
    let traj = integrate_ode(sys, &orbit.states[0], 1.2 * guess, steps).map_err(oracle_err)?;
    let t = measure_period(&traj).map_err(oracle_err)?;
    let one_period = &traj.states[..=STEPS_PER_PERIOD as usize];
    let drift = energy_conservation(one_period, sys, 1.0).map_err(oracle_err)?.rel_dev;
    Ok((t, drift))
}

/// Oracle orbit for the configured problem with its checks.
fn oracle_checks(cfg: &RunConfig) -> Result<(OracleRecord, PhysicalOrbit64), CliError> {
    let grid = QuadratureGrid64::new(cfg.grid).map_err(|e| CliError::Config(e.to_string()))?;
    match cfg.problem {
        Problem::TwoBody => {
            let sys = TwoBodySystem64::new(cfg.a, cfg.h).map_err(|e| CliError::Config(e.to_string()))?;
            let el = KeplerElements::new(cfg.a, cfg.h, cfg.ecc).map_err(|e| CliError::Config(e.to_string()))?;
            let orbit = kepler_orbit(&el, cfg.grid).map_err(oracle_err)?;
            let action = kepler_loop_action(cfg.a, cfg.h, cfg.ecc, &grid).map_err(oracle_err)?;
            let law = kepler_period(cfg.a, cfg.h).map_err(oracle_err)?;
            let fitted = FourierLoop64::fit(&orbit.track(0), oracle_fit_modes(cfg)).map_err(oracle_err)?;
            let residual = ode_residual(&fitted, orbit.period, &sys, &grid).map_err(oracle_err)?;
            let (measured, drift) = rk4_period(&sys, &orbit, law)?;
            let checks = vec![
                action_identity(&orbit, &sys, action, 1e-8).map_err(oracle_err)?,
                energy_conservation(&orbit.states, &sys, 1e-10).map_err(oracle_err)?,
                CheckReport64::below("ode_residual", residual, 1e-6, format!("Fourier fit with {} modes", oracle_fit_modes(cfg))),
                CheckReport64::compare("rk4_period", measured, law, 1e-4, format!("first return of RK4 vs {KEPLER_PERIOD_LABEL}")),
                CheckReport64::below("rk4_energy_drift", drift, 1e-8, "RK4 over one period, 10⁴ steps"),
            ];
            let record = OracleRecord {
                kind: "kepler",
                parameters: vec![("a".into(), cfg.a), ("h".into(), cfg.h)],
                eccentricity: cfg.ecc,
                period: orbit.period,
                action,
                checks: checks.into_iter().map(CheckRow::from).collect(),
            };
            Ok((record, orbit))
        }
        Problem::ThreeBody => {
            let (m, e) = (cfg.masses, cfg.energy3);
            let sys = ThreeBodySystem64::new(m, e).map_err(|e| CliError::Config(e.to_string()))?;
            let orbit = lagrange_solution(m, e, cfg.ecc, cfg.grid).map_err(oracle_err)?;
            let action = lagrange_action(m, e, cfg.ecc, &grid).map_err(oracle_err)?.quadrature;
            let composed = lagrange_period(m, e).map_err(oracle_err)?.composed;
            let loops = [0, 1, 2].map(|b| FourierLoop64::fit(&orbit.track(b), oracle_fit_modes(cfg)));
            let [l0, l1, l2] = loops;
            let fitted = com_project([l0.map_err(oracle_err)?, l1.map_err(oracle_err)?, l2.map_err(oracle_err)?], m).map_err(oracle_err)?;
            let residual = ode_residual(&fitted, orbit.period, &sys, &grid).map_err(oracle_err)?;
            let (measured, drift) = rk4_period(&sys, &orbit, composed)?;
            let mut worst_kinetic = CheckReport64::below("kinetic_identity", 0.0, 1e-12, "");
            for s in &orbit.states {
                let v: [Vec2f64; 3] = [s.velocities[0], s.velocities[1], s.velocities[2]];
                let r = kinetic_identity(&v, m).map_err(oracle_err)?;
                if r.rel_dev >= worst_kinetic.rel_dev {
                    worst_kinetic = r;
                }
            }
            let checks = vec![
                action_identity(&orbit, &sys, action, 1e-8).map_err(oracle_err)?,
                energy_conservation(&orbit.states, &sys, 1e-10).map_err(oracle_err)?,
                CheckReport64::below("ode_residual", residual, 1e-6, format!("Fourier fit with {} modes", oracle_fit_modes(cfg))),
                CheckReport64::below(
                    "equilateral_deviation",
                    equilateral_deviation(&orbit).map_err(oracle_err)?,
                    1e-12,
                    "max (max − min)/mean of the mutual distances",
                ),
                worst_kinetic,
                CheckReport64::compare("rk4_period", measured, composed, 1e-4, format!("first return of RK4 vs {}", LagrangePeriods::<f64>::LABELS[2])),
                CheckReport64::below("rk4_energy_drift", drift, 1e-8, "RK4 over one period, 10⁴ steps"),
            ];
            let record = OracleRecord {
                kind: "lagrange",
                parameters: vec![("m1".into(), m[0]), ("m2".into(), m[1]), ("m3".into(), m[2]), ("E".into(), e)],
                eccentricity: cfg.ecc,
                period: orbit.period,
                action,
                checks: checks.into_iter().map(CheckRow::from).collect(),
            };
            Ok((record, orbit))
        }
    }
}

fn print_checks(source: &str, checks: &[CheckRow]) {
    for c in checks {
        let tag = if c.pass { "pass" } else { "FAIL" };
        println!("{source} {tag} {}: {} vs {} (rel {:.2e}, tol {:.0e})", c.name, fmt12(c.left), fmt12(c.right), c.rel_dev, c.tol);
    }
}

/// `oracle`: closed-form orbit, its samples, and its checks.
pub fn oracle_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let (record, orbit) = oracle_checks(cfg)?;
    ensure_dir(&cfg.out)?;
    let stem = format!("oracle_{}", record.kind);
    write_json(&cfg.out.join(format!("{stem}.json")), &record)?;
    let mut rows = vec![];
    for (t, s) in orbit.times.iter().zip(&orbit.states) {
        for (b, (q, v)) in s.positions.iter().zip(&s.velocities).enumerate() {
            rows.push(vec![fmt12(*t), b.to_string(), fmt12(q.x), fmt12(q.y), fmt12(v.x), fmt12(v.y)]);
        }
    }
    write_csv(&cfg.out.join(format!("{stem}_samples.csv")), &["t", "body", "x", "y", "vx", "vy"], &rows)?;
    if cfg.plots {
        write_plots(&cfg.out, &stem, &orbit, &[])?;
    }
    println!("{stem}: T = {} F = {}", fmt12(record.period), fmt12(record.action));
    print_checks(&stem, &record.checks);
    if record.checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(CliError::Run("oracle checks failed".into()))
    }
}

/// `verify`: oracle checks plus the checks of every minimizer run.
pub fn verify_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    ensure_dir(&cfg.out)?;
    let (oracle, _) = oracle_checks(cfg)?;
    let mut rows: Vec<Vec<String>> = oracle.checks.iter().map(|c| c.csv_cells("oracle")).collect();
    print_checks("oracle", &oracle.checks);
    let mut all_pass = oracle.checks.iter().all(|c| c.pass);
    let mut runs = vec![];
    for job in jobs_for(cfg, 0) {
        let o = execute(&job)?;
        rows.extend(o.record.checks.iter().map(|c| c.csv_cells(&job.run_id)));
        print_checks(&job.run_id, &o.record.checks);
        all_pass &= o.record.checks.iter().all(|c| c.pass);
        runs.push(o.record);
    }
    write_csv(&cfg.out.join("verify.csv"), &CHECK_HEADER, &rows)?;
    #[derive(Serialize)]
    struct VerifyRecord<'a> {
        oracle: &'a OracleRecord,
        runs: &'a [crate::run::OutputRecord],
    }
    write_json(&cfg.out.join("verify.json"), &VerifyRecord { oracle: &oracle, runs: &runs })?;
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Run("verification checks failed".into()))
    }
}

/// Formula adjudication rows for the configured problem.
pub fn formula_rows(cfg: &RunConfig) -> Result<Vec<Comparison>, CliError> {
    let grid = QuadratureGrid64::new(cfg.grid).map_err(|e| CliError::Config(e.to_string()))?;
    let job = jobs_for(cfg, 0).into_iter().next().expect("validated config has a seed");
    let run = execute(&job)?.record.result;
    let mut rows = vec![];
    match cfg.problem {
        Problem::TwoBody => {
            let bound = varorbit::oracles::gordon_bound_action(cfg.a, cfg.h).map_err(oracle_err)?;
            let quadrature = kepler_loop_action(cfg.a, cfg.h, cfg.ecc, &grid).map_err(oracle_err)?;
            let closed = 0.5 * PI * PI * cfg.a * cfg.a / -cfg.h;
            let law = kepler_period(cfg.a, cfg.h).map_err(oracle_err)?;
            rows.push(Comparison::new("action", KEPLER_BOUND_LABEL, bound, KEPLER_QUADRATURE_LABEL, quadrature));
            rows.push(Comparison::new("action", KEPLER_BOUND_LABEL, bound, "minimizer", run.action));
            rows.push(Comparison::new("action", KEPLER_QUADRATURE_LABEL, quadrature, "minimizer", run.action));
            rows.push(Comparison::new("action", "F = ½π²a²/(−h)", closed, "minimizer", run.action));
            rows.push(Comparison::new("period", KEPLER_PERIOD_LABEL, law, "minimizer", run.period));
        }
        Problem::ThreeBody => {
            let (m, e) = (cfg.masses, cfg.energy3);
            let sys = ThreeBodySystem64::new(m, e).map_err(|e| CliError::Config(e.to_string()))?;
            let periods = lagrange_period(m, e).map_err(oracle_err)?;
            let circular = lagrange_solution(m, e, 0.0, cfg.grid).map_err(oracle_err)?;
            let (measured, _) = rk4_period(&sys, &circular, periods.composed)?;
            for (&v, label) in periods.values().iter().zip(LagrangePeriods::<f64>::LABELS) {
                rows.push(Comparison::new("period", label, v, "RK4 measured", measured));
            }
            rows.push(Comparison::new("period", "minimizer", run.period, "RK4 measured", measured));
            let actions = lagrange_action(m, e, cfg.ecc, &grid).map_err(oracle_err)?;
            rows.push(Comparison::new(
                "action",
                LagrangeActions::<f64>::CLOSED_FORM_LABEL,
                actions.closed_form,
                LagrangeActions::<f64>::QUADRATURE_LABEL,
                actions.quadrature,
            ));
            rows.push(Comparison::new("action", LagrangeActions::<f64>::CLOSED_FORM_LABEL, actions.closed_form, "minimizer", run.action));
            rows.push(Comparison::new("action", LagrangeActions::<f64>::QUADRATURE_LABEL, actions.quadrature, "minimizer", run.action));
        }
    }
    Ok(rows)
}

/// `formulas`: the adjudication table as CSV, JSON and stdout.
pub fn formulas_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let rows = formula_rows(cfg)?;
    ensure_dir(&cfg.out)?;
    let cells: Vec<Vec<String>> = rows.iter().map(Comparison::csv_cells).collect();
    write_csv(&cfg.out.join("formulas.csv"), &COMPARISON_HEADER, &cells)?;
    // period formulas that reproduce the RK4 measurement
    let matches: Vec<&str> = rows
        .iter()
        .filter(|r| r.reference_label == "RK4 measured" && r.label != "minimizer" && r.relative_gap <= PERIOD_MATCH_TOL)
        .map(|r| r.label.as_str())
        .collect();
    #[derive(Serialize)]
    struct FormulasRecord<'a> {
        rows: &'a [Comparison],
        #[serde(skip_serializing_if = "Option::is_none")]
        period_matches: Option<&'a [&'a str]>,
    }
    let three = cfg.problem == Problem::ThreeBody;
    write_json(
        &cfg.out.join("formulas.json"),
        &FormulasRecord { rows: &rows, period_matches: three.then_some(&matches[..]) },
    )?;
    for r in &rows {
        println!(
            "{:<7} {:<40} {:>20}  vs {:<36} {:>20}  gap {:.4e}",
            r.quantity,
            r.label,
            fmt12(r.value),
            r.reference_label,
            fmt12(r.reference),
            r.relative_gap
        );
    }
    if three {
        println!("period formulas matching RK4 within {PERIOD_MATCH_TOL:.0e}: {}", if matches.is_empty() { "none".to_string() } else { matches.join("; ") });
    }
    Ok(())
}
