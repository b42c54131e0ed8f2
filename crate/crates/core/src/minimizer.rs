//! Descent of the reduced action over loops of fixed winding, and recovery
//! of the physical orbit from a minimizer.
//!
//! The reduced action `f̃ = K·c²/(−E)` is invariant under scaling, so the
//! iteration works with unconstrained steps and re-projects every accepted
//! iterate onto the manifold `c = E`, where `f̃` and the full action agree.
//! Steps follow the gradient measured in the `W^{1,2}` metric (the Euclidean
//! coefficient gradient divided by the per-mode Sobolev weight), which keeps
//! high modes from dictating the step length.

use crate::error::{Error, Result};
use crate::functionals::{action_and_gradient, action_full, constraint_value, kinetic, project_to_manifold, total_energy, System};
use crate::loop_space::{min_distance, winding_number_with, FourierLoop, LoopSet, QuadratureGrid};
use crate::loop_space::NEAR_COLLISION_REL;
use crate::orbit::{OrbitSource, PhysicalOrbit, State};
use crate::scalar::Real;

/// Finest grid the minimizer refines to when a winding stops resolving.
pub const MAX_GRID: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions<T> {
    pub max_iters: usize,
    /// Converged once `|∇f̃| ≤ grad_tol·max(1, f̃)`.
    pub grad_tol: T,
    /// Largest trial step along the preconditioned descent direction.
    pub step_init: T,
    pub armijo_c: T,
    pub backtrack_factor: T,
    /// Absolute separation floor; `None` means `1e-5` times the largest
    /// separation-loop diameter of the projected start.
    pub collision_floor: Option<T>,
    /// Stop when the action changed by less than `stagnation_tol` (relative)
    /// over the last `stagnation_window` iterations.
    pub stagnation_window: usize,
    pub stagnation_tol: T,
}

impl<T: Real> Default for MinimizeOptions<T> {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            grad_tol: T::lit(1e-8),
            step_init: T::one(),
            armijo_c: T::lit(1e-4),
            backtrack_factor: T::lit(0.5),
            collision_floor: None,
            stagnation_window: 50,
            stagnation_tol: T::lit(1e-12),
        }
    }
}

impl<T: Real> MinimizeOptions<T> {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: T| v > T::zero() && v < T::one();
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        if !(self.grad_tol > T::zero()) || !(self.step_init > T::zero()) {
            return Err(Error::InvalidParameter("grad_tol and step_init must be positive".into()));
        }
        if !unit(self.armijo_c) || !unit(self.backtrack_factor) {
            return Err(Error::InvalidParameter("armijo_c and backtrack_factor must lie in (0, 1)".into()));
        }
        if self.collision_floor.is_some_and(|f| !(f > T::zero())) {
            return Err(Error::InvalidParameter("collision_floor must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIters,
    NearCollision,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIters => "max_iters",
            Status::NearCollision => "near_collision",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeResult<T, L> {
    /// Last accepted iterate, on the manifold.
    pub final_loop: L,
    pub action: T,
    pub period: T,
    pub gradient_norm: T,
    pub iterations: usize,
    pub status: Status,
    pub min_separation: T,
    /// `deg u`, or `deg(uᵢ − uⱼ)` per pair.
    pub windings: Vec<i64>,
    /// `½∫Σmᵢ|u̇ᵢ|²`
    pub factor_kinetic: T,
    /// `∫(E − V(u))`
    pub factor_potential: T,
    /// Grid size in use at the end (after any refinement).
    pub grid_size: usize,
    /// Action after every accepted step, starting with the projected start.
    pub history: Vec<T>,
}

/// Winding of every separation loop.
pub fn loop_windings<T: Real, L: LoopSet<T>>(l: &L, grid: &QuadratureGrid<T>) -> Result<Vec<i64>> {
    l.separation_loops()
        .iter()
        .map(|s| winding_number_with(s, grid, T::lit(NEAR_COLLISION_REL)))
        .collect()
}

/// Smallest separation over one period, refined between grid nodes.
pub fn loop_min_separation<T: Real, L: LoopSet<T>>(l: &L, grid: &QuadratureGrid<T>) -> T {
    l.separation_loops()
        .iter()
        .map(|s| min_distance(s, grid).0)
        .fold(T::infinity(), T::min)
}

fn separation_diameter<T: Real, L: LoopSet<T>>(l: &L, grid: &QuadratureGrid<T>) -> T {
    l.separation_loops()
        .iter()
        .map(|s| s.diameter(grid))
        .fold(T::zero(), T::max)
}

/// `W^{1,2}` steepest-descent direction: `−g` divided per mode by the
/// Sobolev weight. Weights are the same for every body, so the admissible
/// subspace `Σmᵢdᵢ = 0` is preserved.
fn descent_direction<T: Real, L: LoopSet<T>>(g: &L) -> L {
    g.with_bodies(
        g.bodies()
            .iter()
            .map(|b| b.map_coeffs(|k, c| -c / FourierLoop::<T>::sobolev_weight(k)))
            .collect(),
    )
}

enum Trial<T, L> {
    Accept(T, L),
    Reject,
    Unresolved,
}

/// Minimizes the reduced action from `start` within its winding class.
pub fn minimize<T: Real, S: System<T>>(
    start: &S::Loop,
    sys: &S,
    grid: &QuadratureGrid<T>,
    options: &MinimizeOptions<T>,
) -> Result<MinimizeResult<T, S::Loop>> {
    options.validate()?;
    sys.check_loop(start)?;
    let mut grid = grid.clone();
    grid.check_resolves(start.modes())?;

    let windings = loop_windings(start, &grid).map_err(|e| match e {
        Error::NearCollision { .. } => Error::BadStart("start loop has a collision".into()),
        Error::NonIntegerWinding { raw } => Error::BadStart(format!("start winding unresolved ({raw})")),
        e => e,
    })?;
    if windings.contains(&0) {
        return Err(Error::BadStart(format!("windings must be nonzero, got {windings:?}")));
    }

    let mut u = project_to_manifold(start, sys, &grid).map_err(|e| match e {
        Error::CollisionEncountered { .. } => Error::BadStart("start loop has a collision".into()),
        e => e,
    })?;
    let floor = options
        .collision_floor
        .unwrap_or_else(|| T::lit(1e-5) * separation_diameter(&u, &grid));

    let (mut f, mut g) = action_and_gradient(&u, sys, &grid)?;
    let mut history = vec![f];
    let mut grad_history = vec![g.coeff_norm()];
    let mut alpha = options.step_init;
    let mut iterations = 0;
    let mut min_sep = loop_min_separation(&u, &grid);
    let mut status = Status::MaxIters;

    let converged = |f: T, g: &S::Loop| g.coeff_norm() <= options.grad_tol * f.max(T::one());
    let max_backtracks = 80;

    while iterations < options.max_iters {
        if converged(f, &g) {
            status = Status::Converged;
            break;
        }
        if min_sep < floor {
            status = Status::NearCollision;
            break;
        }
        let d = descent_direction(&g);
        let slope = g.coeff_dot(&d);
        if !(slope < T::zero()) {
            break;
        }

        // Try a step twice as long as the last accepted one, capped.
        let mut step = (alpha + alpha).min(options.step_init);
        let mut accepted = None;
        let mut tries = 0;
        while tries < max_backtracks {
            let mut trial = u.clone();
            trial.axpy(step, &d);
            match try_step(&trial, sys, &grid, &windings, f, step, slope, options.armijo_c, &d) {
                Trial::Accept(ft, gt) => {
                    accepted = Some((trial, ft, gt));
                    break;
                }
                Trial::Reject => {
                    step = step * options.backtrack_factor;
                    tries += 1;
                }
                Trial::Unresolved if grid.len() * 2 <= MAX_GRID => {
                    grid = grid.refined()?;
                }
                Trial::Unresolved => {
                    step = step * options.backtrack_factor;
                    tries += 1;
                }
            }
        }
        let Some((trial, ft, gt)) = accepted else {
            break;
        };
        alpha = step;
        // f̃ is scale invariant, so the gradient at λu is ∇f̃(u)/λ
        let lambda = constraint_value(&trial, sys, &grid)? / sys.energy();
        u = trial.scaled(lambda);
        g = gt.scaled(T::one() / lambda);
        f = ft.min(f);
        history.push(f);
        iterations += 1;
        min_sep = loop_min_separation(&u, &grid);

        grad_history.push(g.coeff_norm());

        // Stagnation needs both a flat action and a gradient that stopped
        // shrinking; at the rounding floor of f the gradient still carries
        // information.
        let w = options.stagnation_window;
        if history.len() > w {
            let old = history[history.len() - 1 - w];
            let old_g = grad_history[grad_history.len() - 1 - w];
            let flat = (old - f).abs() <= options.stagnation_tol * f.abs();
            let stuck = grad_history[grad_history.len() - 1] > T::lit(0.99) * old_g;
            if flat && stuck {
                break;
            }
        }
    }
    if status == Status::MaxIters {
        if converged(f, &g) {
            status = Status::Converged;
        } else if min_sep < floor {
            status = Status::NearCollision;
        }
    }

    let parts = action_full(&u, sys, &grid)?;
    let period = recover_period(&u, sys, &grid)?;
    Ok(MinimizeResult {
        gradient_norm: g.coeff_norm(),
        action: f,
        period,
        iterations,
        status,
        min_separation: min_sep,
        windings,
        factor_kinetic: parts.kinetic,
        factor_potential: parts.potential,
        grid_size: grid.len(),
        history,
        final_loop: u,
    })
}

#[allow(clippy::too_many_arguments)]
fn try_step<T: Real, S: System<T>>(
    trial: &S::Loop,
    sys: &S,
    grid: &QuadratureGrid<T>,
    windings: &[i64],
    f: T,
    step: T,
    slope: T,
    armijo_c: T,
    d: &S::Loop,
) -> Trial<T, S::Loop> {
    match loop_windings(trial, grid) {
        Ok(w) if w == windings => {}
        Ok(_) | Err(Error::NearCollision { .. }) => return Trial::Reject,
        Err(Error::NonIntegerWinding { .. }) => return Trial::Unresolved,
        Err(_) => return Trial::Reject,
    }
    let Ok((ft, gt)) = action_and_gradient(trial, sys, grid) else {
        return Trial::Reject;
    };
    if ft <= f + armijo_c * step * slope {
        return Trial::Accept(ft, gt);
    }
    // Near the minimum the decrease drowns in the rounding of f; estimate it
    // instead from the gradients at both ends (trapezoid rule along the step).
    let noise = T::lit(ROUNDING_BAND) * f.abs();
    let estimate = step * T::lit(0.5) * (slope + gt.coeff_dot(d));
    if ft <= f + noise && estimate <= armijo_c * step * slope {
        Trial::Accept(ft, gt)
    } else {
        Trial::Reject
    }
}

/// Relative band of the action inside which changes are attributed to
/// rounding and the line search switches to the gradient-based estimate.
const ROUNDING_BAND: f64 = 1e-12;

/// Relative agreement required between the two period formulas.
pub const PERIOD_AGREEMENT_TOL: f64 = 1e-9;

/// Period of the physical orbit `x(t) = u(t/T)` of a loop on the manifold.
///
/// `1/T² = ∫V′(u)·u / ∫Σmᵢ|u̇ᵢ|²` from the equation of motion, checked
/// against `1/T² = ∫(E − V(u)) / (½∫Σmᵢ|u̇ᵢ|²)` from energy conservation.
pub fn recover_period<T: Real, S: System<T>>(l: &S::Loop, sys: &S, grid: &QuadratureGrid<T>) -> Result<T> {
    let kin = kinetic(l, sys);
    if !(kin >= T::lit(1e-14)) {
        return Err(Error::DegenerateLoop { kinetic: kin.as_f64() });
    }
    let parts = action_full(l, sys, grid)?;
    let c = constraint_value(l, sys, grid)?;
    // c = ½⟨V′·u⟩ + ⟨V⟩ and E − ⟨V⟩ is the potential factor
    let mean_v = sys.energy() - parts.potential;
    let virial = (c - mean_v) * T::lit(2.0);
    let inv_t2_motion = virial / (kin + kin);
    let inv_t2_energy = parts.potential / kin;
    let gap = (inv_t2_motion - inv_t2_energy).abs() / inv_t2_energy.abs();
    if !(gap <= T::lit(PERIOD_AGREEMENT_TOL)) || !(inv_t2_motion > T::zero()) {
        return Err(Error::OffManifold { constraint: c.as_f64(), target: sys.energy().as_f64() });
    }
    Ok(T::one() / inv_t2_motion.sqrt())
}

/// Samples `x(t) = u(t/T)` and `ẋ(t) = u̇(t/T)/T` at `samples` uniform times
/// on `[0, T)` (at least [`PhysicalOrbit::MIN_SAMPLES`]); the recorded energy
/// is the total energy at `t = 0`.
pub fn to_physical<T: Real, S: System<T>>(l: &S::Loop, period: T, sys: &S, samples: usize) -> Result<PhysicalOrbit<T>> {
    if !(period > T::zero()) {
        return Err(Error::InvalidParameter("period must be positive".into()));
    }
    let n = samples.max(PhysicalOrbit::<T>::MIN_SAMPLES);
    let inv_t = T::one() / period;
    let mut times = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    for j in 0..n {
        let s = T::of_usize(j) / T::of_usize(n);
        times.push(s * period);
        states.push(State::new(
            l.bodies().iter().map(|b| b.eval(s)).collect(),
            l.bodies().iter().map(|b| b.deriv(s) * inv_t).collect(),
        ));
    }
    let energy = total_energy(sys, &states[0])?;
    Ok(PhysicalOrbit { period, times, states, energy, source: OrbitSource::Minimizer })
}
