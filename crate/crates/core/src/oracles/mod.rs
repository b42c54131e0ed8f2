//! Closed-form ground truth and brute-force measurement: Kepler orbits and
//! their period law, Gordon's fixed-period action, homographic Lagrange
//! solutions, and an RK4 integrator with a first-return period detector.

mod kepler;
mod lagrange;
mod ode;

pub use kepler::{
    gordon_bound_action, gordon_min_action, kepler_loop_action, kepler_orbit, kepler_period,
    solve_kepler_equation, KeplerElements, KEPLER_MAX_ITERS,
};
pub use lagrange::{
    lagrange_action, lagrange_period, lagrange_shape, lagrange_solution, LagrangeActions,
    LagrangePeriods, LagrangeShape,
};
pub use ode::{integrate_ode, measure_period, Trajectory, COLLISION_FLOOR_REL, RETURN_TOL};
