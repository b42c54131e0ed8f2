use crate::error::{Error, Result};
use crate::functionals::{min_separation, total_energy, System};
use crate::loop_space::golden_min;
use crate::orbit::State;
use crate::scalar::Real;
use crate::vec2::Vec2;

/// Fixed-step trajectory, `steps + 1` states including the initial one.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<State<T>>,
    /// `max_j |E_j − E_0| / |E_0|`
    pub energy_drift: T,
}

/// Separations below this fraction of the initial minimum separation abort
/// the integration.
pub const COLLISION_FLOOR_REL: f64 = 1e-6;

fn accelerations<T: Real, S: System<T>>(sys: &S, q: &[Vec2<T>], out: &mut [Vec2<T>]) -> Result<()> {
    sys.potential_gradient(q, out)?;
    for (a, &m) in out.iter_mut().zip(sys.masses()) {
        *a = -*a / m;
    }
    Ok(())
}

/// Classical fourth-order Runge–Kutta for `mᵢq̈ᵢ = −∂V/∂qᵢ`.
pub fn integrate_ode<T: Real, S: System<T>>(sys: &S, initial: &State<T>, duration: T, steps: usize) -> Result<Trajectory<T>> {
    let n = sys.body_count();
    if initial.bodies() != n {
        return Err(Error::ShapeMismatch(format!(
            "state has {} bodies, system has {n}",
            initial.bodies()
        )));
    }
    let e0 = total_energy(sys, initial)?;
    let floor = T::lit(COLLISION_FLOOR_REL) * min_separation(&initial.positions);
    let mut times = vec![T::zero()];
    let mut states = vec![initial.clone()];
    let mut drift = T::zero();
    if steps == 0 || duration == T::zero() {
        return Ok(Trajectory { times, states, energy_drift: drift });
    }
    let h = duration / T::of_usize(steps);
    let half = h * T::lit(0.5);
    let sixth = h / T::lit(6.0);

    let mut q = initial.positions.clone();
    let mut v = initial.velocities.clone();
    let (mut a1, mut a2, mut a3, mut a4) = (vec![Vec2::zero(); n], vec![Vec2::zero(); n], vec![Vec2::zero(); n], vec![Vec2::zero(); n]);
    let mut tmp = vec![Vec2::zero(); n];
    for step in 1..=steps {
        // k1
        accelerations(sys, &q, &mut a1)?;
        // k2 at q + h/2·v, velocity v + h/2·a1
        for i in 0..n {
            tmp[i] = q[i] + v[i] * half;
        }
        accelerations(sys, &tmp, &mut a2)?;
        let v2: Vec<_> = (0..n).map(|i| v[i] + a1[i] * half).collect();
        // k3
        for i in 0..n {
            tmp[i] = q[i] + v2[i] * half;
        }
        accelerations(sys, &tmp, &mut a3)?;
        let v3: Vec<_> = (0..n).map(|i| v[i] + a2[i] * half).collect();
        // k4
        for i in 0..n {
            tmp[i] = q[i] + v3[i] * h;
        }
        accelerations(sys, &tmp, &mut a4)?;
        let v4: Vec<_> = (0..n).map(|i| v[i] + a3[i] * h).collect();

        let two = T::lit(2.0);
        for i in 0..n {
            q[i] += (v[i] + v2[i] * two + v3[i] * two + v4[i]) * sixth;
            v[i] += (a1[i] + a2[i] * two + a3[i] * two + a4[i]) * sixth;
        }
        let sep = min_separation(&q);
        if !(sep > floor) {
            return Err(Error::CollisionEncountered { separation: sep.as_f64() });
        }
        let state = State::new(q.clone(), v.clone());
        let e = total_energy(sys, &state)?;
        drift = drift.max((e - e0).abs() / e0.abs());
        times.push(h * T::of_usize(step));
        states.push(state);
    }
    Ok(Trajectory { times, states, energy_drift: drift })
}

/// Relative phase-space distance accepted as a return to the initial state.
pub const RETURN_TOL: f64 = 1e-6;

/// First return time of the full state to the initial state.
///
/// Local minima of the phase-space distance `|s(t) − s(0)|/|s(0)|` are
/// located on the samples once the trajectory has left a neighbourhood of
/// its start, then refined by minimizing the distance of the quadratic
/// interpolant through the three surrounding samples.
pub fn measure_period<T: Real>(traj: &Trajectory<T>) -> Result<T> {
    let n = traj.states.len();
    if n < 3 {
        return Err(Error::NoReturn);
    }
    let s0 = &traj.states[0];
    let scale = s0.phase_norm();
    if !(scale > T::zero()) {
        return Err(Error::NoReturn);
    }
    let dist: Vec<T> = traj.states.iter().map(|s| s.phase_distance(s0) / scale).collect();
    let departed = T::lit(1e-2);
    let Some(start) = dist.iter().position(|&d| d > departed) else {
        return Err(Error::NoReturn);
    };
    let tol = T::lit(RETURN_TOL);
    for j in start.max(1)..n - 1 {
        if !(dist[j] <= dist[j - 1] && dist[j] <= dist[j + 1] && dist[j] < departed) {
            continue;
        }
        let h = traj.times[j + 1] - traj.times[j];
        let (prev, mid, next) = (&traj.states[j - 1], &traj.states[j], &traj.states[j + 1]);
        // Lagrange basis on nodes −1, 0, 1 (in units of h)
        let interp_dist = |tau: T| -> T {
            let half = T::lit(0.5);
            let wp = half * tau * (tau - T::one());
            let wm = T::one() - tau * tau;
            let wn = half * tau * (tau + T::one());
            let blend = |a: Vec2<T>, b: Vec2<T>, c: Vec2<T>| a * wp + b * wm + c * wn;
            let pos = prev
                .positions
                .iter()
                .zip(&mid.positions)
                .zip(&next.positions)
                .zip(&s0.positions)
                .fold(T::zero(), |acc, (((&a, &b), &c), &o)| acc + (blend(a, b, c) - o).norm_sq());
            let vel = prev
                .velocities
                .iter()
                .zip(&mid.velocities)
                .zip(&next.velocities)
                .zip(&s0.velocities)
                .fold(T::zero(), |acc, (((&a, &b), &c), &o)| acc + (blend(a, b, c) - o).norm_sq());
            (pos + vel).sqrt() / scale
        };
        let (tau, d) = golden_min(interp_dist, -T::one(), T::one(), 100);
        if d <= tol {
            return Ok(traj.times[j] + tau * h);
        }
    }
    Err(Error::NoReturn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{ThreeBodySystem, TwoBodySystem};
    use crate::oracles::lagrange::lagrange_solution;
    use std::f64::consts::PI;

    fn circular_start() -> State<f64> {
        State::new(vec![Vec2::new(1.0, 0.0)], vec![Vec2::new(0.0, 1.0)])
    }

    #[test]
    fn circular_kepler_returns_after_one_period() {
        let sys = TwoBodySystem::new(1.0, -0.5).unwrap();
        let traj = integrate_ode(&sys, &circular_start(), 2.0 * PI, 10_000).unwrap();
        let end = traj.states.last().unwrap();
        assert!(end.phase_distance(&circular_start()) < 1e-8);
        assert!(traj.energy_drift < 1e-10, "{}", traj.energy_drift);
    }

    #[test]
    fn zero_duration_is_initial_state() {
        let sys = TwoBodySystem::new(1.0, -0.5).unwrap();
        let traj = integrate_ode(&sys, &circular_start(), 0.0, 100).unwrap();
        assert_eq!(traj.states, vec![circular_start()]);
        let traj = integrate_ode(&sys, &circular_start(), 1.0, 0).unwrap();
        assert_eq!(traj.states.len(), 1);
    }

    #[test]
    fn circular_period_measured() {
        let sys = TwoBodySystem::new(1.0, -0.5).unwrap();
        let traj = integrate_ode(&sys, &circular_start(), 1.3 * 2.0 * PI, 13_000).unwrap();
        let t = measure_period(&traj).unwrap();
        assert!((t - 2.0 * PI).abs() < 1e-6 * 2.0 * PI, "{t}");
    }

    #[test]
    fn lagrange_circular_integration() {
        let orbit = lagrange_solution([1.0f64; 3], -0.5, 0.0, 64).unwrap();
        let sys = ThreeBodySystem::new([1.0; 3], -0.5).unwrap();
        let traj = integrate_ode(&sys, &orbit.states[0], 1.2 * 6.0 * PI, 12_000).unwrap();
        let t = measure_period(&traj).unwrap();
        assert!((t - 6.0 * PI).abs() < 1e-6 * 6.0 * PI, "{t}");
        let period_steps = 10_000;
        for s in &traj.states[..=period_steps] {
            let d = [
                (s.positions[0] - s.positions[1]).norm(),
                (s.positions[0] - s.positions[2]).norm(),
                (s.positions[1] - s.positions[2]).norm(),
            ];
            let spread = d.iter().cloned().fold(f64::MIN, f64::max) - d.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread / 3.0 < 1e-7, "{spread}");
        }
    }

    #[test]
    fn unbound_motion_never_returns() {
        let sys = TwoBodySystem::new(1.0, -0.5).unwrap();
        let start = State::new(vec![Vec2::new(1.0, 0.0)], vec![Vec2::new(0.0, 2.0)]);
        let traj = integrate_ode(&sys, &start, 50.0, 5_000).unwrap();
        assert_eq!(measure_period(&traj), Err(Error::NoReturn));
    }

    #[test]
    fn coincident_start_reports_collision() {
        let sys = ThreeBodySystem::new([1.0; 3], -0.5).unwrap();
        let p = Vec2::new(1.0, 0.0);
        let start = State::new(vec![p, p, -p * 2.0], vec![Vec2::zero(); 3]);
        let r = integrate_ode(&sys, &start, 1.0, 10);
        assert!(matches!(r, Err(Error::CollisionEncountered { .. })), "{r:?}");
    }
}
