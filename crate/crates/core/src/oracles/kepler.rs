use crate::error::{Error, Result};
use crate::functionals::{action_full_sampled, TwoBodySystem};
use crate::loop_space::QuadratureGrid;
use crate::orbit::{OrbitSource, PhysicalOrbit, State};
use crate::scalar::Real;
use crate::vec2::Vec2;

fn require_negative<T: Real>(h: T) -> Result<()> {
    if !(h < T::zero()) || !h.is_finite() {
        return Err(Error::InvalidEnergy { energy: h.as_f64() });
    }
    Ok(())
}

fn require_positive<T: Real>(name: &str, x: T) -> Result<()> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

/// Period of every bound Kepler orbit at energy `h`: `T = 2π(−2h)^{−3/2}a`.
pub fn kepler_period<T: Real>(coupling: T, energy: T) -> Result<T> {
    require_positive("coupling", coupling)?;
    require_negative(energy)?;
    Ok(T::two_pi() * (-(energy + energy)).powf(T::lit(-1.5)) * coupling)
}

/// Least fixed-period action `∫₀ᵀ(½|ẋ|² + a/|x|)dt` over non-contractible
/// loops, `(3/2)(2π)^{2/3}a^{2/3}T^{1/3}`, attained by Kepler ellipses.
pub fn gordon_min_action<T: Real>(coupling: T, period: T) -> T {
    let third = T::one() / T::lit(3.0);
    T::lit(1.5) * T::two_pi().powf(third + third) * coupling.powf(third + third) * period.powf(third)
}

/// `9π²·2^{−13/3}·a²/(−h)`: the value that Gordon's fixed-period bound with
/// coupling `a/2` combined with the Kepler period law yields for the
/// fixed-energy action. It is a lower bound for every critical point, not
/// necessarily the attained minimum.
pub fn gordon_bound_action<T: Real>(coupling: T, energy: T) -> Result<T> {
    require_positive("coupling", coupling)?;
    require_negative(energy)?;
    let pi = T::PI();
    Ok(T::lit(9.0) * pi * pi * T::lit(2.0).powf(T::lit(-13.0 / 3.0)) * coupling * coupling / -energy)
}

/// Iteration cap for [`solve_kepler_equation`].
pub const KEPLER_MAX_ITERS: usize = 100;

/// Eccentric anomaly `E` with `E − e·sin E = M`.
///
/// Newton's method from `E₀ = M + e·sin M`, safeguarded by bisection on the
/// bracket `[M − e, M + e]` (after reducing `M` to `[−π, π]`).
pub fn solve_kepler_equation<T: Real>(mean_anomaly: T, eccentricity: T) -> Result<T> {
    if !(eccentricity >= T::zero() && eccentricity < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "eccentricity must lie in [0, 1), got {eccentricity}"
        )));
    }
    let tau = T::two_pi();
    let turns = (mean_anomaly / tau).round();
    let m = mean_anomaly - turns * tau;
    let e = eccentricity;
    let tol = T::epsilon() * T::lit(16.0) * m.abs().max(T::one());

    let residual = |x: T| x - e * x.sin() - m;
    let (mut lo, mut hi) = (m - e, m + e);
    let mut x = m + e * m.sin();
    for _ in 0..KEPLER_MAX_ITERS {
        let f = residual(x);
        if f.abs() <= tol {
            return Ok(x + turns * tau);
        }
        if f > T::zero() {
            hi = x;
        } else {
            lo = x;
        }
        let step = f / (T::one() - e * x.cos());
        let next = x - step;
        x = if next > lo && next < hi {
            next
        } else {
            (lo + hi) * T::lit(0.5)
        };
        if hi - lo <= T::epsilon() * m.abs().max(T::one()) {
            return Ok(x + turns * tau);
        }
    }
    Err(Error::NoConvergence { iterations: KEPLER_MAX_ITERS })
}

/// A bound Kepler orbit with the focus at the origin and periapsis on the
/// positive first axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerElements<T> {
    coupling: T,
    energy: T,
    eccentricity: T,
}

impl<T: Real> KeplerElements<T> {
    pub fn new(coupling: T, energy: T, eccentricity: T) -> Result<Self> {
        require_positive("coupling", coupling)?;
        require_negative(energy)?;
        if !(eccentricity >= T::zero() && eccentricity < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "eccentricity must lie in [0, 1), got {eccentricity}"
            )));
        }
        Ok(Self { coupling, energy, eccentricity })
    }

    pub fn coupling(&self) -> T {
        self.coupling
    }

    pub fn energy(&self) -> T {
        self.energy
    }

    pub fn eccentricity(&self) -> T {
        self.eccentricity
    }

    /// `A = a/(−2h)`.
    pub fn semi_major_axis(&self) -> T {
        self.coupling / -(self.energy + self.energy)
    }

    pub fn period(&self) -> T {
        kepler_period(self.coupling, self.energy).expect("validated elements")
    }

    /// Position and velocity at time `t` after periapsis passage.
    pub fn state_at(&self, t: T) -> Result<(Vec2<T>, Vec2<T>)> {
        let a = self.semi_major_axis();
        let e = self.eccentricity;
        let n = T::two_pi() / self.period();
        let ecc_anomaly = solve_kepler_equation(n * t, e)?;
        let (s, c) = ecc_anomaly.sin_cos();
        let b = a * (T::one() - e * e).sqrt();
        let rate = n / (T::one() - e * c);
        Ok((
            Vec2::new(a * (c - e), b * s),
            Vec2::new(-a * s * rate, b * c * rate),
        ))
    }
}

/// One period of the orbit sampled uniformly in time.
pub fn kepler_orbit<T: Real>(elements: &KeplerElements<T>, samples: usize) -> Result<PhysicalOrbit<T>> {
    let samples = samples.max(PhysicalOrbit::<T>::MIN_SAMPLES);
    let period = elements.period();
    let mut times = Vec::with_capacity(samples);
    let mut states = Vec::with_capacity(samples);
    for j in 0..samples {
        let t = period * T::of_usize(j) / T::of_usize(samples);
        let (x, v) = elements.state_at(t)?;
        times.push(t);
        states.push(State::new(vec![x], vec![v]));
    }
    Ok(PhysicalOrbit {
        period,
        times,
        states,
        energy: elements.energy(),
        source: OrbitSource::KeplerOracle,
    })
}

/// Fixed-energy action of the Kepler orbit of eccentricity `e`, rescaled to
/// unit period and integrated with the grid rule.
pub fn kepler_loop_action<T: Real>(coupling: T, energy: T, eccentricity: T, grid: &QuadratureGrid<T>) -> Result<T> {
    let elements = KeplerElements::new(coupling, energy, eccentricity)?;
    let orbit = kepler_orbit(&elements, grid.len())?;
    let sys = TwoBodySystem::new(coupling, energy)?;
    Ok(action_full_sampled(&orbit.unit_period_path(), &sys)?.action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{constraint_value_sampled, total_energy};
    use crate::scalar::rel_diff;
    use std::f64::consts::PI;

    #[test]
    fn period_examples() {
        assert!((kepler_period(1.0, -0.5).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((kepler_period(1.0, -2.0).unwrap() - PI / 4.0).abs() < 1e-14);
        assert!((kepler_period(2.0, -0.5).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!(matches!(kepler_period(1.0, 0.5), Err(Error::InvalidEnergy { .. })));
    }

    #[test]
    fn gordon_examples() {
        assert!((gordon_min_action(1.0, 2.0 * PI) - 3.0 * PI).abs() < 1e-13);
        assert!((gordon_min_action(1.0, 16.0 * PI) - 6.0 * PI).abs() < 1e-12);
        // both closed forms of the bound agree
        let (a, t) = (1.7f64, 3.3f64);
        let alt = 3.0 * PI * (t / (2.0 * PI)).powf(1.0 / 3.0) * a.powf(2.0 / 3.0);
        assert!(rel_diff(gordon_min_action(a, t), alt) < 1e-14);
    }

    #[test]
    fn gordon_value_on_circular_orbit_by_quadrature() {
        let el = KeplerElements::new(1.0, -0.5, 0.0).unwrap();
        let orbit = kepler_orbit(&el, 256).unwrap();
        let dt = orbit.period / orbit.len() as f64;
        let action: f64 = orbit
            .states
            .iter()
            .map(|s| 0.5 * s.velocities[0].norm_sq() + 1.0 / s.positions[0].norm())
            .sum::<f64>()
            * dt;
        assert!((action - 3.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn bound_examples() {
        assert!((gordon_bound_action(1.0f64, -0.5).unwrap() - 8.8127).abs() < 1e-4);
        assert!((gordon_bound_action(1.0f64, -1.0).unwrap() - 4.4064).abs() < 1e-4);
        assert!((gordon_bound_action(2.0f64, -0.5).unwrap() - 35.2510).abs() < 5e-4);
        // 9/16 · 2^{-1/3} (πa)² / (−h)
        let alt = 9.0 / 16.0 * 2f64.powf(-1.0 / 3.0) * PI * PI / 0.5;
        assert!(rel_diff(gordon_bound_action(1.0, -0.5).unwrap(), alt) < 1e-14);
        assert!(gordon_bound_action(1.0, 0.0).is_err());
    }

    #[test]
    fn kepler_equation_examples() {
        for e in [0.0, 0.3, 0.9, 0.99] {
            assert_eq!(solve_kepler_equation(0.0, e).unwrap(), 0.0);
            assert!((solve_kepler_equation(PI, e).unwrap() - PI).abs() < 1e-14);
        }
        let ea = solve_kepler_equation(1.0f64, 0.5).unwrap();
        assert!((ea - 1.49870).abs() < 1e-5);
        assert!((1.49870 - 0.5 * 1.49870f64.sin() - 1.0).abs() < 1e-5);
        assert!(solve_kepler_equation(1.0, 1.0).is_err());
    }

    #[test]
    fn kepler_equation_residual_over_range() {
        for e in [0.0, 0.1, 0.5, 0.9, 0.99] {
            for i in 0..200 {
                let m = -7.0 + 14.0 * i as f64 / 199.0;
                let ea = solve_kepler_equation(m, e).unwrap();
                assert!((ea - e * ea.sin() - m).abs() < 1e-13, "m={m} e={e}");
            }
        }
    }

    #[test]
    fn kepler_equation_single_precision() {
        let ea = solve_kepler_equation(1.0f32, 0.5).unwrap();
        assert!((ea - 1.4987).abs() < 1e-4);
    }

    #[test]
    fn circular_orbit() {
        let el = KeplerElements::new(1.0, -0.5, 0.0).unwrap();
        let orbit = kepler_orbit(&el, 128).unwrap();
        assert!((orbit.period - 2.0 * PI).abs() < 1e-14);
        for s in &orbit.states {
            assert!((s.positions[0].norm() - 1.0).abs() < 1e-14);
            assert!((s.velocities[0].norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eccentric_orbit_apsides_and_energy() {
        let el = KeplerElements::new(1.0, -0.5, 0.6).unwrap();
        let orbit = kepler_orbit(&el, 512).unwrap();
        let r: Vec<f64> = orbit.states.iter().map(|s| s.positions[0].norm()).collect();
        // sample 0 is periapsis, sample N/2 apoapsis
        assert!((r[0] - 0.4).abs() < 1e-14);
        assert!((r[256] - 1.6).abs() < 1e-14);
        let sys = TwoBodySystem::new(1.0, -0.5).unwrap();
        for s in &orbit.states {
            assert!((total_energy(&sys, s).unwrap() + 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_loops_lie_on_the_manifold() {
        let grid = QuadratureGrid::<f64>::new(1024).unwrap();
        for (a, h, e) in [(1.0f64, -0.5f64, 0.0f64), (1.0, -0.5, 0.6), (2.0, -1.3, 0.3)] {
            let orbit = kepler_orbit(&KeplerElements::new(a, h, e).unwrap(), grid.len()).unwrap();
            let sys = TwoBodySystem::new(a, h).unwrap();
            let c = constraint_value_sampled(&orbit.unit_period_path(), &sys).unwrap();
            assert!((c - h).abs() < 1e-8, "{c} vs {h}");
        }
    }

    #[test]
    fn loop_action_examples() {
        let grid = QuadratureGrid::<f64>::new(1024).unwrap();
        let circ = kepler_loop_action(1.0, -0.5, 0.0, &grid).unwrap();
        assert!((circ - PI * PI).abs() < 1e-10);
        let ecc = kepler_loop_action(1.0, -0.5, 0.6, &grid).unwrap();
        assert!(rel_diff(ecc, PI * PI) < 1e-6);
        let half = kepler_loop_action(1.0, -1.0, 0.3, &grid).unwrap();
        assert!(rel_diff(half, PI * PI / 2.0) < 1e-6);
        // closed form ½π²a²/(−h)
        let other = kepler_loop_action(1.5, -0.8, 0.2, &grid).unwrap();
        assert!(rel_diff(other, 0.5 * PI * PI * 2.25 / 0.8) < 1e-9);
    }
}
