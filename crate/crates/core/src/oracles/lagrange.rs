use crate::error::{Error, Result};
use crate::functionals::{action_full_sampled, ThreeBodySystem};
use crate::loop_space::QuadratureGrid;
use crate::oracles::kepler::{kepler_orbit, KeplerElements};
use crate::orbit::{OrbitSource, PhysicalOrbit, State};
use crate::scalar::{rel_diff, Real};
use crate::vec2::Vec2;

/// Unit equilateral triangle with its mass-weighted centroid at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangeShape<T> {
    pub masses: [T; 3],
    pub vertices: [Vec2<T>; 3],
}

/// Builds the shape with `α₁ − α₂` along the first axis and `α₃` on the
/// positive side of it.
pub fn lagrange_shape<T: Real>(masses: [T; 3]) -> Result<LagrangeShape<T>> {
    if masses.iter().any(|&m| !(m > T::zero()) || !m.is_finite()) {
        return Err(Error::InvalidParameter("masses must be positive and finite".into()));
    }
    let half = T::lit(0.5);
    let raw = [
        Vec2::new(half, T::zero()),
        Vec2::new(-half, T::zero()),
        Vec2::new(T::zero(), T::lit(3.0).sqrt() * half),
    ];
    let total = masses[0] + masses[1] + masses[2];
    let centre = raw
        .iter()
        .zip(&masses)
        .fold(Vec2::zero(), |acc, (&p, &m)| acc + p * m)
        / total;
    Ok(LagrangeShape {
        masses,
        vertices: raw.map(|p| p - centre),
    })
}

/// Homographic Lagrange solution: the shape rotated and dilated by a planar
/// Kepler orbit, `qᵢ(t) = x(t)·αᵢ` as complex multiplication.
///
/// The relative orbit `x` has coupling `M` and energy `h = M·E/σ`, which
/// makes the total energy of the three bodies `E`.
pub fn lagrange_solution<T: Real>(masses: [T; 3], energy: T, eccentricity: T, samples: usize) -> Result<PhysicalOrbit<T>> {
    let sys = ThreeBodySystem::new(masses, energy)?;
    let shape = lagrange_shape(masses)?;
    let total = sys.total_mass();
    let relative_energy = total * energy / sys.pair_sum();
    let elements = KeplerElements::new(total, relative_energy, eccentricity)?;
    let relative = kepler_orbit(&elements, samples)?;
    let states = relative
        .states
        .iter()
        .map(|s| {
            let (x, v) = (s.positions[0], s.velocities[0]);
            State::new(
                shape.vertices.iter().map(|&a| x.complex_mul(a)).collect(),
                shape.vertices.iter().map(|&a| v.complex_mul(a)).collect(),
            )
        })
        .collect();
    Ok(PhysicalOrbit {
        period: relative.period,
        times: relative.times,
        states,
        energy,
        source: OrbitSource::LagrangeOracle,
    })
}

/// Candidate closed forms for the period of a Lagrange solution at energy
/// `E`, with `σ = Σ_{i<j} mᵢmⱼ` and `M = Σ mᵢ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangePeriods<T> {
    /// `2π(σ/(−2E))^{3/2}`
    pub pair_sum_only: T,
    /// `2π(σ/(−2E))^{3/2}·M`
    pub times_total_mass: T,
    /// `2π M^{−1/2}(σ/(−2E))^{3/2}`: the Kepler period law for the relative
    /// orbit (coupling `M`, energy `ME/σ`).
    pub composed: T,
}

impl<T: Real> LagrangePeriods<T> {
    pub const LABELS: [&'static str; 3] = [
        "T = 2π(σ/(−2E))^(3/2)",
        "T = 2π(σ/(−2E))^(3/2)·M",
        "T = 2π M^(−1/2) (σ/(−2E))^(3/2)",
    ];

    pub fn values(&self) -> [T; 3] {
        [self.pair_sum_only, self.times_total_mass, self.composed]
    }

    /// Labels of every candidate within relative `tol` of `measured`.
    pub fn matching(&self, measured: T, tol: T) -> Vec<&'static str> {
        self.values()
            .iter()
            .zip(Self::LABELS)
            .filter(|(&v, _)| rel_diff(v, measured) <= tol)
            .map(|(_, l)| l)
            .collect()
    }
}

pub fn lagrange_period<T: Real>(masses: [T; 3], energy: T) -> Result<LagrangePeriods<T>> {
    let sys = ThreeBodySystem::new(masses, energy)?;
    let (sigma, total) = (sys.pair_sum(), sys.total_mass());
    let base = T::two_pi() * (sigma / -(energy + energy)).powf(T::lit(1.5));
    Ok(LagrangePeriods {
        pair_sum_only: base,
        times_total_mass: base * total,
        composed: base / total.sqrt(),
    })
}

/// Fixed-energy action of a Lagrange solution, closed-form candidate next to
/// the quadrature value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangeActions<T> {
    /// `2^{−13/3}(3π)²σ³/(−E)`
    pub closed_form: T,
    /// Action of the unit-period Lagrange loop, by quadrature.
    pub quadrature: T,
}

impl LagrangeActions<f64> {
    pub const CLOSED_FORM_LABEL: &'static str = "F = 2^(−13/3)(3π)²σ³/(−E)";
    pub const QUADRATURE_LABEL: &'static str = "F on the Lagrange loop (quadrature)";
}

pub fn lagrange_action<T: Real>(masses: [T; 3], energy: T, eccentricity: T, grid: &QuadratureGrid<T>) -> Result<LagrangeActions<T>> {
    let sys = ThreeBodySystem::new(masses, energy)?;
    let sigma = sys.pair_sum();
    let pi = T::PI();
    let closed_form = T::lit(2.0).powf(T::lit(-13.0 / 3.0)) * T::lit(9.0) * pi * pi * sigma * sigma * sigma / -energy;
    let orbit = lagrange_solution(masses, energy, eccentricity, grid.len())?;
    let quadrature = action_full_sampled(&orbit.unit_period_path(), &sys)?.action;
    Ok(LagrangeActions { closed_form, quadrature })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::total_energy;
    use std::f64::consts::PI;

    fn pairwise(q: &[Vec2<f64>]) -> [f64; 3] {
        [(q[0] - q[1]).norm(), (q[0] - q[2]).norm(), (q[1] - q[2]).norm()]
    }

    #[test]
    fn shape_examples() {
        let eq = lagrange_shape([1.0f64; 3]).unwrap();
        for v in eq.vertices {
            assert!((v.norm() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
        let heavy = lagrange_shape([2.0f64, 1.0, 1.0]).unwrap();
        let com = heavy
            .vertices
            .iter()
            .zip(heavy.masses)
            .fold(Vec2::zero(), |acc, (&p, m)| acc + p * m);
        assert!(com.norm() < 1e-14);
        assert!(heavy.vertices[0].norm() < eq.vertices[0].norm());
        for masses in [[1.0, 1.0, 1.0], [2.0, 1.0, 1.0], [0.3, 5.0, 1.7]] {
            let s = lagrange_shape(masses).unwrap();
            for d in pairwise(&s.vertices) {
                assert!((d - 1.0).abs() < 1e-14);
            }
            let dir = s.vertices[0] - s.vertices[1];
            assert!(dir.y.abs() < 1e-15 && dir.x > 0.0);
        }
    }

    #[test]
    fn circular_equal_mass_solution() {
        let orbit = lagrange_solution([1.0f64; 3], -0.5, 0.0, 256).unwrap();
        assert!((orbit.period - 6.0 * PI).abs() < 1e-12);
        for s in &orbit.states {
            for d in pairwise(&s.positions) {
                assert!((d - 3.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn distances_stay_equal_and_energy_assembles() {
        let masses = [1.0, 2.0, 3.0];
        let orbit = lagrange_solution(masses, -1.0, 0.4, 512).unwrap();
        let sys = ThreeBodySystem::new(masses, -1.0).unwrap();
        for s in &orbit.states {
            let d = pairwise(&s.positions);
            assert!((d[0] - d[1]).abs() < 1e-12 * d[0] && (d[1] - d[2]).abs() < 1e-12 * d[0]);
            assert!((total_energy(&sys, s).unwrap() + 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn period_candidates() {
        let p = lagrange_period([1.0f64; 3], -0.5).unwrap();
        assert!((p.pair_sum_only - 2.0 * PI * 27f64.sqrt()).abs() < 1e-12);
        assert!((p.pair_sum_only - 32.648).abs() < 1e-3);
        assert!((p.times_total_mass - 97.94).abs() < 1e-2);
        assert!((p.composed - 6.0 * PI).abs() < 1e-12);
        assert_eq!(p.matching(6.0 * PI, 1e-4), vec![LagrangePeriods::<f64>::LABELS[2]]);
        // composed ∝ (−E)^{−3/2}
        let q = lagrange_period([1.0f64; 3], -2.0).unwrap();
        assert!((p.composed / q.composed - 8.0).abs() < 1e-12);
        assert!(lagrange_period([1.0f64; 3], 0.1).is_err());
    }

    #[test]
    fn action_candidates() {
        let grid = QuadratureGrid::<f64>::new(1024).unwrap();
        let a = lagrange_action([1.0; 3], -0.5, 0.0, &grid).unwrap();
        assert!((a.closed_form - 237.943).abs() < 1e-3);
        assert!((a.quadrature - 9.0 * PI * PI).abs() < 1e-6);
        let b = lagrange_action([1.0; 3], -0.5, 0.5, &grid).unwrap();
        assert!((a.quadrature - b.quadrature).abs() < 1e-6 * a.quadrature);
        // ½π²σ³/(M(−E)) for unequal masses
        let c = lagrange_action([1.0, 2.0, 3.0], -1.0, 0.2, &grid).unwrap();
        assert!((c.quadrature - 0.5 * PI * PI * 1331.0 / 6.0).abs() < 1e-8 * c.quadrature);
    }
}
