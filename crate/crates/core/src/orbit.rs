//! Time-sampled physical orbits.

use crate::scalar::Real;
use crate::vec2::Vec2;

/// Positions and velocities of every body at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T> {
    pub positions: Vec<Vec2<T>>,
    pub velocities: Vec<Vec2<T>>,
}

impl<T: Real> State<T> {
    pub fn new(positions: Vec<Vec2<T>>, velocities: Vec<Vec2<T>>) -> Self {
        assert_eq!(positions.len(), velocities.len());
        Self { positions, velocities }
    }

    pub fn bodies(&self) -> usize {
        self.positions.len()
    }

    /// Euclidean norm of the flattened phase-space vector.
    pub fn phase_norm(&self) -> T {
        self.positions
            .iter()
            .chain(&self.velocities)
            .fold(T::zero(), |acc, v| acc + v.norm_sq())
            .sqrt()
    }

    /// Phase-space distance to another state with the same body count.
    pub fn phase_distance(&self, other: &Self) -> T {
        self.positions
            .iter()
            .zip(&other.positions)
            .chain(self.velocities.iter().zip(&other.velocities))
            .fold(T::zero(), |acc, (a, b)| acc + (*a - *b).norm_sq())
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitSource {
    Minimizer,
    KeplerOracle,
    LagrangeOracle,
    Integrator,
}

impl OrbitSource {
    pub fn as_str(self) -> &'static str {
        match self {
            OrbitSource::Minimizer => "minimizer",
            OrbitSource::KeplerOracle => "kepler_oracle",
            OrbitSource::LagrangeOracle => "lagrange_oracle",
            OrbitSource::Integrator => "integrator",
        }
    }
}

/// One period of motion sampled uniformly in time on `[0, T)`.
///
/// For the two-body problem there is a single "body", the relative
/// coordinate `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalOrbit<T> {
    pub period: T,
    pub times: Vec<T>,
    pub states: Vec<State<T>>,
    pub energy: T,
    pub source: OrbitSource,
}

impl<T: Real> PhysicalOrbit<T> {
    pub const MIN_SAMPLES: usize = 64;

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn bodies(&self) -> usize {
        self.states.first().map_or(0, State::bodies)
    }

    /// The orbit reparametrized to unit period, `u(s) = x(sT)`, as samples
    /// at `s_j = j/N` (velocities pick up a factor `T`).
    pub fn unit_period_path(&self) -> SampledPath<T> {
        SampledPath {
            positions: self.states.iter().map(|s| s.positions.clone()).collect(),
            velocities: self
                .states
                .iter()
                .map(|s| s.velocities.iter().map(|&v| v * self.period).collect())
                .collect(),
        }
    }

    /// Positions of body `b` at every sample.
    pub fn track(&self, b: usize) -> Vec<Vec2<T>> {
        self.states.iter().map(|s| s.positions[b]).collect()
    }
}

/// A unit-period loop known only through samples at `t_j = j/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath<T> {
    /// `[sample][body]`
    pub positions: Vec<Vec<Vec2<T>>>,
    /// `[sample][body]`
    pub velocities: Vec<Vec<Vec2<T>>>,
}

impl<T: Real> SampledPath<T> {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}
