//! Potentials, the fixed-energy action functionals and their gradients.
//!
//! For a loop `u` with mass-weighted kinetic integral `K(u) = ½∫Σmᵢ|u̇ᵢ|²`
//! and constraint value `c(u) = ∫(½V′(u)·u + V(u))`, the action on the
//! energy-`E` manifold `{c = E}` is `K(u)·∫(E − V(u))`. Both potentials here
//! are homogeneous of degree −1, so `c(λu) = c(u)/λ` and every loop projects
//! onto the manifold by the scaling `λ = c(u)/E`. Substituting the projection
//! gives the scale-invariant reduced action `K(u)·c(u)²/(−E)`, which the
//! minimizer descends without any constraint machinery.

use crate::error::{Error, Result};
use crate::loop_space::{bbox_diagonal, FourierLoop, LoopSet, QuadratureGrid, TripleLoop, NEAR_COLLISION_REL};
use crate::orbit::{SampledPath, State};
use crate::scalar::Real;
use crate::vec2::Vec2;

/// A Newtonian problem with fixed total energy.
pub trait System<T: Real>: Send + Sync {
    /// Loop shape the action functionals of this system act on.
    type Loop: LoopSet<T>;

    /// The fixed energy `h` or `E`.
    fn energy(&self) -> T;

    /// Inertia of each body of the configuration (`[1]` for the Kepler
    /// relative coordinate).
    fn masses(&self) -> &[T];

    fn body_count(&self) -> usize {
        self.masses().len()
    }

    /// `V(q)`. Errors if any separation vanishes.
    fn potential(&self, q: &[Vec2<T>]) -> Result<T>;

    /// `∂V/∂qᵢ` for every body.
    fn potential_gradient(&self, q: &[Vec2<T>], out: &mut [Vec2<T>]) -> Result<()>;

    /// Rejects loops that do not belong to this system (body count, masses).
    fn check_loop(&self, l: &Self::Loop) -> Result<()>;
}

/// Kepler problem `ẍ = −∇V(x)`, `V(x) = −a/|x|`, at energy `h < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBodySystem<T> {
    coupling: T,
    energy: T,
    unit_mass: [T; 1],
}

impl<T: Real> TwoBodySystem<T> {
    pub fn new(coupling: T, energy: T) -> Result<Self> {
        if !(coupling > T::zero()) || !coupling.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling a must be positive, got {coupling}"
            )));
        }
        if !(energy < T::zero()) || !energy.is_finite() {
            return Err(Error::InvalidEnergy { energy: energy.as_f64() });
        }
        Ok(Self {
            coupling,
            energy,
            unit_mass: [T::one()],
        })
    }

    #[inline]
    pub fn coupling(&self) -> T {
        self.coupling
    }
}

impl<T: Real> System<T> for TwoBodySystem<T> {
    type Loop = FourierLoop<T>;

    fn energy(&self) -> T {
        self.energy
    }

    fn masses(&self) -> &[T] {
        &self.unit_mass
    }

    fn potential(&self, q: &[Vec2<T>]) -> Result<T> {
        let r = q[0].norm();
        if !(r > T::zero()) {
            return Err(Error::CollisionEncountered { separation: r.as_f64() });
        }
        Ok(-self.coupling / r)
    }

    fn potential_gradient(&self, q: &[Vec2<T>], out: &mut [Vec2<T>]) -> Result<()> {
        let r2 = q[0].norm_sq();
        if !(r2 > T::zero()) {
            return Err(Error::CollisionEncountered { separation: 0.0 });
        }
        let r = r2.sqrt();
        out[0] = q[0] * (self.coupling / (r2 * r));
        Ok(())
    }

    fn check_loop(&self, _l: &FourierLoop<T>) -> Result<()> {
        Ok(())
    }
}

/// Newtonian three-body problem with `V(q) = −Σ_{i<j} mᵢmⱼ/|qᵢ − qⱼ|` at
/// total energy `E < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeBodySystem<T> {
    masses: [T; 3],
    energy: T,
}

impl<T: Real> ThreeBodySystem<T> {
    pub fn new(masses: [T; 3], energy: T) -> Result<Self> {
        if masses.iter().any(|&m| !(m > T::zero()) || !m.is_finite()) {
            return Err(Error::InvalidParameter("masses must be positive and finite".into()));
        }
        if !(energy < T::zero()) || !energy.is_finite() {
            return Err(Error::InvalidEnergy { energy: energy.as_f64() });
        }
        Ok(Self { masses, energy })
    }

    pub fn mass_array(&self) -> [T; 3] {
        self.masses
    }

    /// `M = Σ mᵢ`.
    pub fn total_mass(&self) -> T {
        self.masses[0] + self.masses[1] + self.masses[2]
    }

    /// `σ = Σ_{i<j} mᵢmⱼ`.
    pub fn pair_sum(&self) -> T {
        let [a, b, c] = self.masses;
        a * b + a * c + b * c
    }
}

impl<T: Real> System<T> for ThreeBodySystem<T> {
    type Loop = TripleLoop<T>;

    fn energy(&self) -> T {
        self.energy
    }

    fn masses(&self) -> &[T] {
        &self.masses
    }

    fn potential(&self, q: &[Vec2<T>]) -> Result<T> {
        let mut v = T::zero();
        for &(i, j) in &crate::loop_space::PAIRS {
            let r = (q[i] - q[j]).norm();
            if !(r > T::zero()) {
                return Err(Error::CollisionEncountered { separation: r.as_f64() });
            }
            v = v - self.masses[i] * self.masses[j] / r;
        }
        Ok(v)
    }

    fn potential_gradient(&self, q: &[Vec2<T>], out: &mut [Vec2<T>]) -> Result<()> {
        out[..3].fill(Vec2::zero());
        for &(i, j) in &crate::loop_space::PAIRS {
            let d = q[i] - q[j];
            let r2 = d.norm_sq();
            if !(r2 > T::zero()) {
                return Err(Error::CollisionEncountered { separation: 0.0 });
            }
            let f = d * (self.masses[i] * self.masses[j] / (r2 * r2.sqrt()));
            out[i] += f;
            out[j] -= f;
        }
        Ok(())
    }

    fn check_loop(&self, l: &TripleLoop<T>) -> Result<()> {
        if l.masses() != self.masses {
            return Err(Error::ShapeMismatch("triple loop masses differ from the system's".into()));
        }
        Ok(())
    }
}

/// Separation vectors of a configuration: `q₀` for one body, `qᵢ − qⱼ` per
/// pair otherwise.
pub fn separation_vectors<T: Real>(q: &[Vec2<T>]) -> Vec<Vec2<T>> {
    if q.len() == 1 {
        vec![q[0]]
    } else {
        let mut out = Vec::with_capacity(q.len() * (q.len() - 1) / 2);
        for i in 0..q.len() {
            for j in i + 1..q.len() {
                out.push(q[i] - q[j]);
            }
        }
        out
    }
}

/// Smallest separation of a configuration.
pub fn min_separation<T: Real>(q: &[Vec2<T>]) -> T {
    separation_vectors(q)
        .iter()
        .fold(T::infinity(), |m, s| m.min(s.norm()))
}

/// `V′(q)·q = Σᵢ ∂V/∂qᵢ · qᵢ`.
pub fn virial<T: Real, S: System<T>>(sys: &S, q: &[Vec2<T>]) -> Result<T> {
    let mut g = vec![Vec2::zero(); q.len()];
    sys.potential_gradient(q, &mut g)?;
    Ok(g.iter().zip(q).fold(T::zero(), |acc, (gi, qi)| acc + gi.dot(*qi)))
}

/// `½Σ mᵢ|vᵢ|² + V(q)`.
pub fn total_energy<T: Real, S: System<T>>(sys: &S, state: &State<T>) -> Result<T> {
    Ok(kinetic_energy(sys.masses(), &state.velocities) + sys.potential(&state.positions)?)
}

pub(crate) fn kinetic_energy<T: Real>(masses: &[T], v: &[Vec2<T>]) -> T {
    masses
        .iter()
        .zip(v)
        .fold(T::zero(), |acc, (&m, v)| acc + m * v.norm_sq())
        * T::lit(0.5)
}

/// Positions of every body at every grid node, `[sample][body]`.
pub fn sample_positions<T: Real, L: LoopSet<T>>(l: &L, grid: &QuadratureGrid<T>) -> Vec<Vec<Vec2<T>>> {
    transpose(l.bodies().iter().map(|b| b.sample(grid)).collect())
}

/// Velocities of every body at every grid node, `[sample][body]`.
pub fn sample_velocities<T: Real, L: LoopSet<T>>(l: &L, grid: &QuadratureGrid<T>) -> Vec<Vec<Vec2<T>>> {
    transpose(l.bodies().iter().map(|b| b.sample_velocity(grid)).collect())
}

fn transpose<T: Copy>(per_body: Vec<Vec<T>>) -> Vec<Vec<T>> {
    let n = per_body.first().map_or(0, Vec::len);
    (0..n)
        .map(|j| per_body.iter().map(|b| b[j]).collect())
        .collect()
}

/// Grid samples of a loop as a [`SampledPath`].
pub fn sampled_path<T: Real, L: LoopSet<T>>(l: &L, grid: &QuadratureGrid<T>) -> SampledPath<T> {
    SampledPath {
        positions: sample_positions(l, grid),
        velocities: sample_velocities(l, grid),
    }
}

/// Fails with `CollisionEncountered` when any sampled separation falls
/// below `1e-6` times the diameter of its separation loop.
fn check_collisions<T: Real>(positions: &[Vec<Vec2<T>>]) -> Result<()> {
    let Some(first) = positions.first() else {
        return Ok(());
    };
    let pairs = separation_vectors(first).len();
    let mut diameter = T::zero();
    let mut closest = T::infinity();
    for p in 0..pairs {
        let seps: Vec<_> = positions.iter().map(|q| separation_vectors(q)[p]).collect();
        diameter = diameter.max(bbox_diagonal(&seps));
        closest = seps.iter().fold(closest, |m, s| m.min(s.norm()));
    }
    if closest <= T::lit(NEAR_COLLISION_REL) * diameter {
        return Err(Error::CollisionEncountered { separation: closest.as_f64() });
    }
    Ok(())
}

/// Time averages `(⟨V⟩, ⟨V′·q⟩)` over uniformly spaced samples.
fn potential_means<T: Real, S: System<T>>(sys: &S, positions: &[Vec<Vec2<T>>]) -> Result<(T, T)> {
    check_collisions(positions)?;
    let mut grad = vec![Vec2::zero(); sys.body_count()];
    let (mut v_sum, mut w_sum) = (T::zero(), T::zero());
    for q in positions {
        v_sum = v_sum + sys.potential(q)?;
        sys.potential_gradient(q, &mut grad)?;
        w_sum = w_sum + grad.iter().zip(q).fold(T::zero(), |acc, (g, x)| acc + g.dot(*x));
    }
    let n = T::of_usize(positions.len());
    Ok((v_sum / n, w_sum / n))
}

fn check_grid<T: Real, S: System<T>>(l: &S::Loop, sys: &S, grid: &QuadratureGrid<T>) -> Result<()> {
    sys.check_loop(l)?;
    grid.check_resolves(l.modes())
}

/// `c(u) = ∫₀¹(½V′(u)·u + V(u))dt` on the grid.
pub fn constraint_value<T: Real, S: System<T>>(l: &S::Loop, sys: &S, grid: &QuadratureGrid<T>) -> Result<T> {
    check_grid(l, sys, grid)?;
    let (v, w) = potential_means(sys, &sample_positions(l, grid))?;
    Ok(T::lit(0.5) * w + v)
}

/// [`constraint_value`] for a loop known by samples.
pub fn constraint_value_sampled<T: Real, S: System<T>>(path: &SampledPath<T>, sys: &S) -> Result<T> {
    let (v, w) = potential_means(sys, &path.positions)?;
    Ok(T::lit(0.5) * w + v)
}

/// Scales `l` onto the manifold `c = E` (`λ = c(u)/E`).
pub fn project_to_manifold<T: Real, S: System<T>>(l: &S::Loop, sys: &S, grid: &QuadratureGrid<T>) -> Result<S::Loop> {
    let e = sys.energy();
    if !(e < T::zero()) {
        return Err(Error::InvalidEnergy { energy: e.as_f64() });
    }
    let c = constraint_value(l, sys, grid)?;
    Ok(l.scaled(c / e))
}

/// `K(u) = ½∫Σ mᵢ|u̇ᵢ|²dt`, exact.
pub fn kinetic<T: Real, S: System<T>>(l: &S::Loop, sys: &S) -> T {
    l.bodies()
        .iter()
        .zip(sys.masses())
        .fold(T::zero(), |acc, (b, &m)| acc + m * b.kinetic_integral())
}

/// Value of the fixed-energy action with its two factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionParts<T> {
    pub action: T,
    /// `½∫Σmᵢ|u̇ᵢ|²`
    pub kinetic: T,
    /// `∫(E − V(u))`
    pub potential: T,
}

/// Largest relative constraint violation `action_full` accepts.
pub const MANIFOLD_TOL: f64 = 1e-9;

fn on_manifold<T: Real>(c: T, e: T) -> Result<()> {
    if (c - e).abs() > T::lit(MANIFOLD_TOL) * e.abs() {
        return Err(Error::OffManifold { constraint: c.as_f64(), target: e.as_f64() });
    }
    Ok(())
}

/// `½∫Σmᵢ|u̇ᵢ|² · ∫(E − V(u))` for a loop already on the manifold.
pub fn action_full<T: Real, S: System<T>>(l: &S::Loop, sys: &S, grid: &QuadratureGrid<T>) -> Result<ActionParts<T>> {
    check_grid(l, sys, grid)?;
    let (v, w) = potential_means(sys, &sample_positions(l, grid))?;
    let e = sys.energy();
    on_manifold(T::lit(0.5) * w + v, e)?;
    let kinetic = kinetic(l, sys);
    let potential = e - v;
    Ok(ActionParts { action: kinetic * potential, kinetic, potential })
}

/// [`action_full`] for a loop known by samples; the kinetic factor is then
/// a quadrature too.
pub fn action_full_sampled<T: Real, S: System<T>>(path: &SampledPath<T>, sys: &S) -> Result<ActionParts<T>> {
    let (v, w) = potential_means(sys, &path.positions)?;
    let e = sys.energy();
    on_manifold(T::lit(0.5) * w + v, e)?;
    let kinetic = path
        .velocities
        .iter()
        .fold(T::zero(), |acc, vel| acc + kinetic_energy(sys.masses(), vel))
        / T::of_usize(path.len());
    let potential = e - v;
    Ok(ActionParts { action: kinetic * potential, kinetic, potential })
}

/// Scale-invariant reduced action `K(u)·c(u)²/(−E)`.
pub fn action_reduced<T: Real, S: System<T>>(l: &S::Loop, sys: &S, grid: &QuadratureGrid<T>) -> Result<T> {
    let c = constraint_value(l, sys, grid)?;
    Ok(kinetic(l, sys) * c * c / -sys.energy())
}

/// Reduced action and its exact coefficient-space gradient before the
/// projection onto the admissible subspace.
pub fn action_and_raw_gradient<T: Real, S: System<T>>(
    l: &S::Loop,
    sys: &S,
    grid: &QuadratureGrid<T>,
) -> Result<(T, S::Loop)> {
    check_grid(l, sys, grid)?;
    let positions = sample_positions(l, grid);
    check_collisions(&positions)?;
    let modes = l.modes();
    let bodies = sys.body_count();
    let half = T::lit(0.5);

    // ∂c/∂coeff by the chain rule through ½V on the grid; c itself via the
    // general integrand
    let mut dc: Vec<FourierLoop<T>> = vec![FourierLoop::zero(modes); bodies];
    let mut grad = vec![Vec2::zero(); bodies];
    let (mut v_sum, mut w_sum) = (T::zero(), T::zero());
    for (j, q) in positions.iter().enumerate() {
        v_sum = v_sum + sys.potential(q)?;
        sys.potential_gradient(q, &mut grad)?;
        for (b, (g, x)) in grad.iter().zip(q).enumerate() {
            w_sum = w_sum + g.dot(*x);
            let (mean, cos, sin) = dc[b].coeffs_mut();
            *mean += *g;
            for k in 1..=modes {
                let (ck, sk) = grid.trig(k, j);
                cos[k - 1] += *g * ck;
                sin[k - 1] += *g * sk;
            }
        }
    }
    let inv_n = grid.weight();
    let c = (half * w_sum + v_sum) * inv_n;
    let kin = kinetic(l, sys);
    let neg_e = -sys.energy();
    let action = kin * c * c / neg_e;

    // ∂f̃ = (c²∂K + 2Kc∂c)/(−E); ∂K/∂(mode-k coeff) = mᵢ(2πk)²·coeff/2
    let dc_scale = (kin + kin) * c * half * inv_n / neg_e;
    let dk_scale = c * c / neg_e;
    let bodies_grad = l
        .bodies()
        .iter()
        .zip(sys.masses())
        .zip(&dc)
        .map(|((u, &m), dcb)| {
            let mut g = dcb.scaled(dc_scale);
            let (_, cos, sin) = g.coeffs_mut();
            for k in 1..=modes {
                let w = T::two_pi() * T::of_usize(k);
                let s = dk_scale * m * w * w * half;
                cos[k - 1] += u.cos_coeffs()[k - 1] * s;
                sin[k - 1] += u.sin_coeffs()[k - 1] * s;
            }
            g
        })
        .collect();
    Ok((action, l.with_bodies(bodies_grad)))
}

/// Reduced action and its gradient projected onto the admissible subspace
/// (`Σ mᵢgᵢ = 0` for three bodies).
pub fn action_and_gradient<T: Real, S: System<T>>(
    l: &S::Loop,
    sys: &S,
    grid: &QuadratureGrid<T>,
) -> Result<(T, S::Loop)> {
    let (f, mut g) = action_and_raw_gradient(l, sys, grid)?;
    g.project_tangent();
    Ok((f, g))
}

/// Gradient of [`action_reduced`] with respect to every Fourier coefficient.
pub fn gradient_reduced<T: Real, S: System<T>>(l: &S::Loop, sys: &S, grid: &QuadratureGrid<T>) -> Result<S::Loop> {
    action_and_gradient(l, sys, grid).map(|(_, g)| g)
}
