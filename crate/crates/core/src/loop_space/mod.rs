//! Closed loops as truncated Fourier series: evaluation, exact kinetic
//! terms, quadrature, winding numbers and the three-body centre-of-mass
//! subspace.

mod fourier;
mod grid;
mod random;
mod triple;
mod winding;

pub use fourier::FourierLoop;
pub use grid::QuadratureGrid;
pub use random::{random_loop, random_triple};
pub use triple::{com_project, TripleLoop};
pub use winding::{
    min_distance, raw_winding, winding_number, winding_number_with, NEAR_COLLISION_REL,
    WINDING_SNAP_TOL,
};

pub(crate) use fourier::bbox_diagonal;
pub(crate) use winding::golden_min;

use crate::scalar::Real;

/// Body pairs of a three-body configuration, in reporting order.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// A configuration path: one loop per body plus whatever linear constraint
/// ties them together.
///
/// Implemented by [`FourierLoop`] (one body, the Kepler relative coordinate)
/// and [`TripleLoop`] (three bodies with fixed centre of mass). The same type
/// doubles as the shape of a coefficient-space gradient.
pub trait LoopSet<T: Real>: Clone + Send + Sync {
    fn bodies(&self) -> &[FourierLoop<T>];

    /// Loops whose zeros are collisions: `u` itself, or `uᵢ − uⱼ` per pair.
    fn separation_loops(&self) -> Vec<FourierLoop<T>>;

    /// Same constraint structure, new body loops. The caller is responsible
    /// for the result staying in the admissible subspace.
    fn with_bodies(&self, bodies: Vec<FourierLoop<T>>) -> Self;

    /// Orthogonal projection of a coefficient vector onto the admissible
    /// linear subspace (identity for a single loop).
    fn project_tangent(&mut self);

    fn modes(&self) -> usize {
        self.bodies()[0].modes()
    }

    fn scaled(&self, factor: T) -> Self {
        self.with_bodies(self.bodies().iter().map(|b| b.scaled(factor)).collect())
    }

    /// `self += alpha · dir`.
    fn axpy(&mut self, alpha: T, dir: &Self) {
        let bodies = self
            .bodies()
            .iter()
            .zip(dir.bodies())
            .map(|(b, d)| {
                let mut b = b.clone();
                b.axpy(alpha, d);
                b
            })
            .collect();
        *self = self.with_bodies(bodies);
    }

    /// Euclidean inner product over all coefficients of all bodies.
    fn coeff_dot(&self, other: &Self) -> T {
        self.bodies()
            .iter()
            .zip(other.bodies())
            .fold(T::zero(), |acc, (a, b)| acc + a.coeff_dot(b))
    }

    fn coeff_norm(&self) -> T {
        self.coeff_dot(self).sqrt()
    }

    /// Rigid rotation of the plane applied to every body.
    fn rotated(&self, angle: T) -> Self {
        self.with_bodies(self.bodies().iter().map(|b| b.rotated(angle)).collect())
    }
}

impl<T: Real> LoopSet<T> for FourierLoop<T> {
    fn bodies(&self) -> &[FourierLoop<T>] {
        std::slice::from_ref(self)
    }

    fn separation_loops(&self) -> Vec<FourierLoop<T>> {
        vec![self.clone()]
    }

    fn with_bodies(&self, mut bodies: Vec<FourierLoop<T>>) -> Self {
        assert_eq!(bodies.len(), 1, "a single loop has one body");
        bodies.pop().expect("one body")
    }

    fn project_tangent(&mut self) {}
}

impl<T: Real> LoopSet<T> for TripleLoop<T> {
    fn bodies(&self) -> &[FourierLoop<T>] {
        self.loops()
    }

    fn separation_loops(&self) -> Vec<FourierLoop<T>> {
        PAIRS.iter().map(|&(i, j)| self.relative(i, j)).collect()
    }

    fn with_bodies(&self, bodies: Vec<FourierLoop<T>>) -> Self {
        let loops: [FourierLoop<T>; 3] = bodies
            .try_into()
            .unwrap_or_else(|_| panic!("a triple loop has three bodies"));
        TripleLoop::from_parts_unchecked(loops, self.masses())
    }

    /// `gᵢ ← gᵢ − mᵢ (Σⱼ mⱼgⱼ) / Σⱼ mⱼ²`, the Euclidean-orthogonal projection
    /// onto `{Σ mᵢ gᵢ = 0}`.
    fn project_tangent(&mut self) {
        let masses = self.masses();
        let m2 = masses.iter().fold(T::zero(), |a, &m| a + m * m);
        let s = self.weighted_sum();
        for (l, &m) in self.loops_mut().iter_mut().zip(&masses) {
            l.axpy(-m / m2, &s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec2::Vec2;

    #[test]
    fn tangent_projection_is_orthogonal() {
        let masses = [1.0f64, 2.0, 3.0];
        let g = TripleLoop::from_parts_unchecked(
            [
                FourierLoop::circle(1.0, 1, 2),
                FourierLoop::constant(Vec2::new(0.5, 0.2), 2),
                FourierLoop::circle(0.3, 2, 2),
            ],
            masses,
        );
        let mut p = g.clone();
        p.project_tangent();
        assert!(p.weighted_sum().coeff_norm() < 1e-14);
        // residual g - p is normal to the subspace, so orthogonal to p
        let mut r = g.clone();
        r.axpy(-1.0, &p);
        assert!(r.coeff_dot(&p).abs() < 1e-14);
    }
}
