use crate::error::{Error, Result};
use crate::loop_space::FourierLoop;
use crate::scalar::Real;
use crate::vec2::Vec2;

/// Three loops whose mass-weighted mean vanishes identically,
/// `Σ mᵢ uᵢ(t) = 0`, coefficient by coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleLoop<T> {
    loops: [FourierLoop<T>; 3],
    masses: [T; 3],
}

impl<T: Real> TripleLoop<T> {
    #[inline]
    pub fn loops(&self) -> &[FourierLoop<T>; 3] {
        &self.loops
    }

    #[inline]
    pub fn masses(&self) -> [T; 3] {
        self.masses
    }

    #[inline]
    pub fn modes(&self) -> usize {
        self.loops[0].modes()
    }

    pub fn total_mass(&self) -> T {
        self.masses.iter().fold(T::zero(), |a, &m| a + m)
    }

    /// `uᵢ − uⱼ`.
    pub fn relative(&self, i: usize, j: usize) -> FourierLoop<T> {
        self.loops[i].sub(&self.loops[j])
    }

    /// `Σ mᵢ uᵢ` as a loop; zero up to rounding for a valid triple.
    pub fn weighted_sum(&self) -> FourierLoop<T> {
        let mut acc = FourierLoop::zero(self.modes());
        for (l, &m) in self.loops.iter().zip(&self.masses) {
            acc.axpy(m, l);
        }
        acc
    }

    /// Rigid shape `anchors` rotating `k` times per period, `uᵢ(t) = αᵢ·e^{2πikt}`.
    pub fn rotating(anchors: [Vec2<T>; 3], k: i64, modes: usize, masses: [T; 3]) -> Result<Self> {
        com_project(
            anchors.map(|a| FourierLoop::rotating(a, k, modes)),
            masses,
        )
    }

    /// Replaces the bodies without re-centering. Callers must preserve the
    /// mass-weighted-mean invariant themselves.
    pub(crate) fn from_parts_unchecked(loops: [FourierLoop<T>; 3], masses: [T; 3]) -> Self {
        Self { loops, masses }
    }

    pub(crate) fn loops_mut(&mut self) -> &mut [FourierLoop<T>; 3] {
        &mut self.loops
    }
}

/// Removes the mass-weighted mean, `uᵢ ← uᵢ − (Σⱼ mⱼuⱼ)/M`.
///
/// Relative loops `uᵢ − uⱼ` are unchanged.
pub fn com_project<T: Real>(loops: [FourierLoop<T>; 3], masses: [T; 3]) -> Result<TripleLoop<T>> {
    let modes = loops[0].modes();
    if loops.iter().any(|l| l.modes() != modes) {
        return Err(Error::ShapeMismatch("loops of a triple must share a mode count".into()));
    }
    if masses.iter().any(|&m| !(m > T::zero()) || !m.is_finite()) {
        return Err(Error::InvalidParameter("masses must be positive and finite".into()));
    }
    let total = masses.iter().fold(T::zero(), |a, &m| a + m);
    let mut centre = FourierLoop::zero(modes);
    for (l, &m) in loops.iter().zip(&masses) {
        centre.axpy(m / total, l);
    }
    let loops = loops.map(|l| l.sub(&centre));
    Ok(TripleLoop { loops, masses })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> FourierLoop<f64> {
        FourierLoop::circle(1.0, 1, 3)
    }

    #[test]
    fn common_motion_removed() {
        let t = com_project([circle(), circle(), circle()], [1.0, 1.0, 1.0]).unwrap();
        for l in t.loops() {
            assert!(l.coeff_norm() < 1e-15);
        }
    }

    #[test]
    fn centered_input_unchanged() {
        let input = [circle(), circle().scaled(-1.0), FourierLoop::zero(3)];
        let t = com_project(input.clone(), [1.0, 1.0, 1.0]).unwrap();
        for (a, b) in t.loops().iter().zip(&input) {
            assert!(a.sub(b).coeff_norm() < 1e-15);
        }
    }

    #[test]
    fn projection_is_idempotent_and_keeps_relative_loops() {
        let a = circle();
        let b = FourierLoop::circle(0.5, 2, 3).time_shifted(0.1);
        let c = FourierLoop::constant(Vec2::new(2.0, -1.0), 3);
        let masses = [1.0, 2.5, 0.7];
        let once = com_project([a.clone(), b.clone(), c.clone()], masses).unwrap();
        let twice = com_project(once.loops().clone(), masses).unwrap();
        for (x, y) in once.loops().iter().zip(twice.loops()) {
            assert!(x.sub(y).coeff_norm() < 1e-14);
        }
        assert!(once.weighted_sum().coeff_norm() < 1e-14);
        assert!(once.relative(0, 1).sub(&a.sub(&b)).coeff_norm() < 1e-14);
        assert!(once.relative(1, 2).sub(&b.sub(&c)).coeff_norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        let mismatched = [circle(), FourierLoop::zero(2), circle()];
        assert!(com_project(mismatched, [1.0, 1.0, 1.0]).is_err());
        assert!(com_project([circle(), circle(), circle()], [1.0, 0.0, 1.0]).is_err());
    }
}
