use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform rectangle-rule quadrature on the circle `R/Z`.
///
/// Nodes are `t_j = j/N` with weights `1/N`. A table of `cos`/`sin` of
/// `2πm/N` is precomputed so that mode `k` at node `j` is a table lookup at
/// index `k·j mod N`.
#[derive(Debug, Clone)]
pub struct QuadratureGrid<T> {
    n: usize,
    cos_table: Vec<T>,
    sin_table: Vec<T>,
}

impl<T: Real> QuadratureGrid<T> {
    pub const DEFAULT_SAMPLES: usize = 512;

    pub fn new(samples: usize) -> Result<Self> {
        if samples < 4 {
            return Err(Error::InvalidParameter(format!(
                "quadrature grid needs at least 4 samples, got {samples}"
            )));
        }
        let step = T::two_pi() / T::of_usize(samples);
        let (sin_table, cos_table) = (0..samples)
            .map(|m| (step * T::of_usize(m)).sin_cos())
            .unzip();
        Ok(Self {
            n: samples,
            cos_table,
            sin_table,
        })
    }

    /// Smallest grid that resolves every quartic product of `modes` modes.
    pub fn for_modes(modes: usize) -> Result<Self> {
        Self::new((4 * modes + 1).max(Self::DEFAULT_SAMPLES))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn node(&self, j: usize) -> T {
        T::of_usize(j) / T::of_usize(self.n)
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n).map(|j| self.node(j))
    }

    #[inline]
    pub fn weight(&self) -> T {
        T::one() / T::of_usize(self.n)
    }

    /// `(cos 2πk t_j, sin 2πk t_j)`.
    #[inline]
    pub fn trig(&self, k: usize, j: usize) -> (T, T) {
        let m = (k * j) % self.n;
        (self.cos_table[m], self.sin_table[m])
    }

    /// Errors unless `N ≥ 4K + 1`.
    pub fn check_resolves(&self, modes: usize) -> Result<()> {
        if self.n < 4 * modes + 1 {
            return Err(Error::InvalidParameter(format!(
                "grid of {} samples cannot resolve {} modes (need at least {})",
                self.n,
                modes,
                4 * modes + 1
            )));
        }
        Ok(())
    }

    /// Rectangle-rule mean of `f(t_j)`.
    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        let sum = (0..self.n).fold(T::zero(), |acc, j| acc + f(self.node(j)));
        sum * self.weight()
    }

    /// The same rule with twice as many nodes.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.n * 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_table_matches_direct_evaluation() {
        let grid = QuadratureGrid::<f64>::new(64).unwrap();
        for k in [0, 1, 5, 63, 100] {
            for j in [0, 3, 17, 63] {
                let t = grid.node(j);
                let (c, s) = grid.trig(k, j);
                let arg = std::f64::consts::TAU * k as f64 * t;
                assert!((c - arg.cos()).abs() < 1e-12);
                assert!((s - arg.sin()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rectangle_rule_integrates_trig_polynomials_exactly() {
        let grid = QuadratureGrid::<f64>::new(16).unwrap();
        let tau = std::f64::consts::TAU;
        let v = grid.integrate(|t| (tau * 3.0 * t).cos().powi(2));
        assert!((v - 0.5).abs() < 1e-15);
        let v = grid.integrate(|t| (tau * 2.0 * t).sin());
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn resolution_check() {
        let grid = QuadratureGrid::<f64>::new(64).unwrap();
        assert!(grid.check_resolves(15).is_ok());
        assert!(grid.check_resolves(16).is_err());
        assert!(QuadratureGrid::<f64>::new(2).is_err());
    }
}
