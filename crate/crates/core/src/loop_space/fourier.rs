use crate::error::{Error, Result};
use crate::loop_space::QuadratureGrid;
use crate::scalar::Real;
use crate::vec2::Vec2;

/// A closed planar path `u: R/Z → R²` stored as a truncated Fourier series
///
/// ```text
/// u(t) = mean + Σ_{k=1..K} cos_k · cos(2πkt) + sin_k · sin(2πkt)
/// ```
///
/// `cos_coeffs()[k - 1]` and `sin_coeffs()[k - 1]` hold the mode-`k` vectors.
/// Periodicity is structural: every evaluation wraps `t` modulo 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierLoop<T> {
    mean: Vec2<T>,
    cos: Vec<Vec2<T>>,
    sin: Vec<Vec2<T>>,
}

impl<T: Real> FourierLoop<T> {
    /// Dimension of the configuration space. Only planar loops are supported.
    pub const DIMENSION: usize = 2;

    pub fn new(mean: Vec2<T>, cos: Vec<Vec2<T>>, sin: Vec<Vec2<T>>) -> Result<Self> {
        if cos.len() != sin.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} cosine modes but {} sine modes",
                cos.len(),
                sin.len()
            )));
        }
        if cos.is_empty() {
            return Err(Error::InvalidParameter("a loop needs at least one mode".into()));
        }
        let finite = mean.is_finite()
            && cos.iter().all(|c| c.is_finite())
            && sin.iter().all(|s| s.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("loop coefficients must be finite".into()));
        }
        Ok(Self { mean, cos, sin })
    }

    pub fn zero(modes: usize) -> Self {
        assert!(modes > 0, "a loop needs at least one mode");
        Self {
            mean: Vec2::zero(),
            cos: vec![Vec2::zero(); modes],
            sin: vec![Vec2::zero(); modes],
        }
    }

    pub fn constant(point: Vec2<T>, modes: usize) -> Self {
        let mut l = Self::zero(modes);
        l.mean = point;
        l
    }

    /// The point `anchor` carried around the origin `k` times per period by
    /// complex multiplication: `u(t) = anchor · e^{2πikt}`.
    ///
    /// A unit `anchor` on the first axis gives the unit circle traversed
    /// counter-clockwise `k` times. Negative `k` reverses orientation.
    pub fn rotating(anchor: Vec2<T>, k: i64, modes: usize) -> Self {
        let idx = k.unsigned_abs() as usize;
        assert!(idx >= 1 && idx <= modes, "mode {k} outside 1..={modes}");
        let mut l = Self::zero(modes);
        let sign = if k < 0 { -T::one() } else { T::one() };
        // anchor·(cos θ + i sin θ) = anchor·cos θ + (i·anchor)·sin θ
        l.cos[idx - 1] = anchor;
        l.sin[idx - 1] = anchor.perp() * sign;
        l
    }

    /// Circle of the given radius about the origin with winding `k`.
    pub fn circle(radius: T, k: i64, modes: usize) -> Self {
        Self::rotating(Vec2::new(radius, T::zero()), k, modes)
    }

    #[inline]
    pub fn modes(&self) -> usize {
        self.cos.len()
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        Self::DIMENSION
    }

    #[inline]
    pub fn mean(&self) -> Vec2<T> {
        self.mean
    }

    #[inline]
    pub fn cos_coeffs(&self) -> &[Vec2<T>] {
        &self.cos
    }

    #[inline]
    pub fn sin_coeffs(&self) -> &[Vec2<T>] {
        &self.sin
    }

    pub(crate) fn coeffs_mut(&mut self) -> (&mut Vec2<T>, &mut [Vec2<T>], &mut [Vec2<T>]) {
        (&mut self.mean, &mut self.cos, &mut self.sin)
    }

    #[inline]
    fn angular(k: usize) -> T {
        T::two_pi() * T::of_usize(k)
    }

    pub fn eval(&self, t: T) -> Vec2<T> {
        let t = t - t.floor();
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .fold(self.mean, |acc, (i, (&a, &b))| {
                let (s, c) = (Self::angular(i + 1) * t).sin_cos();
                acc + a * c + b * s
            })
    }

    pub fn deriv(&self, t: T) -> Vec2<T> {
        let t = t - t.floor();
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .fold(Vec2::zero(), |acc, (i, (&a, &b))| {
                let w = Self::angular(i + 1);
                let (s, c) = (w * t).sin_cos();
                acc + (b * c - a * s) * w
            })
    }

    pub fn deriv2(&self, t: T) -> Vec2<T> {
        let t = t - t.floor();
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .fold(Vec2::zero(), |acc, (i, (&a, &b))| {
                let w = Self::angular(i + 1);
                let (s, c) = (w * t).sin_cos();
                acc - (a * c + b * s) * (w * w)
            })
    }

    /// `½∫₀¹|u̇|²dt`, exact via Parseval.
    pub fn kinetic_integral(&self) -> T {
        let half = T::lit(0.5);
        let sum = self
            .cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .fold(T::zero(), |acc, (i, (&a, &b))| {
                let w = Self::angular(i + 1);
                acc + w * w * (a.norm_sq() + b.norm_sq()) * half
            });
        half * sum
    }

    /// Per-coefficient weight of the `W^{1,2}` inner product
    /// `∫(u·v + u̇·v̇)dt`: `1` for the mean, `(1 + (2πk)²)/2` for mode `k`.
    #[inline]
    pub fn sobolev_weight(k: usize) -> T {
        if k == 0 {
            T::one()
        } else {
            let w = Self::angular(k);
            (T::one() + w * w) * T::lit(0.5)
        }
    }

    /// `⟨u, v⟩ = ∫₀¹(u·v + u̇·v̇)dt`, in closed form.
    pub fn sobolev_inner(&self, other: &Self) -> T {
        assert_eq!(self.modes(), other.modes());
        let mut acc = self.mean.dot(other.mean);
        for k in 1..=self.modes() {
            let i = k - 1;
            acc = acc
                + Self::sobolev_weight(k)
                    * (self.cos[i].dot(other.cos[i]) + self.sin[i].dot(other.sin[i]));
        }
        acc
    }

    pub fn sobolev_norm(&self) -> T {
        self.sobolev_inner(self).sqrt()
    }

    /// Euclidean inner product of the raw coefficient vectors.
    pub fn coeff_dot(&self, other: &Self) -> T {
        assert_eq!(self.modes(), other.modes());
        self.cos
            .iter()
            .zip(&other.cos)
            .chain(self.sin.iter().zip(&other.sin))
            .fold(self.mean.dot(other.mean), |acc, (a, b)| acc + a.dot(*b))
    }

    pub fn coeff_norm(&self) -> T {
        self.coeff_dot(self).sqrt()
    }

    /// Applies `f(k, coefficient)` to every coefficient, `k = 0` being the mean.
    pub fn map_coeffs(&self, mut f: impl FnMut(usize, Vec2<T>) -> Vec2<T>) -> Self {
        Self {
            mean: f(0, self.mean),
            cos: self.cos.iter().enumerate().map(|(i, &c)| f(i + 1, c)).collect(),
            sin: self.sin.iter().enumerate().map(|(i, &s)| f(i + 1, s)).collect(),
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        self.map_coeffs(|_, c| c * factor)
    }

    /// `self + alpha · other`.
    pub fn axpy(&mut self, alpha: T, other: &Self) {
        assert_eq!(self.modes(), other.modes());
        self.mean += other.mean * alpha;
        for (a, &b) in self.cos.iter_mut().zip(&other.cos) {
            *a += b * alpha;
        }
        for (a, &b) in self.sin.iter_mut().zip(&other.sin) {
            *a += b * alpha;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-T::one(), other);
        out
    }

    /// Rigid rotation of the plane by `angle`.
    pub fn rotated(&self, angle: T) -> Self {
        self.map_coeffs(|_, c| c.rotated(angle))
    }

    /// Reparametrization `t ↦ u(t + shift)`.
    pub fn time_shifted(&self, shift: T) -> Self {
        let mut out = self.clone();
        for k in 1..=self.modes() {
            let (s, c) = (Self::angular(k) * shift).sin_cos();
            let (a, b) = (self.cos[k - 1], self.sin[k - 1]);
            out.cos[k - 1] = a * c + b * s;
            out.sin[k - 1] = b * c - a * s;
        }
        out
    }

    /// Positions at every grid node.
    pub fn sample(&self, grid: &QuadratureGrid<T>) -> Vec<Vec2<T>> {
        (0..grid.len())
            .map(|j| {
                (1..=self.modes()).fold(self.mean, |acc, k| {
                    let (c, s) = grid.trig(k, j);
                    acc + self.cos[k - 1] * c + self.sin[k - 1] * s
                })
            })
            .collect()
    }

    /// Velocities at every grid node.
    pub fn sample_velocity(&self, grid: &QuadratureGrid<T>) -> Vec<Vec2<T>> {
        (0..grid.len())
            .map(|j| {
                (1..=self.modes()).fold(Vec2::zero(), |acc, k| {
                    let (c, s) = grid.trig(k, j);
                    acc + (self.sin[k - 1] * c - self.cos[k - 1] * s) * Self::angular(k)
                })
            })
            .collect()
    }

    /// Accelerations at every grid node.
    pub fn sample_acceleration(&self, grid: &QuadratureGrid<T>) -> Vec<Vec2<T>> {
        (0..grid.len())
            .map(|j| {
                (1..=self.modes()).fold(Vec2::zero(), |acc, k| {
                    let (c, s) = grid.trig(k, j);
                    let w = Self::angular(k);
                    acc - (self.cos[k - 1] * c + self.sin[k - 1] * s) * (w * w)
                })
            })
            .collect()
    }

    /// Least-squares (discrete Fourier) fit of `modes` modes to points
    /// sampled uniformly at `t_j = j/N`.
    pub fn fit(points: &[Vec2<T>], modes: usize) -> Result<Self> {
        let n = points.len();
        if modes == 0 || n <= 2 * modes {
            return Err(Error::InvalidParameter(format!(
                "fitting {modes} modes needs more than {} samples, got {n}",
                2 * modes
            )));
        }
        let grid = QuadratureGrid::new(n)?;
        let inv_n = grid.weight();
        let two_n = inv_n + inv_n;
        let mean = points.iter().fold(Vec2::zero(), |acc, &p| acc + p) * inv_n;
        let mut cos = Vec::with_capacity(modes);
        let mut sin = Vec::with_capacity(modes);
        for k in 1..=modes {
            let (a, b) = points.iter().enumerate().fold(
                (Vec2::zero(), Vec2::zero()),
                |(a, b), (j, &p)| {
                    let (c, s) = grid.trig(k, j);
                    (a + p * c, b + p * s)
                },
            );
            cos.push(a * two_n);
            sin.push(b * two_n);
        }
        Self::new(mean, cos, sin)
    }

    /// Bounding-box diagonal of the sampled image, a cheap stand-in for the
    /// diameter (within a factor `√2`).
    pub fn diameter(&self, grid: &QuadratureGrid<T>) -> T {
        bbox_diagonal(&self.sample(grid))
    }
}

pub(crate) fn bbox_diagonal<T: Real>(points: &[Vec2<T>]) -> T {
    let Some(first) = points.first() else {
        return T::zero();
    };
    let (lo, hi) = points.iter().fold((*first, *first), |(lo, hi), p| {
        (
            Vec2::new(lo.x.min(p.x), lo.y.min(p.y)),
            Vec2::new(hi.x.max(p.x), hi.y.max(p.y)),
        )
    });
    (hi - lo).norm()
}
