use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::loop_space::{com_project, FourierLoop, TripleLoop};
use crate::scalar::Real;
use crate::vec2::Vec2;

/// Seeded perturbation of every coefficient, mode `k` drawn uniformly from
/// `[-scale/k, scale/k]`, then shrunk so that its sup-norm bound
/// `|δmean| + Σ(|δcos_k| + |δsin_k|)` does not exceed `budget`.
fn perturbation<T: Real>(rng: &mut ChaCha8Rng, modes: usize, scale: f64, budget: f64) -> FourierLoop<T> {
    let mut draw = |k: usize| {
        let s = scale / k.max(1) as f64;
        Vec2::new(rng.gen_range(-1.0..=1.0) * s, rng.gen_range(-1.0..=1.0) * s)
    };
    let mean = draw(0);
    let (cos, sin): (Vec<_>, Vec<_>) = (1..=modes).map(|k| (draw(k), draw(k))).unzip();
    let bound = mean.norm() + cos.iter().chain(&sin).map(|c| c.norm()).sum::<f64>();
    let shrink = if bound > budget { budget / bound } else { 1.0 };
    let conv = |v: Vec2<f64>| Vec2::new(T::lit(v.x * shrink), T::lit(v.y * shrink));
    FourierLoop::new(
        conv(mean),
        cos.into_iter().map(conv).collect(),
        sin.into_iter().map(conv).collect(),
    )
    .expect("finite perturbation")
}

/// A `winding`-fold unit circle plus a seeded perturbation on all modes.
///
/// The perturbation never moves a point by more than half the base radius,
/// so the loop stays in the winding class it started in.
pub fn random_loop<T: Real>(seed: u64, modes: usize, winding: i64, noise_scale: f64) -> Result<FourierLoop<T>> {
    if winding == 0 {
        return Err(Error::InvalidWinding);
    }
    if modes < winding.unsigned_abs() as usize {
        return Err(Error::InvalidParameter(format!(
            "winding {winding} needs at least {} modes, got {modes}",
            winding.unsigned_abs()
        )));
    }
    let mut base = FourierLoop::circle(T::one(), winding, modes);
    if noise_scale != 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        base.axpy(T::one(), &perturbation(&mut rng, modes, noise_scale, 0.5));
    }
    Ok(base)
}

/// A perturbed triangle rotating `winding` times per period, centred so that
/// `Σ mᵢuᵢ = 0`.
///
/// Every relative loop `uᵢ − uⱼ` winds `winding` times around the origin:
/// vertices are jittered from the unit equilateral triangle by at most 0.3
/// (so each side stays above 0.4) and each body's loop perturbation is kept
/// below a quarter of the shortest side.
pub fn random_triple<T: Real>(
    seed: u64,
    modes: usize,
    winding: i64,
    noise_scale: f64,
    masses: [T; 3],
) -> Result<TripleLoop<T>> {
    if winding == 0 {
        return Err(Error::InvalidWinding);
    }
    if modes < winding.unsigned_abs() as usize {
        return Err(Error::InvalidParameter(format!(
            "winding {winding} needs at least {} modes, got {modes}",
            winding.unsigned_abs()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 3f64.sqrt() / 2.0;
    let mut vertices = [(0.0, 0.0), (-1.0, 0.0), (-0.5, h)];
    if noise_scale != 0.0 {
        for v in &mut vertices {
            let r = 0.3 * rng.gen_range(0.0..=1.0);
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            v.0 += r * phi.cos();
            v.1 += r * phi.sin();
        }
    }
    let dist = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);
    let shortest = dist(vertices[0], vertices[1])
        .min(dist(vertices[1], vertices[2]))
        .min(dist(vertices[0], vertices[2]));
    let loops = vertices.map(|(x, y)| {
        let mut l = FourierLoop::rotating(Vec2::new(T::lit(x), T::lit(y)), winding, modes);
        if noise_scale != 0.0 {
            l.axpy(T::one(), &perturbation(&mut rng, modes, noise_scale, 0.24 * shortest));
        }
        l
    });
    com_project(loops, masses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loop_space::{winding_number, QuadratureGrid};

    #[test]
    fn zero_noise_gives_exact_circle() {
        let u = random_loop::<f64>(1, 8, 1, 0.0).unwrap();
        assert_eq!(u, FourierLoop::circle(1.0, 1, 8));
    }

    #[test]
    fn noisy_loop_keeps_winding() {
        let grid = QuadratureGrid::new(1024).unwrap();
        for seed in 0..20 {
            for w in [1, -1, 2, 3] {
                let u = random_loop::<f64>(seed, 8, w, 0.2).unwrap();
                assert_eq!(winding_number(&u, &grid), Ok(w));
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = random_loop::<f64>(7, 16, 1, 0.3).unwrap();
        let b = random_loop::<f64>(7, 16, 1, 0.3).unwrap();
        assert_eq!(a, b);
        let c = random_loop::<f64>(8, 16, 1, 0.3).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_requests() {
        assert_eq!(random_loop::<f64>(1, 8, 0, 0.1), Err(Error::InvalidWinding));
        assert!(random_loop::<f64>(1, 2, 3, 0.1).is_err());
        assert!(random_triple::<f64>(1, 4, 0, 0.1, [1.0; 3]).is_err());
    }

    #[test]
    fn random_triples_have_relative_winding() {
        let grid = QuadratureGrid::new(1024).unwrap();
        for seed in 0..10 {
            let t = random_triple::<f64>(seed, 8, 1, 0.3, [1.0, 2.0, 0.5]).unwrap();
            assert!(t.weighted_sum().coeff_norm() < 1e-13);
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                assert_eq!(winding_number(&t.relative(i, j), &grid), Ok(1));
            }
        }
    }
}
