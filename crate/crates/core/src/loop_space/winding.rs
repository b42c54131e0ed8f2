use crate::error::{Error, Result};
use crate::loop_space::{FourierLoop, QuadratureGrid};
use crate::scalar::Real;

/// Default near-collision threshold, relative to the loop diameter.
pub const NEAR_COLLISION_REL: f64 = 1e-6;

/// Largest distance from an integer tolerated before the winding is
/// declared unresolved.
pub const WINDING_SNAP_TOL: f64 = 0.01;

/// Accumulated turning angle of `u` about the origin divided by `2π`,
/// before rounding.
///
/// The angular velocity `(u × u̇)/|u|²` is integrated with the grid rule, so
/// the result is a real number that only approaches an integer once the grid
/// resolves the loop.
pub fn raw_winding<T: Real>(u: &FourierLoop<T>, grid: &QuadratureGrid<T>) -> T {
    let pos = u.sample(grid);
    let vel = u.sample_velocity(grid);
    let sum = pos
        .iter()
        .zip(&vel)
        .fold(T::zero(), |acc, (&p, &v)| acc + p.cross(v) / p.norm_sq());
    sum * grid.weight() / T::two_pi()
}

/// Smallest `|u(t)|` over one period and the time where it occurs.
///
/// The grid minimum is refined by golden-section search over the two
/// neighbouring cells.
pub fn min_distance<T: Real>(u: &FourierLoop<T>, grid: &QuadratureGrid<T>) -> (T, T) {
    let pos = u.sample(grid);
    let (j, _) = pos
        .iter()
        .enumerate()
        .fold((0, T::infinity()), |(bj, bd), (j, p)| {
            let d = p.norm_sq();
            if d < bd {
                (j, d)
            } else {
                (bj, bd)
            }
        });
    let h = grid.weight();
    let centre = grid.node(j);
    let (t, d2) = golden_min(|t| u.eval(t).norm_sq(), centre - h, centre + h, 80);
    let grid_d2 = pos[j].norm_sq();
    if grid_d2 <= d2 {
        (grid_d2.sqrt(), centre)
    } else {
        (d2.sqrt(), t - t.floor())
    }
}

pub(crate) fn golden_min<T: Real>(mut f: impl FnMut(T) -> T, mut lo: T, mut hi: T, iters: usize) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Winding number of `u` about the origin with the default near-collision
/// threshold of `1e-6` times the loop diameter.
pub fn winding_number<T: Real>(u: &FourierLoop<T>, grid: &QuadratureGrid<T>) -> Result<i64> {
    winding_number_with(u, grid, T::lit(NEAR_COLLISION_REL))
}

/// Winding number with an explicit near-collision threshold `rel_threshold`
/// (relative to the loop diameter).
pub fn winding_number_with<T: Real>(
    u: &FourierLoop<T>,
    grid: &QuadratureGrid<T>,
    rel_threshold: T,
) -> Result<i64> {
    let threshold = rel_threshold * u.diameter(grid);
    let (dist, _) = min_distance(u, grid);
    if dist <= threshold {
        return Err(Error::NearCollision {
            min_distance: dist.as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    let raw = raw_winding(u, grid);
    let snapped = raw.round();
    if !raw.is_finite() || (raw - snapped).abs() > T::lit(WINDING_SNAP_TOL) {
        return Err(Error::NonIntegerWinding { raw: raw.as_f64() });
    }
    snapped
        .to_i64()
        .ok_or(Error::NonIntegerWinding { raw: raw.as_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec2::Vec2;

    fn grid() -> QuadratureGrid<f64> {
        QuadratureGrid::new(256).unwrap()
    }

    #[test]
    fn circle_windings() {
        let g = grid();
        assert_eq!(winding_number(&FourierLoop::circle(1.0, 1, 4), &g), Ok(1));
        assert_eq!(winding_number(&FourierLoop::circle(1.0, -1, 4), &g), Ok(-1));
        for k in 1..=5 {
            assert_eq!(winding_number(&FourierLoop::circle(1.0, k, 5), &g), Ok(k));
        }
    }

    #[test]
    fn reversed_orientation_by_negating_sine() {
        let mut u = FourierLoop::circle(1.0, 1, 1);
        let (_, _, sin) = u.coeffs_mut();
        sin[0] = -sin[0];
        assert_eq!(winding_number(&u, &grid()), Ok(-1));
    }

    #[test]
    fn loop_not_enclosing_origin_has_zero_winding() {
        let u = FourierLoop::circle(1.0, 1, 2);
        let mut shifted = u.clone();
        shifted.coeffs_mut().0.x = 3.0;
        assert_eq!(winding_number(&shifted, &grid()), Ok(0));
    }

    #[test]
    fn near_collision_detected() {
        let mut u = FourierLoop::circle(1.0, 1, 2);
        u.coeffs_mut().0.x = 1.0; // passes through the origin at t = 1/2
        assert!(matches!(
            winding_number(&u, &grid()),
            Err(Error::NearCollision { .. })
        ));
        let zero = FourierLoop::<f64>::zero(3);
        assert!(matches!(winding_number(&zero, &grid()), Err(Error::NearCollision { .. })));
    }

    #[test]
    fn coarse_grid_reports_non_integer() {
        // Eccentric loop hugging the origin; 8 samples cannot resolve it.
        let mut u = FourierLoop::circle(1.0, 1, 2);
        u.coeffs_mut().0.x = 0.97;
        let coarse = QuadratureGrid::new(8).unwrap();
        assert!(matches!(
            winding_number(&u, &coarse),
            Err(Error::NonIntegerWinding { .. })
        ));
        let fine = QuadratureGrid::new(4096).unwrap();
        assert_eq!(winding_number(&u, &fine), Ok(1));
    }

    #[test]
    fn refined_min_distance_beats_grid() {
        let mut u = FourierLoop::<f64>::circle(1.0, 1, 2);
        *u.coeffs_mut().0 = Vec2::new(0.5, 0.0);
        let g = QuadratureGrid::new(7).unwrap();
        let (d, t) = min_distance(&u, &g);
        assert!((d - 0.5).abs() < 1e-9, "{d}");
        assert!((t - 0.5).abs() < 1e-6, "{t}");
    }
}
