//! Fixed-energy variational periodic orbits for the Kepler and Newtonian
//! three-body problems.
//!
//! Loops are truncated Fourier series ([`loop_space`]); the fixed-energy
//! action and its gradient live in [`functionals`]; [`minimizer`] descends
//! the action and recovers physical orbits; [`oracles`] supplies closed-form
//! Kepler and Lagrange solutions plus an RK4 integrator; [`verify`] ties
//! them together with identity and residual checks.
//!
//! Every numerical routine is generic over [`Real`] (`f32` or `f64`). The
//! `*64` aliases below fix the scalar to `f64`, which is what the command
//! line front end uses.

// `!(x > 0)` is how parameter checks reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod functionals;
pub mod loop_space;
pub mod minimizer;
pub mod oracles;
pub mod orbit;
pub mod scalar;
pub mod vec2;
pub mod verify;

pub use error::{Error, Result};
pub use functionals::{System, ThreeBodySystem, TwoBodySystem};
pub use loop_space::{FourierLoop, LoopSet, QuadratureGrid, TripleLoop};

pub use minimizer::{MinimizeOptions, MinimizeResult, Status};
pub use orbit::{OrbitSource, PhysicalOrbit, SampledPath, State};
pub use scalar::Real;
pub use verify::CheckReport;
pub use vec2::Vec2;

pub type Vec2f64 = Vec2<f64>;
pub type FourierLoop64 = FourierLoop<f64>;
pub type TripleLoop64 = TripleLoop<f64>;
pub type QuadratureGrid64 = QuadratureGrid<f64>;
pub type TwoBodySystem64 = TwoBodySystem<f64>;
pub type ThreeBodySystem64 = ThreeBodySystem<f64>;
pub type PhysicalOrbit64 = PhysicalOrbit<f64>;
pub type MinimizeOptions64 = MinimizeOptions<f64>;
pub type CheckReport64 = CheckReport<f64>;

