//! Pseudo-spectral incompressible Navier–Stokes on a periodic box, observed
//! through Giga–Kohn similarity variables.
//!
//! The crate evolves small-data flows of
//!
//! ```text
//! ∂ₜu − Δu + (u·∇)u + ∇p = 0,   div u = 0
//! ```
//!
//! and turns each trajectory into a time series of similarity-variable
//! functionals (`w(y,τ) = (T−t)^{1/2} u(x,t)`, `τ = −ln(T−t)`). The
//! [`lab`] module then checks the frequency-split energy inequalities,
//! Gronwall envelopes and the `(T−t)^{1/2}‖u‖_∞` blow-up-rate monitor
//! against that series, fitting the smallest constant that makes each
//! generic-constant inequality hold.
//!
//! Layout:
//!
//! - [`spectral`]: grid, transforms, Leray projection, derivatives, norms.
//! - [`multipliers`]: the radial cut-off `φ`, the weight `χ`, the derived
//!   symbols, the Hausdorff–Young constant and the pointwise sign checks.
//! - [`similarity`]: the clock map and two independent evaluations of every
//!   similarity-variable functional.
//! - [`dynamics`]: integrating-factor RK4 time stepping and trajectory runs.
//! - [`lab`]: energy ledgers and inequality verdicts.
//! - [`gronwall`]: the quintic comparison ODE and envelope checks.
//! - [`runner`]: configuration, campaigns, serialization.
//!
//! ```
//! use selfsim::spectral::{SpectralGrid, PhysicalField};
//!
//! let grid = SpectralGrid::new(8, 2.0 * std::f64::consts::PI).unwrap();
//! let f = PhysicalField::from_fn(&grid, |x| [x[0].sin(), 0.0, 0.0]);
//! let norms = f.to_spectral().norms();
//! let exact = (2.0 * std::f64::consts::PI).powi(3) / 2.0;
//! assert!((norms.l2_sq - exact).abs() < 1e-10 * exact);
//! ```

pub mod dynamics;
pub mod error;
pub mod gronwall;
pub mod lab;
pub mod multipliers;
pub mod runner;
pub mod similarity;
pub mod spectral;

pub use error::{Error, Result};
