//! Numerical laboratory for nonlinear rotational elasticity: media whose
//! material points only rotate, described by a field of rotation matrices
//! `O(x) = exp(star(u(x)))`.
//!
//! Module map:
//! - [`so3`]: rotation algebra (hat/vee, Rodrigues exponential, logarithm).
//! - [`grid`]: structured grids, fields, and finite-difference operators.
//! - [`strain`]: contortion, strain matrix, irreducible pieces, torsion.
//! - [`energy`]: potential and kinetic energies, identities, expansions,
//!   variational gradients.
//! - [`material`]: Lamé constants, Poisson's ratio, Young's modulus, wave speeds.
//! - [`wavesim`]: transversal and longitudinal rotational-wave solvers.
//! - [`radial`]: Bessel `J₀`, radial standing modes, Helmholtz residuals.
//! - [`fieldio`]: CSV field dumps and SVG arrow plots.

pub mod energy;
pub mod fieldio;
pub mod grid;
pub mod material;
pub mod radial;
pub mod so3;
pub mod strain;
pub mod wavesim;
