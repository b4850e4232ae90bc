//! Shared numerical primitives: adaptive quadrature, convex minimization and
//! reproducible random streams.

mod minimize;
mod quadrature;
mod random;

pub use minimize::{find_min_convex, find_min_convex_with_derivative, Minimum, RootSpec};
pub use quadrature::{integrate, integrate_periodic, Integral, QuadratureSpec};
pub use random::RandomStream;
