//! Numerical building blocks: log-Gamma, quadrature, monotone inversion and
//! scalar maximization.

pub mod gamma;
pub mod interval;
pub mod optim;
pub mod quad;
pub mod root;

pub use gamma::gamma_ln;
pub use interval::{Interval, SearchBounds};
pub use optim::{
    maximize_scalar, scan_grid, BoundaryHit, MaximizeOptions, OptimResult, DEFAULT_CLIP, DEFAULT_GRID_SIZE,
    DEFAULT_P_MAX,
};
pub use quad::{integrate, integrate_semi_infinite, QuadOptions, QuadratureResult, Transform};
pub use root::{invert_monotone, Direction};
