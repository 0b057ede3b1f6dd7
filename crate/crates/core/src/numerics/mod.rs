//! Grids, fields, quadrature Fourier transforms and discretized operators.

pub mod export;
pub mod field;
pub mod fourier;
pub mod gauss;
pub mod grid;
pub mod operator;

pub use field::{Domain, Field};
pub use fourier::{fourier, fourier_at, inverse_fourier, inverse_fourier_at, script_fourier, script_fourier_inv};
pub use gauss::GaussLegendre;
pub use grid::{Grid, GridSpec, XiGrid};
pub use operator::{schatten_from_singular_values, Kernel, OperatorMatrix};
