//! Discrete one-dimensional harmonic analysis kernels: Young functions,
//! Orlicz norms and maximal operators, weights, the Hilbert transform and
//! its iterated commutators, Calderón–Zygmund decompositions and the
//! Rubio de Francia algorithm.

pub mod czrf;
pub mod error;
pub mod grid;
pub mod maximal;
pub mod orlicz;
pub mod singular;
pub mod sup;
pub mod weights;
pub mod young;

pub use error::{CzError, Result};
pub use grid::{CellRange, DyadicInterval, GridFunction, UniformGrid1D};
pub use sup::IntervalMode;
pub use young::{YoungFamily, YoungSpec};
