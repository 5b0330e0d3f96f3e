//! Grids, fields, transforms and norms on `T x R^{n-1} x R_+`.

pub mod field;
pub mod grid;
pub mod io;
pub mod normal;
pub mod norms;
pub mod transform;

pub use field::{NormalJet, PhysicalField, SpectralField};
pub use grid::{Grid, NormalGrid};
