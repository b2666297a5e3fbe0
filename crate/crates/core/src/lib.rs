//! Pseudo-spectral simulation of the defocusing fourth-order NLS
//! `i∂ₜu + Δ²u − Δu + |u|^{2k}u = 0` on a periodic box, with I-method
//! diagnostics: cutoff multipliers, Littlewood–Paley pieces, modified
//! energies, multiplier-inequality sampling and exponent bookkeeping.

pub mod dealias;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod grid;
pub mod gwp;
pub mod inequality_lab;
pub mod multipliers;
pub mod norms;

pub use error::{Error, Result};
pub use field::{Field, Repr};
pub use grid::{DispersionSymbol, Grid2D};
