//! Fourier multipliers: the I-operator and Littlewood–Paley pieces.

mod i_operator;
mod littlewood_paley;

pub use i_operator::{profile, profiles, IMultiplier, Sharp, Smooth, TransitionProfile, Variant};
pub use littlewood_paley::{bump, decompose, dyadic_levels, LpProjector, Piece, Projection};
