//! Discrete Lebesgue and Sobolev norms with continuum scaling.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Field, Repr};

/// Lebesgue exponent, finite `p ≥ 1` or `∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Self::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Self::Finite(p))
        } else {
            Err(Error::InvalidParameter(format!("Lebesgue exponent p = {p} < 1")))
        }
    }

    /// `1/p`, zero for `∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Finite(p) => 1.0 / p,
            Self::Infinity => 0.0,
        }
    }
}

/// `(Σ|u|ᵖ dx dy)^{1/p}`, or `max|u|` for `p = ∞`.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    let p = Exponent::new(p)?;
    if f.repr() != Repr::Physical {
        return Err(Error::WrongRepr {
            expected: Repr::Physical,
            found: f.repr(),
        });
    }
    Ok(lp_norm_of(f.data(), p, f.grid().cell_area()))
}

/// Parallel sum over fixed-size chunks, combined in index order so the
/// result does not depend on thread scheduling.
pub(crate) fn ordered_sum<T: Sync>(items: &[T], chunk: usize, f: impl Fn(usize, &[T]) -> f64 + Sync) -> f64 {
    let parts: Vec<f64> = items
        .par_chunks(chunk.max(1))
        .enumerate()
        .map(|(i, c)| f(i, c))
        .collect();
    parts.iter().sum()
}

const SUM_CHUNK: usize = 4096;

pub(crate) fn lp_norm_of(values: &[num_complex::Complex64], p: Exponent, cell: f64) -> f64 {
    match p {
        Exponent::Infinity => values.iter().fold(0.0_f64, |m, v| m.max(v.norm())),
        Exponent::Finite(p) if p == 2.0 => {
            (ordered_sum(values, SUM_CHUNK, |_, c| c.iter().map(|v| v.norm_sqr()).sum()) * cell).sqrt()
        }
        Exponent::Finite(p) => {
            // rescale by the max to keep large p from overflowing
            let top = values.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
            if top == 0.0 {
                return 0.0;
            }
            let s = ordered_sum(values, SUM_CHUNK, |_, c| c.iter().map(|v| (v.norm() / top).powf(p)).sum());
            top * (s * cell).powf(1.0 / p)
        }
    }
}

/// Sobolev weight: `⟨ξ⟩` for `Hˢ`, `|ξ|` for `Ḣˢ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    Inhomogeneous,
    Homogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevNorm {
    pub value: f64,
    /// Set when a homogeneous norm saw only zero-mode content.
    pub zero_mode_only: bool,
}

pub fn sobolev_norm(f: &Field, s: f64, weight: Weight) -> SobolevNorm {
    let spec = f.spectral();
    let grid = spec.grid();
    let (kx, ky) = (grid.kx(), grid.ky());
    let ny = grid.ny();
    let data = spec.data();
    let sum = ordered_sum(data, ny, |i, row| {
        let mut acc = 0.0;
        for (j, v) in row.iter().enumerate() {
            let r2 = kx[i] * kx[i] + ky[j] * ky[j];
            let w = match weight {
                Weight::Inhomogeneous => (1.0 + r2).powf(s),
                Weight::Homogeneous if r2 == 0.0 => continue,
                Weight::Homogeneous => r2.powf(s),
            };
            acc += w * v.norm_sqr();
        }
        acc
    });
    let value = (sum * grid.spectral_weight()).sqrt();
    let zero_mode_only = weight == Weight::Homogeneous && value == 0.0 && data[0].norm() > 0.0;
    SobolevNorm {
        value,
        zero_mode_only,
    }
}

/// Inhomogeneous `‖u‖_{Hˢ}`.
pub fn hs_norm(f: &Field, s: f64) -> f64 {
    sobolev_norm(f, s, Weight::Inhomogeneous).value
}
