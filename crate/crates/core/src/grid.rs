//! Periodic computational box and its wavenumber tables.
//!
//! The plane is approximated by an `lx × ly` periodic box sampled on an
//! `nx × ny` lattice. Wavenumbers use the symmetric range
//! `m ∈ [-n/2, n/2)`, so the unmatched Nyquist mode sits at `m = -n/2`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub(crate) struct FftPlans {
    pub(crate) fwd_x: Arc<dyn Fft<f64>>,
    pub(crate) inv_x: Arc<dyn Fft<f64>>,
    pub(crate) fwd_y: Arc<dyn Fft<f64>>,
    pub(crate) inv_y: Arc<dyn Fft<f64>>,
}

struct GridInner {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    kx: Vec<f64>,
    ky: Vec<f64>,
    plans: FftPlans,
    padded: Mutex<HashMap<usize, Grid2D>>,
}

/// Shared handle to a periodic grid. Cloning is cheap.
#[derive(Clone)]
pub struct Grid2D {
    inner: Arc<GridInner>,
}

impl fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid2D")
            .field("nx", &self.nx())
            .field("ny", &self.ny())
            .field("lx", &self.lx())
            .field("ly", &self.ly())
            .finish()
    }
}

impl PartialEq for Grid2D {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.nx() == other.nx()
                && self.ny() == other.ny()
                && self.lx() == other.lx()
                && self.ly() == other.ly())
    }
}

fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let m = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
            2.0 * PI * m as f64 / l
        })
        .collect()
}

impl Grid2D {
    /// Build a grid; mode counts must be powers of two and at least 8.
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n} must be a power of two and >= 8"
                )));
            }
        }
        for (name, l) in [("lx", lx), ("ly", ly)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("{name} = {l} must be positive")));
            }
        }
        Ok(Self::build(nx, ny, lx, ly))
    }

    /// Square grid with `n × n` modes on an `l × l` box.
    pub fn square(n: usize, l: f64) -> Result<Self> {
        Self::new(n, n, l, l)
    }

    fn build(nx: usize, ny: usize, lx: f64, ly: f64) -> Self {
        let mut planner = FftPlanner::new();
        let plans = FftPlans {
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
        };
        Self {
            inner: Arc::new(GridInner {
                nx,
                ny,
                lx,
                ly,
                kx: wavenumbers(nx, lx),
                ky: wavenumbers(ny, ly),
                plans,
                padded: Mutex::new(HashMap::new()),
            }),
        }
    }

    /// Same box, `factor` times as many modes per direction. Cached.
    pub(crate) fn refined(&self, factor: usize) -> Grid2D {
        let mut cache = self.inner.padded.lock().expect("grid cache poisoned");
        cache
            .entry(factor)
            .or_insert_with(|| {
                Self::build(self.nx() * factor, self.ny() * factor, self.lx(), self.ly())
            })
            .clone()
    }

    pub fn nx(&self) -> usize {
        self.inner.nx
    }

    pub fn ny(&self) -> usize {
        self.inner.ny
    }

    pub fn lx(&self) -> f64 {
        self.inner.lx
    }

    pub fn ly(&self) -> f64 {
        self.inner.ly
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kx(&self) -> &[f64] {
        &self.inner.kx
    }

    pub fn ky(&self) -> &[f64] {
        &self.inner.ky
    }

    pub fn dx(&self) -> f64 {
        self.lx() / self.nx() as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly() / self.ny() as f64
    }

    /// Quadrature weight of one physical cell.
    pub fn cell_area(&self) -> f64 {
        self.lx() * self.ly() / self.len() as f64
    }

    /// Weight turning `Σ|û|²` into `∫|u|²` under the unnormalized forward transform.
    pub fn spectral_weight(&self) -> f64 {
        let n = self.len() as f64;
        self.lx() * self.ly() / (n * n)
    }

    pub fn area(&self) -> f64 {
        self.lx() * self.ly()
    }

    /// Physical coordinate of grid index `i` along x, centred on the box.
    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.lx() + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        -0.5 * self.ly() + j as f64 * self.dy()
    }

    /// Smallest per-direction Nyquist wavenumber.
    pub fn nyquist(&self) -> f64 {
        (PI * self.nx() as f64 / self.lx()).min(PI * self.ny() as f64 / self.ly())
    }

    /// Largest `|ξ|` present in the table (box corner).
    pub fn max_wavenumber(&self) -> f64 {
        let kx = PI * self.nx() as f64 / self.lx();
        let ky = PI * self.ny() as f64 / self.ly();
        kx.hypot(ky)
    }

    /// Signed integer mode index of table entry `j` for an `n`-point axis.
    pub fn mode_index(n: usize, j: usize) -> i64 {
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Table position of signed mode `m`, if representable.
    pub fn mode_slot(n: usize, m: i64) -> Option<usize> {
        let half = (n / 2) as i64;
        if m < -half || m >= half {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + n as i64) as usize)
        }
    }

    pub(crate) fn plans(&self) -> &FftPlans {
        &self.inner.plans
    }

    /// Iterate `(index, kx, ky)` over every spectral slot in storage order.
    pub fn wavevectors(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        let ny = self.ny();
        self.kx().iter().enumerate().flat_map(move |(i, &kx)| {
            self.ky()
                .iter()
                .enumerate()
                .map(move |(j, &ky)| (i * ny + j, kx, ky))
        })
    }

    /// True if slot `(i, j)` lies on an unmatched Nyquist row or column.
    pub fn is_nyquist(&self, i: usize, j: usize) -> bool {
        i == self.nx() / 2 || j == self.ny() / 2
    }
}

/// Linear-flow phase `|ξ|⁴ + |ξ|²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DispersionSymbol;

impl DispersionSymbol {
    pub fn eval(&self, kx: f64, ky: f64) -> f64 {
        let r2 = kx * kx + ky * ky;
        r2 * r2 + r2
    }

    pub fn radial(&self, r: f64) -> f64 {
        let r2 = r * r;
        r2 * r2 + r2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid2D::new(4, 8, 1.0, 1.0).is_err());
        assert!(Grid2D::new(12, 8, 1.0, 1.0).is_err());
        assert!(Grid2D::new(8, 8, 0.0, 1.0).is_err());
        assert!(Grid2D::new(8, 16, 1.0, 2.0).is_ok());
    }

    #[test]
    fn wavenumber_tables() {
        let g = Grid2D::new(16, 8, 2.0 * PI, 4.0 * PI).unwrap();
        assert_eq!(g.kx().len(), 16);
        assert_eq!(g.ky().len(), 8);
        assert_eq!(g.kx().iter().filter(|&&k| k == 0.0).count(), 1);
        assert_eq!(g.ky().iter().filter(|&&k| k == 0.0).count(), 1);
        assert_eq!(g.kx()[1], 1.0);
        assert_eq!(g.kx()[8], -8.0);
        assert_eq!(g.ky()[1], 0.5);
        let w = g.cell_area();
        assert!((w - 2.0 * PI * 4.0 * PI / 128.0).abs() < 1e-15);
    }

    #[test]
    fn mode_slots_invert_indices() {
        for j in 0..16 {
            let m = Grid2D::mode_index(16, j);
            assert_eq!(Grid2D::mode_slot(16, m), Some(j));
        }
        assert_eq!(Grid2D::mode_slot(16, 8), None);
    }

    #[test]
    fn dispersion_symbol_is_radial_and_increasing() {
        let p = DispersionSymbol;
        assert_eq!(p.eval(0.0, 0.0), 0.0);
        assert_eq!(p.eval(3.0, 4.0), p.radial(5.0));
        let mut prev = -1.0;
        for i in 0..100 {
            let v = p.radial(i as f64 * 0.1);
            assert!(v > prev);
            prev = v;
        }
    }
}
