//! Complex fields on a [`Grid2D`] and the transform contract.
//!
//! Storage is row-major `(ix, iy)`, `iy` fastest. The forward transform is the
//! unnormalized DFT; the inverse carries `1/(nx·ny)`. Continuum integrals are
//! recovered with [`Grid2D::cell_area`] in physical space and
//! [`Grid2D::spectral_weight`] in spectral space.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid2D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Repr {
    Physical,
    Spectral,
}

#[derive(Debug, Clone)]
pub struct Field {
    grid: Grid2D,
    data: Vec<Complex64>,
    repr: Repr,
}

const ROWS_PER_TASK: usize = 8;

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    dst.par_chunks_mut(rows).enumerate().for_each(|(c, out)| {
        for (r, v) in out.iter_mut().enumerate() {
            *v = src[r * cols + c];
        }
    });
}

fn fft2(grid: &Grid2D, data: &mut [Complex64], forward: bool) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let plans = grid.plans();
    let (py, px) = if forward {
        (&plans.fwd_y, &plans.fwd_x)
    } else {
        (&plans.inv_y, &plans.inv_x)
    };
    data.par_chunks_mut(ny * ROWS_PER_TASK)
        .for_each(|chunk| py.process(chunk));
    let mut tmp = vec![Complex64::new(0.0, 0.0); nx * ny];
    transpose(data, &mut tmp, nx, ny);
    tmp.par_chunks_mut(nx * ROWS_PER_TASK)
        .for_each(|chunk| px.process(chunk));
    transpose(&tmp, data, ny, nx);
    if !forward {
        let scale = 1.0 / (nx * ny) as f64;
        data.par_iter_mut().for_each(|v| *v *= scale);
    }
}

impl Field {
    pub fn zeros(grid: &Grid2D, repr: Repr) -> Self {
        Self {
            grid: grid.clone(),
            data: vec![Complex64::new(0.0, 0.0); grid.len()],
            repr,
        }
    }

    pub fn from_data(grid: &Grid2D, data: Vec<Complex64>, repr: Repr) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                data.len(),
                grid.nx(),
                grid.ny()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            data,
            repr,
        })
    }

    /// Sample `f(x, y)` on the physical lattice.
    pub fn from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> Complex64 + Sync) -> Self {
        let ny = grid.ny();
        let mut data = vec![Complex64::new(0.0, 0.0); grid.len()];
        data.par_chunks_mut(ny).enumerate().for_each(|(i, row)| {
            let x = grid.x(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(x, grid.y(j));
            }
        });
        Self {
            grid: grid.clone(),
            data,
            repr: Repr::Physical,
        }
    }

    /// Single Fourier mode `amp · exp(i(kx[mx] x + ky[my] y))` with signed mode indices.
    pub fn plane_wave(grid: &Grid2D, mx: i64, my: i64, amp: Complex64) -> Result<Self> {
        let ix = Grid2D::mode_slot(grid.nx(), mx)
            .ok_or_else(|| Error::InvalidParameter(format!("mode {mx} not on grid")))?;
        let iy = Grid2D::mode_slot(grid.ny(), my)
            .ok_or_else(|| Error::InvalidParameter(format!("mode {my} not on grid")))?;
        let (kx, ky) = (grid.kx()[ix], grid.ky()[iy]);
        Ok(Self::from_fn(grid, |x, y| amp * Complex64::from_polar(1.0, kx * x + ky * y)))
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn repr(&self) -> Repr {
        self.repr
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.grid.ny() + j]
    }

    fn expect_repr(&self, expected: Repr) -> Result<()> {
        if self.repr == expected {
            Ok(())
        } else {
            Err(Error::WrongRepr {
                expected,
                found: self.repr,
            })
        }
    }

    /// Forward transform; the field must be physical.
    pub fn to_spectral(&self) -> Result<Field> {
        self.expect_repr(Repr::Physical)?;
        Ok(self.clone().into_spectral())
    }

    /// Inverse transform; the field must be spectral.
    pub fn to_physical(&self) -> Result<Field> {
        self.expect_repr(Repr::Spectral)?;
        Ok(self.clone().into_physical())
    }

    /// Convert to spectral, transforming only if needed.
    pub fn into_spectral(mut self) -> Field {
        if self.repr == Repr::Physical {
            fft2(&self.grid, &mut self.data, true);
            self.repr = Repr::Spectral;
        }
        self
    }

    /// Convert to physical, transforming only if needed.
    pub fn into_physical(mut self) -> Field {
        if self.repr == Repr::Spectral {
            fft2(&self.grid, &mut self.data, false);
            self.repr = Repr::Physical;
        }
        self
    }

    pub fn spectral(&self) -> Field {
        self.clone().into_spectral()
    }

    pub fn physical(&self) -> Field {
        self.clone().into_physical()
    }

    pub fn in_repr(self, repr: Repr) -> Field {
        match repr {
            Repr::Physical => self.into_physical(),
            Repr::Spectral => self.into_spectral(),
        }
    }

    /// Multiply `û(ξ)` by a real symbol. The result stays spectral.
    ///
    /// Radial symbols are evaluated at the symmetric Nyquist wavenumber, so
    /// even symbols see no asymmetry there.
    pub fn apply_symbol(&self, sym: impl Fn(f64, f64) -> f64 + Sync) -> Result<Field> {
        self.apply_complex_symbol(|kx, ky| Complex64::new(sym(kx, ky), 0.0))
    }

    pub fn apply_complex_symbol(
        &self,
        sym: impl Fn(f64, f64) -> Complex64 + Sync,
    ) -> Result<Field> {
        let mut out = self.spectral();
        let grid = out.grid.clone();
        let (kx, ky) = (grid.kx(), grid.ky());
        let ny = grid.ny();
        let bad = out
            .data
            .par_chunks_mut(ny)
            .enumerate()
            .find_map_first(|(i, row)| {
                for (j, v) in row.iter_mut().enumerate() {
                    let s = sym(kx[i], ky[j]);
                    if !(s.re.is_finite() && s.im.is_finite()) {
                        return Some((kx[i], ky[j], if s.re.is_finite() { s.im } else { s.re }));
                    }
                    *v *= s;
                }
                None
            });
        if let Some((kx, ky, value)) = bad {
            return Err(Error::NonFiniteSymbol { kx, ky, value });
        }
        Ok(out)
    }

    /// Odd first-derivative pair `(∂ₓu, ∂ᵧu)`; the unmatched Nyquist modes are zeroed.
    pub fn gradient(&self) -> (Field, Field) {
        let spec = self.spectral();
        let grid = spec.grid.clone();
        let ny = grid.ny();
        let mut dx = spec.clone();
        let mut dy = spec;
        for i in 0..grid.nx() {
            for j in 0..ny {
                let idx = i * ny + j;
                if grid.is_nyquist(i, j) {
                    dx.data[idx] = Complex64::new(0.0, 0.0);
                    dy.data[idx] = Complex64::new(0.0, 0.0);
                } else {
                    dx.data[idx] *= Complex64::new(0.0, grid.kx()[i]);
                    dy.data[idx] *= Complex64::new(0.0, grid.ky()[j]);
                }
            }
        }
        (dx, dy)
    }

    /// Pointwise map in physical space.
    pub fn map_physical(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> Field {
        let mut out = self.physical();
        out.data.par_iter_mut().for_each(|v| *v = f(*v));
        out
    }

    pub fn scale(&self, a: Complex64) -> Field {
        let mut out = self.clone();
        out.data.par_iter_mut().for_each(|v| *v *= a);
        out
    }

    /// `self + a·other`, in `self`'s representation.
    pub fn axpy(&self, a: Complex64, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("axpy operands differ".into()));
        }
        let other = other.clone().in_repr(self.repr);
        let mut out = self.clone();
        out.data
            .par_iter_mut()
            .zip(other.data.par_iter())
            .for_each(|(v, w)| *v += a * w);
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.physical()
            .data
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `max |a - b| / max |b|` in physical space.
    pub fn rel_diff(&self, other: &Field) -> f64 {
        let a = self.physical();
        let b = other.physical();
        let num = a
            .data
            .iter()
            .zip(&b.data)
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()));
        let den = b.data.iter().fold(0.0_f64, |m, y| m.max(y.norm()));
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }

    /// Relative L² distance `‖a − b‖₂ / ‖b‖₂`.
    pub fn rel_l2_diff(&self, other: &Field) -> f64 {
        let a = self.physical();
        let b = other.physical();
        let num: f64 = a.data.iter().zip(&b.data).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.data.iter().map(|y| y.norm_sqr()).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointHeader {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    repr: Repr,
    time: f64,
}

/// Write a checkpoint: one JSON header line, then `nx·ny` little-endian
/// `(re, im)` float64 pairs in row-major order.
pub fn write_checkpoint<W: Write>(w: &mut W, field: &Field, time: f64) -> Result<()> {
    let g = field.grid();
    let header = CheckpointHeader {
        nx: g.nx(),
        ny: g.ny(),
        lx: g.lx(),
        ly: g.ly(),
        repr: field.repr(),
        time,
    };
    let line = serde_json::to_string(&header)
        .map_err(|e| Error::Checkpoint(e.to_string()))?;
    w.write_all(line.as_bytes())?;
    w.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(16 * field.data().len());
    for v in field.data() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Read a checkpoint written by [`write_checkpoint`]; returns the field and its time.
pub fn read_checkpoint<R: BufRead>(r: &mut R) -> Result<(Field, f64)> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: CheckpointHeader =
        serde_json::from_str(line.trim_end()).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let grid = Grid2D::new(header.nx, header.ny, header.lx, header.ly)?;
    let mut bytes = vec![0u8; 16 * grid.len()];
    r.read_exact(&mut bytes)
        .map_err(|e| Error::Checkpoint(format!("payload: {e}")))?;
    let data = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    Ok((Field::from_data(&grid, data, header.repr)?, header.time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: &Grid2D, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..grid.len())
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        Field::from_data(grid, data, Repr::Physical).unwrap()
    }

    #[test]
    fn constant_field_is_a_zero_mode_delta() {
        let g = Grid2D::square(16, 2.0 * PI).unwrap();
        let f = Field::from_fn(&g, |_, _| Complex64::new(1.0, 0.0));
        let s = f.to_spectral().unwrap();
        assert!((s.at(0, 0) - Complex64::new(256.0, 0.0)).norm() < 1e-12);
        let rest: f64 = s.data().iter().skip(1).map(|v| v.norm()).sum();
        assert!(rest < 1e-10);
    }

    #[test]
    fn single_mode_has_one_entry() {
        let g = Grid2D::square(16, 2.0 * PI).unwrap();
        let f = Field::plane_wave(&g, 1, 0, Complex64::new(1.0, 0.0)).unwrap();
        let s = f.to_spectral().unwrap();
        let big: Vec<_> = s
            .data()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > 1e-9)
            .collect();
        assert_eq!(big.len(), 1);
        assert_eq!(big[0].0, 16);
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = Grid2D::new(32, 16, 3.0, 5.0).unwrap();
        for seed in 0..100 {
            let f = random_field(&g, seed);
            let s = f.to_spectral().unwrap();
            let back = s.to_physical().unwrap();
            assert!(back.rel_diff(&f) < 1e-12);
            let phys: f64 = f.data().iter().map(|v| v.norm_sqr()).sum::<f64>() * g.cell_area();
            let spec: f64 = s.data().iter().map(|v| v.norm_sqr()).sum::<f64>() * g.spectral_weight();
            assert!((phys - spec).abs() / phys < 1e-12);
        }
    }

    #[test]
    fn wrong_repr_is_rejected() {
        let g = Grid2D::square(8, 1.0).unwrap();
        let f = Field::zeros(&g, Repr::Spectral);
        assert!(matches!(f.to_spectral(), Err(Error::WrongRepr { .. })));
        assert!(Field::zeros(&g, Repr::Physical).to_physical().is_err());
    }

    #[test]
    fn symbols() {
        let g = Grid2D::square(16, 2.0 * PI).unwrap();
        let f = Field::plane_wave(&g, 2, 1, Complex64::new(0.3, 0.2)).unwrap();
        let id = f.apply_symbol(|_, _| 1.0).unwrap().into_physical();
        assert!(id.rel_diff(&f) < 1e-12);
        let lap = f.apply_symbol(|kx, ky| -(kx * kx + ky * ky)).unwrap().into_physical();
        assert!(lap.rel_diff(&f.scale(Complex64::new(-5.0, 0.0))) < 1e-12);
        let bilap = f
            .apply_symbol(|kx, ky| (kx * kx + ky * ky).powi(2))
            .unwrap()
            .into_physical();
        assert!(bilap.rel_diff(&f.scale(Complex64::new(25.0, 0.0))) < 1e-12);
    }

    #[test]
    fn non_finite_symbol_names_location() {
        let g = Grid2D::square(8, 2.0 * PI).unwrap();
        let f = Field::zeros(&g, Repr::Physical);
        let err = f
            .apply_symbol(|kx, ky| if kx == 0.0 && ky == 0.0 { f64::INFINITY } else { 1.0 })
            .unwrap_err();
        match err {
            Error::NonFiniteSymbol { kx, ky, .. } => assert_eq!((kx, ky), (0.0, 0.0)),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn symbols_compose() {
        let g = Grid2D::square(32, 4.0).unwrap();
        let f = random_field(&g, 7);
        let s1 = |kx: f64, ky: f64| 1.0 / (1.0 + kx * kx + ky * ky);
        let s2 = |kx: f64, ky: f64| (kx * kx + 2.0 * ky * ky).sqrt();
        let a = f.apply_symbol(s1).unwrap().apply_symbol(s2).unwrap();
        let b = f.apply_symbol(|x, y| s1(x, y) * s2(x, y)).unwrap();
        assert!(a.rel_diff(&b) < 1e-12);
    }

    #[test]
    fn checkpoint_round_trip() {
        let g = Grid2D::new(8, 16, 1.5, 2.5).unwrap();
        let f = random_field(&g, 3);
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &f, 0.25).unwrap();
        let newline = buf.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(buf.len() - newline - 1, 16 * 128);
        let header: serde_json::Value = serde_json::from_slice(&buf[..newline]).unwrap();
        assert_eq!(header["repr"], "physical");
        assert_eq!(header["nx"], 8);
        let (back, t) = read_checkpoint(&mut buf.as_slice()).unwrap();
        assert_eq!(t, 0.25);
        assert_eq!(back.data(), f.data());
        assert_eq!(back.grid(), f.grid());
    }
}
