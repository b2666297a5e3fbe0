//! The two exactly solvable sub-flows of the equation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Field, Repr};
use crate::grid::{DispersionSymbol, Grid2D};

/// Phase table `exp(i·t·(|ξ|⁴ + |ξ|²))` in storage order.
pub(crate) fn phase_table(grid: &Grid2D, t: f64) -> Vec<Complex64> {
    let p = DispersionSymbol;
    let (kx, ky) = (grid.kx(), grid.ky());
    let ny = grid.ny();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    out.par_chunks_mut(ny).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = Complex64::from_polar(1.0, t * p.eval(kx[i], ky[j]));
        }
    });
    out
}

pub(crate) fn apply_phase(spec: &mut Field, table: &[Complex64]) {
    debug_assert_eq!(spec.repr(), Repr::Spectral);
    spec.data_mut()
        .par_iter_mut()
        .zip(table.par_iter())
        .for_each(|(v, w)| *v *= w);
}

/// Free evolution `e^{it(Δ²−Δ)}`: `û(ξ) ← e^{it(|ξ|⁴+|ξ|²)}û(ξ)`.
/// Returns the field in its input representation.
pub fn linear_propagate(f: &Field, t: f64) -> Field {
    let repr = f.repr();
    let mut spec = f.spectral();
    let table = phase_table(f.grid(), t);
    apply_phase(&mut spec, &table);
    spec.in_repr(repr)
}

/// Exact solution of `i∂ₜu = −|u|^{2k}u`: `u ← u·exp(i|u|^{2k}t)` pointwise.
pub fn nonlinear_phase_step(f: &Field, k: u32, t: f64) -> Result<Field> {
    if f.repr() != Repr::Physical {
        return Err(Error::WrongRepr {
            expected: Repr::Physical,
            found: f.repr(),
        });
    }
    Ok(f.map_physical(|v| v * Complex64::from_polar(1.0, v.norm_sqr().powi(k as i32) * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::lp_norm;
    use std::f64::consts::PI;

    #[test]
    fn zero_time_is_identity() {
        let g = Grid2D::square(16, 2.0 * PI).unwrap();
        let f = Field::from_fn(&g, |x, y| Complex64::new(x.sin(), (2.0 * y).cos()));
        assert!(linear_propagate(&f, 0.0).rel_diff(&f) < 1e-14);
    }

    #[test]
    fn unit_mode_full_turn() {
        let g = Grid2D::square(16, 2.0 * PI).unwrap();
        let f = Field::plane_wave(&g, 1, 0, Complex64::new(1.0, 0.0)).unwrap();
        let out = linear_propagate(&f, PI);
        assert!(out.rel_diff(&f) < 1e-13);
        // quarter turn for comparison: phase π/2
        let q = linear_propagate(&f, PI / 4.0);
        assert!(q.rel_diff(&f.scale(Complex64::new(0.0, 1.0))) < 1e-13);
    }

    #[test]
    fn constant_phase_rotation() {
        let g = Grid2D::square(8, 1.0).unwrap();
        let a = Complex64::new(1.2, -0.5);
        let f = Field::from_fn(&g, |_, _| a);
        let t = 0.37;
        let out = nonlinear_phase_step(&f, 1, t).unwrap();
        let expect = a * Complex64::from_polar(1.0, a.norm_sqr() * t);
        assert!(out.data().iter().all(|v| (v - expect).norm() < 1e-14));
        let back = nonlinear_phase_step(&out, 1, -t).unwrap();
        assert!(back.rel_diff(&f) < 1e-14);
        let n0 = lp_norm(&f, 2.0).unwrap();
        assert!((lp_norm(&out, 2.0).unwrap() - n0).abs() / n0 < 1e-13);
    }

    #[test]
    fn rejects_spectral_input() {
        let g = Grid2D::square(8, 1.0).unwrap();
        assert!(nonlinear_phase_step(&Field::zeros(&g, Repr::Spectral), 1, 0.1).is_err());
    }
}
