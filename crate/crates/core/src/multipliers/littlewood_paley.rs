//! Littlewood–Paley projections built from a C∞ radial bump.

use crate::error::{Error, Result};
use crate::field::{Field, Repr};
use crate::grid::Grid2D;

fn psi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Radial bump: `φ ≡ 1` on `r ≤ 1`, `φ ≡ 0` on `r ≥ 2`, C∞ in between.
pub fn bump(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = psi(2.0 - r);
        a / (a + psi(r - 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// `P_N`: `φ(ξ/N) − φ(2ξ/N)`, supported in `N/2 < |ξ| < 2N`.
    Dyadic,
    /// `P_{≤N}`: `φ(ξ/N)`.
    Leq,
    /// `P_{>N}`: `1 − φ(ξ/N)`.
    Gt,
}

/// Projector at dyadic level `N = 2^j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpProjector {
    level: f64,
}

#[derive(Debug, Clone)]
pub struct Projection {
    pub field: Field,
    /// The band holds no grid wavenumber; `field` is zero.
    pub empty_band: bool,
}

impl LpProjector {
    pub fn new(level: f64) -> Result<Self> {
        let j = level.log2();
        if !(level > 0.0 && level.is_finite() && (j - j.round()).abs() < 1e-12) {
            return Err(Error::InvalidParameter(format!("{level} is not a dyadic number")));
        }
        Ok(Self {
            level: 2f64.powi(j.round() as i32),
        })
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn symbol(&self, piece: Piece, r: f64) -> f64 {
        let n = self.level;
        match piece {
            Piece::Dyadic => bump(r / n) - bump(2.0 * r / n),
            Piece::Leq => bump(r / n),
            Piece::Gt => 1.0 - bump(r / n),
        }
    }

    pub fn project(&self, f: &Field, piece: Piece) -> Projection {
        let grid = f.grid();
        let empty_band = match piece {
            Piece::Dyadic => self.level / 2.0 >= grid.max_wavenumber(),
            Piece::Gt => self.level >= grid.max_wavenumber(),
            Piece::Leq => false,
        };
        if empty_band {
            return Projection {
                field: Field::zeros(grid, Repr::Spectral),
                empty_band,
            };
        }
        let field = f
            .apply_symbol(|kx, ky| self.symbol(piece, kx.hypot(ky)))
            .expect("bump is finite");
        Projection { field, empty_band }
    }
}

/// Dyadic levels `2, 4, …, N_max` with `N_max ≥ max|ξ|`, so that
/// `P_{≤1} + Σ P_N` is the identity on the grid.
pub fn dyadic_levels(grid: &Grid2D) -> Vec<f64> {
    let mut out = Vec::new();
    let mut n = 2.0;
    loop {
        out.push(n);
        if n >= grid.max_wavenumber() {
            break;
        }
        n *= 2.0;
    }
    out
}

/// `(P_{≤1} f, [(N, P_N f)])` over [`dyadic_levels`].
pub fn decompose(f: &Field) -> (Field, Vec<(f64, Field)>) {
    let low = LpProjector::new(1.0).unwrap().project(f, Piece::Leq).field;
    let pieces = dyadic_levels(f.grid())
        .into_iter()
        .map(|n| {
            let p = LpProjector::new(n).unwrap().project(f, Piece::Dyadic).field;
            (n, p)
        })
        .collect();
    (low, pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn bump_shape() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.0), 1.0);
        assert_eq!(bump(2.0), 0.0);
        assert!((bump(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=200 {
            let v = bump(1.0 + i as f64 / 200.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn partition_of_unity_on_grid() {
        let g = Grid2D::square(64, 2.0 * PI).unwrap();
        let levels = dyadic_levels(&g);
        for (_, kx, ky) in g.wavevectors() {
            let r = kx.hypot(ky);
            let total: f64 = bump(r)
                + levels
                    .iter()
                    .map(|&n| LpProjector::new(n).unwrap().symbol(Piece::Dyadic, r))
                    .sum::<f64>();
            assert!((total - 1.0).abs() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn annihilates_outside_band() {
        let p = LpProjector::new(8.0).unwrap();
        for r in [0.0, 1.0, 2.0, 3.9, 16.0, 40.0] {
            assert_eq!(p.symbol(Piece::Dyadic, r), 0.0, "r = {r}");
        }
        assert_eq!(p.symbol(Piece::Dyadic, 8.0), 1.0);
    }

    #[test]
    fn band_centre_mode_passes() {
        let g = Grid2D::square(64, 2.0 * PI).unwrap();
        let f = Field::plane_wave(&g, 8, 0, Complex64::new(1.0, 0.5)).unwrap();
        let p = LpProjector::new(8.0).unwrap().project(&f, Piece::Dyadic);
        assert!(!p.empty_band);
        assert!(p.field.into_physical().rel_diff(&f) < 1e-12);
    }

    #[test]
    fn empty_band_above_nyquist() {
        let g = Grid2D::square(16, 2.0 * PI).unwrap();
        let f = Field::plane_wave(&g, 1, 1, Complex64::new(1.0, 0.0)).unwrap();
        let p = LpProjector::new(64.0).unwrap().project(&f, Piece::Dyadic);
        assert!(p.empty_band);
        assert_eq!(p.field.max_abs(), 0.0);
        assert!(LpProjector::new(3.0).is_err());
        assert!(LpProjector::new(0.25).is_ok());
    }
}
