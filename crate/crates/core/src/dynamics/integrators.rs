//! Time steppers. Each is an [`Integrator`] built by name from [`registry`].

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dealias::{two_thirds_filter, DealiasMode};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid2D;

use super::flows::{apply_phase, nonlinear_phase_step, phase_table};

/// Per-run constants a step needs.
#[derive(Debug, Clone, Copy)]
pub struct StepContext {
    pub k: u32,
    pub dealias: DealiasMode,
    /// Drop the nonlinearity; the step is then the free flow.
    pub linear_only: bool,
}

pub trait Integrator: Send {
    fn name(&self) -> &'static str;

    /// Advance `u` by `dt` (negative allowed). Returns a physical field.
    fn step(&mut self, u: &Field, dt: f64, ctx: &StepContext) -> Result<Field>;
}

/// Phase tables keyed by `(grid, t)` so repeated steps reuse them.
#[derive(Default)]
struct PhaseCache {
    entries: Vec<(Grid2D, f64, Vec<Complex64>)>,
}

impl PhaseCache {
    fn get(&mut self, grid: &Grid2D, t: f64) -> &[Complex64] {
        let pos = self
            .entries
            .iter()
            .position(|(g, tt, _)| g == grid && *tt == t);
        let idx = match pos {
            Some(i) => i,
            None => {
                if self.entries.len() >= 8 {
                    self.entries.remove(0);
                }
                self.entries.push((grid.clone(), t, phase_table(grid, t)));
                self.entries.len() - 1
            }
        };
        &self.entries[idx].2
    }
}

/// Strang splitting: half free flow, full exact nonlinear phase, half free flow.
///
/// Both sub-flows are unitary, so the discrete mass is conserved to roundoff.
/// The phase sub-flow is not a polynomial product; the padded rule has no
/// meaning for it and only `two_thirds` changes the step (filter after the phase).
#[derive(Default)]
pub struct Strang {
    cache: PhaseCache,
}

impl Integrator for Strang {
    fn name(&self) -> &'static str {
        "strang"
    }

    fn step(&mut self, u: &Field, dt: f64, ctx: &StepContext) -> Result<Field> {
        let grid = u.grid().clone();
        let mut spec = u.spectral();
        if ctx.linear_only {
            apply_phase(&mut spec, self.cache.get(&grid, dt));
            return Ok(spec.into_physical());
        }
        let half = self.cache.get(&grid, 0.5 * dt).to_vec();
        apply_phase(&mut spec, &half);
        let mid = nonlinear_phase_step(&spec.into_physical(), ctx.k, dt)?;
        let mut spec = match ctx.dealias {
            DealiasMode::TwoThirds => two_thirds_filter(&mid),
            _ => mid.into_spectral(),
        };
        apply_phase(&mut spec, &half);
        Ok(spec.into_physical())
    }
}

/// Lawson integrating-factor RK4 in the frame rotating with `e^{it(|ξ|⁴+|ξ|²)}`.
#[derive(Default)]
pub struct IfRk4 {
    cache: PhaseCache,
}

impl IfRk4 {
    /// `F[i|u|^{2k}u]` from a spectral state.
    fn rhs(spec: &Field, ctx: &StepContext) -> Field {
        let phys = spec.physical();
        ctx.dealias
            .strategy()
            .product(&phys, ctx.k)
            .scale(Complex64::new(0.0, 1.0))
            .into_spectral()
    }
}

fn combine(terms: &[(&Field, Complex64)]) -> Field {
    let mut out = terms[0].0.scale(terms[0].1);
    for (f, a) in &terms[1..] {
        out.data_mut()
            .par_iter_mut()
            .zip(f.data().par_iter())
            .for_each(|(v, w)| *v += a * w);
    }
    out
}

impl Integrator for IfRk4 {
    fn name(&self) -> &'static str {
        "ifrk4"
    }

    fn step(&mut self, u: &Field, dt: f64, ctx: &StepContext) -> Result<Field> {
        let grid = u.grid().clone();
        let mut spec = u.spectral();
        if ctx.linear_only {
            apply_phase(&mut spec, self.cache.get(&grid, dt));
            return Ok(spec.into_physical());
        }
        let half = self.cache.get(&grid, 0.5 * dt).to_vec();
        let one = Complex64::new(1.0, 0.0);
        let h2 = Complex64::new(0.5 * dt, 0.0);
        let h = Complex64::new(dt, 0.0);
        let rot = |f: &Field| {
            let mut g = f.clone();
            apply_phase(&mut g, &half);
            g
        };

        let k1 = Self::rhs(&spec, ctx);
        let k2 = Self::rhs(&rot(&combine(&[(&spec, one), (&k1, h2)])), ctx);
        let eu = rot(&spec);
        let k3 = Self::rhs(&combine(&[(&eu, one), (&k2, h2)]), ctx);
        let eeu = rot(&eu);
        let ek3 = rot(&k3);
        let k4 = Self::rhs(&combine(&[(&eeu, one), (&ek3, h)]), ctx);

        // u_{n+1} = E²u + dt/6 (E²k1 + 2E(k2 + k3) + k4)
        let sixth = Complex64::new(dt / 6.0, 0.0);
        let third = Complex64::new(dt / 3.0, 0.0);
        let ek1 = rot(&rot(&k1));
        let ek23 = rot(&combine(&[(&k2, one), (&k3, one)]));
        let next = combine(&[(&eeu, one), (&ek1, sixth), (&ek23, third), (&k4, sixth)]);
        Ok(next.into_physical())
    }
}

/// A named factory for integrators.
pub struct IntegratorEntry {
    pub name: &'static str,
    pub order: u32,
    build: fn() -> Box<dyn Integrator>,
}

impl IntegratorEntry {
    pub fn build(&self) -> Box<dyn Integrator> {
        (self.build)()
    }
}

static REGISTRY: [IntegratorEntry; 2] = [
    IntegratorEntry {
        name: "strang",
        order: 2,
        build: || Box::new(Strang::default()),
    },
    IntegratorEntry {
        name: "ifrk4",
        order: 4,
        build: || Box::new(IfRk4::default()),
    },
];

pub fn registry() -> &'static [IntegratorEntry] {
    &REGISTRY
}

pub fn integrator(name: &str) -> Result<Box<dyn Integrator>> {
    registry()
        .iter()
        .find(|e| e.name == name)
        .map(IntegratorEntry::build)
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "integrator",
            name: name.to_string(),
            valid: registry().iter().map(|e| e.name).collect::<Vec<_>>().join(", "),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::flows::linear_propagate;
    use crate::field::Repr;
    use std::f64::consts::PI;

    fn ctx(linear_only: bool) -> StepContext {
        StepContext {
            k: 1,
            dealias: DealiasMode::Padded,
            linear_only,
        }
    }

    fn gaussian(g: &Grid2D) -> Field {
        Field::from_fn(g, |x, y| {
            Complex64::new((-(x * x + y * y) / 2.0).exp(), 0.3 * (-(x * x + y * y)).exp())
        })
    }

    #[test]
    fn zero_stays_zero() {
        let g = Grid2D::square(16, 4.0 * PI).unwrap();
        for e in registry() {
            let mut it = e.build();
            let out = it.step(&Field::zeros(&g, Repr::Physical), 0.01, &ctx(false)).unwrap();
            assert_eq!(out.max_abs(), 0.0, "{}", e.name);
        }
    }

    #[test]
    fn constant_field_is_exact() {
        let g = Grid2D::square(16, 4.0 * PI).unwrap();
        let a = Complex64::new(0.8, 0.4);
        let u = Field::from_fn(&g, |_, _| a);
        let mut strang = integrator("strang").unwrap();
        let mut state = u.clone();
        for _ in 0..10 {
            state = strang.step(&state, 0.05, &ctx(false)).unwrap();
        }
        let expect = a * Complex64::from_polar(1.0, a.norm_sqr() * 0.5);
        assert!(state.data().iter().all(|v| (v - expect).norm() < 1e-13));
    }

    #[test]
    fn linear_only_matches_propagator() {
        let g = Grid2D::square(32, 8.0 * PI).unwrap();
        let u = gaussian(&g);
        for e in registry() {
            let mut it = e.build();
            let mut state = u.clone();
            for _ in 0..20 {
                state = it.step(&state, 0.01, &ctx(true)).unwrap();
            }
            let exact = linear_propagate(&u, 0.2);
            assert!(state.rel_diff(&exact) < 1e-12, "{}", e.name);
        }
    }

    #[test]
    fn strang_is_time_reversible() {
        let g = Grid2D::square(64, 8.0 * PI).unwrap();
        let u = gaussian(&g).scale(Complex64::new(1.5, 0.0));
        let mut it = integrator("strang").unwrap();
        let fwd = it.step(&u, 0.01, &ctx(false)).unwrap();
        let back = it.step(&fwd, -0.01, &ctx(false)).unwrap();
        assert!(back.rel_diff(&u) < 1e-10);
    }

    #[test]
    fn unknown_name_lists_choices() {
        let msg = integrator("euler").err().unwrap().to_string();
        assert!(msg.contains("strang") && msg.contains("ifrk4"));
    }
}
