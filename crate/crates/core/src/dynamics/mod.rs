//! Time integration of the flow and the diagnostics-emitting run loop.

mod flows;
mod integrators;

pub use flows::{linear_propagate, nonlinear_phase_step};
pub use integrators::{integrator, registry, IfRk4, Integrator, IntegratorEntry, StepContext, Strang};

use crate::dealias::DealiasMode;
use crate::diagnostics::{Diagnostics, DiagnosticsRecord, Hamiltonian};
use crate::error::{Error, Result};
use crate::field::{Field, Repr};
use crate::grid::Grid2D;
use crate::multipliers::Variant;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub k: u32,
    pub dt: f64,
    pub t_end: f64,
    pub integrator: String,
    pub dealias: DealiasMode,
    /// Steps between diagnostics records.
    pub diag_every: usize,
    /// Steps between checkpoints; `None` for none.
    pub checkpoint_every: Option<usize>,
    pub i_cutoffs: Vec<f64>,
    pub s: f64,
    pub variant: Variant,
    pub linear_only: bool,
    /// Abort when `max|u|` exceeds this.
    pub blowup_threshold: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            k: 1,
            dt: 1e-3,
            t_end: 0.1,
            integrator: "strang".into(),
            dealias: DealiasMode::default(),
            diag_every: 10,
            checkpoint_every: None,
            i_cutoffs: vec![8.0, 16.0, 32.0, 64.0],
            s: 1.5,
            variant: Variant::default(),
            linear_only: false,
            blowup_threshold: 1e6,
        }
    }
}

impl SimConfig {
    /// Number of steps to reach `t_end`; `t_end` must be a whole number of steps.
    pub fn step_count(&self) -> Result<usize> {
        let n = (self.t_end / self.dt).round();
        if (n * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(self.dt) {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} is not a whole number of steps of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.k < 1 {
            return bad("k must be >= 1".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be > 0", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must be >= 0", self.t_end));
        }
        if self.diag_every == 0 {
            return bad("diag_every must be >= 1".into());
        }
        if self.checkpoint_every == Some(0) {
            return bad("checkpoint_every must be >= 1".into());
        }
        if !(self.blowup_threshold > 0.0) {
            return bad("blowup_threshold must be > 0".into());
        }
        if self.i_cutoffs.is_empty() {
            return bad("i_cutoffs must be nonempty".into());
        }
        for &n in &self.i_cutoffs {
            let j = n.log2();
            if !(n >= 1.0 && (j - j.round()).abs() < 1e-12) {
                return bad(format!("cutoff {n} is not dyadic"));
            }
            if n >= grid.nyquist() {
                return bad(format!("cutoff {n} is not below the Nyquist wavenumber {}", grid.nyquist()));
            }
        }
        crate::multipliers::IMultiplier::new(self.s, self.i_cutoffs[0], self.variant)?;
        integrator(&self.integrator)?;
        self.step_count()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct StepperState {
    pub t: f64,
    pub u: Field,
    pub step_count: usize,
}

/// Receives the output stream of [`run`].
pub trait Observer {
    fn record(&mut self, rec: &DiagnosticsRecord) -> Result<()>;

    fn checkpoint(&mut self, _state: &StepperState) -> Result<()> {
        Ok(())
    }
}

/// Collects records in memory.
#[derive(Debug, Default)]
pub struct Recorder {
    pub records: Vec<DiagnosticsRecord>,
    pub checkpoints: Vec<(f64, usize)>,
}

impl Observer for Recorder {
    fn record(&mut self, rec: &DiagnosticsRecord) -> Result<()> {
        self.records.push(rec.clone());
        Ok(())
    }

    fn checkpoint(&mut self, state: &StepperState) -> Result<()> {
        self.checkpoints.push((state.t, state.step_count));
        Ok(())
    }
}

/// Steps `u0` to `t_end`, recording diagnostics at step 0, every
/// `diag_every` steps and at the final step.
///
/// Records already passed to `obs` stay there if a step fails.
pub fn run(cfg: &SimConfig, u0: &Field, obs: &mut dyn Observer) -> Result<StepperState> {
    cfg.validate(u0.grid())?;
    if u0.repr() != Repr::Physical {
        return Err(Error::WrongRepr {
            expected: Repr::Physical,
            found: u0.repr(),
        });
    }
    if !u0.is_finite() {
        return Err(Error::InvalidParameter("initial data is not finite".into()));
    }
    let diag = Diagnostics::new(Hamiltonian::for_flow(cfg.k, cfg.linear_only), cfg.s, cfg.variant, &cfg.i_cutoffs)?;
    let mut stepper = integrator(&cfg.integrator)?;
    let ctx = StepContext {
        k: cfg.k,
        dealias: cfg.dealias,
        linear_only: cfg.linear_only,
    };
    let n_steps = cfg.step_count()?;
    let mut state = StepperState {
        t: 0.0,
        u: u0.clone(),
        step_count: 0,
    };
    obs.record(&diag.evaluate(0.0, &state.u))?;
    for n in 1..=n_steps {
        let next = stepper.step(&state.u, cfg.dt, &ctx)?;
        let t = n as f64 * cfg.dt;
        let max_abs = next.max_abs();
        if !next.is_finite() || max_abs > cfg.blowup_threshold {
            return Err(Error::BlowUp { t, max_abs });
        }
        state = StepperState {
            t,
            u: next,
            step_count: n,
        };
        if n % cfg.diag_every == 0 || n == n_steps {
            obs.record(&diag.evaluate(t, &state.u))?;
        }
        if cfg.checkpoint_every.is_some_and(|c| n % c == 0) {
            obs.checkpoint(&state)?;
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn gaussian(g: &Grid2D) -> Field {
        Field::from_fn(g, |x, y| Complex64::new((-(x * x + y * y) / 2.0).exp(), 0.0))
    }

    #[test]
    fn zero_horizon_single_record() {
        let g = Grid2D::square(32, 16.0).unwrap();
        let cfg = SimConfig {
            t_end: 0.0,
            i_cutoffs: vec![4.0],
            ..SimConfig::default()
        };
        let mut rec = Recorder::default();
        let st = run(&cfg, &gaussian(&g), &mut rec).unwrap();
        assert_eq!(rec.records.len(), 1);
        assert_eq!(st.step_count, 0);
    }

    #[test]
    fn cadence_and_final_record() {
        let g = Grid2D::square(32, 16.0).unwrap();
        let cfg = SimConfig {
            dt: 0.01,
            t_end: 0.25,
            diag_every: 10,
            checkpoint_every: Some(5),
            i_cutoffs: vec![2.0, 4.0],
            ..SimConfig::default()
        };
        let mut rec = Recorder::default();
        let st = run(&cfg, &gaussian(&g), &mut rec).unwrap();
        let ts: Vec<usize> = rec.records.iter().map(|r| (r.t / 0.01).round() as usize).collect();
        assert_eq!(ts, vec![0, 10, 20, 25]);
        assert_eq!(rec.checkpoints.len(), 5);
        assert!((st.t - st.step_count as f64 * cfg.dt).abs() <= 1e-12 * st.t);
    }

    #[test]
    fn linear_run_conserves_norm() {
        let g = Grid2D::square(64, 8.0 * PI).unwrap();
        let cfg = SimConfig {
            dt: 0.01,
            t_end: 0.5,
            linear_only: true,
            i_cutoffs: vec![2.0],
            ..SimConfig::default()
        };
        let mut rec = Recorder::default();
        run(&cfg, &gaussian(&g), &mut rec).unwrap();
        let m0 = rec.records[0].mass;
        for r in &rec.records {
            assert!((r.mass.sqrt() - m0.sqrt()).abs() / m0.sqrt() < 1e-12);
        }
    }

    #[test]
    fn blowup_guard_keeps_partial_records() {
        let g = Grid2D::square(16, 8.0).unwrap();
        let cfg = SimConfig {
            dt: 0.01,
            t_end: 0.1,
            diag_every: 1,
            blowup_threshold: 0.5,
            i_cutoffs: vec![2.0],
            ..SimConfig::default()
        };
        let u0 = Field::from_fn(&g, |_, _| Complex64::new(0.6, 0.0));
        let mut rec = Recorder::default();
        let err = run(&cfg, &u0, &mut rec).unwrap_err();
        assert!(matches!(err, Error::BlowUp { t, .. } if (t - 0.01).abs() < 1e-15));
        assert_eq!(rec.records.len(), 1);
        assert!(rec.records[0].mass > 0.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let g = Grid2D::square(16, 8.0).unwrap();
        let u0 = gaussian(&g);
        let mut rec = Recorder::default();
        for cfg in [
            SimConfig { dt: 0.0, ..SimConfig::default() },
            SimConfig { k: 0, ..SimConfig::default() },
            SimConfig { i_cutoffs: vec![3.0], ..SimConfig::default() },
            SimConfig { i_cutoffs: vec![], ..SimConfig::default() },
            SimConfig { i_cutoffs: vec![64.0], ..SimConfig::default() },
            SimConfig { integrator: "rk2".into(), ..SimConfig::default() },
            SimConfig { dt: 0.03, t_end: 0.1, i_cutoffs: vec![2.0], ..SimConfig::default() },
        ] {
            assert!(run(&cfg, &u0, &mut rec).is_err(), "{cfg:?}");
        }
    }
}
