//! Conserved quantities, modified energies and the N-sweep of the
//! modified-energy increment.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::dynamics::{integrator, SimConfig, StepContext};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::gwp;
use crate::multipliers::{IMultiplier, Variant};
use crate::norms::{hs_norm, ordered_sum};

/// `∫|u|²` by quadrature.
pub fn mass(f: &Field) -> f64 {
    let p = f.physical();
    p.grid().cell_area() * ordered_sum(p.data(), p.grid().ny(), |_, c| c.iter().map(|v| v.norm_sqr()).sum())
}

/// The three non-negative terms of the energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    /// `½∫|Δu|²`
    pub biharmonic: f64,
    /// `½∫|∇u|²`
    pub gradient: f64,
    /// `(1/(2k+2))∫|u|^{2k+2}`
    pub potential: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.biharmonic + self.gradient + self.potential
    }
}

pub fn energy_parts(f: &Field, k: u32) -> EnergyParts {
    let spec = f.spectral();
    let phys = f.physical();
    let g = spec.grid();
    let (kx, ky, ny) = (g.kx(), g.ky(), g.ny());
    let row_sum = |weight: fn(f64) -> f64| {
        ordered_sum(spec.data(), ny, |i, row| {
            row.iter()
                .enumerate()
                .map(|(j, v)| weight(kx[i] * kx[i] + ky[j] * ky[j]) * v.norm_sqr())
                .sum()
        })
    };
    let b = row_sum(|r2| r2 * r2);
    let d = row_sum(|r2| r2);
    let w = g.spectral_weight();
    let e = k as i32 + 1;
    let pot = ordered_sum(phys.data(), ny, |_, c| c.iter().map(|v| v.norm_sqr().powi(e)).sum());
    EnergyParts {
        biharmonic: 0.5 * w * b,
        gradient: 0.5 * w * d,
        potential: g.cell_area() * pot / (2.0 * k as f64 + 2.0),
    }
}

/// `E(u) = ½∫|Δu|² + ½∫|∇u|² + (1/(2k+2))∫|u|^{2k+2}`.
pub fn energy(f: &Field, k: u32) -> f64 {
    energy_parts(f, k).total()
}

/// `E(Iu)`.
pub fn modified_energy(f: &Field, im: &IMultiplier, k: u32) -> f64 {
    energy(&im.apply(f), k)
}

/// Which Hamiltonian a diagnostic evaluates: the full energy, or only its
/// quadratic part when the nonlinearity is switched off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hamiltonian {
    Full { k: u32 },
    Free,
}

impl Hamiltonian {
    pub fn for_flow(k: u32, linear_only: bool) -> Self {
        if linear_only {
            Self::Free
        } else {
            Self::Full { k }
        }
    }

    pub fn eval(self, f: &Field) -> f64 {
        match self {
            Self::Full { k } => energy(f, k),
            Self::Free => {
                let p = energy_parts(f, 1);
                p.biharmonic + p.gradient
            }
        }
    }

    pub fn eval_modified(self, f: &Field, im: &IMultiplier) -> f64 {
        self.eval(&im.apply(f))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub h_s: f64,
    pub h2: f64,
    pub linf: f64,
    /// `(N, E(I_N u))` in configured order.
    pub mod_energy: Vec<(f64, f64)>,
}

/// Renders `16.0` as `16` and other values with full precision.
pub fn format_cutoff(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

pub fn csv_header(cutoffs: &[f64]) -> String {
    let mut h = String::from("t,mass,energy,h_s,h2,linf");
    for &n in cutoffs {
        write!(h, ",mod_energy_N{}", format_cutoff(n)).unwrap();
    }
    h
}

impl DiagnosticsRecord {
    pub fn csv_row(&self) -> String {
        let mut row = format!(
            "{:e},{:e},{:e},{:e},{:e},{:e}",
            self.t, self.mass, self.energy, self.h_s, self.h2, self.linf
        );
        for (_, e) in &self.mod_energy {
            write!(row, ",{e:e}").unwrap();
        }
        row
    }
}

/// Evaluates [`DiagnosticsRecord`]s for a fixed `(k, s, cutoffs)`.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    hamiltonian: Hamiltonian,
    s: f64,
    multipliers: Vec<IMultiplier>,
}

impl Diagnostics {
    pub fn new(hamiltonian: Hamiltonian, s: f64, variant: Variant, cutoffs: &[f64]) -> Result<Self> {
        let multipliers = cutoffs
            .iter()
            .map(|&n| IMultiplier::new(s, n, variant))
            .collect::<Result<_>>()?;
        Ok(Self {
            hamiltonian,
            s,
            multipliers,
        })
    }

    pub fn cutoffs(&self) -> Vec<f64> {
        self.multipliers.iter().map(|m| m.n_cut()).collect()
    }

    pub fn evaluate(&self, t: f64, u: &Field) -> DiagnosticsRecord {
        let phys = u.physical();
        DiagnosticsRecord {
            t,
            mass: mass(&phys),
            energy: self.hamiltonian.eval(&phys),
            h_s: hs_norm(&phys, self.s),
            h2: hs_norm(&phys, 2.0),
            linf: phys.max_abs(),
            mod_energy: self
                .multipliers
                .iter()
                .map(|im| (im.n_cut(), self.hamiltonian.eval_modified(&phys, im)))
                .collect(),
        }
    }
}

fn is_dyadic(n: f64) -> bool {
    let j = n.log2();
    n >= 1.0 && n.is_finite() && (j - j.round()).abs() < 1e-12
}

/// Least-squares slope of `ln y` against `ln x`; `None` if fewer than two
/// points or any `y` is not positive.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: f64,
    /// `|E(I_N u(t*)) − E(I_N u(0))|`
    pub delta_e_i: f64,
    /// The increment with its sign.
    pub signed: f64,
    /// `E(I_N u(0))`
    pub initial: f64,
}

impl SweepRow {
    pub fn relative(&self) -> f64 {
        self.delta_e_i / self.initial
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Fit over the top half of the cutoff list; `None` when some increment is zero.
    pub slope: Option<f64>,
    pub horizon: f64,
    pub steps: usize,
    pub dt: f64,
}

impl SweepTable {
    /// `ΔE_I` non-increasing from each octave to the next.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].delta_e_i <= w[0].delta_e_i)
    }

    pub fn to_csv(&self) -> String {
        let slope = self.slope.map_or("nan".to_string(), |s| format!("{s:e}"));
        let mut out = String::from("N,delta_E_I,fitted_slope\n");
        for r in &self.rows {
            writeln!(out, "{},{:e},{}", format_cutoff(r.n), r.delta_e_i, slope).unwrap();
        }
        writeln!(out, "# fitted_slope={slope}").unwrap();
        writeln!(out, "# reference_exponent=-3").unwrap();
        writeln!(out, "# horizon={:e}", self.horizon).unwrap();
        writeln!(out, "# steps={}", self.steps).unwrap();
        out
    }
}

/// Options for [`almost_conservation_sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Fixed horizon; by default one nominal local-existence window capped at `max_horizon`.
    pub horizon: Option<f64>,
    pub max_horizon: f64,
    pub local_time: gwp::LocalTimeModel,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            horizon: None,
            max_horizon: 0.1,
            local_time: gwp::LocalTimeModel::default(),
        }
    }
}

/// Runs one trajectory to a horizon `t*` and evaluates the modified-energy
/// increment for every `N` in `n_list`.
///
/// With `cfg.linear_only` the increments are of the free Hamiltonian.
/// The default horizon is `min(max_horizon, δ(‖I_{N_max}u₀‖_{H²}, k))`. The
/// step count is `⌈t*/cfg.dt⌉` with the step shrunk to land on `t*`.
pub fn almost_conservation_sweep(
    u0: &Field,
    cfg: &SimConfig,
    n_list: &[f64],
    opts: &SweepOptions,
) -> Result<SweepTable> {
    if n_list.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "N list needs at least 4 entries for a slope fit, got {}",
            n_list.len()
        )));
    }
    if !n_list.iter().all(|&n| is_dyadic(n)) || !n_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter(format!(
            "N list must be dyadic and strictly ascending: {n_list:?}"
        )));
    }
    cfg.validate(u0.grid())?;
    let u0 = u0.physical();
    let ims: Vec<IMultiplier> = n_list
        .iter()
        .map(|&n| IMultiplier::new(cfg.s, n, cfg.variant))
        .collect::<Result<_>>()?;

    let horizon = match opts.horizon {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => return Err(Error::InvalidParameter(format!("horizon {h} must be > 0"))),
        None => {
            let top = ims.last().unwrap().apply(&u0);
            let x = hs_norm(&top, 2.0);
            let d = opts.local_time.existence_time(x, cfg.k, opts.max_horizon)?;
            d.delta.min(opts.max_horizon)
        }
    };
    let steps = ((horizon / cfg.dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = horizon / steps as f64;

    let mut stepper = integrator(&cfg.integrator)?;
    let ctx = StepContext {
        k: cfg.k,
        dealias: cfg.dealias,
        linear_only: cfg.linear_only,
    };
    let mut u = u0.clone();
    for n in 1..=steps {
        u = stepper.step(&u, dt, &ctx)?;
        let max_abs = u.max_abs();
        if !u.is_finite() || max_abs > cfg.blowup_threshold {
            return Err(Error::BlowUp {
                t: n as f64 * dt,
                max_abs,
            });
        }
    }

    let h = Hamiltonian::for_flow(cfg.k, cfg.linear_only);
    let rows: Vec<SweepRow> = ims
        .par_iter()
        .map(|im| {
            let initial = h.eval_modified(&u0, im);
            let signed = h.eval_modified(&u, im) - initial;
            SweepRow {
                n: im.n_cut(),
                delta_e_i: signed.abs(),
                signed,
                initial,
            }
        })
        .collect();
    let half = rows.len() / 2;
    let fit: Vec<(f64, f64)> = rows[half..].iter().map(|r| (r.n, r.delta_e_i)).collect();
    Ok(SweepTable {
        slope: loglog_slope(&fit),
        rows,
        horizon,
        steps,
        dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Repr;
    use crate::grid::Grid2D;
    use crate::norms::{sobolev_norm, Weight};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn mass_examples() {
        let g = Grid2D::square(128, 24.0).unwrap();
        let gauss = Field::from_fn(&g, |x, y| Complex64::new((-(x * x + y * y) / 2.0).exp(), 0.0));
        assert!((mass(&gauss) - PI).abs() < 1e-6);
        let a = Complex64::new(0.3, 0.4);
        let c = Field::from_fn(&g, |_, _| a);
        assert!((mass(&c) - 0.25 * 24.0 * 24.0).abs() < 1e-10);
        let s0 = sobolev_norm(&gauss, 0.0, Weight::Inhomogeneous).value;
        assert!((mass(&gauss) - s0 * s0).abs() < 1e-10);
    }

    #[test]
    fn plane_wave_energy() {
        let g = Grid2D::new(32, 16, 2.0 * PI, PI).unwrap();
        let a = Complex64::new(0.5, -0.7);
        let f = Field::plane_wave(&g, 2, 3, a).unwrap();
        let (kx, ky) = (2.0, 6.0);
        let r2: f64 = kx * kx + ky * ky;
        for k in 1..=3 {
            let expect = g.area()
                * (0.5 * a.norm_sqr() * (r2 * r2 + r2)
                    + a.norm_sqr().powi(k as i32 + 1) / (2.0 * k as f64 + 2.0));
            assert!((energy(&f, k) - expect).abs() / expect < 1e-12);
        }
        assert_eq!(energy(&Field::zeros(&g, Repr::Physical), 1), 0.0);
    }

    #[test]
    fn modified_energy_low_band_identity() {
        let g = Grid2D::square(64, 2.0 * PI).unwrap();
        let f = Field::plane_wave(&g, 3, -4, Complex64::new(1.0, 0.0)).unwrap();
        let im = IMultiplier::sharp(1.5, 8.0).unwrap();
        assert!((modified_energy(&f, &im, 1) - energy(&f, 1)).abs() < 1e-10);
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = [8.0, 16.0, 32.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(-2.5))).collect();
        assert!((loglog_slope(&pts).unwrap() + 2.5).abs() < 1e-12);
        assert!(loglog_slope(&[(1.0, 0.0), (2.0, 1.0)]).is_none());
    }

    #[test]
    fn header_names_cutoffs() {
        assert_eq!(
            csv_header(&[16.0, 64.0]),
            "t,mass,energy,h_s,h2,linf,mod_energy_N16,mod_energy_N64"
        );
    }
}
