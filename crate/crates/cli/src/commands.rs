//! The `simulate`, `sweep-n`, `lab` and `calc` subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fourns_core::diagnostics::{almost_conservation_sweep, csv_header, DiagnosticsRecord, SweepOptions};
use fourns_core::dynamics::{run, Observer, StepperState};
use fourns_core::field::write_checkpoint;
use fourns_core::gwp::{calc_csv, LocalTimeModel};
use fourns_core::inequality_lab::{lab_csv, run_lab, strichartz_gain_probe};
use fourns_core::{Field, Grid2D};
use num_complex::Complex64;

use crate::config::{ExperimentConfig, Family, InitialBlock};
use crate::output::{ensure_dir, resolve_dir, write_atomic, write_text, StreamingFile};
use crate::HarnessError;

pub const EFFECTIVE_CONFIG: &str = "effective_config.json";
pub const DIAGNOSTICS_CSV: &str = "diagnostics.csv";
pub const FINAL_CHECKPOINT: &str = "final.chk";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const LAB_CSV: &str = "lab.csv";
pub const STRICHARTZ_CSV: &str = "strichartz.csv";
pub const CALC_CSV: &str = "calc.csv";

pub const STRICHARTZ_HEADER: &str = "mu,p,q,nx,ny,trials,ratio_max";

/// Files written by a subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

pub fn build_initial(grid: &Grid2D, init: &InitialBlock) -> Field {
    let (lx, ly) = (grid.lx(), grid.ly());
    let [mx, my] = init.modulation;
    let (kx, ky) = (
        2.0 * std::f64::consts::PI * mx as f64 / lx,
        2.0 * std::f64::consts::PI * my as f64 / ly,
    );
    let a = Complex64::from_polar(init.amplitude, init.phase);
    let s2 = 2.0 * init.width * init.width;
    let centers: &[[f64; 2]] = match init.family {
        Family::Gaussian => &init.centers[..1],
        Family::MultiBump => &init.centers,
        Family::PlaneWave => &[],
    };
    Field::from_fn(grid, |x, y| {
        let carrier = Complex64::from_polar(1.0, kx * x + ky * y);
        let envelope = if init.family == Family::PlaneWave {
            1.0
        } else {
            centers
                .iter()
                .map(|&[cx, cy]| (-((x - cx).powi(2) + (y - cy).powi(2)) / s2).exp())
                .sum()
        };
        a * carrier * envelope
    })
}

/// Resolves the output directory and writes the config echo into it.
fn prepare(cfg: &mut ExperimentConfig, env: Option<&str>) -> Result<Artifacts, HarnessError> {
    let dir = resolve_dir(&cfg.output.directory, env);
    cfg.output.directory = dir.clone();
    ensure_dir(&dir)?;
    let path = dir.join(EFFECTIVE_CONFIG);
    write_text(&path, &cfg.to_json())?;
    Ok(Artifacts { dir, files: vec![path] })
}

struct CsvObserver<'a> {
    csv: StreamingFile,
    dir: &'a Path,
    checkpoints: Vec<PathBuf>,
}

impl Observer for CsvObserver<'_> {
    fn record(&mut self, rec: &DiagnosticsRecord) -> fourns_core::Result<()> {
        self.csv.line(&rec.csv_row())?;
        Ok(())
    }

    fn checkpoint(&mut self, state: &StepperState) -> fourns_core::Result<()> {
        let path = self.dir.join(format!("checkpoint_{:08}.chk", state.step_count));
        save_checkpoint(&path, &state.u, state.t).map_err(|e| fourns_core::Error::Checkpoint(e.to_string()))?;
        self.checkpoints.push(path);
        Ok(())
    }
}

fn save_checkpoint(path: &Path, u: &Field, t: f64) -> Result<(), HarnessError> {
    write_atomic(path, |mut w| {
        write_checkpoint(&mut w, u, t).map_err(|e| std::io::Error::other(e.to_string()))
    })
}

/// Runs the flow, streaming diagnostics rows and writing the final state.
///
/// On a solver abort the rows recorded so far stay in the CSV.
pub fn cmd_simulate(mut cfg: ExperimentConfig, env: Option<&str>) -> Result<Artifacts, HarnessError> {
    let grid = cfg.grid("simulate")?;
    let sim = cfg.validate_run(&grid)?;
    let u0 = build_initial(&grid, &cfg.initial);
    let mut art = prepare(&mut cfg, env)?;
    let csv_path = art.dir.join(DIAGNOSTICS_CSV);
    let mut csv = StreamingFile::create(&csv_path)?;
    csv.line(&csv_header(&sim.i_cutoffs)).map_err(|source| HarnessError::Io {
        path: csv_path.clone(),
        source,
    })?;
    let mut obs = CsvObserver {
        csv,
        dir: &art.dir,
        checkpoints: Vec::new(),
    };
    let result = run(&sim, &u0, &mut obs);
    let CsvObserver { csv, checkpoints, .. } = obs;
    csv.finish()?;
    art.files.push(csv_path);
    art.files.extend(checkpoints);
    let state = result?;
    if cfg.output.final_checkpoint {
        let path = art.dir.join(FINAL_CHECKPOINT);
        save_checkpoint(&path, &state.u, state.t)?;
        art.files.push(path);
    }
    Ok(art)
}

pub fn cmd_sweep_n(mut cfg: ExperimentConfig, env: Option<&str>) -> Result<Artifacts, HarnessError> {
    let grid = cfg.grid("sweep-n")?;
    let sim = cfg.validate_run(&grid)?;
    let n_list = cfg.multiplier.n_list.clone();
    if n_list.len() < 4 {
        return Err(HarnessError::Config(crate::config::ConfigIssue {
            path: "multiplier.n_list".into(),
            message: format!("sweep needs at least 4 cutoffs for a fit, got {}", n_list.len()),
        }));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(HarnessError::Config(crate::config::ConfigIssue {
            path: "multiplier.n_list".into(),
            message: "cutoffs must be strictly ascending".into(),
        }));
    }
    let opts = SweepOptions {
        horizon: cfg.sweep.horizon,
        max_horizon: cfg.sweep.max_horizon,
        local_time: LocalTimeModel {
            constant: cfg.sweep.local_time_constant,
            eps: cfg.sweep.local_time_eps,
        },
    };
    let u0 = build_initial(&grid, &cfg.initial);
    let mut art = prepare(&mut cfg, env)?;
    let table = almost_conservation_sweep(&u0, &sim, &n_list, &opts)?;
    let path = art.dir.join(SWEEP_CSV);
    write_text(&path, &table.to_csv())?;
    art.files.push(path);
    Ok(art)
}

fn exp_label(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

/// Samples the configured cases; `seed` replaces the configured seed.
pub fn cmd_lab(mut cfg: ExperimentConfig, seed: Option<u64>, env: Option<&str>) -> Result<Artifacts, HarnessError> {
    if let Some(s) = seed {
        cfg.lab.seed = s;
    }
    let plan = cfg.lab_plan()?;
    let specs = cfg.strichartz_specs()?;
    let grid = if specs.is_empty() { None } else { Some(cfg.grid("lab strichartz probes")?) };
    let mut art = prepare(&mut cfg, env)?;
    let rows = run_lab(&plan)?;
    let path = art.dir.join(LAB_CSV);
    write_text(&path, &lab_csv(&rows))?;
    art.files.push(path);
    if let Some(grid) = grid {
        let mut out = format!("{STRICHARTZ_HEADER}\n");
        for spec in &specs {
            let r = strichartz_gain_probe(spec, &grid)?;
            writeln!(
                out,
                "{},{},{},{},{},{},{:e}",
                spec.mu,
                exp_label(spec.p),
                exp_label(spec.q),
                grid.nx(),
                grid.ny(),
                spec.trials,
                r.ratio_max
            )
            .unwrap();
        }
        let path = art.dir.join(STRICHARTZ_CSV);
        write_text(&path, &out)?;
        art.files.push(path);
    }
    Ok(art)
}

pub fn cmd_calc(mut cfg: ExperimentConfig, env: Option<&str>) -> Result<Artifacts, HarnessError> {
    cfg.validate_calc()?;
    let (lo, hi) = (cfg.calc.k_min, cfg.calc.k_max);
    let mut art = prepare(&mut cfg, env)?;
    let out = calc_csv(lo, hi);
    let path = art.dir.join(CALC_CSV);
    write_text(&path, &out)?;
    art.files.push(path);
    Ok(art)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fourns_core::norms::lp_norm;

    #[test]
    fn initial_families() {
        let g = Grid2D::square(32, 20.0).unwrap();
        let mut init = InitialBlock { amplitude: 2.0, ..InitialBlock::default() };
        let u = build_initial(&g, &init);
        assert!((u.max_abs() - 2.0).abs() < 1e-12);
        init.family = Family::PlaneWave;
        init.modulation = [1, 2];
        let p = build_initial(&g, &init);
        let l2 = lp_norm(&p, 2.0).unwrap();
        assert!((l2 - 2.0 * 20.0).abs() < 1e-9);
        let spec = p.spectral();
        let peak = spec.at(1, 2).norm();
        assert!(spec.data().iter().all(|v| v.norm() <= peak));
        init.family = Family::MultiBump;
        init.centers = vec![[-5.0, 0.0], [5.0, 0.0]];
        let m = build_initial(&g, &init);
        assert!(m.max_abs() > 1.9 && m.max_abs() < 2.1);
    }
}
