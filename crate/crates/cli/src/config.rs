//! JSON experiment configuration.
//!
//! Every block except `grid` has defaults; unknown keys are rejected and the
//! fully materialized document is echoed next to the artifacts.

use std::fmt;
use std::path::{Path, PathBuf};

use fourns_core::dealias::DealiasMode;
use fourns_core::dynamics::SimConfig;
use fourns_core::inequality_lab::{probe, LabPlan, StrichartzProbeSpec};
use fourns_core::multipliers::Variant;
use fourns_core::Grid2D;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub grid: Option<GridBlock>,
    #[serde(default)]
    pub sim: SimBlock,
    #[serde(default)]
    pub multiplier: MultiplierBlock,
    #[serde(default)]
    pub initial: InitialBlock,
    #[serde(default)]
    pub sweep: SweepBlock,
    #[serde(default)]
    pub lab: LabBlock,
    #[serde(default)]
    pub calc: CalcBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimBlock {
    pub k: u32,
    pub dt: f64,
    pub t_end: f64,
    pub integrator: String,
    pub dealias: DealiasMode,
    pub linear_only: bool,
    pub blowup_threshold: f64,
}

impl Default for SimBlock {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            k: d.k,
            dt: d.dt,
            t_end: d.t_end,
            integrator: d.integrator,
            dealias: d.dealias,
            linear_only: d.linear_only,
            blowup_threshold: d.blowup_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultiplierBlock {
    pub s: f64,
    pub n_list: Vec<f64>,
    pub variant: Variant,
}

impl Default for MultiplierBlock {
    fn default() -> Self {
        Self {
            s: 1.5,
            n_list: vec![8.0, 16.0, 32.0, 64.0],
            variant: Variant::Sharp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[default]
    Gaussian,
    MultiBump,
    PlaneWave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialBlock {
    pub family: Family,
    pub amplitude: f64,
    /// Gaussian standard deviation.
    pub width: f64,
    /// Integer mode numbers `(m_x, m_y)` of the carrier `e^{2πi(m_x x/l_x + m_y y/l_y)}`.
    pub modulation: [i64; 2],
    /// Bump centres; `gaussian` uses the first.
    pub centers: Vec<[f64; 2]>,
    /// Constant phase `θ` multiplying the data by `e^{iθ}`.
    pub phase: f64,
}

impl Default for InitialBlock {
    fn default() -> Self {
        Self {
            family: Family::Gaussian,
            amplitude: 1.0,
            width: 1.0,
            modulation: [0, 0],
            centers: vec![[0.0, 0.0]],
            phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    /// Fixed horizon; `null` uses the nominal local-existence time.
    pub horizon: Option<f64>,
    pub max_horizon: f64,
    /// Constant `C` in `δ = C‖Iu₀‖_{H²}^{−2k(1+ε)}`.
    pub local_time_constant: f64,
    pub local_time_eps: f64,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            horizon: None,
            max_horizon: 0.1,
            local_time_constant: 1.0,
            local_time_eps: 0.0,
        }
    }
}

/// Exponent written as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exp(pub f64);

impl Serialize for Exp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Exp(v)),
            Raw::Str(s) if s == "inf" => Ok(Exp(f64::INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got \"{s}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrichartzBlock {
    pub mu: f64,
    pub p: Exp,
    pub q: Exp,
    pub horizon: f64,
    pub trials: usize,
    pub nodes: usize,
    pub band: i64,
}

impl Default for StrichartzBlock {
    fn default() -> Self {
        let d = StrichartzProbeSpec::default();
        Self {
            mu: d.mu,
            p: Exp(d.p),
            q: Exp(d.q),
            horizon: d.horizon,
            trials: d.trials,
            nodes: d.nodes,
            band: d.band,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LabBlock {
    pub seed: u64,
    pub samples: usize,
    pub cases: Vec<String>,
    pub k: Vec<u32>,
    pub s: Vec<f64>,
    pub n_list: Vec<f64>,
    pub variant: Variant,
    /// Upper radius for sampled frequencies.
    pub cap: f64,
    /// Strichartz probes; these need the grid block.
    pub strichartz: Vec<StrichartzBlock>,
}

impl Default for LabBlock {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 10_000,
            cases: vec!["hyperplane".into()],
            k: vec![1],
            s: vec![1.5],
            n_list: vec![16.0, 32.0],
            variant: Variant::Sharp,
            cap: 512.0,
            strichartz: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalcBlock {
    pub k_min: u32,
    pub k_max: u32,
}

impl Default for CalcBlock {
    fn default() -> Self {
        Self { k_min: 1, k_max: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub directory: PathBuf,
    /// Steps between diagnostics rows.
    pub cadence: usize,
    /// Steps between intermediate checkpoints; `null` for none.
    pub checkpoint_every: Option<usize>,
    pub final_checkpoint: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("fourns_out"),
            cadence: 10,
            checkpoint_every: None,
            final_checkpoint: true,
        }
    }
}

/// Location of a config problem, rendered as `path: message`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

fn issue(path: &str, message: impl fmt::Display) -> HarnessError {
    HarnessError::Config(ConfigIssue {
        path: path.into(),
        message: message.to_string(),
    })
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            issue(&path, e.into_inner())
        })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| issue("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn grid(&self, command: &str) -> Result<Grid2D, HarnessError> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| issue("grid", format!("missing block, required by {command}")))?;
        Grid2D::new(g.nx, g.ny, g.lx, g.ly).map_err(|e| issue("grid", e))
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            k: self.sim.k,
            dt: self.sim.dt,
            t_end: self.sim.t_end,
            integrator: self.sim.integrator.clone(),
            dealias: self.sim.dealias,
            diag_every: self.output.cadence,
            checkpoint_every: self.output.checkpoint_every,
            i_cutoffs: self.multiplier.n_list.clone(),
            s: self.multiplier.s,
            variant: self.multiplier.variant,
            linear_only: self.sim.linear_only,
            blowup_threshold: self.sim.blowup_threshold,
        }
    }

    /// Checks the blocks a dynamics run depends on.
    pub fn validate_run(&self, grid: &Grid2D) -> Result<SimConfig, HarnessError> {
        let cfg = self.sim_config();
        cfg.validate(grid).map_err(|e| issue("sim", e))?;
        let i = &self.initial;
        if !(i.amplitude.is_finite() && i.width > 0.0 && i.width.is_finite() && i.phase.is_finite()) {
            return Err(issue("initial", "amplitude and phase must be finite and width > 0"));
        }
        if i.family != Family::PlaneWave && i.centers.is_empty() {
            return Err(issue("initial.centers", "need at least one centre"));
        }
        for (axis, (m, n)) in [(i.modulation[0], grid.nx()), (i.modulation[1], grid.ny())].into_iter().enumerate() {
            if Grid2D::mode_slot(n, m).is_none() {
                return Err(issue(&format!("initial.modulation[{axis}]"), format!("mode {m} not on the grid")));
            }
        }
        Ok(cfg)
    }

    pub fn lab_plan(&self) -> Result<LabPlan, HarnessError> {
        let l = &self.lab;
        for (i, c) in l.cases.iter().enumerate() {
            probe(c).map_err(|e| issue(&format!("lab.cases[{i}]"), e))?;
        }
        if l.cases.is_empty() || l.k.is_empty() || l.s.is_empty() || l.n_list.is_empty() {
            return Err(issue("lab", "cases, k, s and n_list must be nonempty"));
        }
        if l.k.contains(&0) {
            return Err(issue("lab.k", "k must be >= 1"));
        }
        if !(l.cap >= 1.0 && l.cap.is_finite()) {
            return Err(issue("lab.cap", "cap must be finite and >= 1"));
        }
        for &s in &l.s {
            for &n in &l.n_list {
                fourns_core::multipliers::IMultiplier::new(s, n, l.variant).map_err(|e| issue("lab", e))?;
            }
        }
        Ok(LabPlan {
            cases: l.cases.clone(),
            k: l.k.clone(),
            s: l.s.clone(),
            n_cut: l.n_list.clone(),
            variant: l.variant,
            cap: l.cap,
            samples: l.samples,
            seed: l.seed,
        })
    }

    pub fn strichartz_specs(&self) -> Result<Vec<StrichartzProbeSpec>, HarnessError> {
        self.lab
            .strichartz
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let spec = StrichartzProbeSpec {
                    mu: b.mu,
                    p: b.p.0,
                    q: b.q.0,
                    horizon: b.horizon,
                    trials: b.trials,
                    nodes: b.nodes,
                    band: b.band,
                    seed: self.lab.seed,
                };
                spec.validate().map_err(|e| issue(&format!("lab.strichartz[{i}]"), e))?;
                Ok(spec)
            })
            .collect()
    }

    pub fn validate_calc(&self) -> Result<(), HarnessError> {
        let c = &self.calc;
        if c.k_min < 1 || c.k_min > c.k_max {
            return Err(issue("calc", format!("need 1 <= k_min <= k_max, got {}..{}", c.k_min, c.k_max)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(c.sim.k, 1);
        assert_eq!(c.multiplier.n_list, vec![8.0, 16.0, 32.0, 64.0]);
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn errors_carry_the_path() {
        let e = ExperimentConfig::from_json(r#"{"grid": {"nx": 8, "ny": 8, "lx": 1.0}}"#).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("grid") && msg.contains("ly"), "{msg}");
        let e = ExperimentConfig::from_json(r#"{"sim": {"kk": 2}}"#).unwrap_err();
        assert!(e.to_string().contains("sim.kk: unknown field `kk`"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"lab": {"k": [1, "two"]}}"#).unwrap_err();
        assert!(e.to_string().contains("lab.k[1]: "), "{e}");
    }

    #[test]
    fn infinite_exponents() {
        let c = ExperimentConfig::from_json(r#"{"lab": {"strichartz": [{"p": "inf", "q": 2}]}}"#).unwrap();
        assert_eq!(c.lab.strichartz[0].p, Exp(f64::INFINITY));
        assert!(c.to_json().contains("\"inf\""));
        assert!(ExperimentConfig::from_json(r#"{"lab": {"strichartz": [{"p": "big"}]}}"#).is_err());
    }

    #[test]
    fn bad_case_lists_valid_ones() {
        let c = ExperimentConfig::from_json(r#"{"lab": {"cases": ["T9C9"]}}"#).unwrap();
        let msg = c.lab_plan().unwrap_err().to_string();
        assert!(msg.contains("lab.cases[0]") && msg.contains("T1C1") && msg.contains("hyperplane"), "{msg}");
    }

    #[test]
    fn grid_required_for_runs() {
        let c = ExperimentConfig::from_json("{}").unwrap();
        assert!(c.grid("simulate").unwrap_err().to_string().contains("grid"));
    }
}
