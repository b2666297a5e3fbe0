//! Seeded Monte-Carlo checks of the pointwise multiplier bounds used in the
//! almost-conservation argument, plus Strichartz-type probes.
//!
//! Every probe is registered by name ([`probe`]); a lab run draws samples
//! for each `(probe, k, s, N)` from its own ChaCha stream, so rows are
//! reproducible independently of one another.

mod cases;
mod strichartz;

pub use cases::{case, cases, dyadic_size, multiplier_lhs, CaseBound, CaseEval, CaseId, Term};
pub use strichartz::{
    admissible_pair_check, probe_field, random_unit_field, strichartz_gain_probe, ProbeResult,
    StrichartzProbeSpec,
};

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::multipliers::{IMultiplier, Variant};

/// Sampled coordinates are multiples of this, so lattice sums are exact.
const QUANTUM: f64 = 1.0 / 65536.0;

fn quantize(x: f64) -> f64 {
    (x / QUANTUM).round() * QUANTUM
}

pub type Freq = [f64; 2];

pub fn norm(xi: Freq) -> f64 {
    xi[0].hypot(xi[1])
}

/// Frequencies `ξ₁, …, ξ_n` with `Σξᵢ = 0`; the last entry is built from the others.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTuple {
    xi: Vec<Freq>,
}

impl FrequencyTuple {
    /// Appends `−Σ free`. Coordinates are rounded to the sampling lattice first.
    pub fn close(free: &[Freq]) -> Self {
        let mut xi: Vec<Freq> = free.iter().map(|v| [quantize(v[0]), quantize(v[1])]).collect();
        let sum = xi.iter().fold([0.0, 0.0], |a, v| [a[0] + v[0], a[1] + v[1]]);
        xi.push([-sum[0], -sum[1]]);
        Self { xi }
    }

    pub fn zeros(len: usize) -> Self {
        Self::close(&vec![[0.0, 0.0]; len - 1])
    }

    pub fn xi(&self) -> &[Freq] {
        &self.xi
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn last(&self) -> Freq {
        *self.xi.last().unwrap()
    }

    pub fn free(&self) -> &[Freq] {
        &self.xi[..self.xi.len() - 1]
    }

    pub fn sum(&self) -> Freq {
        self.xi.iter().fold([0.0, 0.0], |a, v| [a[0] + v[0], a[1] + v[1]])
    }
}

fn japanese(r: f64) -> f64 {
    (1.0 + r * r).sqrt()
}

/// `m(ξ_last)⟨ξ_last⟩^{2−s} / Π_{i<last} m(ξᵢ)⟨ξᵢ⟩^{2−s}`.
pub fn hyperplane_ratio(sample: &FrequencyTuple, im: &IMultiplier) -> f64 {
    let w = |xi: Freq| {
        let r = norm(xi);
        im.eval(r) * japanese(r).powf(2.0 - im.s())
    };
    let den: f64 = sample.free().iter().map(|&x| w(x)).product();
    w(sample.last()) / den
}

/// Uniform angle, radius log-uniform on `[lo, hi]`.
pub(crate) fn draw_freq(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Freq {
    let r = if hi > lo {
        lo * (hi / lo).powf(rng.random::<f64>())
    } else {
        lo
    };
    let a = rng.random::<f64>() * std::f64::consts::TAU;
    [r * a.cos(), r * a.sin()]
}

/// Tuple of `2k+2` frequencies with the free ones drawn log-uniformly in `[1, cap]`.
pub fn sample_hyperplane(rng: &mut ChaCha8Rng, k: u32, cap: f64) -> FrequencyTuple {
    let free: Vec<Freq> = (0..2 * k + 1).map(|_| draw_freq(rng, 1.0, cap)).collect();
    FrequencyTuple::close(&free)
}

/// Outcome of a dense-grid scan of `x ↦ m(x)·x^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    pub points: usize,
    pub violations: usize,
    pub first_violation: Option<f64>,
}

impl MonotoneReport {
    pub fn ok(&self) -> bool {
        self.violations == 0
    }
}

/// Scans `m(x)·x^p` on `points` uniform nodes of `[0, x_max]`; a drop larger
/// than `1e-12` relative counts as a violation.
pub fn monotone_family_check(im: &IMultiplier, p: f64, x_max: f64, points: usize) -> Result<MonotoneReport> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("exponent p = {p} must be > 0")));
    }
    if points < 2 || !(x_max > 0.0) {
        return Err(Error::InvalidParameter("need x_max > 0 and at least 2 points".into()));
    }
    let f = |x: f64| im.eval(x) * x.powf(p);
    let mut violations = 0;
    let mut first = None;
    let mut prev = f(0.0);
    for i in 1..points {
        let x = x_max * i as f64 / (points - 1) as f64;
        let v = f(x);
        if v < prev * (1.0 - 1e-12) {
            violations += 1;
            first.get_or_insert(x);
        }
        prev = v;
    }
    Ok(MonotoneReport {
        points,
        violations,
        first_violation: first,
    })
}

/// Inputs common to every sampling probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeParams {
    pub k: u32,
    pub im: IMultiplierParams,
    /// Largest sampled radius.
    pub cap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IMultiplierParams {
    pub s: f64,
    pub n_cut: f64,
    pub variant: Variant,
}

impl IMultiplierParams {
    pub fn build(&self) -> Result<IMultiplier> {
        IMultiplier::new(self.s, self.n_cut, self.variant)
    }
}

/// A sampled quantity whose supremum the lab estimates.
pub trait Probe: Send + Sync {
    fn name(&self) -> &'static str;

    /// One sample of the ratio `lhs/rhs`.
    fn draw(&self, rng: &mut ChaCha8Rng, params: &ProbeParams, im: &IMultiplier) -> Result<f64>;
}

/// [`hyperplane_ratio`] as a lab probe.
pub struct Hyperplane;

impl Probe for Hyperplane {
    fn name(&self) -> &'static str {
        "hyperplane"
    }

    fn draw(&self, rng: &mut ChaCha8Rng, params: &ProbeParams, im: &IMultiplier) -> Result<f64> {
        Ok(hyperplane_ratio(&sample_hyperplane(rng, params.k, params.cap), im))
    }
}

static HYPERPLANE: Hyperplane = Hyperplane;

/// The hyperplane probe followed by the nine case bounds.
pub fn probes() -> Vec<&'static dyn Probe> {
    let mut out: Vec<&'static dyn Probe> = vec![&HYPERPLANE];
    out.extend(cases().iter().map(|c| c as &dyn Probe));
    out
}

pub fn probe(name: &str) -> Result<&'static dyn Probe> {
    probes()
        .into_iter()
        .find(|p| p.name() == name)
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "lab case",
            name: name.to_string(),
            valid: probes().iter().map(|p| p.name()).collect::<Vec<_>>().join(", "),
        })
}

/// `2^⌈log₂ x⌉`, the recorded constant for a measured supremum `x`.
pub fn recorded_constant(max_ratio: f64) -> f64 {
    if max_ratio <= 0.0 {
        0.0
    } else {
        2f64.powi(max_ratio.log2().ceil() as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabRow {
    pub case: String,
    pub k: u32,
    pub s: f64,
    pub n_cut: f64,
    pub samples: usize,
    pub max_ratio: f64,
    pub constant: f64,
}

/// Runs `samples` draws of `probe` through the ChaCha stream `stream` of `seed`.
pub fn sample_max(
    probe: &dyn Probe,
    params: &ProbeParams,
    samples: usize,
    seed: u64,
    stream: u64,
) -> Result<f64> {
    let im = params.im.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut max = 0.0_f64;
    for _ in 0..samples {
        let r = probe.draw(&mut rng, params, &im)?;
        if !r.is_finite() {
            return Err(Error::SampleRejected(format!("{} produced ratio {r}", probe.name())));
        }
        max = max.max(r);
    }
    Ok(max)
}

/// A lab sweep over all combinations of the listed parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LabPlan {
    pub cases: Vec<String>,
    pub k: Vec<u32>,
    pub s: Vec<f64>,
    pub n_cut: Vec<f64>,
    pub variant: Variant,
    pub cap: f64,
    pub samples: usize,
    pub seed: u64,
}

/// One row per combination; none when `samples == 0`.
pub fn run_lab(plan: &LabPlan) -> Result<Vec<LabRow>> {
    let probes: Vec<&'static dyn Probe> = plan.cases.iter().map(|c| probe(c)).collect::<Result<_>>()?;
    if plan.samples == 0 {
        return Ok(Vec::new());
    }
    let mut jobs = Vec::new();
    for p in &probes {
        for &k in &plan.k {
            for &s in &plan.s {
                for &n in &plan.n_cut {
                    jobs.push((*p, k, s, n));
                }
            }
        }
    }
    jobs.par_iter()
        .enumerate()
        .map(|(i, &(p, k, s, n))| {
            let params = ProbeParams {
                k,
                im: IMultiplierParams {
                    s,
                    n_cut: n,
                    variant: plan.variant,
                },
                cap: plan.cap,
            };
            let max_ratio = sample_max(p, &params, plan.samples, plan.seed, i as u64)?;
            Ok(LabRow {
                case: p.name().to_string(),
                k,
                s,
                n_cut: n,
                samples: plan.samples,
                max_ratio,
                constant: recorded_constant(max_ratio),
            })
        })
        .collect()
}

pub const LAB_HEADER: &str = "case,k,s,N,samples,max_ratio,constant";

pub fn lab_csv(rows: &[LabRow]) -> String {
    let mut out = format!("{LAB_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{:e},{:e}",
            r.case, r.k, r.s, r.n_cut, r.samples, r.max_ratio, r.constant
        )
        .unwrap();
    }
    out
}
