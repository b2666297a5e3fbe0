//! Discrete `L^q_t L^p_x` norms of the free evolution of `|∇|^μ f`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dynamics::linear_propagate;
use crate::error::{Error, Result};
use crate::field::{Field, Repr};
use crate::grid::Grid2D;
use crate::norms::{lp_norm, Exponent};

/// `4/q = d(1/2 − 1/p)` with `2 ≤ p` (strictly below `2d/(d−4)` when `d ≥ 4`),
/// excluding the endpoint `(∞, 2, 4)`.
pub fn admissible_pair_check(p: f64, q: f64, d: u32) -> bool {
    if !(p >= 2.0 && q >= 2.0) || d == 0 {
        return false;
    }
    if p == f64::INFINITY && q == 2.0 && d == 4 {
        return false;
    }
    if d >= 4 {
        let upper = if d == 4 { f64::INFINITY } else { 2.0 * d as f64 / (d as f64 - 4.0) };
        if p >= upper {
            return false;
        }
    }
    let lhs = 4.0 / q;
    let rhs = d as f64 * (0.5 - 1.0 / p);
    (lhs - rhs).abs() <= 1e-12
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzProbeSpec {
    pub mu: f64,
    pub p: f64,
    pub q: f64,
    /// Time horizon `T`.
    pub horizon: f64,
    pub trials: usize,
    /// Time quadrature nodes on `[0, T]`, at least 64.
    pub nodes: usize,
    /// Random fields use modes with `|m_x|, |m_y| ≤ band`.
    pub band: i64,
    pub seed: u64,
}

impl Default for StrichartzProbeSpec {
    fn default() -> Self {
        Self {
            mu: 1.0,
            p: f64::INFINITY,
            q: 2.0,
            horizon: 1.0,
            trials: 8,
            nodes: 64,
            band: 16,
            seed: 0,
        }
    }
}

impl StrichartzProbeSpec {
    /// `0 ≤ μ ≤ 1`, `2/(1−μ) ≤ p ≤ ∞`, `2 ≤ q ≤ ∞` and `4/q = 2(1/2 − 1/p) + μ`.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(0.0..=1.0).contains(&self.mu) {
            return bad(format!("mu = {} outside [0, 1]", self.mu));
        }
        let p_min = if self.mu == 1.0 { f64::INFINITY } else { 2.0 / (1.0 - self.mu) };
        if !(self.p >= p_min) {
            return bad(format!("p = {} below 2/(1 - mu) = {p_min}", self.p));
        }
        if !(self.q >= 2.0) {
            return bad(format!("q = {} below 2", self.q));
        }
        let lhs = 4.0 / self.q;
        let rhs = 2.0 * (0.5 - 1.0 / self.p) + self.mu;
        if (lhs - rhs).abs() > 1e-12 {
            return bad(format!(
                "(mu, p, q) = ({}, {}, {}) violates 4/q = 2(1/2 - 1/p) + mu",
                self.mu, self.p, self.q
            ));
        }
        if self.nodes < 64 {
            return bad(format!("need at least 64 time nodes, got {}", self.nodes));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon {} must be > 0", self.horizon));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub ratio_max: f64,
    pub ratios: Vec<f64>,
}

/// Random unit-`L²` field with normal coefficients on the modes
/// `|m_x|, |m_y| ≤ band`, drawn in an order that does not depend on the grid.
pub fn random_unit_field(grid: &Grid2D, band: i64, seed: u64, stream: u64) -> Result<Field> {
    let limit = (grid.nx().min(grid.ny()) / 2) as i64;
    if band < 0 || band >= limit {
        return Err(Error::InvalidParameter(format!(
            "band {band} must lie in [0, {limit})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut spec = Field::zeros(grid, Repr::Spectral);
    let ny = grid.ny();
    for mx in -band..=band {
        for my in -band..=band {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let i = Grid2D::mode_slot(grid.nx(), mx).unwrap();
            let j = Grid2D::mode_slot(ny, my).unwrap();
            spec.data_mut()[i * ny + j] = Complex64::new(re, im);
        }
    }
    let phys = spec.into_physical();
    let n2 = lp_norm(&phys, 2.0)?;
    Ok(phys.scale(Complex64::new(1.0 / n2, 0.0)))
}

/// `‖e^{it(Δ²−Δ)}|∇|^μ f‖_{L^q_t L^p_x} / ‖f‖₂` with trapezoid weights in time
/// (max over nodes for `q = ∞`).
pub fn probe_field(spec: &StrichartzProbeSpec, f: &Field) -> Result<f64> {
    spec.validate()?;
    let f = f.physical();
    let l2 = lp_norm(&f, 2.0)?;
    let g = if spec.mu == 0.0 {
        f.clone()
    } else {
        f.apply_symbol(|kx, ky| kx.hypot(ky).powf(spec.mu))?.into_physical()
    };
    let m = spec.nodes;
    let dt = spec.horizon / (m - 1) as f64;
    let mut values = Vec::with_capacity(m);
    for n in 0..m {
        let u = linear_propagate(&g, n as f64 * dt);
        values.push(lp_norm(&u, spec.p)?);
    }
    let time_norm = match Exponent::new(spec.q)? {
        Exponent::Infinity => values.iter().cloned().fold(0.0, f64::max),
        Exponent::Finite(q) => {
            let s: f64 = values
                .iter()
                .enumerate()
                .map(|(n, v)| {
                    let w = if n == 0 || n == m - 1 { 0.5 * dt } else { dt };
                    w * v.powf(q)
                })
                .sum();
            s.powf(1.0 / q)
        }
    };
    Ok(time_norm / l2)
}

/// Maximum of [`probe_field`] over `trials` seeded random fields.
pub fn strichartz_gain_probe(spec: &StrichartzProbeSpec, grid: &Grid2D) -> Result<ProbeResult> {
    spec.validate()?;
    let ratios = (0..spec.trials)
        .map(|t| probe_field(spec, &random_unit_field(grid, spec.band, spec.seed, t as u64)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeResult {
        ratio_max: ratios.iter().cloned().fold(0.0, f64::max),
        ratios,
    })
}
