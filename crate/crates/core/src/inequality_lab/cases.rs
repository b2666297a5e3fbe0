//! Pointwise bounds on `1 − m(ξ_{2…})/(m(ξ₂)…m(ξ_n))` in the frequency
//! interaction cases of the three terms of `d/dt E(Iu)`.
//!
//! A case sample is a [`FrequencyTuple`] whose free entries are the inputs
//! `ξ₂, …, ξ_{2k+2}` (for the third term `ξ_{2k+2}, …, ξ_{4k+2}`) and whose
//! closing entry is the output frequency. Orderings use the magnitudes:
//! `a ∼ b` is `max/min ≤ 2`, `a ≫ b` is `a ≥ 8b`, `a ≳ N` is `a ≥ N/2`.

use rand_chacha::ChaCha8Rng;

use super::{draw_freq, norm, FrequencyTuple, Freq, Probe, ProbeParams};
use crate::error::{Error, Result};
use crate::multipliers::IMultiplier;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    /// `Δ²Iu` paired with the product.
    Biharmonic,
    /// `ΔIu` paired with the product.
    Laplacian,
    /// `I(|u|^{2k}u)` paired with the product.
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    /// Output ∼ largest input ≳ N ≫ second input.
    HighLow,
    /// Two largest inputs comparable, both ≳ N.
    HighHigh,
    /// Largest input ≫ second input ≳ N.
    Separated,
}

const TRIES: usize = 10_000;

fn sim(a: f64, b: f64) -> bool {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    lo > 0.0 && hi <= 2.0 * lo
}

fn gg(a: f64, b: f64) -> bool {
    a >= 8.0 * b
}

fn gtrsim(a: f64, n: f64) -> bool {
    a >= 0.5 * n
}

/// Dyadic size `2^{round(log₂ max(|ξ|, 1))}` of a frequency.
pub fn dyadic_size(r: f64) -> f64 {
    2f64.powi(r.max(1.0).log2().round() as i32)
}

/// Evaluated sides of a case bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseEval {
    pub lhs: f64,
    pub rhs: f64,
}

impl CaseEval {
    /// `lhs/rhs`, zero when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }

    pub fn ok(&self, constant: f64) -> bool {
        self.lhs <= constant * self.rhs
    }
}

pub struct CaseBound {
    name: &'static str,
    term: Term,
    case: CaseId,
}

/// Input magnitudes in descending order and the output magnitude.
fn magnitudes(sample: &FrequencyTuple) -> (Vec<f64>, f64) {
    let mut a: Vec<f64> = sample.free().iter().map(|&x| norm(x)).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    (a, norm(sample.last()))
}

/// `|1 − m(output)/Π m(inputs)|`.
pub fn multiplier_lhs(sample: &FrequencyTuple, im: &IMultiplier) -> f64 {
    let den: f64 = sample.free().iter().map(|&x| im.eval_vec(x)).product();
    (1.0 - im.eval_vec(sample.last()) / den).abs()
}

impl CaseBound {
    pub fn term(&self) -> Term {
        self.term
    }

    pub fn case(&self) -> CaseId {
        self.case
    }

    /// `Err` naming the violated ordering if the sample is outside the case.
    pub fn check_constraints(&self, sample: &FrequencyTuple, n: f64) -> Result<()> {
        let (a, out) = magnitudes(sample);
        if a.len() < 2 {
            return Err(Error::SampleRejected("need at least two input frequencies".into()));
        }
        let (a1, a2) = (a[0], a[1]);
        let fail = |why: &str| Err(Error::SampleRejected(format!("{}: {why}", self.name)));
        let out_sim = sim(out, a1);
        match (self.term, self.case) {
            (_, CaseId::HighLow) => {
                if !out_sim {
                    return fail("output not comparable to the largest input");
                }
                if !gtrsim(a1, n) {
                    return fail("largest input below N/2");
                }
                if !gg(n, a2) {
                    return fail("second input not << N");
                }
            }
            (_, CaseId::HighHigh) => {
                if !sim(a1, a2) {
                    return fail("two largest inputs not comparable");
                }
                if !gtrsim(a2, n) {
                    return fail("second input below N/2");
                }
            }
            (term, CaseId::Separated) => {
                if term != Term::Biharmonic && !out_sim {
                    return fail("output not comparable to the largest input");
                }
                if !gg(a1, a2) {
                    return fail("largest input not >> second input");
                }
                if !gtrsim(a2, n) {
                    return fail("second input below N/2");
                }
            }
        }
        Ok(())
    }

    /// Right side of the claimed bound at dyadic sizes: `N₃/N₂` in the
    /// high-low case of the first two terms, `m(N_out)/Π m(N_j)` otherwise.
    pub fn rhs(&self, sample: &FrequencyTuple, im: &IMultiplier) -> f64 {
        let (a, out) = magnitudes(sample);
        if self.case == CaseId::HighLow && self.term != Term::Nonlinear {
            return dyadic_size(a[1]) / dyadic_size(a[0]);
        }
        let den: f64 = a.iter().map(|&r| im.eval(dyadic_size(r))).product();
        im.eval(dyadic_size(out)) / den
    }

    /// Checks the ordering, then evaluates both sides.
    pub fn check(&self, sample: &FrequencyTuple, im: &IMultiplier) -> Result<CaseEval> {
        self.check_constraints(sample, im.n_cut())?;
        Ok(CaseEval {
            lhs: multiplier_lhs(sample, im),
            rhs: self.rhs(sample, im),
        })
    }

    /// Draws a sample inside the case by construction plus rejection.
    pub fn sample(&self, rng: &mut ChaCha8Rng, k: u32, n: f64, cap: f64) -> Result<FrequencyTuple> {
        let inputs = 2 * k as usize + 1;
        let ranges = match self.case {
            CaseId::HighLow => {
                if n < 8.0 {
                    return Err(Error::InvalidParameter(format!("{} needs N >= 8", self.name)));
                }
                ((0.5 * n, cap), None, (1.0, n / 8.0))
            }
            CaseId::HighHigh => ((0.5 * n, cap), Some(0.5), (1.0, 0.0)),
            CaseId::Separated => ((4.0 * n, cap), Some(1.0 / 8.0), (1.0, 0.0)),
        };
        let ((lo1, hi1), second, (lo_rest, hi_rest)) = ranges;
        if hi1 < lo1 {
            return Err(Error::InvalidParameter(format!(
                "{} needs a sampling cap of at least {lo1}, got {cap}",
                self.name
            )));
        }
        for _ in 0..TRIES {
            let big = draw_freq(rng, lo1, hi1);
            let r1 = norm(big);
            let mut free: Vec<Freq> = vec![big];
            let r2 = match (self.case, second) {
                (CaseId::HighHigh, Some(f)) => {
                    let v = draw_freq(rng, f * r1, r1);
                    free.push(v);
                    norm(v)
                }
                (CaseId::Separated, Some(f)) => {
                    let v = draw_freq(rng, 0.5 * n, f * r1);
                    free.push(v);
                    norm(v)
                }
                _ => hi_rest,
            };
            while free.len() < inputs {
                free.push(draw_freq(rng, lo_rest, lo_rest.max(r2)));
            }
            let t = FrequencyTuple::close(&free);
            if self.check_constraints(&t, n).is_ok() {
                return Ok(t);
            }
        }
        Err(Error::SampleRejected(format!(
            "{}: no admissible sample in {TRIES} tries (k = {k}, N = {n}, cap = {cap})",
            self.name
        )))
    }
}

impl Probe for CaseBound {
    fn name(&self) -> &'static str {
        self.name
    }

    fn draw(&self, rng: &mut ChaCha8Rng, params: &ProbeParams, im: &IMultiplier) -> Result<f64> {
        let t = self.sample(rng, params.k, im.n_cut(), params.cap)?;
        Ok(self.check(&t, im)?.ratio())
    }
}

static CASES: [CaseBound; 9] = [
    CaseBound { name: "T1C1", term: Term::Biharmonic, case: CaseId::HighLow },
    CaseBound { name: "T1C2", term: Term::Biharmonic, case: CaseId::HighHigh },
    CaseBound { name: "T1C3", term: Term::Biharmonic, case: CaseId::Separated },
    CaseBound { name: "T2C1", term: Term::Laplacian, case: CaseId::HighLow },
    CaseBound { name: "T2C2", term: Term::Laplacian, case: CaseId::HighHigh },
    CaseBound { name: "T2C3", term: Term::Laplacian, case: CaseId::Separated },
    CaseBound { name: "T3C1", term: Term::Nonlinear, case: CaseId::HighLow },
    CaseBound { name: "T3C2", term: Term::Nonlinear, case: CaseId::HighHigh },
    CaseBound { name: "T3C3", term: Term::Nonlinear, case: CaseId::Separated },
];

pub fn cases() -> &'static [CaseBound] {
    &CASES
}

pub fn case(name: &str) -> Result<&'static CaseBound> {
    CASES.iter().find(|c| c.name == name).ok_or_else(|| Error::UnknownStrategy {
        kind: "lab case",
        name: name.to_string(),
        valid: CASES.iter().map(|c| c.name).collect::<Vec<_>>().join(", "),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn all_low_symbol_vanishes() {
        let im = IMultiplier::sharp(1.5, 32.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 1..=3u32 {
            for _ in 0..2000 {
                let free: Vec<Freq> = (0..2 * k + 1)
                    .map(|_| draw_freq(&mut rng, 1.0, 32.0 / (2 * k + 1) as f64))
                    .collect();
                let t = FrequencyTuple::close(&free);
                assert_eq!(multiplier_lhs(&t, &im), 0.0);
                assert!(case("T1C1").unwrap().check(&t, &im).is_err());
            }
        }
    }

    #[test]
    fn single_surviving_frequency() {
        let im = IMultiplier::sharp(1.8, 32.0).unwrap();
        let t = FrequencyTuple::close(&[[100.0, 7.0], [0.0, 0.0], [0.0, 0.0]]);
        let e = case("T1C1").unwrap().check(&t, &im).unwrap();
        assert_eq!(e.lhs, 0.0);
        assert!(e.ok(1.0));
    }

    #[test]
    fn samplers_respect_their_case() {
        let im = IMultiplier::sharp(1.8, 32.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for c in cases() {
            for k in 1..=2 {
                for _ in 0..200 {
                    let t = c.sample(&mut rng, k, 32.0, 4096.0).unwrap();
                    assert_eq!(t.sum(), [0.0, 0.0]);
                    let e = c.check(&t, &im).unwrap();
                    assert!(e.lhs.is_finite() && e.rhs > 0.0, "{}", c.name);
                }
            }
        }
    }

    #[test]
    fn constraint_violations_are_named() {
        let im = IMultiplier::sharp(1.5, 32.0).unwrap();
        let t = FrequencyTuple::close(&[[40.0, 0.0], [30.0, 0.0], [1.0, 0.0]]);
        let msg = case("T1C1").unwrap().check(&t, &im).unwrap_err().to_string();
        assert!(msg.contains("T1C1") && msg.contains("second input"));
        assert!(case("T2C2").unwrap().check(&t, &im).is_ok());
    }

    #[test]
    fn cap_too_small_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(case("T1C3").unwrap().sample(&mut rng, 1, 32.0, 64.0).is_err());
    }
}
