//! Exponent bookkeeping for the I-method iteration: local existence time,
//! the cutoff/time relation, the regularity threshold and polynomial growth.
//!
//! Identities are checked in exact rational arithmetic; floating-point
//! entry points exist for user-facing evaluation. The `ε`-losses hidden in
//! `a±` exponents are threaded through as an explicit `eps` (default 0).

use std::fmt::Write as _;

use num_rational::Ratio;

use crate::error::{Error, Result};

pub type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn qk(k: u32) -> Q {
    Q::from_integer(k as i64)
}

/// `2 − 3/(4k)`: first exponent positive above this.
pub fn gwp_threshold(k: u32) -> Q {
    q(2, 1) - q(3, 4 * k as i64)
}

/// `2 − 2/(3k)`: second exponent positive above this.
pub fn second_exponent_threshold(k: u32) -> Q {
    q(2, 1) - q(2, 3 * k as i64)
}

/// `2 − 1/(2k)`: where the growth-exponent formula switches.
pub fn growth_split_point(k: u32) -> Q {
    q(2, 1) - q(1, 2 * k as i64)
}

/// `(4ks − 8k + 3, 6ks − 12k + 4)`.
pub fn growth_exponents_exact(k: u32, s: Q) -> (Q, Q) {
    let k = qk(k);
    (
        q(4, 1) * k * s - q(8, 1) * k + q(3, 1),
        q(6, 1) * k * s - q(12, 1) * k + q(4, 1),
    )
}

pub fn growth_exponents(k: u32, s: f64) -> (f64, f64) {
    let k = k as f64;
    (4.0 * k * s - 8.0 * k + 3.0, 6.0 * k * s - 12.0 * k + 4.0)
}

/// The same exponents assembled from the iteration relation
/// `T·δ⁻¹·(N^{-3}N^{(2k+2)(2-s)} + N^{-4}N^{(4k+2)(2-s)}) ∼ N^{2(2-s)}`
/// with `δ = N^{-2k(2-s)}`.
pub fn iteration_exponents_exact(k: u32, s: Q) -> (Q, Q) {
    let k = qk(k);
    let smoothing = q(2, 1) - s;
    let target = q(2, 1) * smoothing;
    let delta = -q(2, 1) * k * smoothing;
    let inc1 = q(-3, 1) + (q(2, 1) * k + q(2, 1)) * smoothing;
    let inc2 = q(-4, 1) + (q(4, 1) * k + q(2, 1)) * smoothing;
    (target + delta - inc1, target + delta - inc2)
}

/// `(4 − 2s)/e` with the denominator chosen by the regime split at `2 − 1/(2k)`.
pub fn growth_exponent_exact(k: u32, s: Q) -> Q {
    let (e1, e2) = growth_exponents_exact(k, s);
    let num = q(4, 1) - q(2, 1) * s;
    if s <= growth_split_point(k) {
        num / e1
    } else {
        num / e2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExistenceTime {
    pub delta: f64,
    /// Zero initial norm: no finite estimate; `delta` is the clamp value.
    pub unbounded: bool,
}

/// Knobs for the hidden constant and `ε`-loss in `δ^{1−ε} ∼ c·‖Iu₀‖_{H²}^{−2k}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalTimeModel {
    pub constant: f64,
    pub eps: f64,
}

impl Default for LocalTimeModel {
    fn default() -> Self {
        Self {
            constant: 1.0,
            eps: 0.0,
        }
    }
}

impl LocalTimeModel {
    /// `δ = (c·x^{−2k})^{1/(1−ε)}`; for `x = 0` returns `clamp` flagged unbounded.
    pub fn existence_time(&self, iu0_h2: f64, k: u32, clamp: f64) -> Result<ExistenceTime> {
        if !(iu0_h2.is_finite() && iu0_h2 >= 0.0) {
            return Err(Error::InvalidParameter(format!("norm {iu0_h2} must be >= 0")));
        }
        if iu0_h2 == 0.0 {
            return Ok(ExistenceTime {
                delta: clamp,
                unbounded: true,
            });
        }
        let base = self.constant * iu0_h2.powi(-2 * k as i32);
        Ok(ExistenceTime {
            delta: base.powf(1.0 / (1.0 - self.eps)),
            unbounded: false,
        })
    }
}

/// `δ = ‖Iu₀‖_{H²}^{−2k}` with unit constant and `ε = 0`.
pub fn existence_time(iu0_h2: f64, k: u32, clamp: f64) -> Result<ExistenceTime> {
    LocalTimeModel::default().existence_time(iu0_h2, k, clamp)
}

pub fn existence_time_exact(iu0_h2: Q, k: u32) -> Result<Q> {
    if iu0_h2 <= Q::from_integer(0) {
        return Err(Error::InvalidParameter("norm must be positive".into()));
    }
    Ok(iu0_h2.pow(-2 * k as i32))
}

fn check_above_threshold(k: u32, s: f64) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let th = to_f64(gwp_threshold(k));
    if s <= th || s >= 2.0 {
        return Err(Error::BelowThreshold {
            s,
            constraint: if s >= 2.0 {
                "s < 2".to_string()
            } else {
                format!("4ks - 8k + 3 > 0, i.e. s > 2 - 3/(4k) = {}", fraction(gwp_threshold(k)))
            },
        });
    }
    Ok(())
}

/// `T ∼ N^{e1−ε} + N^{e2−ε}`.
pub fn time_from_cutoff(k: u32, s: f64, n_cut: f64, eps: f64) -> Result<f64> {
    check_above_threshold(k, s)?;
    let (e1, e2) = growth_exponents(k, s);
    Ok(n_cut.powf(e1 - eps) + n_cut.powf(e2 - eps))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound {
    /// `a` in `sup_{[0,T]} ‖u‖_{Hˢ} ≲ T^{a}`.
    pub exponent: f64,
    pub bound: f64,
    /// `e2 ≤ 0` although `s` is above the stated threshold.
    pub second_exponent_nonpositive: bool,
}

/// Polynomial-in-time growth exponent and `T^{exponent}`.
pub fn growth_bound(k: u32, s: f64, t: f64) -> Result<GrowthBound> {
    check_above_threshold(k, s)?;
    let (e1, e2) = growth_exponents(k, s);
    let split = to_f64(growth_split_point(k));
    let num = 4.0 - 2.0 * s;
    let exponent = if (s - split).abs() <= 1e-15 {
        let (a, b) = (num / e1, num / e2);
        assert!(
            (a - b).abs() <= 1e-12 * a.abs().max(1.0),
            "growth formulas disagree at the split point: {a} vs {b}"
        );
        a
    } else if s < split {
        num / e1
    } else {
        num / e2
    };
    Ok(GrowthBound {
        exponent,
        bound: t.powf(exponent),
        second_exponent_nonpositive: e2 <= 0.0,
    })
}

/// Exponent `(2 − s)/(k + 1)` in `‖Iu₀‖_{L^{2k+2}} ≤ C N^{(2−s)/(k+1)} ‖u₀‖_{Hˢ}`.
pub fn potential_energy_exponent(k: u32, s: f64) -> f64 {
    (2.0 - s) / (k as f64 + 1.0)
}

pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// `"n/d"`, or `"n"` for integers.
pub fn fraction(x: Q) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// One row of the calculator table.
#[derive(Debug, Clone, PartialEq)]
pub struct CalcRow {
    pub k: u32,
    pub s: Q,
    pub e1: Q,
    pub e2: Q,
    pub growth_exponent: Option<Q>,
}

/// Sample regularities for `k`: quarter points between the threshold and 2.
pub fn sample_regularities(k: u32) -> Vec<Q> {
    let th = gwp_threshold(k);
    let gap = q(2, 1) - th;
    vec![th, th + gap / 4, th + gap / 2, growth_split_point(k), th + gap * 3 / 4]
}

pub fn calc_rows(k_max: u32) -> Vec<CalcRow> {
    let mut rows = Vec::new();
    for k in 1..=k_max {
        let mut ss = sample_regularities(k);
        ss.sort();
        ss.dedup();
        for s in ss {
            let (e1, e2) = growth_exponents_exact(k, s);
            let growth_exponent = (s > gwp_threshold(k)).then(|| growth_exponent_exact(k, s));
            rows.push(CalcRow {
                k,
                s,
                e1,
                e2,
                growth_exponent,
            });
        }
    }
    rows
}

pub const CALC_HEADER: &str = "k,threshold,threshold_decimal,second_threshold,second_threshold_decimal,split_point,split_point_decimal,s,s_decimal,e1,e2,growth_exponent,growth_exponent_decimal,regime";

/// CSV table over `k = k_min..=k_max`; rationals as fractions plus decimals.
pub fn calc_csv(k_min: u32, k_max: u32) -> String {
    let mut out = String::new();
    out.push_str(CALC_HEADER);
    out.push('\n');
    for row in calc_rows(k_max).into_iter().filter(|r| r.k >= k_min) {
        let th = gwp_threshold(row.k);
        let th2 = second_exponent_threshold(row.k);
        let split = growth_split_point(row.k);
        let regime = if row.s <= th {
            "at_or_below_threshold"
        } else if row.s <= th2 {
            "second_exponent_nonpositive"
        } else if row.s <= split {
            "first_formula"
        } else {
            "second_formula"
        };
        let (ge, ged) = match row.growth_exponent {
            Some(g) => (fraction(g), format!("{:.12}", to_f64(g))),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{:.12},{},{:.12},{},{:.12},{},{:.12},{},{},{},{},{}",
            row.k,
            fraction(th),
            to_f64(th),
            fraction(th2),
            to_f64(th2),
            fraction(split),
            to_f64(split),
            fraction(row.s),
            to_f64(row.s),
            fraction(row.e1),
            fraction(row.e2),
            ge,
            ged,
            regime
        )
        .unwrap();
    }
    out
}
