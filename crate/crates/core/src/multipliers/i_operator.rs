//! The I-operator: a radial Fourier multiplier equal to one below the cutoff
//! `N` and to `|ξ|^{s-2} N^{2-s}` beyond `2N`.
//!
//! Only the transition band `N < |ξ| ≤ 2N` is a free choice. Each choice is a
//! [`TransitionProfile`] registered by name.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;

/// Shape of `m` on the transition band.
pub trait TransitionProfile: Send + Sync {
    fn name(&self) -> &'static str;

    /// `m(r)` for `N < r ≤ 2N`.
    fn transition(&self, r: f64, s: f64, n_cut: f64) -> f64;
}

/// `min(1, (|ξ|/N)^{s-2})`: the outer branch extended down to `N`.
pub struct Sharp;

impl TransitionProfile for Sharp {
    fn name(&self) -> &'static str {
        "sharp"
    }

    fn transition(&self, r: f64, s: f64, n_cut: f64) -> f64 {
        (r / n_cut).powf(s - 2.0)
    }
}

/// C² quintic blend in `log|ξ|` between the two branches.
///
/// With `t = log₂(|ξ|/N)`, `log m = (s-2)·ln2·q(t)` where
/// `q = 6t³ - 8t⁴ + 3t⁵` agrees with both branches to second order at
/// `t = 0` and `t = 1`. `q' = t²(18 - 32t + 15t²) > 0`, so `m` is monotone.
pub struct Smooth;

impl Smooth {
    fn blend(t: f64) -> f64 {
        t * t * t * (6.0 + t * (-8.0 + 3.0 * t))
    }
}

impl TransitionProfile for Smooth {
    fn name(&self) -> &'static str {
        "smooth"
    }

    fn transition(&self, r: f64, s: f64, n_cut: f64) -> f64 {
        let t = (r / n_cut).log2();
        ((s - 2.0) * std::f64::consts::LN_2 * Self::blend(t)).exp()
    }
}

static SHARP: Sharp = Sharp;
static SMOOTH: Smooth = Smooth;

pub fn profiles() -> [&'static dyn TransitionProfile; 2] {
    [&SHARP, &SMOOTH]
}

pub fn profile(name: &str) -> Result<&'static dyn TransitionProfile> {
    profiles()
        .into_iter()
        .find(|p| p.name() == name)
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "multiplier variant",
            name: name.to_string(),
            valid: profiles().map(|p| p.name()).join(", "),
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Sharp,
    Smooth,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sharp => "sharp",
            Self::Smooth => "smooth",
        }
    }
}

/// Cutoff multiplier `m_N` for regularity `s ∈ (0, 2)`.
#[derive(Clone)]
pub struct IMultiplier {
    s: f64,
    n_cut: f64,
    variant: Variant,
    profile: &'static dyn TransitionProfile,
}

impl fmt::Debug for IMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IMultiplier")
            .field("s", &self.s)
            .field("n_cut", &self.n_cut)
            .field("variant", &self.variant)
            .finish()
    }
}

impl IMultiplier {
    pub fn new(s: f64, n_cut: f64, variant: Variant) -> Result<Self> {
        if !(s > 0.0 && s < 2.0) {
            return Err(Error::InvalidParameter(format!("s = {s} must lie in (0, 2)")));
        }
        if !(n_cut.is_finite() && n_cut >= 1.0) {
            return Err(Error::InvalidParameter(format!("cutoff N = {n_cut} must be >= 1")));
        }
        Ok(Self {
            s,
            n_cut,
            variant,
            profile: profile(variant.name())?,
        })
    }

    pub fn sharp(s: f64, n_cut: f64) -> Result<Self> {
        Self::new(s, n_cut, Variant::Sharp)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn n_cut(&self) -> f64 {
        self.n_cut
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// `m(|ξ|)`.
    pub fn eval(&self, xi_abs: f64) -> f64 {
        let (s, n) = (self.s, self.n_cut);
        if xi_abs <= n {
            1.0
        } else if xi_abs > 2.0 * n {
            xi_abs.powf(s - 2.0) * n.powf(2.0 - s)
        } else {
            self.profile.transition(xi_abs, s, n)
        }
    }

    pub fn eval_vec(&self, xi: [f64; 2]) -> f64 {
        self.eval(xi[0].hypot(xi[1]))
    }

    /// `Iu`: spectral multiplication by `m`. Result is spectral.
    pub fn apply(&self, f: &Field) -> Field {
        f.apply_symbol(|kx, ky| self.eval(kx.hypot(ky)))
            .expect("m is finite and positive")
    }
}
