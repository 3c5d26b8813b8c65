//! Closed-form filter functions: the per-manifold stay probability
//! |a_plus^inf(n)|^2 in exact, adiabatic-limit, resonant, and numerically
//! tabulated forms.
//!
//! The exact form branches on which of |lambda1|, |lambda2| dominates.
//! Writing D = 2 cosh(pi(L1+L2)) cosh(pi(L1-L2)) with L = |lambda|:
//!
//! ```text
//! L1 > L2:  p(n) = 1 - cosh(2 pi L2)/D + osc(n)/D
//! L1 <= L2: p(n) =     cosh(2 pi L1)/D + osc(n)/D
//! osc(n)   = cos(2 pi sqrt(eta^2 n - L2^2))   for eta^2 n >= L2^2
//!          = cosh(2 pi sqrt(L2^2 - eta^2 n))  otherwise (analytic continuation)
//! ```
//!
//! Branching on magnitudes is a convention choice: flipping the sign of
//! either lambda is a time reversal or a basis swap of the two-level problem,
//! both of which leave the stay probability unchanged, and the expressions
//! above are already even in each lambda. The numerical propagator in
//! [`crate::dynamics`] arbitrates this convention in the tests, including at
//! mixed-sign points.

use serde::{Deserialize, Serialize};

use crate::dynamics::{self, AtomCase, DKParams};
use crate::error::{Error, Result};

/// Largest |lambda| the closed forms accept. Everything is evaluated in log
/// space, so this is a contract bound (values this large are physically
/// inert: the filter is flat kappa to ~1e-130), not a float-overflow one.
pub const MAX_ABS_LAMBDA: f64 = 50.0;

/// How a filter table was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "exact-dk")]
    ExactDk,
    #[serde(rename = "adiabatic-kappa")]
    AdiabaticKappa,
    #[serde(rename = "resonant")]
    Resonant,
    #[serde(rename = "numeric")]
    Numeric,
}

/// Per-manifold stay probabilities p_plus[n] = |a_plus^inf(n)|^2 for
/// n = 0..nmax. The flip probability is always the complement and is never
/// stored. Index 0 is 1 for every built-in constructor: the n = 0 manifold
/// is one-dimensional, so nothing can flip there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterTable {
    p_plus: Vec<f64>,
    provenance: Provenance,
}

impl FilterTable {
    /// Builds a table from raw stay probabilities; every entry must be a
    /// probability.
    pub fn from_p_plus(p_plus: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if p_plus.is_empty() {
            return Err(Error::InvalidSpec(
                "filter table needs at least the n = 0 entry".into(),
            ));
        }
        for (n, &p) in p_plus.iter().enumerate() {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidSpec(format!(
                    "filter entry at n = {n} is {p}; must lie in [0, 1]"
                )));
            }
        }
        Ok(Self { p_plus, provenance })
    }

    pub fn nmax(&self) -> usize {
        self.p_plus.len() - 1
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Stay probability of manifold n. Panics beyond nmax; callers that take
    /// externally sized tables check coverage first.
    pub fn p_plus(&self, n: usize) -> f64 {
        self.p_plus[n]
    }

    /// Flip probability of manifold n, the complement of `p_plus`.
    pub fn p_minus(&self, n: usize) -> f64 {
        1.0 - self.p_plus[n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.p_plus
    }

    /// CSV rows "n,p_plus,p_minus" with header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,p_plus,p_minus\n");
        for (n, &p) in self.p_plus.iter().enumerate() {
            out.push_str(&format!(
                "{n},{},{}\n",
                crate::export::fmt_f64(p),
                crate::export::fmt_f64(1.0 - p)
            ));
        }
        out
    }
}

impl<'de> Deserialize<'de> for FilterTable {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p_plus: Vec<f64>,
            provenance: Provenance,
        }
        let raw = Raw::deserialize(de)?;
        FilterTable::from_p_plus(raw.p_plus, raw.provenance)
            .map_err(|e| serde::de::Error::custom(e.to_string()))
    }
}

/// Constant adiabatic-limit stay probability for all manifolds n >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Kappa(f64);

impl Kappa {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidSpec(format!(
                "kappa must lie in [0, 1], got {value}"
            )));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl<'de> Deserialize<'de> for Kappa {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        Kappa::new(f64::deserialize(de)?).map_err(|e| serde::de::Error::custom(e.to_string()))
    }
}

/// ln cosh(x), exact for any finite x (no overflow).
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// ln of the shared denominator 2 cosh(pi(L1+L2)) cosh(pi(L1-L2)).
fn ln_denom(l1: f64, l2: f64) -> f64 {
    use std::f64::consts::PI;
    std::f64::consts::LN_2 + ln_cosh(PI * (l1 + l2)) + ln_cosh(PI * (l1 - l2))
}

/// Exact stay probability of manifold n under the tanh/sech pulse.
///
/// Accepts lambdas of either sign (the result depends only on magnitudes;
/// see the module docs) with |lambda| <= [`MAX_ABS_LAMBDA`], and returns
/// exactly 1 at n = 0, where both branch expressions reduce to 1
/// algebraically.
pub fn dk_stay_probability(lambda1: f64, lambda2: f64, eta: f64, n: usize) -> Result<f64> {
    use std::f64::consts::PI;
    if !lambda1.is_finite() || !lambda2.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "lambda parameters must be finite, got ({lambda1}, {lambda2})"
        )));
    }
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "eta must be finite and >= 0, got {eta}"
        )));
    }
    let l1 = lambda1.abs();
    let l2 = lambda2.abs();
    if l1 > MAX_ABS_LAMBDA || l2 > MAX_ABS_LAMBDA {
        return Err(Error::Range(format!(
            "|lambda| up to {MAX_ABS_LAMBDA} supported, got ({lambda1}, {lambda2})"
        )));
    }
    if n == 0 {
        return Ok(1.0);
    }

    let ln_d = ln_denom(l1, l2);
    let x = eta * eta * n as f64 - l2 * l2;
    let osc = if x >= 0.0 {
        (2.0 * PI * x.sqrt()).cos() * (-ln_d).exp()
    } else {
        (ln_cosh(2.0 * PI * (-x).sqrt()) - ln_d).exp()
    };
    let p = if l1 > l2 {
        1.0 - (ln_cosh(2.0 * PI * l2) - ln_d).exp() + osc
    } else {
        // Includes the boundary |L1| = |L2|, where this expression is
        // continuous with the other branch and yields kappa = 1/2.
        (ln_cosh(2.0 * PI * l1) - ln_d).exp() + osc
    };
    dynamics::clamp_probability(p)
}

/// Exact filter table over manifolds 0..nmax.
pub fn dk_filter(lambda1: f64, lambda2: f64, eta: f64, nmax: usize) -> Result<FilterTable> {
    let p_plus = (0..=nmax)
        .map(|n| dk_stay_probability(lambda1, lambda2, eta, n))
        .collect::<Result<Vec<_>>>()?;
    FilterTable::from_p_plus(p_plus, Provenance::ExactDk)
}

/// Equivalent sinh/cosh product form of the stay probability, kept as an
/// independent algebraic route for cross-checking `dk_stay_probability`.
/// Evaluated directly (no log space), so only sound for moderate |lambda|.
#[allow(dead_code)]
pub(crate) fn dk_stay_probability_product_form(
    lambda1: f64,
    lambda2: f64,
    eta: f64,
    n: usize,
) -> f64 {
    use std::f64::consts::PI;
    if n == 0 {
        return 1.0;
    }
    let l1 = lambda1.abs();
    let l2 = lambda2.abs();
    let denom = (PI * (l1 + l2)).cosh() * (PI * (l1 - l2)).cosh();
    let s_sq = l2 * l2 - eta * eta * n as f64;
    if l1 > l2 {
        // 1 - sinh(pi(L2+s)) sinh(pi(L2-s)) / denom, continued to imaginary
        // s via sinh(a+ib) sinh(a-ib) = sinh^2 a cos^2 b + cosh^2 a sin^2 b.
        let num = if s_sq >= 0.0 {
            let s = s_sq.sqrt();
            (PI * (l2 + s)).sinh() * (PI * (l2 - s)).sinh()
        } else {
            let r = (-s_sq).sqrt();
            ((PI * l2).sinh() * (PI * r).cos()).powi(2)
                + ((PI * l2).cosh() * (PI * r).sin()).powi(2)
        };
        1.0 - num / denom
    } else {
        // cosh(pi(L1+s)) cosh(pi(L1-s)) / denom, continued via
        // cosh(a+ib) cosh(a-ib) = cosh^2 a cos^2 b + sinh^2 a sin^2 b.
        let num = if s_sq >= 0.0 {
            let s = s_sq.sqrt();
            (PI * (l1 + s)).cosh() * (PI * (l1 - s)).cosh()
        } else {
            let r = (-s_sq).sqrt();
            ((PI * l1).cosh() * (PI * r).cos()).powi(2)
                + ((PI * l1).sinh() * (PI * r).sin()).powi(2)
        };
        num / denom
    }
}

/// Constant part of the exact filter: the adiabatic-limit stay probability.
/// 1/2 on |lambda1| = |lambda2|, 0 deep in the level-crossing regime
/// (|lambda2| dominant), 1 deep in the no-crossing regime.
pub fn adiabatic_kappa(lambda1: f64, lambda2: f64) -> Kappa {
    use std::f64::consts::PI;
    assert!(
        lambda1.is_finite() && lambda2.is_finite(),
        "adiabatic_kappa: lambdas must be finite, got ({lambda1}, {lambda2})"
    );
    let l1 = lambda1.abs();
    let l2 = lambda2.abs();
    let ln_d = ln_denom(l1, l2);
    let value = if l1 > l2 {
        1.0 - (ln_cosh(2.0 * PI * l2) - ln_d).exp()
    } else {
        (ln_cosh(2.0 * PI * l1) - ln_d).exp()
    };
    Kappa(value.clamp(0.0, 1.0))
}

/// Flat adiabatic filter: stay probability 1 at n = 0, kappa everywhere else.
pub fn adiabatic_filter(kappa: Kappa, nmax: usize) -> FilterTable {
    let mut p_plus = vec![kappa.value(); nmax + 1];
    p_plus[0] = 1.0;
    FilterTable {
        p_plus,
        provenance: Provenance::AdiabaticKappa,
    }
}

/// Resonant filter (no detuning): p_plus[n] = cos^2(pi eta sqrt(n)).
pub fn resonant_filter(eta: f64, nmax: usize) -> FilterTable {
    use std::f64::consts::PI;
    assert!(
        eta >= 0.0 && eta.is_finite(),
        "resonant_filter: eta must be finite and >= 0, got {eta}"
    );
    let p_plus = (0..=nmax)
        .map(|n| (PI * eta * (n as f64).sqrt()).cos().powi(2))
        .collect();
    FilterTable {
        p_plus,
        provenance: Provenance::Resonant,
    }
}

/// Tabulates the propagator over manifolds 0..nmax. Row n holds the stay
/// probability of the given case (|a_plus|^2 for case a, |a_minus|^2 for
/// case b); by unitarity the two coincide, which the tests verify.
pub fn numeric_filter(
    params: &DKParams,
    case: AtomCase,
    nmax: usize,
    window: f64,
    tol: f64,
) -> Result<FilterTable> {
    let mut p_plus = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let (pp, pm) = dynamics::transition_probabilities(params, n, case, window, tol)?;
        p_plus.push(match case {
            AtomCase::A => pp,
            AtomCase::B => pm,
        });
    }
    FilterTable::from_p_plus(p_plus, Provenance::Numeric)
}
