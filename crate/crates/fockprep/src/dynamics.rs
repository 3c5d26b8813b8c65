//! Numerical propagator for one excitation manifold of the atom-field
//! problem, with the tanh detuning sweep and sech coupling pulse.
//!
//! Inside manifold n the Schroedinger equation for the amplitudes
//! (a_plus, a_minus) on |n-1, +> and |n, -> reads, in units of the sweep
//! time T (tau = t/T):
//!
//! ```text
//! i d/dtau [a+]   [ L1 + L2 tanh(tau)    eta sqrt(n) sech(tau) ] [a+]
//!          [  ] = [                                            ] [  ]
//!          [a-]   [ eta sqrt(n) sech(tau)  -(L1 + L2 tanh(tau))] [a-]
//! ```
//!
//! This module integrates that equation with an adaptive embedded
//! Runge-Kutta 5(4) scheme. It exists as the independent oracle for the
//! closed forms in [`crate::filters`]: the two routes never share code.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

/// Default local-error tolerance for the adaptive integrator.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default half-width of the integration window in units of T. The pulse
/// envelopes saturate exponentially, so tau in [-20, 20] captures the full
/// transition for every parameter range used here.
pub const DEFAULT_WINDOW: f64 = 20.0;

/// Pulse parameters: detuning sweep dw(t)/2 = e_bar + e0 tanh(t/T), coupling
/// g(t) = g0 sech(t/T). All physics depends only on the dimensionless
/// products lambda1 = e_bar*T, lambda2 = e0*T, eta = g0*T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DKParams {
    /// Detuning offset (frequency units).
    pub e_bar: f64,
    /// Detuning sweep amplitude (frequency units).
    pub e0: f64,
    /// Coupling amplitude (frequency units), >= 0.
    pub g0: f64,
    /// Sweep time scale T (time units), > 0.
    pub t_scale: f64,
}

impl DKParams {
    pub fn new(e_bar: f64, e0: f64, g0: f64, t_scale: f64) -> Result<Self> {
        if !(t_scale > 0.0) || !t_scale.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "t_scale must be finite and > 0, got {t_scale}"
            )));
        }
        if g0 < 0.0 || !g0.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "g0 must be finite and >= 0, got {g0}"
            )));
        }
        if !e_bar.is_finite() || !e0.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "detuning parameters must be finite, got e_bar = {e_bar}, e0 = {e0}"
            )));
        }
        Ok(Self {
            e_bar,
            e0,
            g0,
            t_scale,
        })
    }

    /// Builds params directly from the dimensionless triple (T = 1).
    pub fn from_dimensionless(lambda1: f64, lambda2: f64, eta: f64) -> Result<Self> {
        Self::new(lambda1, lambda2, eta, 1.0)
    }

    pub fn lambda1(&self) -> f64 {
        self.e_bar * self.t_scale
    }

    pub fn lambda2(&self) -> f64 {
        self.e0 * self.t_scale
    }

    pub fn eta(&self) -> f64 {
        self.g0 * self.t_scale
    }
}

/// Which level the atom occupies when it enters the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomCase {
    /// Upper level |+>; in manifold n the initial amplitude sits on |n-1, +>.
    #[serde(rename = "a")]
    A,
    /// Lower level |->; the initial amplitude sits on |n, ->.
    #[serde(rename = "b")]
    B,
}

impl AtomCase {
    pub fn label(self) -> char {
        match self {
            AtomCase::A => 'a',
            AtomCase::B => 'b',
        }
    }
}

impl std::fmt::Display for AtomCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Final manifold amplitudes after one cavity crossing. Only the moduli are
/// contractual; the global phase depends on window and step sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelAmplitudes {
    pub a_plus: C64,
    pub a_minus: C64,
}

impl TwoLevelAmplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.a_plus.norm_sqr() + self.a_minus.norm_sqr()
    }
}

/// The controller targets this fraction of the requested tolerance per step
/// so that the ACCUMULATED norm drift over ~1e4..1e5 steps stays within the
/// 10*tol contract of [`propagate`] (measured headroom ~14x at the corner
/// |L1| = |L2| = eta = 10, n = 100).
const ERR_SAFETY: f64 = 1e-3;

const MAX_STEP_GROWTH: f64 = 5.0;
const MIN_STEP_SHRINK: f64 = 0.2;

#[inline]
fn rhs(tau: f64, y: [C64; 2], l1: f64, l2: f64, gn: f64) -> [C64; 2] {
    let delta = l1 + l2 * tau.tanh();
    let c = gn / tau.cosh();
    let i = C64::new(0.0, 1.0);
    [
        -i * (delta * y[0] + c * y[1]),
        -i * (c * y[0] - delta * y[1]),
    ]
}

/// Propagates the manifold-n amplitudes from tau = -window to +window.
///
/// `case` fixes the initial condition (A: a_plus = 1, B: a_minus = 1).
/// Requires n >= 1: the n = 0 manifold is one-dimensional and has no
/// dynamics beyond a phase. Local error is kept at or below `tol` per step
/// and the final norm is verified to 10*tol.
pub fn propagate(
    params: &DKParams,
    n: usize,
    case: AtomCase,
    window: f64,
    tol: f64,
) -> Result<TwoLevelAmplitudes> {
    if n == 0 {
        return Err(Error::InvalidSpec(
            "propagate needs n >= 1; the n = 0 manifold is one-dimensional".into(),
        ));
    }
    if !(window >= 10.0) {
        return Err(Error::InvalidSpec(format!(
            "window must be >= 10 (in units of T), got {window}"
        )));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "tol must be finite and > 0, got {tol}"
        )));
    }

    let l1 = params.lambda1();
    let l2 = params.lambda2();
    let gn = params.eta() * (n as f64).sqrt();

    let y0 = match case {
        AtomCase::A => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        AtomCase::B => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    };

    let y = integrate_dp54(y0, -window, window, tol * ERR_SAFETY, |tau, y| {
        rhs(tau, y, l1, l2, gn)
    })?;

    let amps = TwoLevelAmplitudes {
        a_plus: y[0],
        a_minus: y[1],
    };
    let drift = (amps.norm_sqr() - 1.0).abs();
    let bound = 10.0 * tol;
    if drift > bound {
        return Err(Error::NormDrift { drift, bound });
    }
    Ok(amps)
}

/// Convenience wrapper returning (|a_plus|^2, |a_minus|^2), clamped to
/// [0, 1].
///
/// The n = 0 manifold is handled by convention without integration: the atom
/// cannot change level when there is no dynamics, so case A gives (1, 0) and
/// case B gives (0, 1).
pub fn transition_probabilities(
    params: &DKParams,
    n: usize,
    case: AtomCase,
    window: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Ok(match case {
            AtomCase::A => (1.0, 0.0),
            AtomCase::B => (0.0, 1.0),
        });
    }
    let amps = propagate(params, n, case, window, tol)?;
    let p_plus = clamp_probability(amps.a_plus.norm_sqr())?;
    let p_minus = clamp_probability(amps.a_minus.norm_sqr())?;
    Ok((p_plus, p_minus))
}

/// Clamps round-off escape from [0, 1]; violations beyond 1e-12 are real
/// numerical failures, not round-off.
pub(crate) fn clamp_probability(p: f64) -> Result<f64> {
    if !p.is_finite() || !(-1e-12..=1.0 + 1e-9).contains(&p) {
        return Err(Error::Range(format!("probability {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Dormand-Prince 5(4) with FSAL and a standard I-controller. `tol` is used
/// as both absolute and relative weight in the error norm.
fn integrate_dp54<F>(y0: [C64; 2], t0: f64, t1: f64, tol: f64, f: F) -> Result<[C64; 2]>
where
    F: Fn(f64, [C64; 2]) -> [C64; 2],
{
    // Butcher tableau.
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A2: [f64; 1] = [1.0 / 5.0];
    const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
    const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
    const A5: [f64; 4] = [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
    ];
    const A6: [f64; 5] = [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ];
    // Fifth-order weights (also the last stage row: FSAL).
    const B: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    // (5th - 4th)-order error weights.
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];

    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut h = 1e-3_f64;
    let mut k1 = f(t, y);
    let min_step = span * 1e-14;

    fn lin(y: [C64; 2], h: f64, terms: &[(f64, [C64; 2])]) -> [C64; 2] {
        let mut out = y;
        for &(c, k) in terms {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
        out
    }

    while t < t1 {
        if h < min_step {
            return Err(Error::IntegratorStepUnderflow { t, step: h });
        }
        if t + h > t1 {
            h = t1 - t;
        }

        let k2 = f(t + C[0] * h, lin(y, h, &[(A2[0], k1)]));
        let k3 = f(t + C[1] * h, lin(y, h, &[(A3[0], k1), (A3[1], k2)]));
        let k4 = f(t + C[2] * h, lin(y, h, &[(A4[0], k1), (A4[1], k2), (A4[2], k3)]));
        let k5 = f(
            t + C[3] * h,
            lin(y, h, &[(A5[0], k1), (A5[1], k2), (A5[2], k3), (A5[3], k4)]),
        );
        let k6 = f(
            t + C[4] * h,
            lin(
                y,
                h,
                &[
                    (A6[0], k1),
                    (A6[1], k2),
                    (A6[2], k3),
                    (A6[3], k4),
                    (A6[4], k5),
                ],
            ),
        );
        let y_new = lin(
            y,
            h,
            &[(B[0], k1), (B[2], k3), (B[3], k4), (B[4], k5), (B[5], k6)],
        );
        let k7 = f(t + h, y_new);

        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err = [C64::new(0.0, 0.0); 2];
        for (w, k) in E.iter().zip(ks.iter()) {
            err[0] += h * w * k[0];
            err[1] += h * w * k[1];
        }

        // RMS error over the four real components, weighted by tol*(1+|y|).
        let mut acc = 0.0;
        for i in 0..2 {
            let scale = tol * (1.0 + y[i].norm().max(y_new[i].norm()));
            acc += (err[i].re / scale).powi(2) + (err[i].im / scale).powi(2);
        }
        let err_norm = (acc / 4.0).sqrt();

        if err_norm <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7;
        }
        let factor = if err_norm > 0.0 {
            (0.9 * err_norm.powf(-0.2)).clamp(MIN_STEP_SHRINK, MAX_STEP_GROWTH)
        } else {
            MAX_STEP_GROWTH
        };
        h *= factor;
    }
    Ok(y)
}
