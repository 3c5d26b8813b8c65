//! Preparation of cavity-field Fock states by sending two-level atoms through
//! a high-Q cavity and measuring them afterwards.
//!
//! The interaction conserves the total excitation number, so the joint
//! atom-field dynamics splits into independent two-dimensional manifolds
//! spanned by |n-1, +> and |n, ->. Passing one atom through the cavity
//! multiplies the photon-number distribution by per-manifold transition
//! probabilities ("filter functions"), and repeated passages sculpt the
//! distribution: recorded (selective) outcomes collapse it, unrecorded
//! (nonselective) outcomes drive a closed recurrence on the diagonal.
//!
//! For a detuning sweep `dw(t)/2 = e_bar + e0*tanh(t/T)` with coupling pulse
//! `g(t) = g0*sech(t/T)` (the Demkov-Kunike model) the filter functions have
//! an exact closed form governed by three dimensionless numbers
//! `lambda1 = e_bar*T`, `lambda2 = e0*T`, `eta = g0*T`. Special regimes:
//! an adiabatic level crossing gives a constant filter `kappa`, resonance
//! gives `cos^2(pi*eta*sqrt(n))`, and integer `eta*sqrt(n'+1)` creates
//! trapping states that block probability flow past photon number `n'`.
//!
//! Module map:
//!
//! - [`fockspace`]: photon-number distributions and their moments.
//! - [`dynamics`]: adaptive Runge-Kutta propagator for one manifold; the
//!   independent numerical oracle for every closed form in [`filters`].
//! - [`filters`]: exact, adiabatic, resonant, and numerically tabulated
//!   filter functions.
//! - [`measurement`]: selective conditional evolution, trajectory sampling,
//!   the nonselective ensemble recurrence, brute-force outcome averaging,
//!   and the adiabatic binomial closed form.
//! - [`trapping`]: trapping-state arithmetic, velocity schedules, and the
//!   Gaussian interaction-time noise model.
//! - [`experiment`]: JSON experiment configs, bundled presets, and
//!   deterministic CSV/JSON export backing the `fockprep` binary.
//!
//! The `examples/` directory is the front door: each file is a runnable
//! demonstration of one capability (`cargo run --example fock_ladder`,
//! `--example coherent_trapping`, ...). The thin `fockprep` binary drives the
//! same library from JSON configs for scripted runs.
//!
//! ```
//! use fockprep::fockspace::PhotonDistribution;
//! use fockprep::filters::resonant_filter;
//! use fockprep::measurement::{ensemble_run, AtomCase};
//!
//! // Ten resonant atoms entering in the upper state, vacuum field: with
//! // eta = 1 the first trapping state is n' = 0, so nothing ever climbs.
//! let d0 = PhotonDistribution::vacuum(4);
//! let f = resonant_filter(1.0, 6);
//! let history = ensemble_run(&d0, &f, AtomCase::A, 10).unwrap();
//! assert!((history[10].probs()[0] - 1.0).abs() < 1e-12);
//! ```

// Negated comparisons like !(x > 0.0) are deliberate NaN guards, and frozen
// reference constants keep every digit their oracle printed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod dynamics;
mod error;
pub mod experiment;
pub mod export;
pub mod filters;
pub mod fockspace;
pub mod measurement;
pub mod seeding;
pub mod trapping;

pub use error::{Error, Result};
