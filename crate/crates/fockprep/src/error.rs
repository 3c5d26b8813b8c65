use thiserror::Error;

/// Unified error type for all simulation modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received parameters outside its domain.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Coherent-state truncation left too much tail mass at the requested
    /// cutoff; `required_nmax` is the smallest cutoff that would satisfy the
    /// requested tail bound.
    #[error(
        "truncation at nmax = {nmax} leaves tail mass {tail_mass:.3e} >= {tail_epsilon:.3e}; \
         nmax = {required_nmax} suffices"
    )]
    Truncation {
        nmax: usize,
        tail_mass: f64,
        tail_epsilon: f64,
        required_nmax: usize,
    },

    /// A filter table does not cover every manifold index an operation needs.
    #[error("filter table covers n = 0..={len_minus_one} but manifold index {needed} is required")]
    FilterTooShort { needed: usize, len_minus_one: usize },

    /// A recorded outcome has zero probability under the current distribution.
    #[error("outcome {outcome:+} for case {case} has probability {prob:.3e} (impossible)")]
    ImpossibleOutcome {
        case: char,
        outcome: i8,
        prob: f64,
    },

    /// A flip indicator not admissible for the atom's entry case.
    #[error("flip indicator {outcome:+} is not admissible for case {case}")]
    OutcomeNotAdmissible { case: char, outcome: i8 },

    /// Adaptive step-size control underflowed.
    #[error("integrator step underflow at t/T = {t:.6e} (step = {step:.3e})")]
    IntegratorStepUnderflow { t: f64, step: f64 },

    /// The propagated state lost more norm than the tolerance contract allows.
    #[error("integrator norm drift {drift:.3e} exceeds bound {bound:.3e}")]
    NormDrift { drift: f64, bound: f64 },

    /// Brute-force enumeration refused: 2^m branches is too many.
    #[error("brute-force enumeration of 2^{m} outcome sequences refused (limit m <= {max})")]
    TooManyAtoms { m: usize, max: usize },

    /// Parameters exceed the overflow-safe range of a closed form.
    #[error("parameter out of safe range: {0}")]
    Range(String),

    /// Configuration text failed to parse or validate.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
