//! Measurement-driven evolution of the photon-number distribution.
//!
//! Selective path: each recorded atomic outcome multiplies the distribution
//! by a filter factor and renormalizes; the pre-normalization mass is the
//! conditional probability of that outcome, and the product over a sequence
//! is the probability of observing the whole record. Nonselective path: the
//! outcome average closes on the diagonal and becomes a two-term recurrence
//! per atom.
//!
//! Index bookkeeping, fixed once here and used by every operation: filter
//! tables are indexed by the manifold photon quantum number. An atom of
//! case a meeting n field photons occupies manifold n + 1 (its state is
//! |n, +>), an atom of case b occupies manifold n (state |n, ->). With
//! f(j) the manifold-j stay probability, the four update rules for the
//! distribution index n are:
//!
//! ```text
//! case a, unflipped (k = 0):  w(n) = f(n+1)      * d(n)      photon count kept
//! case a, flipped  (k = -1):  w(n) = (1 - f(n))  * d(n-1)    photon emitted
//! case b, unflipped (k = 0):  w(n) = f(n)        * d(n)      photon count kept
//! case b, flipped  (k = +1):  w(n) = (1 - f(n+1))* d(n+1)    photon absorbed
//! ```
//!
//! Flip probabilities are shared between the cases by unitarity of the 2x2
//! manifold propagator, so one table serves both.

use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::FilterTable;
use crate::fockspace::{kahan_sum, PhotonDistribution};
use crate::seeding::sub_rng;

pub use crate::dynamics::AtomCase;

/// Enumeration bound for [`brute_force_ensemble`]: 2^m outcome sequences.
pub const MAX_BRUTE_FORCE_ATOMS: usize = 20;

/// One recorded flip indicator k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    /// Atom exits in the level it entered (k = 0).
    Stay,
    /// Atom flipped |-> to |+>, absorbing a photon (k = +1, case b only).
    FlipUp,
    /// Atom flipped |+> to |->, emitting a photon (k = -1, case a only).
    FlipDown,
}

impl Outcome {
    pub fn k(self) -> i64 {
        match self {
            Outcome::Stay => 0,
            Outcome::FlipUp => 1,
            Outcome::FlipDown => -1,
        }
    }

    pub fn from_k(k: i64) -> Result<Self> {
        match k {
            0 => Ok(Outcome::Stay),
            1 => Ok(Outcome::FlipUp),
            -1 => Ok(Outcome::FlipDown),
            _ => Err(Error::InvalidSpec(format!(
                "flip indicator must be -1, 0, or +1, got {k}"
            ))),
        }
    }

    pub fn admissible_for(self, case: AtomCase) -> bool {
        matches!(
            (case, self),
            (_, Outcome::Stay) | (AtomCase::A, Outcome::FlipDown) | (AtomCase::B, Outcome::FlipUp)
        )
    }
}

/// A recorded sequence of (entry case, flip indicator) pairs, one per atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSequence {
    entries: Vec<(AtomCase, Outcome)>,
}

impl OutcomeSequence {
    /// Validates that every flip indicator is admissible for its case.
    pub fn new(entries: Vec<(AtomCase, Outcome)>) -> Result<Self> {
        for &(case, outcome) in &entries {
            if !outcome.admissible_for(case) {
                return Err(Error::OutcomeNotAdmissible {
                    case: case.label(),
                    outcome: outcome.k() as i8,
                });
            }
        }
        Ok(Self { entries })
    }

    /// Sequence with every atom of one case and one outcome.
    pub fn uniform(case: AtomCase, outcome: Outcome, m: usize) -> Result<Self> {
        Self::new(vec![(case, outcome); m])
    }

    pub fn entries(&self) -> &[(AtomCase, Outcome)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Net flip count nu = sum of k_j; the field photon number shifts by -nu.
    pub fn nu(&self) -> i64 {
        self.entries.iter().map(|&(_, o)| o.k()).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct OutcomeSequenceWire {
    cases: Vec<AtomCase>,
    k: Vec<i64>,
}

impl Serialize for OutcomeSequence {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        OutcomeSequenceWire {
            cases: self.entries.iter().map(|&(c, _)| c).collect(),
            k: self.entries.iter().map(|&(_, o)| o.k()).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for OutcomeSequence {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = OutcomeSequenceWire::deserialize(de)?;
        if wire.cases.len() != wire.k.len() {
            return Err(D::Error::custom("cases and k must have equal length"));
        }
        let entries = wire
            .cases
            .into_iter()
            .zip(wire.k)
            .map(|(c, k)| Ok((c, Outcome::from_k(k).map_err(D::Error::custom)?)))
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        OutcomeSequence::new(entries).map_err(D::Error::custom)
    }
}

/// One sampled selective-measurement record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub sequence: OutcomeSequence,
    /// Probability of observing this record: the product of per-step
    /// conditional probabilities, equal to the normalization constant of the
    /// conditional distribution.
    pub probability: f64,
    #[serde(rename = "final")]
    pub final_dist: PhotonDistribution,
}

fn require_coverage(f: &FilterTable, needed: usize) -> Result<()> {
    if f.nmax() < needed {
        return Err(Error::FilterTooShort {
            needed,
            len_minus_one: f.nmax(),
        });
    }
    Ok(())
}

/// Highest manifold index an operation touches for this distribution.
fn manifold_bound(d: &PhotonDistribution, case: AtomCase) -> usize {
    match case {
        AtomCase::A => d.nmax() + 1,
        AtomCase::B => d.nmax(),
    }
}

/// Probability of detecting the atom in |+> / |-> after one crossing.
pub fn detection_probability(
    d: &PhotonDistribution,
    f: &FilterTable,
    case: AtomCase,
) -> Result<(f64, f64)> {
    require_coverage(f, manifold_bound(d, case))?;
    match case {
        AtomCase::A => {
            let stay = kahan_sum(
                d.probs()
                    .iter()
                    .enumerate()
                    .map(|(n, &p)| f.p_plus(n + 1) * p),
            )
            .clamp(0.0, 1.0);
            Ok((stay, 1.0 - stay))
        }
        AtomCase::B => {
            let stay = kahan_sum(d.probs().iter().enumerate().map(|(n, &p)| f.p_plus(n) * p))
                .clamp(0.0, 1.0);
            Ok((1.0 - stay, stay))
        }
    }
}

/// Collapses the distribution on one recorded outcome.
///
/// Returns the renormalized conditional distribution and the pre-
/// normalization mass, which is the conditional probability of the outcome.
pub fn apply_selective(
    d: &PhotonDistribution,
    f: &FilterTable,
    case: AtomCase,
    outcome: Outcome,
) -> Result<(PhotonDistribution, f64)> {
    if !outcome.admissible_for(case) {
        return Err(Error::OutcomeNotAdmissible {
            case: case.label(),
            outcome: outcome.k() as i8,
        });
    }
    require_coverage(f, manifold_bound(d, case))?;

    let p = d.probs();
    let weights: Vec<f64> = match (case, outcome) {
        (AtomCase::A, Outcome::Stay) => p
            .iter()
            .enumerate()
            .map(|(n, &x)| f.p_plus(n + 1) * x)
            .collect(),
        (AtomCase::A, Outcome::FlipDown) => {
            // Photon emitted: support shifts up one slot.
            let mut w = Vec::with_capacity(p.len() + 1);
            w.push(0.0);
            w.extend(p.iter().enumerate().map(|(n, &x)| f.p_minus(n + 1) * x));
            w
        }
        (AtomCase::B, Outcome::Stay) => p
            .iter()
            .enumerate()
            .map(|(n, &x)| f.p_plus(n) * x)
            .collect(),
        (AtomCase::B, Outcome::FlipUp) => {
            // Photon absorbed: support shifts down one slot.
            if p.len() == 1 {
                vec![0.0]
            } else {
                (0..p.len() - 1)
                    .map(|n| f.p_minus(n + 1) * p[n + 1])
                    .collect()
            }
        }
        // Rejected by the admissibility check above.
        (AtomCase::A, Outcome::FlipUp) | (AtomCase::B, Outcome::FlipDown) => unreachable!(),
    };

    let prob = kahan_sum(weights.iter().copied());
    if prob < 1e-300 {
        return Err(Error::ImpossibleOutcome {
            case: case.label(),
            outcome: outcome.k() as i8,
            prob,
        });
    }
    let next = PhotonDistribution::from_probs(weights)?;
    Ok((next, prob.min(1.0)))
}

/// Probability of observing a whole outcome record, starting from `d0`, with
/// per-atom filter tables. Returns 0 for impossible records.
pub fn sequence_probability(
    d0: &PhotonDistribution,
    filters: &[&FilterTable],
    seq: &OutcomeSequence,
) -> Result<f64> {
    if filters.len() != seq.len() {
        return Err(Error::InvalidSpec(format!(
            "{} filters for {} outcomes",
            filters.len(),
            seq.len()
        )));
    }
    let mut d = d0.clone();
    let mut prob = 1.0;
    for (&(case, outcome), f) in seq.entries().iter().zip(filters) {
        match apply_selective(&d, f, case, outcome) {
            Ok((next, p)) => {
                d = next;
                prob *= p;
            }
            Err(Error::ImpossibleOutcome { .. }) => return Ok(0.0),
            Err(e) => return Err(e),
        }
    }
    Ok(prob)
}

/// Samples `count` selective-measurement records, atom by atom, each from
/// its own counter-derived RNG stream so results are reproducible and
/// independent of evaluation order.
pub fn sample_trajectories(
    d0: &PhotonDistribution,
    filters: &[&FilterTable],
    cases: &[AtomCase],
    count: usize,
    seed: u64,
) -> Result<Vec<Trajectory>> {
    use rand::Rng;
    if filters.len() != cases.len() {
        return Err(Error::InvalidSpec(format!(
            "{} filters for {} atom cases",
            filters.len(),
            cases.len()
        )));
    }
    if count == 0 {
        return Err(Error::InvalidSpec("count must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = sub_rng(seed, i as u64, 0);
        let mut d = d0.clone();
        let mut entries = Vec::with_capacity(cases.len());
        let mut prob = 1.0;
        for (&case, f) in cases.iter().zip(filters) {
            let (p_plus_out, _) = detection_probability(&d, f, case)?;
            let stay_prob = match case {
                AtomCase::A => p_plus_out,
                AtomCase::B => 1.0 - p_plus_out,
            };
            let outcome = if rng.random::<f64>() < stay_prob {
                Outcome::Stay
            } else {
                match case {
                    AtomCase::A => Outcome::FlipDown,
                    AtomCase::B => Outcome::FlipUp,
                }
            };
            let (next, p) = apply_selective(&d, f, case, outcome)?;
            d = next;
            prob *= p;
            entries.push((case, outcome));
        }
        out.push(Trajectory {
            sequence: OutcomeSequence::new(entries)?,
            probability: prob,
            final_dist: d,
        });
    }
    Ok(out)
}

/// One unrecorded atom: averages the two admissible outcomes. Exactly
/// normalization-preserving because each manifold's stay and flip
/// probabilities sum to 1. For case b conservation additionally relies on
/// the physical table property f(0) = 1 (a ground-state atom meeting an
/// empty cavity cannot flip); every built-in table constructor guarantees
/// it.
///
/// For case a the truncation bound grows by one slot when the top entry
/// actually sends mass up; a trailing exact zero is trimmed away.
pub fn ensemble_step(
    d: &PhotonDistribution,
    f: &FilterTable,
    case: AtomCase,
) -> Result<PhotonDistribution> {
    require_coverage(f, manifold_bound(d, case))?;
    let p = d.probs();
    let nmax = d.nmax();
    let probs = match case {
        AtomCase::A => {
            let mut new = Vec::with_capacity(nmax + 2);
            for n in 0..=nmax {
                let stay = f.p_plus(n + 1) * p[n];
                let heat = if n > 0 { f.p_minus(n) * p[n - 1] } else { 0.0 };
                new.push(stay + heat);
            }
            let top = f.p_minus(nmax + 1) * p[nmax];
            if top != 0.0 {
                new.push(top);
            }
            new
        }
        AtomCase::B => {
            let mut new = Vec::with_capacity(nmax + 1);
            for n in 0..=nmax {
                let stay = f.p_plus(n) * p[n];
                let cool = if n < nmax {
                    f.p_minus(n + 1) * p[n + 1]
                } else {
                    0.0
                };
                new.push(stay + cool);
            }
            new
        }
    };
    // Deliberately NOT renormalized: conservation is an algebraic identity
    // of the recurrence and the tests watch for drift.
    Ok(PhotonDistribution::from_raw_unchecked(probs))
}

/// Iterates [`ensemble_step`] m times, retaining the full history
/// (m + 1 distributions).
pub fn ensemble_run(
    d0: &PhotonDistribution,
    f: &FilterTable,
    case: AtomCase,
    m: usize,
) -> Result<Vec<PhotonDistribution>> {
    let mut history = Vec::with_capacity(m + 1);
    history.push(d0.clone());
    for _ in 0..m {
        let next = ensemble_step(history.last().unwrap(), f, case)?;
        history.push(next);
    }
    Ok(history)
}

/// Ensemble average computed the expensive way: enumerate all 2^m outcome
/// records, weight each conditional distribution by its record probability,
/// and sum. This is the oracle for [`ensemble_run`].
pub fn brute_force_ensemble(
    d0: &PhotonDistribution,
    f: &FilterTable,
    case: AtomCase,
    m: usize,
) -> Result<PhotonDistribution> {
    if m > MAX_BRUTE_FORCE_ATOMS {
        return Err(Error::TooManyAtoms {
            m,
            max: MAX_BRUTE_FORCE_ATOMS,
        });
    }
    let mut acc = vec![0.0; d0.nmax() + m + 2];
    let outcomes = match case {
        AtomCase::A => [Outcome::Stay, Outcome::FlipDown],
        AtomCase::B => [Outcome::Stay, Outcome::FlipUp],
    };

    fn descend(
        d: &PhotonDistribution,
        f: &FilterTable,
        case: AtomCase,
        outcomes: [Outcome; 2],
        weight: f64,
        depth: usize,
        acc: &mut [f64],
    ) -> Result<()> {
        if depth == 0 {
            for (n, &p) in d.probs().iter().enumerate() {
                acc[n] += weight * p;
            }
            return Ok(());
        }
        for outcome in outcomes {
            match apply_selective(d, f, case, outcome) {
                Ok((next, prob)) => {
                    descend(&next, f, case, outcomes, weight * prob, depth - 1, acc)?;
                }
                // Impossible branches carry zero weight.
                Err(Error::ImpossibleOutcome { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    descend(d0, f, case, outcomes, 1.0, m, &mut acc)?;
    while acc.len() > 1 && *acc.last().unwrap() == 0.0 {
        acc.pop();
    }
    PhotonDistribution::from_probs(acc)
}

/// Closed-form nonselective distribution after m adiabatic case-a atoms on
/// vacuum: binomial over n = 0..m with success probability (1 - kappa) per
/// atom, variance m kappa (1 - kappa).
pub fn binomial_closed_form(kappa: crate::filters::Kappa, m: usize) -> PhotonDistribution {
    let k = kappa.value();
    let mut probs = vec![0.0; m + 1];
    if k == 0.0 {
        probs[m] = 1.0;
    } else if k == 1.0 {
        probs[0] = 1.0;
    } else if m <= 60 {
        // Direct evaluation; C(60, 30) ~ 1.2e17 is still exact to ~1 ulp.
        let mut binom = 1.0;
        for (n, slot) in probs.iter_mut().enumerate() {
            if n > 0 {
                binom *= (m - n + 1) as f64 / n as f64;
            }
            *slot = binom * k.powi((m - n) as i32) * (1.0 - k).powi(n as i32);
        }
    } else {
        // Log space avoids overflow of the coefficient and underflow of the
        // powers at large m.
        let (ln_k, ln_1mk) = (k.ln(), (1.0 - k).ln());
        let mut ln_binom = 0.0;
        for (n, slot) in probs.iter_mut().enumerate() {
            if n > 0 {
                ln_binom += ((m - n + 1) as f64 / n as f64).ln();
            }
            *slot = (ln_binom + (m - n) as f64 * ln_k + n as f64 * ln_1mk).exp();
        }
    }
    PhotonDistribution::from_probs(probs).expect("binomial weights are valid probabilities")
}
