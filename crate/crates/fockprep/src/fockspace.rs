//! Photon-number distributions, initial field states, and their moments.
//!
//! Everything downstream works on the diagonal of the field density matrix:
//! a dense probability vector over photon number n = 0..nmax. Phases never
//! enter the measurement recurrences, so no complex amplitudes are stored.
//! The truncation bound nmax is grown on demand by heating operations, which
//! add at most one photon per atom.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sum with Neumaier compensation; used everywhere a probability vector is
/// reduced so that normalization statements hold to ~1e-15 regardless of
/// length or summation order.
pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Probability distribution over photon number n = 0..nmax.
///
/// Entries are finite and nonnegative. Every public constructor and every
/// evolution operation returns a vector summing to 1 within 1e-12; the one
/// documented exception is [`PhotonDistribution::shift`], whose result may
/// have lost boundary mass and carries its own normalization.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PhotonDistribution {
    probs: Vec<f64>,
}

impl PhotonDistribution {
    /// Vacuum state: all mass at n = 0.
    pub fn vacuum(nmax: usize) -> Self {
        let mut probs = vec![0.0; nmax + 1];
        probs[0] = 1.0;
        Self { probs }
    }

    /// Fock state |n>: all mass at one photon number.
    pub fn fock(n: usize, nmax: usize) -> Result<Self> {
        if n > nmax {
            return Err(Error::InvalidSpec(format!(
                "fock({n}) does not fit below truncation nmax = {nmax}"
            )));
        }
        let mut probs = vec![0.0; nmax + 1];
        probs[n] = 1.0;
        Ok(Self { probs })
    }

    /// Coherent state with mean photon number `nbar`: Poissonian statistics
    /// e^(-nbar) nbar^n / n!, renormalized over 0..nmax.
    ///
    /// Errors if the neglected tail mass is >= `tail_epsilon`, reporting the
    /// smallest nmax that would suffice.
    pub fn coherent(nbar: f64, nmax: usize, tail_epsilon: f64) -> Result<Self> {
        if !nbar.is_finite() || nbar < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "coherent state needs finite nbar >= 0, got {nbar}"
            )));
        }
        if !(tail_epsilon > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "tail_epsilon must be > 0, got {tail_epsilon}"
            )));
        }
        if nbar == 0.0 {
            return Ok(Self::vacuum(nmax));
        }
        // Log-space Poisson weights; ln n! accumulated term by term.
        let ln_nbar = nbar.ln();
        let mut ln_fact = 0.0;
        let mut probs = Vec::with_capacity(nmax + 1);
        for n in 0..=nmax {
            if n > 0 {
                ln_fact += (n as f64).ln();
            }
            probs.push((-nbar + n as f64 * ln_nbar - ln_fact).exp());
        }
        let covered = kahan_sum(probs.iter().copied());
        let tail_mass = (1.0 - covered).max(0.0);
        if tail_mass >= tail_epsilon {
            // Extend the sum until the tail bound is met to name a cutoff
            // that works.
            let mut running = covered;
            let mut n = nmax;
            let mut ln_f = ln_fact;
            while 1.0 - running >= tail_epsilon && n < nmax + 100_000 {
                n += 1;
                ln_f += (n as f64).ln();
                running += (-nbar + n as f64 * ln_nbar - ln_f).exp();
            }
            return Err(Error::Truncation {
                nmax,
                tail_mass,
                tail_epsilon,
                required_nmax: n,
            });
        }
        for p in &mut probs {
            *p /= covered;
        }
        Ok(Self { probs })
    }

    /// Builds a distribution from raw weights: validates finiteness and
    /// nonnegativity, then normalizes.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidSpec(
                "distribution needs at least the n = 0 entry".into(),
            ));
        }
        for (n, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "probability at n = {n} is {p}; entries must be finite and >= 0"
                )));
            }
        }
        let mut d = Self { probs };
        d.normalize()?;
        Ok(d)
    }

    /// Wraps weights the caller already knows to be valid and (near-)
    /// normalized, without rescaling. Used by the nonselective recurrence,
    /// whose normalization is an identity the tests watch rather than a
    /// constraint to enforce.
    pub(crate) fn from_raw_unchecked(probs: Vec<f64>) -> Self {
        debug_assert!(!probs.is_empty());
        debug_assert!(probs.iter().all(|p| p.is_finite() && *p >= 0.0));
        Self { probs }
    }

    /// Rescales so entries sum to 1. Errors on zero total mass.
    pub(crate) fn normalize(&mut self) -> Result<()> {
        let total = self.mass();
        if total <= 0.0 {
            return Err(Error::InvalidSpec(
                "cannot normalize a distribution with zero mass".into(),
            ));
        }
        for p in &mut self.probs {
            *p /= total;
        }
        Ok(())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn nmax(&self) -> usize {
        self.probs.len() - 1
    }

    /// Probability at photon number n; 0 beyond the truncation bound.
    pub fn prob(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    /// Total mass. 1 for normalized distributions; less after a lossy shift.
    pub fn mass(&self) -> f64 {
        kahan_sum(self.probs.iter().copied())
    }

    /// Mean photon number, sum of n*P(n).
    pub fn mean_photon(&self) -> f64 {
        kahan_sum(self.probs.iter().enumerate().map(|(n, &p)| n as f64 * p))
    }

    /// Photon-number variance, sum of n^2 P(n) minus the squared mean.
    /// Tiny negative round-off is clamped to 0.
    pub fn variance(&self) -> f64 {
        let mean = self.mean_photon();
        let second = kahan_sum(
            self.probs
                .iter()
                .enumerate()
                .map(|(n, &p)| (n as f64) * (n as f64) * p),
        );
        (second - mean * mean).max(0.0)
    }

    /// Index shift: result[n] = self[n + nu], out-of-range entries read as 0.
    ///
    /// NOT renormalized: shifting mass below n = 0 (nu > 0 on a distribution
    /// with low-n support) drops it, and the caller detects the loss through
    /// [`PhotonDistribution::mass`].
    pub fn shift(&self, nu: i64) -> Self {
        let len = self.probs.len() as i64;
        let probs = (0..len)
            .map(|n| {
                let src = n + nu;
                if (0..len).contains(&src) {
                    self.probs[src as usize]
                } else {
                    0.0
                }
            })
            .collect();
        Self { probs }
    }

    /// CSV rows "n,probability", one per photon number, with header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,probability\n");
        for (n, &p) in self.probs.iter().enumerate() {
            out.push_str(&format!("{n},{}\n", crate::export::fmt_f64(p)));
        }
        out
    }
}

impl<'de> Deserialize<'de> for PhotonDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(de)?;
        if probs.is_empty() {
            return Err(serde::de::Error::custom(
                "distribution needs at least the n = 0 entry",
            ));
        }
        for (n, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(serde::de::Error::custom(format!(
                    "probability at n = {n} is {p}; entries must be finite and >= 0"
                )));
            }
        }
        Ok(Self { probs })
    }
}

/// Initial field state for an experiment. The JSON form is tagged by "kind":
/// `{"kind":"vacuum"}`, `{"kind":"fock","n":3}`,
/// `{"kind":"coherent","nbar":47.0}` (optional `"tail_epsilon"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialFieldSpec {
    Vacuum,
    Fock { n: usize },
    Coherent {
        nbar: f64,
        #[serde(default = "default_tail_epsilon")]
        tail_epsilon: f64,
    },
}

pub const DEFAULT_TAIL_EPSILON: f64 = 1e-12;

fn default_tail_epsilon() -> f64 {
    DEFAULT_TAIL_EPSILON
}

impl InitialFieldSpec {
    pub fn coherent(nbar: f64) -> Self {
        Self::Coherent {
            nbar,
            tail_epsilon: DEFAULT_TAIL_EPSILON,
        }
    }

    /// Default truncation bound: generous for coherent states (the Poisson
    /// tail at nbar + 10 sqrt(nbar) + 20 is far below any tail_epsilon in
    /// practical use), minimal for vacuum/Fock (heating operations grow the
    /// vector on demand).
    pub fn default_nmax(&self) -> usize {
        match self {
            Self::Vacuum => 0,
            Self::Fock { n } => *n,
            Self::Coherent { nbar, .. } => (nbar + 10.0 * nbar.sqrt() + 20.0).ceil() as usize,
        }
    }
}

/// Realizes an initial field spec as a distribution truncated at `nmax`.
pub fn make_distribution(spec: &InitialFieldSpec, nmax: usize) -> Result<PhotonDistribution> {
    match spec {
        InitialFieldSpec::Vacuum => Ok(PhotonDistribution::vacuum(nmax)),
        InitialFieldSpec::Fock { n } => PhotonDistribution::fock(*n, nmax),
        InitialFieldSpec::Coherent { nbar, tail_epsilon } => {
            PhotonDistribution::coherent(*nbar, nmax, *tail_epsilon)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Poisson pmf at n = 4, nbar = 4: e^-4 4^4/4!, evaluated at 50-digit
    // precision.
    const POISSON_4_AT_4: f64 = 0.1953668148131645898;

    #[test]
    fn vacuum_is_delta_at_zero() {
        let d = PhotonDistribution::vacuum(5);
        assert_eq!(d.probs(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn fock_is_delta() {
        let d = PhotonDistribution::fock(3, 5).unwrap();
        assert_eq!(d.probs(), &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(d.mean_photon(), 3.0);
        assert_eq!(d.variance(), 0.0);
    }

    #[test]
    fn fock_above_nmax_rejected() {
        assert!(matches!(
            PhotonDistribution::fock(6, 5),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn coherent_matches_poisson_mass() {
        let d = PhotonDistribution::coherent(4.0, 30, 1e-12).unwrap();
        assert!((d.prob(4) - POISSON_4_AT_4).abs() < 1e-13);
        assert!((d.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_mean_near_nbar() {
        let d = PhotonDistribution::coherent(4.0, 40, 1e-12).unwrap();
        assert!((d.mean_photon() - 4.0).abs() < 1e-9);
        assert!((d.variance() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn coherent_truncation_error_names_sufficient_nmax() {
        let err = PhotonDistribution::coherent(47.0, 50, 1e-12).unwrap_err();
        match err {
            Error::Truncation { required_nmax, .. } => {
                assert!(required_nmax > 50);
                // The named cutoff must actually satisfy the bound.
                assert!(PhotonDistribution::coherent(47.0, required_nmax, 1e-12).is_ok());
                assert!(PhotonDistribution::coherent(47.0, required_nmax - 1, 1e-12).is_err());
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn default_nmax_covers_coherent_tail() {
        let spec = InitialFieldSpec::coherent(47.0);
        let nmax = spec.default_nmax();
        assert_eq!(nmax, 136);
        assert!(make_distribution(&spec, nmax).is_ok());
    }

    #[test]
    fn mean_of_vacuum_is_zero() {
        assert_eq!(PhotonDistribution::vacuum(8).mean_photon(), 0.0);
    }

    #[test]
    fn variance_of_three_point_distribution() {
        let d = PhotonDistribution::from_probs(vec![0.25, 0.5, 0.25]).unwrap();
        assert!((d.variance() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn shift_moves_fock_mass() {
        let d = PhotonDistribution::from_probs(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(d.shift(1).probs(), &[1.0, 0.0, 0.0]);
        let d0 = PhotonDistribution::from_probs(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(d0.shift(-1).probs(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn shift_signals_boundary_loss_through_mass() {
        let d = PhotonDistribution::from_probs(vec![0.5, 0.5, 0.0]).unwrap();
        let shifted = d.shift(1);
        assert_eq!(shifted.probs(), &[0.5, 0.0, 0.0]);
        assert!((shifted.mass() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn shift_round_trip_when_ground_empty() {
        let d = PhotonDistribution::from_probs(vec![0.0, 0.3, 0.7]).unwrap();
        assert_eq!(d.shift(1).shift(-1).probs(), d.probs());
    }

    #[test]
    fn json_round_trip() {
        let d = PhotonDistribution::coherent(2.0, 15, 1e-6).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.starts_with('['));
        let back: PhotonDistribution = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn json_rejects_negative_entries() {
        assert!(serde_json::from_str::<PhotonDistribution>("[0.5,-0.5,1.0]").is_err());
        assert!(serde_json::from_str::<PhotonDistribution>("[]").is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let d = PhotonDistribution::vacuum(1);
        let csv = d.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,probability");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,1"));
    }

    #[test]
    fn field_spec_json_defaults() {
        let spec: InitialFieldSpec =
            serde_json::from_str(r#"{"kind":"coherent","nbar":4.0}"#).unwrap();
        assert_eq!(spec, InitialFieldSpec::coherent(4.0));
        let spec: InitialFieldSpec = serde_json::from_str(r#"{"kind":"vacuum"}"#).unwrap();
        assert_eq!(spec, InitialFieldSpec::Vacuum);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn from_probs_normalizes(raw in proptest::collection::vec(0.0f64..1.0, 1..200)) {
                prop_assume!(raw.iter().sum::<f64>() > 1e-9);
                let d = PhotonDistribution::from_probs(raw).unwrap();
                prop_assert!((d.mass() - 1.0).abs() < 1e-12);
                prop_assert!(d.probs().iter().all(|&p| p >= 0.0 && p.is_finite()));
            }

            #[test]
            fn shift_up_then_down_restores(raw in proptest::collection::vec(0.0f64..1.0, 2..50)) {
                prop_assume!(raw.iter().sum::<f64>() > 1e-9);
                // Empty top entry so no mass falls off when shifting up.
                let mut raw = raw;
                raw.push(0.0);
                let d = PhotonDistribution::from_probs(raw).unwrap();
                let back = d.shift(-1).shift(1);
                for (a, b) in back.probs().iter().zip(d.probs()) {
                    prop_assert!((a - b).abs() < 1e-15);
                }
            }

            #[test]
            fn variance_nonnegative(raw in proptest::collection::vec(0.0f64..1.0, 1..100)) {
                prop_assume!(raw.iter().sum::<f64>() > 1e-9);
                let d = PhotonDistribution::from_probs(raw).unwrap();
                prop_assert!(d.variance() >= 0.0);
            }
        }
    }
}
