//! Trapping-state arithmetic, per-atom velocity schedules, and the
//! velocity-noise model.
//!
//! A resonant filter traps photon number n' when sqrt(n'+1) eta = q for a
//! positive integer q: an excited atom meeting n' photons completes exactly
//! q full Rabi cycles and exits the way it came in, so the nonselective
//! recurrence cannot move mass past n'. The trap set partitions photon
//! numbers into disconnected blocks, and upward pumping piles mass onto the
//! top of each block, which is how a Fock state is prepared without state
//! reduction.
//!
//! Atom velocity sets the interaction time and hence eta, so a velocity
//! schedule is just a list of per-atom eta values. The q-incrementing
//! schedule keeps the same target n' trapped for every atom while raising q
//! by one per atom, which speeds up the pile-up; a relative Gaussian error
//! on the velocity becomes a multiplicative error on eta.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dynamics::AtomCase;
use crate::error::{Error, Result};
use crate::filters::resonant_filter;
use crate::fockspace::{kahan_sum, PhotonDistribution};
use crate::measurement::ensemble_step;
use crate::seeding::sub_rng;

/// Absolute tolerance for recognizing sqrt(n+1) eta as the integer q.
pub const TRAP_TOLERANCE: f64 = 1e-9;

/// Default "Fock state reached" probability threshold.
pub const DEFAULT_TARGET_THRESHOLD: f64 = 0.99;

/// A photon number n' trapped after exactly q Rabi cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrappingState {
    pub n_prime: usize,
    /// Rabi-cycle index, >= 1.
    pub q: u64,
}

impl TrappingState {
    /// The coupling that realizes this trap.
    pub fn eta(&self) -> f64 {
        self.q as f64 / ((self.n_prime + 1) as f64).sqrt()
    }
}

/// The coupling eta = q / sqrt(n'+1) that traps photon number n'.
pub fn eta_for_trap(n_prime: usize, q: u64) -> Result<f64> {
    if q == 0 {
        return Err(Error::InvalidSpec(
            "Rabi-cycle index q must be >= 1".into(),
        ));
    }
    Ok(TrappingState { n_prime, q }.eta())
}

/// All trapping states with n' <= nmax for a given coupling, sorted by n'.
/// Nonpositive or non-finite eta traps nothing.
pub fn trap_states(eta: f64, nmax: usize) -> Vec<TrappingState> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for n_prime in 0..=nmax {
        let x = ((n_prime + 1) as f64).sqrt() * eta;
        let q = x.round();
        if q >= 1.0 && (x - q).abs() < TRAP_TOLERANCE {
            out.push(TrappingState {
                n_prime,
                q: q as u64,
            });
        }
    }
    out
}

/// Contiguous inclusive ranges of photon numbers, each ending at a trapping
/// n' (plus a final partial block if nmax lies between traps). Their union
/// covers 0..=nmax and probability mass never crosses between them under
/// the matching resonant filter.
pub fn block_boundaries(eta: f64, nmax: usize) -> Vec<(usize, usize)> {
    let mut blocks = Vec::new();
    let mut start = 0usize;
    for trap in trap_states(eta, nmax) {
        blocks.push((start, trap.n_prime));
        start = trap.n_prime + 1;
    }
    if start <= nmax {
        blocks.push((start, nmax));
    }
    blocks
}

/// Per-atom coupling values, one per atom in passage order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule {
    etas: Vec<f64>,
}

impl Schedule {
    /// A custom schedule from an explicit eta list; all entries must be
    /// positive and finite.
    pub fn new(etas: Vec<f64>) -> Result<Self> {
        for (j, &eta) in etas.iter().enumerate() {
            if !(eta > 0.0) || !eta.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "schedule eta for atom {} must be > 0 and finite, got {eta}",
                    j + 1
                )));
            }
        }
        Ok(Self { etas })
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }
}

/// m atoms all at the coupling that traps (n', q).
pub fn make_schedule_fixed(n_prime: usize, q: u64, m: usize) -> Result<Schedule> {
    let eta = eta_for_trap(n_prime, q)?;
    Ok(Schedule {
        etas: vec![eta; m],
    })
}

/// m atoms that all trap the same n', with the cycle index raised by one
/// per atom: atom j (1-based) flies at eta = (q_start + j - 1)/sqrt(n'+1).
pub fn make_schedule_incrementing(n_prime: usize, q_start: u64, m: usize) -> Result<Schedule> {
    if q_start == 0 {
        return Err(Error::InvalidSpec(
            "Rabi-cycle index q_start must be >= 1".into(),
        ));
    }
    let etas = (0..m)
        .map(|j| TrappingState {
            n_prime,
            q: q_start + j as u64,
        }
        .eta())
        .collect();
    Ok(Schedule { etas })
}

/// Relative Gaussian velocity error: each atom's eta is multiplied by
/// (1 + sigma * xi) with xi a standard normal draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    relative_sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(relative_sigma: f64, seed: u64) -> Result<Self> {
        if !relative_sigma.is_finite() || !(0.0..1.0).contains(&relative_sigma) {
            return Err(Error::InvalidSpec(format!(
                "relative_sigma must lie in [0, 1), got {relative_sigma}"
            )));
        }
        Ok(Self {
            relative_sigma,
            seed,
        })
    }

    pub fn noiseless(seed: u64) -> Self {
        Self {
            relative_sigma: 0.0,
            seed,
        }
    }

    pub fn relative_sigma(&self) -> f64 {
        self.relative_sigma
    }

    pub fn is_noiseless(&self) -> bool {
        self.relative_sigma == 0.0
    }
}

/// Aggregated target-probability history of a schedule run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleOutcome {
    /// Mean of P_m(target) over realizations; index = atoms sent so far,
    /// length = schedule length + 1.
    pub mean_probability: Vec<f64>,
    /// Sample standard deviation per atom count (0 for one realization).
    pub stddev: Vec<f64>,
    pub realizations: usize,
    /// Number of negative effective-eta draws that had to be redrawn; at
    /// physically sensible sigma this stays 0, and a nonzero count is worth
    /// a warning upstream.
    pub resamples: u64,
}

impl ScheduleOutcome {
    /// First atom count at which the mean target probability reaches
    /// `threshold`.
    pub fn first_reaching(&self, threshold: f64) -> Option<usize> {
        self.mean_probability.iter().position(|&p| p >= threshold)
    }

    /// CSV rows "m,mean_probability,stddev", one per atom count.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,mean_probability,stddev\n");
        for (m, (mean, sd)) in self
            .mean_probability
            .iter()
            .zip(&self.stddev)
            .enumerate()
        {
            out.push_str(&format!(
                "{m},{},{}\n",
                crate::export::fmt_f64(*mean),
                crate::export::fmt_f64(*sd)
            ));
        }
        out
    }
}

/// Sends the scheduled atoms through the cavity, unrecorded, and tracks the
/// probability of the target photon number.
///
/// Each realization draws its own noisy eta per atom from a stream derived
/// from (seed, realization, atom), so results are reproducible and
/// independent of evaluation order. A negative effective eta (possible only
/// for sigma near 1) is redrawn and counted in the outcome. Noiseless runs
/// are deterministic, so they must use exactly one realization.
pub fn run_schedule(
    d0: &PhotonDistribution,
    schedule: &Schedule,
    case: AtomCase,
    noise: &NoiseModel,
    target_n: usize,
    realizations: usize,
) -> Result<ScheduleOutcome> {
    if realizations == 0 {
        return Err(Error::InvalidSpec("realizations must be >= 1".into()));
    }
    if noise.is_noiseless() && realizations != 1 {
        return Err(Error::InvalidSpec(format!(
            "a noiseless run is deterministic; use realizations = 1, not {realizations}"
        )));
    }
    let m = schedule.len();
    // Upward pumping adds at most one photon per atom; one spare slot keeps
    // the case-a coverage requirement satisfied at the final atom.
    let filter_nmax = d0.nmax() + m + 2;
    let sigma = noise.relative_sigma();
    let mut resamples = 0u64;
    let mut rows = Vec::with_capacity(realizations);

    for r in 0..realizations {
        let mut d = d0.clone();
        let mut row = Vec::with_capacity(m + 1);
        row.push(d.prob(target_n));
        for (j, &eta) in schedule.etas().iter().enumerate() {
            let eta_eff = if sigma == 0.0 {
                eta
            } else {
                let mut rng = sub_rng(noise.seed, r as u64, j as u64);
                loop {
                    let xi: f64 = rng.sample(StandardNormal);
                    let candidate = eta * (1.0 + sigma * xi);
                    if candidate >= 0.0 {
                        break candidate;
                    }
                    resamples += 1;
                }
            };
            d = ensemble_step(&d, &resonant_filter(eta_eff, filter_nmax), case)?;
            row.push(d.prob(target_n));
        }
        rows.push(row);
    }

    let mut mean_probability = Vec::with_capacity(m + 1);
    let mut stddev = Vec::with_capacity(m + 1);
    for col in 0..=m {
        let mean = kahan_sum(rows.iter().map(|row| row[col])) / realizations as f64;
        let sd = if realizations > 1 {
            let ss = kahan_sum(rows.iter().map(|row| {
                let dev = row[col] - mean;
                dev * dev
            }));
            (ss / (realizations - 1) as f64).sqrt()
        } else {
            0.0
        };
        mean_probability.push(mean);
        stddev.push(sd);
    }

    Ok(ScheduleOutcome {
        mean_probability,
        stddev,
        realizations,
        resamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::ensemble_run;

    // 1/sqrt(11), evaluated at 50-digit precision.
    const ETA_10_1: f64 = 0.30151134457776362265;

    #[test]
    fn eta_anchors() {
        assert_eq!(eta_for_trap(35, 6).unwrap(), 1.0);
        assert_eq!(eta_for_trap(48, 7).unwrap(), 1.0);
        assert_eq!(eta_for_trap(63, 8).unwrap(), 1.0);
        assert_eq!(eta_for_trap(0, 1).unwrap(), 1.0);
        assert!((eta_for_trap(10, 1).unwrap() - ETA_10_1).abs() < 1e-16);
        assert!(eta_for_trap(10, 0).is_err());
    }

    #[test]
    fn unit_coupling_traps_squares_minus_one() {
        let traps = trap_states(1.0, 100);
        let n: Vec<usize> = traps.iter().map(|t| t.n_prime).collect();
        assert_eq!(n, vec![0, 3, 8, 15, 24, 35, 48, 63, 80, 99]);
        for (i, t) in traps.iter().enumerate() {
            assert_eq!(t.q, i as u64 + 1);
            assert_eq!(t.eta(), 1.0);
        }
    }

    #[test]
    fn half_coupling_traps() {
        let traps = trap_states(0.5, 20);
        assert_eq!(
            traps,
            vec![
                TrappingState { n_prime: 3, q: 1 },
                TrappingState { n_prime: 15, q: 2 },
            ]
        );
    }

    #[test]
    fn irrational_coupling_traps_nothing() {
        assert!(trap_states(std::f64::consts::PI / 7.0, 50).is_empty());
        assert!(trap_states(0.0, 50).is_empty());
        assert!(trap_states(-1.0, 50).is_empty());
    }

    #[test]
    fn blocks_partition_photon_numbers() {
        assert_eq!(
            block_boundaries(1.0, 10),
            vec![(0, 0), (1, 3), (4, 8), (9, 10)]
        );
        // No traps below nmax: one open block.
        assert_eq!(
            block_boundaries(std::f64::consts::PI / 7.0, 12),
            vec![(0, 12)]
        );
        // nmax exactly on a trap: no trailing partial block.
        assert_eq!(block_boundaries(1.0, 8), vec![(0, 0), (1, 3), (4, 8)]);
    }

    #[test]
    fn schedules_trap_the_target_at_every_atom() {
        let fixed = make_schedule_fixed(10, 1, 3).unwrap();
        assert_eq!(fixed.etas(), &[ETA_10_1; 3]);

        let inc = make_schedule_incrementing(10, 1, 4).unwrap();
        for (j, &eta) in inc.etas().iter().enumerate() {
            assert!((eta - (j as f64 + 1.0) / 11f64.sqrt()).abs() < 1e-15);
            let traps = trap_states(eta, 10);
            assert!(traps
                .iter()
                .any(|t| t.n_prime == 10 && t.q == j as u64 + 1));
        }
        assert!(inc.etas().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(inc.etas()[0], fixed.etas()[0]);
    }

    #[test]
    fn schedule_rejects_nonpositive_eta() {
        assert!(Schedule::new(vec![0.5, 0.0]).is_err());
        assert!(Schedule::new(vec![-0.1]).is_err());
        assert!(Schedule::new(vec![]).unwrap().is_empty());
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::new(0.02, 1).is_ok());
        assert!(NoiseModel::new(0.0, 1).unwrap().is_noiseless());
        assert!(NoiseModel::new(1.0, 1).is_err());
        assert!(NoiseModel::new(-0.1, 1).is_err());
    }

    #[test]
    fn noiseless_run_is_the_plain_recurrence_and_monotone() {
        let d0 = PhotonDistribution::coherent(4.0, 44, 1e-12).unwrap();
        let schedule = make_schedule_fixed(10, 1, 30).unwrap();
        let out = run_schedule(
            &d0,
            &schedule,
            AtomCase::A,
            &NoiseModel::noiseless(0),
            10,
            1,
        )
        .unwrap();
        assert_eq!(out.mean_probability.len(), 31);
        assert!(out.stddev.iter().all(|&s| s == 0.0));
        assert_eq!(out.resamples, 0);
        assert!(out
            .mean_probability
            .windows(2)
            .all(|w| w[1] >= w[0] - 1e-15));

        let f = resonant_filter(ETA_10_1, d0.nmax() + 32);
        let history = ensemble_run(&d0, &f, AtomCase::A, 30).unwrap();
        for (m, d) in history.iter().enumerate() {
            assert!((out.mean_probability[m] - d.prob(10)).abs() < 1e-15);
        }
    }

    #[test]
    fn noiseless_run_requires_one_realization() {
        let d0 = PhotonDistribution::vacuum(5);
        let schedule = make_schedule_fixed(10, 1, 3).unwrap();
        assert!(matches!(
            run_schedule(
                &d0,
                &schedule,
                AtomCase::A,
                &NoiseModel::noiseless(0),
                10,
                5
            ),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn incrementing_schedule_is_faster_than_fixed() {
        let d0 = PhotonDistribution::coherent(4.0, 44, 1e-12).unwrap();
        let noiseless = NoiseModel::noiseless(0);
        let fixed = run_schedule(
            &d0,
            &make_schedule_fixed(10, 1, 400).unwrap(),
            AtomCase::A,
            &noiseless,
            10,
            1,
        )
        .unwrap();
        let inc = run_schedule(
            &d0,
            &make_schedule_incrementing(10, 1, 400).unwrap(),
            AtomCase::A,
            &noiseless,
            10,
            1,
        )
        .unwrap();
        let m_fixed = fixed.first_reaching(0.9).expect("fixed should reach 0.9");
        let m_inc = inc
            .first_reaching(0.9)
            .expect("incrementing should reach 0.9");
        assert!(m_inc < m_fixed, "incrementing {m_inc} vs fixed {m_fixed}");
    }

    #[test]
    fn noisy_runs_are_reproducible_and_degrade_trapping() {
        let d0 = PhotonDistribution::coherent(4.0, 44, 1e-12).unwrap();
        let schedule = make_schedule_fixed(10, 1, 60).unwrap();
        let noise = NoiseModel::new(0.02, 5).unwrap();
        let a = run_schedule(&d0, &schedule, AtomCase::A, &noise, 10, 40).unwrap();
        let b = run_schedule(&d0, &schedule, AtomCase::A, &noise, 10, 40).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.resamples, 0);
        assert!(a
            .mean_probability
            .iter()
            .all(|&p| (0.0..=1.0).contains(&p)));
        assert!(a.stddev.iter().skip(1).any(|&s| s > 0.0));

        let other = NoiseModel::new(0.02, 6).unwrap();
        let c = run_schedule(&d0, &schedule, AtomCase::A, &other, 10, 40).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn wild_noise_triggers_resampling() {
        let d0 = PhotonDistribution::vacuum(3);
        let schedule = Schedule::new(vec![0.4; 25]).unwrap();
        let noise = NoiseModel::new(0.9, 11).unwrap();
        let out = run_schedule(&d0, &schedule, AtomCase::A, &noise, 1, 10).unwrap();
        assert!(out.resamples > 0);
        assert!(out
            .mean_probability
            .iter()
            .all(|&p| p.is_finite() && (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn csv_layout() {
        let out = ScheduleOutcome {
            mean_probability: vec![0.25, 0.5],
            stddev: vec![0.0, 0.125],
            realizations: 2,
            resamples: 0,
        };
        let csv = out.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "m,mean_probability,stddev");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,2.5"));
        assert!(lines[2].starts_with("1,5.0"));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn trap_arithmetic_round_trips(n_prime in 0usize..200, q in 1u64..10) {
                let eta = eta_for_trap(n_prime, q).unwrap();
                let traps = trap_states(eta, n_prime);
                prop_assert!(traps.iter().any(|t| t.n_prime == n_prime && t.q == q));
                // Blocks partition 0..=nmax without gaps or overlap.
                let blocks = block_boundaries(eta, n_prime + 5);
                let mut expect = 0usize;
                for (lo, hi) in blocks {
                    prop_assert_eq!(lo, expect);
                    prop_assert!(hi >= lo);
                    expect = hi + 1;
                }
                prop_assert_eq!(expect, n_prime + 6);
            }
        }
    }
}
