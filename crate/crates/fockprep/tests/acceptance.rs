//! Acceptance suite: one test per shipping criterion, each printing a
//! single PASS/FAIL line (run with `--nocapture` to see them). Tolerances
//! are pinned here, next to the checks they gate.

use std::time::{Duration, Instant};

use fockprep::dynamics::{AtomCase, DKParams, DEFAULT_TOL, DEFAULT_WINDOW};
use fockprep::filters::{
    adiabatic_filter, adiabatic_kappa, dk_filter, numeric_filter, resonant_filter, Kappa,
};
use fockprep::fockspace::PhotonDistribution;
use fockprep::measurement::{
    binomial_closed_form, brute_force_ensemble, ensemble_run, sample_trajectories,
    sequence_probability, Outcome, OutcomeSequence,
};
use fockprep::trapping::{
    block_boundaries, make_schedule_fixed, make_schedule_incrementing, run_schedule, NoiseModel,
};

fn report(number: u32, detail: &str, pass: bool) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {number:02}: {verdict} - {detail}");
    assert!(pass, "criterion {number:02} failed: {detail}");
}

/// Closed-form pulse-shaped filter vs the integrated propagator over the
/// full parameter grid, both detuning orderings included.
#[test]
fn criterion_01_closed_form_matches_integrated_propagator() {
    const TOLERANCE: f64 = 1e-6;
    const BUDGET: Duration = Duration::from_secs(120);
    const NMAX: usize = 30;
    let start = Instant::now();
    let lambdas = [0.0, 0.5, 1.0, 2.0];
    let mut max_diff = 0.0f64;
    let mut points = 0usize;
    for &l1 in &lambdas {
        for &l2 in &lambdas {
            for eta in [0.3, 1.0, 2.0] {
                let analytic = dk_filter(l1, l2, eta, NMAX).unwrap();
                let params = DKParams::from_dimensionless(l1, l2, eta).unwrap();
                let numeric =
                    numeric_filter(&params, AtomCase::A, NMAX, DEFAULT_WINDOW, DEFAULT_TOL)
                        .unwrap();
                for n in 0..=NMAX {
                    max_diff = max_diff.max((analytic.p_plus(n) - numeric.p_plus(n)).abs());
                    points += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        &format!(
            "max |closed form - integrated| = {max_diff:.3e} <= {TOLERANCE:.0e} over {points} grid points in {elapsed:.2?} (budget {BUDGET:?})"
        ),
        max_diff <= TOLERANCE && elapsed < BUDGET,
    );
}

/// Constant-coupling resonant transfer probability against the integrated
/// zero-detuning pulse.
#[test]
fn criterion_02_resonant_closed_form() {
    const TOLERANCE: f64 = 1e-6;
    let mut max_diff = 0.0f64;
    for eta in [0.3, 1.0, 2.5] {
        let params = DKParams::from_dimensionless(0.0, 0.0, eta).unwrap();
        let numeric =
            numeric_filter(&params, AtomCase::A, 50, DEFAULT_WINDOW, DEFAULT_TOL).unwrap();
        for n in 1..=50usize {
            let exact = (std::f64::consts::PI * eta * (n as f64).sqrt()).cos().powi(2);
            max_diff = max_diff.max((numeric.p_plus(n) - exact).abs());
        }
    }
    report(
        2,
        &format!("max |integrated - cos^2(pi eta sqrt(n))| = {max_diff:.3e} <= {TOLERANCE:.0e}"),
        max_diff <= TOLERANCE,
    );
}

/// The three regimes of the adiabatic stay probability.
#[test]
fn criterion_03_adiabatic_kappa_anchors() {
    let balanced = adiabatic_kappa(4.0, 4.0).value();
    let swept_through = adiabatic_kappa(1.0, 5.0).value();
    let never_crossing = adiabatic_kappa(5.0, 1.0).value();
    let pass = (balanced - 0.5).abs() <= 1e-9
        && swept_through <= 1e-8
        && never_crossing >= 1.0 - 1e-8;
    report(
        3,
        &format!(
            "kappa(4,4) = {balanced}, kappa(1,5) = {swept_through:.3e}, kappa(5,1) = 1 - {:.3e}",
            1.0 - never_crossing
        ),
        pass,
    );
}

/// Full-transfer pumping climbs the Fock ladder one photon per atom.
#[test]
fn criterion_04_fock_ladder_is_exact() {
    const M: usize = 50;
    let filter = adiabatic_filter(Kappa::new(0.0).unwrap(), M + 2);
    let history = ensemble_run(&PhotonDistribution::vacuum(0), &filter, AtomCase::A, M).unwrap();
    let mut worst_off_target = 0.0f64;
    let mut on_target = true;
    for (m, d) in history.iter().enumerate() {
        on_target &= d.prob(m) == 1.0;
        let off: f64 = d
            .probs()
            .iter()
            .enumerate()
            .filter(|&(n, _)| n != m)
            .map(|(_, &p)| p)
            .sum();
        worst_off_target = worst_off_target.max(off);
    }
    report(
        4,
        &format!("delta(n,m) for m <= {M}; worst off-target mass {worst_off_target:.1e} <= 1e-14"),
        on_target && worst_off_target <= 1e-14,
    );
}

/// Adiabatic pumping of the vacuum is binomial, with variance m kappa (1-kappa).
#[test]
fn criterion_05_binomial_law() {
    const M: usize = 100;
    let mut max_sup = 0.0f64;
    let mut max_var_err = 0.0f64;
    for kappa in [0.1, 0.5, 0.9] {
        let k = Kappa::new(kappa).unwrap();
        let filter = adiabatic_filter(k, M + 2);
        let history =
            ensemble_run(&PhotonDistribution::vacuum(0), &filter, AtomCase::A, M).unwrap();
        for (m, d) in history.iter().enumerate() {
            let closed = binomial_closed_form(k, m);
            let top = d.nmax().max(closed.nmax());
            let sup = (0..=top)
                .map(|n| (d.prob(n) - closed.prob(n)).abs())
                .fold(0.0f64, f64::max);
            max_sup = max_sup.max(sup);
            max_var_err =
                max_var_err.max((closed.variance() - m as f64 * kappa * (1.0 - kappa)).abs());
        }
    }
    report(
        5,
        &format!(
            "sup |closed - recurrence| = {max_sup:.3e} <= 1e-12 for m <= {M}; max variance error {max_var_err:.3e} <= 1e-10"
        ),
        max_sup <= 1e-12 && max_var_err <= 1e-10,
    );
}

/// Enumerating every outcome record and averaging reproduces the recurrence.
#[test]
fn criterion_06_brute_force_average_equals_recurrence() {
    const BUDGET: Duration = Duration::from_secs(60);
    let start = Instant::now();
    let d0 = PhotonDistribution::coherent(2.0, 25, 1e-9).unwrap();
    let filter = resonant_filter(1.0, 40);
    let mut max_sup = 0.0f64;
    for m in 1..=12usize {
        let brute = brute_force_ensemble(&d0, &filter, AtomCase::A, m).unwrap();
        let recurrence = &ensemble_run(&d0, &filter, AtomCase::A, m).unwrap()[m];
        let top = brute.nmax().max(recurrence.nmax());
        let sup = (0..=top)
            .map(|n| (brute.prob(n) - recurrence.prob(n)).abs())
            .fold(0.0f64, f64::max);
        max_sup = max_sup.max(sup);
    }
    let elapsed = start.elapsed();
    report(
        6,
        &format!(
            "sup |enumerated - recurrence| = {max_sup:.3e} <= 1e-10 for m <= 12 in {elapsed:.2?} (budget {BUDGET:?})"
        ),
        max_sup <= 1e-10 && elapsed < BUDGET,
    );
}

/// Ground-state atoms through a strongly adiabatic crossing strip one
/// photon each: the distribution marches down unchanged in shape. The
/// identity applies to n >= 1; n = 0 accumulates the stripped mass.
#[test]
fn criterion_07_field_eraser() {
    const TOLERANCE: f64 = 1e-4;
    let nmax = 30usize;
    let d0 = PhotonDistribution::coherent(3.0, nmax, 1e-9).unwrap();
    let params = DKParams::from_dimensionless(0.0, 8.0, 8.2).unwrap();
    let filter =
        numeric_filter(&params, AtomCase::B, nmax, DEFAULT_WINDOW, DEFAULT_TOL).unwrap();
    let history = ensemble_run(&d0, &filter, AtomCase::B, 5).unwrap();
    let mut max_diff = 0.0f64;
    for (m, d) in history.iter().enumerate() {
        for n in 1..=nmax - m {
            max_diff = max_diff.max((d.prob(n) - d0.prob(n + m)).abs());
        }
    }
    report(
        7,
        &format!("max |P_m(n) - P_0(n+m)| = {max_diff:.3e} <= {TOLERANCE:.0e} for m <= 5, n >= 1"),
        max_diff <= TOLERANCE,
    );
}

/// Resonant pumping of a bright coherent state piles mass onto the trapped
/// photon numbers 35, 48, 63 without leaking across block boundaries.
#[test]
fn criterion_08_bright_coherent_trapping_structure() {
    const BUDGET: Duration = Duration::from_secs(60);
    let start = Instant::now();
    let d0 = PhotonDistribution::coherent(47.0, 136, 1e-12).unwrap();
    let filter = resonant_filter(1.0, 136 + 1002);
    let history = ensemble_run(&d0, &filter, AtomCase::A, 1000).unwrap();
    let final_nmax = history.last().unwrap().nmax();
    let blocks = block_boundaries(1.0, final_nmax);

    let mut max_block_drift = 0.0f64;
    for pair in history.windows(2) {
        for &(lo, hi) in &blocks {
            let before: f64 = (lo..=hi).map(|n| pair[0].prob(n)).sum();
            let after: f64 = (lo..=hi).map(|n| pair[1].prob(n)).sum();
            max_block_drift = max_block_drift.max((after - before).abs());
        }
    }

    let mut monotone = true;
    for target in [35usize, 48, 63] {
        monotone &= history
            .windows(2)
            .all(|pair| pair[1].prob(target) >= pair[0].prob(target));
    }

    let last = history.last().unwrap();
    let mut indexed: Vec<(usize, f64)> =
        last.probs().iter().copied().enumerate().collect();
    indexed.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut top3: Vec<usize> = indexed[..3].iter().map(|&(n, _)| n).collect();
    top3.sort_unstable();

    let elapsed = start.elapsed();
    report(
        8,
        &format!(
            "block drift {max_block_drift:.1e} <= 1e-12/atom, trapped peaks monotone: {monotone}, top-3 at m=1000: {top3:?} in {elapsed:.2?} (budget {BUDGET:?})"
        ),
        max_block_drift <= 1e-12 && monotone && top3 == vec![35, 48, 63] && elapsed < BUDGET,
    );
}

/// The q-incrementing velocity schedule beats the fixed one, and 2% velocity
/// noise knocks the mean target probability down by many standard errors.
#[test]
fn criterion_09_schedule_ordering_and_noise_damage() {
    const THRESHOLD: f64 = 0.9;
    const SIGMA: f64 = 0.02;
    const REALIZATIONS: usize = 200;
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
    let incrementing = run_schedule(
        &d0,
        &make_schedule_incrementing(10, 1, 400).unwrap(),
        AtomCase::A,
        &noiseless,
        10,
        1,
    )
    .unwrap();
    let m_fixed = fixed.first_reaching(THRESHOLD);
    let m_inc = incrementing.first_reaching(THRESHOLD);
    let speedup = match (m_inc, m_fixed) {
        (Some(a), Some(b)) => a < b,
        _ => false,
    };

    // Noise damage, measured at each schedule's own noiseless success point.
    let mut min_severity = f64::INFINITY;
    for (schedule, success_m, clean) in [
        (
            make_schedule_fixed(10, 1, m_fixed.unwrap()).unwrap(),
            m_fixed.unwrap(),
            &fixed,
        ),
        (
            make_schedule_incrementing(10, 1, m_inc.unwrap()).unwrap(),
            m_inc.unwrap(),
            &incrementing,
        ),
    ] {
        let noisy = run_schedule(
            &d0,
            &schedule,
            AtomCase::A,
            &NoiseModel::new(SIGMA, 7).unwrap(),
            10,
            REALIZATIONS,
        )
        .unwrap();
        let standard_error = noisy.stddev[success_m] / (REALIZATIONS as f64).sqrt();
        let drop = clean.mean_probability[success_m] - noisy.mean_probability[success_m];
        min_severity = min_severity.min(drop / standard_error);
    }

    report(
        9,
        &format!(
            "incrementing reaches {THRESHOLD} at m = {m_inc:?} < fixed m = {m_fixed:?}; noise drop >= {min_severity:.1} standard errors (need >= 5)"
        ),
        speedup && min_severity >= 5.0,
    );
}

/// Sampled outcome records occur at their exact probabilities.
#[test]
fn criterion_10_monte_carlo_frequencies() {
    const COUNT: usize = 100_000;
    let d0 = PhotonDistribution::coherent(2.0, 25, 1e-9).unwrap();
    let filter = resonant_filter(1.0, 40);
    let filters = [&filter, &filter];
    let cases = [AtomCase::A, AtomCase::A];
    let trajectories = sample_trajectories(&d0, &filters, &cases, COUNT, 2024).unwrap();

    let mut pass = true;
    let mut detail = String::new();
    for bits in 0..4u32 {
        let entries: Vec<_> = (0..2)
            .map(|j| {
                let outcome = if bits & (1 << j) != 0 {
                    Outcome::FlipDown
                } else {
                    Outcome::Stay
                };
                (AtomCase::A, outcome)
            })
            .collect();
        let seq = OutcomeSequence::new(entries).unwrap();
        let exact = sequence_probability(&d0, &filters, &seq).unwrap();
        let hits = trajectories
            .iter()
            .filter(|t| t.sequence == seq)
            .count();
        let freq = hits as f64 / COUNT as f64;
        let standard_error = (exact * (1.0 - exact) / COUNT as f64).sqrt();
        let deviation = (freq - exact).abs();
        pass &= deviation <= 3.0 * standard_error;
        detail.push_str(&format!(
            "k={:?}: |{freq:.5} - {exact:.5}| = {:.1} SE; ",
            seq.entries()
                .iter()
                .map(|&(_, o)| o.k())
                .collect::<Vec<_>>(),
            deviation / standard_error.max(1e-300)
        ));
    }
    report(
        10,
        &format!("{COUNT} trajectories, all 4 records within 3 standard errors: {detail}"),
        pass,
    );
}

/// Two CLI runs of the same preset and seed write byte-identical files.
#[test]
fn criterion_11_byte_identical_reruns() {
    let bin = env!("CARGO_BIN_EXE_fockprep");
    let (dir_a, dir_b) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    for dir in [dir_a.path(), dir_b.path()] {
        let output = std::process::Command::new(bin)
            .args(["preset", "fig2", "--seed", "7", "--out"])
            .arg(dir)
            .output()
            .expect("binary should run");
        assert!(
            output.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }

    let mut names: Vec<String> = std::fs::read_dir(dir_a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let mut identical = !names.is_empty();
    for name in &names {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        identical &= a == b;
    }
    report(
        11,
        &format!("preset fig2, seed 7: {} output files byte-identical across reruns", names.len()),
        identical,
    );
}
