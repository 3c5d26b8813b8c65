//! Verify the unrecorded-measurement recurrence by exhaustive enumeration.
//!
//! Ignoring the detector is the same as averaging over every possible
//! record. The ensemble recurrence does that average implicitly in one
//! linear pass per atom; this example does it the expensive way, walking
//! all 2^m records and summing the conditional distributions weighted by
//! their probabilities, then compares.
//!
//!   cargo run --example brute_force_average

use std::time::Instant;

use fockprep::filters::resonant_filter;
use fockprep::fockspace::PhotonDistribution;
use fockprep::measurement::{brute_force_ensemble, ensemble_run, AtomCase};

fn main() {
    let d0 = PhotonDistribution::coherent(2.0, 25, 1e-9).unwrap();
    let filter = resonant_filter(1.0, 40);

    println!("  m    records    sup |enumerated - recurrence|   time");
    for m in [4usize, 8, 12] {
        let start = Instant::now();
        let brute = brute_force_ensemble(&d0, &filter, AtomCase::A, m).unwrap();
        let elapsed = start.elapsed();
        let recurrence = &ensemble_run(&d0, &filter, AtomCase::A, m).unwrap()[m];
        let sup = (0..=brute.nmax().max(recurrence.nmax()))
            .map(|n| (brute.prob(n) - recurrence.prob(n)).abs())
            .fold(0.0f64, f64::max);
        println!("  {m:2}   {:7}    {sup:.3e}                      {elapsed:.2?}", 1u64 << m);
    }
    println!("\nrecords whose probability is exactly zero (an atom asked to flip");
    println!("where the filter forbids it) contribute nothing and are skipped.");
}
