//! Climb the Fock ladder one photon per atom.
//!
//! A full-transfer crossing (kappa = 0) forces every excited atom to leave
//! its photon behind, so after m unrecorded atoms the vacuum has become
//! exactly |m>. Run with:
//!
//!   cargo run --example fock_ladder

use fockprep::filters::{adiabatic_filter, Kappa};
use fockprep::fockspace::PhotonDistribution;
use fockprep::measurement::{ensemble_run, AtomCase};

fn main() {
    let atoms = 10;
    let filter = adiabatic_filter(Kappa::new(0.0).unwrap(), atoms + 2);
    let history = ensemble_run(
        &PhotonDistribution::vacuum(0),
        &filter,
        AtomCase::A,
        atoms,
    )
    .unwrap();

    println!("full-transfer pumping of the vacuum, one row per atom:");
    for (m, d) in history.iter().enumerate() {
        let off_target = d
            .probs()
            .iter()
            .enumerate()
            .filter(|&(n, _)| n != m)
            .map(|(_, &p)| p)
            .sum::<f64>()
            .max(0.0);
        println!(
            "  after {m:2} atoms: P({m:2}) = {:.1}, everything else = {off_target:.1e}",
            d.prob(m)
        );
    }
    println!("\nthe ladder is exact: each step is a deterministic one-photon deposit.");
}
