//! Build and inspect the three kinds of stay-probability tables.
//!
//! A filter table holds, per manifold n, the probability that an atom
//! crossing the cavity leaves the joint atom-field state where it was.
//! Three constructions are available:
//!
//!   - pulse-shaped crossing (closed form in lambda1, lambda2, eta),
//!   - constant coupling on resonance, cos^2(pi eta sqrt(n)),
//!   - adiabatic limit, a single n-independent kappa.
//!
//!   cargo run --example filter_tables

use fockprep::filters::{adiabatic_filter, adiabatic_kappa, dk_filter, resonant_filter};

fn main() {
    let nmax = 12;

    // A slow crossing that sweeps through resonance: almost every atom
    // hands its photon over, in every manifold.
    let swept = dk_filter(1.0, 5.0, 1.2, nmax).unwrap();
    // The same pulse but never crossing zero detuning: atoms stay put.
    let unswept = dk_filter(5.0, 1.0, 1.2, nmax).unwrap();
    // Resonant, unit pulse area: the trap zeros sit where sqrt(n) is whole.
    let resonant = resonant_filter(1.0, nmax);

    println!("stay probability per manifold");
    println!("  n   swept(1,5)   unswept(5,1)  resonant eta=1");
    for n in 0..=nmax {
        println!(
            "  {n:2}  {:.6}     {:.6}      {:.6}",
            swept.p_plus(n),
            unswept.p_plus(n),
            resonant.p_plus(n)
        );
    }
    println!("\nmanifold 0 always reads 1: an atom in the lower state in front of");
    println!("the empty cavity has nothing to exchange.");
    println!("\nresonant rows 1, 4 and 9 are exactly 1: trapped photon numbers.");

    let kappa = adiabatic_kappa(1.0, 5.0);
    let limit = adiabatic_filter(kappa, 3);
    println!(
        "\nadiabatic limit of the swept pulse: kappa = {:.3e}, table rows {:?}",
        kappa.value(),
        limit.entries()
    );
}
