//! Partial-transfer pumping gives a binomial photon distribution.
//!
//! When every atom has the same stay probability kappa in every manifold
//! (the adiabatic crossing limit), m atoms sent through the vacuum leave
//! behind a binomial distribution: each atom independently deposits its
//! photon with probability 1 - kappa. This example runs the atom-by-atom
//! recurrence and checks it against the closed form, including the
//! variance law m kappa (1 - kappa).
//!
//!   cargo run --example binomial_pumping

use fockprep::filters::{adiabatic_filter, Kappa};
use fockprep::fockspace::PhotonDistribution;
use fockprep::measurement::{binomial_closed_form, ensemble_run, AtomCase};

fn main() {
    let kappa = Kappa::new(0.3).unwrap();
    let atoms = 40;
    let filter = adiabatic_filter(kappa, atoms + 2);
    let history = ensemble_run(
        &PhotonDistribution::vacuum(0),
        &filter,
        AtomCase::A,
        atoms,
    )
    .unwrap();

    let recurrence = history.last().unwrap();
    let closed = binomial_closed_form(kappa, atoms);

    println!("kappa = {}, {atoms} atoms", kappa.value());
    println!("  n   recurrence     closed form");
    for n in 22..=34 {
        println!(
            "  {n:2}  {:.9}    {:.9}",
            recurrence.prob(n),
            closed.prob(n)
        );
    }

    let sup = (0..=closed.nmax().max(recurrence.nmax()))
        .map(|n| (recurrence.prob(n) - closed.prob(n)).abs())
        .fold(0.0f64, f64::max);
    let expected_var = atoms as f64 * kappa.value() * (1.0 - kappa.value());
    println!("\nsup |recurrence - closed| = {sup:.2e}");
    println!(
        "variance: recurrence {:.12}, m kappa (1 - kappa) = {expected_var:.12}",
        recurrence.variance()
    );
    println!(
        "mean photon number {:.6} (= m (1 - kappa) = {:.6})",
        recurrence.mean_photon(),
        atoms as f64 * (1.0 - kappa.value())
    );
}
