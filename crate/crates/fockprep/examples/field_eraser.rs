//! Strip photons one at a time with ground-state atoms.
//!
//! A strongly adiabatic crossing (here lambda1 = 0, lambda2 = 8, eta = 8.2,
//! integrated numerically) transfers each ground-state atom to the excited
//! state with probability essentially 1 in every occupied manifold. Each
//! atom therefore removes exactly one photon, and the distribution marches
//! down the ladder unchanged in shape: P_m(n) = P_0(n + m) for n >= 1,
//! while n = 0 collects the mass that ran out of photons.
//!
//!   cargo run --example field_eraser

use fockprep::dynamics::{AtomCase, DKParams, DEFAULT_TOL, DEFAULT_WINDOW};
use fockprep::filters::numeric_filter;
use fockprep::fockspace::PhotonDistribution;
use fockprep::measurement::ensemble_run;

fn main() {
    let nmax = 30;
    let d0 = PhotonDistribution::coherent(3.0, nmax, 1e-9).unwrap();
    let params = DKParams::from_dimensionless(0.0, 8.0, 8.2).unwrap();
    let filter =
        numeric_filter(&params, AtomCase::B, nmax, DEFAULT_WINDOW, DEFAULT_TOL).unwrap();

    let atoms = 5;
    let history = ensemble_run(&d0, &filter, AtomCase::B, atoms).unwrap();

    println!("coherent field, mean photon number 3; {atoms} ground-state atoms\n");
    println!("  m   mean photons   P_m(1)        P_0(1+m)      P_m(0)");
    for (m, d) in history.iter().enumerate() {
        println!(
            "  {m}   {:.6}       {:.6}      {:.6}      {:.6}",
            d.mean_photon(),
            d.prob(1),
            d0.prob(1 + m),
            d.prob(0)
        );
    }

    let mut worst = 0.0f64;
    for (m, d) in history.iter().enumerate() {
        for n in 1..=nmax - m {
            worst = worst.max((d.prob(n) - d0.prob(n + m)).abs());
        }
    }
    println!("\nworst |P_m(n) - P_0(n+m)| over n >= 1: {worst:.2e}");
    println!("the vacuum picks up one rung of the original distribution per atom.");
}
