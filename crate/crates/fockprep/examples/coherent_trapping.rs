//! Funnel a bright coherent state onto trapped photon numbers.
//!
//! At unit pulse area the resonant stay probability cos^2(pi sqrt(n + 1))
//! is exactly 1 whenever sqrt(n + 1) is an integer, so photon numbers
//! 0, 3, 8, 15, 24, 35, 48, 63, ... are ceilings the pumping cannot cross.
//! The trapped numbers slice the ladder into closed blocks: mass inside a
//! block can only climb toward its top. Pump a coherent state with mean 47
//! long enough and nearly everything ends up on 35, 48 and 63.
//!
//!   cargo run --example coherent_trapping

use fockprep::filters::resonant_filter;
use fockprep::fockspace::PhotonDistribution;
use fockprep::measurement::{ensemble_run, AtomCase};
use fockprep::trapping::{block_boundaries, trap_states};

fn main() {
    let d0 = PhotonDistribution::coherent(47.0, 136, 1e-12).unwrap();
    let filter = resonant_filter(1.0, 150);
    let history = ensemble_run(&d0, &filter, AtomCase::A, 1000).unwrap();

    let nmax = history.last().unwrap().nmax();
    let traps: Vec<usize> = trap_states(1.0, nmax).iter().map(|t| t.n_prime).collect();
    println!("trapped photon numbers up to {nmax}: {traps:?}\n");

    println!("mass per block (lower..=upper ends at a trap):");
    println!("  block        m=0       m=100     m=1000");
    for (lo, hi) in block_boundaries(1.0, nmax) {
        let mass = |m: usize| -> f64 { (lo..=hi).map(|n| history[m].prob(n)).sum() };
        if mass(0) > 1e-6 || mass(1000) > 1e-6 {
            println!(
                "  {lo:3}..={hi:3}   {:.6}  {:.6}  {:.6}",
                mass(0),
                mass(100),
                mass(1000)
            );
        }
    }

    let last = history.last().unwrap();
    let mut peaks: Vec<(usize, f64)> = last.probs().iter().copied().enumerate().collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("\nlargest probabilities after 1000 atoms:");
    for (n, p) in &peaks[..4] {
        println!("  P({n}) = {p:.4}");
    }
    println!("\nblock masses never change (the filter cannot move mass across a");
    println!("trap), so the final peaks are the block tops weighted by the mass");
    println!("the initial coherent state put into each block.");
}
