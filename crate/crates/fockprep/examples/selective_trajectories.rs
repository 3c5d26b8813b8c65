//! Sample recorded measurement sequences and watch the field collapse.
//!
//! When the atomic state is detected after each crossing, the field
//! distribution conditions on the record. Every record (c_1 .. c_m) has a
//! definite probability, and the photon distribution it leaves behind can
//! be sharply different from the unrecorded average. This samples a few
//! records with a fixed seed and prints what each one did to the field.
//!
//!   cargo run --example selective_trajectories

use fockprep::filters::resonant_filter;
use fockprep::fockspace::PhotonDistribution;
use fockprep::measurement::{sample_trajectories, AtomCase};

fn main() {
    let d0 = PhotonDistribution::coherent(4.0, 44, 1e-12).unwrap();
    let filter = resonant_filter(1.0, 60);
    let atoms = 6;
    let filters = vec![&filter; atoms];
    let cases = vec![AtomCase::A; atoms];

    let trajectories = sample_trajectories(&d0, &filters, &cases, 5, 42).unwrap();

    println!(
        "coherent field, mean photon number {:.1}; {atoms} excited atoms, resonant coupling\n",
        d0.mean_photon()
    );
    for (i, t) in trajectories.iter().enumerate() {
        let ks: Vec<i64> = t.sequence.entries().iter().map(|&(_, o)| o.k()).collect();
        println!(
            "record {i}: k = {ks:?}  probability {:.4}  deposited photons {}",
            t.probability,
            -t.sequence.nu()
        );
        println!(
            "          conditioned mean photon number {:.3}, variance {:.3}",
            t.final_dist.mean_photon(),
            t.final_dist.variance()
        );
    }
    println!("\neach k = -1 is a detected ground-state atom, i.e. one photon left in");
    println!("the cavity; the conditioned field shifts and narrows accordingly.");
}
