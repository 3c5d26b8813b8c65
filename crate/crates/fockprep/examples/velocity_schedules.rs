//! Target a specific Fock state by scheduling the atomic velocity.
//!
//! The pulse area eta is set per atom through the crossing time, so a
//! velocity schedule is an eta schedule. To park the field on |10>, every
//! atom uses an eta that makes 10 a trapped number: eta = q / sqrt(11).
//! Keeping q = 1 works but is slow near the target; incrementing q per atom
//! (q = 1, 2, 3, ...) keeps the kick strong and converges much faster.
//! Velocity noise spoils the trap and caps the attainable fidelity.
//!
//!   cargo run --example velocity_schedules

use fockprep::fockspace::PhotonDistribution;
use fockprep::measurement::AtomCase;
use fockprep::trapping::{
    make_schedule_fixed, make_schedule_incrementing, run_schedule, NoiseModel,
};

fn main() {
    let target = 10;
    let atoms = 200;
    let d0 = PhotonDistribution::coherent(4.0, 44, 1e-12).unwrap();

    let fixed = make_schedule_fixed(target, 1, atoms).unwrap();
    let incrementing = make_schedule_incrementing(target, 1, atoms).unwrap();

    println!("pumping toward |{target}> from a coherent state with mean 4\n");
    println!("  schedule              P({target}) after {atoms} atoms   atoms to reach 0.9");
    for (label, schedule) in [("fixed q=1", &fixed), ("incrementing q", &incrementing)] {
        let run = run_schedule(&d0, schedule, AtomCase::A, &NoiseModel::noiseless(0), target, 1)
            .unwrap();
        let reached = run
            .first_reaching(0.9)
            .map_or("never".to_string(), |m| m.to_string());
        println!(
            "  {label:<20}  {:.6}                 {reached}",
            run.mean_probability[atoms]
        );
    }

    // 2% relative velocity spread, averaged over independent realizations.
    let noise = NoiseModel::new(0.02, 7).unwrap();
    let realizations = 50;
    println!("\nwith 2% velocity noise ({realizations} realizations):");
    for (label, schedule) in [("fixed q=1", &fixed), ("incrementing q", &incrementing)] {
        let run =
            run_schedule(&d0, schedule, AtomCase::A, &noise, target, realizations).unwrap();
        println!(
            "  {label:<20}  mean P({target}) = {:.4} +- {:.4}",
            run.mean_probability[atoms],
            run.stddev[atoms] / (realizations as f64).sqrt()
        );
    }
    println!("\nnoise hurts the incrementing schedule more: a large q multiplies");
    println!("the phase error of every velocity fluctuation.");
}
