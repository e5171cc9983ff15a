//! Energy of a displaced mollifier trial state coupled to one cavity mode.
//! Without the dipole self-energy the energy falls linearly with the
//! displacement; with it the energy grows again.

use lwqed::hamiltonians::{ExternalPotential, ModeSet};
use lwqed::hilbert::PhysicalConstants;
use lwqed::variational::{default_kappa, unboundedness_scan, PhotonTrialState, SlaterMollifierConfig};

fn main() -> lwqed::error::Result<()> {
    let c = PhysicalConstants::atomic();
    let modes = ModeSet::single(1.0, 0.1);
    let well = ExternalPotential::GaussianWell { depth: 1.0, width: 1.0 };
    let base = SlaterMollifierConfig { n_electrons: 1, a: 0.0, kappa: default_kappa(&modes)?, spacing: 3.0 };
    let photons = PhotonTrialState::equal_superposition(1);
    let a: Vec<f64> = (0..=10).map(|i| 5.0 * i as f64).collect();

    let without = unboundedness_scan(&base, &a, &photons, &modes, &well, false, &c)?;
    let with = unboundedness_scan(&base, &a, &photons, &modes, &well, true, &c)?;
    println!("{:>6} {:>16} {:>16}", "a", "without dip", "with dip");
    for (i, x) in a.iter().enumerate() {
        println!("{x:>6.1} {:>16.8} {:>16.8}", without.energies[i].total, with.energies[i].total);
    }
    println!("tail slope {:.10} (expected {:.10})", without.tail_slope, without.expected_slope);
    Ok(())
}
