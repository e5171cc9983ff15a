//! Lowest polariton levels of a harmonic electron in a single cavity mode,
//! computed in the length gauge (with dipole self-energy) and in the velocity
//! gauge, at a few photon truncations.

use lwqed::hamiltonians::{build_length_gauge, build_velocity_gauge, ExternalPotential, ModeSet};
use lwqed::hilbert::{CompositeBasis, GridSpec, PhysicalConstants};
use lwqed::spectra::lowest_eigenvalues;

fn main() -> lwqed::error::Result<()> {
    let c = PhysicalConstants::atomic();
    let modes = ModeSet::single(1.5, 0.05);
    let v = ExternalPotential::Harmonic { omega: 1.0 };
    let grid = GridSpec::centered_dirichlet(8.0, 0.1, 4)?;

    for n_max in [4, 8, 12] {
        let basis = CompositeBasis::uniform(grid.clone(), n_max, 1)?;
        let length = lowest_eigenvalues(&build_length_gauge(&basis, &modes, &v, true, &c)?, 4, 1e-10)?;
        let velocity = lowest_eigenvalues(&build_velocity_gauge(&basis, &modes, &v, false, &c)?, 4, 1e-10)?;
        println!("n_max {n_max:>2}");
        for (l, u) in length.iter().zip(&velocity) {
            println!("  length {l:.10}  velocity {u:.10}  gap {:.1e}", (l - u).abs());
        }
    }
    Ok(())
}
