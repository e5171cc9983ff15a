//! Ground-state energy as the simulation box grows. Without the dipole
//! self-energy the ground state slides to the wall and the energy keeps
//! dropping; with it the spectrum settles.

use lwqed::hamiltonians::{build_length_gauge, ExternalPotential, ModeSet};
use lwqed::hilbert::{CompositeBasis, GridSpec, PhysicalConstants};
use lwqed::spectra::box_growth_scan;

fn main() -> lwqed::error::Result<()> {
    let c = PhysicalConstants::atomic();
    let modes = ModeSet::single(1.0, 0.2);
    let well = ExternalPotential::GaussianWell { depth: 1.0, width: 1.0 };
    let lengths = [10.0, 20.0, 40.0];

    for include_dip in [false, true] {
        let report = box_growth_scan(
            |l| {
                let grid = GridSpec::centered_dirichlet(l / 2.0, 0.2, 4)?;
                let basis = CompositeBasis::uniform(grid.clone(), 30, 1)?;
                Ok((grid, build_length_gauge(&basis, &modes, &well, include_dip, &c)?))
            },
            &lengths,
            1,
            1e-6,
        )?;
        println!("include_dip {include_dip}: {}", report.verdict);
        for (i, l) in lengths.iter().enumerate() {
            println!(
                "  L {l:>5}: E0 {:.8}, centroid {:+.3}, distance to wall {:.3}",
                report.values[i][0], report.centroids[i], report.edge_distances[i]
            );
        }
    }
    Ok(())
}
