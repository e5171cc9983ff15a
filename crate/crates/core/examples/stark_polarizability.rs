//! Static polarizability of the semi-classical, self-consistent model from a
//! field scan, next to the sum-over-states value.

use lwqed::hamiltonians::{ExternalPotential, ModeSet};
use lwqed::hilbert::{GridSpec, PhysicalConstants};
use lwqed::semiclassical::{stark_scan, ScfConfig};

fn main() -> lwqed::error::Result<()> {
    let c = PhysicalConstants::atomic();
    let grid = GridSpec::centered_dirichlet(8.0, 0.1, 4)?;
    let modes = ModeSet::single(1.0, 0.2);
    let fields = [-0.004, -0.002, 0.0, 0.002, 0.004];
    let well = ExternalPotential::GaussianWell { depth: 1.0, width: 1.0 };

    let r = stark_scan(&grid, &well, &modes, &fields, &ScfConfig::default(), &c)?;
    for p in &r.points {
        println!("E {:+.4}: energy {:?}, dipole {:?}, iterations {:?}", p.field, p.energy, p.dipole, p.iterations);
    }
    println!("alpha from fit        {:.8}", r.alpha_fit);
    println!("alpha from dipole     {:.8}", r.alpha_dipole);
    println!("alpha sum over states {:.8}", r.alpha_pt.self_consistent);
    println!("relative agreement    {:.1e}", r.relative_agreement);
    Ok(())
}
