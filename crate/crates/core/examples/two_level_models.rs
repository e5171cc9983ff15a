//! Two-level reduction of a soft-Coulomb atom and the Rabi, Jaynes-Cummings
//! and Dicke models built from it.

use lwqed::hamiltonians::{
    build_dicke, build_jaynes_cummings, build_rabi, dicke_excitation_number, two_level_reduction, ExternalPotential,
    Mode,
};
use lwqed::hilbert::{GridSpec, PhysicalConstants};
use lwqed::spectra::lowest_eigenvalues;

fn main() -> lwqed::error::Result<()> {
    let c = PhysicalConstants::atomic();
    let grid = GridSpec::centered_dirichlet(15.0, 0.05, 4)?;
    let atom = ExternalPotential::SoftCoulomb { charge: 1.0, softening: 1.0 };
    let mode = Mode::new(0.4, 0.05);
    let red = two_level_reduction(&grid, &atom, &mode, &c)?;
    println!("E_g {:.8}, E_e {:.8}, d_ge {:.6}, Omega_R {:.6}", red.e_g, red.e_e, red.d_ge, red.omega_r);

    let n_max = 20;
    println!("rabi {:?}", lowest_eigenvalues(&build_rabi(&red, &mode, false, n_max, &c)?, 4, 1e-12)?);
    println!("jaynes-cummings {:?}", lowest_eigenvalues(&build_jaynes_cummings(&red, &mode, n_max, &c)?, 4, 1e-12)?);

    let dicke = build_dicke(&red, &mode, 4, n_max, &c)?;
    let number = dicke_excitation_number(4, n_max)?;
    let comm = dicke.matrix().mul(&number)?.sub(&number.mul(dicke.matrix())?)?;
    println!("dicke(4) lowest {:?}", lowest_eigenvalues(&dicke, 4, 1e-12)?);
    println!("|[H, N_ex]| max entry {:.1e}", comm.max_abs());
    Ok(())
}
